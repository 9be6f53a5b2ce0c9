#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "circuits.hpp"
#include "floquet.hpp"
#include "interaction.hpp"
#include "mitigation.hpp"
#include "model.hpp"
#include "opensys.hpp"
#include "pulse.hpp"

namespace ahmsim {

using nlohmann::json;

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = {
      {"single-analog", "single-qutrit analog drive vs exact and Lindblad evolution", "Fig. 2"},
      {"two-analog-digital", "two-qutrit Floquet protocol with calibrated interaction", "Fig. 4 / Fig. 12"},
      {"three-transmon", "three-transmon chain feasibility run with numeric rates", "Fig. 6"},
      {"digital-trotter", "Trotterized circuit simulation with optional noise and mitigation", "Fig. 3 / Fig. 10"},
      {"string-breaking", "local charge dynamics of a domain-wall initial state", "Fig. 5"},
      {"calibrate", "interaction-rate calibration: JAZZ fits and Stark amplitude", "Fig. 8 / Fig. 9"},
      {"resources", "qutrit vs qubit gate counts for the Trotter step", "Fig. 7 / App. H"},
  };
  return reg;
}

namespace {

// ---------------------------------------------------------------------------
// schema helpers

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed, std::vector<Diagnostic>& diags) {
  if (!obj.is_object()) {
    diags.push_back({path, "expected an object", true});
    return;
  }
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) diags.push_back({path + "/" + key, "unknown key", true});
}

bool need(const json& obj, const std::string& path, const std::string& key,
          std::vector<Diagnostic>& diags) {
  if (!obj.contains(key)) {
    diags.push_back({path + "/" + key, "missing required field", true});
    return false;
  }
  return true;
}

double num_or(const json& obj, const std::string& key, double fallback) {
  return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

// ---------------------------------------------------------------------------
// config -> domain objects (units: GHz/MHz/us/ns in the file, SI + rad/s here)

ModelParams parse_model(const json& m) {
  ModelParams p;
  p.kappa = kTwoPi * num_or(m, "kappa_over_2pi", 0.0);
  p.chi = kTwoPi * num_or(m, "chi_over_2pi", 0.0);
  p.beta = kTwoPi * num_or(m, "beta_over_2pi", 0.0);
  p.n_sites = m.contains("n_sites") ? m.at("n_sites").get<int>() : 1;
  p.scale_freq = num_or(m, "scale_freq_hz", 0.0);
  p.validate();
  return p;
}

TransmonSpec parse_transmon(const json& t) {
  TransmonSpec s;
  s.omega01 = kTwoPi * 1e9 * t.at("omega01_ghz").get<double>();
  s.omega12 = kTwoPi * 1e9 * t.at("omega12_ghz").get<double>();
  s.omega23 = kTwoPi * 1e9 * num_or(t, "omega23_ghz", 0.0);
  s.t1_01 = 1e-6 * num_or(t, "t1_01_us", 0.0);
  s.t2_01 = 1e-6 * num_or(t, "t2_01_us", 0.0);
  s.t1_12 = 1e-6 * num_or(t, "t1_12_us", 0.0);
  s.t2_12 = 1e-6 * num_or(t, "t2_12_us", 0.0);
  s.validate();
  return s;
}

CVector parse_initial_state(const json& config, int n_sites) {
  const std::string digits = config.at("initial_state").get<std::string>();
  if (static_cast<int>(digits.size()) != n_sites)
    throw ConfigError("initial_state: expected " + std::to_string(n_sites) + " digits");
  for (char c : digits)
    if (c < '0' || c > '2') throw ConfigError("initial_state: digits must be 0, 1 or 2");
  return basis_state(digits);
}

struct OutputWriter {
  std::string dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::config, "cannot write " + path);
    os << content;
    written.push_back(path);
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void add_series(std::vector<ResultRow>& rows, const std::string& experiment,
                const std::string& series, int site, double t_model, double t_phys,
                double value, std::optional<double> err = std::nullopt) {
  rows.push_back({experiment, series, site, t_model, t_phys, value, err});
}

// ---------------------------------------------------------------------------
// experiment runners

struct Ctx {
  json config;
  uint64_t seed = 1;
  int threads = 0;
  std::vector<ResultRow> rows;
  json report;
  OutputWriter out;
  std::string name;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

void exp_single_analog(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  if (p.n_sites != 1) throw ConfigError("single-analog: model/n_sites must be 1");
  if (p.scale_freq <= 0.0) throw ConfigError("single-analog: model/scale_freq_hz required");
  const TransmonSpec spec = parse_transmon(ctx.config.at("device").at("transmons").at(0));
  const CVector psi0 = parse_initial_state(ctx.config, 1);

  const json& pulse = ctx.config.at("pulse");
  const double r = num_or(pulse, "ramp_fraction", 0.1);
  std::vector<double> durations;
  if (pulse.contains("durations_us")) {
    for (double d : pulse.at("durations_us")) durations.push_back(1e-6 * d);
  } else {
    durations = linspace(0.0, 1e-6 * pulse.at("duration_max_us").get<double>(),
                         pulse.contains("n_points") ? pulse.at("n_points").get<int>() : 41);
  }

  const AnalogSeries series = run_single_analog(spec, p, psi0, durations, r);
  for (size_t i = 0; i < series.time_model.size(); ++i) {
    add_series(ctx.rows, ctx.name, "pulse.lz", 0, series.time_model[i],
               series.time_physical[i], series.lz[i]);
    add_series(ctx.rows, ctx.name, "pulse.lz2", 0, series.time_model[i],
               series.time_physical[i], series.lz2[i]);
  }

  std::vector<double> model_times;
  for (double T : durations) model_times.push_back(T * p.scale_freq);
  const ObservableSeries exact = exact_evolution(p, psi0, model_times);
  for (size_t i = 0; i < exact.times.size(); ++i) {
    add_series(ctx.rows, ctx.name, "exact.lz", 0, exact.times[i], durations[i], exact.lz[i][0]);
    add_series(ctx.rows, ctx.name, "exact.lz2", 0, exact.times[i], durations[i],
               exact.lz2[i][0]);
  }

  // Lindblad model with the constant average Hamiltonian (physical units)
  const CMatrix h_phys = p.scale_freq * single_site_hamiltonian(p);
  const LindbladSpec jumps = jump_ops_from_coherence(spec);
  const CMatrix rho0 = psi0 * psi0.adjoint();
  LindbladOptions lopt;
  lopt.n_sites = 1;
  const LindbladResult lb = lindblad_evolve(h_phys, jumps, rho0, durations, lopt);
  for (size_t i = 0; i < lb.times.size(); ++i) {
    add_series(ctx.rows, ctx.name, "lindblad.lz", 0, lb.times[i] * p.scale_freq, lb.times[i],
               lb.lz[i][0]);
    add_series(ctx.rows, ctx.name, "lindblad.lz2", 0, lb.times[i] * p.scale_freq, lb.times[i],
               lb.lz2[i][0]);
  }
  ctx.report["lindblad"] = {{"max_trace_drift", lb.max_trace_drift},
                            {"min_eigenvalue", lb.min_eigenvalue}};

  const DriveConfig d = map_model_to_drive(p);
  ctx.report["drive"] = {{"omega0_over_2pi_hz", d.omega0 / kTwoPi},
                         {"delta0_over_2pi_hz", d.delta0 / kTwoPi},
                         {"rwa_ratio", rwa_ratio(spec, d)}};
  if (!durations.empty() && durations.back() > 0.0)
    ctx.out.write("schedule.csv", schedule_csv(d, Envelope(durations.back(), r), 256));
}

TransmonPairSpec parse_pair(const json& device) {
  TransmonPairSpec pair;
  pair.a = parse_transmon(device.at("transmons").at(0));
  pair.b = parse_transmon(device.at("transmons").at(1));
  pair.j = kTwoPi * 1e6 * device.at("couplings_mhz").at(0).get<double>();
  pair.validate();
  return pair;
}

StarkConfig parse_stark(const json& device, const TransmonPairSpec& pair, json& report) {
  const json& st = device.at("stark").at(0);
  StarkConfig s;
  s.omega_s = kTwoPi * 1e9 * st.at("freq_ghz").get<double>();
  s.dphi = num_or(st, "dphi", 0.0);
  if (st.contains("calibrate") && st.at("calibrate").get<bool>()) {
    std::vector<double> grid;
    for (double a : st.at("calib_grid_mhz")) grid.push_back(kTwoPi * 1e6 * a);
    const StarkCalibration cal = calibrate_stark_amplitude(pair, s.omega_s, s.dphi, grid);
    s.amp_a = s.amp_b = cal.amplitude;
    report["stark_calibration"] = {
        {"amplitude_mhz", cal.amplitude / (kTwoPi * 1e6)},
        {"residual_z22_khz", cal.residual_z22 / (kTwoPi * 1e3)},
        {"fit_rms_residual_khz", cal.fit.rms_residual / (kTwoPi * 1e3)}};
  } else {
    s.amp_a = s.amp_b = kTwoPi * 1e6 * st.at("amp_mhz").get<double>();
  }
  return s;
}

FloquetSchedule parse_schedule(const json& sch) {
  FloquetSchedule f;
  f.t_e = 1e-9 * num_or(sch, "t_e_ns", 800.0);
  f.t_g = 1e-9 * num_or(sch, "t_g_ns", 60.0);
  f.n_cycles = sch.contains("n_cycles") ? sch.at("n_cycles").get<int>() : 10;
  if (sch.contains("instantaneous_gates"))
    f.instantaneous_gates = sch.at("instantaneous_gates").get<bool>();
  f.ramp_fraction = num_or(sch, "ramp_fraction", 0.1);
  return f;
}

json rates_to_json(const InteractionRates& r) {
  const auto z = r.to(RateBasis::z);
  const auto zeta = r.to(RateBasis::zeta);
  return {{"z11_khz", z.v[0] / (kTwoPi * 1e3)},
          {"z12_khz", z.v[1] / (kTwoPi * 1e3)},
          {"z21_khz", z.v[2] / (kTwoPi * 1e3)},
          {"z22_khz", z.v[3] / (kTwoPi * 1e3)},
          {"zeta00_khz", zeta.v[0] / (kTwoPi * 1e3)},
          {"zeta02_khz", zeta.v[1] / (kTwoPi * 1e3)},
          {"zeta20_khz", zeta.v[2] / (kTwoPi * 1e3)},
          {"zeta22_khz", zeta.v[3] / (kTwoPi * 1e3)}};
}

void exp_two_analog_digital(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  if (p.n_sites != 2) throw ConfigError("two-analog-digital: model/n_sites must be 2");
  const json& device = ctx.config.at("device");
  const TransmonPairSpec pair = parse_pair(device);
  const StarkConfig stark = parse_stark(device, pair, ctx.report);
  const FloquetSchedule schedule = parse_schedule(ctx.config.at("schedule"));
  const CVector psi0 = parse_initial_state(ctx.config, 2);

  const FloquetSetup setup = make_floquet_setup(pair, stark, p);
  ctx.report["setup"] = {{"t_s_inv_hz", setup.t_s_inv},
                         {"remap_site1", setup.remap_site1},
                         {"bare", rates_to_json(setup.bare_z)},
                         {"driven", rates_to_json(setup.driven_z)},
                         {"rwa_ratio", rwa_ratio(pair.a, setup.drive)}};

  const std::string mode_str =
      ctx.config.at("schedule").contains("mode")
          ? ctx.config.at("schedule").at("mode").get<std::string>()
          : "effective";
  const FloquetMode mode =
      mode_str == "full" ? FloquetMode::full_pulse : FloquetMode::effective_segments;

  const FloquetSeries fl = run_floquet(setup, p, schedule, psi0, mode);
  const std::string tag = mode_str == "full" ? "floquet_full" : "floquet_eff";
  for (size_t i = 0; i < fl.time_model.size(); ++i)
    for (int site = 0; site < 2; ++site) {
      add_series(ctx.rows, ctx.name, tag + ".lz", site, fl.time_model[i], fl.time_physical[i],
                 fl.lz[i][site]);
      add_series(ctx.rows, ctx.name, tag + ".lz2", site, fl.time_model[i], fl.time_physical[i],
                 fl.lz2[i][site]);
    }

  // exact model evolution from the parity-remapped initial state
  const CVector psi_model = setup.remap_site1 ? remap_site_parity(psi0, 1, 2) : psi0;
  const ObservableSeries exact = exact_evolution(p, psi_model, fl.time_model);
  for (size_t i = 0; i < exact.times.size(); ++i)
    for (int site = 0; site < 2; ++site) {
      add_series(ctx.rows, ctx.name, "exact.lz", site, exact.times[i], fl.time_physical[i],
                 exact.lz[i][site]);
      add_series(ctx.rows, ctx.name, "exact.lz2", site, exact.times[i], fl.time_physical[i],
                 exact.lz2[i][site]);
    }

  // averaged-Lindblad comparison when coherence times are provided
  if (pair.a.t1_01 > 0.0 && pair.b.t1_01 > 0.0) {
    const LindbladSpec jumps =
        embed_pair(jump_ops_from_coherence(pair.a), jump_ops_from_coherence(pair.b));
    const CMatrix u02 = kron(spin_ops().pi02, spin_ops().pi02);
    const CMatrix leff = averaged_liouvillian(average_system_hamiltonian(setup), jumps, u02);
    LindbladOptions lopt;
    lopt.n_sites = 2;
    FloquetSeries lb_series;
    const LindbladResult lb =
        superop_evolve(leff, psi0 * psi0.adjoint(), fl.time_physical, lopt);
    lb_series.time_model = fl.time_model;
    lb_series.time_physical = fl.time_physical;
    lb_series.lz = lb.lz;
    lb_series.lz2 = lb.lz2;
    if (setup.remap_site1) remap_site_parity(lb_series, 1);
    for (size_t i = 0; i < lb_series.time_model.size(); ++i)
      for (int site = 0; site < 2; ++site) {
        add_series(ctx.rows, ctx.name, "lindblad_avg.lz", site, lb_series.time_model[i],
                   lb_series.time_physical[i], lb_series.lz[i][site]);
        add_series(ctx.rows, ctx.name, "lindblad_avg.lz2", site, lb_series.time_model[i],
                   lb_series.time_physical[i], lb_series.lz2[i][site]);
      }
    ctx.report["lindblad"] = {{"max_trace_drift", lb.max_trace_drift},
                              {"min_eigenvalue", lb.min_eigenvalue}};
  }

  const ErrorBudget budget = error_budget(setup, schedule.t_e, schedule.ramp_fraction);
  ctx.report["error_budget"] = {
      {"alpha_s2", budget.alpha},
      {"beta_s2", budget.beta},
      {"h2_cont_norm_khz", budget.h2_cont_norm / (kTwoPi * 1e3)},
      {"h3_cont_norm_khz", budget.h3_cont_norm / (kTwoPi * 1e3)},
      {"h2_disc_norm_khz", budget.h2_disc_norm / (kTwoPi * 1e3)},
      {"dominant", budget.dominant}};
}

void exp_three_transmon(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  if (p.n_sites != 3) throw ConfigError("three-transmon: model/n_sites must be 3");
  const json& device = ctx.config.at("device");

  ChainSpec chain;
  for (const auto& t : device.at("transmons")) chain.transmons.push_back(parse_transmon(t));
  for (double jm : device.at("couplings_mhz"))
    chain.couplings.push_back(kTwoPi * 1e6 * jm);
  chain.validate();
  if (chain.transmons.size() != 3) throw ConfigError("three-transmon: need 3 transmons");

  std::vector<StarkTone> tones;
  for (const auto& st : device.at("stark")) {
    StarkTone tone;
    tone.omega_s = kTwoPi * 1e9 * st.at("freq_ghz").get<double>();
    tone.amp = kTwoPi * 1e6 * st.at("amp_mhz").get<double>();
    tone.phase = num_or(st, "dphi", 0.0);
    for (int t : st.at("targets")) tone.targets.push_back(t);
    tones.push_back(tone);
  }

  const json& rx = ctx.config.at("rate_extraction");
  const double ramp = 1e-9 * num_or(rx, "ramp_ns", 80.0);
  const double hold = 1e-9 * num_or(rx, "hold_ns", 400.0);

  const ChainRates bare = driven_z_numeric(chain, {}, 0.0, hold);
  const ChainRates driven = driven_z_numeric(chain, tones, ramp, hold);
  const auto z_khz = [](double v) { return v / (kTwoPi * 1e3); };
  json zrep = json::object();
  const char* names[3] = {"0", "1", "2"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const std::string key = std::string("z") + names[i] + names[j] + names[k];
        zrep[key + "_bare_khz"] = z_khz(bare.z[9 * i + 3 * j + k]);
        zrep[key + "_driven_khz"] = z_khz(driven.z[9 * i + 3 * j + k]);
      }
  ctx.report["rates"] = zrep;
  ctx.report["max_leakage"] = driven.max_leakage;

  const double z110 = driven.z[9 * 1 + 3 * 1 + 0];
  const double z011 = driven.z[9 * 0 + 3 * 1 + 1];
  const double z_eff = 0.5 * (z110 + z011);
  const double t_s_inv = std::abs(z_eff) / p.beta;
  ctx.report["z110_khz"] = z_khz(z110);
  ctx.report["z011_khz"] = z_khz(z011);
  ctx.report["t_s_inv_hz"] = t_s_inv;

  ModelParams scaled = p;
  scaled.scale_freq = t_s_inv;
  const DriveConfig drive = map_model_to_drive(scaled);

  const FloquetSchedule schedule = parse_schedule(ctx.config.at("schedule"));
  const CVector psi0 = parse_initial_state(ctx.config, 3);
  const CMatrix hint = chain_interaction_diag(driven.z, 3);
  FloquetSeries fl = run_floquet_chain(hint, drive, t_s_inv, schedule, psi0, 3);
  const bool remap = z_eff > 0.0;
  if (remap) remap_site_parity(fl, 1);
  ctx.report["remap_site1"] = remap;

  const CVector psi_model = remap ? remap_site_parity(psi0, 1, 3) : psi0;
  const ObservableSeries exact = exact_evolution(p, psi_model, fl.time_model);
  for (size_t i = 0; i < fl.time_model.size(); ++i)
    for (int site = 0; site < 3; ++site) {
      add_series(ctx.rows, ctx.name, "floquet_eff.lz", site, fl.time_model[i],
                 fl.time_physical[i], fl.lz[i][site]);
      add_series(ctx.rows, ctx.name, "exact.lz", site, exact.times[i], fl.time_physical[i],
                 exact.lz[i][site]);
      const auto q_fl = charges_from_lz(fl.lz[i]);
      const auto q_ex = exact.charge[i];
      add_series(ctx.rows, ctx.name, "floquet_eff.q", site, fl.time_model[i],
                 fl.time_physical[i], q_fl[site]);
      add_series(ctx.rows, ctx.name, "exact.q", site, exact.times[i], fl.time_physical[i],
                 q_ex[site]);
    }
}

void exp_digital_trotter(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  const json& tr = ctx.config.at("trotter");
  TrotterPlan plan;
  plan.params = p;
  plan.dt = tr.at("dt").get<double>();
  plan.n_steps = tr.at("n_steps").get<int>();
  const CVector psi0 = parse_initial_state(ctx.config, p.n_sites);

  const Circuit circuit = build_trotter_circuit(plan);
  const std::vector<CVector> steps = simulate_steps(circuit, psi0);
  std::vector<double> times{0.0};
  for (int k = 1; k <= plan.n_steps; ++k) times.push_back(k * plan.dt);

  std::vector<std::vector<double>> lz_tr, lz2_tr;
  lz_tr.push_back(site_lz(psi0, p.n_sites));
  lz2_tr.push_back(site_lz2(psi0, p.n_sites));
  for (const auto& psi : steps) {
    lz_tr.push_back(site_lz(psi, p.n_sites));
    lz2_tr.push_back(site_lz2(psi, p.n_sites));
  }
  const double ts = p.scale_freq > 0.0 ? 1.0 / p.scale_freq : 0.0;
  for (size_t i = 0; i < times.size(); ++i)
    for (int site = 0; site < p.n_sites; ++site) {
      add_series(ctx.rows, ctx.name, "trotter.lz", site, times[i], times[i] * ts,
                 lz_tr[i][site]);
      add_series(ctx.rows, ctx.name, "trotter.lz2", site, times[i], times[i] * ts,
                 lz2_tr[i][site]);
    }

  const ObservableSeries exact = exact_evolution(p, psi0, times);
  for (size_t i = 0; i < times.size(); ++i)
    for (int site = 0; site < p.n_sites; ++site) {
      add_series(ctx.rows, ctx.name, "exact.lz", site, times[i], times[i] * ts,
                 exact.lz[i][site]);
      add_series(ctx.rows, ctx.name, "exact.lz2", site, times[i], times[i] * ts,
                 exact.lz2[i][site]);
    }
  ctx.out.write("circuit.txt", circuit_to_text(circuit));

  if (!ctx.config.contains("noise") || !ctx.config.at("noise").at("enabled").get<bool>())
    return;
  if (p.n_sites != 2) throw ConfigError("digital-trotter: noisy pipeline is two-qutrit only");

  const json& noise_cfg = ctx.config.at("noise");
  const double lambda = num_or(noise_cfg, "depolarizing_lambda", 0.9);
  const double angle = num_or(noise_cfg, "overrotation_angle", 0.0);
  const double readout_err = num_or(noise_cfg, "readout_error", 0.0);
  std::vector<NoiseChannel> parts;
  if (angle != 0.0) {
    const CMatrix gen = kron(spin_ops().lz, spin_ops().lz);
    parts.push_back(NoiseChannel::coherent_overrotation(gen, angle));
  }
  parts.push_back(NoiseChannel::depolarizing(lambda));
  const NoiseChannel noise = NoiseChannel::composite_of(parts);

  const json& mit = ctx.config.at("mitigation");
  const int n_twirls = mit.contains("n_twirls") ? mit.at("n_twirls").get<int>() : 30;
  const long shots = mit.contains("shots") ? mit.at("shots").get<long>() : 1024;

  // cycle benchmarking of the entangling cycle under the same noise
  CbOptions cb_opt;
  cb_opt.seed = derive_seed(ctx.seed, 0xCB);
  if (mit.contains("cb_shots")) cb_opt.shots = mit.at("cb_shots").get<long>();
  if (mit.contains("cb_sequences")) cb_opt.n_sequences = mit.at("cb_sequences").get<int>();
  if (mit.contains("cb_channels")) cb_opt.n_channels = mit.at("cb_channels").get<int>();
  const CbResult cb = cycle_benchmark(csum_gate(0, 1), noise, cb_opt);
  json cb_json = json::array();
  for (const auto& ch : cb.channels)
    cb_json.push_back({{"weyl", {ch.weyl[0], ch.weyl[1], ch.weyl[2], ch.weyl[3]}},
                       {"a", ch.a},
                       {"p", ch.p},
                       {"sigma_p", ch.sigma_p}});
  ctx.report["cycle_benchmark"] = {{"lambda_hat", cb.lambda_hat},
                                   {"sigma_lambda", cb.sigma_lambda},
                                   {"channels", cb_json}};

  const std::vector<ConfusionMatrix> conf(2, readout_err > 0.0
                                                 ? ConfusionMatrix::symmetric(readout_err)
                                                 : ConfusionMatrix::identity());
  const Eigen::MatrixXd conf_lift = lift_confusion(conf);
  const auto& lzv = spin_ops().lz;

  bool any_unreliable = false;
  for (int k = 1; k <= plan.n_steps; ++k) {
    TrotterPlan sub = plan;
    sub.n_steps = k;
    const Circuit c_k = build_trotter_circuit(sub);
    const auto twirled = randomized_compile(c_k, n_twirls, derive_seed(ctx.seed, 100 + k));
    const int n_cycles = static_cast<int>(c_k.cycles.size());

    std::vector<std::array<double, 2>> est_lz(n_twirls);
    for (int tw = 0; tw < n_twirls; ++tw) {
      const CMatrix rho = run_noisy_circuit(twirled[tw], psi0 * psi0.adjoint(), noise);
      std::vector<double> probs(9);
      for (int i = 0; i < 9; ++i) probs[i] = std::max(rho(i, i).real(), 0.0);
      Eigen::VectorXd pvec(9);
      for (int i = 0; i < 9; ++i) pvec(i) = probs[i];
      const Eigen::VectorXd confused = conf_lift * pvec;
      std::vector<double> meas(confused.data(), confused.data() + 9);
      const auto counts =
          sample_shots(meas, shots, derive_seed(ctx.seed, 100000 + 1000 * k + tw));
      const auto mitigated = mitigate_readout(counts, conf_lift);
      double lz_a = 0.0, lz_b = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          lz_a += mitigated.probabilities[3 * a + b] * lzv(a, a).real();
          lz_b += mitigated.probabilities[3 * a + b] * lzv(b, b).real();
        }
      est_lz[tw] = {lz_a, lz_b};
    }
    for (int site = 0; site < 2; ++site) {
      double mean = 0.0;
      for (const auto& e : est_lz) mean += e[site];
      mean /= n_twirls;
      double var = 0.0;
      for (const auto& e : est_lz) var += (e[site] - mean) * (e[site] - mean);
      const double sem = std::sqrt(var / std::max(1, n_twirls - 1) / n_twirls);
      add_series(ctx.rows, ctx.name, "device_rc.lz", site, k * plan.dt, k * plan.dt * ts,
                 mean, sem);
      const PurifiedValue pur = purify_expectation(mean, sem, cb.lambda_hat, n_cycles);
      any_unreliable |= pur.unreliable;
      add_series(ctx.rows, ctx.name, "purified.lz", site, k * plan.dt, k * plan.dt * ts,
                 pur.value, pur.sigma);
    }
  }
  ctx.report["purification_unreliable"] = any_unreliable;
}

void exp_string_breaking(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  const bool allow_large = ctx.config.contains("allow_large_memory") &&
                           ctx.config.at("allow_large_memory").get<bool>();
  if (p.n_sites > 15)
    throw CapacityError("string-breaking: n_sites capped at 15");
  if (p.n_sites > 12 && !allow_large)
    throw CapacityError("string-breaking: n_sites > 12 requires allow_large_memory "
                        "(state vector of " +
                        std::to_string(model_dim(p.n_sites) * 16 / (1 << 20)) + " MiB)");

  const json& tr = ctx.config.at("trotter");
  TrotterPlan plan;
  plan.params = p;
  plan.dt = tr.at("dt").get<double>();
  plan.n_steps = tr.at("n_steps").get<int>();
  const CVector psi0 = parse_initial_state(ctx.config, p.n_sites);

  const Circuit circuit = build_trotter_circuit(plan);
  CVector psi = psi0;
  double max_norm_drift = 0.0;
  double max_reflection_residual = 0.0;

  const auto record = [&](int step) {
    const double t = step * plan.dt;
    const auto lz = site_lz(psi, p.n_sites);
    const auto q = charges_from_lz(lz);
    for (int site = 0; site < p.n_sites; ++site) {
      add_series(ctx.rows, ctx.name, "trotter.lz", site, t, 0.0, lz[site]);
      add_series(ctx.rows, ctx.name, "trotter.q", site, t, 0.0, q[site]);
    }
    max_norm_drift = std::max(max_norm_drift, std::abs(psi.squaredNorm() - 1.0));
    for (int k = 1; k < p.n_sites; ++k)
      max_reflection_residual =
          std::max(max_reflection_residual, std::abs(q[k] + q[p.n_sites - k]));
  };

  record(0);
  size_t gate_idx = 0;
  for (int step = 1; step <= plan.n_steps; ++step) {
    const size_t end = circuit.step_marks[step - 1];
    for (; gate_idx < end; ++gate_idx) apply_gate(psi, circuit.gates[gate_idx], p.n_sites);
    record(step);
  }

  ctx.report["max_norm_drift"] = max_norm_drift;
  ctx.report["max_reflection_residual"] = max_reflection_residual;
  ctx.report["n_sites"] = p.n_sites;
}

void exp_calibrate(Ctx& ctx) {
  const json& device = ctx.config.at("device");
  const TransmonPairSpec pair = parse_pair(device);
  const json& st = device.at("stark").at(0);
  const double omega_s = kTwoPi * 1e9 * st.at("freq_ghz").get<double>();
  const double dphi = num_or(st, "dphi", 0.0);

  const InteractionRates bare_pt = bare_rates_pt(pair);
  const InteractionRates bare_num = bare_rates_numeric(pair);
  ctx.report["bare_pt"] = rates_to_json(bare_pt);
  ctx.report["bare_numeric"] = rates_to_json(bare_num);

  std::vector<double> grid;
  for (double a : st.at("calib_grid_mhz")) grid.push_back(kTwoPi * 1e6 * a);
  const StarkCalibration cal = calibrate_stark_amplitude(pair, omega_s, dphi, grid);
  ctx.report["stark_calibration"] = {
      {"omega_s_ghz", omega_s / (kTwoPi * 1e9)},
      {"dphi", dphi},
      {"amplitude_mhz", cal.amplitude / (kTwoPi * 1e6)},
      {"residual_z22_khz", cal.residual_z22 / (kTwoPi * 1e3)}};

  std::string scan = "amp_mhz,z22_khz\n";
  for (size_t i = 0; i < grid.size(); ++i)
    scan += fmt(grid[i] / (kTwoPi * 1e6)) + "," + fmt(cal.grid_z22[i] / (kTwoPi * 1e3)) + "\n";
  ctx.out.write("stark_scan.csv", scan);

  const StarkConfig stark{omega_s, cal.amplitude, cal.amplitude, dphi};
  const DrivenRates driven = driven_rates_pt(pair, stark);
  ctx.report["driven_pt"] = rates_to_json(driven.rates);
  ctx.report["stark_shifts_khz"] = {
      {"a01", driven.shift_a[0] / (kTwoPi * 1e3)},
      {"a12", driven.shift_a[1] / (kTwoPi * 1e3)},
      {"b01", driven.shift_b[0] / (kTwoPi * 1e3)},
      {"b12", driven.shift_b[1] / (kTwoPi * 1e3)}};

  // JAZZ recovery of the driven rates
  const json& jz = ctx.config.at("jazz");
  JazzOptions jopt;
  jopt.delta_art = kTwoPi * 1e6 * num_or(jz, "delta_art_mhz", 1.0);
  const int n_points = jz.contains("n_points") ? jz.at("n_points").get<int>() : 64;
  jopt.t_list = linspace(0.0, 1e-6 * num_or(jz, "t_max_us", 2.0), n_points);
  jopt.decay_tau = jz.contains("decay_tau_us") ? 1e-6 * jz.at("decay_tau_us").get<double>() : 0.0;

  const CMatrix hck = interaction_hamiltonian(driven.rates);
  const auto zeta_in = driven.rates.to(RateBasis::zeta);
  json jazz_rep = json::object();
  const char* zeta_names[4] = {"zeta00", "zeta02", "zeta20", "zeta22"};
  const int idx_pairs[4][2] = {{0, 0}, {0, 2}, {2, 0}, {2, 2}};
  for (int q = 0; q < 4; ++q) {
    const JazzResult jr = simulate_jazz(hck, idx_pairs[q][0], idx_pairs[q][1], jopt);
    jazz_rep[zeta_names[q]] = {{"input_khz", zeta_in.v[q] / (kTwoPi * 1e3)},
                               {"fitted_khz", jr.zeta / (kTwoPi * 1e3)},
                               {"fit_rms_plus", jr.fit_plus.rms_residual},
                               {"fit_rms_minus", jr.fit_minus.rms_residual}};
  }
  JazzOptions topt = jopt;
  topt.delta_art = kTwoPi * 1e6 * num_or(jz, "total_delta_art_mhz", 3.0);
  const TotalJazzResult tj = simulate_total_jazz(hck, topt);
  jazz_rep["total_z22"] = {{"input_khz", driven.rates.to(RateBasis::z).v[3] / (kTwoPi * 1e3)},
                           {"fitted_khz", tj.z22 / (kTwoPi * 1e3)}};
  ctx.report["jazz"] = jazz_rep;
}

void exp_resources(Ctx& ctx) {
  const ModelParams p = parse_model(ctx.config.at("model"));
  const json& tr = ctx.config.at("trotter");
  TrotterPlan plan;
  plan.params = p;
  plan.dt = num_or(tr, "dt", 0.1);
  plan.n_steps = tr.at("n_steps").get<int>();

  const ResourceReport r = count_resources(plan, QubitTopology::all_to_all);
  ctx.report["per_step"] = {{"qutrit_entangling", r.qutrit_entangling_per_step},
                            {"qutrit_single", r.qutrit_single_per_step},
                            {"qubit_cnot_all_to_all", r.qubit_cnot_a2a_per_step},
                            {"qubit_cnot_heavy_hex", r.qubit_cnot_heavy_hex_per_step},
                            {"qubit_single", r.qubit_single_per_step}};
  ctx.report["total"] = {{"steps", r.steps},
                         {"qutrit_entangling", r.qutrit_entangling_total},
                         {"qutrit_single", r.qutrit_single_total},
                         {"qubit_cnot_all_to_all", r.qubit_cnot_a2a_total},
                         {"qubit_cnot_heavy_hex", r.qubit_cnot_heavy_hex_total},
                         {"qubit_single", r.qubit_single_total}};

  std::string csv = "quantity,per_step,total\n";
  const auto line = [&](const char* name, long per, long tot) {
    csv += std::string(name) + "," + std::to_string(per) + "," + std::to_string(tot) + "\n";
  };
  line("qutrit_entangling", r.qutrit_entangling_per_step, r.qutrit_entangling_total);
  line("qutrit_single", r.qutrit_single_per_step, r.qutrit_single_total);
  line("qubit_cnot_all_to_all", r.qubit_cnot_a2a_per_step, r.qubit_cnot_a2a_total);
  line("qubit_cnot_heavy_hex", r.qubit_cnot_heavy_hex_per_step, r.qubit_cnot_heavy_hex_total);
  line("qubit_single", r.qubit_single_per_step, r.qubit_single_total);
  ctx.out.write("resources.csv", csv);
}

// ---------------------------------------------------------------------------
// schema

const std::set<std::string> kRootKeys = {
    "version", "experiment", "seed", "output_dir", "threads", "model", "initial_state",
    "device", "pulse", "schedule", "trotter", "noise", "mitigation", "rate_extraction",
    "jazz", "allow_large_memory"};
const std::set<std::string> kModelKeys = {"kappa_over_2pi", "chi_over_2pi", "beta_over_2pi",
                                          "n_sites", "scale_freq_hz"};
const std::set<std::string> kTransmonKeys = {"omega01_ghz", "omega12_ghz", "omega23_ghz",
                                             "t1_01_us", "t2_01_us", "t1_12_us", "t2_12_us"};
const std::set<std::string> kDeviceKeys = {"transmons", "couplings_mhz", "stark"};
const std::set<std::string> kStarkKeys = {"freq_ghz", "amp_mhz", "dphi", "targets",
                                          "calibrate", "calib_grid_mhz"};
const std::set<std::string> kPulseKeys = {"ramp_fraction", "durations_us", "duration_max_us",
                                          "n_points"};
const std::set<std::string> kScheduleKeys = {"t_e_ns", "t_g_ns", "n_cycles",
                                             "instantaneous_gates", "ramp_fraction", "mode"};
const std::set<std::string> kTrotterKeys = {"dt", "n_steps"};
const std::set<std::string> kNoiseKeys = {"enabled", "depolarizing_lambda",
                                          "overrotation_angle", "readout_error"};
const std::set<std::string> kMitigationKeys = {"n_twirls", "shots", "cb_lengths", "cb_shots",
                                               "cb_sequences", "cb_channels"};
const std::set<std::string> kRateExtractionKeys = {"ramp_ns", "hold_ns"};
const std::set<std::string> kJazzKeys = {"delta_art_mhz", "total_delta_art_mhz", "t_max_us",
                                         "n_points", "decay_tau_us"};

}  // namespace

std::vector<Diagnostic> validate_config(const json& config) {
  std::vector<Diagnostic> diags;
  if (!config.is_object()) {
    diags.push_back({"", "config must be a JSON object", true});
    return diags;
  }
  check_keys(config, "", kRootKeys, diags);
  if (need(config, "", "version", diags) && config.at("version").get<int>() != 1)
    diags.push_back({"/version", "unsupported schema version (expected 1)", true});
  std::string exp_name;
  if (need(config, "", "experiment", diags)) {
    exp_name = config.at("experiment").get<std::string>();
    bool known = false;
    for (const auto& e : experiment_registry()) known |= e.name == exp_name;
    if (!known) diags.push_back({"/experiment", "unknown experiment: " + exp_name, true});
  }
  if (config.contains("model")) {
    check_keys(config.at("model"), "/model", kModelKeys, diags);
    try {
      const ModelParams p = parse_model(config.at("model"));
      const long dim = model_dim(p.n_sites);
      if (exp_name != "string-breaking" && p.n_sites > kDenseSiteCap)
        diags.push_back({"/model/n_sites",
                         "dense operators capped at 3^8 (dim " + std::to_string(dim) +
                             " requested); only string-breaking runs matrix-free",
                         true});
      if (exp_name == "string-breaking" && p.n_sites > 12 &&
          !(config.contains("allow_large_memory") &&
            config.at("allow_large_memory").get<bool>()))
        diags.push_back({"/model/n_sites",
                         "n_sites > 12 requires allow_large_memory (capacity gate)", true});
    } catch (const Error& e) {
      diags.push_back({"/model", e.what(), true});
    }
  }
  if (config.contains("device")) {
    const json& device = config.at("device");
    check_keys(device, "/device", kDeviceKeys, diags);
    if (device.contains("transmons")) {
      int idx = 0;
      for (const auto& t : device.at("transmons")) {
        check_keys(t, "/device/transmons/" + std::to_string(idx), kTransmonKeys, diags);
        ++idx;
      }
    }
    if (device.contains("stark")) {
      int idx = 0;
      for (const auto& s : device.at("stark")) {
        check_keys(s, "/device/stark/" + std::to_string(idx), kStarkKeys, diags);
        ++idx;
      }
    }
  }
  if (config.contains("pulse")) check_keys(config.at("pulse"), "/pulse", kPulseKeys, diags);
  if (config.contains("schedule"))
    check_keys(config.at("schedule"), "/schedule", kScheduleKeys, diags);
  if (config.contains("trotter"))
    check_keys(config.at("trotter"), "/trotter", kTrotterKeys, diags);
  if (config.contains("noise")) check_keys(config.at("noise"), "/noise", kNoiseKeys, diags);
  if (config.contains("mitigation"))
    check_keys(config.at("mitigation"), "/mitigation", kMitigationKeys, diags);
  if (config.contains("rate_extraction"))
    check_keys(config.at("rate_extraction"), "/rate_extraction", kRateExtractionKeys, diags);
  if (config.contains("jazz")) check_keys(config.at("jazz"), "/jazz", kJazzKeys, diags);

  // physics sanity warnings (non-fatal)
  if (config.contains("model") && config.contains("device") &&
      config.at("device").contains("transmons") && config.at("model").is_object()) {
    try {
      const ModelParams p = parse_model(config.at("model"));
      if (p.scale_freq > 0.0) {
        const TransmonSpec t = parse_transmon(config.at("device").at("transmons").at(0));
        const DriveConfig d = map_model_to_drive(p);
        if (rwa_ratio(t, d) > kRwaWarnThreshold)
          diags.push_back({"/model/scale_freq_hz",
                           "RWA ratio Omega0/|anharmonicity| above 0.05", false});
      }
    } catch (...) {
      // parse errors already reported above
    }
  }
  return diags;
}

std::string result_table_csv(const std::vector<ResultRow>& rows) {
  std::string out = "experiment,series,site,time_model,time_physical_s,value,stderr\n";
  for (const auto& r : rows) {
    out += r.experiment + "," + r.series + "," + std::to_string(r.site) + "," +
           fmt(r.time_model) + "," + fmt(r.time_physical_s) + "," + fmt(r.value) + ",";
    if (r.stderr_value) out += fmt(*r.stderr_value);
    out += "\n";
  }
  return out;
}

RunOutcome run_experiment(const json& config, const RunOverrides& overrides) {
  auto diags = validate_config(config);
  for (const auto& d : diags)
    if (d.fatal) throw ConfigError("config error at " + d.path + ": " + d.message);

  Ctx ctx;
  ctx.config = config;
  ctx.name = config.at("experiment").get<std::string>();
  ctx.seed = overrides.seed.value_or(
      config.contains("seed") ? config.at("seed").get<uint64_t>() : 1);
  ctx.threads = overrides.threads.value_or(
      config.contains("threads") ? config.at("threads").get<int>() : 0);
  ctx.out.dir = overrides.output_dir.value_or(
      config.contains("output_dir") ? config.at("output_dir").get<std::string>()
                                    : std::string("out/") + ctx.name);

  if (ctx.name == "single-analog") exp_single_analog(ctx);
  else if (ctx.name == "two-analog-digital") exp_two_analog_digital(ctx);
  else if (ctx.name == "three-transmon") exp_three_transmon(ctx);
  else if (ctx.name == "digital-trotter") exp_digital_trotter(ctx);
  else if (ctx.name == "string-breaking") exp_string_breaking(ctx);
  else if (ctx.name == "calibrate") exp_calibrate(ctx);
  else if (ctx.name == "resources") exp_resources(ctx);
  else throw ConfigError("unknown experiment: " + ctx.name);

  for (const auto& r : ctx.rows)
    if (!std::isfinite(r.value))
      throw NumericalError("non-finite value in result table (series " + r.series + ")");

  ctx.out.write("data.csv", result_table_csv(ctx.rows));
  ctx.report["experiment"] = ctx.name;
  ctx.report["seed"] = ctx.seed;
  ctx.report["schema_version"] = 1;
  ctx.out.write("report.json", ctx.report.dump(2) + "\n");

  json resolved = config;
  resolved["seed"] = ctx.seed;
  resolved["output_dir"] = ctx.out.dir;
  ctx.out.write("resolved_config.json", resolved.dump(2) + "\n");

  return {ctx.out.dir, ctx.out.written};
}

}  // namespace ahmsim
