#include "floquet.hpp"

#include <algorithm>
#include <cmath>

namespace ahmsim {

namespace {
constexpr double kLzVal[3] = {1.0, 0.0, -1.0};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

}  // namespace

double spectral_norm(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  if (is_hermitian(m, 1e-10 * std::max(1.0, max_abs(m)))) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

FloquetSetup make_floquet_setup(const TransmonPairSpec& pair, const StarkConfig& stark,
                                const ModelParams& p) {
  if (p.beta <= 0.0)
    throw InvalidArgumentError("make_floquet_setup: beta must be positive (sets the scale)");
  FloquetSetup s;
  s.bare_z = bare_rates_pt(pair).to(RateBasis::z);
  s.driven_z = driven_rates_pt(pair, stark).rates.to(RateBasis::z);
  const double z11 = s.driven_z.v[0];
  if (z11 == 0.0) throw CalibrationError("make_floquet_setup: vanishing z11~");
  s.t_s_inv = std::abs(z11) / p.beta;
  s.remap_site1 = z11 > 0.0;  // device sign opposes the -beta LzLz target
  ModelParams scaled = p;
  scaled.scale_freq = s.t_s_inv;
  s.drive = map_model_to_drive(scaled);
  return s;
}

CMatrix interaction_diag9(const InteractionRates& rates) {
  const auto z = rates.to(RateBasis::z);
  CMatrix h = CMatrix::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const double la = kLzVal[a], lb = kLzVal[b];
      h(3 * a + b, 3 * a + b) = z.v[0] * la * lb + z.v[1] * la * lb * lb +
                                z.v[2] * la * la * lb + z.v[3] * la * la * lb * lb;
    }
  return h;
}

namespace {

CMatrix single_site_drive_sum(const DriveConfig& d, int n_sites) {
  const auto& s = spin_ops();
  const CMatrix h1 = d.delta0 * s.lz2 - (d.omega0 / std::sqrt(2.0)) * s.lx;
  CMatrix h = CMatrix::Zero(model_dim(n_sites), model_dim(n_sites));
  for (int k = 0; k < n_sites; ++k) h += embed_local(h1, k, n_sites);
  return h;
}

}  // namespace

CMatrix assemble_system_hamiltonian(const FloquetSetup& s, const Envelope& env, double t) {
  const double a = env.value(t);
  const CMatrix bare = interaction_diag9(s.bare_z);
  const CMatrix driven = interaction_diag9(s.driven_z);
  return a * single_site_drive_sum(s.drive, 2) + bare + a * (driven - bare);
}

CMatrix average_system_hamiltonian(const FloquetSetup& s) {
  return single_site_drive_sum(s.drive, 2) + interaction_diag9(s.driven_z);
}

CMatrix floquet_cycle_unitary(const CMatrix& h_bar, double t_e) {
  const CMatrix u02 = kron(spin_ops().pi02, spin_ops().pi02);
  const CMatrix u1 = expm_minus_i_ht(h_bar, t_e);
  return u02 * u1 * u02 * u1;  // u02 = u02^+ for the plain transposition
}

namespace {

void record_floquet_point(FloquetSeries& out, double t_model, double t_phys,
                          const CVector& psi, int n_sites) {
  out.time_model.push_back(t_model);
  out.time_physical.push_back(t_phys);
  out.lz.push_back(site_lz(psi, n_sites));
  out.lz2.push_back(site_lz2(psi, n_sites));
}

}  // namespace

FloquetSeries run_floquet(const FloquetSetup& s, const ModelParams& p,
                          const FloquetSchedule& schedule, const CVector& psi0,
                          FloquetMode mode) {
  if (psi0.size() != 9) throw InvalidArgumentError("run_floquet: two-qutrit state expected");
  if (schedule.t_e <= 0.0) throw InvalidArgumentError("run_floquet: t_e must be positive");
  (void)p;

  CMatrix gate3;
  if (schedule.instantaneous_gates) {
    gate3 = pi02_instantaneous();
  } else {
    gate3 = pi02_multitone(schedule.t_g).unitary;
  }
  const CMatrix gate = kron(gate3, gate3);

  FloquetSeries out;
  const double cycle_phys =
      2.0 * schedule.t_e + (schedule.instantaneous_gates ? 0.0 : 2.0 * schedule.t_g);
  const double cycle_model = 2.0 * schedule.t_e * s.t_s_inv;

  CVector psi = psi0;
  record_floquet_point(out, 0.0, 0.0, psi, 2);

  if (mode == FloquetMode::effective_segments) {
    const CMatrix u1 = expm_minus_i_ht(average_system_hamiltonian(s), schedule.t_e);
    for (int c = 1; c <= schedule.n_cycles; ++c) {
      psi = gate * (u1 * (gate * (u1 * psi)));
      record_floquet_point(out, c * cycle_model, c * cycle_phys, psi, 2);
    }
  } else {
    const Envelope env(schedule.t_e, schedule.ramp_fraction);
    const auto h = [&](double t) { return assemble_system_hamiltonian(s, env, t); };
    const TimeGrid grid{0.0, schedule.t_e, 1e-11, 1e-11, schedule.t_e};
    for (int c = 1; c <= schedule.n_cycles; ++c) {
      for (int half = 0; half < 2; ++half) {
        psi = evolve_td(h, grid, psi).back();
        psi = gate * psi;
      }
      record_floquet_point(out, c * cycle_model, c * cycle_phys, psi, 2);
    }
  }
  if (s.remap_site1) remap_site_parity(out, 1);
  return out;
}

void remap_site_parity(FloquetSeries& series, int site) {
  for (auto& row : series.lz) {
    if (site < 0 || site >= static_cast<int>(row.size()))
      throw InvalidArgumentError("remap_site_parity: site out of range");
    row[site] = -row[site];
  }
}

CVector remap_site_parity(const CVector& psi, int site, int n_sites) {
  if (site < 0 || site >= n_sites)
    throw InvalidArgumentError("remap_site_parity: site out of range");
  CVector out = psi;
  const long dim = psi.size();
  long stride = 1;
  for (int k = n_sites - 1 - site; k > 0; --k) stride *= 3;
  for (long i = 0; i < dim; ++i) {
    const int d = static_cast<int>((i / stride) % 3);
    if (d == 0) std::swap(out[i], out[i + 2 * stride]);
  }
  return out;
}

CMatrix chain_interaction_diag(const std::vector<double>& z, int n_sites) {
  const long n_coeff = static_cast<long>(std::pow(3, n_sites));
  if (static_cast<long>(z.size()) != n_coeff)
    throw InvalidArgumentError("chain_interaction_diag: wrong coefficient count");
  const long dim = model_dim(n_sites);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (long code = 0; code < n_coeff; ++code) {
    // exponents of Lz per site
    std::vector<int> expo(n_sites);
    long rem = code;
    int nonzero = 0;
    for (int k = n_sites - 1; k >= 0; --k) {
      expo[k] = static_cast<int>(rem % 3);
      rem /= 3;
      if (expo[k] != 0) ++nonzero;
    }
    if (nonzero < 2) continue;  // constant and local terms removed by frame choice
    for (long idx = 0; idx < dim; ++idx) {
      long r = idx;
      double val = 1.0;
      for (int k = n_sites - 1; k >= 0; --k) {
        const int d = static_cast<int>(r % 3);
        r /= 3;
        val *= std::pow(kLzVal[d], expo[k]);
      }
      h(idx, idx) += z[code] * val;
    }
  }
  return h;
}

FloquetSeries run_floquet_chain(const CMatrix& interaction_diag, const DriveConfig& drive,
                                double t_s_inv, const FloquetSchedule& schedule,
                                const CVector& psi0, int n_sites) {
  const long dim = model_dim(n_sites);
  if (psi0.size() != dim) throw InvalidArgumentError("run_floquet_chain: dimension mismatch");
  const CMatrix h_bar = single_site_drive_sum(drive, n_sites) + interaction_diag;
  std::vector<CMatrix> gates(n_sites, pi02_instantaneous());
  const CMatrix gate = kron_all(gates);
  const CMatrix u1 = expm_minus_i_ht(h_bar, schedule.t_e);
  const double cycle_model = 2.0 * schedule.t_e * t_s_inv;

  FloquetSeries out;
  CVector psi = psi0;
  record_floquet_point(out, 0.0, 0.0, psi, n_sites);
  for (int c = 1; c <= schedule.n_cycles; ++c) {
    psi = gate * (u1 * (gate * (u1 * psi)));
    record_floquet_point(out, c * cycle_model, c * 2.0 * schedule.t_e, psi, n_sites);
  }
  return out;
}

std::vector<CMatrix> magnus_continuous(const std::function<CMatrix(double)>& h, double T,
                                       int orders, const std::vector<double>& breakpoints,
                                       double rel_tol) {
  if (orders < 1 || orders > 3)
    throw InvalidArgumentError("magnus_continuous: orders must be 1..3");
  if (T <= 0.0) throw InvalidArgumentError("magnus_continuous: T must be positive");

  std::vector<double> edges{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < T) edges.push_back(b);
  edges.push_back(T);
  std::sort(edges.begin(), edges.end());

  const auto run = [&](int gl) {
    std::vector<double> xg, wg;
    gauss_legendre(gl, xg, wg);
    // nodes of the composite rule on [0, t] (segments clipped at t)
    const auto quad_nodes = [&](double t, std::vector<double>& xs, std::vector<double>& ws) {
      xs.clear();
      ws.clear();
      for (size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = std::min(edges[e], t);
        const double b = std::min(edges[e + 1], t);
        if (b <= a) continue;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < gl; ++i) {
          xs.push_back(mid + half * xg[i]);
          ws.push_back(half * wg[i]);
        }
      }
    };

    const auto cumulative = [&](double t) {
      std::vector<double> xs, ws;
      quad_nodes(t, xs, ws);
      CMatrix acc;
      for (size_t i = 0; i < xs.size(); ++i) {
        const CMatrix hi = h(xs[i]);
        if (acc.rows() == 0) acc = CMatrix::Zero(hi.rows(), hi.cols());
        acc += ws[i] * hi;
      }
      return acc;
    };

    std::vector<CMatrix> terms;
    terms.push_back(cumulative(T) / T);
    if (orders >= 2) {
      std::vector<double> xs, ws;
      quad_nodes(T, xs, ws);
      CMatrix acc = CMatrix::Zero(terms[0].rows(), terms[0].cols());
      for (size_t i = 0; i < xs.size(); ++i)
        acc += ws[i] * commutator(h(xs[i]), cumulative(xs[i]));
      terms.push_back(acc * cx(0.0, -0.5 / T));  // 1/(2i T)
    }
    if (orders >= 3) {
      std::vector<double> x1, w1;
      quad_nodes(T, x1, w1);
      CMatrix acc = CMatrix::Zero(terms[0].rows(), terms[0].cols());
      for (size_t i = 0; i < x1.size(); ++i) {
        const CMatrix h1 = h(x1[i]);
        std::vector<double> x2, w2;
        quad_nodes(x1[i], x2, w2);
        CMatrix inner = CMatrix::Zero(h1.rows(), h1.cols());
        for (size_t q = 0; q < x2.size(); ++q) {
          const CMatrix h2 = h(x2[q]);
          const CMatrix k2 = cumulative(x2[q]);
          inner += w2[q] * (commutator(h1, commutator(h2, k2)) +
                            commutator(commutator(h1, h2), k2));
        }
        acc += w1[i] * inner;
      }
      terms.push_back(acc * (-1.0 / (6.0 * T)));
    }
    return terms;
  };

  const std::vector<CMatrix> coarse = run(16);
  const std::vector<CMatrix> fine = run(24);
  double scale = 0.0;
  for (const auto& m : fine) scale = std::max(scale, max_abs(m));
  for (size_t k = 0; k < fine.size(); ++k) {
    if (max_abs(fine[k] - coarse[k]) > rel_tol * std::max(scale, 1e-300) + 1e-13 * scale)
      throw NumericalError("magnus_continuous: quadrature did not converge");
  }
  // enforce Hermiticity of each term
  std::vector<CMatrix> out = fine;
  for (auto& m : out) m = 0.5 * (m + m.adjoint());
  return out;
}

std::pair<CMatrix, CMatrix> magnus_discrete(const std::vector<CMatrix>& h,
                                            const std::vector<double>& durations) {
  if (h.empty() || h.size() != durations.size())
    throw InvalidArgumentError("magnus_discrete: size mismatch or empty");
  const double T = durations.front();
  for (double d : durations)
    if (std::abs(d - T) > 1e-12 * std::max(std::abs(T), 1.0))
      throw InvalidArgumentError("magnus_discrete: segments must have equal durations");
  const long n = static_cast<long>(h.size());
  CMatrix h1 = CMatrix::Zero(h[0].rows(), h[0].cols());
  for (const auto& m : h) h1 += m;
  h1 /= static_cast<double>(n);
  CMatrix h2 = CMatrix::Zero(h[0].rows(), h[0].cols());
  for (long i = 1; i < n; ++i)
    for (long j = 0; j < i; ++j) h2 += commutator(h[i], h[j]);
  h2 *= cx(0.0, -0.5) * (T / static_cast<double>(n));  // 1/(2 i N) * T
  return {h1, 0.5 * (h2 + h2.adjoint())};
}

double alpha_coeff(double r, double t) {
  if (r < 0.0 || r >= 0.5) throw InvalidArgumentError("alpha_coeff: r in [0, 0.5)");
  const double pi2 = kPi * kPi;
  const double num = (33.0 - 6.0 * pi2) * r * r * r + 3.0 * r * r * (pi2 - 8.0) +
                     6.0 * pi2 * r - 4.0 * pi2;
  return t * t * num / (72.0 * pi2 * (1.0 - r) * (1.0 - r));
}

double beta_coeff(double r, double t) {
  if (r < 0.0 || r >= 0.5) throw InvalidArgumentError("beta_coeff: r in [0, 0.5)");
  const double pi2 = kPi * kPi;
  return r * t * t / 12.0 * (1.0 + (12.0 / pi2 - 2.0) * r);
}

ErrorBudget error_budget(const FloquetSetup& s, double t_e, double r) {
  ErrorBudget out;
  out.alpha = alpha_coeff(r, t_e);
  out.beta = beta_coeff(r, t_e);

  const CMatrix h0 = interaction_diag9(s.bare_z);
  InteractionRates delta_z = s.driven_z.to(RateBasis::z);
  const auto bare_z = s.bare_z.to(RateBasis::z);
  for (int i = 0; i < 4; ++i) delta_z.v[i] -= bare_z.v[i];
  const CMatrix m1 = single_site_drive_sum(s.drive, 2) + interaction_diag9(delta_z);

  out.m2 = commutator(m1, h0);
  out.m31 = commutator(h0, out.m2);
  out.m32 = commutator(m1, out.m2);
  out.h3_cont = out.alpha * out.m32 + out.beta * out.m31;
  out.h3_cont_norm = spectral_norm(out.h3_cont);

  // continuous second order of the shaped pulse (vanishes for the symmetric
  // envelope; evaluated by quadrature as a check)
  const Envelope env(t_e, r);
  const auto h_of_t = [&](double t) { return assemble_system_hamiltonian(s, env, t); };
  const auto terms =
      magnus_continuous(h_of_t, t_e, 2, {r * t_e, (1.0 - r) * t_e});
  out.h2_cont_norm = spectral_norm(terms[1]);

  // dynamical-decoupling second order for the [H, U02 H U02] alternation
  const CMatrix h_bar = average_system_hamiltonian(s);
  const CMatrix u02 = kron(spin_ops().pi02, spin_ops().pi02);
  const CMatrix h_tilde = u02 * h_bar * u02;
  const auto disc = magnus_discrete({h_bar, h_tilde}, {t_e, t_e});
  out.h2_disc = disc.second;
  out.h2_disc_norm = spectral_norm(out.h2_disc);

  out.dominant = out.h2_disc_norm >= out.h3_cont_norm ? "H2_disc" : "H3_cont";
  if (out.h2_cont_norm > std::max(out.h2_disc_norm, out.h3_cont_norm))
    out.dominant = "H2_cont";
  return out;
}

std::array<double, 4> diagonal_z_components(const CMatrix& h9) {
  if (h9.rows() != 9 || h9.cols() != 9)
    throw InvalidArgumentError("diagonal_z_components: 9x9 expected");
  // Solve diag(h) = sum_{ij} z_ij lz(a)^i lz(b)^j for the 9 coefficients.
  Eigen::MatrixXd design(9, 9);
  Eigen::VectorXd rhs(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int row = 3 * a + b;
      rhs(row) = h9(row, row).real();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          design(row, 3 * i + j) = std::pow(kLzVal[a], i) * std::pow(kLzVal[b], j);
    }
  const Eigen::VectorXd z = design.colPivHouseholderQr().solve(rhs);
  return {z(4), z(5), z(7), z(8)};  // z11, z12, z21, z22
}

}  // namespace ahmsim
