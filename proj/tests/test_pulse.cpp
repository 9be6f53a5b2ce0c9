#include "doctest.h"

#include "oracles.hpp"
#include "pulse.hpp"

using namespace ahmsim;

namespace {

// adaptive Simpson quadrature oracle
double simpson(const std::function<double(double)>& f, double a, double b, int depth,
               double fa, double fb, double fm, double tol) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth > 24 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, depth + 1, fa, fm, flm, tol / 2.0) +
         simpson(f, m, b, depth + 1, fm, fb, frm, tol / 2.0);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  return simpson(f, a, b, 0, f(a), f(b), f(m), tol);
}

ModelParams fig2_params() {
  ModelParams p;
  p.kappa = kTwoPi;
  p.chi = kTwoPi;
  p.beta = 0.0;
  p.n_sites = 1;
  p.scale_freq = 1e6;
  return p;
}

}  // namespace

TEST_CASE("envelope values, symmetry and analytic area") {
  const double T = 3.7e-6;
  SUBCASE("flat-top value and edges") {
    const Envelope e(T, 0.1);
    CHECK(e.value(0.5 * T) == doctest::Approx(1.0 / 0.9));
    CHECK(e.value(0.0) == doctest::Approx(0.0));
    CHECK(e.value(T) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(e.value(-0.1 * T), InvalidArgumentError);
    CHECK_THROWS_AS(e.value(1.1 * T), InvalidArgumentError);
  }
  SUBCASE("time-reversal symmetry") {
    const Envelope e(T, 0.23);
    for (double f : {0.05, 0.2, 0.4, 0.45})
      CHECK(e.value(f * T) == doctest::Approx(e.value(T - f * T)).epsilon(1e-12));
  }
  SUBCASE("area equals T by quadrature for r in {0, 0.1, 0.4}") {
    for (double r : {0.0, 0.1, 0.4}) {
      const Envelope e(T, r);
      const double area =
          integrate([&](double t) { return e.value(t); }, 0.0, T, 1e-13 * T);
      CHECK(std::abs(area - T) < 1e-10 * T);
      // analytic cumulative against quadrature at interior points
      for (double f : {0.07, 0.33, 0.81}) {
        const double b =
            integrate([&](double t) { return e.value(t); }, 0.0, f * T, 1e-13 * T);
        CHECK(std::abs(e.integral(f * T) - b) < 1e-10 * T);
      }
    }
  }
}

TEST_CASE("phase ramp") {
  const double T = 2e-6;
  const double delta0 = kTwoPi * 0.5e6;
  for (double r : {0.0, 0.1, 0.3}) {
    const Envelope e(T, r);
    CHECK(phase_ramp(e, delta0, T) == doctest::Approx(delta0 * T).epsilon(1e-12));
    CHECK(phase_ramp(e, delta0, 0.0) == 0.0);
  }
  const Envelope rect(T, 0.0);
  CHECK(phase_ramp(rect, delta0, 0.4 * T) == doctest::Approx(delta0 * 0.4 * T));
}

TEST_CASE("drive-frame Hamiltonian and model mapping") {
  const ModelParams p = fig2_params();
  const DriveConfig d = map_model_to_drive(p);
  CHECK(d.omega0 / kTwoPi == doctest::Approx(1e6));
  CHECK(d.delta0 / kTwoPi == doctest::Approx(0.5e6));

  ModelParams nochi = p;
  nochi.chi = 0.0;
  CHECK(map_model_to_drive(nochi).omega0 == 0.0);

  ModelParams unscaled = p;
  unscaled.scale_freq = 0.0;
  CHECK_THROWS_AS(map_model_to_drive(unscaled), InvalidArgumentError);

  // flat top with delta0 = 0 gives -a (omega0/sqrt2) Lx
  DriveConfig d0 = d;
  d0.delta0 = 0.0;
  const Envelope env(1e-6, 0.1);
  const CMatrix h = rwa_single_hamiltonian(d0, env, 0.5e-6);
  CHECK(max_abs(h + (1.0 / 0.9) * (d.omega0 / std::sqrt(2.0)) * spin_ops().lx) < 1e-9);

  // average over the pulse equals delta0 Lz^2 - (omega0/sqrt2) Lx
  const auto avg_entry = [&](int i, int j) {
    return integrate(
               [&](double t) { return rwa_single_hamiltonian(d, env, t)(i, j).real(); }, 0.0,
               env.duration, 1e-12) /
           env.duration;
  };
  const CMatrix target = d.delta0 * spin_ops().lz2 - (d.omega0 / std::sqrt(2.0)) * spin_ops().lx;
  CHECK(avg_entry(0, 0) == doctest::Approx(target(0, 0).real()).epsilon(1e-8));
  CHECK(avg_entry(0, 1) == doctest::Approx(target(0, 1).real()).epsilon(1e-8));
}

TEST_CASE("pi02 unitaries") {
  const CMatrix u = pi02_instantaneous();
  CHECK(std::abs(u(2, 0) - cx(1, 0)) < 1e-15);
  CHECK(std::abs(u(1, 1) - cx(1, 0)) < 1e-15);
  CHECK(max_abs(u.adjoint() * spin_ops().lz * u + spin_ops().lz) == 0.0);

  // U02 commutes with the two-site average Hamiltonian
  const double delta0 = kTwoPi * 1e5, omega0 = kTwoPi * 1e5;
  const auto& s = spin_ops();
  const CMatrix h1 = delta0 * s.lz2 - omega0 / std::sqrt(2.0) * s.lx;
  const CMatrix hbar = kron(h1, CMatrix::Identity(3, 3)) + kron(CMatrix::Identity(3, 3), h1);
  const CMatrix u02 = kron(u, u);
  CHECK(max_abs(u02 * hbar - hbar * u02) < 1e-12 * max_abs(hbar));

  const MultitonePi02 mt = pi02_multitone(60e-9);
  CHECK(mt.fidelity > 0.999);
  CHECK(is_unitary(mt.unitary, 1e-9));
  // multitone squared is the identity (full 2 pi rotation)
  CHECK(max_abs(mt.unitary * mt.unitary - CMatrix::Identity(3, 3)) < 1e-8);
  // far-off amplitude fails calibration
  CHECK_THROWS_AS(pi02_multitone(60e-9, 0.5 * std::sqrt(2.0) * kPi / 60e-9),
                  CalibrationError);
}

TEST_CASE("run_single_analog matches the exact single-site evolution") {
  const ModelParams p = fig2_params();
  const CVector psi0 = basis_state("2");
  std::vector<double> durations;
  for (int i = 0; i <= 8; ++i) durations.push_back(i * 0.25e-6);
  TransmonSpec spec;
  spec.omega01 = kTwoPi * 4.8e9;
  spec.omega12 = kTwoPi * 4.56e9;
  spec.omega23 = kTwoPi * 4.3e9;

  const AnalogSeries series = run_single_analog(spec, p, psi0, durations);
  CHECK(series.lz[0] == doctest::Approx(-1.0));
  CHECK(series.lz2[0] == doctest::Approx(1.0));

  std::vector<double> model_times;
  for (double T : durations) model_times.push_back(T * p.scale_freq);
  const auto exact = exact_evolution(p, psi0, model_times);
  for (size_t i = 0; i < durations.size(); ++i) {
    CHECK(std::abs(series.lz[i] - exact.lz[i][0]) < 1e-3);
    CHECK(std::abs(series.lz2[i] - exact.lz2[i][0]) < 1e-3);
  }

  // zero drives: constant series
  ModelParams off = p;
  off.kappa = off.chi = off.beta = 0.0;
  const AnalogSeries flat = run_single_analog(spec, off, psi0, durations);
  for (double v : flat.lz) CHECK(v == doctest::Approx(-1.0).epsilon(1e-9));
}

namespace {

// Lab-frame integration oracle with explicit tones and chirped phases.
CVector lab_frame_final(const TransmonSpec& spec, const DriveConfig& d, const Envelope& env,
                        const CVector& psi0, double phase_offset1, double phase_offset2) {
  const double lam = spec.lambda;
  CMatrix coupling = CMatrix::Zero(3, 3);
  coupling(1, 0) = cx(0, 1);
  coupling(2, 1) = cx(0, 1) * lam;
  coupling += coupling.adjoint().eval();
  CMatrix h0 = CMatrix::Zero(3, 3);
  h0(1, 1) = spec.omega01;
  h0(2, 2) = spec.omega01 + spec.omega12;

  // equal drive phases phi_i = -pi/2 realize the -(chi/sqrt2) Lx mapping
  const double phi = -0.5 * kPi;
  const auto h = [&](double t) -> CMatrix {
    const double a = env.value(t);
    const double b = env.integral(t);
    const double omega1 = d.omega0 * a;
    const double omega2 = d.omega0 * a / lam;
    const double dphi1 = d.delta0 * b + phase_offset1;
    const double dphi2 = -d.delta0 * b + phase_offset2;
    const double v = omega1 * std::cos(spec.omega01 * t + dphi1 + phi) +
                     omega2 * std::cos(spec.omega12 * t + dphi2 + phi);
    return h0 + v * coupling;
  };
  TimeGrid grid{0.0, env.duration, 1e-11, 1e-11, env.duration};
  return evolve_td(h, grid, psi0).back();
}

CMatrix drive_frame_transform(const TransmonSpec& spec, const DriveConfig& d,
                              const Envelope& env, double t) {
  const double b = env.integral(t);
  const double th1 = spec.omega01 * t + d.delta0 * b;
  const double th2 = (spec.omega01 + spec.omega12) * t + d.delta0 * b - d.delta0 * b;
  CMatrix u = CMatrix::Zero(3, 3);
  u(0, 0) = 1.0;
  u(1, 1) = std::exp(cx(0.0, -th1));
  u(2, 2) = std::exp(cx(0.0, -th2));
  return u;
}

}  // namespace

TEST_CASE("drive frame reproduces the lab-frame integration within the RWA bound") {
  TransmonSpec spec;
  spec.omega01 = kTwoPi * 4.8e9;
  spec.omega12 = kTwoPi * 4.56e9;  // anharmonicity -240 MHz
  spec.omega23 = kTwoPi * 4.3e9;

  DriveConfig d;
  d.omega0 = kTwoPi * 1e6;
  d.delta0 = kTwoPi * 0.5e6;
  const double ratio = rwa_ratio(spec, d);
  CHECK(ratio < 5e-3);

  const double T = 0.5e-6;
  const Envelope env(T, 0.1);
  const CVector psi0 = basis_state("2");

  const CVector lab = lab_frame_final(spec, d, env, psi0, 0.0, 0.0);
  const CVector lab_df = drive_frame_transform(spec, d, env, T).adjoint() * lab;

  const auto h_df = [&](double t) { return rwa_single_hamiltonian(d, env, t); };
  TimeGrid grid{0.0, T, 1e-12, 1e-12, T};
  const CVector df = evolve_td(h_df, grid, psi0).back();

  // populations agree in any frame (diagonal transform)
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(std::norm(lab[i]) - std::norm(df[i])) < 5.0 * ratio);
  // states agree up to the global phase of the removed energy offset
  cx phase = 0.0;
  int big = 0;
  for (int i = 0; i < 3; ++i)
    if (std::abs(df[i]) > std::abs(df[big])) big = i;
  phase = lab_df[big] / df[big];
  CHECK(std::abs(std::abs(phase) - 1.0) < 5.0 * ratio);
  CHECK((lab_df - phase * df).norm() < 10.0 * ratio);
}

TEST_CASE("phase register continuity across split pulses") {
  TransmonSpec spec;
  spec.omega01 = kTwoPi * 4.8e9;
  spec.omega12 = kTwoPi * 4.56e9;
  spec.omega23 = kTwoPi * 4.3e9;
  DriveConfig d;
  d.omega0 = kTwoPi * 1e6;
  d.delta0 = kTwoPi * 0.5e6;

  const double T = 0.4e-6;
  const CVector psi0 = basis_state("1");
  // rectangular envelope so that one T-pulse equals two T/2-pulses
  const Envelope full(T, 0.0);
  const CVector one = lab_frame_final(spec, d, full, psi0, 0.0, 0.0);

  const Envelope half(0.5 * T, 0.0);
  CVector mid = lab_frame_final(spec, d, half, psi0, 0.0, 0.0);
  // carry the accumulated phases into the second pulse; the lab-frame clock
  // also advances, folded into constant offsets
  const double dphi1 = d.delta0 * half.integral(0.5 * T) + spec.omega01 * 0.5 * T;
  const double dphi2 = -d.delta0 * half.integral(0.5 * T) + spec.omega12 * 0.5 * T;
  const CVector two = lab_frame_final(spec, d, half, mid, dphi1, dphi2);

  // with the carried phases the split evolution reproduces the unsplit one
  CHECK((two - one).norm() < 1e-9);
}
