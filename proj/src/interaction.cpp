#include "interaction.hpp"

#include <cmath>
#include <string>

#include "integrate.hpp"

namespace ahmsim {

namespace {
constexpr double kLzVal[3] = {1.0, 0.0, -1.0};
}

void TransmonPairSpec::validate() const {
  a.validate();
  b.validate();
  if (a.omega23 <= 0.0 || b.omega23 <= 0.0)
    throw InvalidArgumentError("TransmonPairSpec: four levels required (omega23 unset)");
}

void ChainSpec::validate() const {
  if (transmons.size() < 2) throw InvalidArgumentError("ChainSpec: need at least 2 transmons");
  if (couplings.size() != transmons.size() - 1)
    throw InvalidArgumentError("ChainSpec: couplings must have n-1 entries");
  for (const auto& t : transmons) {
    t.validate();
    if (t.omega23 <= 0.0)
      throw InvalidArgumentError("ChainSpec: four levels required (omega23 unset)");
  }
}

InteractionRates InteractionRates::to(RateBasis target) const {
  if (basis == target) return *this;
  // route through zeta
  std::array<double, 4> zeta{};
  switch (basis) {
    case RateBasis::zeta:
      zeta = v;
      break;
    case RateBasis::alpha:
      zeta = {v[0], v[0] - v[1], v[0] - v[2], v[0] - v[1] - v[2] + v[3]};
      break;
    case RateBasis::z:
      zeta = {v[0] + v[1] + v[2] + v[3], -v[0] + v[1] - v[2] + v[3],
              -v[0] - v[1] + v[2] + v[3], v[0] - v[1] - v[2] + v[3]};
      break;
  }
  std::array<double, 4> out{};
  switch (target) {
    case RateBasis::zeta:
      out = zeta;
      break;
    case RateBasis::alpha:
      out = {zeta[0], zeta[0] - zeta[1], zeta[0] - zeta[2],
             zeta[3] + zeta[0] - zeta[1] - zeta[2]};
      break;
    case RateBasis::z:
      out = {0.25 * (zeta[0] - zeta[1] - zeta[2] + zeta[3]),
             0.25 * (zeta[0] + zeta[1] - zeta[2] - zeta[3]),
             0.25 * (zeta[0] - zeta[1] + zeta[2] - zeta[3]),
             0.25 * (zeta[0] + zeta[1] + zeta[2] + zeta[3])};
      break;
  }
  return InteractionRates(target, out);
}

CMatrix interaction_hamiltonian(const InteractionRates& r) {
  const auto zeta = r.to(RateBasis::zeta);
  CMatrix h = CMatrix::Zero(9, 9);
  h(0, 0) = zeta.v[0];  // |00>
  h(2, 2) = zeta.v[1];  // |02>
  h(6, 6) = zeta.v[2];  // |20>
  h(8, 8) = zeta.v[3];  // |22>
  return h;
}

namespace {

double guarded_inverse(double num, double denom, const std::string& label) {
  if (std::abs(denom) < kDegeneracyThreshold)
    throw DegeneracyError("near-degenerate denominator: " + label);
  return num / denom;
}

}  // namespace

InteractionRates bare_rates_pt(const TransmonPairSpec& pair) {
  pair.validate();
  const auto& A = pair.a;
  const auto& B = pair.b;
  const double j2 = pair.j * pair.j;
  const double w1a = A.omega01, w2a = A.omega12, w3a = A.omega23;
  const double w1b = B.omega01, w2b = B.omega12, w3b = B.omega23;
  const double ma1 = A.mu(1) * A.mu(1), ma2 = A.mu(2) * A.mu(2), ma3 = A.mu(3) * A.mu(3);
  const double mb1 = B.mu(1) * B.mu(1), mb2 = B.mu(2) * B.mu(2), mb3 = B.mu(3) * B.mu(3);

  const double a11 = j2 * (guarded_inverse(ma1 * mb2, w1a - w2b, "w1A-w2B") -
                           guarded_inverse(ma2 * mb1, w2a - w1b, "w2A-w1B"));
  const double a12 =
      -j2 * (guarded_inverse(ma2 * mb2, w2a - w2b, "w2A-w2B") +
             ma1 * (guarded_inverse(mb1, w1a - w1b, "w1A-w1B") -
                    guarded_inverse(mb2, w1a - w2b, "w1A-w2B") -
                    guarded_inverse(mb3, w1a - w3b, "w1A-w3B")));
  const double a21 =
      j2 * (guarded_inverse(ma2 * mb2, w2a - w2b, "w2A-w2B") +
            mb1 * (guarded_inverse(ma1, w1a - w1b, "w1A-w1B") -
                   guarded_inverse(ma2, w2a - w1b, "w2A-w1B") -
                   guarded_inverse(ma3, w3a - w1b, "w3A-w1B")));
  const double a22 =
      -j2 * (ma2 * (guarded_inverse(mb1, w2a - w1b, "w2A-w1B") -
                    guarded_inverse(mb3, w2a - w3b, "w2A-w3B")) -
             mb2 * (guarded_inverse(ma1, w1a - w2b, "w1A-w2B") -
                    guarded_inverse(ma3, w3a - w2b, "w3A-w2B")));
  return InteractionRates(RateBasis::alpha, {a11, a12, a21, a22});
}

namespace {

// Four-level single-transmon raising operator with charge elements mu_i.
CMatrix raising_op4(const TransmonSpec& t) {
  CMatrix a = CMatrix::Zero(4, 4);
  for (int i = 1; i <= 3; ++i) a(i, i - 1) = t.mu(i);
  return a;
}

CMatrix diag_energies4(const TransmonSpec& t, double frame_freq) {
  CMatrix d = CMatrix::Zero(4, 4);
  for (int n = 1; n < 4; ++n) d(n, n) = t.level_energy(n) - n * frame_freq;
  return d;
}

}  // namespace

InteractionRates bare_rates_numeric(const TransmonPairSpec& pair) {
  pair.validate();
  const CMatrix ha = diag_energies4(pair.a, 0.0);
  const CMatrix hb = diag_energies4(pair.b, 0.0);
  const CMatrix aa = raising_op4(pair.a);
  const CMatrix ab = raising_op4(pair.b);
  const CMatrix id4 = CMatrix::Identity(4, 4);
  CMatrix h = kron(ha, id4) + kron(id4, hb);
  h += pair.j * (kron(aa, ab.adjoint()) + kron(aa.adjoint(), ab));

  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  // Maximum-overlap assignment of eigenstates to bare product labels.
  double eps[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const long bare = 4 * i + j;
      double best = 0.0;
      long best_k = 0;
      for (long k = 0; k < 16; ++k) {
        const double ov = std::norm(es.eigenvectors()(bare, k));
        if (ov > best) {
          best = ov;
          best_k = k;
        }
      }
      if (best < 0.5)
        throw LabelingError("bare_rates_numeric: ambiguous eigenstate assignment for |" +
                            std::to_string(i) + std::to_string(j) + ">");
      eps[i][j] = es.eigenvalues()(best_k);
    }

  const auto alpha = [&](int i, int j) {
    return (eps[i][j] - eps[i][0]) - (eps[0][j] - eps[0][0]);
  };
  return InteractionRates(RateBasis::alpha, {alpha(1, 1), alpha(1, 2), alpha(2, 1), alpha(2, 2)});
}

DrivenRates driven_rates_pt(const TransmonPairSpec& pair, const StarkConfig& stark) {
  pair.validate();
  const auto& A = pair.a;
  const auto& B = pair.b;
  const double ma1 = A.mu(1) * A.mu(1), ma2 = A.mu(2) * A.mu(2), ma3 = A.mu(3) * A.mu(3);
  const double mb1 = B.mu(1) * B.mu(1), mb2 = B.mu(2) * B.mu(2), mb3 = B.mu(3) * B.mu(3);
  const double d1a = A.omega01 - stark.omega_s, d2a = A.omega12 - stark.omega_s,
               d3a = A.omega23 - stark.omega_s;
  const double d1b = B.omega01 - stark.omega_s, d2b = B.omega12 - stark.omega_s,
               d3b = B.omega23 - stark.omega_s;
  for (auto [d, name] : {std::pair{d1a, "D1A"}, {d2a, "D2A"}, {d3a, "D3A"},
                         {d1b, "D1B"}, {d2b, "D2B"}, {d3b, "D3B"}})
    if (std::abs(d) < kDegeneracyThreshold)
      throw DegeneracyError(std::string("driven_rates_pt: Stark tone degenerate with ") + name);

  const double sa = ma1 / d1a + ma2 / d2a - ma3 / d3a;
  const double sb = mb1 / d1b + mb2 / d2b - mb3 / d3b;
  const double drive = pair.j * stark.amp_a * stark.amp_b * std::cos(stark.dphi);

  const double brace11 = (ma1 / d1a - 0.5 * ma2 / d2a) * (2.0 * mb1 / d1b - mb2 / d2b);
  const double brace12 = (ma1 / d1a - 0.5 * ma2 / d2a) * sb;
  const double brace21 = (mb1 / d1b - 0.5 * mb2 / d2b) * sa;
  const double brace22 = 0.5 * (ma1 / d1a + ma2 / d2a - ma3 / d3a) * sb;

  const InteractionRates bare = bare_rates_pt(pair);
  DrivenRates out;
  out.rates = InteractionRates(
      RateBasis::alpha,
      {drive * brace11 + bare.v[0], drive * brace12 + bare.v[1],
       drive * brace21 + bare.v[2], drive * brace22 + bare.v[3]});

  // AC-Stark shifts of the 01 and 12 transitions, mu_0 = 0.
  const auto shifts = [&](const TransmonSpec& t, double amp) -> std::array<double, 2> {
    const double m1 = t.mu(1) * t.mu(1), m2 = t.mu(2) * t.mu(2), m3 = t.mu(3) * t.mu(3);
    const double dd1 = t.omega01 - stark.omega_s, dd2 = t.omega12 - stark.omega_s,
                 dd3 = t.omega23 - stark.omega_s;
    const double w2 = amp * amp;
    const double s01 = 0.5 * m1 * w2 / dd1 - 0.25 * m2 * w2 / dd2;
    const double s12 = -0.25 * m1 * w2 / dd1 + 0.5 * m2 * w2 / dd2 - 0.25 * m3 * w2 / dd3;
    return {s01, s12};
  };
  out.shift_a = shifts(pair.a, stark.amp_a);
  out.shift_b = shifts(pair.b, stark.amp_b);
  return out;
}

namespace {

long pow_long(long base, int n) {
  long v = 1;
  for (int i = 0; i < n; ++i) v *= base;
  return v;
}

CMatrix embed4(const CMatrix& op, int site, int n) {
  std::vector<CMatrix> f;
  const CMatrix id = CMatrix::Identity(4, 4);
  for (int k = 0; k < n; ++k) f.push_back(k == site ? op : id);
  return kron_all(f);
}

}  // namespace

ChainRates driven_z_numeric(const ChainSpec& chain, const std::vector<StarkTone>& tones,
                            double ramp_duration, double hold_duration, int n_samples) {
  chain.validate();
  const int n = static_cast<int>(chain.transmons.size());
  const long dim = pow_long(4, n);
  const double frame = tones.empty() ? 0.0 : tones.front().omega_s;

  CMatrix h_static = CMatrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k)
    h_static += embed4(diag_energies4(chain.transmons[k], frame), k, n);
  for (int k = 0; k + 1 < n; ++k) {
    const CMatrix ak = embed4(raising_op4(chain.transmons[k]), k, n);
    const CMatrix ak1 = embed4(raising_op4(chain.transmons[k + 1]), k + 1, n);
    h_static += chain.couplings[k] * (ak * ak1.adjoint() + ak.adjoint() * ak1);
  }

  struct ToneOp {
    CMatrix d;      // sum of raising ops over targets
    double detune;  // omega_s - frame
    double phase;
    double amp;
  };
  std::vector<ToneOp> ops;
  for (const auto& tone : tones) {
    ToneOp op;
    op.d = CMatrix::Zero(dim, dim);
    for (int k : tone.targets) {
      if (k < 0 || k >= n) throw InvalidArgumentError("driven_z_numeric: tone target out of range");
      op.d += embed4(raising_op4(chain.transmons[k]), k, n);
    }
    op.detune = tone.omega_s - frame;
    op.phase = tone.phase;
    op.amp = tone.amp;
    ops.push_back(std::move(op));
  }
  const bool static_hold = [&] {
    for (const auto& op : ops)
      if (op.detune != 0.0) return false;
    return true;
  }();

  const auto h_of_t = [&](double t, double ramp_scale) {
    CMatrix h = h_static;
    for (const auto& op : ops) {
      const double amp = op.amp * ramp_scale;
      const cx c = cx(0.0, 0.5 * amp) * std::exp(cx(0.0, -(op.detune * t + op.phase)));
      h += c * op.d + std::conj(c) * op.d.adjoint();
    }
    return h;
  };
  const auto ramp_scale = [&](double t) {
    if (ramp_duration <= 0.0) return 1.0;
    if (t >= ramp_duration) return 1.0;
    const double s = std::sin(0.5 * kPi * t / ramp_duration);
    return s;  // amplitude ramps as sqrt of a sin^2 envelope
  };

  if (hold_duration <= 0.0) throw InvalidArgumentError("driven_z_numeric: hold_duration must be > 0");

  // Sample spacing short enough to unwrap the largest frame energy.
  double max_eps = 1.0;
  for (int k = 0; k < n; ++k)
    for (int lvl = 1; lvl < 4; ++lvl)
      max_eps = std::max(max_eps,
                         std::abs(chain.transmons[k].level_energy(lvl) - lvl * frame));
  for (const auto& op : ops) max_eps = std::max(max_eps, std::abs(op.detune));
  const int min_samples =
      static_cast<int>(std::ceil(hold_duration * max_eps / (0.25 * kPi))) + 2;
  const int m = std::max(n_samples, min_samples);

  const long n_states = pow_long(3, n);
  Eigen::MatrixXd design(n_states, n_states);
  Eigen::VectorXd energies(n_states);

  // Static-hold fast path: one eigendecomposition, exact propagation.
  Eigen::SelfAdjointEigenSolver<CMatrix> hold_es;
  if (static_hold) hold_es.compute(h_of_t(0.0, 1.0));

  ChainRates out;
  out.hold_duration = hold_duration;

  OdeOptions opt;
  opt.atol = opt.rtol = 1e-11;

  for (long s = 0; s < n_states; ++s) {
    // computational digits of this basis state
    std::vector<int> digits(n);
    long rem = s;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    long idx4 = 0;
    for (int k = 0; k < n; ++k) idx4 = idx4 * 4 + digits[k];

    CVector psi = CVector::Zero(dim);
    psi[idx4] = 1.0;
    if (ramp_duration > 0.0) {
      const OdeRhs rhs = [&](double t, const CVector& y, CVector& dydt) {
        dydt.noalias() = cx(0.0, -1.0) * (h_of_t(t, ramp_scale(t)) * y);
      };
      integrate_rk45(rhs, 0.0, ramp_duration, psi, opt);
    }

    std::vector<double> ts(m), phases(m);
    double min_pop = 1.0, max_pop = 0.0;
    if (static_hold) {
      const CVector c0 = hold_es.eigenvectors().adjoint() * psi;
      for (int q = 0; q < m; ++q) {
        const double dt = hold_duration * q / (m - 1);
        CVector c = c0;
        for (long ii = 0; ii < dim; ++ii)
          c[ii] *= std::exp(cx(0.0, -hold_es.eigenvalues()(ii) * dt));
        const CVector ps = hold_es.eigenvectors() * c;
        const cx amp = ps[idx4];
        ts[q] = dt;
        phases[q] = std::arg(amp);
        min_pop = std::min(min_pop, std::norm(amp));
        max_pop = std::max(max_pop, std::norm(amp));
      }
    } else {
      const OdeRhs rhs = [&](double t, const CVector& y, CVector& dydt) {
        dydt.noalias() = cx(0.0, -1.0) * (h_of_t(t, 1.0) * y);
      };
      double t = ramp_duration;
      for (int q = 0; q < m; ++q) {
        const double target = ramp_duration + hold_duration * q / (m - 1);
        integrate_rk45(rhs, t, target, psi, opt);
        t = target;
        const cx amp = psi[idx4];
        ts[q] = target - ramp_duration;
        phases[q] = std::arg(amp);
        min_pop = std::min(min_pop, std::norm(amp));
        max_pop = std::max(max_pop, std::norm(amp));
      }
    }
    out.max_leakage = std::max(out.max_leakage, 1.0 - min_pop);
    // Adiabatic dressing keeps the bare population steady; a transfer of
    // probability p into other dressed states beats with amplitude
    // ~ 2 sqrt(p), so a wobble of 0.2 marks the 1% population-loss line.
    if (max_pop - min_pop > 0.2 || min_pop < 0.5)
      throw AdiabaticityError("driven_z_numeric: population loss above 1% for state " +
                              std::to_string(s));
    energies[s] = -fit_phase_slope(ts, phases);

    // design row: product over sites of lz(d)^i
    for (long col = 0; col < n_states; ++col) {
      long crem = col;
      double val = 1.0;
      for (int k = n - 1; k >= 0; --k) {
        const int expo = static_cast<int>(crem % 3);
        crem /= 3;
        val *= std::pow(kLzVal[digits[k]], expo);
      }
      design(s, col) = val;
    }
  }

  const Eigen::VectorXd z = design.colPivHouseholderQr().solve(energies);
  out.z.assign(z.data(), z.data() + z.size());
  return out;
}

InteractionRates driven_rates_numeric(const TransmonPairSpec& pair, const StarkConfig& stark,
                                      double ramp_duration, double hold_duration) {
  pair.validate();
  if (hold_duration <= 0.0) hold_duration = 100e-9;
  ChainSpec chain;
  chain.transmons = {pair.a, pair.b};
  chain.couplings = {pair.j};
  std::vector<StarkTone> tones;
  if (stark.amp_a != 0.0 || stark.amp_b != 0.0) {
    // one tone per transmon so the amplitudes and phases can differ
    tones.push_back({stark.omega_s, stark.amp_a, stark.dphi, {0}});
    tones.push_back({stark.omega_s, stark.amp_b, 0.0, {1}});
  }
  const ChainRates cr = driven_z_numeric(chain, tones, ramp_duration, hold_duration);
  // exponents (i, j) -> index 3 i + j
  return InteractionRates(RateBasis::z, {cr.z[4], cr.z[5], cr.z[7], cr.z[8]});
}

namespace {

// pi/2 or pi rotation in the {p,q} subspace about the axis at angle `axis`
// in the equatorial plane.
CMatrix subspace_pulse(int p, int q, double angle, double axis) {
  CMatrix u = CMatrix::Identity(3, 3);
  const double c = std::cos(0.5 * angle);
  const cx ms = cx(0.0, -std::sin(0.5 * angle));
  u(p, p) = c;
  u(q, q) = c;
  u(p, q) = ms * std::exp(cx(0.0, -axis));
  u(q, p) = ms * std::exp(cx(0.0, axis));
  return u;
}

void apply_site(CVector& psi9, const CMatrix& u3, int site) {
  CVector out = CVector::Zero(9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int idx = 3 * a + b;
      for (int c = 0; c < 3; ++c)
        out[idx] += site == 0 ? u3(a, c) * psi9[3 * c + b] : u3(b, c) * psi9[3 * a + c];
    }
  psi9 = out;
}

void evolve_diag(CVector& psi9, const CMatrix& h_diag, double t) {
  for (int i = 0; i < 9; ++i) psi9[i] *= std::exp(cx(0.0, -h_diag(i, i).real() * t));
}

double prob_b1(const CVector& psi9) {
  double p = 0.0;
  for (int a = 0; a < 3; ++a) p += std::norm(psi9[3 * a + 1]);
  return p;
}

double jazz_signal(const CMatrix& h_diag, int i, int j, double T, double theta) {
  CVector psi = CVector::Zero(9);
  psi[0] = 1.0;  // |00>
  const int bj = j == 0 ? 0 : 2;  // B subspace partner of |1>
  if (i == 2) apply_site(psi, subspace_pulse(0, 1, kPi, 0.0), 0);
  if (bj == 0) {
    apply_site(psi, subspace_pulse(0, 1, 0.5 * kPi, 0.0), 1);
  } else {
    apply_site(psi, subspace_pulse(0, 1, kPi, 0.0), 1);
    apply_site(psi, subspace_pulse(1, 2, 0.5 * kPi, 0.0), 1);
  }
  evolve_diag(psi, h_diag, T);
  // echo pulses
  apply_site(psi, i == 0 ? subspace_pulse(0, 1, kPi, 0.0) : subspace_pulse(1, 2, kPi, 0.0), 0);
  apply_site(psi, bj == 0 ? subspace_pulse(0, 1, kPi, 0.0) : subspace_pulse(1, 2, kPi, 0.0), 1);
  evolve_diag(psi, h_diag, T);
  apply_site(psi, bj == 0 ? subspace_pulse(0, 1, 0.5 * kPi, theta)
                          : subspace_pulse(1, 2, 0.5 * kPi, theta), 1);
  return prob_b1(psi);
}

double apply_decay(double p, double total_time, double tau) {
  if (tau <= 0.0) return p;
  return 0.5 + (p - 0.5) * std::exp(-total_time / tau);
}

}  // namespace

JazzResult simulate_jazz(const CMatrix& h_diag, int i, int j, const JazzOptions& opt) {
  if ((i != 0 && i != 2) || (j != 0 && j != 2))
    throw InvalidArgumentError("simulate_jazz: target indices must be 0 or 2");
  if (opt.t_list.size() < 8) throw InvalidArgumentError("simulate_jazz: need >= 8 durations");
  JazzResult out;
  // The detected Ramsey phase references the upper subspace state; for j = 0
  // the |1> state is the upper one, which mirrors the detection axis.
  const double axis_sign = j == 0 ? -1.0 : 1.0;
  for (int sign : {+1, -1}) {
    std::vector<double> sig(opt.t_list.size());
    for (size_t m = 0; m < opt.t_list.size(); ++m) {
      const double T = opt.t_list[m];
      const double theta = axis_sign * sign * opt.delta_art * T;
      sig[m] = apply_decay(jazz_signal(h_diag, i, j, T, theta), 2.0 * T, opt.decay_tau);
    }
    const CosineFit fit = fit_decaying_cosine(opt.t_list, sig);
    if (sign > 0) {
      out.omega_plus = fit.omega;
      out.fit_plus = fit;
    } else {
      out.omega_minus = fit.omega;
      out.fit_minus = fit;
    }
  }
  out.zeta = i == 0 ? 0.5 * (out.omega_minus - out.omega_plus)
                    : 0.5 * (out.omega_plus - out.omega_minus);
  return out;
}

namespace {

double total_jazz_signal(const CMatrix& h_diag, double T, double theta) {
  CVector psi = CVector::Zero(9);
  psi[0] = 1.0;
  const auto pi01 = subspace_pulse(0, 1, kPi, 0.0);
  const auto pi12 = subspace_pulse(1, 2, kPi, 0.0);
  const auto pi02 = subspace_pulse(0, 2, kPi, 0.0);

  apply_site(psi, subspace_pulse(0, 1, 0.5 * kPi, 0.0), 1);  // prep B
  evolve_diag(psi, h_diag, T);                               // p1: A=0, B {0,1}
  apply_site(psi, pi02, 1);
  evolve_diag(psi, h_diag, T);                               // p2: A=0, B {2,1}
  apply_site(psi, pi01, 0);
  apply_site(psi, pi12, 1);
  evolve_diag(psi, h_diag, T);                               // p3: A=1, B {1,2}
  evolve_diag(psi, h_diag, T);                               // p4
  apply_site(psi, pi02, 1);
  evolve_diag(psi, h_diag, T);                               // p5: A=1, B {1,0}
  evolve_diag(psi, h_diag, T);                               // p6
  apply_site(psi, pi12, 0);
  apply_site(psi, pi01, 1);
  evolve_diag(psi, h_diag, T);                               // p7: A=2, B {0,1}
  apply_site(psi, pi02, 1);
  evolve_diag(psi, h_diag, T);                               // p8: A=2, B {2,1}
  apply_site(psi, subspace_pulse(1, 2, 0.5 * kPi, theta), 1);
  return prob_b1(psi);
}

}  // namespace

TotalJazzResult simulate_total_jazz(const CMatrix& h_diag, const JazzOptions& opt) {
  if (opt.t_list.size() < 8)
    throw InvalidArgumentError("simulate_total_jazz: need >= 8 durations");
  std::vector<double> sig(opt.t_list.size());
  for (size_t m = 0; m < opt.t_list.size(); ++m) {
    const double T = opt.t_list[m];
    sig[m] = apply_decay(total_jazz_signal(h_diag, T, opt.delta_art * T), 8.0 * T,
                         opt.decay_tau);
  }
  TotalJazzResult out;
  out.fit = fit_decaying_cosine(opt.t_list, sig);
  out.omega = out.fit.omega;
  out.z22 = 0.25 * (out.omega - opt.delta_art);
  return out;
}

StarkCalibration calibrate_stark_amplitude(const TransmonPairSpec& pair, double omega_s,
                                           double dphi, const std::vector<double>& amp_grid) {
  if (amp_grid.size() < 3)
    throw InvalidArgumentError("calibrate_stark_amplitude: need >= 3 grid points");
  StarkCalibration out;
  out.grid_z22.reserve(amp_grid.size());
  for (double amp : amp_grid) {
    StarkConfig s{omega_s, amp, amp, dphi};
    const auto driven = driven_rates_pt(pair, s);
    out.grid_z22.push_back(driven.rates.to(RateBasis::z).v[3]);
  }
  out.fit = fit_quadratic_root(amp_grid, out.grid_z22);
  out.amplitude = out.fit.root;
  StarkConfig cal{omega_s, out.amplitude, out.amplitude, dphi};
  out.residual_z22 = driven_rates_pt(pair, cal).rates.to(RateBasis::z).v[3];
  return out;
}

}  // namespace ahmsim
