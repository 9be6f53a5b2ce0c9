#include "pulse.hpp"

#include <cmath>
#include <sstream>

namespace ahmsim {

void TransmonSpec::validate() const {
  if (omega01 <= 0.0 || omega12 <= 0.0)
    throw InvalidArgumentError("TransmonSpec: transition frequencies must be positive");
  if (anharmonicity() == 0.0)
    throw InvalidArgumentError("TransmonSpec: zero anharmonicity");
  if (mu1 != 1.0) throw InvalidArgumentError("TransmonSpec: mu_1 must be 1 (normalization)");
}

double TransmonSpec::level_energy(int n) const {
  switch (n) {
    case 0: return 0.0;
    case 1: return omega01;
    case 2: return omega01 + omega12;
    case 3: return omega01 + omega12 + omega23;
    default: throw InvalidArgumentError("TransmonSpec: level out of range");
  }
}

double TransmonSpec::mu(int i) const {
  switch (i) {
    case 1: return mu1;
    case 2: return mu2;
    case 3: return mu3;
    default: throw InvalidArgumentError("TransmonSpec: mu index out of range");
  }
}

Envelope::Envelope(double t, double r) : duration(t), ramp_fraction(r) {
  if (t <= 0.0) throw InvalidArgumentError("Envelope: duration must be positive");
  if (r < 0.0 || r >= 0.5) throw InvalidArgumentError("Envelope: ramp fraction in [0, 0.5)");
}

double Envelope::value(double t) const {
  const double T = duration;
  if (t < 0.0 || t > T) throw InvalidArgumentError("Envelope: t outside [0, T]");
  const double r = ramp_fraction;
  const double a = amplitude();
  if (r == 0.0) return a;
  const double rt = r * T;
  if (t < rt) {
    const double s = std::sin(0.5 * kPi * t / rt);
    return a * s * s;
  }
  if (t < (1.0 - r) * T) return a;
  const double s = std::sin(0.5 * kPi * (T - t) / rt);
  return a * s * s;
}

double Envelope::integral(double t) const {
  const double T = duration;
  if (t < 0.0 || t > T) throw InvalidArgumentError("Envelope: t outside [0, T]");
  const double r = ramp_fraction;
  const double a = amplitude();
  if (r == 0.0) return a * t;
  const double rt = r * T;
  // int_0^x sin^2(pi s / (2 rt)) ds = x/2 - (rt / (2 pi)) sin(pi x / rt)
  const auto ramp_area = [&](double x) {
    return 0.5 * x - (rt / (2.0 * kPi)) * std::sin(kPi * x / rt);
  };
  if (t < rt) return a * ramp_area(t);
  const double full_ramp = 0.5 * rt;
  if (t < (1.0 - r) * T) return a * (full_ramp + (t - rt));
  return a * (full_ramp + (1.0 - 2.0 * r) * T + full_ramp - ramp_area(T - t));
}

double rwa_ratio(const TransmonSpec& spec, const DriveConfig& d) {
  return std::abs(d.omega0) / std::abs(spec.anharmonicity());
}

double phase_ramp(const Envelope& e, double delta0, double t) {
  return delta0 * e.integral(t);
}

CMatrix rwa_single_hamiltonian(const DriveConfig& d, const Envelope& e, double t) {
  const auto& s = spin_ops();
  const double a = e.value(t);
  return a * (d.delta0 * s.lz2 - (d.omega0 / std::sqrt(2.0)) * s.lx);
}

DriveConfig map_model_to_drive(const ModelParams& p) {
  if (p.scale_freq <= 0.0)
    throw InvalidArgumentError("map_model_to_drive: scale_freq must be set");
  DriveConfig d;
  d.omega0 = p.chi * p.scale_freq;
  d.delta0 = 0.5 * (p.kappa + p.beta) * p.scale_freq;
  return d;
}

CMatrix pi02_instantaneous(cx phase_02, cx phase_11, cx phase_20) {
  for (cx ph : {phase_02, phase_11, phase_20})
    if (std::abs(std::abs(ph) - 1.0) > 1e-12)
      throw InvalidArgumentError("pi02_instantaneous: phases must be unit modulus");
  CMatrix u = CMatrix::Zero(3, 3);
  u(2, 0) = phase_02;  // |0> -> |2>
  u(1, 1) = phase_11;
  u(0, 2) = phase_20;  // |2> -> |0>
  return u;
}

MultitonePi02 pi02_multitone(double t_g, double amplitude, double ramp_fraction) {
  if (t_g <= 0.0) throw InvalidArgumentError("pi02_multitone: gate time must be positive");
  // Resonant two-tone drive: H(t) = -(Omega(t)/sqrt(2)) Lx. A pulse area of
  // pi sqrt(2) realizes exp(i pi Lx), which transposes |0> and |2>.
  if (amplitude == 0.0) amplitude = std::sqrt(2.0) * kPi / t_g;
  const Envelope env(t_g, ramp_fraction);
  const auto h = [&](double t) -> CMatrix {
    return -(amplitude * env.value(t) / std::sqrt(2.0)) * spin_ops().lx;
  };
  MultitonePi02 out;
  out.t_g = t_g;
  TimeGrid grid{0.0, t_g, 1e-12, 1e-12, t_g};
  CMatrix u(3, 3);
  for (int col = 0; col < 3; ++col) {
    CVector e = CVector::Zero(3);
    e[col] = 1.0;
    u.col(col) = evolve_td(h, grid, e).back();
  }
  out.unitary = u;
  out.fidelity = std::abs((pi02_instantaneous().adjoint() * u).trace()) / 3.0;
  if (out.fidelity < 0.99)
    throw CalibrationError("pi02_multitone: transposition fidelity below 0.99");
  return out;
}

AnalogSeries run_single_analog(const TransmonSpec& spec, const ModelParams& p,
                               const CVector& psi0, const std::vector<double>& durations,
                               double ramp_fraction) {
  spec.validate();
  DriveConfig d = map_model_to_drive(p);
  d.ramp_fraction = ramp_fraction;
  const auto& ops = spin_ops();

  AnalogSeries out;
  for (double T : durations) {
    if (T < 0.0) throw InvalidArgumentError("run_single_analog: negative duration");
    CVector psi = psi0;
    if (T > 0.0) {
      const Envelope env(T, ramp_fraction);
      const auto h = [&](double t) -> CMatrix { return rwa_single_hamiltonian(d, env, t); };
      TimeGrid grid{0.0, T, 1e-11, 1e-11, T};
      psi = evolve_td(h, grid, psi0).back();
    }
    out.time_physical.push_back(T);
    out.time_model.push_back(T * p.scale_freq);
    out.lz.push_back(expect(ops.lz, psi));
    out.lz2.push_back(expect(ops.lz2, psi));
  }
  return out;
}

std::string schedule_csv(const DriveConfig& d, const Envelope& e, int n_samples) {
  if (n_samples < 2) throw InvalidArgumentError("schedule_csv: need at least 2 samples");
  std::ostringstream os;
  os << "t_s,omega1_rad_s,omega2_rad_s,dphi1_rad,dphi2_rad\n";
  char buf[160];
  for (int i = 0; i < n_samples; ++i) {
    const double t = e.duration * i / (n_samples - 1);
    const double a = e.value(t);
    const double omega1 = d.omega0 * a;
    const double omega2 = d.omega0 * a / std::sqrt(2.0);  // lambda = sqrt(2)
    const double dphi1 = phase_ramp(e, d.delta0, t);
    const double dphi2 = phase_ramp(e, -d.delta0, t);
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", t, omega1, omega2,
                  dphi1, dphi2);
    os << buf;
  }
  return os.str();
}

}  // namespace ahmsim
