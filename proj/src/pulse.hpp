#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace ahmsim {

// Transmon levels and coherence data. Frequencies are angular (rad/s);
// charge matrix elements mu_i default to sqrt(i) with mu_1 = 1.
struct TransmonSpec {
  double omega01 = 0.0;
  double omega12 = 0.0;
  double omega23 = 0.0;
  double lambda = 1.4142135623730951;  // mu_2 / mu_1 for two-tone drives
  double mu1 = 1.0, mu2 = 1.4142135623730951, mu3 = 1.7320508075688772;
  // coherence times (seconds); 0 means not set
  double t1_01 = 0.0, t2_01 = 0.0, t1_12 = 0.0, t2_12 = 0.0;

  double anharmonicity() const { return omega12 - omega01; }
  void validate() const;
  // bare ladder energy of level n (rad/s), E_0 = 0
  double level_energy(int n) const;
  double mu(int i) const;  // i in {1,2,3}
};

// Flat-top envelope with cosine-shaped rise and fall. a = 1/(1-r) normalizes
// the area to T.
struct Envelope {
  double duration = 0.0;  // T, seconds
  double ramp_fraction = 0.1;

  Envelope() = default;
  Envelope(double t, double r);
  double amplitude() const { return 1.0 / (1.0 - ramp_fraction); }
  double value(double t) const;     // A_T(t), throws outside [0, T]
  double integral(double t) const;  // B(t) = int_0^t A, analytic
};

// Two-tone drive realizing Delta0 Lz^2 - (Omega0/sqrt(2)) Lx in the chirped
// drive frame; phases are fixed at -pi/2 on both tones.
struct DriveConfig {
  double omega0 = 0.0;  // rad/s
  double delta0 = 0.0;  // rad/s
  double phi1 = -0.5 * kPi;
  double phi2 = -0.5 * kPi;
  double ramp_fraction = 0.1;
};

// Phase accumulators delta-phi_i carried across pulses (one per transmon).
struct PhaseRegister {
  double dphi1 = 0.0;
  double dphi2 = 0.0;
};

double rwa_ratio(const TransmonSpec& spec, const DriveConfig& d);
constexpr double kRwaWarnThreshold = 0.05;

// delta-phi(t) = Delta0 * B(t) for the chirped detuning Delta(t) = Delta0 A(t).
double phase_ramp(const Envelope& e, double delta0, double t);

// H(t) = A_T(t) (Delta0 Lz^2 - (Omega0/sqrt(2)) Lx), drive frame, offset removed.
CMatrix rwa_single_hamiltonian(const DriveConfig& d, const Envelope& e, double t);

// Omega0 = chi t_s^{-1}, Delta0 = (kappa+beta)/2 t_s^{-1}.
DriveConfig map_model_to_drive(const ModelParams& p);

// Instantaneous 0<->2 transposition with configurable unit-modulus phases.
CMatrix pi02_instantaneous(cx phase_02 = 1.0, cx phase_11 = 1.0, cx phase_20 = 1.0);

// Resonant two-tone pulse of duration t_g; returns the pulse unitary and the
// transposition fidelity |tr(P02^+ U)| / 3.
struct MultitonePi02 {
  CMatrix unitary;
  double fidelity = 0.0;
  double t_g = 0.0;
};
MultitonePi02 pi02_multitone(double t_g, double amplitude = 0.0, double ramp_fraction = 0.1);

struct AnalogSeries {
  std::vector<double> time_physical;  // pulse durations, seconds
  std::vector<double> time_model;
  std::vector<double> lz;
  std::vector<double> lz2;
};

// Single-site analog protocol: one stretched pulse per duration, drive-frame
// integration, observables at the end of each pulse.
AnalogSeries run_single_analog(const TransmonSpec& spec, const ModelParams& p,
                               const CVector& psi0, const std::vector<double>& durations,
                               double ramp_fraction = 0.1);

// Sampled (t, Omega1, Omega2, dphi1, dphi2) table for one pulse.
std::string schedule_csv(const DriveConfig& d, const Envelope& e, int n_samples);

}  // namespace ahmsim
