#pragma once

#include <array>
#include <vector>

#include "fitting.hpp"
#include "linalg.hpp"
#include "pulse.hpp"

namespace ahmsim {

struct TransmonPairSpec {
  TransmonSpec a, b;
  double j = 0.0;  // capacitive coupling, rad/s
  void validate() const;
};

struct StarkConfig {
  double omega_s = 0.0;  // rad/s
  double amp_a = 0.0;    // Omega_S^0 on transmon A, rad/s
  double amp_b = 0.0;
  double dphi = 0.0;     // phase difference phi_A - phi_B
};

// Diagonal two-body interaction in three interchangeable bases:
//   alpha: {a11, a12, a21, a22}   (|00>-referenced level shifts)
//   zeta:  {z00, z02, z20, z22}   (|11>-referenced; diagonal entries of H'_ck)
//   z:     {z11, z12, z21, z22}   (coefficients of Lz^i (x) Lz^j)
enum class RateBasis { alpha, zeta, z };

struct InteractionRates {
  RateBasis basis = RateBasis::alpha;
  std::array<double, 4> v{};  // rad/s

  InteractionRates() = default;
  InteractionRates(RateBasis b, std::array<double, 4> vals) : basis(b), v(vals) {}
  InteractionRates to(RateBasis target) const;
};

// H'_ck as a diagonal 9x9 matrix (interaction part only).
CMatrix interaction_hamiltonian(const InteractionRates& r);

constexpr double kDegeneracyThreshold = kTwoPi * 1e6;  // rad/s

// Second-order perturbation theory in J (four-level transmons).
InteractionRates bare_rates_pt(const TransmonPairSpec& pair);

// Exact diagonalization oracle with maximum-overlap eigenstate labeling.
InteractionRates bare_rates_numeric(const TransmonPairSpec& pair);

struct DrivenRates {
  InteractionRates rates;            // alpha basis
  std::array<double, 2> shift_a{};   // AC-Stark shifts of the 01, 12 transitions
  std::array<double, 2> shift_b{};
};

// Third-order perturbation theory for simultaneous Stark drives.
DrivenRates driven_rates_pt(const TransmonPairSpec& pair, const StarkConfig& stark);

// A chain of capacitively coupled transmons with Stark tones; tone k is
// applied to every transmon in `targets` with a sqrt-envelope ramp.
struct StarkTone {
  double omega_s = 0.0;
  double amp = 0.0;
  double phase = 0.0;
  std::vector<int> targets;
};

struct ChainSpec {
  std::vector<TransmonSpec> transmons;
  std::vector<double> couplings;  // couplings[k] between transmons k and k+1
  void validate() const;
};

// Schroedinger-equation rate extraction: evolve each computational product
// state through an adiabatic ramp, fit the accumulated phase per unit time on
// the flat top, and solve for all z_{i...} coefficients (3^n of them,
// exponents in {0,1,2}). Throws AdiabaticityError when any state leaks more
// than 1%.
struct ChainRates {
  std::vector<double> z;        // 3^n coefficients, index = sum_k i_k 3^{n-1-k}
  double max_leakage = 0.0;
  double hold_duration = 0.0;
};
ChainRates driven_z_numeric(const ChainSpec& chain, const std::vector<StarkTone>& tones,
                            double ramp_duration, double hold_duration, int n_samples = 160);

// Two-transmon wrapper returning the z-basis interaction rates.
InteractionRates driven_rates_numeric(const TransmonPairSpec& pair, const StarkConfig& stark,
                                      double ramp_duration, double hold_duration = 0.0);

// JAZZ double-echo Ramsey simulation on a diagonal two-qutrit Hamiltonian.
struct JazzOptions {
  double delta_art = 0.0;       // rad/s
  std::vector<double> t_list;   // evolution period durations, seconds
  double decay_tau = 0.0;       // visibility decay time constant; 0 = none
};

struct JazzResult {
  double zeta = 0.0;  // recovered rate, rad/s
  double omega_plus = 0.0, omega_minus = 0.0;
  CosineFit fit_plus, fit_minus;
};

JazzResult simulate_jazz(const CMatrix& h_diag, int i, int j, const JazzOptions& opt);

struct TotalJazzResult {
  double z22 = 0.0;
  double omega = 0.0;
  CosineFit fit;
};

// Eight-evolution-period sequence oscillating at delta_art + 4 z22.
TotalJazzResult simulate_total_jazz(const CMatrix& h_diag, const JazzOptions& opt);

// Quadratic fit of the perturbative z22(Omega_S^0) over the amplitude grid
// and its analytic zero crossing.
struct StarkCalibration {
  double amplitude = 0.0;        // calibrated Omega_S^0 (rad/s)
  double residual_z22 = 0.0;     // z22 at the calibrated amplitude (rad/s)
  QuadraticRoot fit;
  std::vector<double> grid_z22;  // z22 at each grid amplitude
};
StarkCalibration calibrate_stark_amplitude(const TransmonPairSpec& pair, double omega_s,
                                           double dphi, const std::vector<double>& amp_grid);

}  // namespace ahmsim
