#pragma once

#include <vector>

namespace ahmsim {

// y(t) = amplitude * exp(-t * decay_rate) * cos(omega t + phase) + offset
struct CosineFit {
  double amplitude = 0.0;
  double decay_rate = 0.0;  // 1/tau; 0 = no decay
  double omega = 0.0;       // rad per unit t, >= 0 by convention
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

// Nonlinear least squares seeded by the peak of the discrete Fourier
// spectrum; decay seed from the log envelope. Throws FitError when the
// residual stays above max(rel_tol * amplitude, abs_tol).
CosineFit fit_decaying_cosine(const std::vector<double>& t, const std::vector<double>& y,
                              double residual_rel_tol = 0.2);

// Least-squares quadratic y = c2 x^2 + c1 x + c0 and its root inside
// [lo, hi]. Throws BracketError when y has no sign change on the grid and
// FitError when no real root lies in the bracket.
struct QuadraticRoot {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
  double root = 0.0;
  double rms_residual = 0.0;
};
QuadraticRoot fit_quadratic_root(const std::vector<double>& x, const std::vector<double>& y);

// Slope of an unwrapped phase series (linear least squares).
double fit_phase_slope(const std::vector<double>& t, const std::vector<double>& phase_wrapped);

}  // namespace ahmsim
