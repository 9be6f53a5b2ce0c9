#include "integrate.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace ahmsim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// 4th-order embedded weights
constexpr double e1 = 5179.0 / 57600.0, e3 = 7571.0 / 16695.0, e4 = 393.0 / 640.0,
                 e5 = -92097.0 / 339200.0, e6 = 187.0 / 2100.0, e7 = 1.0 / 40.0;
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

}  // namespace

void integrate_rk45(const OdeRhs& rhs, double t0, double t1, Eigen::VectorXcd& y,
                    const OdeOptions& opt) {
  const double span = t1 - t0;
  if (span == 0.0) return;
  if (span < 0.0) throw InvalidArgumentError("integrate_rk45: t1 < t0");

  const long n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), err(n);

  double t = t0;
  double h = opt.initial_step > 0.0 ? opt.initial_step : span / 100.0;
  h = std::min(h, opt.max_step);
  const double h_min = std::max(span * 1e-14, 1e-300);

  rhs(t, y, k1);
  bool fsal_valid = true;

  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < h_min) throw StiffnessError("integrate_rk45: step size underflow");
    if (!fsal_valid) rhs(t, y, k1);

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, y5, k7);

    err = y5 - (y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7));
    double err_norm = 0.0;
    for (long i = 0; i < n; ++i) {
      const double scale = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / scale);
    }
    if (!std::isfinite(err_norm)) throw NumericalError("integrate_rk45: non-finite state");

    if (err_norm <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);
      fsal_valid = true;
    } else {
      fsal_valid = true;  // k1 still matches (t, y)
    }
    const double factor =
        err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
    h = std::min(h * factor, opt.max_step);
  }
}

}  // namespace ahmsim
