#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <limits>

namespace ahmsim {

struct OdeOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 -> heuristic
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt)>;

// Dormand-Prince 5(4) with PI-free step control. Advances y in place from t0
// to t1. Error norm: max_i |e_i| / (atol + rtol * |y_i|). Throws
// StiffnessError on step underflow.
void integrate_rk45(const OdeRhs& rhs, double t0, double t1, Eigen::VectorXcd& y,
                    const OdeOptions& opt = {});

}  // namespace ahmsim
