#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"

namespace ahmsim {

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

inline double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const CMatrix& m, double tol = 1e-12);
bool is_unitary(const CMatrix& m, double tol = 1e-12);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix kron_all(const std::vector<CMatrix>& ops);

// I^{site} (x) op (x) I^{n_sites-site-1}, each factor d-dimensional.
CMatrix embed_local(const CMatrix& op, int site, int n_sites, int d = 3);

// Matrix exponential. Hermitian and skew-Hermitian inputs go through an
// eigendecomposition, everything else through scaling-and-squaring Pade.
CMatrix matrix_exp(const CMatrix& a);

// exp(-i H t) for Hermitian H via eigendecomposition.
CMatrix expm_minus_i_ht(const CMatrix& h, double t);

// Principal-branch Hermitian generator: H with U = exp(-i H t) and all
// eigenphases of U in (-pi, pi]. Requires U unitary.
CMatrix hermitian_generator(const CMatrix& u, double t);

// <psi|O|psi> for Hermitian O; throws if O is not Hermitian or the imaginary
// residue exceeds 1e-10.
double expect(const CMatrix& o, const CVector& psi);

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 0.0;
  double atol = 1e-10;
  double rtol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
};

// psi -> prod_k exp(-i H_k tau_k) psi, segments applied in list order.
CVector evolve_piecewise(const std::vector<std::pair<CMatrix, double>>& segments,
                         const CVector& psi0);

// Adaptive integration of i dpsi/dt = H(t) psi. When sample_times is nonempty
// the returned vector holds the state at each requested time (monotone
// nondecreasing, within [t0, t1]); the final state is always appended last
// unless t1 is already sampled.
std::vector<CVector> evolve_td(const std::function<CMatrix(double)>& h_of_t,
                               const TimeGrid& grid, const CVector& psi0,
                               const std::vector<double>& sample_times = {});

}  // namespace ahmsim
