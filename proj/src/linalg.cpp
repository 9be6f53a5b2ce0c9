#include "linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>

#include "integrate.hpp"

namespace ahmsim {

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) < tol;
}

bool is_unitary(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const CMatrix id = CMatrix::Identity(m.rows(), m.cols());
  return max_abs(m.adjoint() * m - id) < tol;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix kron_all(const std::vector<CMatrix>& ops) {
  if (ops.empty()) throw InvalidArgumentError("kron_all: empty operator list");
  for (const auto& op : ops)
    if (op.rows() != op.cols()) throw InvalidArgumentError("kron_all: non-square factor");
  CMatrix out = ops.front();
  for (size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k]);
  return out;
}

CMatrix embed_local(const CMatrix& op, int site, int n_sites, int d) {
  if (site < 0 || site >= n_sites)
    throw InvalidArgumentError("embed_local: site index out of range");
  if (op.rows() != d || op.cols() != d)
    throw InvalidArgumentError("embed_local: operator dimension mismatch");
  std::vector<CMatrix> factors;
  factors.reserve(n_sites);
  const CMatrix id = CMatrix::Identity(d, d);
  for (int k = 0; k < n_sites; ++k) factors.push_back(k == site ? op : id);
  return kron_all(factors);
}

CMatrix matrix_exp(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgumentError("matrix_exp: non-square input");
  if (!a.allFinite()) throw NumericalError("matrix_exp: non-finite entries");
  const double scale = std::max(max_abs(a), 1.0);
  if (max_abs(a - a.adjoint()) < 1e-14 * scale) {
    // a = H Hermitian: exp(H) = V exp(diag) V^+
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    const Eigen::VectorXd w = es.eigenvalues();
    CMatrix out = es.eigenvectors();
    CVector phases(w.size());
    for (long i = 0; i < w.size(); ++i) phases[i] = std::exp(w[i]);
    return out * phases.asDiagonal() * es.eigenvectors().adjoint();
  }
  if (max_abs(a + a.adjoint()) < 1e-14 * scale) {
    // a = -i H with H = i a Hermitian
    const CMatrix h = cx(0.0, 1.0) * a;
    return expm_minus_i_ht(h, 1.0);
  }
  return a.exp();
}

CMatrix expm_minus_i_ht(const CMatrix& h, double t) {
  if (!h.allFinite()) throw NumericalError("expm_minus_i_ht: non-finite entries");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXd w = es.eigenvalues();
  CVector phases(w.size());
  for (long i = 0; i < w.size(); ++i) phases[i] = std::exp(cx(0.0, -w[i] * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix hermitian_generator(const CMatrix& u, double t) {
  if (!is_unitary(u, 1e-10)) throw InvalidArgumentError("hermitian_generator: input not unitary");
  if (t == 0.0) throw InvalidArgumentError("hermitian_generator: zero duration");
  // Unitary u is normal; Schur form is diagonal.
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& q = schur.matrixU();
  CVector log_diag(u.rows());
  for (long i = 0; i < u.rows(); ++i) {
    const cx lambda = schur.matrixT()(i, i);
    const double phase = std::arg(lambda);  // principal branch (-pi, pi]
    log_diag[i] = -phase / t;
  }
  CMatrix h = q * log_diag.asDiagonal() * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

double expect(const CMatrix& o, const CVector& psi) {
  if (o.rows() != psi.size() || o.cols() != psi.size())
    throw InvalidArgumentError("expect: dimension mismatch");
  if (!is_hermitian(o, 1e-10 * std::max(max_abs(o), 1.0)))
    throw InvalidArgumentError("expect: observable not Hermitian");
  const cx val = psi.dot(o * psi);
  if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val)))
    throw NumericalError("expect: imaginary residue above tolerance");
  return val.real();
}

CVector evolve_piecewise(const std::vector<std::pair<CMatrix, double>>& segments,
                         const CVector& psi0) {
  CVector psi = psi0;
  for (const auto& [h, tau] : segments) {
    if (h.rows() != psi.size())
      throw InvalidArgumentError("evolve_piecewise: dimension mismatch");
    if (tau < 0.0) throw InvalidArgumentError("evolve_piecewise: negative duration");
    if (tau == 0.0) continue;
    psi = expm_minus_i_ht(h, tau) * psi;
  }
  return psi;
}

std::vector<CVector> evolve_td(const std::function<CMatrix(double)>& h_of_t,
                               const TimeGrid& grid, const CVector& psi0,
                               const std::vector<double>& sample_times) {
  if (grid.t1 < grid.t0) throw InvalidArgumentError("evolve_td: t1 < t0");
  if (grid.atol <= 0.0 || grid.rtol <= 0.0)
    throw InvalidArgumentError("evolve_td: tolerances must be positive");

  OdeOptions opt;
  opt.atol = grid.atol;
  opt.rtol = grid.rtol;
  opt.max_step = grid.max_step;
  const OdeRhs rhs = [&](double t, const CVector& y, CVector& dydt) {
    dydt.noalias() = cx(0.0, -1.0) * (h_of_t(t) * y);
  };

  std::vector<double> checkpoints = sample_times;
  for (size_t i = 1; i < checkpoints.size(); ++i)
    if (checkpoints[i] < checkpoints[i - 1])
      throw InvalidArgumentError("evolve_td: sample times must be nondecreasing");
  if (!checkpoints.empty() && (checkpoints.front() < grid.t0 || checkpoints.back() > grid.t1))
    throw InvalidArgumentError("evolve_td: sample times outside grid");
  const bool append_final = checkpoints.empty() || checkpoints.back() < grid.t1;
  if (append_final) checkpoints.push_back(grid.t1);

  std::vector<CVector> out;
  out.reserve(checkpoints.size());
  CVector psi = psi0;
  double t = grid.t0;
  for (double tc : checkpoints) {
    integrate_rk45(rhs, t, tc, psi, opt);
    t = tc;
    out.push_back(psi);
  }
  return out;
}

}  // namespace ahmsim
