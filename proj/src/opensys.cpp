#include "opensys.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "integrate.hpp"
#include "model.hpp"

namespace ahmsim {

void LindbladSpec::validate() const {
  if (jump_ops.size() != rates.size())
    throw InvalidArgumentError("LindbladSpec: operator/rate count mismatch");
  for (double g : rates)
    if (g < 0.0) throw InvalidArgumentError("LindbladSpec: negative rate");
  for (const auto& l : jump_ops)
    if (l.rows() != dim() || l.cols() != dim())
      throw InvalidArgumentError("LindbladSpec: inconsistent dimensions");
}

LindbladSpec jump_ops_from_coherence(const TransmonSpec& spec) {
  if (spec.t1_01 <= 0.0 || spec.t2_01 <= 0.0 || spec.t1_12 <= 0.0 || spec.t2_12 <= 0.0)
    throw InvalidArgumentError("jump_ops_from_coherence: all four coherence times required");
  const double g10 = 1.0 / spec.t1_01;
  const double g21 = 1.0 / spec.t1_12;
  const double g11 = 1.0 / spec.t2_01 - 0.5 / spec.t1_01;
  const double g22 = 1.0 / spec.t2_12 - 0.5 / spec.t1_12;
  if (g11 < 0.0)
    throw ConfigError("jump_ops_from_coherence: negative 01 dephasing rate (T2_01 > 2 T1_01)");
  if (g22 < 0.0)
    throw ConfigError("jump_ops_from_coherence: negative 12 dephasing rate (T2_12 > 2 T1_12)");

  LindbladSpec out;
  CMatrix l10 = CMatrix::Zero(3, 3);
  l10(0, 1) = 1.0;
  CMatrix l21 = CMatrix::Zero(3, 3);
  l21(1, 2) = 1.0;
  CMatrix l11 = CMatrix::Zero(3, 3);
  l11(1, 1) = 1.0;
  CMatrix l22 = CMatrix::Zero(3, 3);
  l22(2, 2) = 1.0;
  out.jump_ops = {l10, l21, l11, l22};
  out.rates = {g10, g21, g11, g22};
  // drop identically-zero channels (e.g. T2 = 2 T1)
  for (long i = static_cast<long>(out.rates.size()) - 1; i >= 0; --i)
    if (out.rates[i] == 0.0) {
      out.rates.erase(out.rates.begin() + i);
      out.jump_ops.erase(out.jump_ops.begin() + i);
    }
  return out;
}

LindbladSpec embed_pair(const LindbladSpec& a, const LindbladSpec& b) {
  a.validate();
  b.validate();
  const CMatrix id = CMatrix::Identity(3, 3);
  LindbladSpec out;
  for (size_t i = 0; i < a.jump_ops.size(); ++i) {
    out.jump_ops.push_back(kron(a.jump_ops[i], id));
    out.rates.push_back(a.rates[i]);
  }
  for (size_t i = 0; i < b.jump_ops.size(); ++i) {
    out.jump_ops.push_back(kron(id, b.jump_ops[i]));
    out.rates.push_back(b.rates[i]);
  }
  return out;
}

CMatrix liouvillian_matrix(const CMatrix& h, const LindbladSpec& spec) {
  spec.validate();
  const long d = h.rows();
  const CMatrix id = CMatrix::Identity(d, d);
  // column-stacking: vec(A rho B) = (B^T kron A) vec(rho)
  CMatrix l = cx(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  for (size_t k = 0; k < spec.jump_ops.size(); ++k) {
    const CMatrix& j = spec.jump_ops[k];
    const CMatrix jdj = j.adjoint() * j;
    l += spec.rates[k] * (kron(j.conjugate(), j) - 0.5 * kron(id, jdj) -
                          0.5 * kron(jdj.transpose(), id));
  }
  return l;
}

CMatrix lindblad_rhs(const CMatrix& h, const LindbladSpec& spec, const CMatrix& rho) {
  CMatrix out = cx(0.0, -1.0) * (h * rho - rho * h);
  for (size_t k = 0; k < spec.jump_ops.size(); ++k) {
    const CMatrix& j = spec.jump_ops[k];
    const CMatrix jr = j * rho;
    const CMatrix jdj = j.adjoint() * j;
    out += spec.rates[k] * (jr * j.adjoint() - 0.5 * (jdj * rho + rho * jdj));
  }
  return out;
}

namespace {

void record_state(LindbladResult& out, double t, const CMatrix& rho, const LindbladOptions& opt) {
  const long d = rho.rows();
  out.times.push_back(t);
  // diagonal observables from populations
  CVector diag_amp(d);
  for (long i = 0; i < d; ++i) diag_amp[i] = std::sqrt(std::max(rho(i, i).real(), 0.0));
  out.lz.push_back(site_lz(diag_amp, opt.n_sites));
  out.lz2.push_back(site_lz2(diag_amp, opt.n_sites));
  if (opt.keep_states) out.rho.push_back(rho);

  out.max_trace_drift = std::max(out.max_trace_drift, std::abs(rho.trace().real() - 1.0));
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
  const double min_eig = es.eigenvalues().minCoeff();
  if (out.times.size() == 1)
    out.min_eigenvalue = min_eig;
  else
    out.min_eigenvalue = std::min(out.min_eigenvalue, min_eig);
  if (min_eig < -1e-6)
    throw NumericalError("lindblad evolution: positivity violation beyond -1e-6");
  out.max_purity = std::max(out.max_purity, (herm * herm).trace().real());
}

void check_times(const std::vector<double>& times) {
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1])
      throw InvalidArgumentError("lindblad evolution: times must be nondecreasing");
  if (!times.empty() && times.front() < 0.0)
    throw InvalidArgumentError("lindblad evolution: negative time");
}

}  // namespace

LindbladResult lindblad_evolve(const CMatrix& h, const LindbladSpec& spec, const CMatrix& rho0,
                               const std::vector<double>& times, const LindbladOptions& opt) {
  spec.validate();
  check_times(times);
  const long d = h.rows();
  if (rho0.rows() != d || rho0.cols() != d)
    throw InvalidArgumentError("lindblad_evolve: dimension mismatch");

  LindbladResult out;
  if (d <= 9) {
    const CMatrix l = liouvillian_matrix(h, spec);
    CVector v = Eigen::Map<const CVector>(rho0.data(), d * d);
    double t = 0.0;
    for (double tc : times) {
      if (tc > t) {
        const CMatrix step = ((tc - t) * l).exp();
        v = step * v;
        t = tc;
      }
      const CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
      record_state(out, tc, rho, opt);
    }
    return out;
  }
  return lindblad_evolve_td([&](double) { return h; }, spec, rho0, times, opt);
}

LindbladResult lindblad_evolve_td(const std::function<CMatrix(double)>& h_of_t,
                                  const LindbladSpec& spec, const CMatrix& rho0,
                                  const std::vector<double>& times, const LindbladOptions& opt) {
  spec.validate();
  check_times(times);
  const long d = rho0.rows();

  const OdeRhs rhs = [&](double t, const CVector& y, CVector& dydt) {
    const CMatrix rho = Eigen::Map<const CMatrix>(y.data(), d, d);
    const CMatrix dr = lindblad_rhs(h_of_t(t), spec, rho);
    dydt = Eigen::Map<const CVector>(dr.data(), d * d);
  };
  OdeOptions oopt;
  oopt.atol = opt.atol;
  oopt.rtol = opt.rtol;

  LindbladResult out;
  CVector v = Eigen::Map<const CVector>(rho0.data(), d * d);
  double t = 0.0;
  for (double tc : times) {
    if (tc > t) {
      integrate_rk45(rhs, t, tc, v, oopt);
      t = tc;
    }
    const CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
    record_state(out, tc, rho, opt);
  }
  return out;
}

CMatrix averaged_liouvillian(const CMatrix& h_bar, const LindbladSpec& spec, const CMatrix& u02) {
  spec.validate();
  if (!is_unitary(u02, 1e-10))
    throw InvalidArgumentError("averaged_liouvillian: u02 must be unitary");
  const CMatrix h_tilde = u02.adjoint() * h_bar * u02;
  LindbladSpec toggled;
  toggled.rates = spec.rates;
  for (const auto& l : spec.jump_ops) toggled.jump_ops.push_back(u02.adjoint() * l * u02);
  return 0.5 * (liouvillian_matrix(h_bar, spec) + liouvillian_matrix(h_tilde, toggled));
}

LindbladResult superop_evolve(const CMatrix& liouvillian, const CMatrix& rho0,
                              const std::vector<double>& times, const LindbladOptions& opt) {
  check_times(times);
  const long d = rho0.rows();
  if (liouvillian.rows() != d * d)
    throw InvalidArgumentError("superop_evolve: dimension mismatch");
  LindbladResult out;
  CVector v = Eigen::Map<const CVector>(rho0.data(), d * d);
  double t = 0.0;
  for (double tc : times) {
    if (tc > t) {
      const CMatrix step = ((tc - t) * liouvillian).exp();
      v = step * v;
      t = tc;
    }
    const CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
    record_state(out, tc, rho, opt);
  }
  return out;
}

}  // namespace ahmsim
