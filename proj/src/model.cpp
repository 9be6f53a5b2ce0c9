#include "model.hpp"

#include <cmath>
#include <string>

#include "integrate.hpp"

namespace ahmsim {

namespace {
constexpr double kLzVal[3] = {1.0, 0.0, -1.0};
}

void ModelParams::validate() const {
  if (n_sites < 1) throw InvalidArgumentError("ModelParams: n_sites must be >= 1");
  if (scale_freq < 0.0) throw InvalidArgumentError("ModelParams: scale_freq must be > 0");
}

const SpinOperators& spin_ops() {
  static const SpinOperators ops = [] {
    SpinOperators s;
    s.lz = CMatrix::Zero(3, 3);
    s.lz(0, 0) = 1.0;
    s.lz(2, 2) = -1.0;
    s.lz2 = s.lz * s.lz;
    s.fplus = CMatrix::Zero(3, 3);
    s.fplus(0, 1) = 1.0;  // |m=0> -> |m=1>
    s.fplus(1, 2) = 1.0;  // |m=-1> -> |m=0>
    s.fminus = s.fplus.adjoint();
    s.fx = 0.5 * (s.fplus + s.fminus);
    s.lx = std::sqrt(2.0) * s.fx;
    s.pi02 = CMatrix::Zero(3, 3);
    s.pi02(0, 2) = 1.0;
    s.pi02(1, 1) = 1.0;
    s.pi02(2, 0) = 1.0;
    return s;
  }();
  return ops;
}

long model_dim(int n_sites) {
  long d = 1;
  for (int k = 0; k < n_sites; ++k) d *= 3;
  return d;
}

CMatrix build_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.n_sites > kDenseSiteCap)
    throw CapacityError("build_hamiltonian: " + std::to_string(p.n_sites) +
                        " sites exceeds dense cap of " + std::to_string(kDenseSiteCap) +
                        "; use the matrix-free path");
  const auto& s = spin_ops();
  const long dim = model_dim(p.n_sites);
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int k = 0; k < p.n_sites; ++k) {
    h += 0.5 * p.kappa * embed_local(s.lz2, k, p.n_sites);
    h -= p.chi * embed_local(s.fx, k, p.n_sites);
  }
  for (int k = 0; k + 1 < p.n_sites; ++k) {
    const CMatrix d =
        embed_local(s.lz, k + 1, p.n_sites) - embed_local(s.lz, k, p.n_sites);
    h += 0.5 * p.beta * d * d;
  }
  return h;
}

CMatrix single_site_hamiltonian(const ModelParams& p) {
  const auto& s = spin_ops();
  return 0.5 * (p.kappa + p.beta) * s.lz2 - (p.chi / std::sqrt(2.0)) * s.lx;
}

CMatrix charge_observable(int site, int n_sites) {
  if (site < 0 || site >= n_sites)
    throw InvalidArgumentError("charge_observable: site out of range");
  const auto& s = spin_ops();
  const long dim = model_dim(n_sites);
  CMatrix q = CMatrix::Zero(dim, dim);
  if (site > 0) q += embed_local(s.lz, site - 1, n_sites);
  q -= embed_local(s.lz, site, n_sites);
  return q;
}

AhmOperator::AhmOperator(const ModelParams& p) : p_(p), dim_(model_dim(p.n_sites)) {
  p.validate();
  diag_.assign(dim_, 0.0);
  const int n = p_.n_sites;
  std::vector<int> digit(n);
  for (long i = 0; i < dim_; ++i) {
    long rem = i;
    for (int k = n - 1; k >= 0; --k) {
      digit[k] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    double e = 0.0;
    for (int k = 0; k < n; ++k) e += 0.5 * p_.kappa * kLzVal[digit[k]] * kLzVal[digit[k]];
    for (int k = 0; k + 1 < n; ++k) {
      const double d = kLzVal[digit[k + 1]] - kLzVal[digit[k]];
      e += 0.5 * p_.beta * d * d;
    }
    diag_[i] = e;
  }
}

void AhmOperator::apply(const CVector& in, CVector& out) const {
  if (in.size() != dim_) throw InvalidArgumentError("AhmOperator: dimension mismatch");
  out.resize(dim_);
  for (long i = 0; i < dim_; ++i) out[i] = diag_[i] * in[i];
  // -chi Fx on each site: Fx couples digit d <-> d+1 with element 1/2.
  const double c = -0.5 * p_.chi;
  if (c == 0.0) return;
  long stride = dim_ / 3;
  for (int k = 0; k < p_.n_sites; ++k) {
    const long period = stride * 3;
    for (long base = 0; base < dim_; base += period) {
      for (long off = 0; off < stride; ++off) {
        const long i0 = base + off;
        const long i1 = i0 + stride;
        const long i2 = i1 + stride;
        const cx a0 = in[i0], a1 = in[i1], a2 = in[i2];
        out[i0] += c * a1;
        out[i1] += c * (a0 + a2);
        out[i2] += c * a1;
      }
    }
    stride /= 3;
  }
}

std::vector<double> site_lz(const CVector& psi, int n_sites) {
  std::vector<double> acc(n_sites, 0.0);
  const long dim = psi.size();
  for (long i = 0; i < dim; ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    long rem = i;
    for (int k = n_sites - 1; k >= 0; --k) {
      acc[k] += p * kLzVal[rem % 3];
      rem /= 3;
    }
  }
  return acc;
}

std::vector<double> site_lz2(const CVector& psi, int n_sites) {
  std::vector<double> acc(n_sites, 0.0);
  const long dim = psi.size();
  for (long i = 0; i < dim; ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    long rem = i;
    for (int k = n_sites - 1; k >= 0; --k) {
      const double v = kLzVal[rem % 3];
      acc[k] += p * v * v;
      rem /= 3;
    }
  }
  return acc;
}

std::vector<double> charges_from_lz(const std::vector<double>& lz) {
  std::vector<double> q(lz.size());
  for (size_t k = 0; k < lz.size(); ++k) {
    const double left = k > 0 ? lz[k - 1] : 0.0;
    q[k] = left - lz[k];
  }
  return q;
}

namespace {

void record_point(ObservableSeries& out, double t, const CVector& psi, int n_sites) {
  out.times.push_back(t);
  out.lz.push_back(site_lz(psi, n_sites));
  out.lz2.push_back(site_lz2(psi, n_sites));
  out.charge.push_back(charges_from_lz(out.lz.back()));
}

}  // namespace

ObservableSeries exact_evolution(const ModelParams& p, const CVector& psi0,
                                 const std::vector<double>& times) {
  p.validate();
  const long dim = model_dim(p.n_sites);
  if (psi0.size() != dim) throw InvalidArgumentError("exact_evolution: state dimension mismatch");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] < times[i - 1])
      throw InvalidArgumentError("exact_evolution: times must be nondecreasing");

  ObservableSeries out;
  if (p.n_sites <= 6) {
    const CMatrix h = build_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CVector c0 = es.eigenvectors().adjoint() * psi0;
    for (double t : times) {
      CVector c = c0;
      for (long i = 0; i < dim; ++i) c[i] *= std::exp(cx(0.0, -es.eigenvalues()[i] * t));
      const CVector psi = es.eigenvectors() * c;
      record_point(out, t, psi, p.n_sites);
    }
    return out;
  }

  const AhmOperator op(p);
  const OdeRhs rhs = [&](double, const CVector& y, CVector& dydt) {
    op.apply(y, dydt);
    dydt *= cx(0.0, -1.0);
  };
  OdeOptions opt;
  opt.atol = opt.rtol = 1e-10;
  CVector psi = psi0;
  if (!times.empty() && times.front() > 0.0)
    integrate_rk45(rhs, 0.0, times.front(), psi, opt);
  for (size_t i = 0; i < times.size(); ++i) {
    if (i > 0) integrate_rk45(rhs, times[i - 1], times[i], psi, opt);
    record_point(out, times[i], psi, p.n_sites);
  }
  return out;
}

CVector basis_state(const std::vector<int>& digits) {
  long idx = 0;
  for (int d : digits) {
    if (d < 0 || d > 2) throw InvalidArgumentError("basis_state: digit out of range");
    idx = idx * 3 + d;
  }
  CVector psi = CVector::Zero(model_dim(static_cast<int>(digits.size())));
  psi[idx] = 1.0;
  return psi;
}

CVector basis_state(const std::string& digits) {
  std::vector<int> d;
  d.reserve(digits.size());
  for (char c : digits) d.push_back(c - '0');
  return basis_state(d);
}

}  // namespace ahmsim
