#include "gates.hpp"

#include <array>
#include <cmath>
#include <map>

namespace ahmsim {

namespace {

struct KindInfo {
  GateKind kind;
  const char* name;
  bool entangling;
  bool angled;
};

constexpr std::array<KindInfo, 17> kKinds = {{
    {GateKind::rx01, "rx01", false, true},
    {GateKind::ry01, "ry01", false, true},
    {GateKind::rz01, "rz01", false, true},
    {GateKind::rx12, "rx12", false, true},
    {GateKind::ry12, "ry12", false, true},
    {GateKind::rz12, "rz12", false, true},
    {GateKind::rx02, "rx02", false, true},
    {GateKind::ry02, "ry02", false, true},
    {GateKind::rz02, "rz02", false, true},
    {GateKind::x3, "x3", false, false},
    {GateKind::z3, "z3", false, false},
    {GateKind::h3, "h3", false, false},
    {GateKind::csum, "csum", true, false},
    {GateKind::cz, "cz", true, false},
    {GateKind::weyl, "weyl", false, false},
    {GateKind::pi02, "pi02", false, false},
    {GateKind::custom, "custom", false, false},
}};

const KindInfo& info(GateKind k) {
  for (const auto& ki : kKinds)
    if (ki.kind == k) return ki;
  throw InvalidArgumentError("unknown gate kind");
}

CMatrix pauli_in_subspace(int i, int j, int axis) {
  CMatrix m = CMatrix::Zero(3, 3);
  switch (axis) {
    case 0:  // x
      m(i, j) = 1.0;
      m(j, i) = 1.0;
      break;
    case 1:  // y
      m(i, j) = cx(0.0, -1.0);
      m(j, i) = cx(0.0, 1.0);
      break;
    default:  // z
      m(i, i) = 1.0;
      m(j, j) = -1.0;
      break;
  }
  return m;
}

}  // namespace

const char* gate_kind_name(GateKind k) { return info(k).name; }

GateKind gate_kind_from_name(const std::string& name) {
  for (const auto& ki : kKinds)
    if (name == ki.name) return ki.kind;
  throw InvalidArgumentError("unknown gate name: " + name);
}

bool is_entangling(GateKind k) { return info(k).entangling; }
bool has_angle(GateKind k) { return info(k).angled; }

GateSpec single_gate(GateKind kind, int site) {
  GateSpec g;
  g.kind = kind;
  g.targets = {site};
  return g;
}

GateSpec rotation_gate(GateKind kind, double angle, int site) {
  if (!has_angle(kind)) throw InvalidArgumentError("rotation_gate: kind takes no angle");
  GateSpec g = single_gate(kind, site);
  g.angle = angle;
  return g;
}

GateSpec weyl_gate(int k, int l, int site) {
  GateSpec g = single_gate(GateKind::weyl, site);
  g.k = ((k % 3) + 3) % 3;
  g.l = ((l % 3) + 3) % 3;
  return g;
}

GateSpec csum_gate(int control, int target) {
  GateSpec g;
  g.kind = GateKind::csum;
  g.targets = {control, target};
  return g;
}

GateSpec cz_gate(int a, int b) {
  GateSpec g;
  g.kind = GateKind::cz;
  g.targets = {a, b};
  return g;
}

GateSpec custom_gate(const CMatrix& u, const std::vector<int>& targets) {
  const long want = targets.size() == 1 ? 3 : 9;
  if (targets.empty() || targets.size() > 2 || u.rows() != want || u.cols() != want)
    throw InvalidArgumentError("custom_gate: bad target count or matrix dimension");
  GateSpec g;
  g.kind = GateKind::custom;
  g.targets = targets;
  g.matrix = u;
  return g;
}

const CMatrix& sigma(GateKind kind) {
  static const std::map<GateKind, CMatrix> table = [] {
    std::map<GateKind, CMatrix> t;
    t[GateKind::rx01] = pauli_in_subspace(0, 1, 0);
    t[GateKind::ry01] = pauli_in_subspace(0, 1, 1);
    t[GateKind::rz01] = pauli_in_subspace(0, 1, 2);
    t[GateKind::rx12] = pauli_in_subspace(1, 2, 0);
    t[GateKind::ry12] = pauli_in_subspace(1, 2, 1);
    t[GateKind::rx02] = pauli_in_subspace(0, 2, 0);
    t[GateKind::ry02] = pauli_in_subspace(0, 2, 1);
    t[GateKind::rz02] = pauli_in_subspace(0, 2, 2);
    // sigma_z^{12} = -1/2 lambda_3 - sqrt(3)/2 lambda_8 = diag(-1, 0, 1)
    CMatrix z12 = CMatrix::Zero(3, 3);
    z12(0, 0) = -1.0;
    z12(2, 2) = 1.0;
    t[GateKind::rz12] = z12;
    return t;
  }();
  auto it = table.find(kind);
  if (it == table.end()) throw InvalidArgumentError("sigma: not a subspace rotation kind");
  return it->second;
}

cx omega_root() { return std::exp(cx(0.0, kTwoPi / 3.0)); }

CMatrix weyl(int k, int l) {
  k = ((k % 3) + 3) % 3;
  l = ((l % 3) + 3) % 3;
  const cx w = omega_root();
  CMatrix zk = CMatrix::Zero(3, 3);
  for (int n = 0; n < 3; ++n) zk(n, n) = std::pow(w, k * n);
  CMatrix xl = CMatrix::Zero(3, 3);
  for (int n = 0; n < 3; ++n) xl((n + l) % 3, n) = 1.0;
  const cx phase = std::exp(cx(0.0, -kPi * k * l / 3.0));  // omega^{-kl/2}
  return phase * zk * xl;
}

CMatrix materialize(const GateSpec& g) {
  const cx w = omega_root();
  switch (g.kind) {
    case GateKind::rx01:
    case GateKind::ry01:
    case GateKind::rz01:
    case GateKind::rx12:
    case GateKind::ry12:
    case GateKind::rz12:
    case GateKind::rx02:
    case GateKind::ry02:
    case GateKind::rz02:
      return expm_minus_i_ht(sigma(g.kind), 0.5 * g.angle);
    case GateKind::x3: {
      CMatrix m = CMatrix::Zero(3, 3);
      for (int n = 0; n < 3; ++n) m((n + 1) % 3, n) = 1.0;
      return m;
    }
    case GateKind::z3: {
      CMatrix m = CMatrix::Zero(3, 3);
      for (int n = 0; n < 3; ++n) m(n, n) = std::pow(w, n);
      return m;
    }
    case GateKind::h3: {
      CMatrix m(3, 3);
      for (int n = 0; n < 3; ++n)
        for (int p = 0; p < 3; ++p) m(n, p) = std::pow(w, n * p) / std::sqrt(3.0);
      return m;
    }
    case GateKind::csum: {
      CMatrix m = CMatrix::Zero(9, 9);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(3 * a + (a + b) % 3, 3 * a + b) = 1.0;
      return m;
    }
    case GateKind::cz: {
      CMatrix m = CMatrix::Zero(9, 9);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(3 * a + b, 3 * a + b) = std::pow(w, a * b);
      return m;
    }
    case GateKind::weyl:
      return weyl(g.k, g.l);
    case GateKind::pi02: {
      CMatrix m = CMatrix::Zero(3, 3);
      m(0, 2) = 1.0;
      m(1, 1) = 1.0;
      m(2, 0) = 1.0;
      return m;
    }
    case GateKind::custom:
      return g.matrix;
  }
  throw InvalidArgumentError("materialize: unknown gate kind");
}

WeylConjugation conjugate_weyls(const CMatrix& g, const std::vector<WeylLabel>& in,
                                double tol) {
  const int n = static_cast<int>(in.size());
  std::vector<CMatrix> factors;
  factors.reserve(n);
  for (const auto& wl : in) factors.push_back(weyl(wl.k, wl.l));
  const CMatrix v = g * kron_all(factors) * g.adjoint();

  // Search the Weyl product basis for a phase match.
  WeylConjugation result;
  result.out.assign(n, WeylLabel{});
  const long total = static_cast<long>(std::pow(9, n));
  for (long code = 0; code < total; ++code) {
    long rem = code;
    std::vector<CMatrix> outf;
    outf.reserve(n);
    std::vector<WeylLabel> labels(n);
    for (int s = 0; s < n; ++s) {
      const int kk = static_cast<int>(rem % 3);
      rem /= 3;
      const int ll = static_cast<int>(rem % 3);
      rem /= 3;
      labels[s] = {kk, ll};
      outf.push_back(weyl(kk, ll));
    }
    const CMatrix cand = kron_all(outf);
    // phase from the largest element of cand
    long bi = 0, bj = 0;
    double best = 0.0;
    for (long i = 0; i < cand.rows(); ++i)
      for (long j = 0; j < cand.cols(); ++j)
        if (std::abs(cand(i, j)) > best) {
          best = std::abs(cand(i, j));
          bi = i;
          bj = j;
        }
    if (std::abs(v(bi, bj)) < 0.5) continue;
    const cx phase = v(bi, bj) / cand(bi, bj);
    if (std::abs(std::abs(phase) - 1.0) > tol) continue;
    if (max_abs(v - phase * cand) < tol) {
      result.out = labels;
      result.phase = phase;
      return result;
    }
  }
  throw CliffordError("conjugate_weyls: conjugation is not a Weyl product (non-Clifford cycle)");
}

}  // namespace ahmsim
