#include "circuits.hpp"

#include <cmath>
#include <sstream>

namespace ahmsim {

namespace {

long pow3(int n) {
  long d = 1;
  for (int i = 0; i < n; ++i) d *= 3;
  return d;
}

bool nearly_diagonal(const CMatrix& u, double tol = 1e-15) {
  for (long i = 0; i < u.rows(); ++i)
    for (long j = 0; j < u.cols(); ++j)
      if (i != j && std::abs(u(i, j)) > tol) return false;
  return true;
}

}  // namespace

void Circuit::append(GateSpec g) {
  for (int t : g.targets)
    if (t < 0 || t >= n_sites) throw InvalidArgumentError("Circuit: target out of range");
  if (g.targets.size() == 2 && g.targets[0] == g.targets[1])
    throw InvalidArgumentError("Circuit: duplicate targets");
  if (is_entangling(g.kind) || (g.kind == GateKind::custom && g.targets.size() == 2))
    cycles.push_back(static_cast<int>(gates.size()));
  gates.push_back(std::move(g));
}

void Circuit::rebuild_cycles() {
  cycles.clear();
  for (size_t i = 0; i < gates.size(); ++i)
    if (is_entangling(gates[i].kind) ||
        (gates[i].kind == GateKind::custom && gates[i].targets.size() == 2))
      cycles.push_back(static_cast<int>(i));
}

Fragment decompose_mz(double theta, int site) {
  if (!std::isfinite(theta)) throw InvalidArgumentError("decompose_mz: non-finite angle");
  Fragment f;
  f.gates.push_back(rotation_gate(GateKind::rz01, 4.0 * theta / 3.0, site));
  f.gates.push_back(rotation_gate(GateKind::rz12, 2.0 * theta / 3.0, site));
  f.reference = expm_minus_i_ht(spin_ops().lz2, theta);
  return f;
}

Fragment decompose_mx(double phi, int site) {
  if (!std::isfinite(phi)) throw InvalidArgumentError("decompose_mx: non-finite angle");
  const double s2 = std::sqrt(2.0);
  Fragment f;
  f.gates.push_back(rotation_gate(GateKind::rx01, -s2 * phi, site));
  f.gates.push_back(rotation_gate(GateKind::rx12, -s2 * phi, site));
  f.reference = expm_minus_i_ht(spin_ops().lx, -phi);  // exp(+i phi Lx)
  return f;
}

Fragment decompose_mzz(double gamma, int control, int target) {
  if (!std::isfinite(gamma)) throw InvalidArgumentError("decompose_mzz: non-finite angle");
  Fragment f;
  f.gates.push_back(csum_gate(control, target));
  f.gates.push_back(rotation_gate(GateKind::rz01, 2.0 * gamma / 3.0, target));
  f.gates.push_back(rotation_gate(GateKind::rz12, 4.0 * gamma / 3.0, target));
  f.gates.push_back(csum_gate(control, target));
  f.gates.push_back(rotation_gate(GateKind::rz01, -2.0 * gamma / 3.0, target));
  f.gates.push_back(rotation_gate(GateKind::rz12, 2.0 * gamma / 3.0, target));
  f.gates.push_back(csum_gate(control, target));

  static const double lzval[3] = {1.0, 0.0, -1.0};
  CMatrix ref = CMatrix::Zero(9, 9);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      ref(3 * a + b, 3 * a + b) = std::exp(cx(0.0, gamma * lzval[a] * lzval[b]));
  f.reference = ref;
  return f;
}

double TrotterPlan::theta(int site) const {
  const int bonds = (site > 0 ? 1 : 0) + (site < params.n_sites - 1 ? 1 : 0);
  return (0.5 * params.kappa + 0.5 * params.beta * bonds) * dt;
}

double TrotterPlan::phi() const { return params.chi / std::sqrt(2.0) * dt; }

double TrotterPlan::gamma() const { return params.beta * dt; }

Circuit build_trotter_circuit(const TrotterPlan& plan) {
  plan.params.validate();
  if (plan.n_steps < 0) throw InvalidArgumentError("TrotterPlan: negative step count");
  Circuit c;
  c.n_sites = plan.params.n_sites;
  const int n = c.n_sites;
  for (int step = 0; step < plan.n_steps; ++step) {
    for (int k = 0; k < n; ++k)
      for (auto& g : decompose_mx(plan.phi(), k).gates) c.append(g);
    for (int k = 0; k + 1 < n; ++k)
      for (auto& g : decompose_mzz(plan.gamma(), k, k + 1).gates) c.append(g);
    for (int k = 0; k < n; ++k)
      for (auto& g : decompose_mz(plan.theta(k), k).gates) c.append(g);
    c.step_marks.push_back(static_cast<int>(c.gates.size()));
  }
  return c;
}

namespace {

void apply_single_site(CVector& psi, const CMatrix& u, int site, int n) {
  const long dim = psi.size();
  const long stride = pow3(n - 1 - site);
  const long period = stride * 3;
  if (nearly_diagonal(u)) {
    const cx p0 = u(0, 0), p1 = u(1, 1), p2 = u(2, 2);
    for (long base = 0; base < dim; base += period)
      for (long off = 0; off < stride; ++off) {
        const long i = base + off;
        psi[i] *= p0;
        psi[i + stride] *= p1;
        psi[i + 2 * stride] *= p2;
      }
    return;
  }
  for (long base = 0; base < dim; base += period)
    for (long off = 0; off < stride; ++off) {
      const long i0 = base + off;
      const long i1 = i0 + stride;
      const long i2 = i1 + stride;
      const cx a0 = psi[i0], a1 = psi[i1], a2 = psi[i2];
      psi[i0] = u(0, 0) * a0 + u(0, 1) * a1 + u(0, 2) * a2;
      psi[i1] = u(1, 0) * a0 + u(1, 1) * a1 + u(1, 2) * a2;
      psi[i2] = u(2, 0) * a0 + u(2, 1) * a1 + u(2, 2) * a2;
    }
}

void apply_csum(CVector& psi, int control, int target, int n) {
  const long dim = psi.size();
  const long sc = pow3(n - 1 - control);
  const long st = pow3(n - 1 - target);
  for (long i = 0; i < dim; ++i) {
    const int dc = static_cast<int>((i / sc) % 3);
    const int dt = static_cast<int>((i / st) % 3);
    if (dt != 0 || dc == 0) continue;
    // |c, b> -> |c, b + c mod 3>: rotate the target triple forward by dc.
    const long i0 = i, i1 = i + st, i2 = i + 2 * st;
    if (dc == 1) {
      const cx tmp = psi[i2];
      psi[i2] = psi[i1];
      psi[i1] = psi[i0];
      psi[i0] = tmp;
    } else {
      const cx tmp = psi[i0];
      psi[i0] = psi[i1];
      psi[i1] = psi[i2];
      psi[i2] = tmp;
    }
  }
}

void apply_two_site(CVector& psi, const CMatrix& u, int a, int b, int n) {
  const long dim = psi.size();
  const long sa = pow3(n - 1 - a);
  const long sb = pow3(n - 1 - b);
  if (nearly_diagonal(u)) {
    for (long i = 0; i < dim; ++i) {
      const int da = static_cast<int>((i / sa) % 3);
      const int db = static_cast<int>((i / sb) % 3);
      psi[i] *= u(3 * da + db, 3 * da + db);
    }
    return;
  }
  cx amp[9];
  for (long i = 0; i < dim; ++i) {
    if ((i / sa) % 3 != 0 || (i / sb) % 3 != 0) continue;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) amp[3 * p + q] = psi[i + p * sa + q * sb];
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        cx acc = 0.0;
        const int row = 3 * p + q;
        for (int col = 0; col < 9; ++col) acc += u(row, col) * amp[col];
        psi[i + p * sa + q * sb] = acc;
      }
  }
}

}  // namespace

void apply_gate(CVector& psi, const GateSpec& g, int n_sites) {
  if (psi.size() != pow3(n_sites)) throw InvalidArgumentError("apply_gate: dimension mismatch");
  if (g.targets.size() == 1) {
    apply_single_site(psi, materialize(g), g.targets[0], n_sites);
    return;
  }
  if (g.targets.size() != 2) throw InvalidArgumentError("apply_gate: bad target count");
  if (g.kind == GateKind::csum) {
    apply_csum(psi, g.targets[0], g.targets[1], n_sites);
    return;
  }
  apply_two_site(psi, materialize(g), g.targets[0], g.targets[1], n_sites);
}

CVector simulate(const Circuit& c, const CVector& psi0) {
  if (psi0.size() != pow3(c.n_sites)) throw InvalidArgumentError("simulate: dimension mismatch");
  CVector psi = psi0;
  for (const auto& g : c.gates) apply_gate(psi, g, c.n_sites);
  return psi;
}

std::vector<CVector> simulate_steps(const Circuit& c, const CVector& psi0) {
  if (psi0.size() != pow3(c.n_sites)) throw InvalidArgumentError("simulate_steps: dimension mismatch");
  std::vector<CVector> out;
  out.reserve(c.step_marks.size());
  CVector psi = psi0;
  size_t next_mark = 0;
  for (size_t i = 0; i <= c.gates.size(); ++i) {
    while (next_mark < c.step_marks.size() &&
           c.step_marks[next_mark] == static_cast<int>(i)) {
      out.push_back(psi);
      ++next_mark;
    }
    if (i < c.gates.size()) apply_gate(psi, c.gates[i], c.n_sites);
  }
  return out;
}

ResourceReport count_resources(const TrotterPlan& plan, QubitTopology topology) {
  TrotterPlan one = plan;
  one.n_steps = 1;
  const Circuit c = build_trotter_circuit(one);

  ResourceReport r;
  r.steps = plan.n_steps;
  for (const auto& g : c.gates) {
    if (is_entangling(g.kind))
      ++r.qutrit_entangling_per_step;
    else
      ++r.qutrit_single_per_step;
  }
  const long n = plan.params.n_sites;
  const long n_mz = n, n_mx = n, n_mzz = n - 1;
  r.qubit_cnot_a2a_per_step = 12 * n_mzz + 2 * n_mx;
  r.qubit_cnot_heavy_hex_per_step = 30 * n_mzz + 2 * n_mx;
  r.qubit_single_per_step = 1 * n_mz + 16 * n_mx + 73 * n_mzz;
  (void)topology;  // both columns reported; topology selects the headline count

  r.qutrit_entangling_total = r.qutrit_entangling_per_step * plan.n_steps;
  r.qutrit_single_total = r.qutrit_single_per_step * plan.n_steps;
  r.qubit_cnot_a2a_total = r.qubit_cnot_a2a_per_step * plan.n_steps;
  r.qubit_cnot_heavy_hex_total = r.qubit_cnot_heavy_hex_per_step * plan.n_steps;
  r.qubit_single_total = r.qubit_single_per_step * plan.n_steps;
  return r;
}

std::string circuit_to_text(const Circuit& c) {
  std::ostringstream os;
  os.precision(17);
  os << "qutrits " << c.n_sites << "\n";
  size_t next_mark = 0;
  for (size_t i = 0; i <= c.gates.size(); ++i) {
    while (next_mark < c.step_marks.size() &&
           c.step_marks[next_mark] == static_cast<int>(i)) {
      os << "step\n";
      ++next_mark;
    }
    if (i == c.gates.size()) break;
    const auto& g = c.gates[i];
    os << gate_kind_name(g.kind);
    if (has_angle(g.kind)) os << " " << g.angle;
    if (g.kind == GateKind::weyl) os << " " << g.k << " " << g.l;
    if (g.kind == GateKind::custom) {
      os << " " << g.matrix.rows();
      for (long r = 0; r < g.matrix.rows(); ++r)
        for (long col = 0; col < g.matrix.cols(); ++col)
          os << " " << g.matrix(r, col).real() << " " << g.matrix(r, col).imag();
    }
    for (int t : g.targets) os << " " << t;
    os << "\n";
  }
  return os.str();
}

Circuit circuit_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  Circuit c;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "qutrits") {
      ls >> c.n_sites;
      have_header = true;
      continue;
    }
    if (!have_header) throw InvalidArgumentError("circuit_from_text: missing qutrits header");
    if (tok == "step") {
      c.step_marks.push_back(static_cast<int>(c.gates.size()));
      continue;
    }
    const GateKind kind = gate_kind_from_name(tok);
    GateSpec g;
    g.kind = kind;
    if (has_angle(kind)) ls >> g.angle;
    if (kind == GateKind::weyl) ls >> g.k >> g.l;
    if (kind == GateKind::custom) {
      long d = 0;
      ls >> d;
      if (d != 3 && d != 9) throw InvalidArgumentError("circuit_from_text: bad custom dim");
      g.matrix.resize(d, d);
      for (long r = 0; r < d; ++r)
        for (long col = 0; col < d; ++col) {
          double re, im;
          ls >> re >> im;
          g.matrix(r, col) = cx(re, im);
        }
    }
    int t;
    while (ls >> t) g.targets.push_back(t);
    if (!ls.eof() && ls.fail()) throw InvalidArgumentError("circuit_from_text: parse error: " + line);
    c.append(std::move(g));
  }
  return c;
}

}  // namespace ahmsim
