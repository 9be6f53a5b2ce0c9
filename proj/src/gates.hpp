#pragma once

#include <string>
#include <vector>

#include "linalg.hpp"

namespace ahmsim {

// Single-qutrit gate algebra: Gell-Mann subspace rotations, clock/shift/
// Hadamard, Weyl operators, and the two-qutrit CSUM/CZ Cliffords.

enum class GateKind {
  rx01, ry01, rz01,
  rx12, ry12, rz12,
  rx02, ry02, rz02,
  x3, z3, h3,
  csum, cz,
  weyl,
  pi02,
  custom,
};

const char* gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);
bool is_entangling(GateKind k);
bool has_angle(GateKind k);

struct GateSpec {
  GateKind kind = GateKind::custom;
  double angle = 0.0;         // subspace rotations only
  int k = 0, l = 0;           // weyl indices
  std::vector<int> targets;   // one or two site indices
  CMatrix matrix;             // custom gates (3x3 or 9x9)
};

GateSpec single_gate(GateKind kind, int site);
GateSpec rotation_gate(GateKind kind, double angle, int site);
GateSpec weyl_gate(int k, int l, int site);
GateSpec csum_gate(int control, int target);
GateSpec cz_gate(int a, int b);
GateSpec custom_gate(const CMatrix& u, const std::vector<int>& targets);

// Subspace generators per the Gell-Mann identifications; z12 is the
// non-orthogonal diag(-1, 0, 1) combination.
const CMatrix& sigma(GateKind rotation_kind);

// The local unitary of a gate: 3x3 for single-site kinds, 9x9 for csum/cz
// (first target is the control).
CMatrix materialize(const GateSpec& g);

// omega = exp(2 pi i / 3); W_{k,l} = omega^{-kl/2} Z^k X^l with
// omega^{1/2} := exp(i pi / 3).
cx omega_root();
CMatrix weyl(int k, int l);

struct WeylLabel {
  int k = 0, l = 0;
};

// Conjugation of a tensor product of per-site Weyls by a Clifford gate g:
// g (W_1 x ... x W_n) g^+ = phase * (W_1' x ... x W_n'). Throws CliffordError
// when the result is not a Weyl product within tolerance.
struct WeylConjugation {
  std::vector<WeylLabel> out;
  cx phase;
};
WeylConjugation conjugate_weyls(const CMatrix& g, const std::vector<WeylLabel>& in,
                                double tol = 1e-10);

}  // namespace ahmsim
