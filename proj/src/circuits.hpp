#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gates.hpp"
#include "model.hpp"

namespace ahmsim {

struct Circuit {
  int n_sites = 1;
  std::vector<GateSpec> gates;
  // Gate indices of entangling gates; each forms one twirling cycle.
  std::vector<int> cycles;
  // Gate index just past the end of each Trotter step (empty for ad hoc circuits).
  std::vector<int> step_marks;

  void append(GateSpec g);
  void rebuild_cycles();
};

// Fragment plus the physically defined reference unitary it approximates.
struct Fragment {
  std::vector<GateSpec> gates;  // time order
  CMatrix reference;            // 3x3 or 9x9
};

// M_z(theta) = exp(-i theta Lz^2); exact up to a global phase.
Fragment decompose_mz(double theta, int site);
// M_x(phi) = exp(+i phi Lx); two-subspace split, O(phi^2) error.
Fragment decompose_mx(double phi, int site);
// M_zz(gamma) = exp(+i gamma Lz (x) Lz); exact.
Fragment decompose_mzz(double gamma, int control, int target);

struct TrotterPlan {
  ModelParams params;
  double dt = 0.1;   // dimensionless step
  int n_steps = 1;

  double theta(int site) const;  // boundary sites get (kappa+beta)/2 dt
  double phi() const;
  double gamma() const;
};

Circuit build_trotter_circuit(const TrotterPlan& plan);

// Statevector simulation via per-site tensor contraction.
void apply_gate(CVector& psi, const GateSpec& g, int n_sites);
CVector simulate(const Circuit& c, const CVector& psi0);
// States after each step mark (requires step_marks).
std::vector<CVector> simulate_steps(const Circuit& c, const CVector& psi0);

enum class QubitTopology { all_to_all, heavy_hex };

struct ResourceReport {
  long steps = 0;
  // per Trotter step
  long qutrit_entangling_per_step = 0;
  long qutrit_single_per_step = 0;
  long qubit_cnot_a2a_per_step = 0;
  long qubit_cnot_heavy_hex_per_step = 0;
  long qubit_single_per_step = 0;
  // totals over the plan
  long qutrit_entangling_total = 0;
  long qutrit_single_total = 0;
  long qubit_cnot_a2a_total = 0;
  long qubit_cnot_heavy_hex_total = 0;
  long qubit_single_total = 0;
};

// Qubit-side constants are fixed data from the transpiled decompositions:
// M_z {0 CNOT, 1 single}, M_x {2 CNOT, 16 single}, M_zz {12 CNOT all-to-all,
// 30 CNOT heavy-hex, 73 single}.
ResourceReport count_resources(const TrotterPlan& plan, QubitTopology topology);

// Line-oriented text format, one gate per line.
std::string circuit_to_text(const Circuit& c);
Circuit circuit_from_text(const std::string& text);

}  // namespace ahmsim
