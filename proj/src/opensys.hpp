#pragma once

#include <functional>
#include <vector>

#include "linalg.hpp"
#include "pulse.hpp"

namespace ahmsim {

struct LindbladSpec {
  std::vector<CMatrix> jump_ops;
  std::vector<double> rates;  // 1/s, nonnegative

  void validate() const;
  long dim() const { return jump_ops.empty() ? 0 : jump_ops.front().rows(); }
};

// Decay (|0><1|, |1><2|) and pure dephasing (|1><1|, |2><2|) channels from
// T1/T2 pairs. Throws ConfigError when a dephasing rate comes out negative,
// naming the violated pair.
LindbladSpec jump_ops_from_coherence(const TransmonSpec& spec);

// Per-site embedding of two single-qutrit channel sets.
LindbladSpec embed_pair(const LindbladSpec& a, const LindbladSpec& b);

// Column-stacking superoperator of the Lindblad generator.
CMatrix liouvillian_matrix(const CMatrix& h, const LindbladSpec& spec);

// dr/dt evaluated directly (used for large dimensions and H(t)).
CMatrix lindblad_rhs(const CMatrix& h, const LindbladSpec& spec, const CMatrix& rho);

struct LindbladResult {
  std::vector<double> times;
  std::vector<std::vector<double>> lz;   // [time][site]
  std::vector<std::vector<double>> lz2;
  std::vector<CMatrix> rho;              // optional snapshots
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double max_purity = 0.0;
};

struct LindbladOptions {
  bool keep_states = false;
  int n_sites = 1;  // qutrit sites for per-site observables
  double atol = 1e-10, rtol = 1e-10;
};

LindbladResult lindblad_evolve(const CMatrix& h, const LindbladSpec& spec, const CMatrix& rho0,
                               const std::vector<double>& times, const LindbladOptions& opt = {});

LindbladResult lindblad_evolve_td(const std::function<CMatrix(double)>& h_of_t,
                                  const LindbladSpec& spec, const CMatrix& rho0,
                                  const std::vector<double>& times,
                                  const LindbladOptions& opt = {});

// Effective averaged Liouvillian of the pi02-toggled evolution:
// L_eff = 1/2 (L[H, {L_a}] + L[U^+ H U, {U^+ L_a U}]).
CMatrix averaged_liouvillian(const CMatrix& h_bar, const LindbladSpec& spec, const CMatrix& u02);

// Propagation under a fixed superoperator matrix.
LindbladResult superop_evolve(const CMatrix& liouvillian, const CMatrix& rho0,
                              const std::vector<double>& times, const LindbladOptions& opt = {});

}  // namespace ahmsim
