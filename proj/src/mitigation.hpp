#pragma once

#include <array>
#include <optional>
#include <vector>

#include "circuits.hpp"
#include "rng.hpp"

namespace ahmsim {

// Noise attached after each entangling cycle of a two-qutrit circuit.
struct NoiseChannel {
  enum class Kind { unitary, weyl_stochastic, depolarizing, composite };
  Kind kind = Kind::depolarizing;
  CMatrix unitary;                   // 9x9, Kind::unitary
  std::vector<double> weyl_weights;  // 81 weights over two-qutrit Weyl pairs
  double lambda = 1.0;               // Kind::depolarizing
  std::vector<NoiseChannel> parts;   // Kind::composite, applied in order

  void validate() const;
  static NoiseChannel depolarizing(double lambda);
  static NoiseChannel coherent_overrotation(const CMatrix& generator, double angle);
  static NoiseChannel weyl(const std::vector<double>& weights);
  static NoiseChannel composite_of(std::vector<NoiseChannel> parts);
};

void apply_noise(CMatrix& rho, const NoiseChannel& noise);

// Column-stochastic per-qutrit readout confusion.
struct ConfusionMatrix {
  Eigen::Matrix3d m;  // m(measured, true)
  void validate() const;
  static ConfusionMatrix identity();
  static ConfusionMatrix symmetric(double error);  // off-diagonal error/2 each
};

// Tensor lift to n sites.
Eigen::MatrixXd lift_confusion(const std::vector<ConfusionMatrix>& per_site);

// Randomized compiling: per twirl, independent random Weyls before each
// entangling cycle with conjugated corrections after; each twirled circuit
// equals the original up to a global phase.
std::vector<Circuit> randomized_compile(const Circuit& c, int n_twirls, uint64_t seed);

// Full unitary of a small circuit (n_sites <= 4).
CMatrix circuit_unitary(const Circuit& c);

// Density-matrix propagation with noise after each entangling cycle.
CMatrix run_noisy_circuit(const Circuit& c, const CMatrix& rho0,
                          const std::optional<NoiseChannel>& noise);

// Cycle benchmarking of a two-qutrit Clifford cycle.
struct CbChannelFit {
  std::array<int, 4> weyl;  // (k1, l1, k2, l2)
  double a = 0.0;           // SPAM parameter
  double p = 0.0;           // decay per cycle
  double sigma_p = 0.0;
};

struct CbResult {
  std::vector<CbChannelFit> channels;
  double lambda_hat = 0.0;   // mean decay
  double sigma_lambda = 0.0;
};

struct CbOptions {
  std::vector<int> lengths = {2, 4, 8, 16};
  int n_sequences = 8;       // random twirl sequences per length
  long shots = 1024;         // per sequence
  int n_channels = 9;        // tracked Weyl channels (random non-identity)
  uint64_t seed = 1;
};

CbResult cycle_benchmark(const GateSpec& cycle_gate, const NoiseChannel& noise,
                         const CbOptions& opt);

// Traceless-observable rescaling by lambda^n_cycles with multiplicative
// uncertainty propagation; flags corrections below the reliability floor.
struct PurifiedValue {
  double value = 0.0;
  double sigma = 0.0;
  bool unreliable = false;
};
PurifiedValue purify_expectation(double raw, double sigma_raw, double lambda_hat,
                                 int n_cycles, double floor = 0.05);

// Multinomial sampling with a seeded generator.
std::vector<long> sample_shots(const std::vector<double>& probabilities, long n_shots,
                               uint64_t seed);

// Confusion-matrix inversion with clip-and-renormalize; pre-clip values kept.
struct ReadoutMitigated {
  std::vector<double> probabilities;  // clipped + renormalized
  std::vector<double> raw_inverted;   // before clipping
};
ReadoutMitigated mitigate_readout(const std::vector<long>& counts,
                                  const Eigen::MatrixXd& confusion);

// Weyl transfer matrix R(E)_{vw} = tr(W_v^+ E(W_w)) / 9 of a two-qutrit map.
Eigen::MatrixXcd weyl_transfer_matrix(const std::function<CMatrix(const CMatrix&)>& channel);

CMatrix weyl2(int k1, int l1, int k2, int l2);

}  // namespace ahmsim
