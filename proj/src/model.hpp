#pragma once

#include <vector>

#include "linalg.hpp"

namespace ahmsim {

// Couplings are dimensionless angular values: a config entry "kappa/2pi = 1"
// stores kappa = 2*pi. Physical energies are obtained by multiplying with the
// scale frequency t_s^{-1} (Hz), physical time by dividing model time by it.
struct ModelParams {
  double kappa = 0.0;
  double chi = 0.0;
  double beta = 0.0;
  int n_sites = 1;
  double scale_freq = 0.0;  // t_s^{-1} in Hz; 0 means unset

  void validate() const;
};

// 3x3 spin-1 operators in transmon ordering |0>,|1>,|2>  (m = +1, 0, -1).
struct SpinOperators {
  CMatrix lz;      // diag(1, 0, -1)
  CMatrix lz2;     // diag(1, 0, 1)
  CMatrix fplus;   // |0><1| + |1><2|
  CMatrix fminus;  // |1><0| + |2><1|
  CMatrix fx;      // (F+ + F-)/2
  CMatrix lx;      // sqrt(2) Fx
  CMatrix pi02;    // |0><2| + |1><1| + |2><0|
};

const SpinOperators& spin_ops();

// Dense operators are capped at 3^8; larger chains go through AhmOperator.
constexpr int kDenseSiteCap = 8;
long model_dim(int n_sites);

// H = (kappa/2) sum Lz_k^2 - chi sum Fx_k + (beta/2) sum (Lz_{k+1}-Lz_k)^2,
// open boundaries. Throws CapacityError above the dense cap.
CMatrix build_hamiltonian(const ModelParams& p);

// Boundary-site Hamiltonian ((kappa+beta)/2) Lz^2 - (chi/sqrt(2)) Lx.
CMatrix single_site_hamiltonian(const ModelParams& p);

// Q^k = Lz^{(k-1)} - Lz^{(k)} with fictitious edge sites held at <Lz> = 0.
CMatrix charge_observable(int site, int n_sites);

// Matrix-free application of the model Hamiltonian (any n_sites).
class AhmOperator {
 public:
  explicit AhmOperator(const ModelParams& p);
  long dim() const { return dim_; }
  void apply(const CVector& in, CVector& out) const;

 private:
  ModelParams p_;
  long dim_;
  std::vector<double> diag_;  // kappa and beta terms
};

struct ObservableSeries {
  std::vector<double> times;  // model time
  // [time][site]
  std::vector<std::vector<double>> lz;
  std::vector<std::vector<double>> lz2;
  std::vector<std::vector<double>> charge;
};

// Per-site <Lz>, <Lz^2> of a product-basis state vector, plus charges.
std::vector<double> site_lz(const CVector& psi, int n_sites);
std::vector<double> site_lz2(const CVector& psi, int n_sites);
std::vector<double> charges_from_lz(const std::vector<double>& lz);

// psi(t) = exp(-i H t) psi0 at the given model times. Dense diagonalization
// up to 3^6, matrix-free adaptive integration beyond.
ObservableSeries exact_evolution(const ModelParams& p, const CVector& psi0,
                                 const std::vector<double>& times);

// Basis state |d_0 d_1 ... d_{n-1}> with site 0 leftmost (most significant).
CVector basis_state(const std::vector<int>& digits);
CVector basis_state(const std::string& digits);

}  // namespace ahmsim
