#include "doctest.h"

#include "fixtures.hpp"
#include "mitigation.hpp"
#include "oracles.hpp"

using namespace ahmsim;

namespace {

Circuit small_trotter(int steps) {
  TrotterPlan plan;
  plan.params.kappa = kTwoPi;
  plan.params.chi = kTwoPi;
  plan.params.beta = kTwoPi;
  plan.params.n_sites = 2;
  plan.dt = 0.3;
  plan.n_steps = steps;
  return build_trotter_circuit(plan);
}

double phase_free_distance(const CMatrix& a, const CMatrix& b) {
  long bi = 0, bj = 0;
  double best = 0.0;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > best) {
        best = std::abs(a(i, j));
        bi = i;
        bj = j;
      }
  const cx phase = b(bi, bj) / a(bi, bj);
  return max_abs(a * phase - b);
}

}  // namespace

TEST_CASE("randomized_compile preserves the circuit unitary") {
  const Circuit c = small_trotter(1);
  const CMatrix u_ref = circuit_unitary(c);
  const auto twirls = randomized_compile(c, 8, 12345);
  CHECK(twirls.size() == 8);
  for (const auto& tc : twirls) {
    CHECK(tc.gates.size() == c.gates.size() + 4 * c.cycles.size());
    CHECK(phase_free_distance(circuit_unitary(tc), u_ref) < 1e-10);
  }
  // distinct seeds draw distinct twirls
  const auto other = randomized_compile(c, 1, 999);
  bool same = other[0].gates.size() == twirls[0].gates.size();
  if (same) {
    bool identical = true;
    for (size_t i = 0; i < other[0].gates.size(); ++i) {
      identical &= other[0].gates[i].kind == twirls[0].gates[i].kind &&
                   other[0].gates[i].k == twirls[0].gates[i].k &&
                   other[0].gates[i].l == twirls[0].gates[i].l;
    }
    CHECK_FALSE(identical);
  }
}

TEST_CASE("exact 81-twirl average is Weyl diagonal") {
  const CMatrix gen = kron(spin_ops().lz, spin_ops().lz2) + kron(spin_ops().lx, spin_ops().lz);
  const NoiseChannel noise = NoiseChannel::composite_of(
      {NoiseChannel::coherent_overrotation(gen, 0.4), NoiseChannel::depolarizing(0.85)});

  const auto twirled = [&](const CMatrix& rho_in) {
    CMatrix acc = CMatrix::Zero(9, 9);
    for (int k1 = 0; k1 < 3; ++k1)
      for (int l1 = 0; l1 < 3; ++l1)
        for (int k2 = 0; k2 < 3; ++k2)
          for (int l2 = 0; l2 < 3; ++l2) {
            const CMatrix b = weyl2(k1, l1, k2, l2);
            CMatrix rho = b * rho_in * b.adjoint();
            apply_noise(rho, noise);
            acc += b.adjoint() * rho * b;
          }
    return (acc / 81.0).eval();
  };
  const Eigen::MatrixXcd r = weyl_transfer_matrix(twirled);
  double offdiag = 0.0;
  for (int i = 0; i < 81; ++i)
    for (int j = 0; j < 81; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(r(i, j)));
  CHECK(offdiag < 1e-10);
}

TEST_CASE("30-sample twirl average is approximately Weyl diagonal") {
  const CMatrix gen = kron(spin_ops().lz, spin_ops().lz);
  const NoiseChannel noise = NoiseChannel::coherent_overrotation(gen, 0.1);
  Rng rng(31);
  const auto twirled = [&](const CMatrix& rho_in) {
    CMatrix acc = CMatrix::Zero(9, 9);
    Rng local(555);
    for (int s = 0; s < 30; ++s) {
      const CMatrix b = weyl2(local.uniform_int(0, 2), local.uniform_int(0, 2),
                              local.uniform_int(0, 2), local.uniform_int(0, 2));
      CMatrix rho = b * rho_in * b.adjoint();
      apply_noise(rho, noise);
      acc += b.adjoint() * rho * b;
    }
    return (acc / 30.0).eval();
  };
  const Eigen::MatrixXcd r = weyl_transfer_matrix(twirled);
  double offdiag = 0.0;
  for (int i = 0; i < 81; ++i)
    for (int j = 0; j < 81; ++j)
      if (i != j) offdiag = std::max(offdiag, std::abs(r(i, j)));
  CHECK(offdiag < 1e-1);
  (void)rng;
}

TEST_CASE("cycle benchmarking decays") {
  CbOptions opt;
  opt.seed = 77;
  SUBCASE("noiseless cycle fits p = 1") {
    opt.shots = 4096;
    const CbResult r = cycle_benchmark(csum_gate(0, 1), NoiseChannel::depolarizing(1.0), opt);
    CHECK(r.lambda_hat == doctest::Approx(1.0).epsilon(0.01));
  }
  SUBCASE("pure depolarizing noise fits p = lambda within 1%") {
    opt.shots = 20000;
    opt.n_sequences = 5;
    const double lambda = 0.9;
    const CbResult r = cycle_benchmark(csum_gate(0, 1), NoiseChannel::depolarizing(lambda), opt);
    CHECK(std::abs(r.lambda_hat - lambda) / lambda < 0.01);
  }
  SUBCASE("weyl-stochastic channel recovers the transfer eigenvalues") {
    // symmetric weights -> real transfer eigenvalues
    std::vector<double> w(81, 0.0);
    w[0] = 0.9;
    const int a = 27 * 1 + 9 * 0 + 3 * 0 + 0;   // Z on site A
    const int ai = 27 * 2 + 9 * 0 + 3 * 0 + 0;  // Z^2 on site A
    w[a] = w[ai] = 0.03;
    const int b = 9 * 1;   // X on site A
    const int bi = 9 * 2;  // X^2
    w[b] = w[bi] = 0.02;
    const NoiseChannel noise = NoiseChannel::weyl(w);

    opt.shots = 20000;
    opt.n_channels = 6;
    const CbResult r = cycle_benchmark(csum_gate(0, 1), noise, opt);
    const CMatrix g = circuit_unitary([] {
      Circuit c;
      c.n_sites = 2;
      c.append(csum_gate(0, 1));
      return c;
    }());
    for (const auto& ch : r.channels) {
      // eigenvalue oracle: the fitted decay follows the geometric mean of the
      // transfer eigenvalues over the cycle's Weyl orbit (CSUM^3 = I)
      std::vector<WeylLabel> frame = {{ch.weyl[0], ch.weyl[1]}, {ch.weyl[2], ch.weyl[3]}};
      double prod = 1.0;
      for (int step = 0; step < 3; ++step) {
        const auto adv = conjugate_weyls(g, frame);
        frame = adv.out;
        const CMatrix wop = weyl2(frame[0].k, frame[0].l, frame[1].k, frame[1].l);
        CMatrix img = wop;
        apply_noise(img, noise);
        prod *= ((wop.adjoint() * img).trace() / 9.0).real();
      }
      const double eig = std::cbrt(prod);
      CHECK(std::abs(ch.p - eig) < std::max(3.0 * ch.sigma_p, 0.025));
    }
  }
}

TEST_CASE("purification") {
  CHECK(purify_expectation(0.5, 0.01, 1.0, 4).value == doctest::Approx(0.5));
  const PurifiedValue v = purify_expectation(0.4, 0.01, 0.9, 6);
  CHECK(v.value == doctest::Approx(0.4 / std::pow(0.9, 6)));
  CHECK(v.sigma == doctest::Approx(0.01 / std::pow(0.9, 6)));
  CHECK_FALSE(v.unreliable);
  CHECK(purify_expectation(0.1, 0.01, 0.01, 2).unreliable);  // 1e-4 < 0.05
}

TEST_CASE("shot sampling and readout mitigation") {
  SUBCASE("reproducible counts") {
    std::vector<double> p = {0.2, 0.5, 0.3};
    const auto c1 = sample_shots(p, 5000, 42);
    const auto c2 = sample_shots(p, 5000, 42);
    CHECK(c1 == c2);
    long total = 0;
    for (long c : c1) total += c;
    CHECK(total == 5000);
  }
  SUBCASE("identity confusion changes nothing") {
    const auto lift = lift_confusion({ConfusionMatrix::identity()});
    const auto m = mitigate_readout({100, 300, 600}, lift);
    CHECK(m.probabilities[0] == doctest::Approx(0.1));
    CHECK(m.probabilities[2] == doctest::Approx(0.6));
  }
  SUBCASE("known confusion inverted exactly on exact counts") {
    const ConfusionMatrix c = ConfusionMatrix::symmetric(0.06);
    const auto lift = lift_confusion({c});
    Eigen::Vector3d truth(0.25, 0.35, 0.40);
    const Eigen::Vector3d confused = lift * truth;
    // use large integer counts proportional to the confused distribution
    std::vector<long> counts;
    for (int i = 0; i < 3; ++i) counts.push_back(std::lround(confused(i) * 1e9));
    const auto m = mitigate_readout(counts, lift);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(m.probabilities[i] - truth(i)) < 1e-7);
  }
  SUBCASE("sampled misread recovered within 3 sigma") {
    const ConfusionMatrix c = ConfusionMatrix::symmetric(0.02);
    const auto lift = lift_confusion({c});
    Eigen::Vector3d truth(0.6, 0.3, 0.1);
    const Eigen::Vector3d confused = lift * truth;
    std::vector<double> probs(confused.data(), confused.data() + 3);
    const long shots = 100000;
    const auto counts = sample_shots(probs, shots, 7);
    const auto m = mitigate_readout(counts, lift);
    for (int i = 0; i < 3; ++i) {
      const double sigma = std::sqrt(truth(i) * (1.0 - truth(i)) / shots) * 1.1;
      CHECK(std::abs(m.probabilities[i] - truth(i)) < 3.5 * sigma + 1e-4);
    }
  }
  SUBCASE("singular confusion rejected") {
    Eigen::MatrixXd sing = Eigen::MatrixXd::Ones(3, 3) / 3.0;
    CHECK_THROWS_AS(mitigate_readout({10, 10, 10}, sing), InvalidArgumentError);
  }
}

TEST_CASE("noisy circuit propagation") {
  const Circuit c = small_trotter(2);
  const CVector psi0 = basis_state("21");
  const CMatrix rho0 = psi0 * psi0.adjoint();

  SUBCASE("identity channel matches the pure simulation") {
    const CMatrix rho = run_noisy_circuit(c, rho0, NoiseChannel::depolarizing(1.0));
    const CVector psi = simulate(c, psi0);
    CHECK(max_abs(rho - psi * psi.adjoint()) < 1e-12);
  }
  SUBCASE("depolarizing closed form on traceless observables") {
    const double lambda = 0.9;
    const CMatrix rho = run_noisy_circuit(c, rho0, NoiseChannel::depolarizing(lambda));
    const CVector psi = simulate(c, psi0);
    const CMatrix lz0 = kron(spin_ops().lz, CMatrix::Identity(3, 3));
    const double noisy = (rho * lz0).trace().real();
    const double clean = (psi.adjoint() * lz0 * psi)(0).real();
    const double factor = std::pow(lambda, static_cast<double>(c.cycles.size()));
    CHECK(noisy == doctest::Approx(clean * factor).epsilon(1e-10));
  }
}

TEST_CASE("RC + CB + purification recovers the noiseless expectation") {
  const Circuit c = small_trotter(2);
  const CVector psi0 = basis_state("21");
  const CMatrix rho0 = psi0 * psi0.adjoint();
  const int n_cycles = static_cast<int>(c.cycles.size());

  const NoiseChannel noise = NoiseChannel::composite_of(
      {NoiseChannel::coherent_overrotation(kron(spin_ops().lz, spin_ops().lz), 0.05),
       NoiseChannel::depolarizing(0.9)});

  CbOptions cb_opt;
  cb_opt.shots = 20000;
  cb_opt.seed = 11;
  const CbResult cb = cycle_benchmark(csum_gate(0, 1), noise, cb_opt);

  const auto twirls = randomized_compile(c, 30, 2024);
  const CMatrix lz0 = kron(spin_ops().lz, CMatrix::Identity(3, 3));
  std::vector<double> est;
  for (size_t tw = 0; tw < twirls.size(); ++tw) {
    const CMatrix rho = run_noisy_circuit(twirls[tw], rho0, noise);
    std::vector<double> probs(9);
    for (int i = 0; i < 9; ++i) probs[i] = std::max(rho(i, i).real(), 0.0);
    const auto counts = sample_shots(probs, 1024, derive_seed(5, tw));
    double lz = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        lz += counts[3 * a + b] / 1024.0 * spin_ops().lz(a, a).real();
    est.push_back(lz);
  }
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= est.size();
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  const double sem = std::sqrt(var / (est.size() - 1) / est.size());

  const PurifiedValue pur = purify_expectation(mean, sem, cb.lambda_hat, n_cycles);
  const CVector psi = simulate(c, psi0);
  const double clean = (psi.adjoint() * lz0 * psi)(0).real();
  CHECK(std::abs(pur.value - clean) < 2.0 * pur.sigma + 0.02);
}
