#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>

#include "fixtures.hpp"
#include "model.hpp"
#include "opensys.hpp"
#include "oracles.hpp"

using namespace ahmsim;
using namespace ahmsim::fixtures;

TEST_CASE("jump operators from coherence times") {
  SUBCASE("paper QB values") {
    const LindbladSpec spec = jump_ops_from_coherence(transmon_qb());
    // gamma_11 = 1/36 - 1/52 per microsecond
    const double g11 = 1.0 / 36e-6 - 1.0 / 52e-6;
    bool found = false;
    for (size_t i = 0; i < spec.jump_ops.size(); ++i)
      if (std::abs(spec.jump_ops[i](1, 1).real() - 1.0) < 1e-12 &&
          spec.jump_ops[i].cwiseAbs().sum() == 1.0) {
        CHECK(spec.rates[i] == doctest::Approx(g11).epsilon(1e-12));
        CHECK(spec.rates[i] * 1e-6 == doctest::Approx(8.55e-3).epsilon(0.01));
        found = true;
      }
    CHECK(found);
  }
  SUBCASE("T2 = 2 T1 has no dephasing channels") {
    TransmonSpec t = transmon_qb();
    t.t2_01 = 2.0 * t.t1_01;
    t.t2_12 = 2.0 * t.t1_12;
    const LindbladSpec spec = jump_ops_from_coherence(t);
    CHECK(spec.jump_ops.size() == 2);  // only the two decay channels
  }
  SUBCASE("infinite times give an empty dissipator") {
    TransmonSpec t = transmon_qb();
    const double inf = std::numeric_limits<double>::infinity();
    t.t1_01 = t.t2_01 = t.t1_12 = t.t2_12 = inf;
    const LindbladSpec spec = jump_ops_from_coherence(t);
    CHECK(spec.jump_ops.empty());
  }
  SUBCASE("negative dephasing rate is a config error") {
    TransmonSpec t = transmon_qb();
    t.t2_01 = 3.0 * t.t1_01;
    CHECK_THROWS_AS(jump_ops_from_coherence(t), ConfigError);
  }
}

TEST_CASE("lindblad evolution limits") {
  Rng rng(71);
  const CMatrix h = kTwoPi * 1e5 * oracle::random_hermitian(rng, 3);
  const CVector psi0 = oracle::random_state(rng, 3);
  const CMatrix rho0 = psi0 * psi0.adjoint();
  std::vector<double> times = {0.0, 2e-6, 5e-6, 9e-6};

  SUBCASE("no dissipation matches unitary evolution") {
    LindbladSpec none;
    const LindbladResult r = lindblad_evolve(h, none, rho0, times);
    const CVector psi = expm_minus_i_ht(h, times.back()) * psi0;
    CHECK(std::abs(r.lz.back()[0] - expect(spin_ops().lz, psi)) < 1e-8);
    CHECK(r.max_trace_drift < 1e-9);
  }
  SUBCASE("pure decay rate equation") {
    LindbladSpec spec;
    CMatrix l10 = CMatrix::Zero(3, 3);
    l10(0, 1) = 1.0;
    spec.jump_ops = {l10};
    const double gamma = 1.0 / 20e-6;
    spec.rates = {gamma};
    const CVector e1 = basis_state("1");
    LindbladOptions opt;
    opt.keep_states = true;
    const LindbladResult r =
        lindblad_evolve(CMatrix::Zero(3, 3), spec, e1 * e1.adjoint(), times, opt);
    for (size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(r.rho[i](1, 1).real() - std::exp(-gamma * times[i])) < 1e-8);
      CHECK(std::abs(r.rho[i](0, 0).real() - (1.0 - std::exp(-gamma * times[i]))) < 1e-8);
    }
  }
  SUBCASE("trajectory invariants hold under damped driving") {
    const LindbladSpec spec = jump_ops_from_coherence(transmon_qb());
    ModelParams p;
    p.kappa = kTwoPi;
    p.chi = kTwoPi;
    p.n_sites = 1;
    p.scale_freq = 1e6;
    const CMatrix hd = p.scale_freq * single_site_hamiltonian(p);
    const CVector e2 = basis_state("2");
    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(i * 0.4e-6);
    const LindbladResult r = lindblad_evolve(hd, spec, e2 * e2.adjoint(), ts);
    CHECK(r.max_trace_drift < 1e-9);
    CHECK(r.min_eigenvalue > -1e-9);
    CHECK(r.max_purity < 1.0 + 1e-9);
    // oscillation is damped on the microsecond scale
    CHECK(std::abs(r.lz.back()[0]) < 0.9);
  }
}

TEST_CASE("averaged liouvillian") {
  const auto& s = spin_ops();
  const CMatrix u02_1 = s.pi02;

  SUBCASE("identity frame returns the plain liouvillian") {
    const LindbladSpec spec = jump_ops_from_coherence(transmon_qb());
    const CMatrix h = kTwoPi * 1e5 * s.lz2;
    const CMatrix a = averaged_liouvillian(h, spec, CMatrix::Identity(3, 3));
    const CMatrix b = liouvillian_matrix(h, spec);
    CHECK(max_abs(a - b) < 1e-12 * max_abs(b));
  }
  SUBCASE("toggled decay chain is reversed") {
    CMatrix l10 = CMatrix::Zero(3, 3);
    l10(0, 1) = 1.0;
    const CMatrix toggled = u02_1.adjoint() * l10 * u02_1;
    CMatrix want = CMatrix::Zero(3, 3);
    want(2, 1) = 1.0;  // |2><1|
    CHECK(max_abs(toggled - want) == 0.0);
  }
  SUBCASE("trace is preserved by the averaged generator") {
    Rng rng(73);
    const LindbladSpec pair =
        embed_pair(jump_ops_from_coherence(transmon_qa()), jump_ops_from_coherence(transmon_qb()));
    const CMatrix h = kTwoPi * 1e5 * oracle::random_hermitian(rng, 9);
    const CMatrix leff = averaged_liouvillian(h, pair, kron(u02_1, u02_1));
    // Tr(L(rho)) = 0 for random rho
    const CMatrix m = oracle::random_complex(rng, 9, 9);
    const CMatrix rho = (m * m.adjoint()) / (m * m.adjoint()).trace();
    CVector v = Eigen::Map<const CVector>(rho.data(), 81);
    const CVector dv = leff * v;
    const CMatrix drho = Eigen::Map<const CMatrix>(dv.data(), 9, 9);
    CHECK(std::abs(drho.trace()) < 1e-12 * max_abs(leff));
  }
  SUBCASE("stepwise vs averaged error quarters when T_E halves") {
    const LindbladSpec pair =
        embed_pair(jump_ops_from_coherence(transmon_qa()), jump_ops_from_coherence(transmon_qb()));
    Rng rng(79);
    const CMatrix h = kTwoPi * 3e4 * oracle::random_hermitian(rng, 9);
    const CMatrix u02 = kron(u02_1, u02_1);
    const CMatrix l = liouvillian_matrix(h, pair);
    LindbladSpec toggled;
    toggled.rates = pair.rates;
    for (const auto& j : pair.jump_ops) toggled.jump_ops.push_back(u02.adjoint() * j * u02);
    const CMatrix lt = liouvillian_matrix(u02.adjoint() * h * u02, toggled);
    const CMatrix leff = averaged_liouvillian(h, pair, u02);

    const CVector psi0 = basis_state("21");
    const CMatrix rho0 = psi0 * psi0.adjoint();
    const CVector v0 = Eigen::Map<const CVector>(rho0.data(), 81);

    const auto err_at = [&](double t_e) {
      const CMatrix step = ((t_e * lt).exp() * (t_e * l).exp()).eval();
      const CMatrix avg = ((2.0 * t_e) * leff).exp();
      return ((step - avg) * v0).norm();
    };
    const double e1 = err_at(800e-9);
    const double e2 = err_at(400e-9);
    CHECK(e2 / e1 > 0.15);
    CHECK(e2 / e1 < 0.35);  // quarters within tolerance
  }
}

TEST_CASE("time-dependent lindblad path (27-dim direct RHS)") {
  // three-qutrit direct evaluation stays trace preserving
  const LindbladSpec one = jump_ops_from_coherence(transmon_qb());
  LindbladSpec three;
  const CMatrix id = CMatrix::Identity(3, 3);
  for (size_t i = 0; i < one.jump_ops.size(); ++i) {
    three.jump_ops.push_back(kron(kron(one.jump_ops[i], id), id));
    three.rates.push_back(one.rates[i]);
  }
  const CVector psi0 = basis_state("101");
  const CMatrix rho0 = psi0 * psi0.adjoint();
  ModelParams p;
  p.kappa = kTwoPi;
  p.chi = kTwoPi;
  p.beta = kTwoPi;
  p.n_sites = 3;
  const CMatrix h = 1e5 * build_hamiltonian(p);
  LindbladOptions opt;
  opt.n_sites = 3;
  const LindbladResult r =
      lindblad_evolve_td([&](double) { return h; }, three, rho0, {0.0, 1e-6, 2e-6}, opt);
  CHECK(r.max_trace_drift < 1e-8);
  CHECK(r.min_eigenvalue > -1e-8);
}
