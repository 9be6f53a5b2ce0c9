#include "doctest.h"

#include "fixtures.hpp"
#include "interaction.hpp"
#include "model.hpp"
#include "oracles.hpp"

using namespace ahmsim;
using namespace ahmsim::fixtures;

namespace {

InteractionRates random_zeta(Rng& rng, double scale) {
  return InteractionRates(RateBasis::zeta,
                          {scale * rng.normal(), scale * rng.normal(),
                           scale * rng.normal(), scale * rng.normal()});
}

}  // namespace

TEST_CASE("basis conversions round trip exactly") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const InteractionRates z = random_zeta(rng, kTwoPi * 1e5);
    double scale = 0.0;
    for (double v : z.v) scale = std::max(scale, std::abs(v));
    for (RateBasis b : {RateBasis::alpha, RateBasis::z, RateBasis::zeta}) {
      const InteractionRates round = z.to(b).to(RateBasis::zeta);
      for (int i = 0; i < 4; ++i)
        CHECK(std::abs(round.v[i] - z.v[i]) <= 1e-14 * scale);
    }
  }
}

TEST_CASE("reconstructed H'_ck agrees between the z and zeta pictures") {
  Rng rng(23);
  const InteractionRates rates = random_zeta(rng, 1.0);
  const CMatrix h_zeta = interaction_hamiltonian(rates);
  const auto z = rates.to(RateBasis::z);
  const auto& s = spin_ops();
  CMatrix h_z = CMatrix::Zero(9, 9);
  h_z += z.v[0] * kron(s.lz, s.lz);
  h_z += z.v[1] * kron(s.lz, s.lz2);
  h_z += z.v[2] * kron(s.lz2, s.lz);
  h_z += z.v[3] * kron(s.lz2, s.lz2);
  CHECK(max_abs(h_zeta - h_z) < 1e-14);
}

TEST_CASE("DD average and U02 parity identities") {
  Rng rng(29);
  const auto& s = spin_ops();
  const CMatrix u02 = kron(s.pi02, s.pi02);
  for (int rep = 0; rep < 20; ++rep) {
    const InteractionRates rates = random_zeta(rng, 1.0);
    const CMatrix h = interaction_hamiltonian(rates);
    const CMatrix conj = u02 * h * u02;
    // conjugation flips z12, z21 only
    const auto z = rates.to(RateBasis::z);
    InteractionRates flipped(RateBasis::z, {z.v[0], -z.v[1], -z.v[2], z.v[3]});
    CHECK(max_abs(conj - interaction_hamiltonian(flipped)) < 1e-13);
    // the average keeps only z11 LzLz + z22 Lz2Lz2
    const CMatrix avg = 0.5 * (h + conj);
    const CMatrix target =
        z.v[0] * kron(s.lz, s.lz) + z.v[3] * kron(s.lz2, s.lz2);
    CHECK(max_abs(avg - target) < 1e-14 * std::max(1.0, max_abs(h)));
  }
}

TEST_CASE("bare perturbative rates") {
  SUBCASE("J = 0 gives zeros") {
    TransmonPairSpec p = rochester_pair();
    p.j = 0.0;
    const auto r = bare_rates_pt(p);
    for (double v : r.v) CHECK(v == 0.0);
  }
  SUBCASE("A<->B swap symmetry of the closed forms") {
    TransmonPairSpec p = rochester_pair();
    const auto r = bare_rates_pt(p);
    TransmonPairSpec swapped;
    swapped.a = p.b;
    swapped.b = p.a;
    swapped.j = p.j;
    const auto rs = bare_rates_pt(swapped);
    CHECK(rs.v[0] == doctest::Approx(r.v[0]).epsilon(1e-12));  // a11 invariant
    CHECK(rs.v[1] == doctest::Approx(r.v[2]).epsilon(1e-12));  // a12 <-> a21
    CHECK(rs.v[2] == doctest::Approx(r.v[1]).epsilon(1e-12));
    CHECK(rs.v[3] == doctest::Approx(r.v[3]).epsilon(1e-12));  // a22 invariant
  }
  SUBCASE("degenerate denominators are reported") {
    TransmonPairSpec p = rochester_pair();
    p.b.omega01 = p.a.omega12;  // w2A - w1B -> 0
    CHECK_THROWS_AS(bare_rates_pt(p), DegeneracyError);
  }
}

TEST_CASE("bare numeric rates against perturbation theory") {
  SUBCASE("J = 0 gives zeros") {
    TransmonPairSpec p = rochester_pair();
    p.j = 0.0;
    // relative to the total level-energy scale that enters the spectrum
    const double scale = p.a.level_energy(3) + p.b.level_energy(3);
    for (double v : bare_rates_numeric(p).v) CHECK(std::abs(v) < 1e-12 * scale);
  }
  SUBCASE("J^2 scaling") {
    TransmonPairSpec p = rochester_pair();
    const auto r1 = bare_rates_numeric(p);
    p.j /= 2.0;
    const auto r2 = bare_rates_numeric(p);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(r1.v[i] / r2.v[i] - 4.0) < 0.05 * 4.0);
  }
  SUBCASE("agreement within 20%, improving as J shrinks") {
    TransmonPairSpec p = rochester_pair();
    double prev_err = 1.0;
    for (double jmhz : {2.0, 1.0, 0.5}) {
      p.j = kTwoPi * 1e6 * jmhz;
      const auto pt = bare_rates_pt(p);
      const auto nm = bare_rates_numeric(p);
      const double err = std::abs(pt.v[0] - nm.v[0]) / std::abs(nm.v[0]);
      CHECK(err < 0.2);
      CHECK(err < prev_err);
      prev_err = err;
    }
  }
}

TEST_CASE("driven perturbative rates") {
  const TransmonPairSpec pair = rochester_pair();
  SUBCASE("zero amplitude reduces to the bare rates") {
    StarkConfig s{kStarkFreq, 0.0, 0.0, 0.0};
    const auto d = driven_rates_pt(pair, s);
    const auto bare = bare_rates_pt(pair);
    for (int i = 0; i < 4; ++i) CHECK(d.rates.v[i] == doctest::Approx(bare.v[i]));
  }
  SUBCASE("dphi = pi flips only the driven contribution") {
    StarkConfig s0{kStarkFreq, kStarkAmpPaper, kStarkAmpPaper, 0.0};
    StarkConfig spi{kStarkFreq, kStarkAmpPaper, kStarkAmpPaper, kPi};
    const auto bare = bare_rates_pt(pair);
    const auto d0 = driven_rates_pt(pair, s0);
    const auto dpi = driven_rates_pt(pair, spi);
    for (int i = 0; i < 4; ++i)
      CHECK(d0.rates.v[i] - bare.v[i] ==
            doctest::Approx(-(dpi.rates.v[i] - bare.v[i])).epsilon(1e-10));
  }
  SUBCASE("continuity in the amplitude") {
    const auto bare = bare_rates_pt(pair);
    StarkConfig s{kStarkFreq, kTwoPi * 1e4, kTwoPi * 1e4, 0.0};
    const auto d = driven_rates_pt(pair, s);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(d.rates.v[i] - bare.v[i]) < 1e-4 * std::abs(bare.v[i]) + kTwoPi * 10.0);
  }
  SUBCASE("zero detuning throws") {
    StarkConfig s{pair.a.omega12, kStarkAmpPaper, kStarkAmpPaper, 0.0};
    CHECK_THROWS_AS(driven_rates_pt(pair, s), DegeneracyError);
  }
}

TEST_CASE("Stark amplitude calibration") {
  const TransmonPairSpec pair = rochester_pair();
  SUBCASE("zero crossing near the reported amplitude") {
    std::vector<double> grid;
    for (double m = 1.0; m <= 20.0; m += 1.0) grid.push_back(kTwoPi * 1e6 * m);
    const StarkCalibration cal = calibrate_stark_amplitude(pair, kStarkFreq, 0.0, grid);
    const double root_mhz = cal.amplitude / (kTwoPi * 1e6);
    CHECK(root_mhz > 7.1 / 2.0);
    CHECK(root_mhz < 7.1 * 2.0);
    CHECK(std::abs(cal.residual_z22) / (kTwoPi * 1e3) < 2.0);
  }
  SUBCASE("no crossing -> BracketError") {
    std::vector<double> grid;
    for (double m = 0.1; m <= 1.0; m += 0.1) grid.push_back(kTwoPi * 1e6 * m);
    CHECK_THROWS_AS(calibrate_stark_amplitude(pair, kStarkFreq, kPi, grid), BracketError);
  }
}

TEST_CASE("numeric driven rates") {
  const TransmonPairSpec pair = rochester_pair();
  SUBCASE("zero amplitude matches the bare numeric rates") {
    StarkConfig s{kStarkFreq, 0.0, 0.0, 0.0};
    const auto dn = driven_rates_numeric(pair, s, 40e-9, 120e-9).to(RateBasis::alpha);
    const auto bn = bare_rates_numeric(pair);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(dn.v[i] - bn.v[i]) < kTwoPi * 1e3);
  }
  SUBCASE("follows the perturbative trend in the amplitude") {
    const auto z22_of = [&](double amp, bool numeric) {
      StarkConfig s{kStarkFreq, amp, amp, 0.0};
      if (numeric) return driven_rates_numeric(pair, s, 60e-9, 150e-9).to(RateBasis::z).v[3];
      return driven_rates_pt(pair, s).rates.to(RateBasis::z).v[3];
    };
    // same sign at moderate drive
    const double a1 = kTwoPi * 5e6;
    CHECK(z22_of(a1, true) * z22_of(a1, false) > 0.0);
    // the crossing sits just past the adiabatic window of this
    // straddling-regime device (a |12>-|20> multiphoton collision), so
    // extrapolate the quadratic amplitude dependence from safe amplitudes
    std::vector<double> amps, z22n;
    for (double m : {3.0, 4.5, 6.0, 7.0}) {
      amps.push_back(kTwoPi * 1e6 * m);
      z22n.push_back(z22_of(amps.back(), true));
    }
    double num = 0.0, den = 0.0;
    const double z0 = z22n.front();
    for (size_t i = 0; i < amps.size(); ++i) {
      const double a2 = amps[i] * amps[i] - amps.front() * amps.front();
      num += a2 * (z22n[i] - z0);
      den += a2 * a2;
    }
    const double c = num / den;
    const double z_at_zero = z0 - c * amps.front() * amps.front();
    REQUIRE(c * z_at_zero < 0.0);
    const double numeric_root = std::sqrt(-z_at_zero / c);
    std::vector<double> grid;
    for (double m = 2.0; m <= 20.0; m += 2.0) grid.push_back(kTwoPi * 1e6 * m);
    const double pt_root = calibrate_stark_amplitude(pair, kStarkFreq, 0.0, grid).amplitude;
    CHECK(std::abs(numeric_root - pt_root) / pt_root < 0.3);
  }
  SUBCASE("leakage guard trips inside the collision window") {
    StarkConfig s{kStarkFreq, kTwoPi * 14e6, kTwoPi * 14e6, 0.0};
    CHECK_THROWS_AS(driven_rates_numeric(pair, s, 60e-9, 150e-9), AdiabaticityError);
  }
}

TEST_CASE("JAZZ recovery on known diagonal Hamiltonians") {
  JazzOptions opt;
  opt.delta_art = kTwoPi * 1e6;
  for (int i = 0; i < 60; ++i) opt.t_list.push_back(i * 0.05e-6);

  SUBCASE("worked example: zeta02 = +50 kHz") {
    InteractionRates rates(RateBasis::zeta, {0.0, kTwoPi * 50e3, 0.0, 0.0});
    const JazzResult jr = simulate_jazz(interaction_hamiltonian(rates), 0, 2, opt);
    CHECK(jr.omega_minus / kTwoPi == doctest::Approx(1.05e6).epsilon(1e-3));
    CHECK(jr.omega_plus / kTwoPi == doctest::Approx(0.95e6).epsilon(1e-3));
    CHECK(jr.zeta / kTwoPi == doctest::Approx(50e3).epsilon(0.01));
  }
  SUBCASE("zero rate recovers zero") {
    InteractionRates rates(RateBasis::zeta, {0.0, 0.0, 0.0, 0.0});
    const JazzResult jr = simulate_jazz(interaction_hamiltonian(rates), 2, 0, opt);
    CHECK(std::abs(jr.omega_plus - opt.delta_art) / opt.delta_art < 1e-6);
    CHECK(std::abs(jr.zeta) / opt.delta_art < 1e-6);
  }
  SUBCASE("random rates, all four targets, with local offsets echoed") {
    Rng rng(37);
    for (int rep = 0; rep < 5; ++rep) {
      const InteractionRates rates = random_zeta(rng, kTwoPi * 120e3);
      CMatrix h = interaction_hamiltonian(rates);
      // local diagonal offsets must drop out of the echo
      const auto& s = spin_ops();
      h += kTwoPi * 250e3 * rng.normal() * kron(s.lz2, CMatrix::Identity(3, 3));
      h += kTwoPi * 250e3 * rng.normal() * kron(CMatrix::Identity(3, 3), s.lz);
      const int pairs[4][2] = {{0, 0}, {0, 2}, {2, 0}, {2, 2}};
      for (int q = 0; q < 4; ++q) {
        const JazzResult jr = simulate_jazz(h, pairs[q][0], pairs[q][1], opt);
        CHECK(std::abs(jr.zeta - rates.v[q]) <
              0.01 * std::max(std::abs(rates.v[q]), kTwoPi * 1e3));
      }
    }
  }
  SUBCASE("decay model still fits") {
    InteractionRates rates(RateBasis::zeta,
                           {kTwoPi * 80e3, kTwoPi * -60e3, kTwoPi * 40e3, kTwoPi * 110e3});
    JazzOptions dopt = opt;
    dopt.decay_tau = 2e-6;
    const JazzResult jr = simulate_jazz(interaction_hamiltonian(rates), 0, 2, dopt);
    CHECK(std::abs(jr.zeta - rates.v[1]) < 0.02 * std::abs(rates.v[1]));
  }
}

TEST_CASE("total JAZZ recovers z22") {
  JazzOptions opt;
  opt.delta_art = kTwoPi * 3e6;
  for (int i = 0; i < 72; ++i) opt.t_list.push_back(i * 0.02e-6);

  SUBCASE("all zeta zero") {
    InteractionRates rates(RateBasis::zeta, {0, 0, 0, 0});
    const TotalJazzResult tj = simulate_total_jazz(interaction_hamiltonian(rates), opt);
    CHECK(std::abs(tj.z22) / opt.delta_art < 1e-6);
  }
  SUBCASE("random rates and sign flip") {
    Rng rng(41);
    const InteractionRates rates = random_zeta(rng, kTwoPi * 90e3);
    const double z22 = rates.to(RateBasis::z).v[3];
    const TotalJazzResult tj = simulate_total_jazz(interaction_hamiltonian(rates), opt);
    CHECK(std::abs(tj.z22 - z22) < 0.01 * std::max(std::abs(z22), kTwoPi * 1e3));

    InteractionRates neg(RateBasis::zeta,
                         {-rates.v[0], -rates.v[1], -rates.v[2], -rates.v[3]});
    const TotalJazzResult tjn = simulate_total_jazz(interaction_hamiltonian(neg), opt);
    CHECK(tjn.z22 == doctest::Approx(-tj.z22).epsilon(0.02));
  }
}
