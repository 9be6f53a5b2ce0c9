#pragma once

// Shared device fixtures for tests: the two-transmon parameters of the
// analog-digital experiment (transition frequencies in GHz, J in MHz).

#include "interaction.hpp"

namespace ahmsim::fixtures {

inline TransmonSpec transmon_qa() {
  TransmonSpec t;
  t.omega01 = kTwoPi * 5.4146e9;
  t.omega12 = kTwoPi * 5.1687e9;
  t.omega23 = kTwoPi * 4.918e9;
  t.t1_01 = 30e-6;
  t.t2_01 = 48e-6;
  t.t1_12 = 15e-6;
  t.t2_12 = 20e-6;
  return t;
}

inline TransmonSpec transmon_qb() {
  TransmonSpec t;
  t.omega01 = kTwoPi * 5.2484e9;
  t.omega12 = kTwoPi * 5.0075e9;
  t.omega23 = kTwoPi * 4.758e9;
  t.t1_01 = 26e-6;
  t.t2_01 = 36e-6;
  t.t1_12 = 17e-6;
  t.t2_12 = 24e-6;
  return t;
}

inline TransmonPairSpec rochester_pair() {
  TransmonPairSpec p;
  p.a = transmon_qa();
  p.b = transmon_qb();
  p.j = kTwoPi * 2e6;
  return p;
}

constexpr double kStarkFreq = kTwoPi * 5.08e9;   // rad/s
constexpr double kStarkAmpPaper = kTwoPi * 7.1e6;

}  // namespace ahmsim::fixtures
