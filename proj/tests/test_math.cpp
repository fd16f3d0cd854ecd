#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "recmle/detail/math.hpp"

namespace rd = recmle::detail;

TEST(NeumaierSum, RecoversLostLowOrderBits) {
  rd::neumaier_sum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_DOUBLE_EQ(s.value(), 1.0);

  double naive = 1e16;
  naive += 1.0;
  naive -= 1e16;
  EXPECT_DOUBLE_EQ(naive, 0.0);  // what we are protecting against
}

TEST(NeumaierSum, AlternatingSeries) {
  // sum_{k=1}^{2n} (-1)^{k+1}/k with huge cancelling spikes interleaved.
  rd::neumaier_sum s;
  double expected_tail = 0.0;
  for (int k = 1; k <= 1000; ++k) {
    const double term = (k % 2 ? 1.0 : -1.0) / k;
    s.add(1e15);
    s.add(term);
    s.add(-1e15);
    expected_tail += term;
  }
  EXPECT_NEAR(s.value(), expected_tail, 1e-12);
}

TEST(GammaP, FrozenOracleValues) {
  // Reference values from 40-digit arithmetic.
  EXPECT_NEAR(rd::gamma_p(5.0, 5.0), 0.55950671493478758856, 1e-14);
  EXPECT_NEAR(rd::gamma_p(0.5, 0.25), 0.52049987781304653768, 1e-14);
  EXPECT_NEAR(rd::gamma_p(3.0, 10.0), 0.99723060428448842406, 1e-14);
}

TEST(GammaP, ShapeOneIsExponential) {
  for (const double x : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    EXPECT_NEAR(rd::gamma_p(1.0, x), 1.0 - std::exp(-x), 1e-14);
  }
}

TEST(GammaP, EdgesAndMonotonicity) {
  EXPECT_EQ(rd::gamma_p(3.0, 0.0), 0.0);
  double prev = -1.0;
  for (double x = 0.1; x < 30.0; x += 0.37) {
    const double p = rd::gamma_p(4.0, x);
    EXPECT_GT(p, prev);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    prev = p;
  }
  EXPECT_THROW(rd::gamma_p(0.0, 1.0), recmle::argument_error);
  EXPECT_THROW(rd::gamma_p(2.0, -1.0), recmle::argument_error);
}

TEST(KolmogorovQ, FrozenOracleValues) {
  EXPECT_NEAR(rd::kolmogorov_q(0.5), 0.96394524366487509, 1e-9);
  EXPECT_NEAR(rd::kolmogorov_q(1.0), 0.26999967167735452, 1e-9);
  EXPECT_NEAR(rd::kolmogorov_q(1.36), 0.04948587675537788, 1e-9);
  EXPECT_NEAR(rd::kolmogorov_q(2.0), 0.00067092525577969535, 1e-12);
}

TEST(KolmogorovQ, EdgesAndMonotonicity) {
  EXPECT_DOUBLE_EQ(rd::kolmogorov_q(0.0), 1.0);
  EXPECT_DOUBLE_EQ(rd::kolmogorov_q(-1.0), 1.0);
  double prev = 1.0 + 1e-12;
  for (double l = 0.05; l < 3.0; l += 0.05) {
    const double q = rd::kolmogorov_q(l);
    EXPECT_LE(q, prev);
    EXPECT_GE(q, 0.0);
    EXPECT_LE(q, 1.0);
    prev = q;
  }
  EXPECT_LT(rd::kolmogorov_q(5.0), 1e-20);
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(rd::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(rd::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(rd::fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Hex64, Formatting) {
  EXPECT_EQ(rd::hex64(0), "0000000000000000");
  EXPECT_EQ(rd::hex64(0xdeadbeefULL), "00000000deadbeef");
  EXPECT_EQ(rd::hex64(~0ULL), "ffffffffffffffff");
}

TEST(FmtG17, RoundTripsDoublesExactly) {
  for (const double v : {0.1, 1.0 / 3.0, 2.5, 1e-300, 1e300, -0.0,
                         0.78592075838303895, 453.0 / 576.0}) {
    const std::string s = rd::fmt_g17(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
  EXPECT_EQ(rd::fmt_g17(std::numeric_limits<double>::infinity()), "inf");
}
