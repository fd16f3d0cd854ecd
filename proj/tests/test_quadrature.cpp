#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "recmle/analytic.hpp"
#include "recmle/family.hpp"
#include "recmle/quadrature.hpp"

using namespace recmle;

TEST(IntegrateAdaptive, SmoothOracles) {
  const auto r1 = integrate_adaptive([](double x) { return std::sin(x); }, 0.0,
                                     std::numbers::pi);
  EXPECT_TRUE(r1.converged);
  EXPECT_NEAR(r1.value, 2.0, 1e-12);

  const auto r2 =
      integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0);
  EXPECT_NEAR(r2.value, 1.0 / 3.0, 1e-13);

  const auto r3 = integrate_adaptive(
      [](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  EXPECT_NEAR(r3.value, std::sqrt(std::numbers::pi), 1e-11);
}

TEST(IntegrateAdaptive, NarrowSpikeIsFound) {
  // spikes far narrower than the initial rule spacing; refinement must both
  // notice them (via the seeded segments) and then resolve them
  const auto narrow = integrate_adaptive(
      [](double x) {
        const double z = (x - 0.618) / 0.01;
        return std::exp(-0.5 * z * z);
      },
      0.0, 1.0, 1e-11);
  EXPECT_TRUE(narrow.converged);
  EXPECT_GT(narrow.segments, 8);
  EXPECT_NEAR(narrow.value, 0.01 * std::sqrt(2.0 * std::numbers::pi), 1e-11);

  const auto wide_domain = integrate_adaptive(
      [](double x) {
        const double z = (x - 7.31) / 0.05;
        return std::exp(-0.5 * z * z);
      },
      0.0, 30.0, 1e-11);
  EXPECT_TRUE(wide_domain.converged);
  EXPECT_NEAR(wide_domain.value, 0.05 * std::sqrt(2.0 * std::numbers::pi),
              1e-10);
}

TEST(GammaExpectation, ConstantAndPolynomialMoments) {
  EXPECT_NEAR(gamma_expectation_quadrature([](double) { return 1.0; }, 5, 2.0),
              1.0, 1e-10);
  EXPECT_NEAR(gamma_expectation_quadrature([](double t) { return t; }, 5, 2.0),
              2.5, 1e-9);
  EXPECT_NEAR(
      gamma_expectation_quadrature([](double t) { return t * t; }, 5, 2.0),
      5.0 * 6.0 / 4.0, 1e-9);
  EXPECT_NEAR(gamma_expectation_quadrature([](double t) { return t; }, 1, 4.0),
              0.25, 1e-9);
}

TEST(GammaExpectation, NegativeMomentsMatchClosedForm) {
  // spec-level bound: 1e-8 relative for k <= m-2
  for (const std::size_t m : {std::size_t{3}, std::size_t{5}, std::size_t{10},
                              std::size_t{40}}) {
    for (std::size_t k = 0; k + 2 <= m; k += (m > 10 ? 7 : 1)) {
      for (const double rate : {0.5, 1.0, 3.0}) {
        const double closed = negative_gamma_moment(m, k, rate);
        const double quad = gamma_expectation_quadrature(
            [k](double t) { return std::pow(t, -static_cast<double>(k)); }, m,
            rate);
        EXPECT_NEAR(quad / closed, 1.0, 1e-8)
            << "m=" << m << " k=" << k << " rate=" << rate;
      }
    }
  }
  // k = m-1 exists too (Gamma(1) pole is at k = m)
  EXPECT_NEAR(gamma_expectation_quadrature(
                  [](double t) { return std::pow(t, -4.0); }, 5, 1.0) /
                  negative_gamma_moment(5, 4, 1.0),
              1.0, 1e-7);
}

TEST(GammaExpectation, PluginKernelOracle) {
  // E[e^{-1/T}], T ~ Gamma(5, 1): frozen 40-digit reference
  const double v = gamma_expectation_quadrature(
      [](double t) { return std::exp(-1.0 / t); }, 5, 1.0);
  EXPECT_NEAR(v, 0.78592075838303895357, 1e-10);
}

TEST(GammaExpectation, LargeShapeSpikeCapture) {
  EXPECT_NEAR(gamma_expectation_quadrature([](double t) { return t; }, 300,
                                           1.0) /
                  300.0,
              1.0, 1e-9);
  // plug-in cdf kernel at shape 300: quadrature must agree with the
  // well-conditioned series and sit within O(1/m) of the target 0.8
  const FamilyMember pw = power_function();
  const double ax = -std::log(0.8);
  const double quad = gamma_expectation_quadrature(
      [ax](double t) { return std::exp(-300.0 * ax / t); }, 300, 1.0);
  const auto series = expectation_cdf_plugin_series(pw, 1.0, 0.8, 300);
  EXPECT_NEAR(quad / series.value, 1.0, 1e-8);
  EXPECT_NEAR(quad, 0.8, 1e-3);
}

TEST(GammaExpectation, DivergenceDetection) {
  // exponential growth on the right tail
  EXPECT_THROW(gamma_expectation_quadrature(
                   [](double t) { return std::exp(2.0 * t); }, 3, 1.0),
               divergence_error);
  // essential singularity at 0 (what E[exp(2n/T)] looks like)
  EXPECT_THROW(gamma_expectation_quadrature(
                   [](double t) { return std::exp(0.5 / t); }, 5, 1.0),
               divergence_error);
  // pole exactly at the moment boundary: E[T^{-m}] diverges
  EXPECT_THROW(gamma_expectation_quadrature(
                   [](double t) { return std::pow(t, -5.0); }, 5, 1.0),
               divergence_error);
}

TEST(GammaExpectation, ArgumentErrors) {
  EXPECT_THROW(
      gamma_expectation_quadrature([](double) { return 1.0; }, 0, 1.0),
      argument_error);
  EXPECT_THROW(
      gamma_expectation_quadrature([](double) { return 1.0; }, 3, 0.0),
      argument_error);
  EXPECT_THROW(
      gamma_expectation_quadrature([](double) { return 1.0; }, 3, -2.0),
      argument_error);
}
