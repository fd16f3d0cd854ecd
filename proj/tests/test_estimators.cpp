#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "recmle/estimators.hpp"
#include "recmle/records.hpp"

using namespace recmle;

namespace {

RecordSequence records_of(std::vector<double> values) {
  RecordSequence rec;
  rec.values = std::move(values);
  for (std::size_t i = 0; i < rec.values.size(); ++i) rec.times.push_back(i + 1);
  return rec;
}

}  // namespace

TEST(MleSample, PowerHandValues) {
  const auto fam = power_function();
  // T = -ln 0.5 - ln 0.25 = 3 ln 2; theta_hat = 2 / (3 ln 2)
  const auto est = mle_theta_sample(fam, std::vector<double>{0.5, 0.25});
  EXPECT_NEAR(est.theta_hat, 2.0 / (3.0 * std::log(2.0)), 1e-14);
  EXPECT_NEAR(est.theta_hat, 0.961796693925, 1e-9);
  EXPECT_EQ(est.size, 2u);
  EXPECT_EQ(est.source, "sample");
  EXPECT_NEAR(est.stat, 3.0 * std::log(2.0), 1e-14);
  EXPECT_EQ(est.transform, EstimandTransform::identity);
  EXPECT_DOUBLE_EQ(est.value, est.theta_hat);
}

TEST(MleSample, GumbelConstantSample) {
  const auto fam = gumbel();
  // all observations equal c: T = n e^{-c}, B_hat = e^{c}, theta_hat = c
  const auto est = mle_theta_sample(fam, std::vector<double>{1.7, 1.7, 1.7});
  EXPECT_NEAR(est.theta_hat, 1.7, 1e-13);
  const auto zero = mle_theta_sample(fam, std::vector<double>{0.0, 0.0, 0.0});
  EXPECT_NEAR(zero.theta_hat, 0.0, 1e-14);
}

TEST(MleSample, Errors) {
  const auto fam = power_function();
  EXPECT_THROW(mle_theta_sample(fam, std::vector<double>{}), argument_error);
  EXPECT_THROW(mle_theta_sample(fam, std::vector<double>{0.5, 1.5}),
               domain_error);
  EXPECT_THROW(mle_theta_sample(fam, std::vector<double>{0.5, 0.0}),
               domain_error);
}

TEST(MleRecords, HandValues) {
  const auto fam = power_function();
  // only the last record matters: T = A(0.25) =2 ln 2, theta_hat = 2/(2 ln 2)
  const auto est = mle_theta_records(fam, records_of({0.5, 0.25}));
  EXPECT_NEAR(est.theta_hat, 1.0 / std::log(2.0), 1e-14);
  EXPECT_EQ(est.source, "records");

  // records ending at e^{-2} with m=4: theta_hat = 4/2 = 2
  const auto est4 =
      mle_theta_records(fam, records_of({0.9, 0.5, 0.3, std::exp(-2.0)}));
  EXPECT_NEAR(est4.theta_hat, 2.0, 1e-13);

  const auto fre = frechet(2.0);
  // m=2, last record 0.5: T = 4, B_hat = 0.5, theta_hat = sqrt(0.5)
  const auto estf = mle_theta_records(fre, records_of({1.0, 0.5}));
  EXPECT_NEAR(estf.theta_hat, std::sqrt(0.5), 1e-14);
  // m=3 ending at 1.0: theta_hat = sqrt(3)
  const auto estf3 = mle_theta_records(fre, records_of({3.0, 2.0, 1.0}));
  EXPECT_NEAR(estf3.theta_hat, std::sqrt(3.0), 1e-14);
}

TEST(MleRecords, MatchesDirectInversion) {
  const auto fam = gumbel();
  const auto rec = records_of({2.0, 1.1, -0.3, -0.35});
  const auto est = mle_theta_records(fam, rec);
  EXPECT_NEAR(est.theta_hat, fam.b_inv(4.0 / fam.a(-0.35)), 1e-13);
}

TEST(MleRecords, Errors) {
  const auto fam = power_function();
  EXPECT_THROW(mle_theta_records(fam, records_of({})), argument_error);
  EXPECT_THROW(mle_theta_records(fam, records_of({0.25, 0.5})),
               argument_error);
  EXPECT_THROW(mle_theta_records(fam, records_of({0.5, 0.5})), argument_error);
  EXPECT_THROW(mle_theta_records(fam, records_of({1.7, 0.5})), domain_error);
}

TEST(Transform, ExpScale) {
  const auto fam = power_function();
  const auto est = mle_theta_sample(fam, std::vector<double>{0.5, 0.25},
                                    EstimandTransform::exp);
  EXPECT_DOUBLE_EQ(est.value, std::exp(est.theta_hat));
  EXPECT_EQ(est.transform, EstimandTransform::exp);
}

TEST(Plugin, HandValuesAndInvariance) {
  const auto fam = power_function();
  const auto est = mle_theta_records(fam, records_of({0.5, 0.25}));
  // B_hat = 2 / (2 ln 2) = 1/ln 2; F_hat(0.5) = exp(-(1/ln2) ln 2) = e^{-1}
  EXPECT_NEAR(plugin_cdf(fam, est, 0.5), std::exp(-1.0), 1e-14);

  // invariance: the plug-in equals the CDF/PDF evaluated at theta_hat
  for (const double x : {0.1, 0.4, 0.9}) {
    EXPECT_NEAR(plugin_cdf(fam, est, x), cdf(fam, est.theta_hat, x), 1e-12);
    EXPECT_NEAR(plugin_pdf(fam, est, x), pdf(fam, est.theta_hat, x), 1e-12);
  }
  const auto fre = frechet(1.7);
  const auto estf = mle_theta_records(fre, records_of({2.0, 0.9, 0.6}));
  for (const double x : {0.5, 1.0, 4.0}) {
    EXPECT_NEAR(plugin_cdf(fre, estf, x), cdf(fre, estf.theta_hat, x), 1e-12);
    EXPECT_NEAR(plugin_pdf(fre, estf, x), pdf(fre, estf.theta_hat, x), 1e-12);
  }
}

TEST(Plugin, DomainErrors) {
  const auto fam = power_function();
  const auto est = mle_theta_records(fam, records_of({0.5}));
  EXPECT_THROW(plugin_cdf(fam, est, 1.5), domain_error);
  EXPECT_THROW(plugin_pdf(fam, est, -0.2), domain_error);
}

TEST(Estimators, SampleAndRecordFormulasAgreeAtEqualStatistic) {
  // With n = m and sum A(x_i) = A(r_m), the two estimators coincide.
  const auto fam = power_function();
  const auto xs = std::vector<double>{0.8, 0.7, 0.9};
  const double t = fam.a(0.8) + fam.a(0.7) + fam.a(0.9);
  const auto est_s = mle_theta_sample(fam, xs);
  const auto rec = records_of({0.9, 0.8, fam.a_inv(t)});
  const auto est_r = mle_theta_records(fam, rec);
  EXPECT_NEAR(est_s.theta_hat, est_r.theta_hat, 1e-13);
}
