#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/family.hpp"
#include "recmle/records.hpp"

namespace recmle {

/// Reported scale of an estimate: the parameter itself or its exponential.
enum class EstimandTransform { identity, exp };

inline const char* to_string(EstimandTransform t) {
  return t == EstimandTransform::identity ? "identity" : "exp";
}

/// A fitted parameter plus everything needed to reuse the fit downstream.
/// size and stat encode the sufficient pair (count, A-total): the fitted
/// hazard scale is size / stat, and plug-in curves use that ratio directly so
/// they are invariant to how B parametrizes theta.
struct EstimateResult {
  std::string member_name;
  std::string source;  // "sample" or "records"
  std::size_t size = 0;
  double stat = 0.0;   // sum of A over the sample, or A(last record)
  double theta_hat = 0.0;
  EstimandTransform transform = EstimandTransform::identity;
  double value = 0.0;  // theta_hat under identity, exp(theta_hat) under exp

  double b_hat() const { return static_cast<double>(size) / stat; }
};

namespace detail {

inline EstimateResult finish_estimate(const FamilyMember& fam,
                                      const char* source, std::size_t size,
                                      double stat, EstimandTransform transform,
                                      const char* what) {
  if (!(stat > 0.0) || !std::isfinite(stat)) {
    throw domain_error(std::string(what) +
                       ": A-statistic must be positive and finite, got " +
                       fmt_g17(stat));
  }
  EstimateResult r;
  r.member_name = fam.name();
  r.source = source;
  r.size = size;
  r.stat = stat;
  r.theta_hat = fam.b_inv(static_cast<double>(size) / stat);
  r.transform = transform;
  r.value = transform == EstimandTransform::exp ? std::exp(r.theta_hat)
                                                : r.theta_hat;
  return r;
}

}  // namespace detail

/// MLE from an i.i.d. sample: the fitted hazard scale is n / sum_i A(x_i),
/// mapped back to theta through B^{-1}.
inline EstimateResult mle_theta_sample(
    const FamilyMember& fam, std::span<const double> xs,
    EstimandTransform transform = EstimandTransform::identity) {
  if (xs.empty()) throw argument_error("mle_theta_sample: empty sample");
  detail::neumaier_sum t;
  for (const double x : xs) {
    fam.require_support(x);
    t.add(fam.a(x));
  }
  return detail::finish_estimate(fam, "sample", xs.size(), t.value(), transform,
                                 "mle_theta_sample");
}

inline EstimateResult mle_theta_sample(
    const FamilyMember& fam, const std::vector<double>& xs,
    EstimandTransform transform = EstimandTransform::identity) {
  return mle_theta_sample(fam, std::span<const double>(xs), transform);
}

/// MLE from the first m lower records: only the last record enters, through
/// m / A(r_m). Coincides with the sample MLE formula with n replaced by m.
inline EstimateResult mle_theta_records(
    const FamilyMember& fam, const RecordSequence& rec,
    EstimandTransform transform = EstimandTransform::identity) {
  detail::require_records(fam, rec.values, "mle_theta_records");
  return detail::finish_estimate(fam, "records", rec.count(),
                                 fam.a(rec.values.back()), transform,
                                 "mle_theta_records");
}

/// Plug-in CDF at x: exp(-(size / stat) * A(x)). Works off the fitted hazard
/// ratio, so no B evaluation (and no round-trip error) is involved.
inline double plugin_cdf(const FamilyMember& fam, const EstimateResult& est,
                         double x) {
  fam.require_support(x);
  return std::exp(-est.b_hat() * fam.a(x));
}

/// Plug-in PDF at x: -(size / stat) * A'(x) * exp(-(size / stat) * A(x)).
inline double plugin_pdf(const FamilyMember& fam, const EstimateResult& est,
                         double x) {
  fam.require_support(x);
  const double bh = est.b_hat();
  return -bh * fam.a_prime(x) * std::exp(-bh * fam.a(x));
}

}  // namespace recmle
