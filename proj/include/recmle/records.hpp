#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/family.hpp"
#include "recmle/rng.hpp"

namespace recmle {

/// Lower record values of an observation series, in occurrence order.
/// values are strictly decreasing; times are the 1-based indices at which each
/// record occurred. Simulated sequences have synthetic times 1..m and no
/// source_n, which marks the times as placeholders rather than data.
struct RecordSequence {
  std::vector<double> values;
  std::vector<std::size_t> times;
  std::optional<std::size_t> source_n;

  std::size_t count() const { return values.size(); }
  bool synthetic_times() const { return !source_n.has_value(); }
};

/// Scan a series for lower records: the first observation is a record, and
/// each later observation is one iff it is strictly below the running minimum
/// (ties are not records).
inline RecordSequence extract_lower_records(std::span<const double> series) {
  if (series.empty()) {
    throw argument_error("extract_lower_records: empty series");
  }
  RecordSequence rec;
  rec.source_n = series.size();
  double running_min = series[0];
  rec.values.push_back(series[0]);
  rec.times.push_back(1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i] < running_min) {
      running_min = series[i];
      rec.values.push_back(series[i]);
      rec.times.push_back(i + 1);
    }
  }
  return rec;
}

inline RecordSequence extract_lower_records(const std::vector<double>& series) {
  return extract_lower_records(std::span<const double>(series));
}

/// Draw the first m lower records directly: A maps them to partial sums of
/// i.i.d. exponentials with rate B(theta), so one exponential per record
/// suffices (no rejection against a full i.i.d. series).
inline RecordSequence simulate_lower_records(const FamilyMember& fam,
                                             double theta, std::size_t m,
                                             Xoshiro256pp& rng) {
  fam.require_theta(theta);
  if (m == 0) throw argument_error("simulate_lower_records: m must be >= 1");
  const double rate = fam.b(theta);
  RecordSequence rec;
  rec.values.reserve(m);
  rec.times.reserve(m);
  double partial_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    partial_sum += rng.exponential(rate);
    rec.values.push_back(fam.a_inv(partial_sum));
    rec.times.push_back(i + 1);
  }
  return rec;
}

inline RecordSequence simulate_lower_records(const FamilyMember& fam,
                                             double theta, std::size_t m,
                                             std::uint64_t seed) {
  Xoshiro256pp rng(seed);
  return simulate_lower_records(fam, theta, m, rng);
}

namespace detail {

inline void require_records(const FamilyMember& fam,
                            std::span<const double> values,
                            const char* what) {
  if (values.empty()) {
    throw argument_error(std::string(what) + ": empty record sequence");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    fam.require_support(values[i]);
    if (i > 0 && !(values[i] < values[i - 1])) {
      throw argument_error(std::string(what) +
                           ": record values must be strictly decreasing");
    }
  }
}

}  // namespace detail

/// Log joint density of the first m lower records (r_1, ..., r_m):
///   m ln B + sum_i ln(-A'(r_i)) - B A(r_m).
inline double record_joint_logdensity(const FamilyMember& fam, double theta,
                                      std::span<const double> values) {
  fam.require_theta(theta);
  detail::require_records(fam, values, "record_joint_logdensity");
  const double bt = fam.b(theta);
  detail::neumaier_sum s;
  s.add(static_cast<double>(values.size()) * std::log(bt));
  for (const double r : values) s.add(std::log(-fam.a_prime(r)));
  s.add(-bt * fam.a(values.back()));
  return s.value();
}

inline double record_joint_logdensity(const FamilyMember& fam, double theta,
                                      const std::vector<double>& values) {
  return record_joint_logdensity(fam, theta, std::span<const double>(values));
}

/// Log marginal density of the m-th lower record alone. A maps it to a
/// Gamma(m, rate B) variable, so
///   ln(-A'(r)) + m ln B + (m-1) ln A(r) - B A(r) - ln Gamma(m).
inline double last_record_logdensity(const FamilyMember& fam, double theta,
                                     double r, std::size_t m) {
  fam.require_theta(theta);
  fam.require_support(r);
  if (m == 0) throw argument_error("last_record_logdensity: m must be >= 1");
  const double bt = fam.b(theta);
  const double ar = fam.a(r);
  const double md = static_cast<double>(m);
  return std::log(-fam.a_prime(r)) + md * std::log(bt) +
         (md - 1.0) * std::log(ar) - bt * ar - std::lgamma(md);
}

}  // namespace recmle
