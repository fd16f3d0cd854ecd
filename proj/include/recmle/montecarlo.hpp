#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/estimators.hpp"
#include "recmle/family.hpp"
#include "recmle/records.hpp"
#include "recmle/rng.hpp"

namespace recmle {

namespace detail {

/// Deterministic parallel replication driver. Replication i always draws from
/// Xoshiro256pp::substream(seed, i) and writes only to slot i of its output
/// arrays, so results are a pure function of (seed, reps) no matter how many
/// worker threads execute the loop. body(i, rng) returns false to mark the
/// replication as failed.
template <class Body>
std::size_t run_replications(std::size_t reps, std::uint64_t seed,
                             unsigned lanes, Body&& body) {
  if (reps == 0) throw argument_error("run_replications: reps >= 1");
  unsigned n_threads = lanes != 0 ? lanes : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  n_threads = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, (reps + 255) / 256));

  std::atomic<std::size_t> next_block{0};
  std::atomic<std::size_t> failures{0};
  const std::size_t n_blocks = (reps + 255) / 256;
  const auto worker = [&]() {
    std::size_t local_failures = 0;
    for (;;) {
      const std::size_t blk = next_block.fetch_add(1);
      if (blk >= n_blocks) break;
      const std::size_t lo = blk * 256;
      const std::size_t hi = std::min(reps, lo + 256);
      for (std::size_t i = lo; i < hi; ++i) {
        auto rng = Xoshiro256pp::substream(seed, i);
        bool ok = false;
        try {
          ok = body(i, rng);
        } catch (const error&) {
          ok = false;
        }
        if (!ok) ++local_failures;
      }
    }
    failures.fetch_add(local_failures);
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return failures.load();
}

inline void check_failure_budget(std::size_t failures, std::size_t reps,
                                 const char* what) {
  if (static_cast<double>(failures) > 0.01 * static_cast<double>(reps)) {
    throw run_error(std::string(what) + ": " + std::to_string(failures) +
                    " of " + std::to_string(reps) +
                    " replications failed (budget is 1%)");
  }
}

struct MomentSummary {
  double mean = 0.0;
  double se_mean = 0.0;
};

inline MomentSummary summarize(std::span<const double> vals) {
  neumaier_sum s;
  std::size_t n = 0;
  for (const double v : vals) {
    if (std::isnan(v)) continue;
    s.add(v);
    ++n;
  }
  MomentSummary out;
  if (n == 0) return out;
  out.mean = s.value() / static_cast<double>(n);
  neumaier_sum sq;
  for (const double v : vals) {
    if (std::isnan(v)) continue;
    const double d = v - out.mean;
    sq.add(d * d);
  }
  if (n > 1) {
    out.se_mean = std::sqrt(sq.value() / (static_cast<double>(n) *
                                          static_cast<double>(n - 1)));
  }
  return out;
}

inline double quantile_of(std::vector<double> vals, double q) {
  std::erase_if(vals, [](double v) { return std::isnan(v); });
  if (vals.empty()) return kNaN;
  const auto pos = static_cast<std::ptrdiff_t>(
      q * static_cast<double>(vals.size() - 1) + 0.5);
  std::nth_element(vals.begin(), vals.begin() + pos, vals.end());
  return vals[static_cast<std::size_t>(pos)];
}

}  // namespace detail

enum class McSource { sample, records };

inline const char* to_string(McSource s) {
  return s == McSource::sample ? "sample" : "records";
}

/// Monte Carlo summary of one estimator configuration.
struct McReport {
  std::string member_name;
  McSource source = McSource::sample;
  EstimandTransform transform = EstimandTransform::identity;
  std::size_t size = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double target = 0.0;   // true value of the estimand
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double se_mean = 0.0;
  double se_mse = 0.0;   // standard error of the mse estimate
  double median_error = 0.0;
  double mad_error = 0.0;  // median of |error|
  std::size_t failures = 0;
  std::vector<std::string> warnings;
};

/// Replicated fit of one member: draws either an i.i.d. sample of the given
/// size or that many lower records per replication, applies the matching MLE,
/// and summarizes the transformed estimates against the true value.
inline McReport mc_estimate(const FamilyMember& fam, double theta,
                            McSource source, std::size_t size,
                            std::size_t reps, std::uint64_t seed,
                            EstimandTransform transform =
                                EstimandTransform::identity,
                            unsigned lanes = 0) {
  fam.require_theta(theta);
  if (size == 0) throw argument_error("mc_estimate: size >= 1");

  std::vector<double> vals(reps, detail::kNaN);
  const std::size_t failures = detail::run_replications(
      reps, seed, lanes, [&](std::size_t i, Xoshiro256pp& rng) {
        EstimateResult est;
        if (source == McSource::sample) {
          const auto xs = sample_iid(fam, theta, size, rng);
          est = mle_theta_sample(fam, xs, transform);
        } else {
          const auto rec = simulate_lower_records(fam, theta, size, rng);
          est = mle_theta_records(fam, rec, transform);
        }
        vals[i] = est.value;
        return std::isfinite(est.theta_hat);
      });
  detail::check_failure_budget(failures, reps, "mc_estimate");

  McReport rep;
  rep.member_name = fam.name();
  rep.source = source;
  rep.transform = transform;
  rep.size = size;
  rep.reps = reps;
  rep.seed = seed;
  rep.failures = failures;
  rep.target =
      transform == EstimandTransform::exp ? std::exp(theta) : theta;

  const auto val_summary = detail::summarize(vals);
  rep.mean = val_summary.mean;
  rep.se_mean = val_summary.se_mean;
  rep.bias = rep.mean - rep.target;

  std::vector<double> sq_errors(vals.size(), detail::kNaN);
  std::vector<double> errors(vals.size(), detail::kNaN);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (std::isnan(vals[i])) continue;
    errors[i] = vals[i] - rep.target;
    sq_errors[i] = errors[i] * errors[i];
  }
  const auto mse_summary = detail::summarize(sq_errors);
  rep.mse = mse_summary.mean;
  rep.se_mse = mse_summary.se_mean;

  rep.median_error = detail::quantile_of(errors, 0.5);
  std::vector<double> abs_errors = errors;
  for (auto& e : abs_errors) e = std::abs(e);
  rep.mad_error = detail::quantile_of(abs_errors, 0.5);

  if (transform == EstimandTransform::exp) {
    rep.warnings.push_back(
        "exp-scale errors can have divergent moments (for the power member "
        "they do); median_error and mad_error are the stable summaries");
  }
  double max_abs = 0.0;
  for (const double e : abs_errors) {
    if (!std::isnan(e)) max_abs = std::max(max_abs, e);
  }
  if (rep.mad_error > 0.0 && max_abs > 1e6 * rep.mad_error) {
    rep.warnings.push_back(
        "error distribution is extremely heavy-tailed here (max |error| > "
        "1e6 x median |error|); mean and mse are unstable averages");
  }
  return rep;
}

/// Pointwise Monte Carlo curve for the record-based plug-in CDF or PDF.
struct McCurvePoint {
  double x = 0.0;
  double truth = 0.0;
  double mean = 0.0;
  double se_mean = 0.0;
  double emp_mse = 0.0;
  double se_mse = 0.0;
};

struct McCurve {
  std::string member_name;
  bool density = false;  // false: CDF plug-in, true: PDF plug-in
  std::size_t m = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
  std::vector<McCurvePoint> points;
};

inline McCurve mc_plugin_curve(const FamilyMember& fam, double theta,
                               std::size_t m, std::span<const double> xs,
                               bool density, std::size_t reps,
                               std::uint64_t seed, unsigned lanes = 0) {
  fam.require_theta(theta);
  if (m == 0) throw argument_error("mc_plugin_curve: m >= 1");
  if (xs.empty()) throw argument_error("mc_plugin_curve: empty grid");
  for (const double x : xs) fam.require_support(x);

  const std::size_t k = xs.size();
  std::vector<double> table(reps * k, detail::kNaN);
  const std::size_t failures = detail::run_replications(
      reps, seed, lanes, [&](std::size_t i, Xoshiro256pp& rng) {
        const auto rec = simulate_lower_records(fam, theta, m, rng);
        const auto est = mle_theta_records(fam, rec);
        for (std::size_t j = 0; j < k; ++j) {
          table[i * k + j] = density ? plugin_pdf(fam, est, xs[j])
                                     : plugin_cdf(fam, est, xs[j]);
        }
        return true;
      });
  detail::check_failure_budget(failures, reps, "mc_plugin_curve");

  McCurve curve;
  curve.member_name = fam.name();
  curve.density = density;
  curve.m = m;
  curve.reps = reps;
  curve.seed = seed;
  curve.failures = failures;
  curve.points.resize(k);
  std::vector<double> col(reps), sq(reps);
  for (std::size_t j = 0; j < k; ++j) {
    auto& pt = curve.points[j];
    pt.x = xs[j];
    pt.truth = density ? pdf(fam, theta, xs[j]) : cdf(fam, theta, xs[j]);
    for (std::size_t i = 0; i < reps; ++i) {
      col[i] = table[i * k + j];
      const double e = col[i] - pt.truth;
      sq[i] = std::isnan(col[i]) ? detail::kNaN : e * e;
    }
    const auto ms = detail::summarize(col);
    pt.mean = ms.mean;
    pt.se_mean = ms.se_mean;
    const auto qs = detail::summarize(sq);
    pt.emp_mse = qs.mean;
    pt.se_mse = qs.se_mean;
  }
  return curve;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double n_effective = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic tail probability.
inline KsResult ks_two_sample(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() < 10 || b.size() < 10) {
    throw argument_error("ks_two_sample: need at least 10 points per sample");
  }
  std::vector<double> s1(a.begin(), a.end());
  std::vector<double> s2(b.begin(), b.end());
  std::sort(s1.begin(), s1.end());
  std::sort(s2.begin(), s2.end());
  const double n1 = static_cast<double>(s1.size());
  const double n2 = static_cast<double>(s2.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < s1.size() && j < s2.size()) {
    const double v = std::min(s1[i], s2[j]);
    while (i < s1.size() && s1[i] == v) ++i;
    while (j < s2.size() && s2[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 -
                             static_cast<double>(j) / n2));
  }
  KsResult r;
  r.statistic = d;
  r.n_effective = n1 * n2 / (n1 + n2);
  const double sqn = std::sqrt(r.n_effective);
  r.p_value = detail::kolmogorov_q((sqn + 0.12 + 0.11 / sqn) * d);
  return r;
}

/// One-sample Kolmogorov-Smirnov test of values against Gamma(shape, rate).
inline KsResult ks_gamma_gof(std::span<const double> values, std::size_t shape,
                             double rate) {
  if (values.size() < 10) {
    throw argument_error("ks_gamma_gof: need at least 10 points");
  }
  if (shape == 0) throw argument_error("ks_gamma_gof: shape >= 1");
  if (!(rate > 0.0)) throw argument_error("ks_gamma_gof: rate must be positive");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t idx = 0; idx < s.size(); ++idx) {
    if (!(s[idx] >= 0.0)) {
      throw domain_error("ks_gamma_gof: negative value against a Gamma law");
    }
    const double cdf_val =
        detail::gamma_p(static_cast<double>(shape), rate * s[idx]);
    const double hi = static_cast<double>(idx + 1) / n - cdf_val;
    const double lo = cdf_val - static_cast<double>(idx) / n;
    d = std::max(d, std::max(hi, lo));
  }
  KsResult r;
  r.statistic = d;
  r.n_effective = n;
  const double sqn = std::sqrt(n);
  r.p_value = detail::kolmogorov_q((sqn + 0.12 + 0.11 / sqn) * d);
  return r;
}

/// One row per record count: how concentrated the record MLE is around the
/// truth, plus the empirical exceedance P(|theta_hat - theta| > eps).
struct ConsistencyRow {
  std::size_t m = 0;
  double exceedance = 0.0;
  double se_exceedance = 0.0;
  double emp_mse = 0.0;
  double se_mse = 0.0;
  std::size_t failures = 0;
};

inline std::vector<ConsistencyRow> consistency_curve(
    const FamilyMember& fam, double theta, std::span<const std::size_t> ms,
    double eps, std::size_t reps, std::uint64_t seed, unsigned lanes = 0) {
  fam.require_theta(theta);
  if (!(eps > 0.0)) throw argument_error("consistency_curve: eps must be > 0");
  if (ms.empty()) throw argument_error("consistency_curve: empty m list");
  std::vector<ConsistencyRow> rows;
  rows.reserve(ms.size());
  for (std::size_t idx = 0; idx < ms.size(); ++idx) {
    const std::size_t m = ms[idx];
    // Decorrelate the per-m sub-experiments without consuming the caller seed.
    std::uint64_t mix = seed ^ (0x9e3779b97f4a7c15ULL * (idx + 1));
    const std::uint64_t sub_seed = detail::splitmix64_next(mix);
    std::vector<double> vals(reps, detail::kNaN);
    const std::size_t failures = detail::run_replications(
        reps, sub_seed, lanes, [&](std::size_t i, Xoshiro256pp& rng) {
          const auto rec = simulate_lower_records(fam, theta, m, rng);
          vals[i] = mle_theta_records(fam, rec).theta_hat;
          return std::isfinite(vals[i]);
        });
    detail::check_failure_budget(failures, reps, "consistency_curve");
    ConsistencyRow row;
    row.m = m;
    row.failures = failures;
    std::size_t n_valid = 0, n_exceed = 0;
    std::vector<double> sq(reps, detail::kNaN);
    for (std::size_t i = 0; i < reps; ++i) {
      if (std::isnan(vals[i])) continue;
      ++n_valid;
      const double e = vals[i] - theta;
      sq[i] = e * e;
      if (std::abs(e) > eps) ++n_exceed;
    }
    if (n_valid > 0) {
      row.exceedance =
          static_cast<double>(n_exceed) / static_cast<double>(n_valid);
      row.se_exceedance = std::sqrt(
          row.exceedance * (1.0 - row.exceedance) / static_cast<double>(n_valid));
    }
    const auto ms_sq = detail::summarize(sq);
    row.emp_mse = ms_sq.mean;
    row.se_mse = ms_sq.se_mean;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace recmle
