#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "recmle/analytic.hpp"
#include "recmle/curves.hpp"
#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/estimators.hpp"
#include "recmle/family.hpp"
#include "recmle/montecarlo.hpp"
#include "recmle/quadrature.hpp"
#include "recmle/records.hpp"
#include "recmle/report.hpp"

namespace recmle {

/// One verification criterion: a fixed numbered check with pinned tolerances.
struct VerifyResult {
  int id = 0;
  std::string section;
  bool passed = false;
  std::vector<std::string> details;
};

namespace detail {

inline void check(VerifyResult& r, bool ok, const std::string& what) {
  if (!ok) r.passed = false;
  r.details.push_back(std::string(ok ? "ok: " : "FAIL: ") + what);
}

}  // namespace detail

/// Exp-scale comparison finding: formal-series MSE of exp(theta_hat) from
/// m = 2 records against samples of size n in {5..8}, over a theta grid.
/// Emitted as data, not asserted: the underlying true MSE diverges on both
/// sides, so "wins" here compare truncations, and the table shows where the
/// claim holds and where it flips.
inline json exp_scale_finding_json() {
  json rows = json::array();
  for (const double theta : {0.1, 0.5, 1.0, 2.0}) {
    const double records_m2 = mse_exp_theta_series(2, theta).value;
    for (std::size_t n = 5; n <= 8; ++n) {
      const double sample_n = mse_exp_theta_series(n, theta).value;
      json row;
      row["theta"] = theta;
      row["m_records"] = 2;
      row["n_sample"] = n;
      row["formal_mse_records_m2"] = records_m2;
      row["formal_mse_sample_n"] = sample_n;
      row["records_win"] = records_m2 < sample_n;
      rows.push_back(std::move(row));
    }
  }
  json finding;
  finding["name"] = "exp-scale-records-vs-samples";
  finding["note"] =
      "values are formal truncations (the exp-scale MSE integral diverges); "
      "comparisons are between truncations only";
  finding["rows"] = std::move(rows);
  return finding;
}

namespace detail {

// 1. Exact closed-form MSE of theta_hat vs Monte Carlo, power member.
inline VerifyResult criterion_example1(std::uint64_t seed, unsigned lanes) {
  VerifyResult r{1, "example1", true, {}};
  const auto fam = power_function();
  const double exact3 = mse_theta_power_exact(3, 1.0);
  check(r, std::abs(exact3 - 2.5) < 1e-14,
        "closed form at n=3 equals 2.5 (got " + fmt_g17(exact3) + ")");
  const double wrong3 = mse_theta_power_exact(3, 1.0, true);
  check(r, wrong3 < 0.0 && std::abs(wrong3 + 0.5) < 1e-14,
        "uncorrected closed form at n=3 is -0.5: negative, impossible for a "
        "mean squared error, and kept only to display the discrepancy (got " +
            fmt_g17(wrong3) + ")");
  for (const std::size_t n : {std::size_t{3}, std::size_t{5}, std::size_t{10},
                              std::size_t{30}}) {
    const double exact = mse_theta_power_exact(n, 1.0);
    const auto rep =
        mc_estimate(fam, 1.0, McSource::records, n, 100000,
                    derive_seed(seed, "example1-n" + std::to_string(n)),
                    EstimandTransform::identity, lanes);
    const double diff = std::abs(rep.mse - exact);
    check(r, diff <= 3.0 * rep.se_mse,
          "n=" + std::to_string(n) + ": |mc mse - exact| = " + fmt_g17(diff) +
              " <= 3 se = " + fmt_g17(3.0 * rep.se_mse) + " (exact " +
              fmt_g17(exact) + ", mc " + fmt_g17(rep.mse) + ")");
  }
  return r;
}

// 2. Equality in law of sample-based and record-based MLEs at n = m.
inline VerifyResult criterion_theorem1(std::uint64_t seed, unsigned lanes) {
  VerifyResult r{2, "theorem1", true, {}};
  struct Case {
    FamilyMember fam;
    double theta;
  };
  const Case cases[] = {{power_function(), 1.0}, {gumbel(), 0.0},
                        {frechet(2.0), 1.0}};
  constexpr std::size_t kReps = 10000, kSize = 8;
  for (const auto& c : cases) {
    std::vector<double> from_sample(kReps), from_records(kReps);
    run_replications(
        kReps, derive_seed(seed, "theorem1-sample-" + c.fam.name()), lanes,
        [&](std::size_t i, Xoshiro256pp& rng) {
          const auto xs = sample_iid(c.fam, c.theta, kSize, rng);
          from_sample[i] = mle_theta_sample(c.fam, xs).theta_hat;
          return true;
        });
    run_replications(
        kReps, derive_seed(seed, "theorem1-records-" + c.fam.name()), lanes,
        [&](std::size_t i, Xoshiro256pp& rng) {
          const auto rec = simulate_lower_records(c.fam, c.theta, kSize, rng);
          from_records[i] = mle_theta_records(c.fam, rec).theta_hat;
          return true;
        });
    const auto ks = ks_two_sample(from_sample, from_records);
    check(r, ks.p_value > 0.01,
          c.fam.name() + ": two-sample KS p = " + fmt_g17(ks.p_value) +
              " > 0.01 (D = " + fmt_g17(ks.statistic) + ")");
  }
  return r;
}

// 3. A(last record) follows Gamma(m, B(theta)).
inline VerifyResult criterion_recordlaw(std::uint64_t seed, unsigned lanes) {
  VerifyResult r{3, "recordlaw", true, {}};
  const auto fam = power_function();
  constexpr std::size_t kReps = 10000, kM = 5;
  constexpr double kTheta = 2.0;
  std::vector<double> stats(kReps);
  run_replications(kReps, derive_seed(seed, "recordlaw"), lanes,
                   [&](std::size_t i, Xoshiro256pp& rng) {
                     const auto rec =
                         simulate_lower_records(fam, kTheta, kM, rng);
                     stats[i] = fam.a(rec.values.back());
                     return true;
                   });
  const auto ks = ks_gamma_gof(stats, kM, fam.b(kTheta));
  check(r, ks.p_value > 0.01,
        "KS of A(R'_5) against Gamma(5, rate 2): p = " + fmt_g17(ks.p_value) +
            " > 0.01 (D = " + fmt_g17(ks.statistic) + ")");
  return r;
}

// 4. Plug-in CDF mean series at m=5, z=1: exact fraction, quadrature, MC.
inline VerifyResult criterion_theorem2(std::uint64_t seed, unsigned lanes) {
  VerifyResult r{4, "theorem2", true, {}};
  const auto fam = power_function();
  const double x = std::exp(-0.2);  // A(x) = 0.2, so m A B = 1 at m = 5
  constexpr std::size_t kM = 5;
  const auto ev = expectation_cdf_plugin_series(fam, 1.0, x, kM);
  const double target = 453.0 / 576.0;
  check(r, std::abs(ev.value - target) <= 1e-12,
        "series value " + fmt_g17(ev.value) + " equals 453/576 = " +
            fmt_g17(target) + " within 1e-12");
  const double quad = gamma_expectation_quadrature(
      [&](double t) { return std::exp(-(5.0 * fam.a(x)) / t); }, kM,
      fam.b(1.0));
  check(r, std::abs(ev.value - quad) <= 1e-2,
        "series vs quadrature: |" + fmt_g17(ev.value) + " - " + fmt_g17(quad) +
            "| <= 1e-2 (truncation gap is real but small here)");
  const double xs[1] = {x};
  const auto curve = mc_plugin_curve(fam, 1.0, kM, xs, false, 100000,
                                     derive_seed(seed, "theorem2"), lanes);
  const double tol = std::max(3.0 * curve.points[0].se_mean, 1e-2);
  check(r, std::abs(curve.points[0].mean - ev.value) <= tol,
        "series vs MC mean: |" + fmt_g17(ev.value) + " - " +
            fmt_g17(curve.points[0].mean) + "| <= " + fmt_g17(tol));
  return r;
}

// 5. Truncation error of the mean series shrinks with m (CDF and PDF).
inline VerifyResult criterion_theorem4(std::uint64_t, unsigned) {
  VerifyResult r{5, "theorem4", true, {}};
  const auto fam = power_function();
  const double x_cdf = 0.8;
  const double f_cdf = cdf(fam, 1.0, x_cdf);
  const double e10 =
      std::abs(expectation_cdf_plugin_series(fam, 1.0, x_cdf, 10).value - f_cdf);
  const auto ev80 = expectation_cdf_plugin_series(fam, 1.0, x_cdf, 80);
  const double e80 = std::abs(ev80.value - f_cdf);
  check(r, e80 < e10, "CDF mean series bias at m=80 (" + fmt_g17(e80) +
                          ") < bias at m=10 (" + fmt_g17(e10) + ")");
  check(r, e80 < 0.02 * f_cdf,
        "CDF mean series bias at m=80 below 0.02 F = " + fmt_g17(0.02 * f_cdf));
  const double quad80 = gamma_expectation_quadrature(
      [&](double t) { return std::exp(-80.0 * fam.a(x_cdf) / t); }, 80,
      fam.b(1.0));
  check(r, std::abs(ev80.value - quad80) <= 1e-8,
        "series at m=80 agrees with quadrature: |" + fmt_g17(ev80.value) +
            " - " + fmt_g17(quad80) + "| <= 1e-8");

  const double x_pdf = 0.5;
  const double f_pdf = pdf(fam, 1.0, x_pdf);
  const double p10 =
      std::abs(expectation_pdf_plugin_series(fam, 1.0, x_pdf, 10).value - f_pdf);
  const double p80 =
      std::abs(expectation_pdf_plugin_series(fam, 1.0, x_pdf, 80).value - f_pdf);
  check(r, p80 < p10, "PDF mean series bias at m=80 (" + fmt_g17(p80) +
                          ") < bias at m=10 (" + fmt_g17(p10) + ")");
  check(r, p80 < 0.02 * f_pdf,
        "PDF mean series bias at m=80 below 0.02 f = " + fmt_g17(0.02 * f_pdf));
  return r;
}

// 6. Consistency: exceedance and pointwise plug-in MSE fall with m.
inline VerifyResult criterion_consistency(std::uint64_t seed, unsigned lanes) {
  VerifyResult r{6, "consistency", true, {}};
  const auto fam = power_function();
  const std::size_t ms[] = {10, 40};
  const auto rows = consistency_curve(fam, 1.0, ms, 0.2, 10000,
                                      derive_seed(seed, "consistency"), lanes);
  check(r, rows[1].exceedance <= 0.5 * rows[0].exceedance,
        "P(|theta_hat - 1| > 0.2): m=40 gives " + fmt_g17(rows[1].exceedance) +
            " <= half of m=10's " + fmt_g17(rows[0].exceedance));
  std::vector<double> xs;
  for (int j = 1; j <= 9; ++j) xs.push_back(0.1 * j);
  const auto c5 = mc_plugin_curve(fam, 1.0, 5, xs, false, 10000,
                                  derive_seed(seed, "consistency-m5"), lanes);
  const auto c40 = mc_plugin_curve(fam, 1.0, 40, xs, false, 10000,
                                   derive_seed(seed, "consistency-m40"), lanes);
  bool all_lower = true;
  double worst_ratio = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    all_lower = all_lower && c40.points[j].emp_mse < c5.points[j].emp_mse;
    worst_ratio = std::max(worst_ratio, c40.points[j].emp_mse /
                                            c5.points[j].emp_mse);
  }
  check(r, all_lower,
        "empirical MSE of the CDF plug-in is lower at m=40 than m=5 at every "
        "grid x (worst m40/m5 ratio " +
            fmt_g17(worst_ratio) + ")");
  return r;
}

// 7. Inverse-moment overshoot ratio: near 1 at huge n, decreasing in n.
inline VerifyResult criterion_lemma1(std::uint64_t, unsigned) {
  VerifyResult r{7, "lemma1", true, {}};
  for (const std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{2},
                              std::size_t{3}}) {
    const double v = lemma1_ratio(1000000, i);
    check(r, v >= 1.0 && v <= 1.00002,
          "lemma1_ratio(1e6, " + std::to_string(i) + ") = " + fmt_g17(v) +
              " in [1, 1.00002]");
  }
  double prev = kInf;
  bool decreasing = true;
  for (const std::size_t n :
       {std::size_t{100}, std::size_t{1000}, std::size_t{10000},
        std::size_t{100000}, std::size_t{1000000}}) {
    const double v = lemma1_ratio(n, 1);
    decreasing = decreasing && v < prev;
    prev = v;
  }
  check(r, decreasing,
        "lemma1_ratio(n, 1) strictly decreasing along n = 1e2..1e6");
  return r;
}

// 8. Exp-scale formal series: oracle agreement plus the comparison finding.
inline VerifyResult criterion_example2(std::uint64_t, unsigned) {
  VerifyResult r{8, "example2", true, {}};
  // Independent oracle: naive direct summation in extended precision.
  const auto direct = [](std::size_t n, double theta) {
    const long double th = theta;
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double term =
          std::pow(static_cast<long double>(n) * th,
                   static_cast<long double>(i)) /
          std::tgamma(static_cast<long double>(i) + 1.0L) *
          std::tgamma(static_cast<long double>(n - i)) /
          std::tgamma(static_cast<long double>(n)) *
          (std::pow(2.0L, static_cast<long double>(i)) -
           2.0L * std::exp(th));
      sum += term;
    }
    sum += std::exp(2.0L * th);
    return static_cast<double>(sum);
  };
  double worst = 0.0;
  for (const std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3},
                              std::size_t{5}, std::size_t{8}, std::size_t{13},
                              std::size_t{21}, std::size_t{34},
                              std::size_t{50}}) {
    for (const double theta : {0.1, 0.5, 1.0, 2.0}) {
      const double mine = mse_exp_theta_series(n, theta).value;
      const double oracle = direct(n, theta);
      const double rel =
          std::abs(mine - oracle) / std::max(std::abs(oracle), 1e-300);
      worst = std::max(worst, rel);
    }
  }
  check(r, worst <= 1e-12,
        "formal series matches direct-summation oracle: worst relative "
        "difference " +
            fmt_g17(worst) + " <= 1e-12 over n <= 50, theta in {0.1,0.5,1,2}");
  const double v21 = mse_exp_theta_series(2, 1.0).value;
  const double exact21 = 5.0 - 6.0 * std::exp(1.0) + std::exp(2.0);
  check(r, std::abs(v21 - exact21) <= 1e-12,
        "n=2, theta=1 equals 5 - 6e + e^2 = " + fmt_g17(exact21));
  check(r, mse_exp_theta_series(2, 1.0).formal_only,
        "series is flagged formal-only");
  const json finding = exp_scale_finding_json();
  check(r, finding["rows"].size() == 16,
        "records-vs-samples finding report produced (16 rows over the theta "
        "grid)");
  return r;
}

// 9. Byte determinism of the curve table across runs and lane counts.
inline VerifyResult criterion_determinism(std::uint64_t seed, unsigned) {
  VerifyResult r{9, "determinism", true, {}};
  const auto fam = power_function();
  const auto build = [&](unsigned lanes) {
    return mse_curve_csv(build_mse_curve(fam, 1.0, Estimand::theta, 0.0, 3, 12,
                                         1, 2000, seed, lanes));
  };
  const std::string a = build(1);
  const std::string b = build(4);
  const std::string c = build(1);
  check(r, a == c, "identical config and seed reproduce identical CSV bytes");
  check(r, a == b,
        "CSV bytes are identical across parallelism widths (1 lane vs 4)");
  check(r, !a.empty() && a.rfind("n,analytic,flag,mc_mse,mc_se\n", 0) == 0,
        "curve CSV carries the fixed header");
  return r;
}

// 10. Shape of the exact MSE curve: decreasing, below 0.01 theta^2 by n=300.
inline VerifyResult criterion_figure1(std::uint64_t, unsigned) {
  VerifyResult r{10, "figure1", true, {}};
  bool decreasing = true;
  double prev = kInf;
  for (std::size_t n = 3; n <= 300; ++n) {
    const double v = mse_theta_power_exact(n, 1.0);
    decreasing = decreasing && v < prev;
    prev = v;
  }
  check(r, decreasing, "exact MSE strictly decreasing over n = 3..300");
  const double v300 = mse_theta_power_exact(300, 1.0);
  check(r, v300 < 0.01,
        "exact MSE at n=300 is " + fmt_g17(v300) + " < 0.01 theta^2");
  return r;
}

}  // namespace detail

inline const std::vector<std::string>& verify_sections() {
  static const std::vector<std::string> kSections = {
      "example1", "theorem1", "recordlaw",   "theorem2",    "theorem4",
      "consistency", "lemma1", "example2", "determinism", "figure1"};
  return kSections;
}

/// Run the numbered verification criteria. `section` is "all" or one of
/// verify_sections(); unknown names raise argument_error.
inline std::vector<VerifyResult> verify_run(std::uint64_t seed,
                                            const std::string& section = "all",
                                            unsigned lanes = 0) {
  using Runner = VerifyResult (*)(std::uint64_t, unsigned);
  static const std::pair<const char*, Runner> kRunners[] = {
      {"example1", detail::criterion_example1},
      {"theorem1", detail::criterion_theorem1},
      {"recordlaw", detail::criterion_recordlaw},
      {"theorem2", detail::criterion_theorem2},
      {"theorem4", detail::criterion_theorem4},
      {"consistency", detail::criterion_consistency},
      {"lemma1", detail::criterion_lemma1},
      {"example2", detail::criterion_example2},
      {"determinism", detail::criterion_determinism},
      {"figure1", detail::criterion_figure1},
  };
  if (section != "all") {
    bool known = false;
    for (const auto& name : verify_sections()) known = known || name == section;
    if (!known) {
      throw argument_error("verify: unknown section '" + section + "'");
    }
  }
  std::vector<VerifyResult> out;
  for (const auto& [name, runner] : kRunners) {
    if (section == "all" || section == name) out.push_back(runner(seed, lanes));
  }
  return out;
}

inline json to_json(const VerifyResult& r) {
  json j;
  j["id"] = r.id;
  j["section"] = r.section;
  j["passed"] = r.passed;
  j["details"] = r.details;
  return j;
}

}  // namespace recmle
