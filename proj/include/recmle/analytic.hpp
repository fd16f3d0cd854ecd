#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/estimators.hpp"
#include "recmle/family.hpp"
#include "recmle/quadrature.hpp"

namespace recmle {

/// Result of a truncated moment series. These series are finite for a hard
/// reason: the underlying inverse-gamma moments E[T^{-i}] stop existing at
/// i = m, so summation is forced to stop. In the convergent regime the last
/// kept term is tiny and the value is sharp; outside it the last term is the
/// honest measure of how wrong the truncation may be.
struct SeriesEvaluation {
  double value = 0.0;
  std::size_t truncation_index = 0;   // largest term index kept
  double last_term_magnitude = 0.0;   // |final kept term|
  bool formal_only = false;           // true when the target moment diverges
  std::vector<std::string> warnings;

  bool converged_hint() const {
    return last_term_magnitude <=
           0.05 * std::max(std::abs(value), 1e-300);
  }
};

namespace detail {

inline void add_truncation_warning(SeriesEvaluation& ev) {
  if (!ev.converged_hint()) {
    ev.warnings.push_back(
        "last kept term (" + fmt_g17(ev.last_term_magnitude) +
        ") is not small against the value (" + fmt_g17(ev.value) +
        "); truncated series is outside its convergent regime here");
  }
}

// sign * log-magnitude of (2^i - 2*s) for s > 0, stable for any i and s.
inline void log_two_pow_minus(double i, double log_s, double& sign,
                              double& logmag) {
  const double la = i * std::numbers::ln2;
  const double lb = std::numbers::ln2 + log_s;
  if (la > lb) {
    sign = 1.0;
    logmag = la + std::log1p(-std::exp(lb - la));
  } else if (lb > la) {
    sign = -1.0;
    logmag = lb + std::log1p(-std::exp(la - lb));
  } else {
    sign = 0.0;
    logmag = -kInf;
  }
}

}  // namespace detail

/// E[T^{-k}] for T ~ Gamma(m, rate): rate^k Gamma(m-k) / Gamma(m).
/// The moment does not exist for k >= m.
inline double negative_gamma_moment(std::size_t m, std::size_t k,
                                    double rate) {
  if (m == 0) throw argument_error("negative_gamma_moment: m >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw argument_error("negative_gamma_moment: rate must be positive");
  }
  if (k >= m) {
    throw moment_error("negative_gamma_moment: E[T^-" + std::to_string(k) +
                       "] diverges for a Gamma(" + std::to_string(m) +
                       ") variable (order must be < shape)");
  }
  if (k == 0) return 1.0;
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(rate) + std::lgamma(md - kd) -
                  std::lgamma(md));
}

/// Mean of the record-based plug-in CDF at x, from m records:
///   E[F_hat(x)] = sum_{i=0}^{m-1} (-z)^i Gamma(m-i) / (Gamma(m) Gamma(i+1)),
/// with z = m A(x) B(theta). The sum stops at i = m-1 because higher inverse
/// moments of the Gamma statistic diverge.
inline SeriesEvaluation expectation_cdf_plugin_series(const FamilyMember& fam,
                                                      double theta, double x,
                                                      std::size_t m) {
  fam.require_theta(theta);
  fam.require_support(x);
  if (m == 0) throw argument_error("expectation_cdf_plugin_series: m >= 1");
  const double md = static_cast<double>(m);
  const double z = md * fam.a(x) * fam.b(theta);
  const double logz = z > 0.0 ? std::log(z) : -detail::kInf;

  SeriesEvaluation ev;
  detail::neumaier_sum sum;
  double last = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double id = static_cast<double>(i);
    const double logmag = std::lgamma(md - id) - std::lgamma(md) -
                          std::lgamma(id + 1.0) + (i == 0 ? 0.0 : id * logz);
    const double term = (i % 2 == 0 ? 1.0 : -1.0) * std::exp(logmag);
    sum.add(term);
    last = term;
  }
  ev.value = sum.value();
  ev.truncation_index = m - 1;
  ev.last_term_magnitude = std::abs(last);
  detail::add_truncation_warning(ev);
  return ev;
}

/// Mean of the record-based plug-in PDF at x, from m records:
///   E[f_hat(x)] = -A'(x) sum_{i=0}^{m-2} (-1)^i (mB)^{i+1} A(x)^i
///                 Gamma(m-i-1) / (Gamma(m) Gamma(i+1)).
/// Needs m >= 2: with a single record every inverse moment in the expansion
/// already diverges.
inline SeriesEvaluation expectation_pdf_plugin_series(const FamilyMember& fam,
                                                      double theta, double x,
                                                      std::size_t m) {
  fam.require_theta(theta);
  fam.require_support(x);
  if (m < 2) {
    throw series_error(
        "expectation_pdf_plugin_series: undefined for m < 2 (no finite "
        "moment term exists)");
  }
  const double md = static_cast<double>(m);
  const double a = fam.a(x);
  const double log_a = a > 0.0 ? std::log(a) : -detail::kInf;
  const double log_mb = std::log(md * fam.b(theta));
  const double log_nap = std::log(-fam.a_prime(x));

  SeriesEvaluation ev;
  detail::neumaier_sum sum;
  double last = 0.0;
  for (std::size_t i = 0; i + 2 <= m; ++i) {
    const double id = static_cast<double>(i);
    const double logmag = std::lgamma(md - id - 1.0) - std::lgamma(md) -
                          std::lgamma(id + 1.0) + (id + 1.0) * log_mb +
                          (i == 0 ? 0.0 : id * log_a) + log_nap;
    const double term = (i % 2 == 0 ? 1.0 : -1.0) * std::exp(logmag);
    sum.add(term);
    last = term;
  }
  ev.value = sum.value();
  ev.truncation_index = m - 2;
  ev.last_term_magnitude = std::abs(last);
  detail::add_truncation_warning(ev);
  return ev;
}

/// Mean squared error of the record-based plug-in CDF at x, from m records:
///   MSE[F_hat(x)] = sum_{i=0}^{m-1} (-z)^i Gamma(m-i) / (Gamma(m) Gamma(i+1))
///                   * (2^i - 2 F(x)) + F(x)^2,
/// z as above. Expands E[F_hat^2] - 2 F E[F_hat] + F^2 term by term; the
/// doubled argument in the squared moment is what produces the 2^i factor.
inline SeriesEvaluation mse_cdf_plugin_series(const FamilyMember& fam,
                                              double theta, double x,
                                              std::size_t m) {
  fam.require_theta(theta);
  fam.require_support(x);
  if (m == 0) throw argument_error("mse_cdf_plugin_series: m >= 1");
  const double md = static_cast<double>(m);
  const double ab = fam.a(x) * fam.b(theta);
  const double z = md * ab;
  const double logz = z > 0.0 ? std::log(z) : -detail::kInf;
  const double cdf_val = std::exp(-ab);

  SeriesEvaluation ev;
  detail::neumaier_sum sum;
  double last = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double id = static_cast<double>(i);
    const double base = std::lgamma(md - id) - std::lgamma(md) -
                        std::lgamma(id + 1.0) + (i == 0 ? 0.0 : id * logz);
    const double alt = i % 2 == 0 ? 1.0 : -1.0;
    double term;
    if (i <= 62) {
      term = alt * (std::ldexp(1.0, static_cast<int>(i)) - 2.0 * cdf_val) *
             std::exp(base);
    } else {
      double fsign, flog;
      detail::log_two_pow_minus(id, std::log(cdf_val), fsign, flog);
      term = alt * fsign * std::exp(base + flog);
    }
    sum.add(term);
    last = term;
  }
  sum.add(cdf_val * cdf_val);
  ev.value = sum.value();
  ev.truncation_index = m - 1;
  ev.last_term_magnitude = std::abs(last);
  detail::add_truncation_warning(ev);
  if (ev.value < 0.0) {
    ev.warnings.push_back(
        "truncated value is negative; a squared error cannot be, so the "
        "expansion has broken down at this point");
  }
  return ev;
}

/// Mean squared error of the record-based plug-in PDF at x, from m records.
/// Assembled as E[f_hat^2] - 2 f E[f_hat] + f^2 from the moment series
///   E[f_hat^2] = A'(x)^2 sum_{i=0}^{m-3} (-2)^i (mB)^{i+2} A(x)^i
///                Gamma(m-i-2) / (Gamma(m) Gamma(i+1)).
/// Needs m >= 3 for the squared moment to have any finite term.
inline SeriesEvaluation mse_pdf_plugin(const FamilyMember& fam, double theta,
                                       double x, std::size_t m) {
  fam.require_theta(theta);
  fam.require_support(x);
  if (m < 3) {
    throw moment_error(
        "mse_pdf_plugin: undefined for m < 3 (squared plug-in density has "
        "no finite moment term)");
  }
  const double md = static_cast<double>(m);
  const double a = fam.a(x);
  const double log_a = a > 0.0 ? std::log(a) : -detail::kInf;
  const double log_mb = std::log(md * fam.b(theta));
  const double log_nap = std::log(-fam.a_prime(x));
  const double f = pdf(fam, theta, x);

  const SeriesEvaluation mean_eval =
      expectation_pdf_plugin_series(fam, theta, x, m);

  SeriesEvaluation ev;
  detail::neumaier_sum sq;
  double last = 0.0;
  for (std::size_t i = 0; i + 3 <= m; ++i) {
    const double id = static_cast<double>(i);
    const double logmag = std::lgamma(md - id - 2.0) - std::lgamma(md) -
                          std::lgamma(id + 1.0) + id * std::numbers::ln2 +
                          (id + 2.0) * log_mb +
                          (i == 0 ? 0.0 : id * log_a) + 2.0 * log_nap;
    const double term = (i % 2 == 0 ? 1.0 : -1.0) * std::exp(logmag);
    sq.add(term);
    last = term;
  }
  sq.add(-2.0 * f * mean_eval.value);
  sq.add(f * f);
  ev.value = sq.value();
  ev.truncation_index = m - 3;
  ev.last_term_magnitude = std::abs(last);
  ev.warnings = mean_eval.warnings;
  ev.warnings.push_back(
      "assembled as E[fhat^2] - 2 f E[fhat] + f^2 from the moment series");
  detail::add_truncation_warning(ev);
  if (ev.value < 0.0) {
    ev.warnings.push_back(
        "truncated value is negative; a squared error cannot be, so the "
        "expansion has broken down at this point");
  }
  return ev;
}

/// Exact MSE of the parameter MLE for the power-function member with n
/// observations (equivalently, with n records):
///   MSE = theta^2 (n + 2) / ((n - 1)(n - 2)),
/// from E[theta_hat] = n theta / (n-1), E[theta_hat^2] = n^2 theta^2 /
/// ((n-1)(n-2)). Needs n >= 3 or the second moment diverges.
///
/// `uncorrected` switches to an alternate closed form that circulates with a
/// slip in its cross term, theta^2 (n^2/((n-2)(n-1)) - 2n/(n-2) + 1); it goes
/// negative at small n (-0.5 theta^2 at n = 3), which no mean squared error
/// can, and is kept only so tools can display the discrepancy.
inline double mse_theta_power_exact(std::size_t n, double theta,
                                    bool uncorrected = false) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw parameter_error("mse_theta_power_exact: theta must be positive");
  }
  if (n < 3) {
    throw moment_error(
        "mse_theta_power_exact: E[theta_hat^2] diverges for n < 3");
  }
  const double nd = static_cast<double>(n);
  if (uncorrected) {
    return theta * theta *
           (nd * nd / ((nd - 2.0) * (nd - 1.0)) - 2.0 * nd / (nd - 2.0) + 1.0);
  }
  return theta * theta * (nd + 2.0) / ((nd - 1.0) * (nd - 2.0));
}

/// Truncated MSE series for exp(theta_hat) as an estimator of exp(theta),
/// power-function member, n observations:
///   sum_{i=0}^{n-1} (n theta)^i Gamma(n-i) / (Gamma(i+1) Gamma(n))
///     * (2^i - 2 e^theta) + e^{2 theta}.
/// Marked formal_only: E[exp(2 theta_hat)] = E[exp(2n/T)] is a divergent
/// integral for every n, so no finite truncation can converge to a true MSE.
/// Terms are built in extended precision so the truncated sum itself is
/// reproducible to ~1e-14 relative.
inline SeriesEvaluation mse_exp_theta_series(std::size_t n, double theta) {
  if (n == 0) throw argument_error("mse_exp_theta_series: n >= 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw parameter_error("mse_exp_theta_series: theta must be positive");
  }
  const long double nt = static_cast<long double>(n) * theta;
  const long double two_exp_theta = 2.0L * std::exp(static_cast<long double>(theta));

  SeriesEvaluation ev;
  ev.formal_only = true;
  long double sum = 0.0L, comp = 0.0L;
  const auto add = [&](long double v) {
    const long double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  };

  // base_i = (n theta)^i Gamma(n-i) / (Gamma(i+1) Gamma(n)), kept by the
  // recurrence base_{i+1} = base_i * n theta / ((n-1-i)(i+1)).
  long double base = 1.0L;
  long double pow2 = 1.0L;
  double last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double term = base * (pow2 - two_exp_theta);
    add(term);
    last = static_cast<double>(term);
    if (i + 1 < n) {
      base *= nt / (static_cast<long double>(n - 1 - i) *
                    static_cast<long double>(i + 1));
      pow2 *= 2.0L;
    }
  }
  add(std::exp(2.0L * static_cast<long double>(theta)));
  ev.value = static_cast<double>(sum + comp);
  ev.truncation_index = n - 1;
  ev.last_term_magnitude = std::abs(last);
  ev.warnings.push_back(
      "E[exp(2 theta_hat)] is a divergent integral for every n; this value "
      "is the formal truncation, not a convergent MSE");
  detail::add_truncation_warning(ev);
  return ev;
}

/// n^{i+1} / ((n-1)(n-2)...(n-i-1)): the factor by which the (i+1)-th inverse
/// moment of the sufficient statistic overshoots 1. Tends to 1 from above as
/// n grows with i fixed, which is what drives the large-sample collapse of
/// the series remainders. Needs n >= i + 2 so every factor is positive.
inline double lemma1_ratio(std::size_t n, std::size_t i) {
  if (n < i + 2) {
    throw argument_error("lemma1_ratio: requires n >= i + 2");
  }
  const double nd = static_cast<double>(n);
  detail::neumaier_sum logsum;
  for (std::size_t j = 1; j <= i + 1; ++j) {
    logsum.add(std::log(nd) - std::log(nd - static_cast<double>(j)));
  }
  return std::exp(logsum.value());
}

/// MSE of the parameter MLE by quadrature, for any member: the sufficient
/// statistic is Gamma(size, B(theta)), so this is
/// E[(B^{-1}(size / T) - theta)^2] with T ~ Gamma(size, B(theta)).
/// Throws divergence_error when that expectation does not exist (for the
/// power member that is size <= 2).
inline double mse_theta_quadrature(const FamilyMember& fam, double theta,
                                   std::size_t size, double rel_tol = 1e-9) {
  fam.require_theta(theta);
  if (size == 0) throw argument_error("mse_theta_quadrature: size >= 1");
  const double sd = static_cast<double>(size);
  return gamma_expectation_quadrature(
      [&](double t) {
        const double d = fam.b_inv(sd / t) - theta;
        return d * d;
      },
      size, fam.b(theta), rel_tol);
}

}  // namespace recmle
