#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recmle/analytic.hpp"
#include "recmle/detail/math.hpp"
#include "recmle/errors.hpp"
#include "recmle/family.hpp"
#include "recmle/montecarlo.hpp"
#include "recmle/report.hpp"
#include "recmle/rng.hpp"

namespace recmle {

enum class Estimand { theta, exp_theta, pdf_at, cdf_at };

inline Estimand parse_estimand(const std::string& text, double& x_at) {
  if (text == "theta") return Estimand::theta;
  if (text == "exp-theta") return Estimand::exp_theta;
  const auto parse_at = [&](const std::string& prefix) {
    const std::string t = text.substr(prefix.size());
    char* end = nullptr;
    x_at = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || t.empty()) {
      throw argument_error("estimand: cannot parse point in '" + text + "'");
    }
  };
  if (text.rfind("pdf@", 0) == 0) {
    parse_at("pdf@");
    return Estimand::pdf_at;
  }
  if (text.rfind("cdf@", 0) == 0) {
    parse_at("cdf@");
    return Estimand::cdf_at;
  }
  throw argument_error(
      "estimand must be theta, exp-theta, pdf@<x> or cdf@<x>, got '" + text +
      "'");
}

inline std::string estimand_name(Estimand e, double x_at) {
  switch (e) {
    case Estimand::theta:
      return "theta";
    case Estimand::exp_theta:
      return "exp-theta";
    case Estimand::pdf_at:
      return "pdf@" + detail::fmt_g17(x_at);
    case Estimand::cdf_at:
      return "cdf@" + detail::fmt_g17(x_at);
  }
  return "";
}

/// Per-n rows of an MSE comparison curve: analytic value next to the Monte
/// Carlo estimate and its standard error. `flag` states what kind of analytic
/// number each row carries ("exact", "quadrature", "truncated series" or
/// "formal series"), because a formal value is not comparable to a convergent
/// one and downstream output must say so.
struct MseCurveTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> warnings;
  std::string flag_label;
  ChartSeries analytic_series;
  ChartSeries mc_series;
};

namespace detail {

inline std::uint64_t derive_seed(std::uint64_t base, const std::string& tag) {
  std::uint64_t s = base ^ fnv1a64(tag);
  return splitmix64_next(s);
}

}  // namespace detail

/// Build the full curve deterministically. The Monte Carlo column for
/// replication row n draws from seeds derived from (seed, n) only, so the
/// bytes of the rendered table depend on the configuration alone, never on
/// `lanes` (the internal parallelism width).
inline MseCurveTable build_mse_curve(const FamilyMember& fam, double theta,
                                     Estimand estimand, double x_at,
                                     std::size_t n_min, std::size_t n_max,
                                     std::size_t n_step, std::size_t reps,
                                     std::uint64_t seed, unsigned lanes = 0,
                                     bool show_uncorrected = false) {
  fam.require_theta(theta);
  if (n_step == 0) throw argument_error("build_mse_curve: n_step >= 1");
  if (n_min > n_max) {
    throw argument_error("build_mse_curve: empty n range");
  }
  const bool is_power = fam.name() == "power";
  std::size_t n_floor = 1;
  switch (estimand) {
    case Estimand::theta:
      n_floor = is_power ? 3 : 1;  // exact power curve needs E[theta_hat^2]
      break;
    case Estimand::exp_theta:
      if (!is_power) {
        throw argument_error(
            "build_mse_curve: the exp-theta analytic series is defined for "
            "the power member only");
      }
      n_floor = 1;
      break;
    case Estimand::pdf_at:
      n_floor = 3;
      break;
    case Estimand::cdf_at:
      n_floor = 1;
      break;
  }
  if (n_min < n_floor) {
    throw argument_error("build_mse_curve: n range must start at or above " +
                         std::to_string(n_floor) + " for this estimand");
  }
  if (estimand == Estimand::pdf_at || estimand == Estimand::cdf_at) {
    fam.require_support(x_at);
  }

  MseCurveTable table;
  switch (estimand) {
    case Estimand::theta:
      table.flag_label = is_power ? "exact" : "quadrature";
      break;
    case Estimand::exp_theta:
      table.flag_label = "formal series";
      break;
    default:
      table.flag_label = "truncated series";
      break;
  }
  table.header = {"n", "analytic", "flag", "mc_mse", "mc_se"};
  if (show_uncorrected) table.header.push_back("analytic_uncorrected");
  table.analytic_series.label = "analytic (" + table.flag_label + ")";
  table.mc_series.label = "monte carlo";

  for (std::size_t n = n_min; n <= n_max; n += n_step) {
    double analytic = 0.0;
    switch (estimand) {
      case Estimand::theta:
        analytic = is_power ? mse_theta_power_exact(n, theta)
                            : mse_theta_quadrature(fam, theta, n);
        break;
      case Estimand::exp_theta: {
        const auto ev = mse_exp_theta_series(n, theta);
        analytic = ev.value;
        for (const auto& w : ev.warnings) {
          if (n == n_min) table.warnings.push_back("n=" + std::to_string(n) +
                                                   ": " + w);
        }
        break;
      }
      case Estimand::pdf_at: {
        const auto ev = mse_pdf_plugin(fam, theta, x_at, n);
        analytic = ev.value;
        for (const auto& w : ev.warnings) {
          table.warnings.push_back("n=" + std::to_string(n) + ": " + w);
        }
        break;
      }
      case Estimand::cdf_at: {
        const auto ev = mse_cdf_plugin_series(fam, theta, x_at, n);
        analytic = ev.value;
        for (const auto& w : ev.warnings) {
          table.warnings.push_back("n=" + std::to_string(n) + ": " + w);
        }
        break;
      }
    }

    const std::uint64_t sub_seed =
        detail::derive_seed(seed, "mse-curve-n" + std::to_string(n));
    double mc_mse = 0.0, mc_se = 0.0;
    if (estimand == Estimand::theta || estimand == Estimand::exp_theta) {
      const auto rep = mc_estimate(fam, theta, McSource::records, n, reps,
                                   sub_seed,
                                   estimand == Estimand::exp_theta
                                       ? EstimandTransform::exp
                                       : EstimandTransform::identity,
                                   lanes);
      mc_mse = rep.mse;
      mc_se = rep.se_mse;
    } else {
      const double xs[1] = {x_at};
      const auto curve =
          mc_plugin_curve(fam, theta, n, xs, estimand == Estimand::pdf_at,
                          reps, sub_seed, lanes);
      mc_mse = curve.points[0].emp_mse;
      mc_se = curve.points[0].se_mse;
    }

    std::vector<std::string> row = {
        std::to_string(n), detail::fmt_g17(analytic), table.flag_label,
        detail::fmt_g17(mc_mse), detail::fmt_g17(mc_se)};
    if (show_uncorrected) {
      row.push_back(estimand == Estimand::theta && is_power
                        ? detail::fmt_g17(mse_theta_power_exact(n, theta, true))
                        : "");
    }
    table.rows.push_back(std::move(row));
    const double nd = static_cast<double>(n);
    table.analytic_series.points.emplace_back(nd, analytic);
    table.mc_series.points.emplace_back(nd, mc_mse);
  }
  return table;
}

inline std::string mse_curve_csv(const MseCurveTable& table) {
  std::ostringstream out;
  write_table_csv(out, table.header, table.rows);
  return out.str();
}

inline std::string mse_curve_svg(const MseCurveTable& table,
                                 const FamilyMember& fam, double theta,
                                 Estimand estimand, double x_at,
                                 bool log_scale) {
  std::string title = fam.name() + ", theta=" + detail::fmt_g17(theta) +
                      ": MSE of " + estimand_name(estimand, x_at);
  if (estimand == Estimand::exp_theta) title += " (formal series)";
  return render_line_chart(title, "n", "MSE",
                           {table.analytic_series, table.mc_series},
                           log_scale);
}

}  // namespace recmle
