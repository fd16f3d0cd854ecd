// record_mle: fit the parameter of exp(-B(theta) A(x)) families from samples
// or lower records, evaluate the analytic MSE machinery, and reproduce the
// simulation curves. See README.md for the command overview.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recmle/curves.hpp"
#include "recmle/recmle.hpp"
#include "recmle/verify.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RECORD_MLE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::uint64_t>(v);
    std::cerr << "warning: ignoring unparsable RECORD_MLE_SEED='" << env
              << "'\n";
  }
  return kDefaultSeed;
}

recmle::FamilyMember make_family(const std::string& name,
                                 const std::optional<double>& alpha) {
  if (name == "power") return recmle::power_function();
  if (name == "gumbel") return recmle::gumbel();
  if (name == "frechet") {
    if (!alpha) {
      throw recmle::argument_error("--family frechet requires --alpha");
    }
    return recmle::frechet(*alpha);
  }
  throw recmle::argument_error("unknown family '" + name + "'");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw recmle::io_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw recmle::io_error("failed writing " + path);
}

struct ExtractArgs {
  std::string input;
  std::string column = "value";
  std::string out;
};

int cmd_extract_records(const ExtractArgs& args) {
  const auto series = recmle::read_csv_column(args.input, args.column);
  const auto rec = recmle::extract_lower_records(series);
  std::ostringstream csv;
  recmle::write_records_csv(csv, rec);
  if (args.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(args.out, csv.str());
  }
  std::cerr << "m=" << rec.count() << " n=" << series.size() << "\n";
  return 0;
}

struct EstimateArgs {
  std::string family;
  std::optional<double> alpha;
  std::string input;
  std::string transform = "identity";
  std::vector<double> at;
  std::string out;
};

int cmd_estimate(const EstimateArgs& args) {
  const auto fam = make_family(args.family, args.alpha);
  const auto transform = args.transform == "exp"
                             ? recmle::EstimandTransform::exp
                             : recmle::EstimandTransform::identity;

  // Peek at the header to decide between a sample file and a records file.
  std::ifstream probe(args.input);
  if (!probe) throw recmle::io_error("cannot open " + args.input);
  std::string header;
  std::getline(probe, header);
  probe.close();
  if (!header.empty() && header.back() == '\r') header.pop_back();

  recmle::EstimateResult est;
  std::vector<std::string> warnings;
  std::size_t n_echo = 0;
  if (header == "value") {
    const auto xs = recmle::read_series_csv(args.input);
    est = recmle::mle_theta_sample(fam, xs, transform);
    n_echo = xs.size();
  } else if (header == "time,value") {
    const auto rec = recmle::read_records_csv(args.input);
    est = recmle::mle_theta_records(fam, rec, transform);
    n_echo = rec.source_n.value_or(rec.count());
  } else {
    throw recmle::io_error(args.input +
                           ": header must be 'value' (sample) or "
                           "'time,value' (records)");
  }

  recmle::RunConfig cfg;
  cfg.set("cmd", "estimate");
  cfg.set("family", fam.name());
  cfg.set("input", args.input);
  cfg.set("transform", args.transform);

  recmle::json results;
  results["estimate"] = recmle::to_json(est);
  results["n"] = n_echo;
  if (!args.at.empty()) {
    recmle::json points = recmle::json::array();
    for (const double x : args.at) {
      recmle::json p;
      p["x"] = x;
      p["cdf"] = recmle::plugin_cdf(fam, est, x);
      p["pdf"] = recmle::plugin_pdf(fam, est, x);
      points.push_back(std::move(p));
    }
    results["plugin"] = std::move(points);
  }

  const recmle::json report =
      recmle::report_envelope(cfg, std::move(results), std::move(warnings));
  const std::string text = report.dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(args.out, text);
  }
  return 0;
}

struct CurveArgs {
  std::string family;
  std::optional<double> alpha;
  double theta = 1.0;
  std::string estimand = "theta";
  std::size_t n_min = 3, n_max = 30, n_step = 1;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  unsigned lanes = 0;
  bool show_uncorrected = false;
  bool log_scale = false;
  std::string out;
  std::string svg;
};

int cmd_mse_curve(const CurveArgs& args) {
  const auto fam = make_family(args.family, args.alpha);
  double x_at = 0.0;
  const auto estimand = recmle::parse_estimand(args.estimand, x_at);
  const auto table = recmle::build_mse_curve(
      fam, args.theta, estimand, x_at, args.n_min, args.n_max, args.n_step,
      args.reps, args.seed, args.lanes, args.show_uncorrected);
  const std::string csv = recmle::mse_curve_csv(table);
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    write_text_file(args.out, csv);
  }
  if (!args.svg.empty()) {
    write_text_file(args.svg, recmle::mse_curve_svg(table, fam, args.theta,
                                                    estimand, x_at,
                                                    args.log_scale));
  }
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

struct VerifyArgs {
  std::string section = "all";
  std::uint64_t seed = 0;
  unsigned lanes = 0;
  std::string out;
};

int cmd_verify(const VerifyArgs& args) {
  const auto results = recmle::verify_run(args.seed, args.section, args.lanes);
  bool all_passed = true;
  recmle::json jres = recmle::json::array();
  for (const auto& r : results) {
    all_passed = all_passed && r.passed;
    std::cout << "criterion " << r.id << " [" << r.section << "] "
              << (r.passed ? "PASS" : "FAIL") << "\n";
    for (const auto& d : r.details) std::cout << "  " << d << "\n";
    jres.push_back(recmle::to_json(r));
  }
  recmle::RunConfig cfg;
  cfg.set("cmd", "verify");
  cfg.set("section", args.section);
  cfg.set_u64("seed", args.seed);
  recmle::json res;
  res["criteria"] = std::move(jres);
  res["finding"] = recmle::exp_scale_finding_json();
  const recmle::json report = recmle::report_envelope(cfg, std::move(res), {});
  if (!args.out.empty()) write_text_file(args.out, report.dump(2) + "\n");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter, PDF and CDF estimation from samples and lower "
               "records for CDFs of the form exp(-B(theta) A(x))"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* sub_extract =
      app.add_subcommand("extract-records",
                         "Scan a CSV column for lower records");
  sub_extract->add_option("--input", extract.input, "input CSV")->required();
  sub_extract->add_option("--column", extract.column,
                          "column to scan (default: value)");
  sub_extract->add_option("--out", extract.out,
                          "output records CSV (default: stdout)");

  EstimateArgs estimate;
  auto* sub_estimate = app.add_subcommand(
      "estimate", "Fit theta from a sample or records CSV");
  sub_estimate
      ->add_option("--family", estimate.family, "power|gumbel|frechet")
      ->required()
      ->check(CLI::IsMember({"power", "gumbel", "frechet"}));
  sub_estimate->add_option("--alpha", estimate.alpha,
                           "Frechet shape (frechet only)");
  sub_estimate->add_option("--input", estimate.input, "input CSV")->required();
  sub_estimate
      ->add_option("--transform", estimate.transform,
                   "report theta or exp(theta)")
      ->check(CLI::IsMember({"identity", "exp"}));
  sub_estimate->add_option("--at", estimate.at,
                           "points for plug-in PDF/CDF values");
  sub_estimate->add_option("--out", estimate.out,
                           "output JSON (default: stdout)");

  CurveArgs curve;
  auto* sub_curve = app.add_subcommand(
      "mse-curve", "Analytic vs Monte Carlo MSE across n");
  sub_curve->add_option("--family", curve.family, "power|gumbel|frechet")
      ->required()
      ->check(CLI::IsMember({"power", "gumbel", "frechet"}));
  sub_curve->add_option("--alpha", curve.alpha, "Frechet shape");
  sub_curve->add_option("--theta", curve.theta, "true parameter")->required();
  sub_curve->add_option("--estimand", curve.estimand,
                        "theta | exp-theta | pdf@<x> | cdf@<x>");
  sub_curve->add_option("--n-min", curve.n_min, "first n");
  sub_curve->add_option("--n-max", curve.n_max, "last n");
  sub_curve->add_option("--n-step", curve.n_step, "n stride");
  sub_curve->add_option("--reps", curve.reps, "replications per n");
  auto* curve_seed = sub_curve->add_option("--seed", curve.seed, "master seed");
  sub_curve->add_option("--lanes", curve.lanes,
                        "worker threads (0 = hardware)");
  sub_curve->add_flag("--show-uncorrected", curve.show_uncorrected,
                      "add the discrepant closed-form column (power, theta)");
  sub_curve->add_flag("--log-scale", curve.log_scale, "log y axis in SVG");
  sub_curve->add_option("--out", curve.out, "CSV path (default: stdout)");
  sub_curve->add_option("--svg", curve.svg, "also render an SVG chart here");

  VerifyArgs verify;
  auto* sub_verify =
      app.add_subcommand("verify", "Run the numbered verification criteria");
  sub_verify->add_option("--section", verify.section,
                         "criterion section or 'all'");
  auto* verify_seed =
      sub_verify->add_option("--seed", verify.seed, "master seed");
  sub_verify->add_option("--lanes", verify.lanes,
                         "worker threads (0 = hardware)");
  sub_verify->add_option("--out", verify.out, "write JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!*curve_seed) curve.seed = default_seed();
  if (!*verify_seed) verify.seed = default_seed();

  try {
    if (sub_extract->parsed()) return cmd_extract_records(extract);
    if (sub_estimate->parsed()) return cmd_estimate(estimate);
    if (sub_curve->parsed()) return cmd_mse_curve(curve);
    if (sub_verify->parsed()) return cmd_verify(verify);
  } catch (const recmle::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const recmle::argument_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const recmle::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
