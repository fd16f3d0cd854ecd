#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "recmle/report.hpp"

using namespace recmle;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  ASSERT_TRUE(out.good());
}

std::string thrown_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RunConfig, SetFindOverwrite) {
  RunConfig cfg;
  cfg.set("family", "power");
  cfg.set("theta", 2.0);
  cfg.set("n", std::size_t{30});
  cfg.set_u64("seed", 12345u);
  ASSERT_NE(cfg.find("family"), nullptr);
  EXPECT_EQ(*cfg.find("family"), "power");
  EXPECT_EQ(*cfg.find("theta"), "2");
  EXPECT_EQ(cfg.find("missing"), nullptr);
  cfg.set("family", "gumbel");
  EXPECT_EQ(*cfg.find("family"), "gumbel");
}

TEST(RunConfig, CanonicalIsSortedAndRoundTrips) {
  RunConfig cfg;
  cfg.set("zeta", "last");
  cfg.set("alpha", "first");
  cfg.set("mid.key-1", "0.5");
  EXPECT_EQ(cfg.canonical(), "alpha=first\nmid.key-1=0.5\nzeta=last\n");
  const RunConfig back = RunConfig::parse(cfg.canonical());
  EXPECT_TRUE(back == cfg);
  EXPECT_EQ(back.digest(), cfg.digest());
}

TEST(RunConfig, DigestIsCanonicalHash) {
  RunConfig cfg;
  cfg.set("a", "1");
  cfg.set("b", "2");
  EXPECT_EQ(cfg.digest(),
            recmle::detail::hex64(recmle::detail::fnv1a64("a=1\nb=2\n")));
  RunConfig other = cfg;
  other.set("b", "3");
  EXPECT_NE(cfg.digest(), other.digest());
}

TEST(RunConfig, RejectsBadKeysAndValues) {
  RunConfig cfg;
  EXPECT_THROW(cfg.set("", "x"), argument_error);
  EXPECT_THROW(cfg.set("bad key", "x"), argument_error);
  EXPECT_THROW(cfg.set("k\xc3\xa9y", "x"), argument_error);
  EXPECT_THROW(cfg.set("ok", "line1\nline2"), argument_error);
  EXPECT_THROW(RunConfig::parse("novalue\n"), io_error);
}

TEST(RunConfig, DoubleValuesRoundTripAtFullPrecision) {
  RunConfig cfg;
  const double v = 0.1234567890123456789;
  cfg.set("x", v);
  EXPECT_EQ(std::stod(*cfg.find("x")), v);
}

TEST(ReportEnvelope, HasStableShape) {
  RunConfig cfg;
  cfg.set("cmd", "estimate");
  const json j = report_envelope(cfg, json{{"theta_hat", 2.0}}, {"careful"});
  ASSERT_TRUE(j.contains("config"));
  ASSERT_TRUE(j.contains("results"));
  ASSERT_TRUE(j.contains("warnings"));
  ASSERT_TRUE(j.contains("digest"));
  EXPECT_EQ(j["config"]["cmd"], "estimate");
  EXPECT_EQ(j["results"]["theta_hat"], 2.0);
  EXPECT_EQ(j["warnings"].size(), 1u);
  EXPECT_EQ(j["digest"], cfg.digest());
}

TEST(ToJson, EstimateAndValidation) {
  const FamilyMember pw = power_function();
  const std::vector<double> xs = {0.5, 0.25};
  const auto est = mle_theta_sample(pw, xs);
  const json j = to_json(est);
  EXPECT_EQ(j["member"], "power");
  EXPECT_EQ(j["size"], 2);
  EXPECT_DOUBLE_EQ(j["theta_hat"].get<double>(), est.theta_hat);

  const json v = to_json(validate_member(pw));
  EXPECT_TRUE(v["all_passed"].get<bool>());
  EXPECT_GT(v["checks"].size(), 5u);
}

TEST(ReadSeriesCsv, ParsesAndSkipsBlanks) {
  const std::string path = temp_path("series_ok.csv");
  write_file(path, "value\r\n0.5\n\n0.25\n");
  const auto vals = read_series_csv(path);
  ASSERT_EQ(vals.size(), 2u);
  EXPECT_DOUBLE_EQ(vals[0], 0.5);
  EXPECT_DOUBLE_EQ(vals[1], 0.25);
}

TEST(ReadSeriesCsv, NamesTheOffendingRow) {
  const std::string path = temp_path("series_bad.csv");
  write_file(path, "value\n1.5\n2.5\noops\n4.0\n");
  const std::string msg = thrown_message([&] { read_series_csv(path); });
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("oops"), std::string::npos) << msg;
}

TEST(ReadSeriesCsv, StructuralErrors) {
  const std::string missing = temp_path("does_not_exist.csv");
  EXPECT_THROW(read_series_csv(missing), io_error);

  const std::string empty = temp_path("series_empty.csv");
  write_file(empty, "");
  EXPECT_THROW(read_series_csv(empty), io_error);

  const std::string hdr = temp_path("series_hdr.csv");
  write_file(hdr, "values\n1\n");
  EXPECT_THROW(read_series_csv(hdr), io_error);

  const std::string nodata = temp_path("series_nodata.csv");
  write_file(nodata, "value\n");
  EXPECT_THROW(read_series_csv(nodata), io_error);

  const std::string wide = temp_path("series_wide.csv");
  write_file(wide, "value\n1,2\n");
  EXPECT_THROW(read_series_csv(wide), io_error);
}

TEST(ReadCsvColumn, PicksNamedColumn) {
  const std::string path = temp_path("table.csv");
  write_file(path, "time, value ,junk\n1,5.0,x... no\n");
  // junk column is non-numeric but untouched; named column parses
  const auto vals = read_csv_column(path, "value");
  ASSERT_EQ(vals.size(), 1u);
  EXPECT_DOUBLE_EQ(vals[0], 5.0);
  EXPECT_THROW(read_csv_column(path, "absent"), io_error);

  const std::string ragged = temp_path("table_ragged.csv");
  write_file(ragged, "a,b\n1\n");
  const std::string msg =
      thrown_message([&] { read_csv_column(ragged, "a"); });
  EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
}

TEST(ReadRecordsCsv, ParsesTimesAndValues) {
  const std::string path = temp_path("records_ok.csv");
  write_file(path, "time,value\n1,5\n2,3\n5,2\n");
  const auto rec = read_records_csv(path);
  EXPECT_EQ(rec.values, (std::vector<double>{5.0, 3.0, 2.0}));
  EXPECT_EQ(rec.times, (std::vector<std::size_t>{1, 2, 5}));
  ASSERT_TRUE(rec.source_n.has_value());
  EXPECT_EQ(*rec.source_n, 5u);
}

TEST(ReadRecordsCsv, ValidatesTimes) {
  const std::string frac = temp_path("records_frac.csv");
  write_file(frac, "time,value\n1.5,2\n");
  EXPECT_THROW(read_records_csv(frac), io_error);

  const std::string zero = temp_path("records_zero.csv");
  write_file(zero, "time,value\n0,2\n");
  EXPECT_THROW(read_records_csv(zero), io_error);

  const std::string order = temp_path("records_order.csv");
  write_file(order, "time,value\n1,5\n3,4\n3,3\n");
  const std::string msg = thrown_message([&] { read_records_csv(order); });
  EXPECT_NE(msg.find("strictly increasing"), std::string::npos) << msg;
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;

  const std::string hdr = temp_path("records_hdr.csv");
  write_file(hdr, "value,time\n1,2\n");
  EXPECT_THROW(read_records_csv(hdr), io_error);
}

TEST(WriteRecordsCsv, RoundTrips) {
  RecordSequence rec;
  rec.values = {0.875, 0.25, 0.0625};
  rec.times = {1, 4, 9};
  std::ostringstream out;
  write_records_csv(out, rec);
  const std::string path = temp_path("records_rt.csv");
  write_file(path, out.str());
  const auto back = read_records_csv(path);
  EXPECT_EQ(back.values, rec.values);
  EXPECT_EQ(back.times, rec.times);
}

TEST(WriteTableCsv, ExactBytesAndRaggedGuard) {
  std::ostringstream out;
  write_table_csv(out, {"n", "mse"}, {{"3", "2.5"}, {"10", "0.1666"}});
  EXPECT_EQ(out.str(), "n,mse\n3,2.5\n10,0.1666\n");
  std::ostringstream sink;
  EXPECT_THROW(write_table_csv(sink, {"a", "b"}, {{"1"}}), argument_error);
}

TEST(RenderLineChart, WellFormedAndDeterministic) {
  std::vector<ChartSeries> series(2);
  series[0].label = "exact";
  series[0].points = {{3.0, 2.5}, {4.0, 1.0}, {5.0, 0.58}};
  series[1].label = "simulated";
  series[1].points = {{3.0, 2.4}, {4.0, 1.05}, {5.0, 0.6}};
  const std::string svg =
      render_line_chart("mse against sample size", "n", "mse", series);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("mse against sample size"), std::string::npos);
  EXPECT_NE(svg.find("exact"), std::string::npos);
  EXPECT_NE(svg.find("simulated"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg,
            render_line_chart("mse against sample size", "n", "mse", series));
}

TEST(RenderLineChart, LogScaleDropsNonPositives) {
  std::vector<ChartSeries> series(1);
  series[0].label = "curve";
  series[0].points = {{1.0, 0.0}, {2.0, 1e-3}, {3.0, 1e-2}, {4.0, 1e-1}};
  const std::string svg =
      render_line_chart("decay", "n", "mse", series, true);
  EXPECT_NE(svg.find("1e-"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
  // the y=0 point contributes no vertex: polyline has exactly 3
  const auto start = svg.find("points=\"");
  ASSERT_NE(start, std::string::npos);
  const auto stop = svg.find('"', start + 8);
  const std::string pts = svg.substr(start + 8, stop - start - 8);
  std::size_t commas = 0;
  for (const char c : pts) commas += c == ',';
  EXPECT_EQ(commas, 3u);
}

TEST(RenderLineChart, EmptySeriesStillRenders) {
  const std::string svg = render_line_chart("empty", "x", "y", {});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
