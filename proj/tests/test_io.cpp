#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tribeam/config.hpp"
#include "tribeam/io/csv.hpp"
#include "tribeam/io/json.hpp"
#include "tribeam/photonics/wick.hpp"

using namespace tribeam;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("tribeam_io_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

SweepConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

}  // namespace

TEST(Json, InvariantsRoundTrip) {
  StateInvariants s{0.8, 0.652352, 3.1, 0.5, InvariantErrors{0.01, 0.02, 0.03, 0.04}};
  const json j = to_json(s);
  const StateInvariants r = invariants_from_json(json::parse(j.dump()));
  EXPECT_EQ(r.mu1, s.mu1);
  EXPECT_EQ(r.mu2, s.mu2);
  EXPECT_EQ(r.delta2, s.delta2);
  EXPECT_EQ(r.mu3, s.mu3);
  ASSERT_TRUE(r.errors.has_value());
  EXPECT_EQ(r.errors->delta2, 0.03);
  EXPECT_EQ(r.errors->mu3, 0.04);

  const StateInvariants bare = invariants_from_json(to_json(StateInvariants{0.5, 0.3, 5.0, {}, {}}));
  EXPECT_FALSE(bare.mu3.has_value());
  EXPECT_FALSE(bare.errors.has_value());
  EXPECT_THROW(invariants_from_json(json{{"mu1", 0.5}}), json::exception);
}

TEST(Json, ReportsCarryLabels) {
  const StateInvariants s{0.5, 0.45, 4.0 + 0.25 / (0.45 * 0.45), {}, {}};
  const json e = to_json(entanglement_report(s));
  EXPECT_EQ(e["region"], "fully_entangled");
  EXPECT_TRUE(e.contains("e_n3_bounds"));
  const json g = to_json(steering_report(s));
  EXPECT_EQ(g["region_1to2"], "steerable");
  const json p = to_json(check_physical(s));
  EXPECT_TRUE(p["physical"].get<bool>());
  EXPECT_GE(p["conditions"].size(), 3u);
}

TEST(Json, MomentTableKeys) {
  photonics::MomentTable t = photonics::moments_from_cm(StandardFormParams{3.0, 0.0, 0.0}, 2);
  t.std_errors = std::map<photonics::Index3, double>{{{1, 0, 0}, 0.1}};
  const json j = to_json(t);
  EXPECT_EQ(j["scope"], "per_mode");
  EXPECT_DOUBLE_EQ(j["moments"]["2_0_0"].get<double>(), 2.0);
  EXPECT_DOUBLE_EQ(j["std_errors"]["1_0_0"].get<double>(), 0.1);
  EXPECT_EQ(moment_key({2, 0, 1}), "2_0_1");
}

TEST(Csv, QuotingAndRoundTripNumbers) {
  EXPECT_EQ(CsvWriter::field(std::string("plain")), "plain");
  EXPECT_EQ(CsvWriter::field(std::string("a,b")), "\"a,b\"");
  EXPECT_EQ(CsvWriter::field(std::string("say \"hi\"")), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvWriter::field(std::string("two\nlines")), "\"two\nlines\"");
  EXPECT_EQ(CsvWriter::field(std::nan("")), "");
  EXPECT_EQ(CsvWriter::field(0.1), "0.1");
  const double x = 1.0 / 3.0;
  EXPECT_EQ(std::stod(CsvWriter::field(x)), x);

  const std::string path = temp_path("t.csv");
  {
    CsvWriter w(path, {"name", "value"});
    w.row({"x,y", CsvWriter::field(2.5)});
    EXPECT_EQ(w.rows(), 1u);
    EXPECT_THROW(w.row({"only one"}), DataError);
  }
  EXPECT_EQ(slurp(path), "name,value\r\n\"x,y\",2.5\r\n");
  std::filesystem::remove(path);
  EXPECT_THROW(CsvWriter("/nonexistent_dir/x.csv", {"a"}), IoError);
}

TEST(Config, DefaultsAreValid) {
  SweepConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.modes, (std::vector<double>{6.7, 40.0}));
  const auto det = c.detectors();
  EXPECT_NEAR(det[0].efficiency, 0.299, 1e-12);
  EXPECT_EQ(det[0].efficiency, det[1].efficiency);
}

TEST(Config, ParsesKeysCommentsAndLists) {
  const SweepConfig c = parse(
      "# sweep\n"
      "noise = 0, 0.5, 1   # three points\n"
      "modes = 6.7\n"
      "realizations = 10000, 1000000\n"
      "symmetrize_detectors = false\n"
      "signal_efficiency = 0.3\n"
      "orders = 2, 4\n"
      "\n"
      "out = results/run 1\n"
      "seed = 7\n");
  EXPECT_EQ(c.noise, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(c.modes, (std::vector<double>{6.7}));
  EXPECT_EQ(c.realizations, (std::vector<std::uint64_t>{10000, 1000000}));
  EXPECT_FALSE(c.symmetrize_detectors);
  EXPECT_EQ(c.detectors()[0].efficiency, 0.3);
  EXPECT_EQ(c.detectors()[1].efficiency, photonics::idler_detector().efficiency);
  EXPECT_EQ(c.orders, (std::vector<int>{2, 4}));
  EXPECT_EQ(c.out, "results/run 1");
  EXPECT_EQ(c.seed, 7u);
}

TEST(Config, NoiseRangeExpands) {
  const SweepConfig c = parse("noise_range = 0, 2, 5\n");
  EXPECT_EQ(c.noise, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("nosie = 1\n"), ConfigError);
  EXPECT_THROW(parse("noise 1\n"), ConfigError);
  EXPECT_THROW(parse("modes = abc\n"), ConfigError);
  EXPECT_THROW(parse("orders = 3\n"), ConfigError);
  EXPECT_THROW(parse("noise = -1\n"), ConfigError);
  EXPECT_THROW(parse("signal_efficiency = 1.5\n"), ConfigError);
  EXPECT_THROW(parse("symmetrize_detectors = maybe\n"), ConfigError);
  EXPECT_THROW(parse("rotated_sum = 1, 0\n"), ConfigError);
  EXPECT_THROW(load_config(temp_path("missing.cfg")), IoError);
}
