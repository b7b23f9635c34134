#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "tribeam/correlations.hpp"
#include "tribeam/ghzw.hpp"
#include "tribeam/photonics/histogram.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(TRIBEAM_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("tribeam_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t csv_rows(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n - 1;
}

bool has_line(const std::string& out, const std::string& line) {
  return ("\n" + out).find("\n" + line + "\n") != std::string::npos;
}

}  // namespace

TEST(CliClassify, NamedStatesText) {
  const CliRun sep = run("classify 0.5 0.25");
  EXPECT_EQ(sep.code, 0);
  EXPECT_TRUE(has_line(sep.out, "entanglement_region: region_i")) << sep.out;
  EXPECT_TRUE(has_line(sep.out, "ghzw_class: class_5"));
  EXPECT_TRUE(has_line(sep.out, "coexistence: false"));

  const CliRun bound = run("classify 0.8 0.652352");
  EXPECT_EQ(bound.code, 0);
  EXPECT_TRUE(has_line(bound.out, "ghzw_class: class_4"));

  const CliRun mid = run("classify 0.5 0.28867513459481287");
  EXPECT_TRUE(has_line(mid.out, "entanglement_region: region_ii"));
  EXPECT_TRUE(has_line(mid.out, "ghzw_class: class_4"));

  const CliRun r2 = run("classify 0.5 0.28");
  EXPECT_TRUE(has_line(r2.out, "entanglement_region: region_ii"));
  EXPECT_NE(sep.out.find("boundary_convention"), std::string::npos);
}

TEST(CliClassify, JsonMatchesLibrary) {
  const double mu1 = 0.5, mu2 = 0.45, d2 = 4.0 + 0.25 / (0.45 * 0.45);
  std::ostringstream args;
  args.precision(17);
  args << "classify " << mu1 << " " << mu2 << " " << d2 << " --json";
  const CliRun r = run(args.str());
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["entanglement_region"], "fully_entangled");
  EXPECT_EQ(j["steering_region_1to2"], "steerable");
  EXPECT_EQ(j["ghzw_class"], "class_1");
  EXPECT_EQ(j["coexistence"], true);
  const tribeam::StateInvariants inv{mu1, mu2, d2, {}, {}};
  EXPECT_NEAR(j["values"]["e_n3"].get<double>(), tribeam::evaluate(tribeam::Quantity::EN3, inv), 1e-12);
  EXPECT_NEAR(j["values"]["g_2to1"].get<double>(), tribeam::steering_2to1(inv), 1e-12);
  EXPECT_EQ(j["values"]["g_1to1"].get<double>(), 0.0);
  const tribeam::Interval w = tribeam::seralian_bounds(mu1, mu2);
  EXPECT_DOUBLE_EQ(j["delta2_window"]["min"].get<double>(), w.min);
}

TEST(CliClassify, DomainErrorsExitTwo) {
  EXPECT_EQ(run("classify 0.5 0.2").code, 2);
  EXPECT_EQ(run("classify 1.5 1.0").code, 2);
  EXPECT_EQ(run("classify 0.5 0.45 20").code, 2);
  EXPECT_EQ(run("classify").code, 2);
  EXPECT_EQ(run("classify 0.5 0.3 --bogus").code, 2);
  EXPECT_EQ(run("--order 3 classify 0.5 0.3").code, 2);
}

TEST(CliMeasures, MatchesLibrary) {
  const double mu1 = 0.8, mu2 = 0.7;
  const tribeam::Interval w = tribeam::seralian_bounds(mu1, mu2);
  const double d2 = 0.5 * (w.min + w.max);
  std::ostringstream args;
  args.precision(17);
  args << "measures " << mu1 << " " << mu2 << " " << d2;
  const CliRun r = run(args.str());
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  const tribeam::StateInvariants inv{mu1, mu2, d2, {}, {}};
  EXPECT_NEAR(j["mu3"].get<double>(), tribeam::purity3(inv), 1e-14);
  EXPECT_NEAR(j["entanglement"]["e_n3"].get<double>(), tribeam::log_negativity_3(tribeam::standard_form(inv)), 1e-14);
  EXPECT_NEAR(j["steering"]["g_1to2"].get<double>(), tribeam::steering_1to2(inv), 1e-14);
  EXPECT_NEAR(j["kl_to_ghzw"].get<double>(), tribeam::kl_to_ghzw(inv), 1e-14);
  EXPECT_EQ(j["physicality"]["physical"], true);
  EXPECT_EQ(run("measures 0.8 0.7 100").code, 2);
}

TEST(CliSimulate, ReproducibleFiles) {
  const fs::path d = scratch("simulate");
  const std::string a = (d / "a.csv").string(), b = (d / "b.csv").string(), c = (d / "c.bin").string();
  ASSERT_EQ(run("--seed 5 --out " + a + " simulate -n 20000 --noise 1").code, 0);
  ASSERT_EQ(run("--seed 5 --threads 3 --out " + b + " simulate -n 20000 --noise 1").code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  ASSERT_EQ(run("--seed 5 --out " + c + " simulate -n 20000 --noise 1").code, 0);
  EXPECT_EQ(tribeam::photonics::load_binary(c), tribeam::photonics::load_csv(a));
  EXPECT_EQ(tribeam::photonics::load_csv(a).total(), 20000u);
  EXPECT_EQ(run("--out " + a + " simulate -n 10 --detectors nonsense").code, 2);
  fs::remove_all(d);
}

TEST(CliReconstruct, IdealDetectorsReturnTheHistogram) {
  const fs::path d = scratch("reconstruct");
  const std::string h = (d / "h.csv").string();
  ASSERT_EQ(run("--seed 2 --out " + h + " simulate -n 3000 --noise 0.5 --modes 2 --detectors ideal").code, 0);
  const fs::path out = d / "rec";
  const CliRun r = run("--order 2 --out " + out.string() + " reconstruct " + h + " --detectors ideal --modes 2 --em");
  ASSERT_EQ(r.code, 0);
  const auto hist = tribeam::photonics::load_csv(h);
  std::ifstream is(out / "distribution.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "n1,n2,n3,probability\r");
  double total = 0.0;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    int n1, n2, n3;
    double p;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%d,%lf", &n1, &n2, &n3, &p), 4);
    const auto it = hist.counts.find({n1, n2, n3});
    const double f = it == hist.counts.end() ? 0.0 : double(it->second) / hist.total();
    EXPECT_NEAR(p, f, 1e-6);
    total += p;
    ++rows;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_GE(rows, hist.counts.size());
  const json a = json::parse(slurp(out / "analysis.json"));
  EXPECT_EQ(a["realizations"], 3000);
  EXPECT_TRUE(a.contains("em"));
  EXPECT_EQ(run("reconstruct " + (d / "missing.csv").string()).code, 4);
  fs::remove_all(d);
}

TEST(CliSweep, ManifestListsEveryFile) {
  const fs::path d = scratch("sweep");
  {
    std::ofstream cfg(d / "sweep.cfg");
    cfg << "noise = 0, 1, 2\nmodes = 6.7\norders = 2, 4\nsweep_realizations = 2000\nresamples = 10\ngrid = 12\n";
  }
  const CliRun r = run("--config " + (d / "sweep.cfg").string() + " --out " + (d / "out").string() + " sweep");
  ASSERT_EQ(r.code, 0) << r.out;
  const json m = json::parse(slurp(d / "out" / "manifest.json"));
  ASSERT_GE(m["files"].size(), 5u);
  for (const auto& f : m["files"]) {
    const fs::path p = d / "out" / f["file"].get<std::string>();
    ASSERT_TRUE(fs::exists(p)) << p;
    EXPECT_EQ(csv_rows(p), f["rows"].get<std::size_t>()) << p;
  }
  EXPECT_EQ(csv_rows(d / "out" / "region_map.csv"), 144u);
  EXPECT_EQ(csv_rows(d / "out" / "model_M6p7_order2.csv"), 3u);
  EXPECT_TRUE(fs::exists(d / "out" / "mc_M6p7.csv"));
  EXPECT_EQ(m["config"]["noise"].size(), 3u);

  std::ofstream bad(d / "bad.cfg");
  bad << "noise_levels = 1\n";
  bad.close();
  EXPECT_EQ(run("--config " + (d / "bad.cfg").string() + " sweep").code, 2);
  fs::remove_all(d);
}

TEST(CliConvergence, ReportsUsableOrders) {
  const fs::path d = scratch("convergence");
  {
    std::ofstream cfg(d / "c.cfg");
    cfg << "noise = 0\nmodes = 6.7\nrealizations = 10000\nresamples = 50\n";
  }
  const CliRun r = run("--config " + (d / "c.cfg").string() + " --out " + (d / "out").string() + " convergence");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, "N=10000 usable orders: 2")) << r.out;
  EXPECT_EQ(csv_rows(d / "out" / "convergence.csv"), 3u);
  fs::remove_all(d);
}
