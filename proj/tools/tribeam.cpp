// tribeam: classification, measures, simulation, reconstruction, sweeps and
// convergence studies for symmetric three-beam Gaussian states.

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tribeam/io/csv.hpp"
#include "tribeam/io/json.hpp"
#include "tribeam/tribeam.hpp"

namespace fs = std::filesystem;
using namespace tribeam;
using namespace tribeam::photonics;

namespace {

enum ExitCode { kOk = 0, kDomain = 2, kConvergence = 3, kIo = 4 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string order = "all";
  std::optional<std::string> out;
  std::optional<int> grid;
  std::optional<int> threads;
  std::optional<double> tolerance;
};

std::string num(double v) { return CsvWriter::field(v); }

std::vector<int> parse_orders(const std::string& s) {
  if (s == "all") return {2, 4, 6};
  if (s == "2" || s == "4" || s == "6") return {std::stoi(s)};
  throw ConfigError("--order must be 2, 4, 6 or all");
}

SweepConfig resolve_config(const Globals& g) {
  SweepConfig c = g.config.empty() ? SweepConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.order != "all") c.orders = parse_orders(g.order);
  if (g.out) c.out = *g.out;
  if (g.grid) c.grid = *g.grid;
  if (g.threads) c.threads = *g.threads;
  if (g.tolerance) c.usability_threshold = *g.tolerance;
  c.validate();
  return c;
}

/// Runs fn(i) for i in [0, n) on a pool of threads. Results must be stored by index.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) fn(i);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < std::min<int>(threads, static_cast<int>(n)); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

/// Collects emitted files for the manifest.
struct Manifest {
  json files = json::array();
  json failures = json::array();

  void add(const CsvWriter& w, const std::string& description) {
    files.push_back({{"file", fs::path(w.path()).filename().string()},
                     {"description", description},
                     {"rows", w.rows()},
                     {"columns", w.columns()}});
  }
  void fail(const std::string& where, const std::string& what) { failures.push_back({{"point", where}, {"error", what}}); }

  void write(const fs::path& dir, const std::string& command, const json& config) const {
    json j{{"command", command}, {"config", config}, {"files", files}, {"failures", failures}, {"complete", failures.empty()}};
    std::ofstream os(dir / "manifest.json");
    if (!os) throw IoError("cannot write " + (dir / "manifest.json").string());
    os << j.dump(2) << '\n';
  }
};

json config_json(const SweepConfig& c) {
  return {{"noise", c.noise},
          {"pair_mean", c.pair_mean},
          {"noise_modes", c.noise_modes},
          {"modes", c.modes},
          {"realizations", c.realizations},
          {"sweep_realizations", c.sweep_realizations},
          {"signal", {{"efficiency", c.signal.efficiency}, {"dark_rate", c.signal.dark_rate}}},
          {"idler", {{"efficiency", c.idler.efficiency}, {"dark_rate", c.idler.dark_rate}}},
          {"symmetrize_detectors", c.symmetrize_detectors},
          {"orders", c.orders},
          {"seed", c.seed},
          {"grid", c.grid},
          {"rotated_sum", {c.rotated_sum_min, c.rotated_sum_max}},
          {"rotated_diff", {c.rotated_diff_min, c.rotated_diff_max}},
          {"resamples", c.resamples},
          {"usability_threshold", c.usability_threshold},
          {"fit_tolerance", c.fit_tolerance},
          {"use_em", c.use_em}};
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  return dir;
}

std::string mode_tag(double m) {
  std::ostringstream os;
  os << m;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

// ---------------------------------------------------------------- classify

json classify_json(double mu1, double mu2, std::optional<double> delta2, const Tolerances& tol) {
  json j{{"mu1", mu1}, {"mu2", mu2}};
  j["entanglement_region"] = to_string(classify_entanglement(mu1, mu2, tol));
  j["steering_region_1to2"] = to_string(classify_steering(mu1, mu2, SteeringDirection::OneToTwo, tol));
  j["steering_region_2to1"] = to_string(classify_steering(mu1, mu2, SteeringDirection::TwoToOne, tol));
  j["ghzw_class"] = to_string(ghzw_classify(mu1, mu2, tol));
  const CoexistenceResult co = coexistence(mu1, mu2, tol);
  j["coexistence"] = co.coexist;
  if (co.boundary) j["coexistence_boundary"] = true;
  j["boundary_convention"] = "states on a threshold belong to the lower region";
  j["delta2_window"] = to_json(seralian_bounds(mu1, mu2, tol));
  json bounds = json::object();
  for (Quantity q : {Quantity::EN2, Quantity::EN3, Quantity::Cotangle, Quantity::G12, Quantity::G21})
    bounds[to_string(q)] = to_json(correlation_bounds(mu1, mu2, q, tol));
  j["bounds"] = bounds;
  if (delta2) {
    const StateInvariants inv{mu1, mu2, *delta2, {}, {}};
    json values = json::object();
    for (Quantity q : {Quantity::EN2, Quantity::EN3, Quantity::Cotangle, Quantity::G12, Quantity::G21})
      values[to_string(q)] = evaluate(q, inv, tol);
    values["g_1to1"] = steering_1to1(mu1, mu2);
    j["delta2"] = *delta2;
    j["values"] = values;
  }
  return j;
}

void print_text(const json& j, const std::string& indent = "") {
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      if (v.contains("min") && v.contains("max") && v.size() == 2) {
        std::cout << indent << k << ": [" << num(v["min"].get<double>()) << ", " << num(v["max"].get<double>()) << "]\n";
      } else {
        std::cout << indent << k << ":\n";
        print_text(v, indent + "  ");
      }
    } else if (v.is_number_float()) {
      std::cout << indent << k << ": " << num(v.get<double>()) << '\n';
    } else if (v.is_string()) {
      std::cout << indent << k << ": " << v.get<std::string>() << '\n';
    } else {
      std::cout << indent << k << ": " << v.dump() << '\n';
    }
  }
}

int domain_report(const StateInvariants& inv, const Tolerances& tol) {
  const PhysicalityReport r = check_physical(inv, tol);
  if (r.physical()) return kOk;
  std::cerr << "error: state is not physical\n";
  for (const auto& c : r.conditions)
    std::cerr << "  " << c.name << ": " << (c.pass ? "ok" : "FAIL") << " (margin " << num(c.margin) << ")\n";
  return kDomain;
}

// ---------------------------------------------------------------- measures

json measures_json(const StateInvariants& inv, const Tolerances& tol) {
  const StandardFormParams p = standard_form(inv, tol);
  const PptSpectrum ppt = ppt_eigenvalues(p, tol);
  const double mu3 = purity3(inv, tol);
  json j{{"invariants", to_json(inv)}, {"mu3", mu3}, {"params", to_json(p)}};
  j["ppt"] = {{"v1", ppt.v1}, {"v_plus", ppt.v_plus}, {"v_minus", ppt.v_minus}};
  j["entanglement"] = to_json(entanglement_report(inv, true, tol));
  j["steering"] = to_json(steering_report(inv, true, tol));
  j["g_1to1"] = steering_1to1(inv.mu1, inv.mu2);
  j["ghzw_class"] = to_string(ghzw_classify(inv.mu1, inv.mu2, tol));
  j["coexistence"] = coexistence_check(inv.mu1, inv.mu2, tol);
  j["kl_divergence_2"] = kl_divergence_2(inv.mu1, inv.mu2);
  j["kl_divergence_3"] = kl_divergence_3(inv.mu1, inv.mu2, mu3);
  j["kl_to_ghzw"] = kl_to_ghzw(inv, tol);
  j["physicality"] = to_json(check_physical(inv, tol));
  return j;
}

// ---------------------------------------------------------------- simulate / reconstruct

DetectorSet parse_detectors(const std::string& name, const SweepConfig& c) {
  if (name == "ideal") return ideal_detectors();
  if (name == "config") return c.detectors();
  if (name == "measured") return default_detectors(false);
  if (name == "symmetrized") return default_detectors(true);
  throw ConfigError("detectors must be ideal, config, measured or symmetrized");
}

void save_histogram(const PhotocountHistogram& h, const std::string& path) {
  if (fs::path(path).extension() == ".bin") save_binary(h, path);
  else save_csv(h, path);
}

PhotocountHistogram load_histogram(const std::string& path) {
  if (fs::path(path).extension() == ".bin") return load_binary(path);
  return load_csv(path);
}

void write_distribution(const PhotonNumberDistribution& d, const std::string& path) {
  CsvWriter w(path, {"n1", "n2", "n3", "probability"});
  for (const auto& [n, p] : d.probabilities) w.row({std::to_string(n[0]), std::to_string(n[1]), std::to_string(n[2]), num(p)});
}

// ---------------------------------------------------------------- sweep

std::vector<std::string> quantity_columns() {
  std::vector<std::string> cols;
  for (const char* q : {"e_n2", "e_n3", "cotangle", "g_1to2", "g_2to1"}) {
    cols.push_back(q);
    cols.push_back(std::string(q) + "_min");
    cols.push_back(std::string(q) + "_max");
  }
  return cols;
}

void append_quantities(std::vector<std::string>& row, const StateInvariants& inv, const std::optional<Interval>& window,
                       const Tolerances& tol) {
  for (Quantity q : {Quantity::EN2, Quantity::EN3, Quantity::Cotangle, Quantity::G12, Quantity::G21}) {
    row.push_back(num(evaluate(q, inv, tol)));
    const Interval b = window ? Interval{std::min(evaluate(q, {inv.mu1, inv.mu2, window->min, {}, {}}, tol),
                                                  evaluate(q, {inv.mu1, inv.mu2, window->max, {}, {}}, tol)),
                                         std::max(evaluate(q, {inv.mu1, inv.mu2, window->min, {}, {}}, tol),
                                                  evaluate(q, {inv.mu1, inv.mu2, window->max, {}, {}}, tol))}
                              : correlation_bounds(inv.mu1, inv.mu2, q, tol);
    row.push_back(num(b.min));
    row.push_back(num(b.max));
  }
}

void region_map(const SweepConfig& c, const fs::path& dir, Manifest& man) {
  const Tolerances tol{};
  std::vector<std::string> cols{"rotated_sum", "rotated_diff", "mu1", "mu2", "valid", "entanglement_region",
                                "steering_1to2", "steering_2to1", "ghzw_class", "coexistence", "delta2_min", "delta2_max"};
  for (const char* q : {"e_n2", "e_n3", "cotangle", "g_1to2", "g_2to1"}) {
    cols.push_back(std::string(q) + "_min");
    cols.push_back(std::string(q) + "_max");
  }
  const int n = c.grid;
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(n) * n);
  parallel_for(rows.size(), c.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n, k = static_cast<int>(idx) % n;
    const double s = c.rotated_sum_min + (c.rotated_sum_max - c.rotated_sum_min) * i / (n - 1);
    const double d = c.rotated_diff_min + (c.rotated_diff_max - c.rotated_diff_min) * k / (n - 1);
    const double mu1 = s + d, mu2 = s - d;
    std::vector<std::string> row{num(s), num(d), num(mu1), num(mu2)};
    const bool valid = mu1 > 0.0 && mu1 <= 1.0 && mu2 >= mu1 * mu1 && mu2 <= mu1;
    row.push_back(valid ? "1" : "0");
    if (!valid) {
      row.resize(cols.size());
      rows[idx] = row;
      return;
    }
    row.push_back(to_string(classify_entanglement(mu1, mu2, tol)));
    row.push_back(to_string(classify_steering(mu1, mu2, SteeringDirection::OneToTwo, tol)));
    row.push_back(to_string(classify_steering(mu1, mu2, SteeringDirection::TwoToOne, tol)));
    row.push_back(to_string(ghzw_classify(mu1, mu2, tol)));
    row.push_back(coexistence_check(mu1, mu2, tol) ? "1" : "0");
    const Interval w = seralian_bounds(mu1, mu2, tol);
    row.push_back(num(w.min));
    row.push_back(num(w.max));
    for (Quantity q : {Quantity::EN2, Quantity::EN3, Quantity::Cotangle, Quantity::G12, Quantity::G21}) {
      const Interval b = correlation_bounds(mu1, mu2, q, tol);
      row.push_back(num(b.min));
      row.push_back(num(b.max));
    }
    rows[idx] = row;
  });
  CsvWriter w((dir / "region_map.csv").string(), cols);
  for (const auto& r : rows) w.row(r);
  man.add(w, "region labels and quantity bounds on a grid of rotated purities");

  // boundary curves mu2(mu1) of every region threshold
  CsvWriter b((dir / "region_boundaries.csv").string(),
              {"mu1", "mu1_squared", "region_i", "fully_entangled", "unsteerable_1to2", "steerable_1to2",
               "unsteerable_2to1", "steerable_2to1", "ghzw_class1", "ghzw_class5", "coexistence"});
  for (int i = 1; i <= n; ++i) {
    const double mu1 = static_cast<double>(i) / n;
    b.row({num(mu1), num(mu1 * mu1), num(RegionThresholds::region_i(mu1)), num(RegionThresholds::fully_entangled(mu1)),
           num(RegionThresholds::unsteerable_1to2(mu1)), num(RegionThresholds::steerable_1to2(mu1)),
           num(RegionThresholds::unsteerable_2to1(mu1)), num(RegionThresholds::steerable_2to1(mu1)),
           num(GhzwThresholds::class1(mu1)), num(GhzwThresholds::class5(mu1)), num(GhzwThresholds::coexistence(mu1))});
  }
  man.add(b, "region threshold curves mu2(mu1)");
}

MultimodeModel model_for(const SweepConfig& c, double modes, double noise) {
  MultimodeModel m;
  m.modes = modes;
  m.pair_mean = c.pair_mean;
  m.noise_mean = noise;
  m.noise_modes = c.noise_modes;
  m.symmetrize = c.symmetrize_detectors;
  return m;
}

void model_curves(const SweepConfig& c, double modes, const fs::path& dir, Manifest& man) {
  const Tolerances tol{};
  EstimateOptions eo;
  eo.fit_tolerance = c.fit_tolerance;

  // beam-level statistics of the model
  {
    CsvWriter w((dir / ("beam_stats_M" + mode_tag(modes) + ".csv")).string(),
                {"noise_mean", "mean_photons", "fano", "noise_reduction", "kl_divergence_2_per_mode"});
    for (double n : c.noise) {
      const MultimodeModel m = model_for(c, modes, n);
      const MomentTable beam = model_beam_moments(m);
      const StateInvariants inv = invariants_from_standard_form(implied_gaussian(m));
      w.row({num(n), num(beam.at(unit(0))), num(fano(beam, 0)), num(noise_reduction(beam, 0, 1)),
             num(kl_divergence_2(inv.mu1, inv.mu2))});
    }
    man.add(w, "model one-beam mean, Fano factor, noise reduction and two-beam divergence per mode, M=" + mode_tag(modes));
  }

  std::vector<std::string> cols{"noise_mean", "order", "mu1", "mu2", "mu3", "delta2", "delta2_min", "delta2_max"};
  for (const auto& q : quantity_columns()) cols.push_back(q);
  for (const char* extra : {"entanglement_region", "ghzw_class", "coexistence", "kl_to_ghzw", "residual", "clamped", "error"})
    cols.push_back(extra);
  for (int order : c.orders) {
    std::vector<CurvePoint> pts(c.noise.size());
    parallel_for(pts.size(), c.threads, [&](std::size_t i) { pts[i] = model_point(model_for(c, modes, c.noise[i]), order, eo); });
    CsvWriter w((dir / ("model_M" + mode_tag(modes) + "_order" + std::to_string(order) + ".csv")).string(), cols);
    for (const auto& p : pts) {
      std::vector<std::string> row{num(p.noise_mean), std::to_string(order)};
      if (!p.ok()) {
        row.resize(cols.size());
        row.back() = p.error;
        man.fail("model M=" + mode_tag(modes) + " order " + std::to_string(order) + " noise " + num(p.noise_mean), p.error);
        w.row(row);
        continue;
      }
      const StateEstimate& e = *p.estimate;
      const StateInvariants& inv = e.invariants;
      const Interval win = e.delta2_interval.value_or(e.delta2_window);
      for (double v : {inv.mu1, inv.mu2, inv.mu3.value_or(purity3(inv, tol)), inv.delta2, win.min, win.max}) row.push_back(num(v));
      append_quantities(row, inv, win, tol);
      row.push_back(to_string(p.entanglement->region));
      row.push_back(to_string(*p.ghzw));
      row.push_back(*p.coexist ? "1" : "0");
      row.push_back(num(kl_to_ghzw(inv, tol)));
      row.push_back(num(e.residual));
      row.push_back(e.clamped ? "1" : "0");
      row.push_back("");
      w.row(row);
    }
    man.add(w, "model curves at analysis order " + std::to_string(order) + ", M=" + mode_tag(modes) +
                   "; quantity bounds span the estimate's seralian interval");
  }
}

AnalysisOptions analysis_options(const SweepConfig& c, double modes, std::uint64_t seed) {
  AnalysisOptions o;
  o.detectors = c.detectors();
  o.modes = modes;
  o.reconstruction = c.use_em ? Reconstruction::Em : Reconstruction::Moments;
  o.resamples = c.resamples;
  o.seed = seed;
  o.orders = c.orders;
  o.estimate.fit_tolerance = c.fit_tolerance;
  o.usability.max_relative_error = c.usability_threshold;
  return o;
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(a),
                  static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  s.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void mc_sweep(const SweepConfig& c, std::size_t mi, const fs::path& dir, Manifest& man) {
  const double modes = c.modes[mi];
  std::vector<std::string> cols{"noise_mean", "realizations", "mu1", "mu1_se", "noise_reduction", "noise_reduction_se",
                                "fano", "fano_se"};
  for (int o : c.orders)
    for (const char* f : {"usable", "relative_error", "mu1", "mu2", "delta2", "delta2_min", "delta2_max", "e_n3_min",
                          "e_n3_max", "cotangle_min", "cotangle_max", "residual", "error"})
      cols.push_back("order" + std::to_string(o) + "_" + f);
  std::vector<std::vector<std::string>> rows(c.noise.size());
  std::vector<std::string> errors(c.noise.size());
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const std::uint64_t seed = point_seed(c.seed, mi, i);
    std::vector<std::string> row{num(c.noise[i]), std::to_string(c.sweep_realizations)};
    try {
      const PhotocountHistogram h = simulate_counts(model_for(c, modes, c.noise[i]), c.detectors(), c.sweep_realizations, seed);
      const AnalysisResult r = analyze(h, analysis_options(c, modes, seed));
      for (const Measured& m : {r.mu1, r.r12, r.fano1}) {
        row.push_back(num(m.value));
        row.push_back(num(m.error.value_or(std::nan(""))));
      }
      for (const auto& o : r.orders) {
        row.push_back(o.usable ? "1" : "0");
        row.push_back(num(o.relative_error));
        if (o.estimate) {
          const StateEstimate& e = *o.estimate;
          const Interval iv = e.delta2_interval.value_or(Interval{e.invariants.delta2, e.invariants.delta2});
          const Interval en3 = quantity_range(e, Quantity::EN3), tpi = quantity_range(e, Quantity::Cotangle);
          for (double v : {e.invariants.mu1, e.invariants.mu2, e.invariants.delta2, iv.min, iv.max, en3.min, en3.max, tpi.min,
                           tpi.max, e.residual})
            row.push_back(num(v));
          row.push_back("");
        } else {
          for (int k = 0; k < 10; ++k) row.push_back("");
          row.push_back(o.error);
        }
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
      row.resize(cols.size());
    }
    rows[i] = row;
  });
  CsvWriter w((dir / ("mc_M" + mode_tag(modes) + ".csv")).string(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    w.row(rows[i]);
    if (!errors[i].empty()) man.fail("mc M=" + mode_tag(modes) + " noise " + num(c.noise[i]), errors[i]);
  }
  man.add(w, "Monte Carlo estimates with bootstrap errors, M=" + mode_tag(modes));
}

int cmd_sweep(const SweepConfig& c) {
  const fs::path dir = ensure_dir(c.out);
  Manifest man;
  region_map(c, dir, man);
  for (std::size_t mi = 0; mi < c.modes.size(); ++mi) {
    model_curves(c, c.modes[mi], dir, man);
    if (c.sweep_realizations > 0) mc_sweep(c, mi, dir, man);
  }
  man.write(dir, "sweep", config_json(c));
  std::cout << "wrote " << man.files.size() << " files to " << dir.string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------- convergence

int cmd_convergence(const SweepConfig& c) {
  const fs::path dir = ensure_dir(c.out);
  Manifest man;
  const double modes = c.modes.front();
  const double noise = c.noise.front();
  std::vector<std::string> cols{"realizations", "order", "characteristic_moment", "relative_error", "usable", "mu1",
                                "mu1_se", "estimate_mu1", "estimate_mu2", "estimate_delta2", "residual", "error"};
  CsvWriter w((dir / "convergence.csv").string(), cols);
  for (std::size_t i = 0; i < c.realizations.size(); ++i) {
    const std::uint64_t n = c.realizations[i];
    const std::uint64_t seed = point_seed(c.seed, 1000, i);
    try {
      const PhotocountHistogram h = simulate_counts(model_for(c, modes, noise), c.detectors(), n, seed, c.threads);
      const AnalysisResult r = analyze(h, analysis_options(c, modes, seed));
      std::string usable;
      for (const auto& o : r.orders) {
        std::vector<std::string> row{std::to_string(n), std::to_string(o.order), num(o.characteristic_moment),
                                     num(o.relative_error), o.usable ? "1" : "0", num(r.mu1.value),
                                     num(r.mu1.error.value_or(std::nan("")))};
        if (o.estimate)
          for (double v : {o.estimate->invariants.mu1, o.estimate->invariants.mu2, o.estimate->invariants.delta2, o.estimate->residual})
            row.push_back(num(v));
        else
          row.insert(row.end(), 4, "");
        row.push_back(o.error);
        w.row(row);
        if (o.usable) usable += (usable.empty() ? "" : ",") + std::to_string(o.order);
      }
      std::cout << "N=" << n << " usable orders: " << (usable.empty() ? "none" : usable) << '\n';
    } catch (const std::exception& e) {
      man.fail("N=" + std::to_string(n), e.what());
    }
  }
  man.add(w, "per-order usability and estimates versus number of realizations (M=" + mode_tag(modes) +
                 ", noise " + num(noise) + ")");
  man.write(dir, "convergence", config_json(c));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric three-beam Gaussian states: invariants, correlations and photocount analysis"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key = value configuration file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--order", g.order, "analysis order: 2, 4, 6 or all")->check(CLI::IsMember({"2", "4", "6", "all"}));
  app.add_option("--out", g.out, "output directory or file");
  app.add_option("--grid", g.grid, "points per axis of region maps");
  app.add_option("--threads", g.threads, "worker threads");
  app.add_option("--tolerance", g.tolerance, "relative-error threshold for usable analysis orders");

  bool as_json = false;
  double mu1 = 0, mu2 = 0;
  std::optional<double> delta2;
  auto* classify = app.add_subcommand("classify", "region, steering and GHZ/W labels of (mu1, mu2 [, delta2])");
  classify->add_option("mu1", mu1)->required();
  classify->add_option("mu2", mu2)->required();
  classify->add_option("delta2", delta2);
  classify->add_flag("--json", as_json, "print JSON");

  double m_delta2 = 0;
  auto* measures = app.add_subcommand("measures", "every quantity of the state (mu1, mu2, delta2) as JSON");
  measures->add_option("mu1", mu1)->required();
  measures->add_option("mu2", mu2)->required();
  measures->add_option("delta2", m_delta2)->required();

  std::uint64_t sim_n = 100000;
  double sim_noise = 0.0, sim_modes = 6.7;
  std::optional<double> sim_pair;
  std::string sim_detectors = "config";
  bool photons_only = false;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo photocount histogram (.csv or .bin by extension of --out)");
  simulate->add_option("-n,--realizations", sim_n, "number of realizations");
  simulate->add_option("--noise", sim_noise, "mean noise photons per beam");
  simulate->add_option("--modes", sim_modes, "number of modes M");
  simulate->add_option("--pair", sim_pair, "mean photons per twin-beam link");
  simulate->add_option("--detectors", sim_detectors, "ideal, config, measured or symmetrized");
  simulate->add_flag("--photons", photons_only, "write true photon numbers, skip detection");

  std::string rec_in, rec_detectors = "config";
  double rec_modes = 6.7;
  bool rec_em = false;
  int rec_max_iter = EmOptions{}.max_iter;
  auto* reconstruct = app.add_subcommand("reconstruct", "photon-number distribution and moment analysis of a histogram");
  reconstruct->add_option("histogram", rec_in)->required();
  reconstruct->add_option("--detectors", rec_detectors, "ideal, config, measured or symmetrized");
  reconstruct->add_option("--modes", rec_modes, "number of modes M");
  reconstruct->add_flag("--em", rec_em, "correct detection through the EM photon-number distribution");
  reconstruct->add_option("--max-iter", rec_max_iter, "EM iteration limit");

  auto* sweep = app.add_subcommand("sweep", "region maps, model curves and Monte Carlo noise sweeps");
  auto* convergence = app.add_subcommand("convergence", "usable analysis orders versus number of realizations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kDomain;
  }

  const Tolerances tol{};
  try {
    if (*classify) {
      require_purity_domain(mu1, mu2, tol);
      if (delta2) {
        const int code = domain_report({mu1, mu2, *delta2, {}, {}}, tol);
        if (code != kOk) return code;
      }
      const json j = classify_json(mu1, mu2, delta2, tol);
      if (as_json) std::cout << j.dump(2) << '\n';
      else print_text(j);
      return kOk;
    }
    if (*measures) {
      const StateInvariants inv{mu1, mu2, m_delta2, {}, {}};
      require_purity_domain(mu1, mu2, tol);
      const int code = domain_report(inv, tol);
      if (code != kOk) return code;
      std::cout << measures_json(inv, tol).dump(2) << '\n';
      return kOk;
    }
    const SweepConfig c = resolve_config(g);
    if (*simulate) {
      MultimodeModel m = model_for(c, sim_modes, sim_noise);
      if (sim_pair) m.pair_mean = *sim_pair;
      const PhotocountHistogram photons = sample_photons(m, sim_n, c.seed, c.threads);
      const PhotocountHistogram h =
          photons_only ? photons : apply_detector(photons, parse_detectors(sim_detectors, c), c.seed ^ 0x9e3779b97f4a7c15ULL);
      const std::string path = g.out.value_or("histogram.csv");
      if (fs::path(path).has_parent_path()) ensure_dir(fs::path(path).parent_path().string());
      save_histogram(h, path);
      std::cout << "wrote " << h.total() << " realizations (" << h.counts.size() << " cells) to " << path << '\n';
      return kOk;
    }
    if (*reconstruct) {
      const PhotocountHistogram h = load_histogram(rec_in);
      const DetectorSet det = parse_detectors(rec_detectors, c);
      const fs::path dir = ensure_dir(g.out.value_or("."));
      EmOptions eo;
      eo.max_iter = rec_max_iter;
      const EmResult em = em_reconstruct(h, det, eo);
      write_distribution(em.distribution, (dir / "distribution.csv").string());
      AnalysisOptions opt = analysis_options(c, rec_modes, c.seed);
      opt.detectors = det;
      opt.em = eo;
      if (rec_em) opt.reconstruction = Reconstruction::Em;
      json j = to_json(analyze(h, opt));
      j["em"] = {{"iterations", em.iterations},
                 {"converged", em.converged},
                 {"log_likelihood", em.log_likelihood.empty() ? 0.0 : em.log_likelihood.back()},
                 {"tail_mass", em.distribution.tail_mass}};
      if (!em.warning.empty()) j["em"]["warning"] = em.warning;
      std::ofstream os(dir / "analysis.json");
      if (!os) throw IoError("cannot write " + (dir / "analysis.json").string());
      os << j.dump(2) << '\n';
      std::cout << "wrote " << (dir / "distribution.csv").string() << " and " << (dir / "analysis.json").string() << '\n';
      if (!em.converged) {
        std::cerr << "warning: " << em.warning << '\n';
        return kConvergence;
      }
      return kOk;
    }
    if (*sweep) return cmd_sweep(c);
    if (*convergence) return cmd_convergence(c);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    // DomainError, RangeError, ConfigError and invalid arguments
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  }
  return kOk;
}
