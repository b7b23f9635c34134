#pragma once

// JSON views of invariants, reports, estimates and moment tables.
// Moment keys are written as "k1_k2_k3".

#include <nlohmann/json.hpp>
#include <string>

#include "tribeam/correlations.hpp"
#include "tribeam/covariance.hpp"
#include "tribeam/ghzw.hpp"
#include "tribeam/invariants.hpp"
#include "tribeam/photonics/analysis.hpp"
#include "tribeam/photonics/estimate.hpp"
#include "tribeam/photonics/moments.hpp"

namespace tribeam {

using json = nlohmann::ordered_json;

inline json to_json(const Interval& i) { return {{"min", i.min}, {"max", i.max}}; }

inline json to_json(const StandardFormParams& p) { return {{"a", p.a}, {"c_plus", p.c_plus}, {"c_minus", p.c_minus}}; }

inline json to_json(const StateInvariants& inv) {
  json j{{"mu1", inv.mu1}, {"mu2", inv.mu2}, {"delta2", inv.delta2}};
  if (inv.mu3) j["mu3"] = *inv.mu3;
  if (inv.errors)
    j["errors"] = {{"mu1", inv.errors->mu1}, {"mu2", inv.errors->mu2}, {"delta2", inv.errors->delta2}, {"mu3", inv.errors->mu3}};
  return j;
}

inline StateInvariants invariants_from_json(const json& j) {
  StateInvariants inv;
  inv.mu1 = j.at("mu1").get<double>();
  inv.mu2 = j.at("mu2").get<double>();
  inv.delta2 = j.at("delta2").get<double>();
  if (j.contains("mu3")) inv.mu3 = j.at("mu3").get<double>();
  if (j.contains("errors")) {
    const json& e = j.at("errors");
    inv.errors = InvariantErrors{e.value("mu1", 0.0), e.value("mu2", 0.0), e.value("delta2", 0.0), e.value("mu3", 0.0)};
  }
  return inv;
}

inline json to_json(const PhysicalityReport& r) {
  json conds = json::array();
  for (const auto& c : r.conditions) conds.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}});
  json j{{"physical", r.physical()}, {"conditions", conds}};
  if (r.min_symplectic) j["min_symplectic"] = *r.min_symplectic;
  return j;
}

inline json to_json(const EntanglementReport& r) {
  json j{{"region", to_string(r.region)}, {"v_minus", r.v_minus}, {"e_n3", r.e_n3}, {"e_n2", r.e_n2}, {"cotangle", r.cotangle}};
  if (r.e_n3_bounds) j["e_n3_bounds"] = to_json(*r.e_n3_bounds);
  if (r.e_n2_bounds) j["e_n2_bounds"] = to_json(*r.e_n2_bounds);
  if (r.cotangle_bounds) j["cotangle_bounds"] = to_json(*r.cotangle_bounds);
  return j;
}

inline json to_json(const SteeringReport& r) {
  json j{{"region_1to2", to_string(r.region_1to2)}, {"region_2to1", to_string(r.region_2to1)},
         {"g_1to2", r.g_1to2}, {"g_2to1", r.g_2to1}};
  if (r.g_1to2_bounds) j["g_1to2_bounds"] = to_json(*r.g_1to2_bounds);
  if (r.g_2to1_bounds) j["g_2to1_bounds"] = to_json(*r.g_2to1_bounds);
  return j;
}

inline std::string moment_key(const photonics::Index3& k) {
  return std::to_string(k[0]) + "_" + std::to_string(k[1]) + "_" + std::to_string(k[2]);
}

inline json to_json(const photonics::MomentTable& t) {
  json entries = json::object();
  for (const auto& [k, v] : t.entries) entries[moment_key(k)] = v;
  json j{{"scope", photonics::to_string(t.scope)}, {"max_order", t.max_order}, {"moments", entries}};
  if (t.std_errors) {
    json se = json::object();
    for (const auto& [k, v] : *t.std_errors) se[moment_key(k)] = v;
    j["std_errors"] = se;
  }
  if (!t.warnings.empty()) j["warnings"] = t.warnings;
  return j;
}

inline json to_json(const photonics::StateEstimate& e) {
  json j{{"order", e.order},
         {"invariants", to_json(e.invariants)},
         {"params", to_json(e.params)},
         {"delta2_window", to_json(e.delta2_window)},
         {"residual", e.residual},
         {"clamped", e.clamped}};
  if (e.delta2_interval) j["delta2_interval"] = to_json(*e.delta2_interval);
  if (!e.note.empty()) j["note"] = e.note;
  if (e.pair_per_mode) j["pair_per_mode"] = *e.pair_per_mode;
  if (e.noise_per_mode) j["noise_per_mode"] = *e.noise_per_mode;
  return j;
}

inline json to_json(const Measured& m) {
  json j{{"value", m.value}};
  if (m.error) j["error"] = *m.error;
  return j;
}

inline json to_json(const photonics::AnalysisResult& r) {
  json orders = json::array();
  for (const auto& o : r.orders) {
    json oj{{"order", o.order},
            {"characteristic_moment", o.characteristic_moment},
            {"relative_error", o.relative_error},
            {"usable", o.usable}};
    if (o.estimate) oj["estimate"] = to_json(*o.estimate);
    if (!o.error.empty()) oj["error"] = o.error;
    orders.push_back(oj);
  }
  return {{"realizations", r.realizations}, {"mu1", to_json(r.mu1)}, {"r12", to_json(r.r12)}, {"fano1", to_json(r.fano1)},
          {"orders", orders},            {"beam_moments", to_json(r.beam)}, {"per_mode_moments", to_json(r.per_mode)},
          {"warnings", r.warnings}};
}

}  // namespace tribeam
