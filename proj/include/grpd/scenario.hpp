#pragma once

// JSON scenarios: named catalog inputs, a chain of operations, and asserted
// properties. Exit codes: 0 all assertions hold, 2 an assertion failed,
// 1 usage or validation error (raised as FormatError / DomainError).

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grpd/cone_algebra.hpp"
#include "grpd/convolution.hpp"
#include "grpd/demos.hpp"
#include "grpd/distribution.hpp"
#include "grpd/io.hpp"
#include "grpd/wavefront.hpp"

namespace grpd {

/// A catalog distribution together with its known wave front cone.
struct CatalogItem {
  Distribution dist;
  ConeSet cone;
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"gaussian_bump",   "band_limited",     "rotation_layer",
                                                 "unit_delta",      "point_mass_grid",  "group_point_mass",
                                                 "counterexample"};
  return names;
}

inline CatalogItem build_catalog(const GroupoidModel& m, const nlohmann::json& spec, std::uint64_t seed) {
  if (!spec.is_object() || !spec.contains("catalog") || !spec["catalog"].is_string())
    throw FormatError("catalog spec needs a \"catalog\" name");
  const std::string name = spec["catalog"].get<std::string>();
  const nlohmann::json p = spec.value("params", nlohmann::json::object());
  const ConeSet none{m, {}};
  const auto coords = [&](const char* key) {
    if (!p.contains(key)) throw FormatError(name + " needs params." + key);
    return make_element(m, p.at(key).get<std::vector<double>>());
  };
  if (name == "gaussian_bump") return {gaussian_bump(coords("center"), p.value("width", m.n / 24.0)), none};
  if (name == "band_limited")
    return {band_limited_field(m, p.value("band", 3), seed + p.value("seed_offset", std::uint64_t{0})), none};
  if (name == "rotation_layer") {
    const long long theta = p.value("theta", 0LL);
    const cd c{p.value("coeff", 1.0), 0.0};
    auto d = make_layer(m, theta, {c}, p.value("order", 0), "rotation-layer");
    return {std::move(d), rotation_conormal(m, theta)};
  }
  if (name == "unit_delta") {
    auto d = unit_delta(m);
    return {d, m.kind == ModelKind::kPairCircle ? rotation_conormal(m, 0) : point_cone(make_element(m, {0.0}))};
  }
  if (name == "point_mass_grid") {
    const Element g = coords("at");
    return {point_mass_grid(g), point_cone(g)};
  }
  if (name == "group_point_mass") {
    const long long a = p.value("a", 0LL);
    return {group_point_mass(m, a, cd{p.value("coeff", 1.0), 0.0}, p.value("order", 0)),
            point_cone(element_from_indices(m, {a}))};
  }
  if (name == "counterexample") {
    if (m.kind != ModelKind::kPairCircle) throw DomainError("counterexample lives on PAIR_CIRCLE");
    return {counterexample_distribution(m.n), point_cone(make_element(m, {0.0, 0.0}))};
  }
  throw FormatError("unknown catalog entry: " + name);
}

// ---------------------------------------------------------------------------

struct ScenarioResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace scenario_detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw FormatError("scenario: " + what);
}

}  // namespace scenario_detail

/// Structural validation mirroring schemas/scenario.schema.json.
inline void validate_scenario(const nlohmann::json& j) {
  using scenario_detail::require;
  require(j.is_object(), "top level must be an object");
  require(j.contains("name") && j["name"].is_string(), "missing name");
  require(j.contains("model") && j["model"].is_object(), "missing model");
  require(j.contains("inputs") && j["inputs"].is_object(), "missing inputs");
  require(j.contains("operations") && j["operations"].is_array(), "missing operations");
  if (j.contains("seed")) require(j["seed"].is_number_unsigned(), "seed must be a non-negative integer");
  if (j.contains("output")) require(j["output"].is_string(), "output must be a string");
  for (const auto& [k, v] : j["inputs"].items()) {
    require(v.is_object() && v.contains("catalog") && v["catalog"].is_string(), "input " + k + " needs a catalog name");
    const auto& names = catalog_names();
    require(std::find(names.begin(), names.end(), v["catalog"].get<std::string>()) != names.end(),
            "input " + k + " names an unknown catalog entry");
    if (v.contains("params")) require(v["params"].is_object(), "input " + k + " params must be an object");
  }
  static const std::vector<std::string> ops = {"convolve", "convolve_gated", "star",  "wf_estimate",
                                               "cone_product", "verify",      "assert_max_norm"};
  for (const auto& op : j["operations"]) {
    require(op.is_object() && op.contains("op") && op["op"].is_string(), "operation needs an op name");
    require(std::find(ops.begin(), ops.end(), op["op"].get<std::string>()) != ops.end(),
            "unknown op " + op["op"].get<std::string>());
    require(op.contains("args") && op["args"].is_array() && !op["args"].empty(), "operation needs args");
    for (const auto& a : op["args"]) require(a.is_string(), "args are names");
    if (op.contains("out")) require(op["out"].is_string(), "out must be a name");
  }
}

/// Runs a validated scenario and writes its artifacts into `out`.
inline ScenarioResult run_scenario(const nlohmann::json& spec, std::uint64_t seed, const fs::path& out) {
  validate_scenario(spec);
  GroupoidModel m;
  try {
    m = spec["model"].get<GroupoidModel>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scenario model: ") + e.what());
  }
  ScenarioResult res{spec["name"].get<std::string>(), seed, {}};
  fs::create_directories(out);

  struct Value {
    Distribution dist;
    std::optional<ConeSet> cone;
  };
  std::map<std::string, Value> env;
  for (const auto& [k, v] : spec["inputs"].items()) {
    auto item = build_catalog(m, v, seed);
    env[k] = Value{std::move(item.dist), std::move(item.cone)};
  }
  const auto get = [&](const std::string& k) -> const Value& {
    auto it = env.find(k);
    if (it == env.end()) throw FormatError("scenario: unknown name " + k);
    return it->second;
  };
  const auto cone_of = [&](const std::string& k) -> const ConeSet& {
    const auto& v = get(k);
    if (!v.cone) throw FormatError("scenario: no cone known for " + k);
    return *v.cone;
  };

  int step = 0;
  for (const auto& op : spec["operations"]) {
    const std::string kind = op["op"].get<std::string>();
    const auto args = op["args"].get<std::vector<std::string>>();
    const std::string outname = op.value("out", kind + "_" + std::to_string(step));
    const auto arity = [&](std::size_t k) {
      if (args.size() != k) throw FormatError("scenario: " + kind + " takes " + std::to_string(k) + " args");
    };
    const WfParams wp = params_from_json(op.value("wf", nlohmann::json::object()), WfParams::defaults(m.n));
    if (kind == "convolve" || kind == "convolve_gated") {
      arity(2);
      Value w;
      if (kind == "convolve")
        w.dist = convolve(get(args[0]).dist, get(args[1]).dist);
      else
        w.dist = convolve_gated(get(args[0]).dist, get(args[1]).dist, cone_of(args[0]), cone_of(args[1])).result;
      if (get(args[0]).cone && get(args[1]).cone) w.cone = cone_product_bar(*get(args[0]).cone, *get(args[1]).cone);
      save_distribution(out, outname, w.dist);
      env[outname] = std::move(w);
    } else if (kind == "star") {
      arity(1);
      Value w{star_involution(get(args[0]).dist), std::nullopt};
      save_distribution(out, outname, w.dist);
      env[outname] = std::move(w);
    } else if (kind == "wf_estimate") {
      arity(1);
      const auto rep = estimate_wavefront(get(args[0]).dist, wp);
      save_report(out, outname, rep);
      if (op.contains("expect_empty"))
        res.checks.push_back({outname + " estimate empty", double(rep.estimated.cells.size()), 0.0,
                              rep.estimated.empty() == op["expect_empty"].get<bool>()});
    } else if (kind == "cone_product") {
      arity(2);
      save_cone_set(out / (outname + "_bar.json"), cone_product_bar(cone_of(args[0]), cone_of(args[1])));
      save_cone_set(out / (outname + "_plain.json"), cone_product(cone_of(args[0]), cone_of(args[1])));
      const bool gate = hormander_gate(cone_of(args[0]), cone_of(args[1]));
      if (op.contains("expect_gate")) res.checks.push_back({outname + " gate", gate ? 1.0 : 0.0, 1.0, gate == op["expect_gate"].get<bool>()});
    } else if (kind == "verify") {
      arity(2);
      const auto rep = verify_product_bound(get(args[0]).dist, get(args[1]).dist, cone_of(args[0]), cone_of(args[1]), wp);
      save_cone_set(out / (outname + "_estimated.json"), rep.estimate.estimated);
      save_cone_set(out / (outname + "_predicted_bar.json"), rep.predicted_bar);
      save_cone_set(out / (outname + "_predicted_plain.json"), rep.predicted_plain);
      write_file(out / (outname + "_slopes.csv"), slopes_csv(rep.estimate));
      res.checks.push_back({outname + " containment", rep.pass ? 1.0 : 0.0, 1.0, rep.pass == op.value("expect", true)});
    } else if (kind == "assert_max_norm") {
      arity(1);
      double mx = 0.0;
      for (const auto& v : to_dense(get(args[0]).dist)) mx = std::max(mx, std::abs(v));
      const double below = op.value("below", 1e-12);
      res.checks.push_back({args[0] + " max norm", mx, below, mx < below});
    }
    ++step;
  }
  auto checks = nlohmann::json::array();
  for (const auto& c : res.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  write_file(out / "summary.json",
             dump_json({{"scenario", res.name}, {"seed", seed}, {"pass", res.pass()}, {"checks", checks}}));
  return res;
}

}  // namespace grpd
