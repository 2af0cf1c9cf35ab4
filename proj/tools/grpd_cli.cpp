// grpd: command-line front end.
//
//   grpd convolve     --model PAIR_CIRCLE --n 64 --params '{"u":{...},"v":{...}}' --out DIR
//   grpd wf-estimate  --params '{"u":{...},"wf":{...}}'
//   grpd cone-product --params '{"w1":{...},"w2":{...}}'
//   grpd verify       --params '{"u":{...},"v":{...}}'
//   grpd demo NAME | grpd list-demos | grpd run SCENARIO.json
//
// Exit codes: 0 success, 2 property failure, 1 usage or validation error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "grpd/grpd.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string model = "PAIR_CIRCLE";
  int n = 64;
  int m_z = 1;
  std::string params = "{}";
  std::string out = "grpd_out";
  std::uint64_t seed = 0;
};

json parse_params(const std::string& text) {
  const std::string body = fs::exists(text) ? grpd::read_file(text) : text;
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw grpd::FormatError(std::string("--params: ") + e.what());
  }
}

grpd::GroupoidModel model_of(const Common& c) {
  auto m = grpd::make_model(grpd::model_kind_from_string(c.model), c.n, c.m_z);
  m.validate();
  return m;
}

json need(const json& p, const char* key) {
  if (!p.contains(key)) throw grpd::FormatError(std::string("--params needs \"") + key + "\"");
  return p.at(key);
}

/// A cone is either a cone-set JSON object or a catalog spec whose known cone is used.
grpd::ConeSet cone_from(const grpd::GroupoidModel& m, const json& j, std::uint64_t seed) {
  if (j.contains("cells")) return j.get<grpd::ConeSet>();
  return grpd::build_catalog(m, j, seed).cone;
}

int print_checks(const std::string& title, const std::vector<grpd::Check>& checks, bool pass) {
  for (const auto& c : checks)
    std::printf("  [%s] %s (value %.3g, tol %.3g)\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.tolerance);
  std::printf("%s: %s\n", title.c_str(), pass ? "PASS" : "FAIL");
  return pass ? 0 : 2;
}

int cmd_convolve(const Common& c) {
  const auto m = model_of(c);
  const json p = parse_params(c.params);
  const auto u = grpd::build_catalog(m, need(p, "u"), c.seed);
  const auto v = grpd::build_catalog(m, need(p, "v"), c.seed);
  const bool gated = p.value("gated", false);
  const auto w = gated ? grpd::convolve_gated(u.dist, v.dist, u.cone, v.cone).result : grpd::convolve(u.dist, v.dist);
  grpd::save_distribution(c.out, "product", w);
  std::printf("wrote %s/product.json\n", c.out.c_str());
  return 0;
}

int cmd_wf_estimate(const Common& c) {
  const auto m = model_of(c);
  const json p = parse_params(c.params);
  const auto u = grpd::build_catalog(m, need(p, "u"), c.seed);
  const auto wp = grpd::params_from_json(p.value("wf", json::object()), grpd::WfParams::defaults(m.n));
  const auto rep = grpd::estimate_wavefront(u.dist, wp);
  grpd::save_report(c.out, "wf", rep);
  std::printf("%zu singular cells; wrote %s/wf.json and wf_slopes.csv\n", rep.estimated.cells.size(), c.out.c_str());
  return 0;
}

int cmd_cone_product(const Common& c) {
  const auto m = model_of(c);
  const json p = parse_params(c.params);
  const auto w1 = cone_from(m, need(p, "w1"), c.seed);
  const auto w2 = cone_from(m, need(p, "w2"), c.seed);
  grpd::save_cone_set(fs::path(c.out) / "product_bar.json", grpd::cone_product_bar(w1, w2));
  grpd::save_cone_set(fs::path(c.out) / "product_plain.json", grpd::cone_product(w1, w2));
  const bool gate = grpd::hormander_gate(w1, w2);
  std::printf("cone condition %s; wrote %s/product_bar.json and product_plain.json\n", gate ? "holds" : "fails",
              c.out.c_str());
  return 0;
}

int cmd_verify(const Common& c) {
  const auto m = model_of(c);
  const json p = parse_params(c.params);
  const auto u = grpd::build_catalog(m, need(p, "u"), c.seed);
  const auto v = grpd::build_catalog(m, need(p, "v"), c.seed);
  const auto wp = grpd::params_from_json(p.value("wf", json::object()), grpd::WfParams::defaults(m.n));
  const auto rep = grpd::verify_product_bound(u.dist, v.dist, u.cone, v.cone, wp);
  const fs::path out(c.out);
  grpd::save_cone_set(out / "estimated.json", rep.estimate.estimated);
  grpd::save_cone_set(out / "predicted_bar.json", rep.predicted_bar);
  grpd::save_cone_set(out / "predicted_plain.json", rep.predicted_plain);
  grpd::write_file(out / "slopes.csv", grpd::slopes_csv(rep.estimate));
  std::printf("route %s, %zu estimated cells, product max norm %.3g\n", rep.route.c_str(),
              rep.estimate.estimated.cells.size(), rep.product_max_norm);
  std::printf("verify: %s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 2;
}

int cmd_demo(const Common& c, const std::string& name) {
  const auto r = grpd::run_demo(name, c.seed, c.out);
  return print_checks("demo " + name, r.checks, r.pass());
}

int cmd_list_demos() {
  for (const auto& d : grpd::demo_catalog()) std::printf("%-26s %s\n", d.name.c_str(), d.description.c_str());
  return 0;
}

int cmd_run(const Common& c, const std::string& path, bool seed_given) {
  json spec;
  try {
    spec = json::parse(grpd::read_file(path));
  } catch (const json::exception& e) {
    throw grpd::FormatError(std::string("scenario: ") + e.what());
  }
  grpd::validate_scenario(spec);
  const std::uint64_t seed = seed_given ? c.seed : spec.value("seed", std::uint64_t{0});
  const fs::path out = c.out != "grpd_out" || !spec.contains("output") ? fs::path(c.out) : fs::path(spec["output"].get<std::string>());
  const auto r = grpd::run_scenario(spec, seed, out);
  return print_checks("scenario " + r.name, r.checks, r.pass());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convolution, cotangent cones and wave front estimates on grid groupoids"};
  app.require_subcommand(1);
  Common c;
  const auto add_common = [&](CLI::App* s) {
    s->add_option("--model", c.model, "PAIR_CIRCLE, CIRCLE_GROUP, PAIR_TIMES_Z or AFFINE_GROUP");
    s->add_option("--n", c.n, "grid resolution per circle factor (power of two)");
    s->add_option("--m-z", c.m_z, "resolution of the Z factor (PAIR_TIMES_Z)");
    s->add_option("--params", c.params, "JSON text or path to a JSON file");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--seed", c.seed, "seed for sampled checks (default 0)");
  };
  auto* conv = app.add_subcommand("convolve", "convolve two catalog distributions");
  auto* wf = app.add_subcommand("wf-estimate", "estimate the wave front set of a catalog distribution");
  auto* cp = app.add_subcommand("cone-product", "cone products of two cone sets");
  auto* ver = app.add_subcommand("verify", "check WF(u*v) against the cone product");
  auto* demo = app.add_subcommand("demo", "run a built-in demo");
  auto* list = app.add_subcommand("list-demos", "list built-in demos");
  auto* run = app.add_subcommand("run", "run a scenario file");
  for (auto* s : {conv, wf, cp, ver, demo, run}) add_common(s);
  std::string demo_name, scenario_path;
  demo->add_option("name", demo_name, "demo name")->required();
  run->add_option("scenario", scenario_path, "scenario JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*conv) return cmd_convolve(c);
    if (*wf) return cmd_wf_estimate(c);
    if (*cp) return cmd_cone_product(c);
    if (*ver) return cmd_verify(c);
    if (*demo) return cmd_demo(c, demo_name);
    if (*list) return cmd_list_demos();
    if (*run) return cmd_run(c, scenario_path, run->count("--seed") > 0);
  } catch (const grpd::ConeConditionError& e) {
    std::fprintf(stderr, "property failure: %s\n", e.what());
    return 2;
  } catch (const grpd::TransversalityError& e) {
    std::fprintf(stderr, "property failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
