#include <algorithm>
#include <filesystem>

#include <gtest/gtest.h>

#include "grpd/demos.hpp"
#include "grpd/scenario.hpp"

using namespace grpd;

namespace {

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "name": "tiny", "seed": 4,
    "model": {"kind": "PAIR_CIRCLE", "n": 32},
    "inputs": {"d": {"catalog": "unit_delta"}, "f": {"catalog": "band_limited", "params": {"band": 2}}},
    "operations": [{"op": "convolve", "args": ["d", "f"], "out": "df"}]
  })");
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "grpd_test_scenario" / name;
  fs::remove_all(p);
  return p;
}

std::vector<fs::path> scenario_files() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(GRPD_SCENARIO_DIR))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Validate, AcceptsMinimal) { EXPECT_NO_THROW(validate_scenario(minimal())); }

TEST(Validate, Rejections) {
  const auto expect_reject = [](auto edit) {
    auto j = minimal();
    edit(j);
    EXPECT_THROW(validate_scenario(j), FormatError) << j.dump();
  };
  expect_reject([](nlohmann::json& j) { j.erase("name"); });
  expect_reject([](nlohmann::json& j) { j.erase("model"); });
  expect_reject([](nlohmann::json& j) { j["seed"] = -1; });
  expect_reject([](nlohmann::json& j) { j["inputs"]["d"]["catalog"] = "nope"; });
  expect_reject([](nlohmann::json& j) { j["inputs"]["d"]["params"] = 3; });
  expect_reject([](nlohmann::json& j) { j["operations"][0]["op"] = "fold"; });
  expect_reject([](nlohmann::json& j) { j["operations"][0]["args"] = nlohmann::json::array(); });
  expect_reject([](nlohmann::json& j) { j["operations"][0]["args"][0] = 1; });
  expect_reject([](nlohmann::json& j) { j = nlohmann::json::array(); });
}

TEST(Catalog, Entries) {
  const auto m = make_model(ModelKind::kPairCircle, 32);
  const auto bump = build_catalog(m, {{"catalog", "gaussian_bump"}, {"params", {{"center", {0.5, 0.5}}}}}, 0);
  EXPECT_TRUE(bump.cone.empty());
  EXPECT_TRUE(bump.dist.has_smooth());
  const auto layer = build_catalog(m, {{"catalog", "rotation_layer"}, {"params", {{"theta", 3}}}}, 0);
  EXPECT_EQ(layer.cone, rotation_conormal(m, 3));
  const auto pm = build_catalog(m, {{"catalog", "point_mass_grid"}, {"params", {{"at", {0.25, 0.5}}}}}, 0);
  EXPECT_EQ(pm.cone, point_cone(make_element(m, {0.25, 0.5})));
  EXPECT_THROW(build_catalog(m, {{"catalog", "point_mass_grid"}}, 0), FormatError);
  EXPECT_THROW(build_catalog(m, {{"catalog", "nope"}}, 0), FormatError);
  EXPECT_THROW(build_catalog(make_model(ModelKind::kCircleGroup, 32), {{"catalog", "counterexample"}}, 0), DomainError);
  // Seeds reach the random fields.
  const auto a = build_catalog(m, {{"catalog", "band_limited"}}, 1), b = build_catalog(m, {{"catalog", "band_limited"}}, 2);
  EXPECT_NE(a.dist.smooth, b.dist.smooth);
}

TEST(Run, Minimal) {
  const auto out = scratch("minimal");
  const auto r = run_scenario(minimal(), 4, out);
  EXPECT_EQ(r.name, "tiny");
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(fs::exists(out / "df.json"));
}

TEST(Run, UnknownNameIsFormatError) {
  auto j = minimal();
  j["operations"][0]["args"] = {"d", "missing"};
  EXPECT_THROW(run_scenario(j, 4, scratch("unknown")), FormatError);
}

TEST(Run, SampleScenariosPass) {
  const auto files = scenario_files();
  ASSERT_FALSE(files.empty());
  for (const auto& f : files) {
    const auto spec = nlohmann::json::parse(read_file(f));
    const auto r = run_scenario(spec, spec.value("seed", std::uint64_t{0}), scratch(f.stem().string()));
    EXPECT_TRUE(r.pass()) << f;
    for (const auto& c : r.checks) EXPECT_TRUE(c.pass) << f.stem() << ": " << c.name;
  }
}

TEST(Run, Deterministic) {
  for (const auto& f : scenario_files()) {
    const auto spec = nlohmann::json::parse(read_file(f));
    const auto a = scratch(f.stem().string() + "_a"), b = scratch(f.stem().string() + "_b");
    run_scenario(spec, 11, a);
    run_scenario(spec, 11, b);
    EXPECT_EQ(demo_detail::snapshot(a), demo_detail::snapshot(b)) << f;
  }
}
