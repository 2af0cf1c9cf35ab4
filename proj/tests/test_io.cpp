#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "grpd/io.hpp"

using namespace grpd;

namespace {

const GroupoidModel kPair = make_model(ModelKind::kPairCircle, 32);

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "grpd_test_io" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

bool bit_equal(const std::vector<cd>& a, const std::vector<cd>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::bit_cast<std::uint64_t>(a[i].real()) != std::bit_cast<std::uint64_t>(b[i].real()) ||
        std::bit_cast<std::uint64_t>(a[i].imag()) != std::bit_cast<std::uint64_t>(b[i].imag()))
      return false;
  return true;
}

}  // namespace

TEST(Grpd, RoundTripIsBitExact) {
  Grid g{{3, 4}, {}};
  for (int i = 0; i < 12; ++i) g.data.emplace_back(std::ldexp(1.0, -i) / 3.0, -i * 0.1);
  g.data[5] = cd{-0.0, std::numeric_limits<double>::denorm_min()};
  const Grid back = decode_grid(encode_grid(g));
  EXPECT_EQ(back.dims, g.dims);
  EXPECT_TRUE(bit_equal(back.data, g.data));
}

TEST(Grpd, HeaderLayout) {
  const std::string s = encode_grid(Grid{{2}, {cd{1.0, 0.0}, cd{0.0, 1.0}}});
  EXPECT_EQ(s.substr(0, 4), "GRPD");
  EXPECT_EQ(s.size(), 4u + 4u + 4u + 2u * 16u);
}

TEST(Grpd, Errors) {
  const std::string good = encode_grid(Grid{{2, 2}, std::vector<cd>(4, cd{1.0, 2.0})});
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_THROW(decode_grid(bad), FormatError);
  EXPECT_THROW(decode_grid(good.substr(0, good.size() - 1)), FormatError);
  EXPECT_THROW(decode_grid(good + "x"), FormatError);
  EXPECT_THROW(decode_grid("GR"), FormatError);
  EXPECT_THROW(encode_grid(Grid{{2, 2}, std::vector<cd>(3)}), FormatError);
  EXPECT_THROW(read_file(scratch("missing") / "nope.grpd"), FormatError);
}

TEST(DistributionFiles, RoundTrip) {
  const auto dir = scratch("dist");
  std::vector<cd> c;
  for (int i = 0; i < kPair.n; ++i) c.emplace_back(std::cos(0.3 * i), 1.0 / (i + 1));
  auto u = add(band_limited_field(kPair, 3, 5), make_layer(kPair, 7, c, 2, "mixed"));
  u.label = "mixed";
  save_distribution(dir, "u", u);
  EXPECT_TRUE(fs::exists(dir / "u.grpd"));
  const auto back = load_distribution(dir / "u.json");
  EXPECT_EQ(back.model, u.model);
  EXPECT_EQ(back.label, u.label);
  EXPECT_EQ(back.r_transversal, u.r_transversal);
  EXPECT_EQ(back.s_transversal, u.s_transversal);
  EXPECT_TRUE(bit_equal(back.smooth, u.smooth));
  ASSERT_EQ(back.layers.size(), u.layers.size());
  for (std::size_t i = 0; i < u.layers.size(); ++i) {
    EXPECT_EQ(back.layers[i].section, u.layers[i].section);
    EXPECT_EQ(back.layers[i].order, u.layers[i].order);
    EXPECT_TRUE(bit_equal(back.layers[i].coeffs, u.layers[i].coeffs));
  }
}

TEST(DistributionFiles, LayerOnlyHasNoGrid) {
  const auto dir = scratch("layer");
  save_distribution(dir, "d", unit_delta(kPair));
  EXPECT_FALSE(fs::exists(dir / "d.grpd"));
  EXPECT_FALSE(load_distribution(dir / "d.json").has_smooth());
}

TEST(DistributionFiles, MalformedSidecar) {
  const auto dir = scratch("bad");
  write_file(dir / "x.json", "{ not json");
  EXPECT_THROW(load_distribution(dir / "x.json"), FormatError);
}

TEST(ConeFiles, RoundTrip) {
  const auto dir = scratch("cone");
  const auto w = cone_product_bar(point_cone(make_element(kPair, {0.0, 0.0})), rotation_conormal(kPair, 3));
  save_cone_set(dir / "w.json", w);
  EXPECT_EQ(load_cone_set(dir / "w.json"), w);
  write_file(dir / "bad.json", "[1,2]");
  EXPECT_THROW(load_cone_set(dir / "bad.json"), FormatError);
}

TEST(Reports, RoundTrip) {
  const auto dir = scratch("report");
  const auto m = make_model(ModelKind::kPairCircle, 64);
  const auto r = estimate_wavefront(rotation_layer(m, 8));
  save_report(dir, "r", r);
  const auto back = load_report(dir / "r.json");
  EXPECT_EQ(back.estimated, r.estimated);
  EXPECT_EQ(back.params.n_directions, r.params.n_directions);
  EXPECT_EQ(back.params.window_radius, r.params.window_radius);
  EXPECT_DOUBLE_EQ(back.params.slope_threshold, r.params.slope_threshold);
  ASSERT_EQ(back.slopes.size(), r.slopes.size());
  for (std::size_t i = 0; i < r.slopes.size(); ++i) {
    EXPECT_EQ(back.slopes[i].center, r.slopes[i].center);
    EXPECT_EQ(back.slopes[i].direction, r.slopes[i].direction);
    EXPECT_EQ(back.slopes[i].slope, r.slopes[i].slope);
  }
}

TEST(Reports, CsvErrors) {
  EXPECT_THROW(parse_slopes_csv(""), FormatError);
  EXPECT_THROW(parse_slopes_csv(slopes_csv(WfReport{}) + "1,2\n"), FormatError);
}

TEST(Params, JsonOverrides) {
  const auto d = WfParams::defaults(64);
  const auto p = params_from_json(nlohmann::json{{"n_directions", 32}, {"slope_threshold", -3.0}}, d);
  EXPECT_EQ(p.n_directions, 32);
  EXPECT_DOUBLE_EQ(p.slope_threshold, -3.0);
  EXPECT_EQ(p.window_radius, d.window_radius);
  const auto q = params_from_json(params_json(d), WfParams{});
  EXPECT_EQ(q.window_radius, d.window_radius);
  EXPECT_DOUBLE_EQ(q.window_sigma, d.window_sigma);
}
