#include <random>

#include <gtest/gtest.h>

#include "grpd/cone_algebra.hpp"
#include "grpd/cotangent.hpp"
#include "grpd/demos.hpp"

using namespace grpd;

namespace {

const GroupoidModel kPair = make_model(ModelKind::kPairCircle, 64);
const GroupoidModel kCircle = make_model(ModelKind::kCircleGroup, 64);

ConeSet cell_at(const GroupoidModel& m, std::vector<double> base, std::vector<Arc> arcs) {
  ConeCell c;
  for (double b : base) c.base_box.push_back(CircleInterval::point(b));
  c.arcs = std::move(arcs);
  return ConeSet{m, {c}};
}

bool same_cone(const ConeSet& a, const ConeSet& b) {
  return cone_contains(a, b, 1e-9, 0.0) && cone_contains(b, a, 1e-9, 0.0);
}

}  // namespace

TEST(ConeProduct, RotationConormalsCompose) {
  for (auto [t1, t2] : {std::pair{3LL, 5LL}, {16LL, 24LL}, {60LL, 10LL}}) {
    const auto p = cone_product(rotation_conormal(kPair, t1), rotation_conormal(kPair, t2));
    EXPECT_TRUE(same_cone(p, rotation_conormal(kPair, t1 + t2))) << t1 << " " << t2;
  }
}

TEST(ConeProduct, DisjointPointCones) {
  const auto w1 = point_cone(make_element(kPair, {0.0, 0.0}));
  const auto w2 = point_cone(make_element(kPair, {0.5, 0.5}));
  EXPECT_TRUE(cone_product(w1, w2).empty());
  EXPECT_TRUE(hormander_gate(w1, w2));
  // The zero-section terms still contribute (0, z, xi, 0) and (x, 0.5, 0, eta).
  EXPECT_FALSE(cone_product_bar(w1, w2).empty());
}

TEST(ConeProduct, UnitsAreIdempotent) {
  for (const auto& m : {kPair, kCircle}) {
    const auto u = a_star_units(m);
    EXPECT_TRUE(same_cone(cone_product(u, u), u)) << to_string(m.kind);
  }
}

TEST(ConeProduct, ModelMismatchThrows) {
  EXPECT_THROW(cone_product(a_star_units(kPair), a_star_units(kCircle)), ModelMismatchError);
}

TEST(ConeProductBar, PointConeTimesEmpty) {
  // (0,0) full cone against a smooth factor: only (xi, 0) directions survive, over bases (0, z).
  const auto w1 = point_cone(make_element(kPair, {0.0, 0.0}));
  const ConeSet none{kPair, {}};
  const auto p = cone_product_bar(w1, none);
  ASSERT_FALSE(p.empty());
  for (const auto& c : p.cells) {
    EXPECT_TRUE(c.base_box[0].contains(0.0));
    for (const auto& a : c.arcs) {
      const double lo = wrap_angle(a.lo);
      EXPECT_TRUE(std::abs(lo) < 1e-9 || std::abs(lo - kPi) < 1e-9) << lo;
      EXPECT_LT(a.hi - a.lo, 1e-9);
    }
  }
  EXPECT_TRUE(cone_product_bar(none, none).empty());
}

TEST(ConeProductBar, LayerTimesEmptyIsEmpty) {
  // No (x, x - theta, xi, -xi) with xi != 0 has s_Gamma = 0, so both zero-section terms vanish.
  EXPECT_TRUE(cone_product_bar(rotation_conormal(kPair, 8), ConeSet{kPair, {}}).empty());
  EXPECT_TRUE(cone_product_bar(ConeSet{kPair, {}}, rotation_conormal(kPair, 8)).empty());
}

TEST(Transversality, Examples) {
  EXPECT_TRUE(transversality(a_star_units(kPair), Transversality::kBi));
  EXPECT_TRUE(transversality(a_star_units(kCircle), Transversality::kBi));
  const auto full = point_cone(make_element(kPair, {0.25, 0.5}));
  EXPECT_FALSE(transversality(full, Transversality::kR));
  EXPECT_FALSE(transversality(full, Transversality::kS));
  EXPECT_TRUE(transversality(rotation_conormal(kPair, 7), Transversality::kBi));
}

TEST(AStarUnits, Shape) {
  const auto u = a_star_units(make_model(ModelKind::kPairCircle, 8));
  ASSERT_EQ(u.cells.size(), 8u);
  for (const auto& c : u.cells) {
    ASSERT_EQ(c.arcs.size(), 2u);
    EXPECT_NEAR(c.arcs[0].lo, 0.75 * kPi, 1e-12);
    EXPECT_NEAR(c.arcs[1].lo, 1.75 * kPi, 1e-12);
    EXPECT_EQ(c.base_box[0], c.base_box[1]);
  }
  const auto g = a_star_units(kCircle);
  ASSERT_EQ(g.cells.size(), 1u);
  EXPECT_EQ(g.cells[0].arcs.size(), 2u);
}

TEST(HormanderGate, Examples) {
  // (0.125, 0.375, 0, eta) against (0.375, 0.6875, xi, 0) with eta = -xi.
  const auto w1 = cell_at(kPair, {0.125, 0.375}, {Arc::point(0.5 * kPi)});
  const auto w2 = cell_at(kPair, {0.375, 0.6875}, {Arc::point(kPi)});
  EXPECT_FALSE(hormander_gate(w1, w2));
  EXPECT_TRUE(hormander_gate(rotation_conormal(kPair, 3), point_cone(make_element(kPair, {0.25, 0.5}))));
}

TEST(HormanderGate, STransversalFirstFactorAlwaysPasses) {
  std::mt19937_64 rng(2);
  int tested = 0;
  for (int t = 0; t < 300; ++t) {
    const ConeSet w1{kPair, {random_cell(kPair, rng)}}, w2{kPair, {random_cell(kPair, rng)}};
    if (!transversality(w1, Transversality::kS)) continue;
    ++tested;
    EXPECT_TRUE(hormander_gate(w1, w2));
  }
  EXPECT_GT(tested, 50);
}

TEST(ConeContains, AngularTolerance) {
  const auto a = cell_at(kPair, {0.25, 0.5}, {Arc::point(0.0)});
  const auto b = cell_at(kPair, {0.25, 0.5}, {Arc::point(15.0 * kPi / 180.0)});
  EXPECT_FALSE(cone_contains(a, b, 10.0 * kPi / 180.0, 0.0));
  EXPECT_TRUE(cone_contains(a, b, 16.0 * kPi / 180.0, 0.0));
}

TEST(ConeContains, BaseTolerance) {
  const auto a = cell_at(kPair, {0.25, 0.5}, {Arc::point(0.0)});
  const auto b = cell_at(kPair, {0.25 + 2.0 / 64, 0.5}, {Arc::point(0.0)});
  EXPECT_FALSE(cone_contains(a, b, 0.0, 1.0));
  EXPECT_TRUE(cone_contains(a, b, 0.0, 2.0));
}

TEST(ConeSet, JsonRoundTrip) {
  const auto w = rotation_conormal(kPair, 5);
  const nlohmann::json j = w;
  EXPECT_EQ(j.get<ConeSet>(), w);
}

// Bar heredity with both factors transversal, and the pointwise identities
// r_Gamma(d1 d2) = r_Gamma(d1), s_Gamma(d1 d2) = s_Gamma(d2).
TEST(Heredity, BarProductWithTransversalFactors) {
  std::mt19937_64 rng(41);
  for (const auto& m : {kPair, kCircle})
    for (int t = 0; t < 500; ++t) {
      const ConeSet w1{m, {random_cell(m, rng)}}, w2{m, {random_cell(m, rng)}};
      const auto bar = cone_product_bar(w1, w2);
      for (auto which : {Transversality::kR, Transversality::kS})
        if (transversality(w1, which) && transversality(w2, which)) EXPECT_TRUE(transversality(bar, which));
    }
}

TEST(Heredity, ZeroSectionTermBreaksOneSidedBarStatement) {
  // W1 s-transversal, W2 holds a ker r_Gamma direction (0, eta) over a composable base.
  const auto w1 = rotation_conormal(kPair, 0);
  const auto w2 = cell_at(kPair, {0.25, 0.5}, {Arc::point(0.5 * kPi)});
  ASSERT_TRUE(transversality(w1, Transversality::kS));
  EXPECT_FALSE(transversality(cone_product_bar(w1, w2), Transversality::kS));
}

TEST(Heredity, PointwiseAnchors) {
  std::mt19937_64 rng(8);
  for (const auto& m : {kPair, kCircle})
    for (int t = 0; t < 500; ++t) {
      const auto d1 = random_cotangent(m, rng);
      const auto d2 = random_ct_composable_after(d1, rng);
      const auto p = ct_multiply(d1, d2);
      EXPECT_EQ(in_kernel(p, KernelKind::kKerR), in_kernel(d1, KernelKind::kKerR));
      EXPECT_EQ(in_kernel(p, KernelKind::kKerS), in_kernel(d2, KernelKind::kKerS));
    }
}
