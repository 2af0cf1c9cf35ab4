#include <random>

#include <gtest/gtest.h>

#include "grpd/groupoid.hpp"

using namespace grpd;

namespace {

const GroupoidModel kPair = make_model(ModelKind::kPairCircle, 64);
const GroupoidModel kCircle = make_model(ModelKind::kCircleGroup, 64);
const GroupoidModel kPairZ = make_model(ModelKind::kPairTimesZ, 64, 8);
const GroupoidModel kAffine = make_model(ModelKind::kAffineGroup);

std::vector<GroupoidModel> all_models() { return {kPair, kCircle, kPairZ, kAffine}; }

}  // namespace

TEST(Model, RejectsBadResolution) {
  EXPECT_THROW(make_model(ModelKind::kPairCircle, 48).validate(), DomainError);
  EXPECT_THROW(make_model(ModelKind::kPairCircle, 4).validate(), DomainError);
  EXPECT_THROW(model_kind_from_string("TORUS"), Error);
}

TEST(Model, JsonRoundTrip) {
  const nlohmann::json j = kPairZ;
  EXPECT_EQ(j.at("kind"), "PAIR_TIMES_Z");
  EXPECT_EQ(j.at("m_z"), 8);
  EXPECT_EQ(j.get<GroupoidModel>(), kPairZ);
}

TEST(Anchors, PairCircle) {
  const auto a = anchor_maps(make_element(kPair, {0.25, 0.5}));
  EXPECT_EQ(a.src.coords, std::vector<double>{0.5});
  EXPECT_EQ(a.tgt.coords, std::vector<double>{0.25});
}

TEST(Anchors, PairTimesZ) {
  const auto a = anchor_maps(make_element(kPairZ, {0.25, 0.5, 0.125}));
  EXPECT_EQ(a.src.coords, (std::vector<double>{0.5, 0.125}));
  EXPECT_EQ(a.tgt.coords, (std::vector<double>{0.25, 0.125}));
}

TEST(Anchors, AffineHasOneUnit) {
  const auto a = anchor_maps(make_element(kAffine, {2.0, 1.0}));
  EXPECT_EQ(a.src.coords, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(a.tgt.coords, (std::vector<double>{1.0, 0.0}));
}

TEST(Anchors, RejectInvalidElements) {
  EXPECT_THROW(make_element(kPair, {0.1, 0.5}), DomainError);
  EXPECT_THROW(make_element(kPair, {1.0, 0.5}), DomainError);
  EXPECT_THROW(make_element(kAffine, {0.0, 1.0}), DomainError);
  EXPECT_THROW(make_element(kCircle, {0.25, 0.5}), DomainError);
}

TEST(Multiply, Examples) {
  EXPECT_EQ(multiply(make_element(kPair, {0.25, 0.5}), make_element(kPair, {0.5, 0.75})).coords,
            (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(multiply(make_element(kCircle, {0.75}), make_element(kCircle, {0.5})).coords, std::vector<double>{0.25});
  EXPECT_EQ(multiply(make_element(kAffine, {2.0, 1.0}), make_element(kAffine, {3.0, 4.0})).coords,
            (std::vector<double>{6.0, 9.0}));
}

TEST(Multiply, NonComposableThrows) {
  const auto g1 = make_element(kPair, {0.25, 0.5}), g2 = make_element(kPair, {0.25, 0.75});
  EXPECT_FALSE(is_composable(g1, g2));
  EXPECT_THROW(multiply(g1, g2), CompositionError);
  EXPECT_THROW(is_composable(g1, make_element(kCircle, {0.5})), ModelMismatchError);
}

TEST(Composable, Examples) {
  EXPECT_TRUE(is_composable(make_element(kPair, {0.25, 0.5}), make_element(kPair, {0.5, 0.75})));
  EXPECT_TRUE(is_composable(make_element(kCircle, {0.25}), make_element(kCircle, {0.5})));
}

TEST(Invert, Examples) {
  EXPECT_EQ(invert(make_element(kPair, {0.25, 0.5})).coords, (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(invert(make_element(kCircle, {0.75})).coords, std::vector<double>{0.25});
  EXPECT_EQ(invert(make_element(kAffine, {2.0, 1.0})).coords, (std::vector<double>{0.5, -0.5}));
}

TEST(UnitEmbed, Examples) {
  EXPECT_EQ(unit_embed(make_unit(kPair, {0.5})).coords, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(unit_embed(make_unit(kPairZ, {0.5, 0.25})).coords, (std::vector<double>{0.5, 0.5, 0.25}));
  EXPECT_EQ(unit_embed(make_unit(kAffine, {1.0, 0.0})).coords, (std::vector<double>{1.0, 0.0}));
  const auto x = make_unit(kPairZ, {0.5, 0.25});
  const auto a = anchor_maps(unit_embed(x));
  EXPECT_EQ(a.src, x);
  EXPECT_EQ(a.tgt, x);
}

// Property checks over sampled tuples.

double residual(const Element& a, const Element& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    double d = std::abs(a.coords[i] - b.coords[i]);
    if (a.model.kind != ModelKind::kAffineGroup) d = std::min(d, 1.0 - d);
    r = std::max(r, d);
  }
  return r;
}

TEST(Axioms, AssociativityUnitInverse) {
  std::mt19937_64 rng(5);
  for (const auto& m : all_models()) {
    const double tol = m.kind == ModelKind::kAffineGroup ? 1e-9 : 0.0;
    for (int t = 0; t < 1000; ++t) {
      const auto g1 = random_element(m, rng);
      const auto g2 = random_composable_after(g1, rng);
      const auto g3 = random_composable_after(g2, rng);
      ASSERT_LE(residual(multiply(multiply(g1, g2), g3), multiply(g1, multiply(g2, g3))), tol);
      ASSERT_LE(residual(multiply(unit_embed(target(g1)), g1), g1), tol);
      ASSERT_LE(residual(multiply(g1, unit_embed(source(g1))), g1), tol);
      ASSERT_LE(residual(multiply(g1, invert(g1)), unit_embed(target(g1))), tol);
      ASSERT_LE(residual(multiply(invert(g1), g1), unit_embed(source(g1))), tol);
      const auto p = multiply(g1, g2);
      ASSERT_EQ(target(p), target(g1));
      ASSERT_EQ(source(p), source(g2));
    }
  }
}
