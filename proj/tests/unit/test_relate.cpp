#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "causal/catalog.hpp"
#include "causal/jacobian.hpp"
#include "causal/relate.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

constexpr double kPi = std::numbers::pi;

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr chart(const std::string& name, const ParamOverrides& params = {}) {
  return std::make_shared<const Chart>(builtin(name, params));
}

ChartPtr chart_file(const std::string& text) { return std::make_shared<const Chart>(parse_spacetime(text)); }

MapDef map_file(const std::string& name) {
  return parse_map(read_file(std::string(CAUSAL_SOURCE_DIR) + "/defs/" + name));
}

SamplerConfig config(std::size_t count, int coord = -1, Interval window = {}) {
  SamplerConfig c;
  c.count = count;
  if (coord >= 0) {
    c.windows.assign(4, std::nullopt);
    c.windows[static_cast<std::size_t>(coord)] = window;
  }
  return c;
}

BoundMap desitter_einstein(double b, ChartPtr* src = nullptr) {
  auto w = chart("de_sitter");
  if (src) *src = w;
  return BoundMap(desitter_to_einstein_map(b), w, chart("einstein_static"));
}

BoundMap minkowski_schwarzschild(double c, double a = 2.5, double b = 3.0) {
  return BoundMap(minkowski_to_schwarzschild_map(a, b, c), chart("minkowski_spherical", {{"a", std::to_string(a)}}),
                  chart("schwarzschild_ext", {{"c", std::to_string(c)}}));
}

// u = t - x fixed, v = t + x -> v + u. Pullback eta + du^2: single CND d_t + d_x.
const char* kShear = R"(name = shear
source = minkowski
target = minkowski
map t = 1.5*t - 0.5*x
map x = 0.5*t + 0.5*x
map y = y
map z = z
)";

BoundMap shear() {
  auto m = chart("minkowski");
  return BoundMap(parse_map(kShear), m, m);
}

double eval_component(const MapDef& def, std::size_t i, const std::vector<std::pair<std::string, double>>& at) {
  std::map<std::string, double> vars(at.begin(), at.end());
  for (const auto& [k, v] : def.params) vars[k] = v;
  SymbolList syms;
  for (const auto& [k, v] : vars) syms.push_back(k);
  return eval(parse_expr(def.exprs[i].second, syms), vars);
}

}  // namespace

TEST(Pullback, IdentityOnMinkowski) {
  auto m = chart("minkowski");
  const BoundMap id(identity_map(m->def(), m->def()), m, m);
  const std::vector<double> x{0.3, -1, 2, 5};
  EXPECT_TRUE(id.pullback(x).components().isApprox(minkowski_eta(4)));
}

TEST(Pullback, DeSitterToEinsteinAtEquator) {
  const BoundMap f = desitter_einstein(2.0);
  const std::vector<double> x{0, kPi / 2, kPi / 2, 1.0};
  const Vector expect = (Vector(4) << 4, -1, -1, -1).finished();
  EXPECT_LT((f.pullback(x).components() - Matrix(expect.asDiagonal())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pullback, MinkowskiToSchwarzschild) {
  const BoundMap f = minkowski_schwarzschild(3.0);
  const std::vector<double> x{0, 3, kPi / 2, 1.0};
  const Matrix t = f.pullback(x).components();
  const double ft = 1 - 2 / 3.5;
  EXPECT_NEAR(t(0, 0), 9 * ft, 1e-12);
  EXPECT_NEAR(t(0, 0), 3.857142857, 1e-8);
  EXPECT_NEAR(t(1, 1), -1 / ft, 1e-12);
  EXPECT_NEAR(t(1, 1), -2.333333333, 1e-8);
  EXPECT_NEAR(t(2, 2), -12.25, 1e-12);
  EXPECT_NEAR(t(3, 3), -12.25, 1e-12);
  EXPECT_NEAR(t(0, 1), 0.0, 1e-15);
}

TEST(Pullback, ImageOutsideTargetDomain) {
  // R in (2.5, 2.9) maps to r < 3 with c = 3 and a shifted down.
  const BoundMap f(minkowski_to_schwarzschild_map(3.0, 3.0, 3.0), chart("minkowski_spherical", {{"a", "2.5"}}),
                   chart("schwarzschild_ext"));
  const std::vector<double> x{0, 2.8, 1, 1};
  EXPECT_THROW(f.pullback(x), DomainViolation);
}

TEST(ProperCausal, DeSitterToEinsteinHolds) {
  ChartPtr w;
  const BoundMap f = desitter_einstein(1.5, &w);
  const RelationReport r = check_proper_causal(f, w->sampler(config(1024, 0, {-3, 3})));
  EXPECT_EQ(r.verdict, Verdict::HoldsSampled);
  EXPECT_EQ(r.samples_checked, 1024u);
  EXPECT_GE(r.min_margin, -1e-9);
  ASSERT_EQ(r.conformal.lambda.size(), 1024u);
  EXPECT_FALSE(r.conformal.everywhere);
}

TEST(ProperCausal, DeSitterToEinsteinViolationWindow) {
  ChartPtr w;
  const BoundMap f = desitter_einstein(0.95, &w);
  const RelationReport r = check_proper_causal(f, w->sampler(config(1024, 0, {-3, 3})));
  ASSERT_EQ(r.verdict, Verdict::Violated);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_LE(r.witnesses.size(), 16u);
  const double half = std::acosh(1 / 0.95);
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    const Witness& wit = r.witnesses[i];
    EXPECT_LT(wit.margin, -1e-9);
    EXPECT_LE(std::abs(wit.point[0]), half);
    if (i > 0) EXPECT_LE(r.witnesses[i - 1].margin, wit.margin);
    // Witness pair reproduces the margin on the pullback (unit frame time).
    const OrientedPoint p = w->point_at(wit.point);
    const Vector k = p.frame_inverse() * wit.k, l = p.frame_inverse() * wit.l;
    const Matrix t = p.to_frame(f.pullback(wit.point).components());
    EXPECT_NEAR((k / k[0]).dot(t * (l / l[0])), wit.margin, 1e-9);
    EXPECT_EQ(causal_character(p, wit.k), CausalClass::FutureNull);
  }
}

TEST(ProperCausal, CriticalMassViolatesNearInnerEdge) {
  for (double b : {1.0, 10.0, 100.0}) {
    const BoundMap f = minkowski_schwarzschild(2.0, 2.5, b);
    const RelationReport r = check_proper_causal(f, f.source().sampler(config(4096, 1, {2.5, 50})));
    ASSERT_EQ(r.verdict, Verdict::Violated) << b;
    for (const Witness& wit : r.witnesses) EXPECT_LT(wit.point[1] - 2.5, 1.0);
  }
}

TEST(ProperCausal, TimeReversalIsFlagged) {
  auto m = chart("minkowski");
  const BoundMap f(map_file("time_reversal.cm"), m, m);
  const RelationReport r = check_proper_causal(f, m->sampler(config(256)));
  EXPECT_EQ(r.verdict, Verdict::TimeReversed);
  EXPECT_EQ(r.reversed_samples, 256u);
}

TEST(ProperCausal, MixedOrientationIsError) {
  auto src = chart_file(R"(name = flipping
coords = [t, x, y, z]
metric[0][0] = 1
metric[1][1] = -1
metric[2][2] = -1
metric[3][3] = -1
orientation = [x - 0.01234, 0, 0, 0]
)");
  auto tgt = chart("minkowski");
  const BoundMap f(identity_map(src->def(), tgt->def()), src, tgt);
  const RelationReport r = check_proper_causal(f, src->sampler(config(256)));
  EXPECT_EQ(r.verdict, Verdict::Error);
  EXPECT_NE(r.error.find("orientation"), std::string::npos) << r.error;
}

TEST(ProperCausal, ThreadCountDoesNotChangeReport) {
  ChartPtr w;
  const BoundMap f = desitter_einstein(0.95, &w);
  const RegionSampler s = w->sampler(config(512, 0, {-3, 3}));
  CheckOptions two;
  two.threads = 2;
  const RelationReport a = check_proper_causal(f, s), b = check_proper_causal(f, s, two);
  EXPECT_EQ(a.min_margin, b.min_margin);
  ASSERT_EQ(a.witnesses.size(), b.witnesses.size());
  for (std::size_t i = 0; i < a.witnesses.size(); ++i) EXPECT_EQ(a.witnesses[i].sample, b.witnesses[i].sample);
}

TEST(CanonicalNull, DilationIsDegenerate) {
  auto m = chart("minkowski");
  const BoundMap f(minkowski_dilation_map(2.0), m, m);
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  const CanonicalNullDirections c = canonical_null_directions(f, x);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.directions.size(), 4u);
  EXPECT_TRUE(c.pushforward_null);
}

TEST(CanonicalNull, DeSitterInteriorHasNone) {
  const std::vector<double> x{0, 1.2, 0.8, 2.0};
  const CanonicalNullDirections c = canonical_null_directions(desitter_einstein(1.5), x);
  EXPECT_TRUE(c.directions.empty());
  EXPECT_FALSE(c.degenerate);
}

TEST(CanonicalNull, DeSitterThresholdAtZeroIsDegenerate) {
  const BoundMap f = desitter_einstein(1.0);
  const std::vector<double> x{0, 1.2, 0.8, 2.0};
  // Pullback equals the source metric there.
  EXPECT_LT((f.pullback(x).components() - f.source().metric_at(x)).cwiseAbs().maxCoeff(), 1e-14);
  const CanonicalNullDirections c = canonical_null_directions(f, x);
  EXPECT_TRUE(c.degenerate);
  EXPECT_EQ(c.directions.size(), 4u);
}

TEST(CanonicalNull, RequiresDominantPullback) {
  const std::vector<double> x{0, 1.2, 0.8, 2.0};
  EXPECT_THROW(canonical_null_directions(desitter_einstein(0.95), x), PreconditionError);
}

TEST(CanonicalNull, ShearHasOneDirectionAndOthersGoTimelike) {
  const BoundMap f = shear();
  std::mt19937_64 rng(21);
  const Vector kcnd = (Vector(4) << 1, 1, 0, 0).finished();
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> x{0.1 * trial, -0.2, 0.3, 1.0};
    const CanonicalNullDirections c = canonical_null_directions(f, x);
    ASSERT_EQ(c.directions.size(), 1u);
    EXPECT_TRUE(c.directions[0].vector.isApprox(kcnd, 1e-9));
    EXPECT_TRUE(c.pushforward_null);
    const OrientedPoint src = f.source().point_at(x);
    const OrientedPoint tgt = f.target().point_at(f.image(x));
    const Matrix j = f.jacobian(x);
    EXPECT_TRUE(is_null(causal_character(tgt, j * c.directions[0].vector)));
    for (int i = 0; i < 200; ++i) {
      const Vector v = src.frame() * oracle::random_future_causal(rng, 4, true);
      if ((v / v[0] - kcnd).norm() < 1e-3) continue;
      EXPECT_EQ(causal_character(tgt, j * v), CausalClass::FutureTimelike);
    }
  }
}

TEST(Conformal, DilationIsFour) {
  auto m = chart("minkowski");
  const BoundMap f(minkowski_dilation_map(2.0), m, m);
  const ConformalSummary c = check_conformal(f, m->sampler(config(256)));
  EXPECT_TRUE(c.everywhere);
  EXPECT_EQ(c.count, 256u);
  EXPECT_NEAR(c.min, 4.0, 1e-12);
  EXPECT_NEAR(c.max, 4.0, 1e-12);
  EXPECT_LT(c.max_residual, 1e-8);
}

TEST(Conformal, SchwarzschildShiftIsNot) {
  const BoundMap f = minkowski_schwarzschild(3.0);
  const ConformalSummary c = check_conformal(f, f.source().sampler(config(256, 1, {2.5, 50})));
  EXPECT_FALSE(c.everywhere);
  EXPECT_EQ(c.count, 0u);
}

TEST(Conformal, IdentityIsOne) {
  auto m = chart("minkowski");
  const BoundMap f(identity_map(m->def(), m->def()), m, m);
  const ConformalSummary c = check_conformal(f, m->sampler(config(128)));
  EXPECT_TRUE(c.everywhere);
  EXPECT_EQ(c.min, 1.0);
  EXPECT_EQ(c.max, 1.0);
}

TEST(Isomorphism, SchwarzschildExterior) {
  for (double c : {3.0, 2.0}) {
    auto lambda = chart("minkowski_spherical", {{"a", "2.5"}});
    auto w = chart("schwarzschild_ext", {{"c", std::to_string(c)}});
    const BoundMap fwd(minkowski_to_schwarzschild_map(2.5, 3.0, c), lambda, w);
    MapDef back = schwarzschild_to_minkowski_map();
    const BoundMap bwd(back, w, lambda);
    const IsoReport r = check_isomorphism(fwd, bwd, lambda->sampler(config(512, 1, {2.5, 50})),
                                          w->sampler(config(512, 1, {c, 50})));
    if (c == 3.0) {
      EXPECT_EQ(r.verdict, IsoVerdict::Isomorphic);
      EXPECT_FALSE(r.inverse_verified);
    } else {
      EXPECT_EQ(r.verdict, IsoVerdict::NotIsomorphic);
      EXPECT_EQ(r.forward.verdict, Verdict::Violated);
    }
  }
}

TEST(Isomorphism, BoostPairIsIsometry) {
  auto m = chart("minkowski");
  const BoundMap fwd(map_file("boost.cm"), m, m), bwd(map_file("boost_inverse.cm"), m, m);
  const IsoReport r = check_isomorphism(fwd, bwd, m->sampler(config(256)), m->sampler(config(256)));
  EXPECT_EQ(r.verdict, IsoVerdict::Isomorphic);
  EXPECT_TRUE(r.inverse_verified);
  EXPECT_LT(r.inverse_residual, 1e-8);
  ASSERT_TRUE(r.forward_conformal && r.backward_conformal);
  EXPECT_TRUE(r.forward_conformal->everywhere);
  EXPECT_NEAR(r.forward_conformal->min, 1.0, 1e-10);
  EXPECT_NEAR(r.forward_conformal->max, 1.0, 1e-10);
}

TEST(Isomorphism, VerifiedInversePairsAreConformal) {
  auto m = chart("minkowski");
  for (const auto& [a, b] : {std::pair{"dilation.cm", "contraction.cm"}, std::pair{"boost.cm", "boost_inverse.cm"}}) {
    const BoundMap fwd(map_file(a), m, m), bwd(map_file(b), m, m);
    const IsoReport r = check_isomorphism(fwd, bwd, m->sampler(config(512)), m->sampler(config(512)));
    ASSERT_EQ(r.verdict, IsoVerdict::Isomorphic);
    ASSERT_TRUE(r.inverse_verified);
    for (const auto* c : {&*r.forward_conformal, &*r.backward_conformal}) {
      EXPECT_TRUE(c->everywhere);
      EXPECT_LT(c->max_residual, 1e-8);
      for (const auto& l : c->lambda) {
        ASSERT_TRUE(l);
        EXPECT_GT(*l, 0.0);
      }
    }
  }
}

TEST(Curve, IdentityStaticWorldline) {
  auto m = chart("minkowski");
  const BoundMap id(identity_map(m->def(), m->def()), m, m);
  const std::vector<double> u{-1, 0, 0.5, 2};
  EXPECT_TRUE(curve_pushforward_check(id, {"u", "0", "0", "0"}, "u", u).ok);
}

TEST(Curve, DeSitterWiggle) {
  std::vector<double> u;
  for (int i = -20; i <= 20; ++i) u.push_back(0.1 * i);
  const std::vector<std::string> curve{"u", "pi/2 + 0.1*sin(u)", "pi/2", "1"};
  EXPECT_TRUE(curve_pushforward_check(desitter_einstein(1.5), curve, "u", u).ok);

  // Pushed tangent (b, 0.1 cos u) in (dt^2 - dchi^2) is spacelike where
  // b^2 < 0.01 cos^2 u; at b = 0.5 it stays timelike, so use b = 0.05.
  const CurveCheck bad = curve_pushforward_check(desitter_einstein(0.05), curve, "u", u);
  EXPECT_FALSE(bad.ok);
  ASSERT_FALSE(bad.failing_u.empty());
  for (double uf : bad.failing_u) EXPECT_LT(std::abs(uf), std::acos(0.5));
  EXPECT_TRUE(std::find(bad.failing_u.begin(), bad.failing_u.end(), 0.0) != bad.failing_u.end());
}

TEST(Curve, RejectsNonTimelikeTangent) {
  auto m = chart("minkowski");
  const BoundMap id(identity_map(m->def(), m->def()), m, m);
  const std::vector<double> u{0.0};
  EXPECT_THROW(curve_pushforward_check(id, {"0", "u", "0", "0"}, "u", u), PreconditionError);
}

TEST(Compose, IdentityTwice) {
  auto m = chart("minkowski");
  const BoundMap id(identity_map(m->def(), m->def()), m, m);
  const MapDef c = compose_maps(id, id);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(c.exprs[i].second, m->def().coords[i]);
}

TEST(Compose, ScaleAfterShift) {
  auto m = chart("minkowski");
  MapDef twice = minkowski_dilation_map(2.0);
  twice.exprs = {{"t", "k*t"}, {"x", "x"}, {"y", "y"}, {"z", "z"}};
  const BoundMap shift(time_translation_map(m->def(), 1.0), m, m), dbl(twice, m, m);
  const MapDef c = compose_maps(shift, dbl);  // shift first
  EXPECT_EQ(c.source, "minkowski");
  for (double t : {-2.0, 0.0, 0.7, 3.0})
    EXPECT_NEAR(eval_component(c, 0, {{"t", t}, {"x", 0}, {"y", 0}, {"z", 0}}), 2 * t + 2, 1e-14);
}

TEST(Compose, DeSitterMapAfterShift) {
  auto w = chart("de_sitter");
  const BoundMap shift(time_translation_map(w->def(), 1.0), w, w);
  const BoundMap f = desitter_einstein(1.5);
  const MapDef c = compose_maps(shift, BoundMap(f.def(), w, f.target_ptr()));
  EXPECT_EQ(c.target, "einstein_static");
  for (double tb : {-1.0, 0.0, 0.25})
    EXPECT_NEAR(eval_component(c, 0, {{"tb", tb}, {"chib", 1}, {"thb", 1}, {"phb", 1}}), 1.5 * (tb + 1), 1e-14);
  EXPECT_NEAR(eval_component(c, 1, {{"tb", 0}, {"chib", 0.4}, {"thb", 1}, {"phb", 1}}), 0.4, 0.0);
}

TEST(Compose, TransitivityOnCommonSampler) {
  ChartPtr w;
  const BoundMap f = desitter_einstein(1.5, &w);
  auto v = f.target_ptr();
  const RegionSampler sw = w->sampler(config(1024, 0, {-3, 3}));
  ASSERT_EQ(check_proper_causal(f, sw).verdict, Verdict::HoldsSampled);
  for (double shift : {-2.0, 0.5, 4.0}) {
    const BoundMap g(time_translation_map(v->def(), shift), v, v);
    // g checked on the image of the sample set.
    SamplerConfig cg = config(1024, 0, {-4.5 - 2, 4.5 + 4});
    ASSERT_EQ(check_proper_causal(g, v->sampler(cg)).verdict, Verdict::HoldsSampled);
    const BoundMap gf(compose_maps(f, g), w, v);
    EXPECT_EQ(check_proper_causal(gf, sw).verdict, Verdict::HoldsSampled) << shift;
  }
}

TEST(Compose, TransitivityOfDilationAndBoost) {
  auto m = chart("minkowski");
  const BoundMap f(map_file("boost.cm"), m, m), g(map_file("dilation.cm"), m, m);
  const RegionSampler s = m->sampler(config(512));
  ASSERT_EQ(check_proper_causal(f, s).verdict, Verdict::HoldsSampled);
  ASSERT_EQ(check_proper_causal(g, s).verdict, Verdict::HoldsSampled);
  const RelationReport r = check_proper_causal(BoundMap(compose_maps(f, g), m, m), s);
  EXPECT_EQ(r.verdict, Verdict::HoldsSampled);
  EXPECT_TRUE(r.conformal.everywhere);
  EXPECT_NEAR(r.conformal.min, 4.0, 1e-10);
}

TEST(Pushforward, TimelikeStaysTimelikeUnderHoldingRelation) {
  std::mt19937_64 rng(77);
  ChartPtr w;
  const BoundMap f = desitter_einstein(1.5, &w);
  const BoundMap s = shear();
  const RegionSampler sw = w->sampler(config(64, 0, {-3, 3}));
  const RegionSampler sm = s.source().sampler(config(64));
  for (const auto& [map, sampler] : {std::pair{&f, &sw}, std::pair{&s, &sm}}) {
    ASSERT_EQ(check_proper_causal(*map, *sampler).verdict, Verdict::HoldsSampled);
    int checked = 0;
    for (std::size_t i = 0; i < sampler->size(); ++i) {
      const std::vector<double> x = sampler->point(i);
      const OrientedPoint src = map->source().point_at(x);
      const OrientedPoint tgt = map->target().point_at(map->image(x));
      const Matrix j = map->jacobian(x);
      for (int k = 0; k < 16; ++k, ++checked) {
        const Vector timelike = src.frame() * oracle::random_future_causal(rng, 4, false);
        if (causal_character(src, timelike) != CausalClass::FutureTimelike) continue;
        EXPECT_EQ(causal_character(tgt, j * timelike), CausalClass::FutureTimelike);
        const Vector null = src.frame() * oracle::random_future_causal(rng, 4, true);
        EXPECT_NE(causal_character(tgt, j * null), CausalClass::Spacelike);
        EXPECT_TRUE(is_future_causal(causal_character(tgt, j * null)));
      }
    }
    EXPECT_EQ(checked, 1024);
  }
}

TEST(Sampler, PointsStayInsideShrunkDomain) {
  for (const std::string& name : builtin_names()) {
    auto c = chart(name);
    const RegionSampler s = c->sampler(config(500));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::vector<double> x = s.point(i);
      for (std::size_t k = 0; k < x.size(); ++k) {
        const Interval& d = c->def().domain[k];
        EXPECT_GE(x[k], d.lo + 1e-3 - 1e-12) << name;
        EXPECT_LE(x[k], d.hi - 1e-3 + 1e-12) << name;
        EXPECT_LE(std::abs(x[k]), 1e6);
      }
      EXPECT_TRUE(c->in_domain(x));
    }
  }
}

TEST(Sampler, InfiniteSidesRespectWindow) {
  const RegionSampler s({{-INFINITY, INFINITY}, {0.0, INFINITY}}, {std::nullopt, std::nullopt}, config(2000));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = s.point(i);
    EXPECT_LE(std::abs(x[0]), 10.0);
    EXPECT_GT(x[1], 0.0);
    EXPECT_LE(x[1], 10.0 + 1e-3);
  }
}

TEST(Sampler, SymmetricWindowStartsAtCentre) {
  const RegionSampler s({{-INFINITY, INFINITY}}, {Interval{-3, 3}}, config(16));
  EXPECT_EQ(s.point(0)[0], 0.0);
  EXPECT_EQ(s.box()[0], (Interval{-3, 3}));
}

TEST(Sampler, DeterministicAndSeeded) {
  auto c = chart("de_sitter");
  SamplerConfig a = config(64), b = config(64);
  b.seed = 7;
  const RegionSampler s1 = c->sampler(a), s2 = c->sampler(a), s3 = c->sampler(b);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(s1.point(i), s2.point(i));
  // Seed shifts the Halton index.
  for (std::size_t i = 0; i + 7 < 64; ++i) EXPECT_EQ(s3.point(i), s1.point(i + 7));
}

TEST(Sampler, GridCoversCount) {
  SamplerConfig g = config(81);
  g.scheme = SampleScheme::Grid;
  const RegionSampler s({{0, 1}, {0, 1}}, {std::nullopt, std::nullopt}, g);
  EXPECT_EQ(s.size(), 81u);
  EXPECT_EQ(s.point(0), (std::vector<double>{1e-3, 1e-3}));
  EXPECT_EQ(s.point(80), (std::vector<double>{1 - 1e-3, 1 - 1e-3}));
}

TEST(Definitions, RoundTripThroughText) {
  for (const std::string& name : builtin_names()) {
    const SpacetimeDef d = builtin(name);
    const SpacetimeDef e = parse_spacetime(to_text(d));
    EXPECT_EQ(e.coords, d.coords);
    EXPECT_EQ(e.domain, d.domain);
    EXPECT_EQ(e.metric, d.metric);
    EXPECT_EQ(e.orientation, d.orientation);
  }
  const MapDef m = map_file("dilation.cm");
  EXPECT_EQ(parse_map(to_text(m)).exprs, m.exprs);
}

TEST(Definitions, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_spacetime(text);
    } catch (const DefinitionError& e) {
      return e.line();
    }
    return 999;
  };
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\nmetric[0][0] = 1 +\n"), 3u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\n\n# c\ndomain q = (0, 1)\n"), 5u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\nbogus = 1\n"), 3u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, t]\n"), 2u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\ndomain x = (1, 0)\n"), 3u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\nmetric[0][0] = 1\nmetric[1][1] = -1\norientation = [1, 0, 0]\n"), 5u);
  EXPECT_EQ(line_of("name = a\ncoords = [t, x]\nmetric[0][0] = 1\nmetric[1][1] = -w\norientation = [1, 0]\n"), 4u);
  try {
    parse_map("source = a\ntarget = b\nmap t = t\nmap t = x\n");
    FAIL();
  } catch (const DefinitionError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(Definitions, BadMapsRejected) {
  auto m = chart("minkowski");
  MapDef unknown = minkowski_dilation_map(2.0);
  unknown.exprs[0].second = "k*q";
  EXPECT_ANY_THROW(BoundMap(unknown, m, m));
  MapDef singular = minkowski_dilation_map(0.0);
  const BoundMap s(singular, m, m);
  const std::vector<double> x{1, 1, 1, 1};
  EXPECT_THROW(s.jacobian(x), SingularJacobian);
  const RelationReport r = check_proper_causal(s, m->sampler(config(16)));
  EXPECT_EQ(r.verdict, Verdict::Error);
}
