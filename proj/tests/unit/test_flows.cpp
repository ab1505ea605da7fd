#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "causal/catalog.hpp"
#include "causal/flows.hpp"
#include "oracles.hpp"

using namespace causal;

namespace {

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr chart(const std::string& name, const ParamOverrides& params = {}) {
  return std::make_shared<const Chart>(builtin(name, params));
}

FlowDef flow_file(const std::string& name) {
  return parse_flow(read_file(std::string(CAUSAL_SOURCE_DIR) + "/defs/" + name));
}

SamplerConfig config(std::size_t count) {
  SamplerConfig c;
  c.count = count;
  return c;
}

std::vector<double> grid(double lo, double step, double hi) {
  std::vector<double> g;
  for (double s = lo; s <= hi + 1e-12; s += step) g.push_back(std::abs(s) < 1e-12 ? 0.0 : s);
  return g;
}

// Uniform random Vaidya points away from r = 0 and the polar axis.
std::vector<double> vaidya_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> t(-5, 5), r(0.3, 20), th(0.1, 3.0), ph(0.1, 6.2);
  return {t(rng), r(rng), th(rng), ph(rng)};
}

double mass_rate(double t, bool increasing) {
  const double sech = 1.0 / std::cosh(t);
  return (increasing ? 1.0 : -1.0) * sech * sech;
}

}  // namespace

TEST(Generator, TimeTranslation) {
  auto v = chart("vaidya");
  const BoundFlow f(vaidya_time_flow(), v);
  const std::vector<double> x{0.3, 2.0, 1.0, 1.0};
  EXPECT_TRUE(f.generator(x).isApprox((Vector(4) << 1, 0, 0, 0).finished()));
}

TEST(Generator, ExponentialScaling) {
  auto m = chart("minkowski");
  FlowDef d = flow_file("minkowski_dilation.flow");
  d.exprs = {{"t", "exp(s)*t"}};
  const BoundFlow f(d, m);
  const std::vector<double> x{1.7, 2.0, -1.0, 0.5};
  EXPECT_TRUE(f.generator(x).isApprox((Vector(4) << 1.7, 0, 0, 0).finished(), 1e-15));
}

TEST(Generator, RadialSine) {
  auto m = chart("minkowski_spherical");
  FlowDef d;
  d.name = "radial";
  d.spacetime = "minkowski_spherical";
  d.exprs = {{"R", "R + s*sin(R)"}};
  const BoundFlow f(d, m);
  const std::vector<double> x{0, std::numbers::pi / 2, 1, 1};
  EXPECT_NEAR(f.generator(x)[1], 1.0, 1e-15);
  EXPECT_EQ(f.generator(x)[0], 0.0);
}

TEST(Generator, FieldMatchesDualGenerator) {
  std::mt19937_64 rng(4);
  auto m = chart("minkowski");
  auto v = chart("vaidya");
  const BoundFlow dil(flow_file("minkowski_dilation.flow"), m);
  const BoundFlow vt(flow_file("vaidya_time.flow"), v);
  std::normal_distribution<double> g;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> xm{g(rng), g(rng), g(rng), g(rng)};
    EXPECT_LT((dil.generator_field().at(xm) - dil.generator(xm)).cwiseAbs().maxCoeff(), 1e-14);
    const auto xv = vaidya_point(rng);
    EXPECT_LT((vt.generator_field().at(xv) - vt.generator(xv)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Generator, DifferenceQuotientConverges) {
  std::mt19937_64 rng(10);
  auto m = chart("minkowski");
  auto v = chart("vaidya");
  const BoundFlow flows[] = {BoundFlow(flow_file("minkowski_time.flow"), m),
                             BoundFlow(flow_file("minkowski_dilation.flow"), m),
                             BoundFlow(flow_file("vaidya_time.flow"), v)};
  for (const BoundFlow& f : flows) {
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> x = f.chart().name() == "vaidya" ? vaidya_point(rng) : f.chart().sampler(config(50)).point(i);
      const Vector xi = f.generator(x);
      const double scale = 1.0 + Eigen::Map<const Vector>(x.data(), 4).cwiseAbs().maxCoeff();
      for (double h : {1e-3, 1e-4}) {
        const std::vector<double> y = f.apply(x, h);
        Vector q(4);
        for (int k = 0; k < 4; ++k) q[k] = (y[k] - x[k]) / h;
        EXPECT_LE((q - xi).cwiseAbs().maxCoeff(), scale * h) << f.def().name << " h=" << h;
      }
    }
  }
}

TEST(Generator, SemigroupLaw) {
  auto m = chart("minkowski");
  auto v = chart("vaidya");
  const BoundFlow flows[] = {BoundFlow(flow_file("minkowski_time.flow"), m),
                             BoundFlow(flow_file("minkowski_dilation.flow"), m),
                             BoundFlow(flow_file("vaidya_time.flow"), v)};
  for (const BoundFlow& f : flows) {
    const RegionSampler s = f.chart().sampler(config(100));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto x = s.point(i);
      for (double s1 : {0.0, 0.25, 0.5})
        for (double s2 : {0.0, 0.125, 0.5}) {
          const auto a = f.apply(f.apply(x, s2), s1), b = f.apply(x, s1 + s2);
          for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-10) << f.def().name;
        }
    }
  }
}

TEST(LieDerivative, KillingVanishes) {
  auto m = chart("minkowski");
  const GeneratorField xi = GeneratorField::parse({"1", "0", "0", "0"}, m->def().coords);
  const std::vector<double> x{0.2, 1, 2, 3};
  EXPECT_EQ(lie_derivative_metric(*m, xi, x).cwiseAbs().maxCoeff(), 0.0);
}

TEST(LieDerivative, DilationIsTwiceMetric) {
  auto m = chart("minkowski");
  const GeneratorField xi = GeneratorField::parse({"t", "x", "y", "z"}, m->def().coords);
  const std::vector<double> x{0.2, -1, 2, 3};
  EXPECT_TRUE(lie_derivative_metric(*m, xi, x).isApprox(2.0 * minkowski_eta(4), 1e-15));
}

TEST(LieDerivative, RotationOnSphericalMinkowskiIsKilling) {
  auto m = chart("minkowski_spherical");
  const GeneratorField xi = GeneratorField::parse({"0", "0", "0", "1"}, m->def().coords);
  const GeneratorField boostish = GeneratorField::parse({"0", "0", "sin(Ph)", "cos(Ph)*cos(Th)/sin(Th)"}, m->def().coords);
  const std::vector<double> x{0.2, 2.5, 1.1, 0.4};
  EXPECT_LT(lie_derivative_metric(*m, xi, x).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(lie_derivative_metric(*m, boostish, x).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(LieDerivative, VaidyaMatchesAnalyticForm) {
  for (bool increasing : {false, true}) {
    auto v = chart("vaidya", {{"M", increasing ? "3 + tanh(t)" : "3 - tanh(t)"}});
    const GeneratorField xi = BoundFlow(vaidya_time_flow(), v).generator_field();
    std::mt19937_64 rng(increasing ? 2 : 1);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const auto x = vaidya_point(rng);
      Matrix expected = Matrix::Zero(4, 4);
      expected(0, 0) = -2.0 / x[1] * mass_rate(x[0], increasing);
      worst = std::max(worst, (lie_derivative_metric(*v, xi, x) - expected).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-9);
  }
}

TEST(Submonoid, VaidyaDecreasingMass) {
  auto v = chart("vaidya");
  const BoundFlow f(vaidya_time_flow(), v);
  const SubmonoidReport r = check_submonoid(f, grid(-2, 1, 2), v->sampler(config(512)));
  EXPECT_EQ(r.interval, (Interval{0, 2}));
  EXPECT_FALSE(r.group);
  ASSERT_EQ(r.steps.size(), 5u);
  for (const auto& st : r.steps) {
    EXPECT_EQ(st.holds, st.s >= 0) << st.s;
    if (st.s < 0) {
      EXPECT_EQ(st.verdict, Verdict::Violated);
      EXPECT_LT(st.min_margin, 0.0);
    }
  }
  EXPECT_LT(r.identity_residual, 1e-10);
}

TEST(Submonoid, VaidyaConstantMassIsGroup) {
  auto v = chart("vaidya", {{"M", "2"}});
  const BoundFlow f(vaidya_time_flow(), v);
  const SubmonoidReport r = check_submonoid(f, grid(-2, 1, 2), v->sampler(config(512)));
  EXPECT_EQ(r.interval, (Interval{-2, 2}));
  EXPECT_TRUE(r.group);
  ASSERT_TRUE(r.conformal);
  EXPECT_TRUE(*r.conformal);
}

TEST(Submonoid, GroupsAreConformal) {
  auto m = chart("minkowski");
  for (const char* name : {"minkowski_time.flow", "minkowski_dilation.flow"}) {
    const BoundFlow f(flow_file(name), m);
    const SubmonoidReport r = check_submonoid(f, grid(-1, 0.5, 1), m->sampler(config(256)));
    EXPECT_EQ(r.interval, (Interval{-1, 1})) << name;
    EXPECT_TRUE(r.group);
    ASSERT_TRUE(r.conformal);
    EXPECT_TRUE(*r.conformal);
    for (const auto& st : r.steps) {
      const BoundMap phi(f.at(st.s), m, m);
      const RegionSampler s = m->sampler(config(64));
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto x = s.point(i);
        const auto lam = conformal_factor(m->point_at(x), phi.pullback(x));
        ASSERT_TRUE(lam);
        EXPECT_NEAR(*lam, std::string(name) == "minkowski_time.flow" ? 1.0 : std::exp(2 * st.s), 1e-10);
      }
    }
  }
}

TEST(Submonoid, RequiresIdentityAtZero) {
  auto m = chart("minkowski");
  FlowDef d = flow_file("minkowski_time.flow");
  d.exprs = {{"t", "t + s + 1"}};
  const BoundFlow f(d, m);
  EXPECT_THROW(check_submonoid(f, grid(0, 1, 1), m->sampler(config(16))), PreconditionError);
}

TEST(NullCone, DecreasingMassIsNonnegative) {
  auto v = chart("vaidya");
  const GeneratorField xi = BoundFlow(vaidya_time_flow(), v).generator_field();
  const NullConeReport r = null_cone_nonneg(*v, xi, v->sampler(config(1024)));
  EXPECT_TRUE(r.nonnegative);
  EXPECT_GE(r.min_margin, -1e-9);
  EXPECT_TRUE(r.witnesses.empty());
  EXPECT_EQ(r.samples_checked, 1024u);
}

TEST(NullCone, KillingHasZeroMargin) {
  auto m = chart("minkowski");
  const GeneratorField xi = GeneratorField::parse({"1", "0", "0", "0"}, m->def().coords);
  const NullConeReport r = null_cone_nonneg(*m, xi, m->sampler(config(64)));
  EXPECT_TRUE(r.nonnegative);
  EXPECT_EQ(r.min_margin, 0.0);
}

TEST(NullCone, IncreasingMassGivesWitnesses) {
  auto v = chart("vaidya", {{"M", "3 + tanh(t)"}});
  const GeneratorField xi = BoundFlow(vaidya_time_flow(), v).generator_field();
  const NullConeReport r = null_cone_nonneg(*v, xi, v->sampler(config(256)));
  EXPECT_FALSE(r.nonnegative);
  EXPECT_LT(r.min_margin, 0.0);
  ASSERT_FALSE(r.witnesses.empty());
  for (const auto& w : r.witnesses) {
    // (L g)(k, k) = -(2/r) Mdot (k^t)^2 for the reported null k.
    const double expect = -2.0 / w.point[1] * mass_rate(w.point[0], true) * w.k[0] * w.k[0];
    EXPECT_NEAR(w.value, expect, 1e-9 * (1 + std::abs(expect)));
    EXPECT_EQ(causal_character(v->point_at(w.point), w.k), CausalClass::FutureNull);
  }
}
