#include <gtest/gtest.h>

#include <cmath>

#include "hlab/errors.hpp"
#include "hlab/estimate_engine.hpp"
#include "hlab/harnack_core.hpp"

using namespace hlab;

namespace {

RadialFn polynomial_profile() {
  return make_radial_fn([](auto r, auto t) {
    using std::exp;
    return 2.0 + 0.5 * r * r * exp(-0.3 * t) + 0.1 * r * r * r * r;
  });
}

Geometry conformal_scene() {
  GeometryCoefficients c;
  c.warp = {0.0, 1.0};
  c.potential = {0.0, 0.0, 0.5};
  c.potential_rate = {0.0, 0.0, 0.25};
  c.conformal_rate = 0.5;
  return make_coefficient_geometry(GeometryFamily::kConformalEvolving, 2, 3, 0.0, 1.5, c);
}

Geometry warp_scene() {
  GeometryCoefficients c;
  c.warp = {0.0, 1.0, 0.0, 0.0};
  c.warp_rate = {0.0, 0.0, 0.0, 0.2};
  c.potential = {0.0, 0.0, 0.5};
  c.potential_rate = {0.0, 0.0, 0.25};
  return make_coefficient_geometry(GeometryFamily::kEvolvingWarp, 3, 4, 0.0, 1.5, c);
}

HarnackParams params(double p, double m, double alpha, double beta = 0.0) {
  HarnackParams hp;
  hp.p = p;
  hp.m = m;
  hp.alpha = constant_time_fn(alpha);
  hp.beta = constant_time_fn(beta);
  return hp;
}

const auto kSamples = sample_points(0.1, 0.9, 0.1, 0.9, 7, 7);

}  // namespace

TEST(Params, CoefficientB) {
  EXPECT_NEAR(params(2.0, 2.0, 2.0).b(), 2.0 / 3.0, 1e-15);
  double prev = 0.0;
  for (double m = 2.0; m <= 40.0; m += 1.0) {
    const double b = params(1.5, m, 2.0).b();
    EXPECT_GT(b, prev);
    EXPECT_LT(b, 1.0);
    prev = b;
  }
}

TEST(Params, ValidationRejectsBadValues) {
  EXPECT_THROW(params(2.0, 2.0, 0.5).validate(2, 1.0), ConfigError);
  EXPECT_THROW(params(2.0, 2.0, 1.0).validate(2, 1.0), ConfigError);
  EXPECT_THROW(params(1.0, 2.0, 2.0).validate(2, 1.0), ConfigError);
  EXPECT_THROW(params(2.0, 2.0, 2.0).validate(3, 1.0), ConfigError);
  EXPECT_NO_THROW(params(2.0, 3.0, 1.01).validate(3, 1.0));
  HarnackParams decreasing = params(2.0, 2.0, 2.0);
  decreasing.alpha = make_time_fn([](auto t) { return 3.0 - t; });
  EXPECT_THROW(decreasing.validate(2, 1.0), ConfigError);
}

TEST(Params, PresetStartingAtOneExcludesInitialSlice) {
  HarnackParams hp = params(2.0, 2.0, 2.0);
  EXPECT_FALSE(hp.initial_slice_excluded());
  const AlphaBeta ab = alpha_beta_preset(AlphaBetaPreset::kExp, 0.5, hp.b());
  hp.alpha = ab.alpha;
  EXPECT_TRUE(hp.initial_slice_excluded());
  EXPECT_NO_THROW(hp.validate(2, 1.0));
}

TEST(OperatorL, ConstantIsAnnihilated) {
  const Grid grid(33, 17, 1.5, 1.0);
  const GridGeometry gg(make_preset("hyperbolic", 2, 2, 1.5), grid);
  const ScalarField w(grid, 4.0, Parity::kEven);
  const ScalarField v(grid, [](double r, double t) { return 1.0 + r * r + t; }, Parity::kEven);
  for (double x : op_Lpv(w, v, gg, 2.0).values()) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(OperatorL, LinearInW) {
  const Grid grid(33, 17, 1.5, 1.0);
  const GridGeometry gg(make_preset("gaussian-weight", 2, 3, 1.5), grid);
  const ScalarField v(grid, [](double r, double t) { return 1.0 + r * r + t; }, Parity::kEven);
  const ScalarField w1(grid, [](double r, double t) { return std::cos(r) * t; }, Parity::kEven);
  const ScalarField w2(grid, [](double r, double t) { return r * r * r * r + t * t; }, Parity::kEven);
  const ScalarField lhs = op_Lpv(2.0 * w1 + (-3.0) * w2, v, gg, 1.7);
  const ScalarField rhs = 2.0 * op_Lpv(w1, v, gg, 1.7) + (-3.0) * op_Lpv(w2, v, gg, 1.7);
  for (std::size_t k = 0; k < lhs.values().size(); ++k)
    EXPECT_NEAR(lhs.values()[k], rhs.values()[k], 1e-9);
}

TEST(HarnackQuantity, ConstantPressureGivesZero) {
  const Grid grid(17, 9, 1.0, 1.0);
  const GridGeometry gg(make_preset("sphere", 2, 2, 1.0), grid);
  const ScalarField v(grid, 2.5, Parity::kEven);
  const HarnackField hf = harnack_F(v, gg, params(2.0, 2.0, 3.0), Nonlinearity::zero());
  for (double x : hf.F.values()) EXPECT_NEAR(x, 0.0, 1e-14);
}

TEST(HarnackQuantity, AffineInAlphaAndBeta) {
  const Grid grid(33, 17, 1.5, 1.0);
  const GridGeometry gg(make_preset("hyperbolic", 2, 2, 1.5), grid);
  const ScalarField v(grid, [](double r, double t) { return 2.0 + r * r * std::exp(-t); }, Parity::kEven);
  PowerSumCoefficients c{{0.3}, {-0.5}, {}, {}};
  const Nonlinearity g = Nonlinearity::power_sum(c);
  const HarnackField a = harnack_F(v, gg, params(2.0, 2.0, 2.0), g);
  const HarnackField b = harnack_F(v, gg, params(2.0, 2.0, 3.0), g);
  const HarnackField s = harnack_F(v, gg, params(2.0, 2.0, 2.0, 0.5), g);
  for (std::size_t k = 0; k < a.F.values().size(); ++k) {
    const double diff_ratio = a.time_ratio.values()[k] - a.source_ratio.values()[k];
    EXPECT_NEAR(b.F.values()[k] - a.F.values()[k], -diff_ratio, 1e-12);
    EXPECT_NEAR(s.F.values()[k], a.F.values()[k] - 0.5, 1e-12);
  }
}

TEST(HarnackQuantity, BarenblattClosedForm) {
  const int n = 2;
  const double p = 2.0, C = 1.0, shift = 0.1, alpha = 1.5;
  const double beta = 1.0 / (n * (p - 1) + 2), k = (p - 1) * beta / (2 * p), e = -n * beta * (p - 1);
  auto closed = [&](double r, double t) {
    const double s = t + shift, q = p / (p - 1);
    const double v = q * (C * std::pow(s, e) - k * r * r / s);
    const double v_r = -q * 2 * k * r / s;
    const double v_t = q * (C * e * std::pow(s, e - 1) + k * r * r / (s * s));
    return v_r * v_r / v - alpha * v_t / v;
  };
  const Geometry geom = make_preset("euclidean", n, n, 1.0);
  const RadialFn v = barenblatt_pressure(n, p, C, shift);
  for (const auto& [r, t] : kSamples) {
    const PointState s = analytic_state(v, geom, Nonlinearity::zero(), params(p, n, alpha), r, t);
    EXPECT_NEAR(s.F, closed(r, t), 1e-12 * std::max(1.0, std::abs(s.F)));
  }
  const Grid grid(257, 129, 1.0, 1.0);
  const ScalarField vf(grid, [&](double r, double t) { return v(r, t); }, Parity::kEven);
  const HarnackField hf = harnack_F(vf, GridGeometry(geom, grid), params(p, n, alpha), Nonlinearity::zero());
  for (int j = 32; j < grid.nt(); j += 16)
    for (int i = 0; i < grid.nr(); i += 16) {
      const double ref = closed(grid.r(i), grid.t(j));
      EXPECT_NEAR(hf.F(i, j), ref, 1e-3 * std::abs(ref)) << grid.r(i) << " " << grid.t(j);
    }
}

TEST(HarnackQuantity, FloorViolationIsDomainError) {
  const Grid grid(17, 9, 1.0, 1.0);
  const GridGeometry gg(make_preset("euclidean", 2, 2, 1.0), grid);
  ScalarField v(grid, 1.0, Parity::kEven);
  v(3, 3) = -1.0;
  EXPECT_THROW(harnack_F(v, gg, params(2.0, 2.0, 2.0), Nonlinearity::zero()), DomainError);
}

TEST(Identities, PressureEquationOnBarenblatt) {
  const Geometry geom = make_preset("euclidean", 3, 3, 1.0);
  const RadialFn v = barenblatt_pressure(3, 2.5, 1.0, 0.1);
  EXPECT_LT(residual_pressure_eq(v, geom, 2.5, Nonlinearity::zero(), kSamples).max_rel, 1e-13);
  // A wrong exponent is detected.
  EXPECT_GT(residual_pressure_eq(v, geom, 2.0, Nonlinearity::zero(), kSamples).max_rel, 1e-3);
}

TEST(Identities, QuotientRule) {
  const RadialFn f = make_radial_fn([](auto r, auto t) { return 1.0 + r * r * t; });
  const RadialFn g = make_radial_fn([](auto r, auto t) { return 1.0 + 0.5 * r * r + 0.25 * t; });
  for (const Geometry& geom : {conformal_scene(), warp_scene(), make_preset("sphere", 2, 2, 1.2)})
    EXPECT_LT(residual_quotient_rule(f, g, polynomial_profile(), geom, 2.0, kSamples).max_rel, 1e-13)
        << geom.name();
}

TEST(Identities, CommutatorStaticAllVariantsVanish) {
  const auto table = residual_commutator(polynomial_profile(), make_preset("hyperbolic", 2, 3, 1.5), kSamples);
  ASSERT_EQ(table.size(), 16u);
  for (const auto& cv : table) EXPECT_LT(cv.residual.max_abs, 1e-12) << cv.name;
}

TEST(Identities, CommutatorSignPatternIsUnique) {
  const auto a = residual_commutator(polynomial_profile(), conformal_scene(), kSamples);
  const auto b = residual_commutator(polynomial_profile(), warp_scene(), kSamples);
  const auto ok = consistent_variants({a, b}, 1e-9);
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok.front(), "(-, +, +, +)");
}

TEST(Identities, WeightedBochner) {
  const RadialFn sq = make_radial_fn([](auto r, auto) { return r * r; });
  const RadialFn ch = make_radial_fn([](auto r, auto t) {
    using std::cosh;
    return cosh(r) * (1.0 + t);
  });
  for (const Geometry& geom : {make_preset("euclidean", 3, 3, 1.5), make_preset("hyperbolic", 2, 4, 1.5),
                               make_preset("gaussian-weight", 2, 3, 1.5), conformal_scene(), warp_scene()}) {
    EXPECT_LT(residual_bochner(sq, geom, kSamples).max_rel, 1e-12) << geom.name();
    EXPECT_LT(residual_bochner(ch, geom, kSamples).max_rel, 1e-12) << geom.name();
  }
}

TEST(Identities, HarnackEvolutionWithConstantAlpha) {
  const RadialFn v = polynomial_profile();
  for (const Geometry& geom : {make_preset("hyperbolic", 2, 3, 1.5), conformal_scene(), warp_scene()}) {
    const Nonlinearity g = manufactured_forcing(v, geom, 2.0);
    EXPECT_LT(residual_F_evolution(v, geom, params(2.0, geom.m(), 2.0, 0.3), g, kSamples).max_rel, 1e-10)
        << geom.name();
  }
}

TEST(Identities, HarnackEvolutionWithTimeDependentAlpha) {
  const RadialFn v = polynomial_profile();
  const Geometry geom = make_preset("hyperbolic", 2, 3, 1.5);
  HarnackParams hp = params(1.5, 3.0, 2.0);
  const AlphaBeta ab = alpha_beta_preset(AlphaBetaPreset::kCoth, 0.7, hp.b());
  hp.alpha = ab.alpha;
  hp.beta = ab.beta;
  EXPECT_LT(residual_F_evolution(v, geom, hp, manufactured_forcing(v, geom, 1.5), kSamples).max_rel, 1e-10);
}

TEST(Identities, HarnackEvolutionOnGridConverges) {
  const RadialFn v = polynomial_profile();
  const Geometry geom = make_preset("euclidean", 2, 3, 1.5);
  const Nonlinearity g = manufactured_forcing(v, geom, 2.0);
  std::vector<std::pair<double, double>> errs;
  for (auto [nr, nt] : {std::pair{33, 17}, {65, 65}, {129, 257}}) {
    const Grid grid(nr, nt, 1.5, 1.0);
    const ScalarField vf(grid, [&](double r, double t) { return v(r, t); }, Parity::kEven);
    const ResidualSummary rs =
        residual_F_evolution(vf, GridGeometry(geom, grid), params(2.0, 3.0, 2.0), g, 0.0, 1.0, 0.25, 0.75);
    errs.push_back({grid.dr(), rs.max_abs});
  }
  EXPECT_GT(convergence_order(errs), 1.8);
}

TEST(LemmaBounds, HoldAtSamplePoints) {
  const RadialFn v = polynomial_profile();
  for (const Geometry& geom : {make_preset("hyperbolic", 2, 3, 1.5), conformal_scene(), warp_scene()}) {
    const Nonlinearity g = manufactured_forcing(v, geom, 2.0);
    const GeometryBounds bounds = extract_bounds(geom, Cylinder{1.0, 0.0, 1.0, false}, Grid(129, 65, 1.5, 1.0));
    for (LemmaBound which : {LemmaBound::kSquareDropped, LemmaBound::kExpanded, LemmaBound::kGeometric}) {
      const MarginSummary ms = check_lemma_inequalities(which, v, geom, params(2.0, geom.m(), 2.0), g, bounds, kSamples);
      EXPECT_GE(ms.min_scaled, -1e-10) << geom.name() << " bound " << static_cast<int>(which);
      EXPECT_EQ(ms.count, static_cast<int>(kSamples.size()));
    }
  }
}

TEST(LemmaBounds, StaticFactorIsSharperAndStillHolds) {
  const RadialFn v = polynomial_profile();
  const Geometry geom = make_preset("hyperbolic", 2, 3, 1.5);
  const Nonlinearity g = manufactured_forcing(v, geom, 2.0);
  const GeometryBounds bounds;
  const auto hp = params(2.0, 3.0, 2.0);
  const MarginSummary plain = check_lemma_inequalities(LemmaBound::kSquareDropped, v, geom, hp, g, bounds, kSamples);
  const MarginSummary sharp =
      check_lemma_inequalities(LemmaBound::kSquareDropped, v, geom, hp, g, bounds, kSamples, true);
  EXPECT_GE(sharp.min_scaled, -1e-10);
  EXPECT_LE(sharp.min_margin, plain.min_margin + 1e-12);
  EXPECT_THROW(check_lemma_inequalities(LemmaBound::kSquareDropped, v, conformal_scene(), hp,
                                        manufactured_forcing(v, conformal_scene(), 2.0), bounds, kSamples, true),
               ConfigError);
}
