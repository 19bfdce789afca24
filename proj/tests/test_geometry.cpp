#include <gtest/gtest.h>

#include <cmath>

#include "hlab/errors.hpp"
#include "hlab/fields.hpp"
#include "hlab/geometry.hpp"

using namespace hlab;

namespace {

// Independent oracle: Ricci eigenvalues of dr^2 + psi^2 g_S from central differences of psi.
std::pair<double, double> fd_curvature(double (*psi)(double), int n, double r) {
  const double h = 1e-4;
  const double p0 = psi(r), p1 = (psi(r + h) - psi(r - h)) / (2 * h);
  const double p2 = (psi(r + h) - 2 * p0 + psi(r - h)) / (h * h);
  return {-(n - 1) * p2 / p0, -p2 / p0 + (n - 2) * (1 - p1 * p1) / (p0 * p0)};
}

double sinh_fn(double r) { return std::sinh(r); }
double sin_fn(double r) { return std::sin(r); }

}  // namespace

TEST(Curvature, FlatSpaceIsZero) {
  const Geometry g = make_preset("euclidean", 3, 3, 2.0);
  const auto [rad, ang] = curvature_eigs(g, 1.0, 0.0);
  EXPECT_NEAR(rad, 0.0, 1e-14);
  EXPECT_NEAR(ang, 0.0, 1e-14);
}

TEST(Curvature, HyperbolicMatchesClosedFormAndDifferences) {
  const Geometry g = make_preset("hyperbolic", 3, 3, 2.0);
  const auto [rad, ang] = curvature_eigs(g, 0.7, 0.0);
  EXPECT_NEAR(rad, -2.0, 1e-12);
  EXPECT_NEAR(ang, -2.0, 1e-12);
  const auto [frad, fang] = fd_curvature(sinh_fn, 3, 0.7);
  EXPECT_NEAR(rad, frad, 1e-6);
  EXPECT_NEAR(ang, fang, 1e-6);
}

TEST(Curvature, SphereCapHasUnitCurvature) {
  const Geometry g = make_preset("sphere", 2, 2, 1.5);
  const auto [rad, ang] = curvature_eigs(g, 0.5, 0.0);
  EXPECT_NEAR(rad, 1.0, 1e-12);
  EXPECT_NEAR(ang, 1.0, 1e-12);
  const auto [frad, fang] = fd_curvature(sin_fn, 2, 0.5);
  EXPECT_NEAR(rad, frad, 1e-6);
  (void)fang;
}

TEST(Curvature, ConstantCurvatureModelsAtEverySample) {
  struct Case {
    const char* preset;
    double value;
  } cases[] = {{"euclidean", 0.0}, {"hyperbolic", -1.0}, {"sphere", 1.0}};
  for (const Case& c : cases) {
    const int n = 4;
    const Geometry g = make_preset(c.preset, n, n, 1.5);
    for (double r = 0.0; r <= 1.5; r += 0.05) {
      const auto [rad, ang] = curvature_eigs(g, r, 0.0);
      const double expect = (n - 1) * c.value;
      EXPECT_NEAR(rad, expect, 1e-10 * std::max(1.0, std::abs(expect))) << c.preset << " r=" << r;
      EXPECT_NEAR(ang, expect, 1e-10 * std::max(1.0, std::abs(expect))) << c.preset << " r=" << r;
    }
  }
}

TEST(Curvature, ConformalFactorDividesEigenvalues) {
  const Geometry g = make_preset("conformal-exp(0.5)", 3, 3, 1.5, "hyperbolic");
  const double t = 0.8, a = std::exp(0.5 * t);
  const auto [rad, ang] = curvature_eigs(g, 0.6, t);
  EXPECT_NEAR(rad, -2.0 / (a * a), 1e-12);
  EXPECT_NEAR(ang, -2.0 / (a * a), 1e-12);
}

TEST(BakryEmery, ZeroPotentialEqualsRicci) {
  const Geometry g = make_preset("hyperbolic", 3, 5, 1.5);
  const auto ric = curvature_eigs(g, 0.9, 0.0);
  const auto be = bakry_emery_eigs(g, 0.9, 0.0);
  EXPECT_NEAR(be.first, ric.first, 1e-14);
  EXPECT_NEAR(be.second, ric.second, 1e-14);
}

TEST(BakryEmery, GaussianWeightPlane) {
  const Geometry g = make_preset("gaussian-weight", 2, 4, 1.5);
  const auto [rad, ang] = bakry_emery_eigs(g, 1.0, 0.0);
  EXPECT_NEAR(rad, 0.5, 1e-14);
  EXPECT_NEAR(ang, 1.0, 1e-14);
}

TEST(BakryEmery, EqualDimensionsRequireConstantPotential) {
  EXPECT_THROW(
      {
        const Geometry g = make_preset("gaussian-weight", 2, 2, 1.5);
        g.validate(1.0);
      },
      ConfigError);
  const Geometry c = make_preset("sphere", 2, 2, 1.5);
  EXPECT_NO_THROW(c.validate(1.0));
  const auto ric = curvature_eigs(c, 0.4, 0.0);
  const auto be = bakry_emery_eigs(c, 0.4, 0.0);
  EXPECT_DOUBLE_EQ(be.first, ric.first);
}

TEST(BakryEmery, NondecreasingInSyntheticDimension) {
  double prev_rad = -1e300, prev_ang = -1e300;
  for (double m = 2.25; m <= 20.0; m += 0.25) {
    const Geometry g = make_preset("gaussian-weight", 2, m, 1.5);
    const auto [rad, ang] = bakry_emery_eigs(g, 1.2, 0.0);
    EXPECT_GE(rad, prev_rad - 1e-15);
    EXPECT_GE(ang, prev_ang - 1e-15);
    prev_rad = rad;
    prev_ang = ang;
  }
}

TEST(Drift, Examples) {
  EXPECT_NEAR(drift_coefficient(make_preset("euclidean", 3, 3, 3.0), 2.0, 0.0), 1.0, 1e-14);
  EXPECT_NEAR(drift_coefficient(make_preset("gaussian-weight", 2, 3, 1.5), 1.0, 0.0), 0.0, 1e-14);
  EXPECT_NEAR(drift_coefficient(make_preset("hyperbolic", 2, 2, 1.5), 1.0, 0.0),
              std::cosh(1.0) / std::sinh(1.0), 1e-13);
}

TEST(Drift, LaplacianOfConstantVanishes) {
  for (const char* preset : {"euclidean", "hyperbolic", "sphere", "gaussian-weight"}) {
    const Geometry g = make_preset(preset, 3, 4, 1.5);
    const Grid grid(33, 5, 1.5, 1.0);
    const GridGeometry gg(g, grid);
    const ScalarField c(grid, 3.5, Parity::kEven);
    const ScalarField lap = weighted_laplacian(c, gg);
    for (double x : lap.values()) EXPECT_NEAR(x, 0.0, 1e-12) << preset;
  }
}

TEST(MetricSpeed, StaticIsZero) {
  const MetricSpeed s = metric_speed_eigs(make_preset("hyperbolic", 2, 2, 1.5), 0.5, 0.3);
  EXPECT_EQ(s.radial, 0.0);
  EXPECT_EQ(s.angular, 0.0);
  EXPECT_EQ(s.grad_h_norm, 0.0);
}

TEST(MetricSpeed, ExponentialConformalFactor) {
  const MetricSpeed s = metric_speed_eigs(make_preset("conformal-exp(1)", 2, 2, 1.5), 0.5, 0.3);
  EXPECT_NEAR(s.radial, 1.0, 1e-14);
  EXPECT_NEAR(s.angular, 1.0, 1e-14);
  EXPECT_NEAR(s.grad_h_norm, 0.0, 1e-14);
}

TEST(MetricSpeed, LinearWarp) {
  const Geometry g = make_preset("linear-warp(0.1)", 2, 2, 1.5);
  const MetricSpeed s = metric_speed_eigs(g, 1.0, 0.0);
  EXPECT_NEAR(s.radial, 0.0, 1e-14);
  EXPECT_NEAR(s.angular, 0.1, 1e-14);
  EXPECT_GE(s.grad_h_norm, 0.0);
}

TEST(Bounds, EuclideanStaticAllZero) {
  const Geometry g = make_preset("euclidean", 2, 2, 1.5);
  const GeometryBounds b = extract_bounds(g, Cylinder{1.0, 0.0, 1.0, false}, Grid(33, 9, 1.5, 1.0));
  EXPECT_EQ(b.k, 0.0);
  EXPECT_EQ(b.k_lo, 0.0);
  EXPECT_EQ(b.k_hi, 0.0);
  EXPECT_EQ(b.k2, 0.0);
  EXPECT_EQ(b.l1, 0.0);
  EXPECT_EQ(b.l2, 0.0);
}

TEST(Bounds, HyperbolicCurvatureBound) {
  const int n = 3;
  const Geometry g = make_preset("hyperbolic", n, n, 1.5);
  const GeometryBounds b = extract_bounds(g, Cylinder{1.0, 0.0, 1.0, false}, Grid(33, 9, 1.5, 1.0));
  EXPECT_NEAR(b.k, 1.0, 1e-12);
}

TEST(Bounds, ShrinkingConformalFactor) {
  const Geometry g = make_preset("conformal-exp(-1)", 2, 2, 1.5);
  const GeometryBounds b = extract_bounds(g, Cylinder{1.0, 0.0, 1.0, false}, Grid(33, 9, 1.5, 1.0));
  EXPECT_NEAR(b.k_lo, 1.0, 1e-14);
  EXPECT_EQ(b.k_hi, 0.0);
}

TEST(Bounds, MonotoneUnderCylinderEnlargement) {
  GeometryCoefficients c;
  c.warp = {0.0, 1.0, 0.0, 0.1};
  c.potential = {0.0, 0.0, 0.5};
  c.potential_rate = {0.0, 0.0, 0.25};
  c.conformal_rate = 0.3;
  const Geometry g = make_coefficient_geometry(GeometryFamily::kConformalEvolving, 2, 3, 0.0, 1.5, c);
  const Grid grid(65, 17, 1.5, 1.0);
  GeometryBounds prev;
  for (double R = 0.2; R <= 1.5; R += 0.1) {
    const GeometryBounds b = extract_bounds(g, Cylinder{R, 0.0, 1.0, false}, grid);
    EXPECT_GE(b.k, prev.k);
    EXPECT_GE(b.k_lo, prev.k_lo);
    EXPECT_GE(b.k_hi, prev.k_hi);
    EXPECT_GE(b.k2, prev.k2);
    EXPECT_GE(b.l1, prev.l1);
    EXPECT_GE(b.l2, prev.l2);
    prev = b;
  }
  EXPECT_GT(prev.l1, 0.0);
  EXPECT_GT(prev.l2, 0.0);
  EXPECT_GT(prev.k_hi, 0.0);
}

TEST(Distance, ConformalScaling) {
  const Geometry flat = make_preset("euclidean", 2, 2, 2.0);
  EXPECT_DOUBLE_EQ(geodesic_distance(flat, 0.5, 1.5, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(geodesic_distance(flat, 0.7, 0.7, 0.0), 0.0);
  const Geometry conf = make_preset("conformal-exp(1)", 2, 2, 2.0);
  const double t = std::log(2.0);
  EXPECT_NEAR(geodesic_distance(conf, 0.5, 1.5, t), 2.0, 1e-14);
}

TEST(Validation, RejectsBadPresetsAndParameters) {
  EXPECT_THROW(make_preset("torus", 2, 2, 1.0), ConfigError);
  EXPECT_THROW(make_preset("sphere", 2, 2, 4.0), ConfigError);
  EXPECT_THROW(make_preset("hyperbolic(2)", 2, 2, 1.0), ConfigError);
  GeometryCoefficients c;
  c.warp = {0.5, 1.0};
  EXPECT_THROW(
      {
        const Geometry g = make_coefficient_geometry(GeometryFamily::kStaticWarp, 2, 2, 0.0, 1.0, c);
        g.validate(1.0);
      },
      ConfigError);
}
