#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hlab/errors.hpp"
#include "hlab/pme_solver.hpp"

using namespace hlab;

namespace {

// Radial Euclidean residual u_t - Lap(u^p) of the Barenblatt oracle by central differences.
double barenblatt_fd_residual(int n, double p, double C, double r, double t) {
  const double h = 1e-4;
  auto u = [&](double rr, double tt) { return barenblatt_oracle(n, p, C, rr, tt); };
  auto w = [&](double rr) { return std::pow(u(rr, t), p); };
  const double u_t = (u(r, t + h) - u(r, t - h)) / (2 * h);
  const double w_r = (w(r + h) - w(r - h)) / (2 * h);
  const double w_rr = (w(r + h) - 2 * w(r) + w(r - h)) / (h * h);
  return u_t - (w_rr + (n - 1) / r * w_r);
}

Jet identity_source(const Jet&, const Jet&, const Jet& u) { return u; }
Jet square_source(const Jet&, const Jet&, const Jet& u) { return u * u; }

}  // namespace

TEST(PressureTransform, Examples) {
  EXPECT_DOUBLE_EQ(pressure_from_density(1.0, 2.0), 2.0);
  EXPECT_NEAR(pressure_from_density(4.0, 1.5), 3.0 * 2.0, 1e-14);
  EXPECT_NEAR(density_from_pressure(2.0, 2.0), 1.0, 1e-15);
  EXPECT_THROW(pressure_from_density(0.0, 2.0), DomainError);
  EXPECT_THROW(density_from_pressure(-1.0, 2.0), DomainError);
}

TEST(PressureTransform, RoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(1e-3, 50.0), P(1.05, 5.0);
  for (int k = 0; k < 500; ++k) {
    const double u = U(rng), p = P(rng);
    EXPECT_NEAR(density_from_pressure(pressure_from_density(u, p), p), u, 1e-12 * u);
  }
}

TEST(RescaleNonlinearity, Examples) {
  EXPECT_NEAR(rescale_nonlinearity(identity_source, 2.0, 0.3, 0.5, 1.7), 1.7, 1e-14);
  EXPECT_NEAR(rescale_nonlinearity(square_source, 2.0, 0.3, 0.5, 1.7), 1.7 * 1.7 / 2.0, 1e-14);
  // N = u gives G = (p-1) v for any p.
  EXPECT_NEAR(rescale_nonlinearity(identity_source, 3.0, 0.0, 0.0, 2.5), 2.0 * 2.5, 1e-13);
  EXPECT_THROW(rescale_nonlinearity(identity_source, 2.0, 0.0, 0.0, 0.0), DomainError);
}

TEST(RescaleNonlinearity, FromSourceAgrees) {
  const Nonlinearity g = Nonlinearity::from_source(square_source, 1.7);
  for (double v : {0.2, 1.0, 3.3})
    EXPECT_NEAR(g.value(0.1, 0.4, v), rescale_nonlinearity(square_source, 1.7, 0.1, 0.4, v), 1e-13);
}

TEST(Barenblatt, ExponentAndCenterValue) {
  EXPECT_DOUBLE_EQ(barenblatt_exponent(2, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(barenblatt_exponent(3, 3.0), 0.125);
  EXPECT_DOUBLE_EQ(barenblatt_oracle(2, 2.0, 1.0, 0.0, 1.0), 1.0);
  EXPECT_THROW(barenblatt_oracle(2, 2.0, 1.0, 0.0, 0.0), DomainError);
}

TEST(Barenblatt, CompactSupport) {
  // Support radius at t = 1 is sqrt(C / k), k = (p-1) beta / (2p) = 1/16 for n = p = 2.
  EXPECT_GT(barenblatt_oracle(2, 2.0, 1.0, 3.99, 1.0), 0.0);
  EXPECT_EQ(barenblatt_oracle(2, 2.0, 1.0, 4.0, 1.0), 0.0);
  EXPECT_EQ(barenblatt_oracle(2, 2.0, 1.0, 7.0, 1.0), 0.0);
}

TEST(Barenblatt, SatisfiesPorousMediumEquation) {
  for (int n : {2, 3}) {
    for (double p : {1.5, 2.0, 3.0}) {
      for (double r : {0.2, 0.7, 1.1}) {
        const double t = 1.3;
        const double scale = std::abs(barenblatt_oracle(n, p, 1.0, r, t)) + 1.0;
        EXPECT_NEAR(barenblatt_fd_residual(n, p, 1.0, r, t), 0.0, 1e-5 * scale)
            << "n=" << n << " p=" << p << " r=" << r;
      }
    }
  }
}

TEST(Barenblatt, PressureMatchesDensityOracle) {
  const RadialFn v = barenblatt_pressure(2, 2.0, 1.0, 0.1);
  for (double r : {0.0, 0.3, 0.9})
    for (double t : {0.0, 0.5})
      EXPECT_NEAR(v(r, t), pressure_from_density(barenblatt_oracle(2, 2.0, 1.0, r, t + 0.1), 2.0), 1e-13);
}

TEST(ManufacturedForcing, VanishesOnBarenblatt) {
  const Geometry g = make_preset("euclidean", 2, 2, 1.5);
  const RadialFn v = barenblatt_pressure(2, 2.0, 1.0, 0.1);
  const Nonlinearity G = manufactured_forcing(v, g, 2.0);
  for (double r : {0.0, 0.4, 1.2})
    for (double t : {0.0, 0.5, 1.0}) EXPECT_NEAR(G.value(t, r, v(r, t)), 0.0, 1e-12);
}

TEST(ManufacturedForcing, SpatiallyConstantGivesTimeDerivative) {
  const Geometry g = make_preset("hyperbolic", 3, 3, 1.5);
  const RadialFn v = make_radial_fn([](auto, auto t) { return 1.0 + t * t; });
  const Nonlinearity G = manufactured_forcing(v, g, 2.5);
  for (double r : {0.0, 0.5, 1.0})
    for (double t : {0.2, 0.8}) EXPECT_NEAR(G.value(t, r, v(r, t)), 2.0 * t, 1e-12);
}

TEST(Solve, ConstantStateIsStationary) {
  const Geometry g = make_preset("hyperbolic", 2, 2, 1.5);
  const Grid grid(33, 17, 1.5, 1.0);
  PdeParams pp;
  pp.p = 2.0;
  const SolutionField s = solve([](double) { return 0.7; }, g, pp, grid);
  for (double u : s.u.values()) EXPECT_NEAR(u, 0.7, 1e-13);
  for (double v : s.v.values()) EXPECT_NEAR(v, pressure_from_density(0.7, 2.0), 1e-13);
}

TEST(Solve, ConservesWeightedMassAndStaysPositive) {
  const Geometry g = make_preset("gaussian-weight", 2, 3, 2.0);
  const Grid grid(65, 33, 2.0, 0.5);
  PdeParams pp;
  pp.p = 2.0;
  pp.floor = 1e-10;
  const SolutionField s = solve([](double r) { return 0.1 + std::exp(-4 * r * r); }, g, pp, grid);
  const double m0 = s.stats.mass.front();
  for (double m : s.stats.mass) EXPECT_NEAR(m, m0, 1e-10 * m0);
  for (double u : s.u.values()) EXPECT_GT(u, 0.0);
  EXPECT_EQ(s.stats.clamp_events, 0);
}

TEST(Solve, ApproachesBarenblattOnRefinement) {
  const Geometry g = make_preset("euclidean", 2, 2, 1.5);
  const double shift = 0.1;
  std::vector<double> errs;
  for (int level = 0; level < 2; ++level) {
    const int nr = level == 0 ? 33 : 65;
    const int nt = level == 0 ? 17 : 65;
    const Grid grid(nr, nt, 1.5, 0.5);
    PdeParams pp;
    pp.p = 2.0;
    pp.outer = OuterBoundary::kDirichlet;
    pp.dirichlet = [&](double t) { return barenblatt_oracle(2, 2.0, 1.0, 1.5, t + shift); };
    const SolutionField s =
        solve([&](double r) { return barenblatt_oracle(2, 2.0, 1.0, r, shift); }, g, pp, grid);
    double e = 0.0;
    for (int i = 0; i < nr; ++i)
      e = std::max(e, std::abs(s.u(i, nt - 1) - barenblatt_oracle(2, 2.0, 1.0, grid.r(i), 0.5 + shift)));
    errs.push_back(e);
  }
  EXPECT_LT(errs[1], 0.5 * errs[0]);
  EXPECT_LT(errs[1], 1e-2);
}

TEST(Solve, RejectsInvalidParameters) {
  const Geometry g = make_preset("euclidean", 2, 2, 1.0);
  const Grid grid(17, 5, 1.0, 1.0);
  PdeParams pp;
  pp.p = 1.0;
  EXPECT_THROW(solve([](double) { return 1.0; }, g, pp, grid), ConfigError);
  pp.p = 2.0;
  pp.outer = OuterBoundary::kDirichlet;
  EXPECT_THROW(solve([](double) { return 1.0; }, g, pp, grid), ConfigError);
  pp.outer = OuterBoundary::kNeumannZero;
  EXPECT_THROW(solve([](double) { return 0.0; }, g, pp, grid), DomainError);
}

TEST(Nonlinearity, PowerSumAndSeparable) {
  PowerSumCoefficients c{{0.2}, {0.5}, {-0.1}, {1.5}};
  const Nonlinearity ps = Nonlinearity::power_sum(c);
  EXPECT_TRUE(ps.x_independent());
  ASSERT_NE(ps.power_sum_coefficients(), nullptr);
  const double v = 1.7;
  EXPECT_NEAR(ps.value(0.0, 0.3, v), 0.2 * std::pow(v, 0.5) - 0.1 * std::pow(v, 1.5), 1e-12);
  const NonlinearityPartials d = partials(ps, 0.0, 0.3, v);
  const double h = 1e-5;
  EXPECT_NEAR(d.G_v, (ps.value(0, 0.3, v + h) - ps.value(0, 0.3, v - h)) / (2 * h), 1e-8);
  EXPECT_EQ(d.G_r, 0.0);
  EXPECT_EQ(Nonlinearity::zero().value(0.1, 0.2, 0.3), 0.0);
}
