#pragma once

/// @file
/// @brief Path energies, integrated Harnack bounds and their verification on point pairs.

#include <cstdint>
#include <vector>

#include "hlab/estimate_engine.hpp"
#include "hlab/fields.hpp"
#include "hlab/geometry.hpp"

namespace hlab {

enum class PathMethod { kRadialDirect, kBruteForce };

struct PathEnergy {
  /// Energy with the metric argument t1 + s (t2 - t1) along s in [0, 1].
  double value = 0;
  /// Energy with the metric argument s along s in [0, 1].
  double value_unit_time = 0;
  /// Radii of the minimizing piecewise-linear profile at uniform s nodes.
  std::vector<double> nodes;
  PathMethod method = PathMethod::kRadialDirect;
};

/// Infimum over radial curves of int_0^1 |gamma'(s)|^2 ds. Radial-direct uses the constant-speed
/// path; brute force minimizes over `segments` >= 8 linear pieces and returns the smaller value.
PathEnergy path_energy(const Geometry& geom, double r1, double t1, double r2, double t2,
                       PathMethod method, int segments = 64);

enum class HarnackForm { kFirst, kSecond };

struct HarnackBound {
  double H = 0;
  double L = 0;
  double M_inf = 0;
  /// exp[alpha L / (4 M_inf (t2 - t1)) + H (t2 - t1) / alpha] (t2 / t1)^{b alpha}.
  double value = 0;
};

/// H = mu0 + b alpha^2 mu1 + alpha sqrt(b) {mu2^{4/3} + mu3 + mu4^2}^{1/2} for the first form,
/// lambda0 + b alpha^2 lambda1 + sqrt(b alpha^3) {...}^{1/2} for the second.
HarnackBound harnack_bound(const Suprema& sups, double alpha, double b, HarnackForm form,
                           double L_value, double M_inf, double t1, double t2);

struct PairCheck {
  int i1 = 0, j1 = 0, i2 = 0, j2 = 0;
  double ratio = 0;
  double bound = 0;
  double slack = 0;
  bool violated = false;
};

struct HarnackReport {
  std::vector<PairCheck> pairs;
  int violations = 0;
  double min_slack = 0;
  std::uint64_t seed = 0;
  double H = 0;
  double M_inf = 0;
  Suprema sups;
};

struct HarnackOptions {
  HarnackForm form = HarnackForm::kFirst;
  int pairs = 128;
  std::uint64_t seed = 1;
  /// Fraction of the admissible epsilon supremum.
  double epsilon_fraction = 0.5;
  double tolerance_factor = 1e-8;
};

/// Checks v(x1, t1) <= bound v(x2, t2) on random node pairs with 0 < t1 < t2 < T.
/// Requires constant alpha > 1; suprema are global over the grid.
HarnackReport verify_harnack(const ScalarField& v, const GridGeometry& gg, const Nonlinearity& g,
                             const HarnackParams& params, const HarnackOptions& opts);

struct LogIntegralCheck {
  double lhs = 0;
  double middle = 0;
  double rhs = 0;
  /// rhs - lhs.
  double margin = 0;
  bool chain_holds = false;
};

/// Along the straight path r(t) from (r1, t1) to (r2, t2): f1 - f2 <= int |grad f||gamma'| +
/// (h - M_inf |grad f|^2)/alpha <= int alpha |gamma'|^2 / (4 M_inf) + h / alpha, f = log v,
/// h(t) = b alpha^2 / t + H.
LogIntegralCheck log_integral_check(const ScalarField& v, const GridGeometry& gg, double alpha,
                                    double b, double H, double M_inf, double r1, double t1,
                                    double r2, double t2, int quadrature = 400);

}  // namespace hlab
