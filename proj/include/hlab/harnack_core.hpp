#pragma once

/// @file
/// @brief The operator L = d_t - (p-1) v Lap_phi, the Harnack quantity F and identity residuals.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hlab/fields.hpp"
#include "hlab/geometry.hpp"
#include "hlab/jet.hpp"
#include "hlab/pme_solver.hpp"

namespace hlab {

/// A C^1 function of t with a jet evaluator; derivatives are exact to roundoff.
struct TimeFn {
  std::function<Jet(const Jet& t)> jet;

  double value(double t) const { return jet(Jet(t)).value(); }
  double derivative(double t) const { return jet(Jet::variable(Jet::kT, t)).d(0, 1); }
};

template <class F>
TimeFn make_time_fn(F f) {
  return TimeFn{[f](const Jet& t) { return Jet(f(t)); }};
}

TimeFn constant_time_fn(double c);

struct HarnackParams {
  double p = 2.0;
  double m = 2.0;
  TimeFn alpha = constant_time_fn(2.0);
  TimeFn beta = constant_time_fn(0.0);
  double epsilon = 0.0;
  /// (m-1) k (p-1) M, used by the time-dependent presets.
  double gamma = 0.0;

  /// m(p-1) / (1 + m(p-1)).
  double b() const { return m * (p - 1.0) / (1.0 + m * (p - 1.0)); }
  /// True when alpha(0) <= 1 or alpha, beta are singular at t = 0; the slice t = 0 is skipped.
  bool initial_slice_excluded() const;
  /// p > 1, m >= n, alpha > 1 on (0, T], alpha(0) >= 1, alpha' >= 0.
  void validate(int n, double T) const;
};

/// Cached constituents of F = grad_ratio - alpha time_ratio + alpha source_ratio - beta.
struct HarnackField {
  ScalarField F;
  /// |grad v|^2 / v.
  ScalarField grad_ratio;
  /// d_t v / v.
  ScalarField time_ratio;
  /// G / v.
  ScalarField source_ratio;
};

/// d_t w - (p-1) v Lap_phi w with grid stencils.
ScalarField op_Lpv(const ScalarField& w, const ScalarField& v, const GridGeometry& gg, double p);

HarnackField harnack_F(const ScalarField& v, const GridGeometry& gg, const HarnackParams& params,
                       const Nonlinearity& g, double floor = 0.0);

/// Every pointwise quantity entering the evolution of F at one space-time point.
struct PointState {
  LocalGeometry lg;
  int n = 2;
  double v = 0, v_r = 0, v_rr = 0, v_t = 0, lap_v = 0;
  double F = 0, F_r = 0, F_t = 0, lap_F = 0;
  /// G(t, x, v(x, t)) as a function of (x, t).
  double G = 0, G_r = 0, lap_G = 0;
  /// Partials of G(t, x, w) at w = v.
  NonlinearityPartials gp;
  /// Lap_phi of x -> G(t, x, w) at frozen w = v.
  double lap_Gx = 0;
  double alpha = 1, alpha_t = 0, beta = 0, beta_t = 0;
};

/// Exact state from analytic v and geometry; r must be off the pole.
PointState analytic_state(const RadialFn& v, const Geometry& geom, const Nonlinearity& g,
                          const HarnackParams& params, double r, double t);

/// Stencil state at every node of the grid, in grid index order.
std::vector<PointState> grid_states(const ScalarField& v, const GridGeometry& gg,
                                    const Nonlinearity& g, const HarnackParams& params);

/// L[F] = F_t - (p-1) v Lap_phi F.
double op_L_of_F(const PointState& s, double p);
/// Right-hand side of the evolution identity for F.
double f_evolution_rhs(const PointState& s, const HarnackParams& params);

enum class LemmaBound { kSquareDropped, kExpanded, kGeometric };

/// Right-hand side of the inequality for L[F]. `static_factor` selects the sharper
/// coefficient (2 + m(p-1)) / (m(p-1)) valid when the metric is time independent.
double lemma_rhs(LemmaBound which, const PointState& s, const HarnackParams& params,
                 const GeometryBounds& bounds, bool static_factor = false);

struct ResidualSummary {
  double max_abs = 0;
  double max_rel = 0;
  double mean_rel = 0;
  int count = 0;
  double r_at_max = 0, t_at_max = 0;

  void add(double residual, double scale, double r, double t);
  void finish();
};

/// Tensor grid of sample points with r in [r_lo, r_hi] and t in [t_lo, t_hi].
std::vector<std::pair<double, double>> sample_points(double r_lo, double r_hi, double t_lo,
                                                     double t_hi, int nr, int nt);

ResidualSummary residual_pressure_eq(const RadialFn& v, const Geometry& geom, double p,
                                     const Nonlinearity& g,
                                     const std::vector<std::pair<double, double>>& samples);

ResidualSummary residual_quotient_rule(const RadialFn& f, const RadialFn& g, const RadialFn& v,
                                       const Geometry& geom, double p,
                                       const std::vector<std::pair<double, double>>& samples);

/// Sign choice for the four commutator terms
/// {2<h, Hess v>, -<2 div h - grad tr h, grad v>, 2h(grad phi, grad v), -<grad d_t phi, grad v>}.
struct CommutatorVariant {
  std::array<int, 4> signs{1, 1, 1, 1};
  std::string name;
  ResidualSummary residual;
};

/// Residual of every sign variant; the first entry is the form (+, +, +, +).
std::vector<CommutatorVariant> residual_commutator(
    const RadialFn& v, const Geometry& geom,
    const std::vector<std::pair<double, double>>& samples);

/// Names of variants whose max relative residual is <= tol in every table.
std::vector<std::string> consistent_variants(const std::vector<std::vector<CommutatorVariant>>& tables,
                                             double tol);

/// 1/2 Lap_phi |grad w|^2 - <grad w, grad Lap_phi w> - |Hess w|^2 - Ric_phi(grad w, grad w).
ResidualSummary residual_bochner(const RadialFn& w, const Geometry& geom,
                                 const std::vector<std::pair<double, double>>& samples);

ResidualSummary residual_F_evolution(const RadialFn& v, const Geometry& geom,
                                     const HarnackParams& params, const Nonlinearity& g,
                                     const std::vector<std::pair<double, double>>& samples);

/// Stencil residual over nodes with r in [r_lo, r_hi] and t in [t_lo, t_hi].
ResidualSummary residual_F_evolution(const ScalarField& v, const GridGeometry& gg,
                                     const HarnackParams& params, const Nonlinearity& g,
                                     double r_lo, double r_hi, double t_lo, double t_hi);

struct MarginSummary {
  double min_margin = 0;
  double min_scaled = 0;
  int count = 0;
  double r_at_min = 0, t_at_min = 0;
};

/// margin = lemma RHS - L[F] at exact analytic states.
MarginSummary check_lemma_inequalities(LemmaBound which, const RadialFn& v, const Geometry& geom,
                                       const HarnackParams& params, const Nonlinearity& g,
                                       const GeometryBounds& bounds,
                                       const std::vector<std::pair<double, double>>& samples,
                                       bool static_factor = false);

}  // namespace hlab
