#pragma once

/// @file
/// @brief Weighted porous medium solver, pressure transform and exact oracles.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hlab/fields.hpp"
#include "hlab/geometry.hpp"
#include "hlab/jet.hpp"

namespace hlab {

/// Source term N(t, r, u) of the density equation, jet-capable.
using SourceFn = std::function<Jet(const Jet& t, const Jet& r, const Jet& u)>;

struct PowerSumCoefficients {
  std::vector<double> A, a, B, b;
};

/// Rescaled nonlinearity G(t, r, v) of the pressure equation.
class Nonlinearity {
 public:
  enum class Form { kZero, kPowerSum, kSeparableX, kManufactured, kFromSource };
  using JetFn = std::function<Jet(const Jet& t, const Jet& r, const Jet& v)>;
  using ValueFn = std::function<double(double t, double r, double v)>;

  static Nonlinearity zero();
  /// G = sum A_j v^{a_j} + sum B_j v^{b_j}; requires A_j >= 0, B_j <= 0.
  static Nonlinearity power_sum(PowerSumCoefficients c);
  /// G = c0 (1 + c1 t) exp(-kappa r^2) v^q.
  static Nonlinearity separable_x(double c0, double c1, double kappa, double q);
  /// G(t, r, v) = S(t, r), independent of v.
  static Nonlinearity manufactured(RadialFn source);
  /// G = p [(p-1)v/p]^{(p-2)/(p-1)} N(t, x, [(p-1)v/p]^{1/(p-1)}).
  static Nonlinearity from_source(SourceFn source, double p);

  Form form() const { return form_; }
  bool x_independent() const { return x_independent_; }
  const PowerSumCoefficients* power_sum_coefficients() const {
    return form_ == Form::kPowerSum ? &coeffs_ : nullptr;
  }

  double value(double t, double r, double v) const { return value_(t, r, v); }
  Jet evaluate(const Jet& t, const Jet& r, const Jet& v) const { return jet_(t, r, v); }

 private:
  Form form_ = Form::kZero;
  bool x_independent_ = true;
  PowerSumCoefficients coeffs_;
  ValueFn value_;
  JetFn jet_;
};

/// Partials of G at (t, r, v) with t frozen.
struct NonlinearityPartials {
  double G = 0, G_v = 0, G_vv = 0, G_r = 0, G_rv = 0, G_rr = 0;
};
NonlinearityPartials partials(const Nonlinearity& g, double t, double r, double v);

double pressure_from_density(double u, double p);
double density_from_pressure(double v, double p);
ScalarField pressure_transform(const ScalarField& u, double p);
ScalarField density_transform(const ScalarField& v, double p);

double rescale_nonlinearity(const SourceFn& source, double p, double t, double r, double v);

enum class OuterBoundary { kNeumannZero, kDirichlet };

struct PdeParams {
  double p = 2.0;
  Nonlinearity nonlinearity = Nonlinearity::zero();
  double floor = 1e-12;
  OuterBoundary outer = OuterBoundary::kNeumannZero;
  /// Density boundary values u(r_max, t) for the Dirichlet boundary.
  std::function<double(double t)> dirichlet;
  /// Internal steps per stored grid interval.
  int substeps = 1;
};

struct SolveStats {
  long clamp_events = 0;
  long updates = 0;
  /// Weighted mass sum_i V_i u_i a^n at every stored time.
  std::vector<double> mass;
  double clamp_fraction() const { return updates ? static_cast<double>(clamp_events) / updates : 0; }
};

struct SolutionField {
  ScalarField u;
  ScalarField v;
  SolveStats stats;
};

/// Finite-volume weights of the radial operator at one time.
struct RadialOperator {
  std::vector<double> volume;
  /// Weight J = psi^{n-1} e^{-phi} at faces r_{i+1/2}.
  std::vector<double> face;
  double inv_a2 = 1.0;
  double a_pow_n = 1.0;
};
RadialOperator build_operator(const Geometry& geom, const Grid& grid, double t);

/// One lagged-coefficient backward-Euler step from t to t + dt. Returns clamp count.
long step(std::vector<double>& u, const Geometry& geom, const Grid& grid, const PdeParams& params,
          double t, double dt, const RadialOperator* op = nullptr);

SolutionField solve(const std::function<double(double r)>& initial, const Geometry& geom,
                    const PdeParams& params, const Grid& grid);

double barenblatt_exponent(int n, double p);
/// Density t^{-n beta}(C - k r^2 t^{-2 beta})_+^{1/(p-1)}, k = (p-1) beta / (2p).
double barenblatt_oracle(int n, double p, double C, double r, double t);
/// Pressure of the Barenblatt solution at time t + shift, without the positive part.
RadialFn barenblatt_pressure(int n, double p, double C, double shift);

/// G = v_t - (p-1) v Lap_phi v - |grad v|^2 for the given exact pressure.
Nonlinearity manufactured_forcing(const RadialFn& v_exact, const Geometry& geom, double p);
/// Density-side source N = u_t - Lap_phi(u^p) with u the density of v_exact.
SourceFn density_source(const RadialFn& v_exact, const Geometry& geom, double p);

}  // namespace hlab
