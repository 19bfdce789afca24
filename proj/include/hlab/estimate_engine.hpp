#pragma once

/// @file
/// @brief Estimate constants, suprema, right-hand sides and pointwise verification.

#include <array>
#include <string>
#include <vector>

#include "hlab/fields.hpp"
#include "hlab/geometry.hpp"
#include "hlab/harnack_core.hpp"
#include "hlab/pme_solver.hpp"

namespace hlab {

/// eta(s) = 1 on [0, 1], cos^2(pi (s - 1) / 2) on [1, 2], 0 beyond.
struct CutoffProfile {
  double c1 = 0;
  double c2 = 0;

  static double eta(double s);
  static double d1(double s);
  static double d2(double s);
};

/// Certifies c1 = sup(-eta'/sqrt(eta)) and c2 = sup(-eta'') by a dense scan, rounded up to the
/// closed-form values pi and pi^2/2 when the scan agrees with them.
CutoffProfile cutoff_profile(int samples = 200001);

enum class ConstantsMode { kMain, kTilde };

struct EstimateConstants {
  double K = 0, L = 0, M = 0, N = 0, E = 0, F = 0;
  double M_tilde = 0, N_tilde = 0, F_tilde = 0;
  double M_sup = 0;
  double epsilon = 0;
};

/// Evaluates the displayed constants at one value of alpha. epsilon = 0 selects the limit
/// epsilon -> 0, where E is infinite and F, F~ take their limiting values.
/// Throws ConfigError when epsilon is not admissible for the mode.
EstimateConstants compute_constants(const GeometryBounds& bounds, double p, double m, int n,
                                    double alpha, double epsilon, double M_sup, double R,
                                    double c1, bool global, ConstantsMode mode);

/// Admissible supremum of epsilon: 2(alpha-1)^2/(b alpha^2), or /(b alpha^3) in tilde mode.
double epsilon_bound(double alpha, double b, ConstantsMode mode);

/// Nonlinearity data at one node of the supremum region.
struct NodeSample {
  double r = 0, t = 0;
  double v = 0;
  double G = 0, G_v = 0, G_vv = 0;
  /// |G_x| and |G_xv| in the metric g(t).
  double G_x = 0, G_xv = 0;
  double lap_Gx = 0;
};

std::vector<NodeSample> collect_nodes(const ScalarField& v, const GridGeometry& gg,
                                      const Nonlinearity& g, const Cylinder& cyl);

struct SupremumInputs {
  const HarnackParams* params = nullptr;
  GeometryBounds bounds;
  int n = 2;
  double M_sup = 0;
  double R = 1;
  double c1 = 0;
  bool global = false;
};

/// Suprema entering the right-hand sides. mu[0] and lambda[0] are sup(beta - alpha G / v).
struct Suprema {
  std::array<double, 5> mu{};
  std::array<double, 5> lambda{};
  /// Static first estimate: sup[G_v + alpha'/alpha + K]_+ and the second bracket.
  double static_one_a = 0, static_one_b = 0;
  /// Static second estimate: sup[G_v + K]_+ and the second bracket.
  double static_two_a = 0, static_two_b = 0;
  double epsilon_main = 0, epsilon_tilde = 0;
};

/// Nodes at t = 0 are skipped when alpha(0) = 1. The epsilon values must be admissible at
/// every remaining node; a negative value skips that family.
Suprema compute_suprema(const std::vector<NodeSample>& nodes, const SupremumInputs& in,
                        double epsilon_main, double epsilon_tilde);

enum class EstimateVariant {
  kThm21Local,
  kCor22Global,
  kThm25Local,
  kCor26Global,
  kStaticOne,
  kStaticTwo,
  kStaticOneGlobal,
  kStaticTwoGlobal
};

std::string to_string(EstimateVariant v);
EstimateVariant parse_variant(const std::string& name);
bool is_global(EstimateVariant v);
bool is_static_variant(EstimateVariant v);
bool uses_tilde(EstimateVariant v);

struct RhsInputs {
  double p = 2, m = 2, b = 0;
  double alpha = 2;
  double k = 0;
  double M_sup = 0;
  double R = 1;
  double c1 = 0, c2 = 0;
};

/// Right-hand side of the chosen estimate at time t > 0.
double rhs_bound(EstimateVariant variant, const Suprema& sups, const RhsInputs& in, double t);

struct EpsilonResult {
  double epsilon = 0;
  double min_margin = 0;
  int violations = 0;
};

struct VerificationReport {
  EstimateVariant variant = EstimateVariant::kThm21Local;
  std::vector<double> r, t, lhs, rhs, margin;
  double min_margin = 0;
  double r_at_min = 0, t_at_min = 0;
  int violations = 0;
  double tolerance = 0;
  double scale = 1;
  double M_sup = 0, M_inf = 0;
  GeometryBounds bounds;
  Suprema sups;
  std::vector<EpsilonResult> scan;
  /// Global variants on a bounded computational domain.
  bool truncated_global = false;
};

struct VerifyOptions {
  double R = 1.0;
  /// Fractions of the admissible epsilon supremum; the first one fills the margin fields.
  std::vector<double> epsilon_fractions = {0.5, 0.1, 0.9};
  /// Multiplies the right-hand side; 0.5 is the negative control.
  double rhs_scale = 1.0;
  double tolerance_factor = 1e-6;
};

/// LHS = |grad v|^2/(alpha v) - d_t v / v + G/v - beta/alpha on Q_{R,T} with t > 0, against the
/// right-hand side built from suprema over Q_{2R,T} (or the whole grid for global variants).
VerificationReport verify_estimate(const ScalarField& v, const GridGeometry& gg,
                                   const Nonlinearity& g, const HarnackParams& params,
                                   EstimateVariant variant, const VerifyOptions& opts);

enum class AlphaBetaPreset { kExp, kCoth, kLinear };

struct AlphaBeta {
  TimeFn alpha;
  TimeFn beta;
};

AlphaBeta alpha_beta_preset(AlphaBetaPreset which, double gamma, double b);

/// Scaled residuals of the defining equations of a preset at t; one for kExp, two otherwise.
std::vector<double> preset_residuals(AlphaBetaPreset which, double gamma, double b, double t);

struct NonlinearityFlags {
  bool nonincreasing_symbolic = false;
  bool nonincreasing_numeric = false;
  bool convexity_symbolic = false;
  bool convexity_numeric = false;
};

/// G_v <= 0 and alpha(p-1) v G_vv - (alpha-1)(G/v - G_v) >= 0 for a power-sum nonlinearity,
/// from the exponents and from a scan over v in [v_lo, v_hi].
NonlinearityFlags nonlinearity_conditions(const PowerSumCoefficients& c, double p, double alpha,
                                          double v_lo = 0.1, double v_hi = 10.0,
                                          int samples = 1001);

struct LocalizedDiagnostic {
  double max_value = 0;
  int i = -1, j = -1;
  double r = 0, t = 0;
  /// Discrete maximum conditions at the argmax: G_r = 0 stencil, Lap_phi G <= 0, G_t >= 0.
  bool first_order_ok = false;
};

/// G = t eta F on {a(t) r <= 2R, t <= T1} with eta = eta(a(t) r / R).
LocalizedDiagnostic localized_diagnostic(const HarnackField& hf, const GridGeometry& gg,
                                         double R, double T1);

}  // namespace hlab
