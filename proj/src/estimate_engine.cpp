#include "hlab/estimate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double x) { return x > 0.0 ? x : 0.0; }

// sqrt(E) * x with sqrt(inf) * 0 = 0.
double sqrt_times(double E, double x) {
  if (std::isinf(E)) return x == 0.0 ? 0.0 : kInf;
  return std::sqrt(E) * x;
}

double cutoff_K(const GeometryBounds& bounds, double p, double b, double alpha, double M_sup,
                double R, double c1, bool global) {
  const double base = 2.0 * c1 * bounds.k_lo;
  if (global) return base;
  if (!(alpha > 1.0)) throw ConfigError("constants: K requires alpha > 1");
  return base + c1 * c1 * b * alpha * alpha * p * p * M_sup / (2.0 * (alpha - 1.0) * R * R);
}

}  // namespace

double CutoffProfile::eta(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double c = std::cos(0.5 * M_PI * (s - 1.0));
  return c * c;
}

double CutoffProfile::d1(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return -0.5 * M_PI * std::sin(M_PI * (s - 1.0));
}

double CutoffProfile::d2(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  return -0.5 * M_PI * M_PI * std::cos(M_PI * (s - 1.0));
}

CutoffProfile cutoff_profile(int samples) {
  if (samples < 3) throw DomainError("cutoff_profile: need at least 3 samples");
  double c1_scan = 0.0, c2_scan = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double s = 1.0 + static_cast<double>(k) / (samples - 1);
    const double e = CutoffProfile::eta(s);
    if (e > 0.0) c1_scan = std::max(c1_scan, -CutoffProfile::d1(s) / std::sqrt(e));
    c2_scan = std::max(c2_scan, -CutoffProfile::d2(s));
  }
  CutoffProfile out;
  out.c1 = std::max(c1_scan, M_PI);
  out.c2 = std::max(c2_scan, 0.5 * M_PI * M_PI);
  return out;
}

double epsilon_bound(double alpha, double b, ConstantsMode mode) {
  const double pw = mode == ConstantsMode::kMain ? alpha * alpha : alpha * alpha * alpha;
  return 2.0 * (alpha - 1.0) * (alpha - 1.0) / (b * pw);
}

EstimateConstants compute_constants(const GeometryBounds& bounds, double p, double m, int n,
                                    double alpha, double epsilon, double M_sup, double R,
                                    double c1, bool global, ConstantsMode mode) {
  if (!(R > 0.0)) throw ConfigError("constants: R must be > 0");
  if (!(alpha > 1.0)) throw ConfigError("constants: alpha must be > 1");
  if (!(epsilon >= 0.0)) throw ConfigError("constants: epsilon must be >= 0");
  const double b = m * (p - 1.0) / (1.0 + m * (p - 1.0));
  const double am1 = alpha - 1.0;
  const double kk = bounds.k_lo + bounds.k_hi;
  EstimateConstants c;
  c.M_sup = M_sup;
  c.epsilon = epsilon;
  c.K = cutoff_K(bounds, p, b, alpha, M_sup, R, c1, global);
  c.L = alpha * (p - 1.0) * bounds.l2 / 2.0 + alpha * (p - 1.0) * bounds.k_lo * bounds.l1;
  c.E = epsilon == 0.0 ? kInf : std::pow(1.5, 1.5) * M_sup / std::sqrt(epsilon);
  if (mode == ConstantsMode::kMain) {
    const double den = 4.0 * am1 * am1 - 2.0 * epsilon * b * alpha * alpha;
    if (!(den > 0.0))
      throw ConfigError("constants: epsilon must satisfy epsilon < 2(alpha-1)^2/(b alpha^2)");
    c.M = alpha * alpha * (p - 1.0) * n * (kk * kk + 2.0 * bounds.k2);
    c.N = 2.0 * (p - 1.0) * M_sup * ((m - 1.0) * bounds.k + bounds.k2) + 2.0 * am1 * bounds.k_hi;
    c.F = b * alpha * alpha / den;
  } else {
    const double den = 4.0 * am1 * am1 - 2.0 * epsilon * b * alpha * alpha * alpha;
    if (!(den > 0.0))
      throw ConfigError("constants: epsilon must satisfy epsilon < 2(alpha-1)^2/(b alpha^3)");
    c.M_tilde = (p - 1.0) * n * (alpha * kk * kk + 2.0 * bounds.k2);
    c.N_tilde = 2.0 * (p - 1.0) * M_sup * ((m - 1.0) * bounds.k / alpha + bounds.k2) +
                2.0 * am1 * bounds.k_hi / alpha;
    c.F_tilde = b * alpha * alpha * alpha / den;
  }
  return c;
}

std::vector<NodeSample> collect_nodes(const ScalarField& v, const GridGeometry& gg,
                                      const Nonlinearity& g, const Cylinder& cyl) {
  const Grid& grid = v.grid();
  std::vector<NodeSample> out;
  for (const auto& [i, j] : cylinder_nodes(grid, gg.geometry(), cyl)) {
    NodeSample s;
    s.r = grid.r(i);
    s.t = grid.t(j);
    s.v = v(i, j);
    if (!(s.v > 0.0)) throw DomainError("collect_nodes: non-positive pressure");
    const NonlinearityPartials gp = partials(g, s.t, s.r, s.v);
    const LocalGeometry& lg = gg.at(i, j);
    s.G = gp.G;
    s.G_v = gp.G_v;
    s.G_vv = gp.G_vv;
    s.G_x = std::abs(gp.G_r) / lg.a;
    s.G_xv = std::abs(gp.G_rv) / lg.a;
    s.lap_Gx = weighted_laplacian_at(lg, gg.geometry().n(), gp.G_r, gp.G_rr);
    out.push_back(s);
  }
  return out;
}

Suprema compute_suprema(const std::vector<NodeSample>& nodes, const SupremumInputs& in,
                        double epsilon_main, double epsilon_tilde) {
  if (in.params == nullptr) throw ConfigError("compute_suprema: missing parameters");
  const HarnackParams& hp = *in.params;
  const double p = hp.p, pm1 = p - 1.0, m = hp.m, b = hp.b();
  const bool skip_initial = hp.initial_slice_excluded();
  Suprema s;
  s.epsilon_main = epsilon_main;
  s.epsilon_tilde = epsilon_tilde;
  s.mu[0] = s.lambda[0] = -kInf;
  bool any = false;
  for (const NodeSample& q : nodes) {
    if (skip_initial && q.t == 0.0) continue;
    any = true;
    const double al = hp.alpha.value(q.t), al_t = hp.alpha.derivative(q.t);
    const double be = hp.beta.value(q.t), be_t = hp.beta.derivative(q.t);
    const double sr = q.G / q.v;
    const double zeroth = be - al * sr;
    s.mu[0] = std::max(s.mu[0], zeroth);
    s.lambda[0] = std::max(s.lambda[0], zeroth);

    if (epsilon_main >= 0.0) {
      const EstimateConstants c = compute_constants(in.bounds, p, m, in.n, al, epsilon_main,
                                                    in.M_sup, in.R, in.c1, in.global,
                                                    ConstantsMode::kMain);
      const double ba2 = b * al * al;
      s.mu[1] = std::max(s.mu[1], pos(q.G_v + al_t / al - 2.0 * be / ba2 + c.K));
      s.mu[2] = std::max(
          s.mu[2], sqrt_times(c.E, (al - 1.0) * q.G_x / q.v + al * pm1 * q.G_xv + c.L));
      s.mu[3] = std::max(s.mu[3], pos(be * q.G_v - al * pm1 * q.lap_Gx +
                                      be / al * (al_t - be / (b * al)) - be_t + c.M));
      s.mu[4] = std::max(
          s.mu[4], pos(std::sqrt(c.F) * ((al - 1.0) * (sr - q.G_v) - al * pm1 * q.v * q.G_vv -
                                         2.0 * (al - 1.0) / ba2 * be - al_t / al + c.N)));
    }
    if (epsilon_tilde >= 0.0) {
      const EstimateConstants c = compute_constants(in.bounds, p, m, in.n, al, epsilon_tilde,
                                                    in.M_sup, in.R, in.c1, in.global,
                                                    ConstantsMode::kTilde);
      const double ba2 = b * al * al, ba3 = ba2 * al;
      s.lambda[1] = std::max(s.lambda[1], pos(q.G_v - 2.0 * be / ba2 + c.K));
      s.lambda[2] = std::max(s.lambda[2], sqrt_times(c.E, (al - 1.0) / al * q.G_x / q.v +
                                                              pm1 * q.G_xv + c.L / al));
      s.lambda[3] =
          std::max(s.lambda[3], pos(be / al * q.G_v - pm1 * q.lap_Gx +
                                    be / (al * al) * (al_t - be / (b * al)) - be_t / al +
                                    c.M_tilde));
      s.lambda[4] = std::max(
          s.lambda[4],
          pos(std::sqrt(c.F_tilde) * ((al - 1.0) / al * (sr - q.G_v) - pm1 * q.v * q.G_vv -
                                      2.0 * (al - 1.0) / ba3 * be - al_t / (al * al) +
                                      c.N_tilde)));
    }

    const double K = cutoff_K(in.bounds, p, b, al, in.M_sup, in.R, in.c1, in.global);
    const double curv = 2.0 * al * pm1 * in.M_sup * (m - 1.0) * in.bounds.k - al_t;
    const double sa = std::sqrt(al);
    s.static_one_a = std::max(s.static_one_a, pos(q.G_v + al_t / al + K));
    s.static_one_b = std::max(
        s.static_one_b, pos(al / 2.0 * (sr - q.G_v) - al * al * pm1 / (2.0 * (al - 1.0)) * q.v * q.G_vv +
                            curv / (2.0 * (al - 1.0))));
    s.static_two_a = std::max(s.static_two_a, pos(q.G_v + K));
    s.static_two_b = std::max(
        s.static_two_b,
        pos(sa / 2.0 * (sr - q.G_v) - al * sa * pm1 / (2.0 * (al - 1.0)) * q.v * q.G_vv +
            curv / (2.0 * sa * (al - 1.0))));
  }
  if (!any) throw DomainError("compute_suprema: no admissible node");
  return s;
}

std::string to_string(EstimateVariant v) {
  switch (v) {
    case EstimateVariant::kThm21Local: return "thm21-local";
    case EstimateVariant::kCor22Global: return "cor22-global";
    case EstimateVariant::kThm25Local: return "thm25-local";
    case EstimateVariant::kCor26Global: return "cor26-global";
    case EstimateVariant::kStaticOne: return "static-one";
    case EstimateVariant::kStaticTwo: return "static-two";
    case EstimateVariant::kStaticOneGlobal: return "static-one-global";
    case EstimateVariant::kStaticTwoGlobal: return "static-two-global";
  }
  return "unknown";
}

EstimateVariant parse_variant(const std::string& name) {
  for (EstimateVariant v :
       {EstimateVariant::kThm21Local, EstimateVariant::kCor22Global, EstimateVariant::kThm25Local,
        EstimateVariant::kCor26Global, EstimateVariant::kStaticOne, EstimateVariant::kStaticTwo,
        EstimateVariant::kStaticOneGlobal, EstimateVariant::kStaticTwoGlobal})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown estimate variant '" + name + "'");
}

bool is_global(EstimateVariant v) {
  return v == EstimateVariant::kCor22Global || v == EstimateVariant::kCor26Global ||
         v == EstimateVariant::kStaticOneGlobal || v == EstimateVariant::kStaticTwoGlobal;
}

bool is_static_variant(EstimateVariant v) {
  return v == EstimateVariant::kStaticOne || v == EstimateVariant::kStaticTwo ||
         v == EstimateVariant::kStaticOneGlobal || v == EstimateVariant::kStaticTwoGlobal;
}

bool uses_tilde(EstimateVariant v) {
  return v == EstimateVariant::kThm25Local || v == EstimateVariant::kCor26Global;
}

double rhs_bound(EstimateVariant variant, const Suprema& sups, const RhsInputs& in, double t) {
  if (!(t > 0.0)) throw DomainError("rhs_bound: t must be > 0");
  const double b = in.b, al = in.alpha;
  const double tail = b * (in.p - 1.0) * al * in.M_sup / (in.R * in.R) *
                      (in.c2 + (in.m - 1.0) * in.c1 * (1.0 + in.R * std::sqrt(in.k)) +
                       2.0 * in.c1 * in.c1);
  auto root = [](const std::array<double, 5>& x) {
    return std::sqrt(std::pow(x[2], 4.0 / 3.0) + x[3] + x[4] * x[4]);
  };
  const double head = b * al / t;
  switch (variant) {
    case EstimateVariant::kThm21Local:
      return head + b * al * sups.mu[1] + std::sqrt(b) * root(sups.mu) + tail;
    case EstimateVariant::kCor22Global:
      return head + b * al * sups.mu[1] + std::sqrt(b) * root(sups.mu);
    case EstimateVariant::kThm25Local:
      return head + b * al * sups.lambda[1] + std::sqrt(b * al) * root(sups.lambda) + tail;
    case EstimateVariant::kCor26Global:
      return head + b * al * sups.lambda[1] + std::sqrt(b * al) * root(sups.lambda);
    case EstimateVariant::kStaticOne:
      return head + b * al * sups.static_one_a + tail + b * sups.static_one_b;
    case EstimateVariant::kStaticTwo:
      return head + b * al * sups.static_two_a + tail + b * std::sqrt(al) * sups.static_two_b;
    case EstimateVariant::kStaticOneGlobal:
      return head + b * al * sups.static_one_a + b * sups.static_one_b;
    case EstimateVariant::kStaticTwoGlobal:
      return head + b * al * sups.static_two_a + b * std::sqrt(al) * sups.static_two_b;
  }
  throw DomainError("rhs_bound: unknown variant");
}

VerificationReport verify_estimate(const ScalarField& v, const GridGeometry& gg,
                                   const Nonlinearity& g, const HarnackParams& params,
                                   EstimateVariant variant, const VerifyOptions& opts) {
  const Grid& grid = v.grid();
  const Geometry& geom = gg.geometry();
  if (grid != gg.grid()) throw DomainError("verify_estimate: grid mismatch");
  const bool global = is_global(variant);
  const bool stat = is_static_variant(variant);
  if (!(opts.R > 0.0)) throw ConfigError("verify_estimate: R must be > 0");
  if (!global) {
    if (!geom.pole_mode()) throw DomainError("verify_estimate: local estimates need a pole");
    for (int j = 0; j < grid.nt(); ++j)
      if (2.0 * opts.R > geom.a(grid.t(j)) * grid.r_max() * (1.0 + 1e-12))
        throw DomainError("verify_estimate: cylinder Q_{2R,T} leaves the computational domain");
  }
  if (stat) {
    if (!geom.is_static()) throw ConfigError("verify_estimate: static variant on evolving geometry");
    if (!g.x_independent()) throw ConfigError("verify_estimate: static variant needs G = G(v)");
    for (int j = params.initial_slice_excluded() ? 1 : 0; j < grid.nt(); ++j)
      if (params.beta.value(grid.t(j)) != 0.0)
        throw ConfigError("verify_estimate: static variant needs beta = 0");
  }

  const Cylinder inner{opts.R, 0.0, grid.T(), global};
  const Cylinder outer{2.0 * opts.R, 0.0, grid.T(), global};
  VerificationReport rep;
  rep.variant = variant;
  rep.truncated_global = global;
  rep.bounds = extract_bounds(geom, outer, grid);
  const std::vector<NodeSample> nodes = collect_nodes(v, gg, g, outer);
  rep.M_sup = -kInf;
  for (const NodeSample& q : nodes) rep.M_sup = std::max(rep.M_sup, q.v);
  rep.M_inf = *std::min_element(v.values().begin(), v.values().end());

  const CutoffProfile cut = cutoff_profile();
  SupremumInputs in;
  in.params = &params;
  in.bounds = rep.bounds;
  in.n = geom.n();
  in.M_sup = rep.M_sup;
  in.R = opts.R;
  in.c1 = cut.c1;
  in.global = global;

  const ConstantsMode mode = uses_tilde(variant) ? ConstantsMode::kTilde : ConstantsMode::kMain;
  const double b = params.b();
  const bool skip_initial = params.initial_slice_excluded();
  double eps_max = kInf;
  for (int j = skip_initial ? 1 : 0; j < grid.nt(); ++j)
    eps_max = std::min(eps_max, epsilon_bound(params.alpha.value(grid.t(j)), b, mode));

  const HarnackField hf = harnack_F(v, gg, params, g);
  const auto verify_nodes = cylinder_nodes(grid, geom, inner);
  std::vector<double> lhs_vals;
  double scale = 1.0;
  for (const auto& [i, j] : verify_nodes) {
    const double t = grid.t(j);
    if (t == 0.0) continue;
    const double al = params.alpha.value(t);
    const double lhs = hf.F(i, j) / al;
    scale = std::max(scale, std::abs(lhs));
  }
  rep.scale = scale;
  rep.tolerance = opts.tolerance_factor * scale;

  const std::vector<double> fractions = stat ? std::vector<double>{0.0} : opts.epsilon_fractions;
  if (fractions.empty()) throw ConfigError("verify_estimate: empty epsilon scan");
  RhsInputs ri;
  ri.p = params.p;
  ri.m = params.m;
  ri.b = b;
  ri.k = rep.bounds.k;
  ri.M_sup = rep.M_sup;
  ri.R = opts.R;
  ri.c1 = cut.c1;
  ri.c2 = cut.c2;
  for (std::size_t f = 0; f < fractions.size(); ++f) {
    const double eps = fractions[f] * eps_max;
    const Suprema sups =
        compute_suprema(nodes, in, !stat && mode == ConstantsMode::kMain ? eps : -1.0,
                        !stat && mode == ConstantsMode::kTilde ? eps : -1.0);
    EpsilonResult er;
    er.epsilon = eps;
    er.min_margin = kInf;
    const bool primary = f == 0;
    if (primary) rep.sups = sups;
    for (const auto& [i, j] : verify_nodes) {
      const double t = grid.t(j);
      if (t == 0.0) continue;
      ri.alpha = params.alpha.value(t);
      const double lhs = hf.F(i, j) / ri.alpha;
      const double rhs = opts.rhs_scale * rhs_bound(variant, sups, ri, t);
      const double margin = rhs - lhs;
      if (margin < -rep.tolerance) ++er.violations;
      er.min_margin = std::min(er.min_margin, margin);
      if (primary) {
        rep.r.push_back(grid.r(i));
        rep.t.push_back(t);
        rep.lhs.push_back(lhs);
        rep.rhs.push_back(rhs);
        rep.margin.push_back(margin);
        if (rep.margin.size() == 1 || margin < rep.min_margin) {
          rep.min_margin = margin;
          rep.r_at_min = grid.r(i);
          rep.t_at_min = t;
        }
      }
    }
    rep.violations += er.violations;
    rep.scan.push_back(er);
  }
  if (rep.margin.empty()) throw DomainError("verify_estimate: no verification node with t > 0");
  return rep;
}

AlphaBeta alpha_beta_preset(AlphaBetaPreset which, double gamma, double b) {
  if (!(gamma >= 0.0)) throw ConfigError("alpha/beta preset: gamma must be >= 0");
  AlphaBeta out;
  switch (which) {
    case AlphaBetaPreset::kExp:
      out.alpha = make_time_fn([gamma](auto t) {
        using std::exp;
        return exp(2.0 * gamma * t);
      });
      out.beta = constant_time_fn(0.0);
      break;
    case AlphaBetaPreset::kCoth:
      if (!(gamma > 0.0)) throw ConfigError("alpha/beta preset: coth preset needs gamma > 0");
      out.alpha = TimeFn{[gamma](const Jet& t) {
        if (!(t.value() > 0.0)) throw DomainError("alpha/beta preset: coth preset needs t > 0");
        const Jet x = gamma * t;
        const Jet s = sinh(x);
        return 1.0 + (cosh(x) * s - x) / (s * s);
      }};
      out.beta = TimeFn{[gamma, b](const Jet& t) {
        if (!(t.value() > 0.0)) throw DomainError("alpha/beta preset: coth preset needs t > 0");
        const Jet x = gamma * t;
        return b * gamma * (cosh(x) / sinh(x) + 1.0);
      }};
      break;
    case AlphaBetaPreset::kLinear:
      out.alpha = make_time_fn([gamma](auto t) { return 1.0 + 2.0 * gamma * t / 3.0; });
      out.beta = TimeFn{[gamma, b](const Jet& t) {
        if (!(t.value() > 0.0)) throw DomainError("alpha/beta preset: linear preset needs t > 0");
        return b * (1.0 / t + gamma + gamma * gamma * t / 3.0);
      }};
      break;
  }
  return out;
}

std::vector<double> preset_residuals(AlphaBetaPreset which, double gamma, double b, double t) {
  const AlphaBeta ab = alpha_beta_preset(which, gamma, b);
  const double al = ab.alpha.value(t), al_t = ab.alpha.derivative(t);
  auto scaled = [](std::initializer_list<double> terms) {
    double sum = 0.0, mag = 0.0;
    for (double x : terms) {
      sum += x;
      mag += std::abs(x);
    }
    return sum / std::max(1.0, mag);
  };
  if (which == AlphaBetaPreset::kExp) return {scaled({2.0 * gamma * al, -al_t})};
  const double be = ab.beta.value(t), be_t = ab.beta.derivative(t);
  if (which == AlphaBetaPreset::kCoth) {
    return {scaled({2.0 * be / b, -al_t, -2.0 * al * be / b, 2.0 * al * gamma}),
            scaled({be_t, 2.0 * be * be / b, -2.0 * gamma * be, -be * be / b})};
  }
  return {scaled({2.0 / t, 2.0 * gamma, -al_t, -2.0 * al / t}),
          scaled({be_t, 2.0 * be / t, -b * (1.0 / t + gamma) * (1.0 / t + gamma)})};
}

NonlinearityFlags nonlinearity_conditions(const PowerSumCoefficients& c, double p, double alpha,
                                          double v_lo, double v_hi, int samples) {
  if (!(v_lo > 0.0) || !(v_hi > v_lo) || samples < 2)
    throw ConfigError("nonlinearity_conditions: bad scan range");
  NonlinearityFlags f;
  f.nonincreasing_symbolic = true;
  f.convexity_symbolic = true;
  const double a_max = (1.0 - alpha) / (alpha * (p - 1.0));
  for (std::size_t k = 0; k < c.A.size(); ++k) {
    if (c.A[k] == 0.0) continue;
    f.nonincreasing_symbolic = f.nonincreasing_symbolic && c.a[k] <= 0.0;
    f.convexity_symbolic = f.convexity_symbolic && c.a[k] <= a_max;
  }
  for (std::size_t k = 0; k < c.B.size(); ++k) {
    if (c.B[k] == 0.0) continue;
    f.nonincreasing_symbolic = f.nonincreasing_symbolic && c.b[k] >= 0.0;
    f.convexity_symbolic = f.convexity_symbolic && c.b[k] >= 0.0 && c.b[k] <= 1.0;
  }
  const Nonlinearity g = Nonlinearity::power_sum(c);
  f.nonincreasing_numeric = true;
  f.convexity_numeric = true;
  for (int k = 0; k < samples; ++k) {
    const double v = v_lo * std::pow(v_hi / v_lo, static_cast<double>(k) / (samples - 1));
    const NonlinearityPartials gp = partials(g, 0.0, 0.0, v);
    const double mag = std::abs(gp.G) / v + std::abs(gp.G_v) + std::abs(v * gp.G_vv);
    const double tol = 1e-12 * std::max(1.0, mag);
    if (gp.G_v > tol) f.nonincreasing_numeric = false;
    const double conv =
        alpha * (p - 1.0) * v * gp.G_vv - (alpha - 1.0) * (gp.G / v - gp.G_v);
    if (conv < -tol) f.convexity_numeric = false;
  }
  return f;
}

LocalizedDiagnostic localized_diagnostic(const HarnackField& hf, const GridGeometry& gg,
                                         double R, double T1) {
  const Grid& grid = hf.F.grid();
  const Geometry& geom = gg.geometry();
  ScalarField G(grid, 0.0, Parity::kEven);
  for (int j = 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    for (int i = 0; i < grid.nr(); ++i)
      G(i, j) = t * CutoffProfile::eta(geom.a(t) * grid.r(i) / R) * hf.F(i, j);
  }
  LocalizedDiagnostic d;
  d.max_value = -kInf;
  for (int j = 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    if (t > T1 + 1e-12) break;
    for (int i = 0; i < grid.nr(); ++i) {
      if (geom.a(t) * grid.r(i) > 2.0 * R) continue;
      if (G(i, j) > d.max_value) {
        d.max_value = G(i, j);
        d.i = i;
        d.j = j;
      }
    }
  }
  if (d.i < 0) throw DomainError("localized_diagnostic: empty region");
  d.r = grid.r(d.i);
  d.t = grid.t(d.j);
  const int i = d.i, j = d.j;
  bool ok = true;
  if (i > 0 && i + 1 < grid.nr()) {
    ok = ok && G(i + 1, j) <= G(i, j) && G(i - 1, j) <= G(i, j);
  } else if (i == 0 && geom.pole_mode()) {
    ok = ok && G(1, j) <= G(0, j);
  }
  if (j > 0) ok = ok && G(i, j) >= G(i, j - 1);
  d.first_order_ok = ok;
  return d;
}

}  // namespace hlab
