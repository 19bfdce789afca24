#include "hlab/harnack_ineq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

// Integral of a(tau(s))^2 over [s0, s1] by four-point Gauss-Legendre.
template <class Tau>
double metric_weight(const Geometry& geom, Tau tau, double s0, double s1) {
  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
  double sum = 0.0;
  for (int q = 0; q < 4; ++q) {
    const double a = geom.a(tau(0.5 * (s0 + s1) + 0.5 * (s1 - s0) * kNodes[q]));
    sum += kWeights[q] * a * a;
  }
  return 0.5 * (s1 - s0) * sum;
}

// Minimizer of sum_k W_k (dr_k / ds)^2 ds-weighted with fixed ends: W_k dr_k is constant.
template <class Tau>
std::pair<double, std::vector<double>> brute_force(const Geometry& geom, Tau tau, double r1,
                                                   double r2, int segments) {
  const double ds = 1.0 / segments;
  std::vector<double> inv_w(segments);
  double total = 0.0;
  for (int k = 0; k < segments; ++k) {
    inv_w[k] = 1.0 / metric_weight(geom, tau, k * ds, (k + 1) * ds);
    total += inv_w[k];
  }
  std::vector<double> nodes(segments + 1, r1);
  double energy = 0.0;
  for (int k = 0; k < segments; ++k) {
    const double dr = (r2 - r1) * inv_w[k] / total;
    nodes[k + 1] = nodes[k] + dr;
    energy += dr * dr / (inv_w[k] * ds * ds);
  }
  nodes.back() = r2;
  return {energy, nodes};
}

// Bilinear interpolation of a grid field.
double interpolate(const ScalarField& f, double r, double t) {
  const Grid& g = f.grid();
  const double x = std::clamp((r - g.r_min()) / g.dr(), 0.0, g.nr() - 1.0);
  const double y = std::clamp(t / g.dt(), 0.0, g.nt() - 1.0);
  const int i = std::min(static_cast<int>(x), g.nr() - 2);
  const int j = std::min(static_cast<int>(y), g.nt() - 2);
  const double fx = x - i, fy = y - j;
  return (1 - fx) * (1 - fy) * f(i, j) + fx * (1 - fy) * f(i + 1, j) + (1 - fx) * fy * f(i, j + 1) +
         fx * fy * f(i + 1, j + 1);
}

}  // namespace

PathEnergy path_energy(const Geometry& geom, double r1, double t1, double r2, double t2,
                       PathMethod method, int segments) {
  if (!(t1 < t2)) throw DomainError("path_energy: need t1 < t2");
  if (segments < 8) throw ConfigError("path_energy: need at least 8 segments");
  auto proof_tau = [t1, t2](double s) { return t1 + s * (t2 - t1); };
  auto unit_tau = [](double s) { return s; };
  PathEnergy out;
  out.method = method;
  const double d2 = (r2 - r1) * (r2 - r1);
  out.value = d2 * metric_weight(geom, proof_tau, 0.0, 1.0);
  out.value_unit_time = d2 * metric_weight(geom, unit_tau, 0.0, 1.0);
  out.nodes.resize(segments + 1);
  for (int k = 0; k <= segments; ++k) out.nodes[k] = r1 + (r2 - r1) * k / segments;
  if (method == PathMethod::kBruteForce) {
    auto [e, nodes] = brute_force(geom, proof_tau, r1, r2, segments);
    if (e < out.value) {
      out.value = e;
      out.nodes = std::move(nodes);
    }
    out.value_unit_time =
        std::min(out.value_unit_time, brute_force(geom, unit_tau, r1, r2, segments).first);
  }
  return out;
}

HarnackBound harnack_bound(const Suprema& sups, double alpha, double b, HarnackForm form,
                           double L_value, double M_inf, double t1, double t2) {
  if (!(M_inf > 0.0)) throw DomainError("harnack_bound: infimum of v must be positive");
  if (!(t1 > 0.0) || !(t2 > t1)) throw DomainError("harnack_bound: need 0 < t1 < t2");
  if (!(L_value >= 0.0)) throw DomainError("harnack_bound: path energy must be >= 0");
  const auto& x = form == HarnackForm::kFirst ? sups.mu : sups.lambda;
  const double root = std::sqrt(std::pow(x[2], 4.0 / 3.0) + x[3] + x[4] * x[4]);
  HarnackBound out;
  out.L = L_value;
  out.M_inf = M_inf;
  out.H = x[0] + b * alpha * alpha * x[1] +
          (form == HarnackForm::kFirst ? alpha * std::sqrt(b) : std::sqrt(b * alpha * alpha * alpha)) *
              root;
  out.value = std::exp(alpha * L_value / (4.0 * M_inf * (t2 - t1)) + out.H * (t2 - t1) / alpha) *
              std::pow(t2 / t1, b * alpha);
  return out;
}

HarnackReport verify_harnack(const ScalarField& v, const GridGeometry& gg, const Nonlinearity& g,
                             const HarnackParams& params, const HarnackOptions& opts) {
  const Grid& grid = v.grid();
  const Geometry& geom = gg.geometry();
  if (grid != gg.grid()) throw DomainError("verify_harnack: grid mismatch");
  if (grid.nt() < 4) throw DomainError("verify_harnack: need at least 4 time levels");
  const double alpha = params.alpha.value(0.0);
  for (int j = 0; j < grid.nt(); ++j)
    if (params.alpha.value(grid.t(j)) != alpha || params.alpha.derivative(grid.t(j)) != 0.0)
      throw ConfigError("verify_harnack: alpha must be constant");
  if (!(alpha > 1.0)) throw ConfigError("verify_harnack: alpha must be > 1");

  const Cylinder whole{1.0, 0.0, grid.T(), true};
  const GeometryBounds bounds = extract_bounds(geom, whole, grid);
  const std::vector<NodeSample> nodes = collect_nodes(v, gg, g, whole);
  HarnackReport rep;
  rep.seed = opts.seed;
  rep.M_inf = *std::min_element(v.values().begin(), v.values().end());
  if (!(rep.M_inf > 0.0)) throw DomainError("verify_harnack: pressure must be positive");
  double M_sup = 0.0;
  for (const NodeSample& q : nodes) M_sup = std::max(M_sup, q.v);

  SupremumInputs in;
  in.params = &params;
  in.bounds = bounds;
  in.n = geom.n();
  in.M_sup = M_sup;
  in.R = 1.0;
  in.c1 = cutoff_profile().c1;
  in.global = true;
  const double b = params.b();
  const ConstantsMode mode =
      opts.form == HarnackForm::kFirst ? ConstantsMode::kMain : ConstantsMode::kTilde;
  const double eps = opts.epsilon_fraction * epsilon_bound(alpha, b, mode);
  rep.sups = compute_suprema(nodes, in, mode == ConstantsMode::kMain ? eps : -1.0,
                             mode == ConstantsMode::kTilde ? eps : -1.0);

  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<int> pick_i(0, grid.nr() - 1);
  std::uniform_int_distribution<int> pick_j(1, grid.nt() - 2);
  rep.min_slack = std::numeric_limits<double>::infinity();
  while (static_cast<int>(rep.pairs.size()) < opts.pairs) {
    int j1 = pick_j(rng), j2 = pick_j(rng);
    const int i1 = pick_i(rng), i2 = pick_i(rng);
    if (j1 == j2) continue;
    if (j1 > j2) std::swap(j1, j2);
    const double t1 = grid.t(j1), t2 = grid.t(j2);
    const double r1 = grid.r(i1), r2 = grid.r(i2);
    const PathEnergy pe = path_energy(geom, r1, t1, r2, t2, PathMethod::kBruteForce);
    const HarnackBound hb = harnack_bound(rep.sups, alpha, b, opts.form, pe.value, rep.M_inf, t1, t2);
    rep.H = hb.H;
    PairCheck pc{i1, j1, i2, j2};
    pc.ratio = v(i1, j1) / v(i2, j2);
    pc.bound = hb.value;
    pc.slack = pc.bound * v(i2, j2) - v(i1, j1);
    pc.violated = pc.slack < -opts.tolerance_factor * std::max(1.0, v(i1, j1));
    if (pc.violated) ++rep.violations;
    rep.min_slack = std::min(rep.min_slack, pc.slack);
    rep.pairs.push_back(pc);
  }
  return rep;
}

LogIntegralCheck log_integral_check(const ScalarField& v, const GridGeometry& gg, double alpha,
                                    double b, double H, double M_inf, double r1, double t1,
                                    double r2, double t2, int quadrature) {
  if (!(t1 > 0.0) || !(t2 > t1)) throw DomainError("log_integral_check: need 0 < t1 < t2");
  if (!(M_inf > 0.0)) throw DomainError("log_integral_check: infimum of v must be positive");
  if (quadrature < 2) throw ConfigError("log_integral_check: need at least 2 quadrature points");
  const Geometry& geom = gg.geometry();
  ScalarField ve = v;
  ve.set_parity(Parity::kEven);
  const ScalarField vr = diff(ve, Deriv::kR);
  const double speed_r = (r2 - r1) / (t2 - t1);
  LogIntegralCheck out;
  out.lhs = std::log(interpolate(v, r1, t1)) - std::log(interpolate(v, r2, t2));
  // Trapezoid rule on the non-singular parts; int h/alpha dt is exact.
  const double dt = (t2 - t1) / quadrature;
  double middle = 0.0, energy = 0.0;
  for (int k = 0; k <= quadrature; ++k) {
    const double t = t1 + k * dt;
    const double r = r1 + speed_r * (t - t1);
    const double a = geom.a(t);
    const double grad_f = std::abs(interpolate(vr, r, t)) / (a * interpolate(v, r, t));
    const double speed = a * std::abs(speed_r);
    const double w = (k == 0 || k == quadrature) ? 0.5 * dt : dt;
    middle += w * (grad_f * speed - M_inf * grad_f * grad_f / alpha);
    energy += w * alpha * speed * speed / (4.0 * M_inf);
  }
  const double h_part = b * alpha * std::log(t2 / t1) + H * (t2 - t1) / alpha;
  out.middle = middle + h_part;
  out.rhs = energy + h_part;
  out.margin = out.rhs - out.lhs;
  const double tol = 1e-9 * std::max(1.0, std::abs(out.rhs));
  out.chain_holds = out.lhs <= out.middle + tol && out.middle <= out.rhs + tol;
  return out;
}

}  // namespace hlab
