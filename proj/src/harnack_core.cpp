#include "hlab/harnack_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

// Directional quantities of a radial field with derivatives (w_r, w_rr) at a node.
struct RadialGrad {
  double grad2;     // |grad w|^2
  double hess_rad;  // Hess w on the radial unit vector
  double hess_ang;  // Hess w on an angular unit vector
};

RadialGrad radial_grad(const LocalGeometry& lg, double w_r, double w_rr) {
  const double inv_a2 = 1.0 / (lg.a * lg.a);
  const double ang = lg.at_pole ? w_rr : lg.psi_r / lg.psi * w_r;
  return {w_r * w_r * inv_a2, w_rr * inv_a2, ang * inv_a2};
}

// Geometric pairings shared by the identity and the inequalities.
struct Pairings {
  RadialGrad vg;
  double hess2;       // |Hess v|^2
  double h_hess;      // <h, Hess v>
  double h_norm2;     // |h|^2
  double h_vv;        // h(grad v, grad v)
  double h_phi_v;     // h(grad phi, grad v)
  double div_term;    // <2 div h - grad tr h, grad v>
  double phit_v;      // <grad d_t phi, grad v>
  double ric_m;       // Ric^m_phi(grad v, grad v)
  double phi_v_sq;    // <grad phi, grad v>^2 / (m - n), zero when m = n
  double G_v_pair;    // <grad G, grad v>
  double grad_norm;   // |grad v|
};

Pairings pairings(const PointState& s, double m) {
  const LocalGeometry& lg = s.lg;
  const int n = s.n;
  const double inv_a2 = 1.0 / (lg.a * lg.a);
  Pairings q;
  q.vg = radial_grad(lg, s.v_r, s.v_rr);
  q.hess2 = q.vg.hess_rad * q.vg.hess_rad + (n - 1.0) * q.vg.hess_ang * q.vg.hess_ang;
  q.h_hess = lg.h_rad * q.vg.hess_rad + (n - 1.0) * lg.h_ang * q.vg.hess_ang;
  q.h_norm2 = lg.h_rad * lg.h_rad + (n - 1.0) * lg.h_ang * lg.h_ang;
  q.h_vv = lg.h_rad * q.vg.grad2;
  q.h_phi_v = lg.h_rad * lg.phi_r * s.v_r * inv_a2;
  q.div_term = lg.div_h_coeff * s.v_r;
  q.phit_v = lg.phi_rt * s.v_r * inv_a2;
  q.ric_m = bakry_emery_radial(lg, n, m) * q.vg.grad2;
  const double phi_v = lg.phi_r * s.v_r * inv_a2;
  q.phi_v_sq = m > n ? phi_v * phi_v / (m - n) : 0.0;
  q.G_v_pair = s.G_r * s.v_r * inv_a2;
  q.grad_norm = std::sqrt(q.vg.grad2);
  return q;
}

double rel(double residual, double scale) {
  if (scale == 0.0) return residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(residual) / scale;
}

double op_L_jet(const Jet& w, const Jet& v, const Geometry& geom, const Jet& r, const Jet& t,
                double p) {
  return w.d(0, 1) - (p - 1.0) * v.value() * weighted_laplacian_jet(geom, w, r, t).value();
}

void require_off_pole(const Geometry& geom, double r) {
  if (geom.pole_mode() && r == 0.0)
    throw DomainError("analytic residual: sample points must lie off the pole");
}

}  // namespace

TimeFn constant_time_fn(double c) {
  return TimeFn{[c](const Jet&) { return Jet(c); }};
}

bool HarnackParams::initial_slice_excluded() const {
  try {
    return !(alpha.value(0.0) > 1.0);
  } catch (const DomainError&) {
    return true;
  }
}

void HarnackParams::validate(int n, double T) const {
  if (!(p > 1.0)) throw ConfigError("harnack: p must be > 1");
  if (!(m >= n)) throw ConfigError("harnack: m must be >= n");
  if (!(epsilon >= 0.0)) throw ConfigError("harnack: epsilon must be >= 0");
  constexpr int kSamples = 256;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = T * k / kSamples;
    if (k == 0 && initial_slice_excluded()) continue;
    const double a = alpha.value(t);
    if (k == 0 ? !(a >= 1.0) : !(a > 1.0))
      throw ConfigError("harnack: alpha must satisfy alpha > 1 (alpha(0) >= 1)");
    if (alpha.derivative(t) < -1e-12) throw ConfigError("harnack: alpha must be nondecreasing");
  }
}

ScalarField op_Lpv(const ScalarField& w, const ScalarField& v, const GridGeometry& gg, double p) {
  if (w.grid() != v.grid() || w.grid() != gg.grid()) throw DomainError("op_Lpv: grid mismatch");
  const ScalarField wt = diff(w, Deriv::kT);
  const ScalarField lap = weighted_laplacian(w, gg);
  ScalarField out(w.grid(), 0.0, w.parity());
  for (std::size_t k = 0; k < out.values().size(); ++k)
    out.values()[k] = wt.values()[k] - (p - 1.0) * v.values()[k] * lap.values()[k];
  return out;
}

HarnackField harnack_F(const ScalarField& v, const GridGeometry& gg, const HarnackParams& params,
                       const Nonlinearity& g, double floor) {
  if (v.grid() != gg.grid()) throw DomainError("harnack_F: grid mismatch");
  const Grid& grid = v.grid();
  const ScalarField vr = diff(v, Deriv::kR);
  const ScalarField vt = diff(v, Deriv::kT);
  const bool excluded = params.initial_slice_excluded();
  HarnackField out{ScalarField(grid, 0.0, Parity::kEven), ScalarField(grid, 0.0, Parity::kEven),
                   ScalarField(grid, 0.0, Parity::kEven), ScalarField(grid, 0.0, Parity::kEven)};
  for (int j = 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    if (t == 0.0 && excluded) {
      for (int i = 0; i < grid.nr(); ++i)
        out.F(i, j) = out.grad_ratio(i, j) = out.time_ratio(i, j) = out.source_ratio(i, j) =
            std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double alpha = params.alpha.value(t), beta = params.beta.value(t);
    for (int i = 0; i < grid.nr(); ++i) {
      const double vv = v(i, j);
      if (!(vv > floor) || !(vv > 0.0))
        throw DomainError("harnack_F: pressure below floor at r = " + std::to_string(grid.r(i)) +
                          ", t = " + std::to_string(t));
      const double a = gg.at(i, j).a;
      const double gr = vr(i, j) * vr(i, j) / (a * a * vv);
      const double tr = vt(i, j) / vv;
      const double sr = g.value(t, grid.r(i), vv) / vv;
      out.grad_ratio(i, j) = gr;
      out.time_ratio(i, j) = tr;
      out.source_ratio(i, j) = sr;
      out.F(i, j) = gr - alpha * tr + alpha * sr - beta;
    }
  }
  return out;
}

PointState analytic_state(const RadialFn& v, const Geometry& geom, const Nonlinearity& g,
                          const HarnackParams& params, double r, double t) {
  require_off_pole(geom, r);
  const Jet R = Jet::variable(Jet::kR, r);
  const Jet T = Jet::variable(Jet::kT, t);
  const Jet V = v.jet(R, T);
  const Jet A = geom.conformal()(R, T);
  const Jet alpha = params.alpha.jet(T);
  const Jet beta = params.beta.jet(T);
  const Jet Vr = V.diff(Jet::kR);
  const Jet Vt = V.diff(Jet::kT);
  const Jet G = g.evaluate(T, R, V);
  const Jet F = Vr * Vr / (A * A * V) - alpha * Vt / V + alpha * G / V - beta;

  PointState s;
  s.lg = geom.local(r, t);
  s.n = geom.n();
  s.v = V.value();
  s.v_r = V.d(1);
  s.v_rr = V.d(2);
  s.v_t = V.d(0, 1);
  s.lap_v = weighted_laplacian_jet(geom, V, R, T).value();
  s.F = F.value();
  s.F_r = F.d(1);
  s.F_t = F.d(0, 1);
  s.lap_F = weighted_laplacian_jet(geom, F, R, T).value();
  s.G = G.value();
  s.G_r = G.d(1);
  s.lap_G = weighted_laplacian_jet(geom, G, R, T).value();
  s.gp = partials(g, t, r, s.v);
  s.lap_Gx = weighted_laplacian_at(s.lg, s.n, s.gp.G_r, s.gp.G_rr);
  s.alpha = alpha.value();
  s.alpha_t = alpha.d(0, 1);
  s.beta = beta.value();
  s.beta_t = beta.d(0, 1);
  return s;
}

std::vector<PointState> grid_states(const ScalarField& v, const GridGeometry& gg,
                                    const Nonlinearity& g, const HarnackParams& params) {
  const Grid& grid = v.grid();
  ScalarField ve = v;
  ve.set_parity(Parity::kEven);
  const HarnackField hf = harnack_F(ve, gg, params, g);
  ScalarField Gf(grid, 0.0, Parity::kEven);
  for (int j = 0; j < grid.nt(); ++j)
    for (int i = 0; i < grid.nr(); ++i) Gf(i, j) = g.value(grid.t(j), grid.r(i), ve(i, j));
  const ScalarField vr = diff(ve, Deriv::kR), vrr = diff(ve, Deriv::kRR), vt = diff(ve, Deriv::kT);
  const ScalarField lap_v = weighted_laplacian(ve, gg);
  const ScalarField Fr = diff(hf.F, Deriv::kR), Ft = diff(hf.F, Deriv::kT);
  const ScalarField lap_F = weighted_laplacian(hf.F, gg);
  const ScalarField Gr = diff(Gf, Deriv::kR);
  const ScalarField lap_G = weighted_laplacian(Gf, gg);

  std::vector<PointState> out(grid.size());
  const bool excluded = params.initial_slice_excluded();
  for (int j = excluded ? 1 : 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    const double alpha = params.alpha.value(t), alpha_t = params.alpha.derivative(t);
    const double beta = params.beta.value(t), beta_t = params.beta.derivative(t);
    for (int i = 0; i < grid.nr(); ++i) {
      PointState& s = out[grid.index(i, j)];
      s.lg = gg.at(i, j);
      s.n = gg.geometry().n();
      s.v = ve(i, j);
      s.v_r = vr(i, j);
      s.v_rr = vrr(i, j);
      s.v_t = vt(i, j);
      s.lap_v = lap_v(i, j);
      s.F = hf.F(i, j);
      s.F_r = Fr(i, j);
      s.F_t = Ft(i, j);
      s.lap_F = lap_F(i, j);
      s.G = Gf(i, j);
      s.G_r = Gr(i, j);
      s.lap_G = lap_G(i, j);
      s.gp = partials(g, t, grid.r(i), s.v);
      s.lap_Gx = weighted_laplacian_at(s.lg, s.n, s.gp.G_r, s.gp.G_rr);
      s.alpha = alpha;
      s.alpha_t = alpha_t;
      s.beta = beta;
      s.beta_t = beta_t;
    }
  }
  return out;
}

double op_L_of_F(const PointState& s, double p) { return s.F_t - (p - 1.0) * s.v * s.lap_F; }

double f_evolution_rhs(const PointState& s, const HarnackParams& params) {
  const double p = params.p, pm1 = p - 1.0;
  const double al = s.alpha, al_t = s.alpha_t;
  const Pairings q = pairings(s, params.m);
  const double plap = pm1 * s.lap_v;
  const double tr = s.v_t / s.v, sr = s.G / s.v;
  return -plap * plap + 2.0 * p * s.F_r * s.v_r / (s.lg.a * s.lg.a) - 2.0 * pm1 * q.hess2 -
         2.0 * pm1 * q.ric_m - 2.0 * pm1 * q.phi_v_sq + 2.0 / s.v * (al - 1.0) * q.h_vv +
         2.0 * al * pm1 * q.h_hess + al * pm1 * q.div_term + al * pm1 * q.phit_v - s.beta_t -
         2.0 * al * pm1 * q.h_phi_v - al_t * tr + (1.0 - al) * (tr - sr) * (tr - sr) +
         2.0 / s.v * (1.0 - al) * q.G_v_pair - al * pm1 * s.lap_G +
         (al - 1.0) * q.vg.grad2 / s.v * sr + al_t * sr;
}

double lemma_rhs(LemmaBound which, const PointState& s, const HarnackParams& params,
                 const GeometryBounds& bounds, bool static_factor) {
  const double p = params.p, pm1 = p - 1.0, m = params.m, b = params.b();
  const double al = s.alpha, al_t = s.alpha_t, be = s.beta, be_t = s.beta_t;
  const Pairings q = pairings(s, m);
  const double gv = q.vg.grad2 / s.v;
  const double inv_a2 = 1.0 / (s.lg.a * s.lg.a);
  const double transport = 2.0 * p * s.F_r * s.v_r * inv_a2;
  const double sr = s.G / s.v;

  if (which == LemmaBound::kSquareDropped) {
    const double mp = m * pm1;
    const double factor = static_factor ? (2.0 + mp) / mp : (1.0 + mp) / mp;
    const double plap = pm1 * s.lap_v;
    return -factor * plap * plap + 2.0 / s.v * (al - 1.0) * q.h_vv - 2.0 * pm1 * q.ric_m +
           transport + (static_factor ? 0.0 : pm1 * al * al * q.h_norm2) +
           al * pm1 * q.div_term + al * pm1 * q.phit_v +
           2.0 / s.v * (1.0 - al) * q.G_v_pair - al * pm1 * s.lap_G - 2.0 * al * pm1 * q.h_phi_v +
           (al - 1.0) * gv * sr + al_t * sr - al_t * s.v_t / s.v - be_t;
  }

  const double F = s.F;
  const double ba2 = b * al * al;
  const double G_x = std::abs(s.gp.G_r) / s.lg.a;
  const double G_xv = std::abs(s.gp.G_rv) / s.lg.a;
  const double common = -F * F / ba2 - 2.0 * (al - 1.0) / ba2 * gv * F +
                        (s.gp.G_v - 2.0 * be / ba2 + al_t / al) * F + transport -
                        (al - 1.0) * (al - 1.0) / ba2 * gv * gv - al * pm1 * s.lap_Gx +
                        be * s.gp.G_v - be / al * (be / (b * al) - al_t) - be_t;
  const double bracket = (al - 1.0) * (sr - s.gp.G_v) - al * pm1 * s.v * s.gp.G_vv - al_t / al -
                         2.0 * (al - 1.0) / ba2 * be;
  const double source_grad = 2.0 * ((al - 1.0) * G_x / s.v + al * pm1 * G_xv);

  if (which == LemmaBound::kExpanded) {
    return common + 2.0 / s.v * (al - 1.0) * q.h_vv + pm1 * al * al * q.h_norm2 + bracket * gv -
           2.0 * pm1 * q.ric_m + al * pm1 * q.div_term + source_grad * q.grad_norm +
           al * pm1 * q.phit_v - 2.0 * al * pm1 * q.h_phi_v;
  }

  const double geo_grad = 2.0 * pm1 * s.v * ((m - 1.0) * bounds.k + bounds.k2) +
                          2.0 * (al - 1.0) * bounds.k_hi;
  const double lin = source_grad + al * pm1 * bounds.l2 + 2.0 * al * pm1 * bounds.k_lo * bounds.l1;
  const double kk = bounds.k_lo + bounds.k_hi;
  return common + (geo_grad + bracket) * gv + lin * q.grad_norm +
         al * al * pm1 * s.n * (kk * kk + 2.0 * bounds.k2);
}

void ResidualSummary::add(double residual, double scale, double r, double t) {
  const double rr = rel(residual, scale);
  max_abs = std::max(max_abs, std::abs(residual));
  if (count == 0 || rr > max_rel) {
    max_rel = rr;
    r_at_max = r;
    t_at_max = t;
  }
  mean_rel += rr;
  ++count;
}

void ResidualSummary::finish() {
  if (count > 0) mean_rel /= count;
}

std::vector<std::pair<double, double>> sample_points(double r_lo, double r_hi, double t_lo,
                                                     double t_hi, int nr, int nt) {
  if (nr < 1 || nt < 1) throw DomainError("sample_points: need at least one point per axis");
  std::vector<std::pair<double, double>> out;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      const double r = nr == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (nr - 1.0);
      const double t = nt == 1 ? t_lo : t_lo + (t_hi - t_lo) * j / (nt - 1.0);
      out.emplace_back(r, t);
    }
  return out;
}

ResidualSummary residual_pressure_eq(const RadialFn& v, const Geometry& geom, double p,
                                     const Nonlinearity& g,
                                     const std::vector<std::pair<double, double>>& samples) {
  ResidualSummary out;
  for (const auto& [r, t] : samples) {
    require_off_pole(geom, r);
    const Jet R = Jet::variable(Jet::kR, r), T = Jet::variable(Jet::kT, t);
    const Jet V = v.jet(R, T);
    const double a = geom.a(t);
    const double vt = V.d(0, 1);
    const double diffusion = (p - 1.0) * V.value() * weighted_laplacian_jet(geom, V, R, T).value();
    const double grad2 = V.d(1) * V.d(1) / (a * a);
    const double G = g.value(t, r, V.value());
    out.add(vt - diffusion - grad2 - G,
            std::abs(vt) + std::abs(diffusion) + std::abs(grad2) + std::abs(G), r, t);
  }
  out.finish();
  return out;
}

ResidualSummary residual_quotient_rule(const RadialFn& f, const RadialFn& g, const RadialFn& v,
                                       const Geometry& geom, double p,
                                       const std::vector<std::pair<double, double>>& samples) {
  ResidualSummary out;
  for (const auto& [r, t] : samples) {
    require_off_pole(geom, r);
    const Jet R = Jet::variable(Jet::kR, r), T = Jet::variable(Jet::kT, t);
    const Jet F = f.jet(R, T), Gj = g.jet(R, T), V = v.jet(R, T);
    if (std::abs(Gj.value()) < 1e-12) throw DomainError("quotient rule: g too close to zero");
    const Jet Q = F / Gj;
    const double a = geom.a(t);
    const double lhs = op_L_jet(Q, V, geom, R, T, p);
    const double t1 = op_L_jet(F, V, geom, R, T, p) / Gj.value();
    const double t2 =
        2.0 * (p - 1.0) * V.value() * Q.d(1) * Gj.d(1) / (Gj.value() * a * a);
    const double t3 = -F.value() / (Gj.value() * Gj.value()) * op_L_jet(Gj, V, geom, R, T, p);
    out.add(lhs - (t1 + t2 + t3), std::abs(lhs) + std::abs(t1) + std::abs(t2) + std::abs(t3), r,
            t);
  }
  out.finish();
  return out;
}

std::vector<CommutatorVariant> residual_commutator(
    const RadialFn& v, const Geometry& geom,
    const std::vector<std::pair<double, double>>& samples) {
  std::vector<CommutatorVariant> variants;
  for (int mask = 0; mask < 16; ++mask) {
    CommutatorVariant cv;
    cv.name = "(";
    for (int k = 0; k < 4; ++k) {
      cv.signs[k] = (mask >> (3 - k)) & 1 ? -1 : 1;
      cv.name += cv.signs[k] > 0 ? '+' : '-';
      if (k < 3) cv.name += ", ";
    }
    cv.name += ")";
    variants.push_back(cv);
  }
  for (const auto& [r, t] : samples) {
    require_off_pole(geom, r);
    const Jet R = Jet::variable(Jet::kR, r), T = Jet::variable(Jet::kT, t);
    const Jet V = v.jet(R, T);
    const double lhs = weighted_laplacian_jet(geom, V, R, T).d(0, 1) -
                       weighted_laplacian_jet(geom, V.diff(Jet::kT), R, T).value();
    PointState s;
    s.lg = geom.local(r, t);
    s.n = geom.n();
    s.v = V.value();
    s.v_r = V.d(1);
    s.v_rr = V.d(2);
    const Pairings q = pairings(s, geom.m());
    const std::array<double, 4> terms = {2.0 * q.h_hess, -q.div_term, 2.0 * q.h_phi_v, -q.phit_v};
    double scale = std::abs(lhs);
    for (double x : terms) scale += std::abs(x);
    for (auto& cv : variants) {
      double rhs = 0.0;
      for (int k = 0; k < 4; ++k) rhs += cv.signs[k] * terms[k];
      cv.residual.add(lhs - rhs, scale, r, t);
    }
  }
  for (auto& cv : variants) cv.residual.finish();
  return variants;
}

std::vector<std::string> consistent_variants(
    const std::vector<std::vector<CommutatorVariant>>& tables, double tol) {
  std::vector<std::string> out;
  if (tables.empty()) return out;
  for (std::size_t k = 0; k < tables.front().size(); ++k) {
    bool ok = true;
    for (const auto& table : tables) ok = ok && table.at(k).residual.max_rel <= tol;
    if (ok) out.push_back(tables.front()[k].name);
  }
  return out;
}

ResidualSummary residual_bochner(const RadialFn& w, const Geometry& geom,
                                 const std::vector<std::pair<double, double>>& samples) {
  ResidualSummary out;
  for (const auto& [r, t] : samples) {
    require_off_pole(geom, r);
    const Jet R = Jet::variable(Jet::kR, r), T = Jet::variable(Jet::kT, t);
    const Jet W = w.jet(R, T);
    const Jet A = geom.conformal()(R, T);
    const Jet Wr = W.diff(Jet::kR);
    const Jet grad2 = Wr * Wr / (A * A);
    const double half_lap = 0.5 * weighted_laplacian_jet(geom, grad2, R, T).value();
    const Jet lapW = weighted_laplacian_jet(geom, W, R, T);
    const LocalGeometry lg = geom.local(r, t);
    const double cross = Wr.value() * lapW.d(1) / (lg.a * lg.a);
    const RadialGrad rg = radial_grad(lg, W.d(1), W.d(2));
    const double hess2 = rg.hess_rad * rg.hess_rad + (geom.n() - 1.0) * rg.hess_ang * rg.hess_ang;
    const double ric = (lg.ric_rad + lg.hess_phi_rad) * rg.grad2;
    out.add(half_lap - cross - hess2 - ric,
            std::abs(half_lap) + std::abs(cross) + std::abs(hess2) + std::abs(ric), r, t);
  }
  out.finish();
  return out;
}

ResidualSummary residual_F_evolution(const RadialFn& v, const Geometry& geom,
                                     const HarnackParams& params, const Nonlinearity& g,
                                     const std::vector<std::pair<double, double>>& samples) {
  ResidualSummary out;
  for (const auto& [r, t] : samples) {
    const PointState s = analytic_state(v, geom, g, params, r, t);
    const double lhs = op_L_of_F(s, params.p);
    const double rhs = f_evolution_rhs(s, params);
    out.add(lhs - rhs, std::abs(s.F_t) + std::abs((params.p - 1.0) * s.v * s.lap_F), r, t);
  }
  out.finish();
  return out;
}

ResidualSummary residual_F_evolution(const ScalarField& v, const GridGeometry& gg,
                                     const HarnackParams& params, const Nonlinearity& g,
                                     double r_lo, double r_hi, double t_lo, double t_hi) {
  const Grid& grid = v.grid();
  const std::vector<PointState> states = grid_states(v, gg, g, params);
  ResidualSummary out;
  for (int j = 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    for (int i = 0; i < grid.nr(); ++i) {
      const double r = grid.r(i);
      if (r < r_lo - 1e-12 || r > r_hi + 1e-12) continue;
      const PointState& s = states[grid.index(i, j)];
      const double lhs = op_L_of_F(s, params.p);
      out.add(lhs - f_evolution_rhs(s, params), 1.0, r, t);
    }
  }
  if (out.count == 0) throw DomainError("residual_F_evolution: empty region");
  out.finish();
  return out;
}

MarginSummary check_lemma_inequalities(LemmaBound which, const RadialFn& v, const Geometry& geom,
                                       const HarnackParams& params, const Nonlinearity& g,
                                       const GeometryBounds& bounds,
                                       const std::vector<std::pair<double, double>>& samples,
                                       bool static_factor) {
  if (static_factor && !geom.is_static())
    throw ConfigError("lemma check: the sharper factor requires a static metric");
  MarginSummary out;
  bool first = true;
  for (const auto& [r, t] : samples) {
    const PointState s = analytic_state(v, geom, g, params, r, t);
    const double lhs = op_L_of_F(s, params.p);
    const double rhs = lemma_rhs(which, s, params, bounds, static_factor);
    const double margin = rhs - lhs;
    const double scaled = margin / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (first || scaled < out.min_scaled) {
      out.min_scaled = scaled;
      out.min_margin = margin;
      out.r_at_min = r;
      out.t_at_min = t;
      first = false;
    }
    ++out.count;
  }
  return out;
}

}  // namespace hlab
