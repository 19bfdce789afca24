#include "hlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

constexpr double kPoleTol = 1e-10;

Jet polynomial(const std::vector<double>& c, const std::vector<double>& d, const Jet& r,
               const Jet& t) {
  Jet out(0.0);
  Jet power(1.0);
  const std::size_t len = std::max(c.size(), d.size());
  for (std::size_t k = 0; k < len; ++k) {
    const Jet coef = Jet(k < c.size() ? c[k] : 0.0) + (k < d.size() ? d[k] : 0.0) * t;
    out += coef * power;
    power = power * r;
  }
  return out;
}

}  // namespace

std::string to_string(GeometryFamily family) {
  switch (family) {
    case GeometryFamily::kStaticWarp:
      return "static-warp";
    case GeometryFamily::kConformalEvolving:
      return "conformal-evolving";
    case GeometryFamily::kEvolvingWarp:
      return "evolving-warp";
  }
  return "unknown";
}

Geometry::Geometry(GeometryFamily family, int n, double m, double r_min, double r_max,
                   RadialFn warp, RadialFn conformal, RadialFn potential, std::string name)
    : family_(family),
      n_(n),
      m_(m),
      r_min_(r_min),
      r_max_(r_max),
      warp_(std::move(warp)),
      conformal_(std::move(conformal)),
      potential_(std::move(potential)),
      name_(std::move(name)) {
  if (n_ < 2) throw ConfigError("geometry: dimension n must be >= 2");
  if (m_ < n_) throw ConfigError("geometry: synthetic dimension m must be >= n");
  if (!(r_min_ >= 0.0) || !(r_max_ > r_min_))
    throw ConfigError("geometry: need 0 <= r_min < r_max");
}

bool Geometry::is_static() const { return family_ == GeometryFamily::kStaticWarp; }

void Geometry::check_radius(double r) const {
  const double slack = 1e-12 * r_max_;
  if (r < r_min_ - slack || r > r_max_ + slack)
    throw DomainError("geometry: radius outside [r_min, r_max]");
}

void Geometry::validate(double T) const {
  constexpr int kTimes = 11;
  constexpr int kRadii = 64;
  for (int j = 0; j < kTimes; ++j) {
    const double t = T * j / (kTimes - 1);
    if (!(a(t) > 0.0)) throw ConfigError("geometry: conformal factor must be positive");
    for (int i = 0; i <= kRadii; ++i) {
      const double r = r_min_ + (r_max_ - r_min_) * i / kRadii;
      if (r == 0.0) continue;
      if (!(warp_(r, t) > 0.0)) throw ConfigError("geometry: warp must be positive on (0, r_max]");
    }
    if (pole_mode()) {
      const Jet psi = warp_(Jet::variable(Jet::kR, 0.0), Jet(t));
      const Jet phi = potential_(Jet::variable(Jet::kR, 0.0), Jet(t));
      if (std::abs(psi.value()) > kPoleTol || std::abs(psi.d(1) - 1.0) > kPoleTol)
        throw ConfigError("geometry: pole mode requires psi(0,t)=0 and psi_r(0,t)=1");
      if (std::abs(phi.d(1)) > kPoleTol)
        throw ConfigError("geometry: pole mode requires phi_r(0,t)=0");
    }
    if (m_ == n_) {
      for (int i = 0; i <= kRadii; ++i) {
        const double r = r_min_ + (r_max_ - r_min_) * i / kRadii;
        const Jet phi = potential_(Jet::variable(Jet::kR, r), Jet::variable(Jet::kT, t));
        if (std::abs(phi.d(1)) > kPoleTol || std::abs(phi.d(0, 1)) > kPoleTol)
          throw ConfigError("geometry: m = n requires a constant potential");
      }
    }
  }
}

LocalGeometry Geometry::local(double r, double t) const {
  check_radius(r);
  const Jet rj = Jet::variable(Jet::kR, r);
  const Jet tj = Jet::variable(Jet::kT, t);
  const Jet psi = warp_(rj, tj);
  const Jet aj = conformal_(rj, tj);
  const Jet phi = potential_(rj, tj);

  LocalGeometry g;
  g.r = r;
  g.t = t;
  g.a = aj.value();
  g.a_t = aj.d(0, 1);
  g.psi = psi.value();
  g.psi_r = psi.d(1);
  g.psi_rr = psi.d(2);
  g.psi_t = psi.d(0, 1);
  g.psi_rt = psi.d(1, 1);
  g.phi_r = phi.d(1);
  g.phi_rr = phi.d(2);
  g.phi_rt = phi.d(1, 1);
  if (!(g.a > 0.0)) throw DomainError("geometry: non-positive conformal factor");

  const double n1 = n_ - 1.0;
  const double a2 = g.a * g.a;
  g.h_rad = g.a_t / g.a;
  g.at_pole = pole_mode() && r == 0.0;
  if (g.at_pole) {
    const double psi_rrr = psi.d(3);
    g.drift = std::numeric_limits<double>::quiet_NaN();
    g.drift_t = -g.phi_rt;
    g.ric_rad = g.ric_ang = -n1 * psi_rrr / a2;
    g.hess_phi_rad = g.hess_phi_ang = g.phi_rr / a2;
    if (std::abs(g.psi_rt) > kPoleTol)
      throw DomainError("geometry: metric speed singular at the pole (conical evolution)");
    g.h_ang = g.h_rad;
    g.grad_h = 0.0;
    g.div_h_coeff = 0.0;
    return g;
  }
  if (!(g.psi > 0.0)) throw DomainError("geometry: non-positive warp");
  const double q = g.psi_r / g.psi;
  const double f = g.psi_t / g.psi;
  const double f_r = g.psi_rt / g.psi - g.psi_r * g.psi_t / (g.psi * g.psi);
  g.drift = n1 * q - g.phi_r;
  g.drift_t = n1 * f_r - g.phi_rt;
  g.ric_rad = -n1 * g.psi_rr / g.psi / a2;
  g.ric_ang =
      (-g.psi_rr / g.psi + (n_ - 2.0) * (1.0 - g.psi_r * g.psi_r) / (g.psi * g.psi)) / a2;
  g.hess_phi_rad = g.phi_rr / a2;
  g.hess_phi_ang = q * g.phi_r / a2;
  g.h_ang = g.h_rad + f;
  g.grad_h = std::sqrt(n1 * f_r * f_r + 2.0 * n1 * f * f * q * q) / g.a;
  g.div_h_coeff = -n1 * (2.0 * f * q + f_r) / a2;
  return g;
}

GeometryJets geometry_jets(const Geometry& geom, const Jet& r, const Jet& t) {
  if (geom.pole_mode() && r.value() == 0.0)
    throw DomainError("geometry_jets: drift is singular at the pole");
  const Jet psi = geom.warp()(r, t);
  const Jet phi = geom.potential()(r, t);
  return {geom.conformal()(r, t), (geom.n() - 1.0) * psi.diff(Jet::kR) / psi - phi.diff(Jet::kR)};
}

Jet weighted_laplacian_jet(const Geometry& geom, const Jet& w, const Jet& r, const Jet& t) {
  const GeometryJets gj = geometry_jets(geom, r, t);
  const Jet w_r = w.diff(Jet::kR);
  return (w_r.diff(Jet::kR) + gj.drift * w_r) / (gj.a * gj.a);
}

double bakry_emery_radial(const LocalGeometry& lg, int n, double m) {
  double val = lg.ric_rad + lg.hess_phi_rad;
  if (m > n) val -= (lg.phi_r / lg.a) * (lg.phi_r / lg.a) / (m - n);
  return val;
}

double bakry_emery_angular(const LocalGeometry& lg) { return lg.ric_ang + lg.hess_phi_ang; }

std::pair<double, double> curvature_eigs(const Geometry& geom, double r, double t) {
  const LocalGeometry lg = geom.local(r, t);
  return {lg.ric_rad, lg.ric_ang};
}

std::pair<double, double> bakry_emery_eigs(const Geometry& geom, double r, double t) {
  const LocalGeometry lg = geom.local(r, t);
  if (geom.m() == geom.n() && (lg.phi_r != 0.0 || lg.phi_rr != 0.0))
    throw ConfigError("bakry_emery_eigs: m = n requires a constant potential");
  return {bakry_emery_radial(lg, geom.n(), geom.m()), bakry_emery_angular(lg)};
}

double drift_coefficient(const Geometry& geom, double r, double t) {
  const LocalGeometry lg = geom.local(r, t);
  if (lg.at_pole) throw DomainError("drift_coefficient: singular at the pole");
  return lg.drift;
}

MetricSpeed metric_speed_eigs(const Geometry& geom, double r, double t) {
  const LocalGeometry lg = geom.local(r, t);
  return {lg.h_rad, lg.h_ang, lg.grad_h};
}

bool Cylinder::contains(const Geometry& geom, double r, double t) const {
  const double eps = 1e-12 * std::max(1.0, T_hi);
  if (t < T_lo - eps || t > T_hi + eps) return false;
  if (whole_domain) return true;
  return geom.a(t) * r <= R * (1.0 + 1e-12);
}

GeometryBounds extract_bounds(const Geometry& geom, const Cylinder& cyl, const Grid& grid) {
  GeometryBounds b;
  bool any = false;
  const double m = geom.m();
  const int n = geom.n();
  for (int j = 0; j < grid.nt(); ++j) {
    const double t = grid.t(j);
    for (int i = 0; i < grid.nr(); ++i) {
      const double r = grid.r(i);
      if (!cyl.contains(geom, r, t)) continue;
      any = true;
      const LocalGeometry lg = geom.local(r, t);
      const double min_eig = std::min(bakry_emery_radial(lg, n, m), bakry_emery_angular(lg));
      b.k = std::max(b.k, -min_eig / (m - 1.0));
      b.k_lo = std::max(b.k_lo, -std::min(lg.h_rad, lg.h_ang));
      b.k_hi = std::max(b.k_hi, std::max(lg.h_rad, lg.h_ang));
      b.k2 = std::max(b.k2, lg.grad_h);
      b.l1 = std::max(b.l1, std::abs(lg.phi_r) / lg.a);
      b.l2 = std::max(b.l2, std::abs(lg.phi_rt) / lg.a);
    }
  }
  if (!any) throw DomainError("extract_bounds: cylinder contains no grid node");
  return b;
}

double geodesic_distance(const Geometry& geom, double r1, double r2, double t) {
  return geom.a(t) * std::abs(r1 - r2);
}

Geometry make_preset(const std::string& preset, int n, double m, double r_max,
                     const std::string& base, double r_min) {
  static const std::regex kPattern(R"(^([a-z-]+)(\(([^)]*)\))?$)");
  std::smatch match;
  if (!std::regex_match(preset, match, kPattern))
    throw ConfigError("geometry: malformed preset '" + preset + "'");
  const std::string name = match[1];
  double rate = 0.0;
  if (match[2].matched) {
    std::istringstream in(match[3].str());
    if (!(in >> rate) || !(in >> std::ws).eof())
      throw ConfigError("geometry: malformed preset parameter in '" + preset + "'");
  }
  const RadialFn one = make_radial_fn([](auto, auto) { return 1.0; });
  const RadialFn zero = make_radial_fn([](auto, auto) { return 0.0; });
  const RadialFn identity = make_radial_fn([](auto r, auto) { return r; });

  auto spatial = [&](const std::string& which, RadialFn& warp, RadialFn& potential) {
    potential = zero;
    if (which == "euclidean") {
      warp = identity;
    } else if (which == "hyperbolic") {
      warp = make_radial_fn([](auto r, auto) {
        using std::sinh;
        return sinh(r);
      });
    } else if (which == "sphere") {
      if (!(r_max < M_PI)) throw ConfigError("geometry: sphere cap requires r_max < pi");
      warp = make_radial_fn([](auto r, auto) {
        using std::sin;
        return sin(r);
      });
    } else if (which == "gaussian-weight") {
      warp = identity;
      potential = make_radial_fn([](auto r, auto) { return 0.5 * r * r; });
    } else {
      throw ConfigError("geometry: unknown preset '" + which + "'");
    }
  };

  RadialFn warp, potential;
  if (name == "conformal-exp") {
    spatial(base, warp, potential);
    const RadialFn conformal = make_radial_fn([rate](auto, auto t) {
      using std::exp;
      return exp(rate * t);
    });
    return Geometry(GeometryFamily::kConformalEvolving, n, m, 0.0, r_max, warp, conformal,
                    potential, preset + "/" + base);
  }
  if (name == "linear-warp") {
    const double inner = r_min > 0.0 ? r_min : 0.5 * r_max;
    warp = make_radial_fn([rate](auto r, auto t) { return r * (1.0 + rate * t); });
    return Geometry(GeometryFamily::kEvolvingWarp, n, m, inner, r_max, warp, one, zero, preset);
  }
  if (match[2].matched) throw ConfigError("geometry: preset '" + name + "' takes no parameter");
  spatial(name, warp, potential);
  return Geometry(GeometryFamily::kStaticWarp, n, m, 0.0, r_max, warp, one, potential, name);
}

Geometry make_coefficient_geometry(GeometryFamily family, int n, double m, double r_min,
                                   double r_max, const GeometryCoefficients& c) {
  if (c.warp.empty()) throw ConfigError("geometry: coefficient warp list is empty");
  const auto warp_c = c.warp, warp_d = c.warp_rate, pot_c = c.potential, pot_d = c.potential_rate;
  const double rate = c.conformal_rate;
  RadialFn warp{[=](double r, double t) { return polynomial(warp_c, warp_d, r, t).value(); },
                [=](const Jet& r, const Jet& t) { return polynomial(warp_c, warp_d, r, t); }};
  RadialFn potential{[=](double r, double t) { return polynomial(pot_c, pot_d, r, t).value(); },
                     [=](const Jet& r, const Jet& t) { return polynomial(pot_c, pot_d, r, t); }};
  RadialFn conformal = make_radial_fn([rate](auto, auto t) {
    using std::exp;
    return exp(rate * t);
  });
  const bool evolving_warp = std::any_of(warp_d.begin(), warp_d.end(), [](double x) { return x != 0.0; });
  if (evolving_warp && family != GeometryFamily::kEvolvingWarp)
    throw ConfigError("geometry: time-dependent warp requires the evolving-warp family");
  if (rate != 0.0 && family != GeometryFamily::kConformalEvolving)
    throw ConfigError("geometry: conformal rate requires the conformal-evolving family");
  const bool evolving_phi = std::any_of(pot_d.begin(), pot_d.end(), [](double x) { return x != 0.0; });
  if (family == GeometryFamily::kStaticWarp && evolving_phi)
    throw ConfigError("geometry: static family requires a time-independent potential");
  return Geometry(family, n, m, r_min, r_max, warp, conformal, potential, "coefficients");
}

}  // namespace hlab
