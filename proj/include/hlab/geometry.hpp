#pragma once

/// @file
/// @brief Rotationally symmetric evolving metric measure spaces.
///
/// Metric g(t) = a(t)^2 (dr^2 + psi(r,t)^2 g_sphere), measure e^{-phi} dv_g.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hlab/grid.hpp"
#include "hlab/jet.hpp"

namespace hlab {

/// A function of (r, t) with a plain evaluator and a jet evaluator built from one source.
struct RadialFn {
  std::function<double(double, double)> value;
  std::function<Jet(const Jet&, const Jet&)> jet;

  double operator()(double r, double t) const { return value(r, t); }
  Jet operator()(const Jet& r, const Jet& t) const { return jet(r, t); }
};

/// Wraps a generic callable `f(r, t)` usable with both double and Jet arguments.
template <class F>
RadialFn make_radial_fn(F f) {
  return RadialFn{[f](double r, double t) { return static_cast<double>(f(r, t)); },
                  [f](const Jet& r, const Jet& t) { return Jet(f(r, t)); }};
}

enum class GeometryFamily { kStaticWarp, kConformalEvolving, kEvolvingWarp };

std::string to_string(GeometryFamily family);

/// Pointwise derivative table and derived tensor eigenvalues at (r, t).
struct LocalGeometry {
  double r = 0, t = 0;
  bool at_pole = false;
  double a = 1, a_t = 0;
  double psi = 0, psi_r = 0, psi_rr = 0, psi_t = 0, psi_rt = 0;
  double phi_r = 0, phi_rr = 0, phi_rt = 0;
  /// Radial Laplacian drift; NaN at the pole.
  double drift = 0;
  /// d/dt of the drift.
  double drift_t = 0;
  double ric_rad = 0, ric_ang = 0;
  double hess_phi_rad = 0, hess_phi_ang = 0;
  double h_rad = 0, h_ang = 0, grad_h = 0;
  /// <2 div h - grad tr h, grad w> = div_h_coeff * w_r for radial w.
  double div_h_coeff = 0;
};

class Geometry;

/// Conformal factor and radial drift as jets in the variables r, t.
struct GeometryJets {
  Jet a;
  Jet drift;
};
/// Requires r off the pole; r and t are the identity variables at the expansion point.
GeometryJets geometry_jets(const Geometry& geom, const Jet& r, const Jet& t);
/// a^{-2}(w_rr + D w_r) for a jet w in the identity variables r, t.
Jet weighted_laplacian_jet(const Geometry& geom, const Jet& w, const Jet& r, const Jet& t);

class Geometry {
 public:
  Geometry(GeometryFamily family, int n, double m, double r_min, double r_max, RadialFn warp,
           RadialFn conformal, RadialFn potential, std::string name);

  GeometryFamily family() const { return family_; }
  int n() const { return n_; }
  double m() const { return m_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  bool pole_mode() const { return r_min_ == 0.0; }
  bool is_static() const;
  const std::string& name() const { return name_; }

  const RadialFn& warp() const { return warp_; }
  const RadialFn& conformal() const { return conformal_; }
  const RadialFn& potential() const { return potential_; }

  /// Checks positivity, pole regularity and the m = n convention on [0, T].
  void validate(double T) const;

  double a(double t) const { return conformal_.value(0.0, t); }
  LocalGeometry local(double r, double t) const;

 private:
  void check_radius(double r) const;

  GeometryFamily family_;
  int n_;
  double m_;
  double r_min_, r_max_;
  RadialFn warp_, conformal_, potential_;
  std::string name_;
};

/// Named presets: euclidean, hyperbolic, sphere, gaussian-weight, conformal-exp(rate),
/// linear-warp(rate). `base` selects the spatial warp/potential for conformal-exp.
Geometry make_preset(const std::string& preset, int n, double m, double r_max,
                     const std::string& base = "euclidean", double r_min = -1.0);

/// psi(r,t) = sum (c_k + d_k t) r^k, phi(r,t) = sum (e_k + f_k t) r^k, a(t) = exp(rate t).
struct GeometryCoefficients {
  std::vector<double> warp, warp_rate, potential, potential_rate;
  double conformal_rate = 0.0;
};
Geometry make_coefficient_geometry(GeometryFamily family, int n, double m, double r_min,
                                   double r_max, const GeometryCoefficients& coeffs);

std::pair<double, double> curvature_eigs(const Geometry& geom, double r, double t);
std::pair<double, double> bakry_emery_eigs(const Geometry& geom, double r, double t);
double drift_coefficient(const Geometry& geom, double r, double t);

struct MetricSpeed {
  double radial = 0, angular = 0, grad_h_norm = 0;
};
MetricSpeed metric_speed_eigs(const Geometry& geom, double r, double t);

/// Radial Ric^m_phi eigenvalue from a LocalGeometry and m.
double bakry_emery_radial(const LocalGeometry& lg, int n, double m);
double bakry_emery_angular(const LocalGeometry& lg);

struct GeometryBounds {
  double k = 0, k_lo = 0, k_hi = 0, k2 = 0, l1 = 0, l2 = 0;
};

/// Q_{R} x [T_lo, T_hi] with radius measured as a(t) r.
struct Cylinder {
  double R = 1.0;
  double T_lo = 0.0;
  double T_hi = 1.0;
  /// Whole computational domain (truncated-global mode) when true; R is ignored.
  bool whole_domain = false;

  bool contains(const Geometry& geom, double r, double t) const;
};

GeometryBounds extract_bounds(const Geometry& geom, const Cylinder& cyl, const Grid& grid);

double geodesic_distance(const Geometry& geom, double r1, double r2, double t);

}  // namespace hlab
