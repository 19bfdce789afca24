#include "hlab/pme_solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

Jet power_sum_jet(const PowerSumCoefficients& c, const Jet& v) {
  Jet out(0.0);
  for (std::size_t k = 0; k < c.A.size(); ++k) out += c.A[k] * pow(v, c.a[k]);
  for (std::size_t k = 0; k < c.B.size(); ++k) out += c.B[k] * pow(v, c.b[k]);
  return out;
}

double power_sum_value(const PowerSumCoefficients& c, double v) {
  double out = 0.0;
  for (std::size_t k = 0; k < c.A.size(); ++k) out += c.A[k] * std::pow(v, c.a[k]);
  for (std::size_t k = 0; k < c.B.size(); ++k) out += c.B[k] * std::pow(v, c.b[k]);
  return out;
}

// Expansion of f(r, t) at (r0, t0) in fresh identity variables.
template <class F>
Jet fresh_expansion(F f, double r0, double t0) {
  return f(Jet::variable(Jet::kR, r0), Jet::variable(Jet::kT, t0));
}

// Pole value of a^{-2}(n w_rr - phi_r w_r) for w given as a fresh expansion at r = 0.
double pole_laplacian(const Geometry& geom, const Jet& w, double t) {
  const LocalGeometry lg = geom.local(0.0, t);
  return weighted_laplacian_at(lg, geom.n(), w.d(1), w.d(2));
}

}  // namespace

Nonlinearity Nonlinearity::zero() {
  Nonlinearity g;
  g.form_ = Form::kZero;
  g.value_ = [](double, double, double) { return 0.0; };
  g.jet_ = [](const Jet&, const Jet&, const Jet&) { return Jet(0.0); };
  return g;
}

Nonlinearity Nonlinearity::power_sum(PowerSumCoefficients c) {
  if (c.A.size() != c.a.size() || c.B.size() != c.b.size())
    throw ConfigError("power-sum: coefficient and exponent lists differ in length");
  for (double A : c.A)
    if (A < 0.0) throw ConfigError("power-sum: coefficients A_j must be >= 0");
  for (double B : c.B)
    if (B > 0.0) throw ConfigError("power-sum: coefficients B_j must be <= 0");
  Nonlinearity g;
  g.form_ = Form::kPowerSum;
  g.coeffs_ = c;
  g.value_ = [c](double, double, double v) { return power_sum_value(c, v); };
  g.jet_ = [c](const Jet&, const Jet&, const Jet& v) { return power_sum_jet(c, v); };
  return g;
}

Nonlinearity Nonlinearity::separable_x(double c0, double c1, double kappa, double q) {
  Nonlinearity g;
  g.form_ = Form::kSeparableX;
  g.x_independent_ = kappa == 0.0;
  g.value_ = [=](double t, double r, double v) {
    return c0 * (1.0 + c1 * t) * std::exp(-kappa * r * r) * std::pow(v, q);
  };
  g.jet_ = [=](const Jet& t, const Jet& r, const Jet& v) {
    return c0 * (1.0 + c1 * t) * exp(-kappa * r * r) * pow(v, q);
  };
  return g;
}

Nonlinearity Nonlinearity::manufactured(RadialFn source) {
  Nonlinearity g;
  g.form_ = Form::kManufactured;
  g.x_independent_ = false;
  g.value_ = [source](double t, double r, double) { return source.value(r, t); };
  g.jet_ = [source](const Jet& t, const Jet& r, const Jet&) { return source.jet(r, t); };
  return g;
}

Nonlinearity Nonlinearity::from_source(SourceFn source, double p) {
  if (!(p > 1.0)) throw ConfigError("nonlinearity: p must be > 1");
  Nonlinearity g;
  g.form_ = Form::kFromSource;
  g.x_independent_ = false;
  g.jet_ = [source, p](const Jet& t, const Jet& r, const Jet& v) {
    const Jet base = (p - 1.0) / p * v;
    return p * pow(base, (p - 2.0) / (p - 1.0)) * source(t, r, pow(base, 1.0 / (p - 1.0)));
  };
  auto jet = g.jet_;
  g.value_ = [jet](double t, double r, double v) { return jet(Jet(t), Jet(r), Jet(v)).value(); };
  return g;
}

NonlinearityPartials partials(const Nonlinearity& g, double t, double r, double v) {
  if (g.form() == Nonlinearity::Form::kZero) return {};
  const Jet val = g.evaluate(Jet(t), Jet::variable(Jet::kR, r), Jet::variable(Jet::kV, v));
  if (val.valid_order() < 2 && r == 0.0) {
    // Pole: fourth-order extrapolation of the even expansion from r = h, 2h.
    constexpr double kH = 1e-3;
    const NonlinearityPartials a = partials(g, t, kH, v), b = partials(g, t, 2.0 * kH, v);
    auto ex = [](double x1, double x2) { return (4.0 * x1 - x2) / 3.0; };
    NonlinearityPartials out;
    out.G = ex(a.G, b.G);
    out.G_v = ex(a.G_v, b.G_v);
    out.G_vv = ex(a.G_vv, b.G_vv);
    out.G_rr = ex(a.G_rr, b.G_rr);
    return out;
  }
  NonlinearityPartials out;
  out.G = val.value();
  out.G_v = val.d(0, 0, 1);
  out.G_vv = val.d(0, 0, 2);
  if (val.valid_order() >= 2) {
    out.G_r = val.d(1, 0, 0);
    out.G_rv = val.d(1, 0, 1);
    out.G_rr = val.d(2, 0, 0);
  }
  return out;
}

double pressure_from_density(double u, double p) {
  if (!(u > 0.0)) throw DomainError("pressure transform: density must be positive");
  return p * std::pow(u, p - 1.0) / (p - 1.0);
}

double density_from_pressure(double v, double p) {
  if (!(v > 0.0)) throw DomainError("pressure transform: pressure must be positive");
  return std::pow((p - 1.0) * v / p, 1.0 / (p - 1.0));
}

ScalarField pressure_transform(const ScalarField& u, double p) {
  ScalarField v(u.grid(), 0.0, u.parity());
  for (std::size_t k = 0; k < u.values().size(); ++k)
    v.values()[k] = pressure_from_density(u.values()[k], p);
  return v;
}

ScalarField density_transform(const ScalarField& v, double p) {
  ScalarField u(v.grid(), 0.0, v.parity());
  for (std::size_t k = 0; k < v.values().size(); ++k)
    u.values()[k] = density_from_pressure(v.values()[k], p);
  return u;
}

double rescale_nonlinearity(const SourceFn& source, double p, double t, double r, double v) {
  if (!(v > 0.0)) throw DomainError("rescale_nonlinearity: v must be positive");
  const double base = (p - 1.0) * v / p;
  return p * std::pow(base, (p - 2.0) / (p - 1.0)) *
         source(Jet(t), Jet(r), Jet(std::pow(base, 1.0 / (p - 1.0)))).value();
}

RadialOperator build_operator(const Geometry& geom, const Grid& grid, double t) {
  // Four-point Gauss-Legendre nodes and weights on [-1, 1].
  static constexpr double kNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
  static constexpr double kWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                         0.6521451548625461, 0.3478548451374538};
  const int n = geom.n();
  auto weight = [&](double r) {
    if (r == 0.0 && geom.pole_mode()) return 0.0;
    return std::pow(geom.warp()(r, t), n - 1) * std::exp(-geom.potential()(r, t));
  };
  auto integrate = [&](double lo, double hi) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += kWeights[q] * weight(0.5 * (lo + hi) + 0.5 * (hi - lo) * kNodes[q]);
    return 0.5 * (hi - lo) * s;
  };
  RadialOperator op;
  const int nr = grid.nr();
  const double dr = grid.dr();
  op.volume.resize(nr);
  op.face.resize(nr - 1);
  for (int i = 0; i < nr; ++i) {
    const double r = grid.r(i);
    const double lo = std::max(grid.r_min(), r - 0.5 * dr);
    const double hi = std::min(grid.r_max(), r + 0.5 * dr);
    op.volume[i] = integrate(lo, r) + integrate(r, hi);
  }
  for (int i = 0; i + 1 < nr; ++i) op.face[i] = weight(grid.r(i) + 0.5 * dr);
  const double a = geom.a(t);
  op.inv_a2 = 1.0 / (a * a);
  op.a_pow_n = std::pow(a, n);
  return op;
}

long step(std::vector<double>& u, const Geometry& geom, const Grid& grid, const PdeParams& params,
          double t, double dt, const RadialOperator* op_in) {
  const int nr = grid.nr();
  if (static_cast<int>(u.size()) != nr) throw DomainError("step: state size mismatch");
  RadialOperator local_op;
  if (op_in == nullptr) local_op = build_operator(geom, grid, t + dt);
  const RadialOperator& op = op_in ? *op_in : local_op;
  const double p = params.p;
  const double dr = grid.dr();

  std::vector<double> coef(nr), lower(nr, 0.0), diag(nr), upper(nr, 0.0), rhs(nr);
  for (int i = 0; i < nr; ++i) {
    if (!(u[i] >= params.floor) || !std::isfinite(u[i]))
      throw NumericalError("step: state below positivity floor or non-finite");
    coef[i] = p * std::pow(u[i], p - 1.0);
  }
  const bool zero_source = params.nonlinearity.form() == Nonlinearity::Form::kZero;
  for (int i = 0; i < nr; ++i) {
    double source = 0.0;
    if (!zero_source) {
      const double v = pressure_from_density(u[i], p);
      source = params.nonlinearity.value(t, grid.r(i), v) / (p * std::pow(u[i], p - 2.0));
    }
    rhs[i] = op.volume[i] * (u[i] + dt * source);
    diag[i] = op.volume[i];
    if (i + 1 < nr) {
      const double c = dt * op.inv_a2 * op.face[i] * 0.5 * (coef[i] + coef[i + 1]) / dr;
      diag[i] += c;
      upper[i] = -c;
      lower[i + 1] = -c;
    }
  }
  for (int i = 1; i < nr; ++i) diag[i] -= lower[i];
  if (params.outer == OuterBoundary::kDirichlet) {
    if (!params.dirichlet) throw ConfigError("step: Dirichlet boundary without boundary data");
    lower[nr - 1] = 0.0;
    diag[nr - 1] = 1.0;
    rhs[nr - 1] = params.dirichlet(t + dt);
  }

  // Thomas algorithm.
  for (int i = 1; i < nr; ++i) {
    if (!(std::abs(diag[i - 1]) > 0.0)) throw NumericalError("step: zero pivot in linear solve");
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (!(std::abs(diag[nr - 1]) > 0.0)) throw NumericalError("step: zero pivot in linear solve");
  u[nr - 1] = rhs[nr - 1] / diag[nr - 1];
  for (int i = nr - 2; i >= 0; --i) u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];

  long clamps = 0;
  for (double& x : u) {
    if (!std::isfinite(x)) throw NumericalError("step: non-finite value after linear solve");
    if (x < params.floor) {
      x = params.floor;
      ++clamps;
    }
  }
  return clamps;
}

SolutionField solve(const std::function<double(double r)>& initial, const Geometry& geom,
                    const PdeParams& params, const Grid& grid) {
  if (!(params.p > 1.0)) throw ConfigError("solve: p must be > 1");
  if (!(params.floor > 0.0)) throw ConfigError("solve: floor must be > 0");
  if (params.substeps < 1) throw ConfigError("solve: substeps must be >= 1");
  const int nr = grid.nr();
  std::vector<double> u(nr);
  for (int i = 0; i < nr; ++i) {
    u[i] = initial(grid.r(i));
    if (!(u[i] >= params.floor) || !std::isfinite(u[i]))
      throw DomainError("solve: initial data must be finite and >= floor");
  }

  SolutionField sol{ScalarField(grid, 0.0, Parity::kEven), ScalarField(grid, 0.0, Parity::kEven), {}};
  bool frozen_weights = geom.family() != GeometryFamily::kEvolvingWarp;
  for (int k = 0; k <= 4 && frozen_weights; ++k) {
    const double r = grid.r_min() + 0.25 * k * (grid.r_max() - grid.r_min());
    const Jet phi = geom.potential()(Jet(r), Jet::variable(Jet::kT, 0.5 * grid.T()));
    frozen_weights = phi.d(0, 1) == 0.0;
  }
  RadialOperator op = build_operator(geom, grid, 0.0);
  auto record = [&](int j, const RadialOperator& o) {
    double mass = 0.0;
    for (int i = 0; i < nr; ++i) {
      sol.u(i, j) = u[i];
      sol.v(i, j) = pressure_from_density(u[i], params.p);
      mass += o.volume[i] * u[i];
    }
    sol.stats.mass.push_back(mass * o.a_pow_n);
  };
  record(0, op);
  const double dt = grid.dt() / params.substeps;
  for (int j = 1; j < grid.nt(); ++j) {
    for (int s = 0; s < params.substeps; ++s) {
      const double t = grid.t(j - 1) + s * dt;
      if (frozen_weights) {
        const double a = geom.a(t + dt);
        op.inv_a2 = 1.0 / (a * a);
        op.a_pow_n = std::pow(a, geom.n());
      } else {
        op = build_operator(geom, grid, t + dt);
      }
      sol.stats.clamp_events += step(u, geom, grid, params, t, dt, &op);
      sol.stats.updates += nr;
    }
    record(j, op);
  }
  return sol;
}

double barenblatt_exponent(int n, double p) { return 1.0 / (n * (p - 1.0) + 2.0); }

double barenblatt_oracle(int n, double p, double C, double r, double t) {
  if (!(t > 0.0)) throw DomainError("barenblatt_oracle: t must be positive");
  const double beta = barenblatt_exponent(n, p);
  const double k = (p - 1.0) * beta / (2.0 * p);
  const double inner = C - k * r * r * std::pow(t, -2.0 * beta);
  if (inner <= 0.0) return 0.0;
  return std::pow(t, -n * beta) * std::pow(inner, 1.0 / (p - 1.0));
}

RadialFn barenblatt_pressure(int n, double p, double C, double shift) {
  const double beta = barenblatt_exponent(n, p);
  const double k = (p - 1.0) * beta / (2.0 * p);
  const double e = -n * beta * (p - 1.0);
  return make_radial_fn([=](auto r, auto t) {
    using std::pow;
    const auto s = t + shift;
    return p / (p - 1.0) * (C * pow(s, e) - k * r * r / s);
  });
}

namespace {

// Value of v_t - (p-1) v Lap v - |grad v|^2 as a fresh expansion at (r0, t0).
Jet pressure_forcing_at(const RadialFn& v_exact, const Geometry& geom, double p, double r0,
                        double t0) {
  const Jet rj = Jet::variable(Jet::kR, r0), tj = Jet::variable(Jet::kT, t0);
  const Jet v = v_exact(rj, tj);
  const Jet v_r = v.diff(Jet::kR);
  const Jet v_t = v.diff(Jet::kT);
  if (geom.pole_mode() && r0 == 0.0) {
    const double a = geom.a(t0);
    const double lap = pole_laplacian(geom, v, t0);
    return Jet(v_t.value() - (p - 1.0) * v.value() * lap - v_r.value() * v_r.value() / (a * a))
        .truncated(0);
  }
  const GeometryJets gj = geometry_jets(geom, rj, tj);
  const Jet inv_a2 = 1.0 / (gj.a * gj.a);
  return v_t - (p - 1.0) * v * weighted_laplacian_jet(geom, v, rj, tj) - v_r * v_r * inv_a2;
}

Jet density_source_at(const RadialFn& v_exact, const Geometry& geom, double p, double r0,
                      double t0) {
  const Jet rj = Jet::variable(Jet::kR, r0), tj = Jet::variable(Jet::kT, t0);
  const Jet u = pow((p - 1.0) / p * v_exact(rj, tj), 1.0 / (p - 1.0));
  const Jet up = pow(u, p);
  if (geom.pole_mode() && r0 == 0.0)
    return Jet(u.d(0, 1) - pole_laplacian(geom, up, t0)).truncated(0);
  return u.diff(Jet::kT) - weighted_laplacian_jet(geom, up, rj, tj);
}

}  // namespace

Nonlinearity manufactured_forcing(const RadialFn& v_exact, const Geometry& geom, double p) {
  RadialFn source{
      [=](double r, double t) { return pressure_forcing_at(v_exact, geom, p, r, t).value(); },
      [=](const Jet& r, const Jet& t) {
        const Jet f = pressure_forcing_at(v_exact, geom, p, r.value(), t.value());
        return substitute(f, r, t, Jet(0.0));
      }};
  return Nonlinearity::manufactured(source);
}

SourceFn density_source(const RadialFn& v_exact, const Geometry& geom, double p) {
  return [=](const Jet& t, const Jet& r, const Jet&) {
    const Jet f = density_source_at(v_exact, geom, p, r.value(), t.value());
    return substitute(f, r, t, Jet(0.0));
  };
}

}  // namespace hlab
