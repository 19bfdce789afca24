#include "hlab/fields.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "hlab/errors.hpp"

namespace hlab {

Grid::Grid(int nr, int nt, double r_max, double T, double r_min)
    : nr_(nr), nt_(nt), r_min_(r_min), r_max_(r_max), T_(T) {
  if (nr_ < 8 || nt_ < 4) throw ConfigError("grid: need nr >= 8 and nt >= 4");
  if (!(r_max_ > r_min_) || !(r_min_ >= 0.0)) throw ConfigError("grid: need 0 <= r_min < r_max");
  if (!(T_ > 0.0)) throw ConfigError("grid: need T > 0");
}

ScalarField::ScalarField(Grid grid, double fill, Parity parity)
    : grid_(grid), parity_(parity), values_(grid.size(), fill) {}

ScalarField::ScalarField(Grid grid, const std::function<double(double, double)>& f, Parity parity)
    : grid_(grid), parity_(parity), values_(grid.size()) {
  for (int j = 0; j < grid_.nt(); ++j)
    for (int i = 0; i < grid_.nr(); ++i) values_[grid_.index(i, j)] = f(grid_.r(i), grid_.t(j));
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  if (o.grid_ != grid_) throw DomainError("ScalarField: grid mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  if (o.parity_ != parity_) parity_ = Parity::kNone;
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

namespace {

// First and second derivative of a uniformly sampled line at index k.
// `even_start` reflects across index 0.
double line_d1(const double* f, std::ptrdiff_t stride, int k, int count, double h,
               bool even_start) {
  auto at = [&](int q) { return f[q * stride]; };
  if (k == 0) {
    if (even_start) return 0.0;
    return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  }
  if (k == count - 1) return (3.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

double line_d2(const double* f, std::ptrdiff_t stride, int k, int count, double h,
               bool even_start) {
  auto at = [&](int q) { return f[q * stride]; };
  if (k == 0) {
    if (even_start) return 2.0 * (at(1) - at(0)) / (h * h);
    return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
  }
  if (k == count - 1) return (2.0 * at(k) - 5.0 * at(k - 1) + 4.0 * at(k - 2) - at(k - 3)) / (h * h);
  return (at(k + 1) - 2.0 * at(k) + at(k - 1)) / (h * h);
}

}  // namespace

ScalarField diff(const ScalarField& field, Deriv which) {
  const Grid& g = field.grid();
  const bool radial = which != Deriv::kT;
  const int count = radial ? g.nr() : g.nt();
  if (count < (which == Deriv::kRR ? 4 : 3)) throw DomainError("diff: grid too small");
  const bool even_pole = radial && g.r_min() == 0.0 && field.parity() == Parity::kEven;
  ScalarField out(g, 0.0, which == Deriv::kR ? Parity::kNone : field.parity());
  const double* base = field.values().data();
  for (int j = 0; j < g.nt(); ++j)
    for (int i = 0; i < g.nr(); ++i) {
      double val;
      if (which == Deriv::kR) {
        val = line_d1(base + g.index(0, j), 1, i, count, g.dr(), even_pole);
      } else if (which == Deriv::kRR) {
        val = line_d2(base + g.index(0, j), 1, i, count, g.dr(), even_pole);
      } else {
        val = line_d1(base + g.index(i, 0), g.nr(), j, count, g.dt(), false);
      }
      out(i, j) = val;
    }
  return out;
}

GridGeometry::GridGeometry(const Geometry& geom, const Grid& grid)
    : geom_(geom), grid_(grid), nodes_(grid.size()) {
  if (grid.r_min() < geom.r_min() - 1e-12 || grid.r_max() > geom.r_max() * (1 + 1e-12))
    throw DomainError("GridGeometry: grid exceeds geometry domain");
  for (int j = 0; j < grid.nt(); ++j)
    for (int i = 0; i < grid.nr(); ++i) nodes_[grid.index(i, j)] = geom.local(grid.r(i), grid.t(j));
}

double weighted_laplacian_at(const LocalGeometry& lg, int n, double w_r, double w_rr) {
  const double inv_a2 = 1.0 / (lg.a * lg.a);
  if (lg.at_pole) return inv_a2 * (n * w_rr - lg.phi_r * w_r);
  return inv_a2 * (w_rr + lg.drift * w_r);
}

namespace {

void laplacian_slice(const ScalarField& field, const ScalarField& fr, const ScalarField& frr,
                     const GridGeometry& gg, int j, ScalarField& out) {
  const int n = gg.geometry().n();
  for (int i = 0; i < field.grid().nr(); ++i)
    out(i, j) = weighted_laplacian_at(gg.at(i, j), n, fr(i, j), frr(i, j));
}

}  // namespace

ScalarField weighted_laplacian(const ScalarField& field, const GridGeometry& gg) {
  if (field.grid() != gg.grid()) throw DomainError("weighted_laplacian: grid mismatch");
  const ScalarField fr = diff(field, Deriv::kR);
  const ScalarField frr = diff(field, Deriv::kRR);
  ScalarField out(field.grid());
  for (int j = 0; j < field.grid().nt(); ++j) laplacian_slice(field, fr, frr, gg, j, out);
  return out;
}

ScalarField weighted_laplacian(const ScalarField& field, const GridGeometry& gg, int t_index) {
  if (field.grid() != gg.grid()) throw DomainError("weighted_laplacian: grid mismatch");
  if (t_index < 0 || t_index >= field.grid().nt())
    throw DomainError("weighted_laplacian: time index out of range");
  const ScalarField fr = diff(field, Deriv::kR);
  const ScalarField frr = diff(field, Deriv::kRR);
  ScalarField out(field.grid());
  laplacian_slice(field, fr, frr, gg, t_index, out);
  return out;
}

std::vector<std::pair<int, int>> cylinder_nodes(const Grid& grid, const Geometry& geom,
                                                const Cylinder& cyl) {
  std::vector<std::pair<int, int>> nodes;
  for (int j = 0; j < grid.nt(); ++j)
    for (int i = 0; i < grid.nr(); ++i)
      if (cyl.contains(geom, grid.r(i), grid.t(j))) nodes.emplace_back(i, j);
  return nodes;
}

SupResult sup_over_cylinder(const ScalarField& field, const Geometry& geom, const Cylinder& cyl) {
  SupResult best;
  best.value = -std::numeric_limits<double>::infinity();
  const Grid& g = field.grid();
  for (const auto& [i, j] : cylinder_nodes(g, geom, cyl)) {
    if (field(i, j) > best.value) best = {field(i, j), i, j, g.r(i), g.t(j)};
  }
  if (best.i < 0) throw DomainError("sup_over_cylinder: empty intersection");
  return best;
}

double convergence_order(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw DomainError("convergence_order: need at least 3 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto [h, err] = samples[k];
    if (!(err > 0.0) || !(h > 0.0)) throw DomainError("convergence_order: need h > 0, err > 0");
    if (k > 0 && !(h < samples[k - 1].first))
      throw DomainError("convergence_order: h must be strictly decreasing");
    const double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(samples.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_csv(const ScalarField& field, std::ostream& out, const std::string& value_name) {
  const Grid& g = field.grid();
  out << "r,t," << value_name << '\n';
  char buf[96];
  for (int j = 0; j < g.nt(); ++j)
    for (int i = 0; i < g.nr(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.12e\n", g.r(i), g.t(j), field(i, j));
      out << buf;
    }
}

}  // namespace hlab
