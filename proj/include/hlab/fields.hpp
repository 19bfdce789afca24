#pragma once

/// @file
/// @brief Grid functions, stencils, cylinder suprema and convergence orders.

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hlab/geometry.hpp"
#include "hlab/grid.hpp"

namespace hlab {

/// Parity of a radial field under r -> -r; even fields use the reflected stencil at the pole.
enum class Parity { kNone, kEven };

class ScalarField {
 public:
  explicit ScalarField(Grid grid, double fill = 0.0, Parity parity = Parity::kNone);
  ScalarField(Grid grid, const std::function<double(double, double)>& f,
              Parity parity = Parity::kNone);

  const Grid& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  Parity parity_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

enum class Deriv { kR, kRR, kT };

/// Second-order stencils: centered inside, one-sided at boundaries, reflected at an even pole.
ScalarField diff(const ScalarField& field, Deriv which);

/// Geometry sampled at every grid node.
class GridGeometry {
 public:
  GridGeometry(const Geometry& geom, const Grid& grid);

  const Geometry& geometry() const { return geom_; }
  const Grid& grid() const { return grid_; }
  const LocalGeometry& at(int i, int j) const { return nodes_[grid_.index(i, j)]; }

 private:
  Geometry geom_;
  Grid grid_;
  std::vector<LocalGeometry> nodes_;
};

/// a^{-2}(w_rr + D w_r); at the pole a^{-2}(n w_rr - phi_r w_r).
double weighted_laplacian_at(const LocalGeometry& lg, int n, double w_r, double w_rr);

ScalarField weighted_laplacian(const ScalarField& field, const GridGeometry& gg);
/// Single time slice t_index; other slices of the returned field are zero.
ScalarField weighted_laplacian(const ScalarField& field, const GridGeometry& gg, int t_index);

struct SupResult {
  double value = 0;
  int i = -1, j = -1;
  double r = 0, t = 0;
};

/// Grid nodes belonging to the cylinder, in (j, i) lexicographic order.
std::vector<std::pair<int, int>> cylinder_nodes(const Grid& grid, const Geometry& geom,
                                                const Cylinder& cyl);

SupResult sup_over_cylinder(const ScalarField& field, const Geometry& geom, const Cylinder& cyl);

/// Least-squares slope of log(err) against log(h).
double convergence_order(const std::vector<std::pair<double, double>>& samples);

/// Columns r, t, value.
void write_csv(const ScalarField& field, std::ostream& out, const std::string& value_name = "value");

}  // namespace hlab
