#pragma once

#include <cstddef>

namespace hlab {

/// Uniform space-time grid r_i = r_min + i dr, t_j = j dt.
class Grid {
 public:
  Grid(int nr, int nt, double r_max, double T, double r_min = 0.0);

  int nr() const { return nr_; }
  int nt() const { return nt_; }
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double T() const { return T_; }
  double dr() const { return (r_max_ - r_min_) / (nr_ - 1); }
  double dt() const { return T_ / (nt_ - 1); }
  double r(int i) const { return i == nr_ - 1 ? r_max_ : r_min_ + i * dr(); }
  double t(int j) const { return j == nt_ - 1 ? T_ : j * dt(); }
  std::size_t size() const { return static_cast<std::size_t>(nr_) * nt_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nr_ + i; }

  bool operator==(const Grid& o) const {
    return nr_ == o.nr_ && nt_ == o.nt_ && r_min_ == o.r_min_ && r_max_ == o.r_max_ &&
           T_ == o.T_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int nr_, nt_;
  double r_min_, r_max_, T_;
};

}  // namespace hlab
