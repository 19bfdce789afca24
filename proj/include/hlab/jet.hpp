#pragma once

/// @file
/// @brief Truncated Taylor expansions in (r, t, v) used as exact derivative tables.

#include <array>
#include <cmath>

namespace hlab {

/// Taylor polynomial of total degree <= 4 in the variables r, t, v.
///
/// Coefficient of r^i t^j v^k is f_{r^i t^j v^k}(x0) / (i! j! k!).
/// Differentiation lowers the valid degree by one; reading a derivative
/// above the valid degree throws std::logic_error.
class Jet {
 public:
  static constexpr int kOrder = 4;
  static constexpr int kSize = 35;
  enum Var : int { kR = 0, kT = 1, kV = 2 };

  Jet() = default;
  Jet(double c) { c_[0] = c; }  // NOLINT(google-explicit-constructor)

  static Jet variable(Var var, double value);

  double value() const { return c_[0]; }
  /// Partial derivative d^{i+j+k} / dr^i dt^j dv^k at the expansion point.
  double d(int i, int j = 0, int k = 0) const;
  Jet diff(Var var) const;
  int valid_order() const { return valid_; }
  /// Copy whose derivatives above `order` are marked unavailable.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);
  Jet& operator/=(double s);

  friend Jet operator-(Jet a);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a);

  /// f(g) from the value and first four derivatives of f at g.value().
  friend Jet compose(const Jet& g, const std::array<double, 5>& f_derivs);
  /// f(r, t, v) where f is expanded at (r.value(), t.value(), v.value()).
  friend Jet substitute(const Jet& f, const Jet& r, const Jet& t, const Jet& v);

 private:
  std::array<double, kSize> c_{};
  int valid_ = kOrder;
};

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet pow(const Jet& x, double e);
Jet ipow(const Jet& x, int e);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet sinh(const Jet& x);
Jet cosh(const Jet& x);

}  // namespace hlab
