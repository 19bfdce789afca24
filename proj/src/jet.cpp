#include "hlab/jet.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "hlab/errors.hpp"

namespace hlab {
namespace {

struct Tables {
  std::array<std::array<int, 3>, Jet::kSize> exps{};
  std::array<int, Jet::kSize> degree{};
  int index[5][5][5];
  struct Pair {
    int a, b, out;
  };
  std::vector<Pair> pairs;

  Tables() {
    for (auto& plane : index)
      for (auto& row : plane) std::fill(std::begin(row), std::end(row), -1);
    int n = 0;
    for (int deg = 0; deg <= Jet::kOrder; ++deg)
      for (int i = deg; i >= 0; --i)
        for (int j = deg - i; j >= 0; --j) {
          const int k = deg - i - j;
          exps[n] = {i, j, k};
          degree[n] = deg;
          index[i][j][k] = n++;
        }
    for (int a = 0; a < Jet::kSize; ++a)
      for (int b = 0; b < Jet::kSize; ++b) {
        if (degree[a] + degree[b] > Jet::kOrder) continue;
        pairs.push_back({a, b,
                         index[exps[a][0] + exps[b][0]][exps[a][1] + exps[b][1]]
                              [exps[a][2] + exps[b][2]]});
      }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

constexpr double kFactorial[] = {1.0, 1.0, 2.0, 6.0, 24.0};

}  // namespace

Jet Jet::variable(Var var, double value) {
  Jet j(value);
  const int e[3] = {var == kR, var == kT, var == kV};
  j.c_[tables().index[e[0]][e[1]][e[2]]] = 1.0;
  return j;
}

double Jet::d(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i + j + k > valid_)
    throw std::logic_error("Jet::d: derivative order exceeds valid order");
  return c_[tables().index[i][j][k]] * kFactorial[i] * kFactorial[j] * kFactorial[k];
}

Jet Jet::diff(Var var) const {
  if (valid_ == 0) throw std::logic_error("Jet::diff: no valid order left");
  const auto& t = tables();
  Jet out;
  out.valid_ = valid_ - 1;
  for (int n = 0; n < kSize; ++n) {
    if (t.degree[n] >= kOrder) continue;
    auto e = t.exps[n];
    e[var] += 1;
    out.c_[n] = c_[t.index[e[0]][e[1]][e[2]]] * e[var];
  }
  return out;
}

Jet Jet::truncated(int order) const {
  Jet out = *this;
  out.valid_ = std::max(0, std::min(valid_, order));
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  for (int n = 0; n < kSize; ++n) c_[n] += o.c_[n];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (int n = 0; n < kSize; ++n) c_[n] -= o.c_[n];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Jet& Jet::operator/=(double s) {
  for (double& c : c_) c /= s;
  return *this;
}

Jet operator-(Jet a) {
  for (double& c : a.c_) c = -c;
  return a;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out;
  out.valid_ = std::min(a.valid_, b.valid_);
  for (const auto& p : tables().pairs) out.c_[p.out] += a.c_[p.a] * b.c_[p.b];
  return out;
}

Jet compose(const Jet& g, const std::array<double, 5>& f) {
  Jet delta = g;
  delta.c_[0] = 0.0;
  Jet res = delta * (f[4] / 24.0);
  res += f[3] / 6.0;
  res = res * delta;
  res += f[2] / 2.0;
  res = res * delta;
  res += f[1];
  res = res * delta;
  res += f[0];
  res.valid_ = g.valid_;
  return res;
}

Jet substitute(const Jet& f, const Jet& r, const Jet& t, const Jet& v) {
  const auto& tab = tables();
  std::array<Jet, 3> delta = {r, t, v};
  std::array<std::array<Jet, Jet::kOrder + 1>, 3> powers;
  for (int var = 0; var < 3; ++var) {
    delta[var].c_[0] = 0.0;
    powers[var][0] = Jet(1.0);
    for (int k = 1; k <= f.valid_; ++k) powers[var][k] = powers[var][k - 1] * delta[var];
  }
  Jet out;
  for (int n = 0; n < Jet::kSize; ++n) {
    if (tab.degree[n] > f.valid_ || f.c_[n] == 0.0) continue;
    const auto& e = tab.exps[n];
    out += f.c_[n] * (powers[0][e[0]] * powers[1][e[1]] * powers[2][e[2]]);
  }
  out.valid_ = std::min({f.valid_, r.valid_, t.valid_, v.valid_});
  return out;
}

Jet operator/(double s, const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("Jet: division by a jet with zero value");
  const double r = 1.0 / x;
  return compose(a, {s * r, -s * r * r, 2.0 * s * r * r * r, -6.0 * s * r * r * r * r,
                     24.0 * s * r * r * r * r * r});
}

Jet operator/(const Jet& a, const Jet& b) { return a * (1.0 / b); }

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  return compose(x, {e, e, e, e, e});
}

Jet log(const Jet& x) {
  const double v = x.value();
  if (v <= 0.0) throw DomainError("Jet log: non-positive argument");
  const double r = 1.0 / v;
  return compose(x, {std::log(v), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
}

Jet pow(const Jet& x, double e) {
  const double v = x.value();
  if (v <= 0.0) throw DomainError("Jet pow: non-positive base");
  std::array<double, 5> f{};
  double coef = 1.0;
  for (int k = 0; k < 5; ++k) {
    f[k] = coef * std::pow(v, e - k);
    coef *= (e - k);
  }
  return compose(x, f);
}

Jet sqrt(const Jet& x) { return pow(x, 0.5); }

Jet ipow(const Jet& x, int e) {
  if (e < 0) return 1.0 / ipow(x, -e);
  Jet out(1.0);
  for (int k = 0; k < e; ++k) out = out * x;
  return out;
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, {s, c, -s, -c, s});
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  return compose(x, {c, -s, -c, s, c});
}

Jet sinh(const Jet& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, {s, c, s, c, s});
}

Jet cosh(const Jet& x) {
  const double s = std::sinh(x.value()), c = std::cosh(x.value());
  return compose(x, {c, s, c, s, c});
}

}  // namespace hlab
