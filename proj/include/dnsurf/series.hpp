#ifndef DNSURF_SERIES_HPP
#define DNSURF_SERIES_HPP

// Truncated power series in one variable (y) and two variables (x, y).
// Every series carries the total order K up to which its coefficients are
// exact; binary operations truncate to the smaller order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "dnsurf/detail/fft.hpp"
#include "dnsurf/error.hpp"

namespace dnsurf {

/// sum_{n <= order} c_n y^n.
template <class T>
class UnivariateSeries {
 public:
  UnivariateSeries() = default;
  explicit UnivariateSeries(int order, T fill = T(0)) : c_(static_cast<std::size_t>(order + 1), fill) {
    if (order < 0) throw error(errc::precondition, "series order must be non-negative");
  }
  explicit UnivariateSeries(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(T(0));
  }

  int order() const noexcept { return static_cast<int>(c_.size()) - 1; }
  T& operator[](int n) { return c_[static_cast<std::size_t>(n)]; }
  const T& operator[](int n) const { return c_[static_cast<std::size_t>(n)]; }
  const std::vector<T>& coeffs() const noexcept { return c_; }

  UnivariateSeries truncated(int k) const {
    UnivariateSeries r(std::min(k, order()));
    for (int n = 0; n <= r.order(); ++n) r[n] = c_[static_cast<std::size_t>(n)];
    return r;
  }

  friend UnivariateSeries operator+(const UnivariateSeries& a, const UnivariateSeries& b) {
    UnivariateSeries r(std::min(a.order(), b.order()));
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n] + b[n];
    return r;
  }
  friend UnivariateSeries operator-(const UnivariateSeries& a, const UnivariateSeries& b) {
    UnivariateSeries r(std::min(a.order(), b.order()));
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n] - b[n];
    return r;
  }
  friend UnivariateSeries operator-(const UnivariateSeries& a) {
    UnivariateSeries r(a.order());
    for (int n = 0; n <= r.order(); ++n) r[n] = -a[n];
    return r;
  }
  friend UnivariateSeries operator*(const UnivariateSeries& a, const UnivariateSeries& b) {
    UnivariateSeries r(std::min(a.order(), b.order()));
    for (int i = 0; i <= r.order(); ++i)
      for (int j = 0; i + j <= r.order(); ++j) r[i + j] += a[i] * b[j];
    return r;
  }
  friend UnivariateSeries operator*(const UnivariateSeries& a, T s) {
    UnivariateSeries r(a.order());
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n] * s;
    return r;
  }
  friend UnivariateSeries operator*(T s, const UnivariateSeries& a) { return a * s; }

  UnivariateSeries derivative() const {
    if (order() == 0) return UnivariateSeries(0);
    UnivariateSeries r(order() - 1);
    for (int n = 0; n <= r.order(); ++n) r[n] = static_cast<double>(n + 1) * c_[static_cast<std::size_t>(n + 1)];
    return r;
  }
  /// Antiderivative vanishing at 0; exact to one more order.
  UnivariateSeries integral() const {
    UnivariateSeries r(order() + 1);
    for (int n = 1; n <= r.order(); ++n) r[n] = c_[static_cast<std::size_t>(n - 1)] / static_cast<double>(n);
    return r;
  }
  /// 1 / a for a unit (nonzero constant term).
  UnivariateSeries reciprocal() const {
    if (c_[0] == T(0)) throw error(errc::precondition, "reciprocal of a non-unit series");
    UnivariateSeries r(order());
    r[0] = T(1) / c_[0];
    for (int n = 1; n <= order(); ++n) {
      T acc = T(0);
      for (int k = 1; k <= n; ++k) acc += c_[static_cast<std::size_t>(k)] * r[n - k];
      r[n] = -acc / c_[0];
    }
    return r;
  }
  /// exp of the series via e' = a' e.
  UnivariateSeries exp() const {
    UnivariateSeries r(order());
    r[0] = std::exp(c_[0]);
    const auto d = derivative();
    for (int n = 1; n <= order(); ++n) {
      T acc = T(0);
      for (int k = 0; k < n; ++k) acc += d[k] * r[n - 1 - k];
      r[n] = acc / static_cast<double>(n);
    }
    return r;
  }
  T operator()(T y) const {
    T acc = T(0);
    for (int n = order(); n >= 0; --n) acc = acc * y + c_[static_cast<std::size_t>(n)];
    return acc;
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::vector<T> c_;
};

/// sum_{i + j <= order} c_{ij} x^i y^j.
template <class T>
class BivariateSeries {
 public:
  BivariateSeries() : BivariateSeries(0) {}
  explicit BivariateSeries(int order) : K_(order), c_(count(order), T(0)) {
    if (order < 0) throw error(errc::precondition, "series order must be non-negative");
  }

  static BivariateSeries constant(int order, T v) {
    BivariateSeries s(order);
    s.at(0, 0) = v;
    return s;
  }
  static BivariateSeries x(int order) {
    BivariateSeries s(order);
    if (order >= 1) s.at(1, 0) = T(1);
    return s;
  }
  static BivariateSeries y(int order) {
    BivariateSeries s(order);
    if (order >= 1) s.at(0, 1) = T(1);
    return s;
  }
  /// u(y) viewed as a function of (x, y).
  static BivariateSeries lift_y(const UnivariateSeries<T>& u, int order) {
    BivariateSeries s(std::min(order, u.order()));
    for (int j = 0; j <= s.K_; ++j) s.at(0, j) = u[j];
    return s;
  }
  /// x * u(y), exact to order u.order() + 1.
  static BivariateSeries x_times(const UnivariateSeries<T>& u, int order) {
    BivariateSeries s(std::min(order, u.order() + 1));
    for (int j = 0; j + 1 <= s.K_; ++j) s.at(1, j) = u[j];
    return s;
  }

  int order() const noexcept { return K_; }
  T& at(int i, int j) { return c_[index(i, j)]; }
  const T& at(int i, int j) const { return c_[index(i, j)]; }
  /// Coefficient or zero when (i, j) lies beyond the order.
  T get(int i, int j) const { return (i >= 0 && j >= 0 && i + j <= K_) ? c_[index(i, j)] : T(0); }

  BivariateSeries truncated(int k) const {
    BivariateSeries r(std::min(k, K_));
    for (int d = 0; d <= r.K_; ++d)
      for (int i = 0; i <= d; ++i) r.at(i, d - i) = at(i, d - i);
    return r;
  }

  friend BivariateSeries operator+(const BivariateSeries& a, const BivariateSeries& b) {
    BivariateSeries r(std::min(a.K_, b.K_));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend BivariateSeries operator-(const BivariateSeries& a, const BivariateSeries& b) {
    BivariateSeries r(std::min(a.K_, b.K_));
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend BivariateSeries operator-(const BivariateSeries& a) {
    BivariateSeries r(a.K_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = -a.c_[k];
    return r;
  }
  friend BivariateSeries operator*(const BivariateSeries& a, T s) {
    BivariateSeries r(a.K_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] * s;
    return r;
  }
  friend BivariateSeries operator*(T s, const BivariateSeries& a) { return a * s; }
  friend BivariateSeries operator*(const BivariateSeries& a, double s) { return a * T(s); }
  friend BivariateSeries operator*(double s, const BivariateSeries& a) { return a * T(s); }
  friend BivariateSeries operator+(const BivariateSeries& a, T s) {
    BivariateSeries r = a;
    r.at(0, 0) += s;
    return r;
  }
  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
    const int K = std::min(a.K_, b.K_);
    BivariateSeries r(K);
    for (int d1 = 0; d1 <= K; ++d1) {
      for (int i1 = 0; i1 <= d1; ++i1) {
        const T av = a.at(i1, d1 - i1);
        if (av == T(0)) continue;
        for (int d2 = 0; d1 + d2 <= K; ++d2)
          for (int i2 = 0; i2 <= d2; ++i2) r.at(i1 + i2, d1 - i1 + d2 - i2) += av * b.at(i2, d2 - i2);
      }
    }
    return r;
  }

  BivariateSeries dx() const {
    BivariateSeries r(std::max(0, K_ - 1));
    if (K_ == 0) return r;
    for (int d = 0; d <= r.K_; ++d)
      for (int i = 0; i <= d; ++i) r.at(i, d - i) = static_cast<double>(i + 1) * at(i + 1, d - i);
    return r;
  }
  BivariateSeries dy() const {
    BivariateSeries r(std::max(0, K_ - 1));
    if (K_ == 0) return r;
    for (int d = 0; d <= r.K_; ++d)
      for (int i = 0; i <= d; ++i) r.at(i, d - i) = static_cast<double>(d - i + 1) * at(i, d - i + 1);
    return r;
  }
  /// int_0^x, vanishing on x = 0; exact to one more order.
  BivariateSeries integrate_x() const {
    BivariateSeries r(K_ + 1);
    for (int d = 0; d <= K_; ++d)
      for (int i = 0; i <= d; ++i) r.at(i + 1, d - i) = at(i, d - i) / static_cast<double>(i + 1);
    return r;
  }
  /// int_0^y, vanishing on y = 0; exact to one more order.
  BivariateSeries integrate_y() const {
    BivariateSeries r(K_ + 1);
    for (int d = 0; d <= K_; ++d)
      for (int i = 0; i <= d; ++i) r.at(i, d - i + 1) = at(i, d - i) / static_cast<double>(d - i + 1);
    return r;
  }

  /// 1 / a for a unit.
  BivariateSeries reciprocal() const {
    const T a0 = at(0, 0);
    if (a0 == T(0)) throw error(errc::precondition, "reciprocal of a non-unit series");
    BivariateSeries r(K_);
    r.at(0, 0) = T(1) / a0;
    for (int d = 1; d <= K_; ++d) {
      for (int i = 0; i <= d; ++i) {
        const int j = d - i;
        T acc = T(0);
        for (int k = 0; k <= i; ++k)
          for (int l = 0; l <= j; ++l)
            if (k + l > 0) acc += at(k, l) * r.at(i - k, j - l);
        r.at(i, j) = -acc / a0;
      }
    }
    return r;
  }
  /// exp via the nilpotent part: e^{a00} sum_n (a - a00)^n / n!.
  BivariateSeries exp() const {
    BivariateSeries nil = *this;
    nil.at(0, 0) = T(0);
    BivariateSeries term = constant(K_, T(1));
    BivariateSeries acc = term;
    for (int n = 1; n <= K_; ++n) {
      term = term * nil * T(1.0 / n);
      acc = acc + term;
    }
    return acc * std::exp(at(0, 0));
  }
  /// Square root of a unit with the principal root of the constant term.
  BivariateSeries sqrt() const {
    const T a0 = at(0, 0);
    if (a0 == T(0)) throw error(errc::precondition, "square root of a non-unit series");
    BivariateSeries s = constant(K_, std::sqrt(a0));
    for (int it = 0; (1 << it) <= 2 * (K_ + 1); ++it) s = (s + (*this) * s.reciprocal()) * T(0.5);
    return s;
  }
  BivariateSeries pow(int n) const {
    if (n < 0) return reciprocal().pow(-n);
    BivariateSeries r = constant(K_, T(1));
    BivariateSeries b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  /// Coefficient of x^i as a series in y.
  UnivariateSeries<T> x_coefficient(int i) const {
    if (i > K_) return UnivariateSeries<T>(0);
    UnivariateSeries<T> u(K_ - i);
    for (int j = 0; j <= K_ - i; ++j) u[j] = at(i, j);
    return u;
  }

  T operator()(T xv, T yv) const {
    T acc = T(0);
    for (int i = K_; i >= 0; --i) {
      T row = T(0);
      for (int j = K_ - i; j >= 0; --j) row = row * yv + at(i, j);
      acc = acc * xv + row;
    }
    return acc;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }
  /// max |c_ij| over i + j <= k.
  double max_abs_to(int k) const {
    double m = 0.0;
    for (int d = 0; d <= std::min(k, K_); ++d)
      for (int i = 0; i <= d; ++i) m = std::max(m, std::abs(at(i, d - i)));
    return m;
  }
  /// True when no coefficient with i >= 2 exceeds tol.
  bool affine_in_x(double tol) const {
    for (int d = 2; d <= K_; ++d)
      for (int i = 2; i <= d; ++i)
        if (std::abs(at(i, d - i)) > tol) return false;
    return true;
  }

 private:
  static std::size_t count(int K) { return static_cast<std::size_t>((K + 1) * (K + 2) / 2); }
  std::size_t index(int i, int j) const {
    const int d = i + j;
    return static_cast<std::size_t>(d * (d + 1) / 2 + j);
  }

  int K_;
  std::vector<T> c_;
};

using Series1 = UnivariateSeries<std::complex<double>>;
using Series2 = BivariateSeries<std::complex<double>>;

/// p(u) for a polynomial with coefficients c (low to high), by Horner.
template <class T>
BivariateSeries<T> compose_polynomial(const std::vector<T>& c, const BivariateSeries<T>& u) {
  BivariateSeries<T> acc(u.order());
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * u + c[k];
  return acc;
}

/// Root of sum_k P_k(x, y) z^k = 0 near z0 as a series, by Newton iteration.
inline Series2 series_root(const std::vector<Series2>& poly, std::complex<double> z0, int order) {
  Series2 z = Series2::constant(order, z0);
  auto eval = [&](const Series2& zz, bool deriv) {
    Series2 acc(order);
    for (std::size_t k = poly.size(); k-- > 0;) {
      if (deriv && k == 0) break;
      const Series2 coef = deriv ? poly[k] * static_cast<double>(k) : poly[k];
      acc = acc * zz + coef.truncated(order);
    }
    return acc;
  };
  for (int it = 0; (1 << it) <= 2 * (order + 1); ++it) z = z - eval(z, false) * eval(z, true).reciprocal();
  return z;
}

/// Taylor coefficients of f at (x0, y0) from samples on the torus
/// |x - x0| = rx, |y - y0| = ry (M x M points).
inline Series2 taylor_from_function(const std::function<std::complex<double>(std::complex<double>, std::complex<double>)>& f,
                                    std::complex<double> x0, std::complex<double> y0, double rx, double ry, int order,
                                    int M = 64) {
  using cplx = std::complex<double>;
  if (M < 2 * (order + 1)) throw error(errc::precondition, "torus grid too coarse for the requested order");
  const double tp = 2.0 * std::acos(-1.0);
  std::vector<std::vector<cplx>> g(static_cast<std::size_t>(M), std::vector<cplx>(static_cast<std::size_t>(M)));
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      g[a][b] = f(x0 + std::polar(rx, tp * a / M), y0 + std::polar(ry, tp * b / M));
  for (auto& row : g) row = detail::forward(row);
  Series2 s(order);
  for (int j = 0; j <= order; ++j) {
    std::vector<cplx> col(static_cast<std::size_t>(M));
    for (int a = 0; a < M; ++a) col[a] = g[a][j];
    col = detail::forward(col);
    for (int i = 0; i + j <= order; ++i) s.at(i, j) = col[i] / (std::pow(rx, i) * std::pow(ry, j));
  }
  return s;
}

}  // namespace dnsurf

#endif
