#ifndef DNSURF_CURVE_HPP
#define DNSURF_CURVE_HPP

// Periodic samples on uniform grids, spectral calculus, closed-curve
// integration and winding numbers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dnsurf/detail/fft.hpp"
#include "dnsurf/error.hpp"

namespace dnsurf {

using cplx = std::complex<double>;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Throws invalid_grid unless n is even and at least 16.
inline void validate_grid(std::size_t n) {
  if (n < 16 || n % 2 != 0)
    throw error(errc::invalid_grid,
                "grid size must be even and >= 16, got " + std::to_string(n),
                {static_cast<double>(n)});
}

/// Parameter value of grid node k on an n-point grid.
inline double grid_parameter(std::size_t k, std::size_t n) {
  return two_pi * static_cast<double>(k) / static_cast<double>(n);
}

/// Values of a 2pi-periodic function at t_k = 2 pi k / N.
template <class T>
class PeriodicSamples {
 public:
  using value_type = T;

  PeriodicSamples() = default;
  explicit PeriodicSamples(std::vector<T> values) : v_(std::move(values)) {}
  PeriodicSamples(std::size_t n, T fill) : v_(n, fill) {}

  /// Samples fn(t_k) on an n-point grid.
  template <class F>
  static PeriodicSamples generate(std::size_t n, F&& fn) {
    std::vector<T> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<T>(fn(grid_parameter(k, n)));
    return PeriodicSamples(std::move(v));
  }

  std::size_t size() const noexcept { return v_.size(); }
  bool empty() const noexcept { return v_.empty(); }
  T& operator[](std::size_t k) { return v_[k]; }
  const T& operator[](std::size_t k) const { return v_[k]; }
  /// Periodic access with wrap-around.
  const T& wrap(long k) const {
    const long n = static_cast<long>(v_.size());
    return v_[static_cast<std::size_t>(((k % n) + n) % n)];
  }
  const std::vector<T>& values() const noexcept { return v_; }
  std::vector<T>& values() noexcept { return v_; }
  std::span<const T> span() const noexcept { return v_; }
  auto begin() const noexcept { return v_.begin(); }
  auto end() const noexcept { return v_.end(); }

  template <class F>
  auto map(F&& fn) const {
    using R = std::decay_t<decltype(fn(std::declval<T>()))>;
    std::vector<R> out(v_.size());
    for (std::size_t k = 0; k < v_.size(); ++k) out[k] = fn(v_[k]);
    return PeriodicSamples<R>(std::move(out));
  }

  PeriodicSamples<cplx> to_complex() const {
    return map([](const T& x) { return cplx(x); });
  }

 private:
  std::vector<T> v_;
};

using RealSamples = PeriodicSamples<double>;
using ComplexSamples = PeriodicSamples<cplx>;

namespace detail {
template <class A, class B, class Op>
auto zip(const PeriodicSamples<A>& a, const PeriodicSamples<B>& b, Op op) {
  using R = std::decay_t<decltype(op(std::declval<A>(), std::declval<B>()))>;
  if (a.size() != b.size())
    throw error(errc::invalid_grid, "sample arrays of different length");
  std::vector<R> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = op(a[k], b[k]);
  return PeriodicSamples<R>(std::move(out));
}
}  // namespace detail

template <class A, class B>
auto operator+(const PeriodicSamples<A>& a, const PeriodicSamples<B>& b) {
  return detail::zip(a, b, [](const A& x, const B& y) { return x + y; });
}
template <class A, class B>
auto operator-(const PeriodicSamples<A>& a, const PeriodicSamples<B>& b) {
  return detail::zip(a, b, [](const A& x, const B& y) { return x - y; });
}
template <class A, class B>
auto operator*(const PeriodicSamples<A>& a, const PeriodicSamples<B>& b) {
  return detail::zip(a, b, [](const A& x, const B& y) { return x * y; });
}
template <class A, class B>
auto operator/(const PeriodicSamples<A>& a, const PeriodicSamples<B>& b) {
  return detail::zip(a, b, [](const A& x, const B& y) { return x / y; });
}
template <class A, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator*(const PeriodicSamples<A>& a, S s) {
  return a.map([s](const A& x) { return x * s; });
}
template <class A, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator*(S s, const PeriodicSamples<A>& a) {
  return a.map([s](const A& x) { return s * x; });
}
template <class A, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator+(const PeriodicSamples<A>& a, S s) {
  return a.map([s](const A& x) { return x + s; });
}
template <class A, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator+(S s, const PeriodicSamples<A>& a) {
  return a.map([s](const A& x) { return s + x; });
}
template <class A, class S, class = std::enable_if_t<std::is_arithmetic_v<S> || std::is_same_v<S, cplx>>>
auto operator-(const PeriodicSamples<A>& a, S s) {
  return a.map([s](const A& x) { return x - s; });
}

/// Normalised Fourier coefficients in FFT order.
inline std::vector<cplx> fourier_coefficients(const ComplexSamples& s) {
  return detail::forward(s.values());
}

/// Samples from normalised Fourier coefficients in FFT order.
inline ComplexSamples from_fourier(const std::vector<cplx>& c) {
  return ComplexSamples(detail::backward(c));
}

/// d/dt via FFT; the Nyquist mode is dropped.
inline ComplexSamples spectral_derivative(const ComplexSamples& s) {
  validate_grid(s.size());
  auto c = fourier_coefficients(s);
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    const long f = detail::frequency(k, n);
    c[k] *= (2 * f == static_cast<long>(n)) ? cplx(0.0) : I * static_cast<double>(f);
  }
  return from_fourier(c);
}

inline RealSamples spectral_derivative(const RealSamples& s) {
  return spectral_derivative(s.to_complex()).map([](const cplx& z) { return z.real(); });
}

/// Trigonometric interpolant resampled on an m-point grid (m >= N, even).
inline ComplexSamples resample(const ComplexSamples& s, std::size_t m) {
  validate_grid(s.size());
  const std::size_t n = s.size();
  if (m < n || m % 2 != 0)
    throw error(errc::invalid_grid, "resample target must be even and >= source size");
  auto c = fourier_coefficients(s);
  std::vector<cplx> d(m, cplx(0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const long f = detail::frequency(k, n);
    if (2 * f == static_cast<long>(n)) {
      d[n / 2] += 0.5 * c[k];
      d[m - n / 2] += 0.5 * c[k];
    } else {
      d[static_cast<std::size_t>(f >= 0 ? f : static_cast<long>(m) + f)] += c[k];
    }
  }
  return from_fourier(d);
}

/// Ratio of the largest Fourier coefficient with |k| >= N/4 to the largest
/// overall; near machine precision for adequately resolved data.
inline double spectral_tail(const ComplexSamples& s) {
  auto c = fourier_coefficients(s);
  const std::size_t n = c.size();
  double all = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::abs(c[k]);
    all = std::max(all, a);
    if (4 * std::labs(detail::frequency(k, n)) >= static_cast<long>(n)) tail = std::max(tail, a);
  }
  return all > 0.0 ? tail / all : 0.0;
}

/// One boundary component: grid size, orientation sign relative to the
/// induced boundary orientation, and optional planar positions.
struct CurveComponent {
  std::size_t n = 0;
  int orientation = +1;
  ComplexSamples points;  // empty for an abstract parametrised curve

  bool has_points() const noexcept { return !points.empty(); }
};

/// A finite union of disjoint closed curves.
class ClosedCurve {
 public:
  ClosedCurve() = default;
  explicit ClosedCurve(std::vector<CurveComponent> comps) : comps_(std::move(comps)) { validate(); }

  /// Single planar component sampled from a parametrisation.
  template <class F>
  static CurveComponent component(std::size_t n, F&& param, int orientation = +1) {
    validate_grid(n);
    return CurveComponent{n, orientation, ComplexSamples::generate(n, std::forward<F>(param))};
  }

  std::size_t size() const noexcept { return comps_.size(); }
  const CurveComponent& operator[](std::size_t i) const { return comps_[i]; }
  const std::vector<CurveComponent>& components() const noexcept { return comps_; }
  bool has_points() const {
    return !comps_.empty() &&
           std::all_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.has_points(); });
  }

  /// |gamma'(t)| per component (requires planar positions).
  std::vector<RealSamples> jacobian() const {
    std::vector<RealSamples> out;
    for (const auto& c : comps_) {
      if (!c.has_points())
        throw error(errc::degenerate_parametrization, "curve component has no planar positions");
      out.push_back(spectral_derivative(c.points).map([](const cplx& z) { return std::abs(z); }));
    }
    return out;
  }

 private:
  void validate() const {
    if (comps_.empty()) throw error(errc::invalid_grid, "curve has no components");
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      const auto& c = comps_[i];
      validate_grid(c.n);
      if (c.orientation != 1 && c.orientation != -1)
        throw error(errc::invalid_grid, "orientation must be +1 or -1");
      if (!c.has_points()) continue;
      if (c.points.size() != c.n) throw error(errc::invalid_grid, "point count does not match n");
      double diam = 0.0;
      for (const auto& z : c.points) diam = std::max(diam, std::abs(z - c.points[0]));
      if (diam <= 1e-12)
        throw error(errc::degenerate_parametrization,
                    "component " + std::to_string(i) + " degenerates to a point",
                    {static_cast<double>(i)});
    }
  }

  std::vector<CurveComponent> comps_;
};

/// Per-component samples of a field on a ClosedCurve.
template <class T>
using CurveField = std::vector<PeriodicSamples<T>>;

/// Periodic trapezoid rule for int_0^{2pi} s(t) dt.
inline cplx integrate_closed(const ComplexSamples& s) {
  validate_grid(s.size());
  cplx acc = 0.0;
  for (const auto& v : s) acc += v;
  return acc * (two_pi / static_cast<double>(s.size()));
}

/// Oriented sum over components of the per-component integrals.
inline cplx integrate_closed(const ClosedCurve& curve, const CurveField<cplx>& field) {
  if (field.size() != curve.size())
    throw error(errc::invalid_grid, "field does not match curve component count");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i)
    acc += static_cast<double>(curve[i].orientation) * integrate_closed(field[i]);
  return acc;
}

struct Winding {
  long value = 0;       // rounded winding number
  double residual = 0;  // distance of the raw integral from the integer
  cplx raw = 0.0;
};

namespace detail {
inline cplx raw_winding(const ComplexSamples& g, const ComplexSamples& dg) {
  // Resolution max|g'| / N: a zero at parameter distance d costs about exp(-N d).
  double min_abs = INFINITY, step = 0.0;
  const std::size_t n = g.size();
  std::size_t argmin = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::abs(g[k]);
    if (a < min_abs) {
      min_abs = a;
      argmin = k;
    }
    step = std::max(step, std::abs(dg[k]) / static_cast<double>(n));
  }
  if (!(min_abs > 10.0 * step))
    throw error(errc::near_zero_crossing,
                "curve passes too close to zero for a reliable winding number",
                {min_abs, step, static_cast<double>(argmin)});
  return integrate_closed(dg / g) / (two_pi * I);
}

inline Winding finish_winding(cplx raw) {
  const double r = std::round(raw.real());
  Winding w{static_cast<long>(r), std::abs(raw - cplx(r)), raw};
  if (w.residual > 0.1)
    throw error(errc::unreliable_winding, "winding integral is not close to an integer",
                {raw.real(), raw.imag()});
  return w;
}
}  // namespace detail

/// Winding number about 0 of the closed curve t -> g(t).
inline Winding winding_number(const ComplexSamples& g) {
  validate_grid(g.size());
  return detail::finish_winding(detail::raw_winding(g, spectral_derivative(g)));
}

/// Winding number with a known derivative dg/dt.
inline Winding winding_number(const ComplexSamples& g, const ComplexSamples& dg) {
  validate_grid(g.size());
  return detail::finish_winding(detail::raw_winding(g, dg));
}

/// Oriented sum over the components of a ClosedCurve.
inline Winding winding_number(const ClosedCurve& curve, const CurveField<cplx>& g) {
  if (g.size() != curve.size())
    throw error(errc::invalid_grid, "field does not match curve component count");
  cplx raw = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    validate_grid(g[i].size());
    raw += static_cast<double>(curve[i].orientation) *
           detail::raw_winding(g[i], spectral_derivative(g[i]));
  }
  return detail::finish_winding(raw);
}

}  // namespace dnsurf

#endif
