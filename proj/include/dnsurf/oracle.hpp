#ifndef DNSURF_ORACLE_HPP
#define DNSURF_ORACLE_HPP

// Synthetic surfaces with known holomorphic data: boundary datasets, exact
// fibres and moments, Dirichlet-to-Neumann operators and Green-type checks.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dnsurf/boundary.hpp"
#include "dnsurf/curve.hpp"
#include "dnsurf/error.hpp"

namespace dnsurf {

/// A boundary component described in the uniformising coordinate w.
struct ComponentModel {
  std::function<cplx(double)> w;       // w(t)
  std::function<cplx(double)> dw;      // dw/dt
  std::function<cplx(double)> z;       // planar position
  int orientation = +1;
};

/// Holomorphic function of w with its derivative.
struct Holo {
  std::function<cplx(cplx)> value;
  std::function<cplx(cplx)> deriv;
};

/// DN operator diagonal in Fourier modes on each component: (N v)_n = |n| v_n / R.
class CircleDN : public DNOracle {
 public:
  explicit CircleDN(std::vector<double> radii) : radii_(std::move(radii)) {}
  CurveField<double> apply(const CurveField<double>& v) const override {
    if (v.size() != radii_.size()) throw error(errc::invalid_grid, "DN input has wrong component count");
    CurveField<double> out;
    for (std::size_t c = 0; c < v.size(); ++c) {
      auto co = fourier_coefficients(v[c].to_complex());
      const std::size_t n = co.size();
      for (std::size_t k = 0; k < n; ++k) co[k] *= static_cast<double>(std::labs(detail::frequency(k, n))) / radii_[c];
      // Nyquist mode: keep the symmetric real interpretation.
      out.push_back(from_fourier(co).map([](const cplx& z) { return z.real(); }));
    }
    return out;
  }

 private:
  std::vector<double> radii_;
};

/// DN operator of the annulus r < |z| < 1; component 0 is the outer circle,
/// component 1 the inner circle, both parametrised counter-clockwise.
class AnnulusDN : public DNOracle {
 public:
  explicit AnnulusDN(double r) : r_(r) {}
  CurveField<double> apply(const CurveField<double>& v) const override {
    if (v.size() != 2) throw error(errc::invalid_grid, "annulus DN expects two components");
    auto a = fourier_coefficients(v[0].to_complex());
    auto b = fourier_coefficients(v[1].to_complex());
    const std::size_t n = a.size();
    if (b.size() != n) throw error(errc::invalid_grid, "annulus components must share a grid");
    std::vector<cplx> na(n), nb(n);
    for (std::size_t k = 0; k < n; ++k) {
      const long f = std::labs(detail::frequency(k, n));
      if (f == 0) {
        const cplx B = (b[k] - a[k]) / std::log(r_);
        na[k] = B;
        nb[k] = -B / r_;
        continue;
      }
      const double rp = std::pow(r_, static_cast<double>(f));
      const double det = 1.0 / rp - rp;
      const cplx alpha = (a[k] / rp - b[k]) / det;
      const cplx beta = (b[k] - a[k] * rp) / det;
      const double ff = static_cast<double>(f);
      na[k] = ff * (alpha - beta);
      nb[k] = -ff * (alpha * rp / r_ - beta / (rp * r_));
    }
    return {from_fourier(na).map([](const cplx& z) { return z.real(); }),
            from_fourier(nb).map([](const cplx& z) { return z.real(); })};
  }

 private:
  double r_;
};

/// Named synthetic surface with exact data.
struct Scenario {
  std::string name;
  std::array<Holo, 3> H;
  Holo F1, F2;                            // f = (F1, F2) in w
  std::vector<ComponentModel> components;
  std::function<bool(cplx)> in_domain;    // w in the surface
  std::function<bool(cplx)> outside;      // planar z outside the closed domain
  std::function<cplx(cplx)> to_w;         // planar z inside -> w
  /// Coefficients (low to high, degree <= 2) of the numerator of
  /// xi0 + xi1 F1(w) + F2(w), whose roots in the domain form the line fibre.
  std::function<std::vector<cplx>(cplx, cplx)> line_poly;
  std::vector<cplx> poles;                // poles of F2 in the domain (simple)
  std::function<cplx(cplx, cplx)> implicit;  // defining equation of the image curve
  std::shared_ptr<DNOracle> dn;           // null when unsupported
  std::array<cplx, 2> base_line{0.0, 0.0};  // generic (xi0, xi1)
  cplx base_fiber = 0.0;                    // generic xi for the z2 pencil
  int surface_components = 1;
};

struct ScenarioParams {
  double a = 0.5;      // pole location for disk-pole
  double r = 0.5;      // inner radius of the annulus
  double c = 0.3;      // conformal map w + c w^2
  double shift = 2.0;  // two-disks centres at +-shift
};

inline std::vector<std::string> scenario_names() {
  return {"disk-z-z2", "disk-pole", "identity", "annulus", "two-disks", "exterior-disk", "conformal"};
}

namespace detail {
inline ComponentModel circle(cplx center, double radius, int orientation = +1) {
  return {[=](double t) { return center + std::polar(radius, t); },
          [=](double t) { return I * std::polar(radius, t); },
          [=](double t) { return center + std::polar(radius, t); }, orientation};
}
inline Holo monomial(int k, double scale = 1.0) {
  return {[=](cplx w) { return scale * std::pow(w, k) / static_cast<double>(k); },
          [=](cplx w) { return scale * std::pow(w, k - 1); }};
}
inline std::function<std::vector<cplx>(cplx, cplx)> z_z2_pencil() {
  return [](cplx x0, cplx x1) { return std::vector<cplx>{x0, x1, 1.0}; };
}
}  // namespace detail

/// Builds a named scenario; throws unknown_scenario for other names.
inline Scenario make_scenario(const std::string& name, const ScenarioParams& prm = {}) {
  Scenario s;
  s.name = name;
  const Holo id{[](cplx w) { return w; }, [](cplx) { return cplx(1.0); }};
  const Holo sq{[](cplx w) { return w * w; }, [](cplx w) { return 2.0 * w; }};
  auto unit_disk = [](cplx w) { return std::abs(w) < 1.0; };
  if (name == "disk-z-z2" || name == "identity") {
    if (name == "disk-z-z2") {
      s.H = {detail::monomial(1), detail::monomial(2), detail::monomial(3)};
      s.F2 = sq;
      s.line_poly = detail::z_z2_pencil();
      s.implicit = [](cplx z1, cplx z2) { return z1 * z1 - z2; };
      s.base_line = {-0.09, 0.1};
      s.base_fiber = 0.09;
    } else {
      s.H = {detail::monomial(1), detail::monomial(2), detail::monomial(2)};
      s.F2 = id;
      s.line_poly = [](cplx x0, cplx x1) { return std::vector<cplx>{x0, 1.0 + x1}; };
      s.implicit = [](cplx z1, cplx z2) { return z1 - z2; };
      s.base_line = {-0.2, 0.1};
      s.base_fiber = 0.3;
    }
    s.F1 = id;
    s.components = {detail::circle(0.0, 1.0)};
    s.in_domain = unit_disk;
    s.outside = [](cplx z) { return std::abs(z) > 1.0; };
    s.to_w = [](cplx z) { return z; };
    s.dn = std::make_shared<CircleDN>(std::vector<double>{1.0});
  } else if (name == "disk-pole") {
    const double a = prm.a;
    s.H = {Holo{[=](cplx w) { return 0.5 * (w - a) * (w - a); }, [=](cplx w) { return w - a; }},
           Holo{[=](cplx w) { return w * w * w / 3.0 - a * w * w / 2.0; }, [=](cplx w) { return w * (w - a); }},
           id};
    s.F1 = id;
    s.F2 = {[=](cplx w) { return 1.0 / (w - a); }, [=](cplx w) { return -1.0 / ((w - a) * (w - a)); }};
    s.components = {detail::circle(0.0, 1.0)};
    s.in_domain = unit_disk;
    s.outside = [](cplx z) { return std::abs(z) > 1.0; };
    s.to_w = [](cplx z) { return z; };
    s.line_poly = [=](cplx x0, cplx x1) { return std::vector<cplx>{1.0 - a * x0, x0 - a * x1, x1}; };
    s.poles = {a};
    s.implicit = [=](cplx z1, cplx z2) { return z2 * (z1 - a) - 1.0; };
    s.dn = std::make_shared<CircleDN>(std::vector<double>{1.0});
    s.base_line = {-4.0, 0.05};
    s.base_fiber = 4.0;
  } else if (name == "annulus") {
    const double r = prm.r;
    s.H = {Holo{[](cplx w) { return std::log(w); }, [](cplx w) { return 1.0 / w; }},
           detail::monomial(2), id};
    s.F1 = sq;
    s.F2 = id;
    s.components = {detail::circle(0.0, 1.0, +1), detail::circle(0.0, r, -1)};
    s.in_domain = [=](cplx w) { return std::abs(w) < 1.0 && std::abs(w) > r; };
    s.outside = [=](cplx z) { return std::abs(z) > 1.0 || std::abs(z) < r; };
    s.to_w = [](cplx z) { return z; };
    s.line_poly = [](cplx x0, cplx x1) { return std::vector<cplx>{x0, 1.0, x1}; };
    s.implicit = [](cplx z1, cplx z2) { return z1 - z2 * z2; };
    s.dn = std::make_shared<AnnulusDN>(r);
    s.base_line = {-0.7, 0.05};
    s.base_fiber = 0.7;
  } else if (name == "two-disks") {
    const double c = prm.shift;
    s.H = {detail::monomial(1), detail::monomial(2), detail::monomial(3)};
    s.F1 = id;
    s.F2 = sq;
    s.components = {detail::circle(-c, 1.0), detail::circle(c, 1.0)};
    s.in_domain = [=](cplx w) { return std::abs(w - c) < 1.0 || std::abs(w + c) < 1.0; };
    s.outside = [=](cplx z) { return std::abs(z - c) > 1.0 && std::abs(z + c) > 1.0; };
    s.to_w = [](cplx z) { return z; };
    s.line_poly = detail::z_z2_pencil();
    s.implicit = [](cplx z1, cplx z2) { return z1 * z1 - z2; };
    s.dn = std::make_shared<CircleDN>(std::vector<double>{1.0, 1.0});
    s.base_line = {-4.0, 0.1};
    s.base_fiber = 4.0;
    s.surface_components = 2;
  } else if (name == "exterior-disk") {
    // X = {|z| > 1} with w = 1/z; the circle is traversed clockwise as seen from X.
    s.H = {detail::monomial(1), detail::monomial(2), detail::monomial(3)};
    s.F1 = id;
    s.F2 = sq;
    s.components = {ComponentModel{[](double t) { return std::polar(1.0, -t); },
                                   [](double t) { return -I * std::polar(1.0, -t); },
                                   [](double t) { return std::polar(1.0, t); }, -1}};
    s.in_domain = unit_disk;
    s.outside = [](cplx z) { return std::abs(z) < 1.0; };
    s.to_w = [](cplx z) { return 1.0 / z; };
    s.line_poly = detail::z_z2_pencil();
    s.implicit = [](cplx z1, cplx z2) { return z1 * z1 - z2; };
    s.dn = std::make_shared<CircleDN>(std::vector<double>{1.0});
    s.base_line = {-0.09, 0.1};
    s.base_fiber = 0.09;
  } else if (name == "conformal") {
    // X = phi(unit disk), phi(w) = w + c w^2 (univalent for |c| < 1/2).
    const double c = prm.c;
    s.H = {detail::monomial(1), detail::monomial(2), detail::monomial(3)};
    s.F1 = id;
    s.F2 = sq;
    s.components = {ComponentModel{[](double t) { return std::polar(1.0, t); },
                                   [](double t) { return I * std::polar(1.0, t); },
                                   [=](double t) {
                                     const cplx w = std::polar(1.0, t);
                                     return w + c * w * w;
                                   },
                                   +1}};
    s.in_domain = unit_disk;
    auto inv = [=](cplx z) {
      // root of c w^2 + w - z closest to z
      const cplx d = std::sqrt(1.0 + 4.0 * c * z);
      const cplx w1 = (-1.0 + d) / (2.0 * c), w2 = (-1.0 - d) / (2.0 * c);
      return std::abs(w1) < std::abs(w2) ? w1 : w2;
    };
    s.to_w = inv;
    s.outside = [=](cplx z) { return std::abs(inv(z)) > 1.0; };
    s.line_poly = detail::z_z2_pencil();
    s.implicit = [](cplx z1, cplx z2) { return z1 * z1 - z2; };
    s.base_line = {-0.09, 0.1};
    s.base_fiber = 0.09;
  } else {
    throw error(errc::unknown_scenario, "unknown scenario '" + name + "'");
  }
  return s;
}

/// Boundary dataset sampled from the exact holomorphic data.
inline BoundaryDataset sample_dataset(const Scenario& s, std::size_t n) {
  validate_grid(n);
  std::vector<CurveComponent> comps;
  std::array<CurveField<double>, 3> u;
  std::array<CurveField<cplx>, 3> theta;
  std::array<CurveField<cplx>, 2> f;
  for (const auto& cm : s.components) {
    comps.push_back(ClosedCurve::component(n, cm.z, cm.orientation));
    for (int l = 0; l < 3; ++l) {
      u[l].push_back(RealSamples::generate(n, [&](double t) { return s.H[l].value(cm.w(t)).real(); }));
      theta[l].push_back(ComplexSamples::generate(n, [&](double t) { return 0.5 * s.H[l].deriv(cm.w(t)) * cm.dw(t); }));
    }
    f[0].push_back(ComplexSamples::generate(n, [&](double t) { return s.F1.value(cm.w(t)); }));
    f[1].push_back(ComplexSamples::generate(n, [&](double t) { return s.F2.value(cm.w(t)); }));
  }
  return make_dataset(ClosedCurve(std::move(comps)), std::move(u), std::move(theta), std::move(f), s.name);
}

/// DN operator of the scenario applied to boundary values v.
inline CurveField<double> dn_apply(const Scenario& s, const CurveField<double>& v) {
  if (!s.dn) throw error(errc::not_implemented, "no DN operator for scenario '" + s.name + "'");
  return s.dn->apply(v);
}

/// Dataset rebuilt from u_l and the DN operator instead of the exact forms.
inline BoundaryDataset sample_dataset_via_dn(const Scenario& s, std::size_t n) {
  const auto exact = sample_dataset(s, n);
  const auto jac = exact.curve.jacobian();
  std::array<CurveField<cplx>, 3> theta;
  for (int l = 0; l < 3; ++l) {
    const auto nu = dn_apply(s, exact.u[l]);
    for (std::size_t c = 0; c < exact.curve.size(); ++c)
      theta[l].push_back(build_theta(exact.u[l][c], nu[c], jac[c], exact.curve[c].orientation));
  }
  return make_dataset(exact.curve, exact.u, std::move(theta), std::nullopt, s.name + "+dn");
}

/// Closed-form ground truth for a scenario.
class GroundTruth {
 public:
  explicit GroundTruth(Scenario s) : s_(std::move(s)) {}
  const Scenario& scenario() const { return s_; }

  /// Roots in the domain of the line polynomial (uniformising coordinate).
  std::vector<cplx> line_roots(cplx xi0, cplx xi1) const {
    auto c = s_.line_poly(xi0, xi1);
    while (c.size() > 1 && std::abs(c.back()) < 1e-300) c.pop_back();
    std::vector<cplx> r;
    if (c.size() == 2) {
      r.push_back(-c[0] / c[1]);
    } else if (c.size() == 3) {
      const cplx d = std::sqrt(c[1] * c[1] - 4.0 * c[2] * c[0]);
      // numerically stable pair
      const cplx q = -0.5 * (c[1] + (std::real(std::conj(c[1]) * d) >= 0 ? d : -d));
      r.push_back(q / c[2]);
      r.push_back(c[0] / q);
    }
    std::vector<cplx> in;
    for (const auto& w : r)
      if (s_.in_domain(w)) in.push_back(w);
    return in;
  }

  /// z1-coordinates of the fibre over xi0 + xi1 z1 + z2 = 0.
  std::vector<cplx> line_fiber(cplx xi0, cplx xi1) const {
    std::vector<cplx> h;
    for (const auto& w : line_roots(xi0, xi1)) h.push_back(s_.F1.value(w));
    return h;
  }
  std::vector<cplx> fiber(cplx xi) const { return line_fiber(-xi, 0.0); }

  int p(cplx xi0, cplx xi1) const { return static_cast<int>(line_roots(xi0, xi1).size()); }
  int q() const { return static_cast<int>(s_.poles.size()); }

  /// P_m for the z2 pencil: minus the residue contribution of each pole.
  std::vector<cplx> infinity_poly(int m) const {
    std::vector<cplx> c(static_cast<std::size_t>(m + 1), 0.0);
    for (const auto& w : s_.poles) c[0] -= std::pow(s_.F1.value(w), m);
    return c;
  }

  cplx moment(int m, cplx xi) const {
    cplx s = 0.0;
    for (const auto& h : fiber(xi)) s += std::pow(h, m);
    for (const auto& w : s_.poles) s -= std::pow(s_.F1.value(w), m);
    return s;
  }

  cplx G(cplx xi0, cplx xi1) const {
    cplx s = 0.0;
    for (const auto& h : line_fiber(xi0, xi1)) s += h;
    for (const auto& w : s_.poles) s -= s_.F1.value(w);
    return s;
  }

  /// Values of dH_l / (2 dF2) at the fibre points over z2 = xi.
  std::vector<cplx> form_values(int l, cplx xi) const {
    std::vector<cplx> v;
    for (const auto& w : line_roots(-xi, 0.0)) v.push_back(0.5 * s_.H[l].deriv(w) / s_.F2.deriv(w));
    return v;
  }

  /// Harmonic extension u_l at a planar point inside the domain.
  double u(int l, cplx z) const { return s_.H[l].value(s_.to_w(z)).real(); }

 private:
  Scenario s_;
};

/// Residuals of int_bX (u_l dg_z + g_z conj(theta u_l)), l = 0, 1, 2, with
/// g_z(zeta) = ln|zeta - z| / (2 pi), for z outside the closed domain.
inline std::array<cplx, 3> green_moment_check(const Scenario& s, const BoundaryDataset& ds, cplx z) {
  if (!s.outside(z)) throw error(errc::placement, "Green check point is not outside the domain", {z.real(), z.imag()});
  if (!ds.curve.has_points()) throw error(errc::precondition, "dataset has no planar positions");
  std::array<cplx, 3> res{};
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const auto& zeta = ds.curve[c].points;
    const auto dzeta = spectral_derivative(zeta);
    const std::size_t n = zeta.size();
    const double w = static_cast<double>(ds.curve[c].orientation) * two_pi / static_cast<double>(n);
    for (int l = 0; l < 3; ++l) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const cplx d = zeta[k] - z;
        acc += ds.u[l][c][k] * dzeta[k] / (4.0 * std::numbers::pi * d) +
               std::log(std::abs(d)) / two_pi * std::conj(ds.theta[l][c][k]);
      }
      res[static_cast<std::size_t>(l)] += w * acc;
    }
  }
  return res;
}

/// Outcome of the boundary jump test for F(z) = (2/i) int Omega_z.
struct JumpReport {
  double value_error = 0.0;  // |F_in - F_out - u(p)| after extrapolation
  double dbar_error = 0.0;   // |(dbar F_in - dbar F_out) conj(gamma') - conj(lambda)|
  double max_imag = 0.0;     // max |Im F| over evaluation points
  std::size_t upsampled = 0;
};

/// Evaluates F for form l at planar z from (upsampled) boundary data.
class GreenPotential {
 public:
  GreenPotential(const BoundaryDataset& ds, int l, std::size_t n_up) {
    for (std::size_t c = 0; c < ds.curve.size(); ++c) {
      Piece pc;
      pc.orientation = ds.curve[c].orientation;
      pc.zeta = resample(ds.curve[c].points, n_up);
      pc.dzeta = spectral_derivative(pc.zeta);
      pc.u = resample(ds.u[l][c].to_complex(), n_up);
      pc.lambda = resample(ds.theta[l][c], n_up);
      pieces_.push_back(std::move(pc));
    }
  }

  cplx operator()(cplx z) const {
    cplx acc = 0.0;
    for (const auto& pc : pieces_) {
      const std::size_t n = pc.zeta.size();
      cplx s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const cplx d = pc.zeta[k] - z;
        s += pc.u[k].real() * pc.dzeta[k] / (4.0 * std::numbers::pi * d) +
             std::log(std::abs(d)) / two_pi * std::conj(pc.lambda[k]);
      }
      acc += static_cast<double>(pc.orientation) * s * (two_pi / static_cast<double>(n));
    }
    return -2.0 * I * acc;
  }

 private:
  struct Piece {
    int orientation = 1;
    ComplexSamples zeta, dzeta, u, lambda;
  };
  std::vector<Piece> pieces_;
};

/// Jump of F and of dbar F across the boundary at sample k of component c,
/// with offsets eps and eps/2 combined by Richardson extrapolation.
inline JumpReport jump_check(const BoundaryDataset& ds, int l, std::size_t c, std::size_t k, double eps,
                             std::size_t max_upsample = 65536) {
  if (!ds.curve.has_points()) throw error(errc::precondition, "dataset has no planar positions");
  if (c >= ds.curve.size() || k >= ds.curve[c].n) throw error(errc::precondition, "sample index out of range");
  double length = 0.0;
  for (std::size_t i = 0; i < ds.curve.size(); ++i) {
    const auto jac = spectral_derivative(ds.curve[i].points);
    double len = 0.0;
    for (const auto& v : jac) len += std::abs(v);
    length = std::max(length, len * two_pi / static_cast<double>(ds.curve[i].n));
  }
  // Node spacing must be well below the smallest offset eps/2.
  const double need = 16.0 * length / eps;
  std::size_t n_up = ds.curve[c].n;
  while (static_cast<double>(n_up) < need && n_up < max_upsample) n_up *= 2;
  if (static_cast<double>(n_up) < need)
    throw error(errc::resolution, "offset too small for the available upsampling", {eps, static_cast<double>(n_up)});

  GreenPotential F(ds, l, n_up);
  const auto& pts = ds.curve[c].points;
  const cplx p = pts[k];
  const cplx dp = spectral_derivative(pts)[k];
  const cplx nu = -I * static_cast<double>(ds.curve[c].orientation) * dp / std::abs(dp);
  JumpReport rep;
  rep.upsampled = n_up;
  auto eval = [&](cplx z) {
    const cplx v = F(z);
    rep.max_imag = std::max(rep.max_imag, std::abs(v.imag()));
    return v;
  };
  auto dbar = [&](cplx z, double h) {
    const cplx fx = (eval(z + h) - eval(z - h)) / (2.0 * h);
    const cplx fy = (eval(z + I * h) - eval(z - I * h)) / (2.0 * h);
    return 0.5 * (fx + I * fy);
  };
  auto jumps = [&](double e) {
    const cplx zin = p - e * nu, zout = p + e * nu;
    const cplx jv = eval(zin) - eval(zout);
    const double h = 0.25 * e;
    const cplx jd = (dbar(zin, h) - dbar(zout, h)) * std::conj(dp);
    return std::make_pair(jv, jd);
  };
  const auto [v1, d1] = jumps(eps);
  const auto [v2, d2] = jumps(0.5 * eps);
  const cplx jv = 2.0 * v2 - v1;
  const cplx jd = 2.0 * d2 - d1;
  rep.value_error = std::abs(jv - ds.u[l][c][k]);
  rep.dbar_error = std::abs(jd - std::conj(ds.theta[l][c][k]));
  return rep;
}

}  // namespace dnsurf

#endif
