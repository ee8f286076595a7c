#ifndef DNSURF_MOMENTS_HPP
#define DNSURF_MOMENTS_HPP

// Cauchy-type moments of the boundary map, the line-pencil function G,
// intersection indices and the moment conditions for holomorphic boundaries.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "dnsurf/boundary.hpp"
#include "dnsurf/curve.hpp"
#include "dnsurf/error.hpp"

namespace dnsurf {

/// Guard threshold: integrands with a denominator smaller than
/// relative * (sup norm of f over the curve) are rejected.
inline constexpr double guard_relative = 1e-3;

/// sup over the curve of max(|f_1|, |f_2|).
inline double f_scale(const BoundaryDataset& ds) {
  double s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (const auto& comp : ds.f[i])
      for (const auto& v : comp) s = std::max(s, std::abs(v));
  return s;
}

/// min over the curve of |f_2 - xi|.
inline double distance_to_image(const BoundaryDataset& ds, cplx xi) {
  double d = INFINITY;
  for (const auto& comp : ds.f[1])
    for (const auto& v : comp) d = std::min(d, std::abs(v - xi));
  return d;
}

inline bool passes_guard(const BoundaryDataset& ds, cplx xi) {
  return distance_to_image(ds, xi) >= guard_relative * f_scale(ds);
}

inline void require_guard(const BoundaryDataset& ds, cplx xi) {
  const double d = distance_to_image(ds, xi);
  if (d < guard_relative * f_scale(ds))
    throw error(errc::xi_too_close,
                "xi is too close to the image of the boundary under f_2", {d, xi.real(), xi.imag()});
}

/// (1/2 pi i) int f_1^m df_2 / (f_2 - xi), oriented sum over components.
inline cplx cauchy_moment(const BoundaryDataset& ds, int m, cplx xi) {
  if (m < 0) throw error(errc::precondition, "moment order must be non-negative");
  require_guard(ds, xi);
  cplx acc = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const auto& f1 = ds.f[0][c];
    const auto& f2 = ds.f[1][c];
    const auto& d2 = ds.df[1][c];
    cplx s = 0.0;
    for (std::size_t k = 0; k < f1.size(); ++k) s += std::pow(f1[k], m) * d2[k] / (f2[k] - xi);
    acc += static_cast<double>(ds.curve[c].orientation) * s * (two_pi / static_cast<double>(f1.size()));
  }
  return acc / (two_pi * I);
}

/// Moments C_m(xi_nu) for m < B at nodes xi_nu; values(m, nu).
struct MomentTable {
  std::vector<cplx> nodes;
  int orders = 0;
  Eigen::MatrixXcd values;
};

inline MomentTable build_moment_table(const BoundaryDataset& ds, const std::vector<cplx>& nodes,
                                      int orders) {
  if (orders < 1) throw error(errc::precondition, "moment table needs at least one order");
  MomentTable t{nodes, orders, Eigen::MatrixXcd(orders, static_cast<Eigen::Index>(nodes.size()))};
  const double scale = f_scale(ds);
  for (std::size_t nu = 0; nu < nodes.size(); ++nu) {
    const cplx xi = nodes[nu];
    if (distance_to_image(ds, xi) < guard_relative * scale)
      throw error(errc::xi_too_close, "moment node too close to the boundary image",
                  {distance_to_image(ds, xi), xi.real(), xi.imag()});
    std::vector<cplx> acc(static_cast<std::size_t>(orders), cplx(0.0));
    for (std::size_t c = 0; c < ds.curve.size(); ++c) {
      const auto& f1 = ds.f[0][c];
      const auto& f2 = ds.f[1][c];
      const auto& d2 = ds.df[1][c];
      const double w = static_cast<double>(ds.curve[c].orientation) * two_pi / static_cast<double>(f1.size());
      for (std::size_t k = 0; k < f1.size(); ++k) {
        cplx term = w * d2[k] / (f2[k] - xi);
        for (int m = 0; m < orders; ++m) {
          acc[static_cast<std::size_t>(m)] += term;
          term *= f1[k];
        }
      }
    }
    for (int m = 0; m < orders; ++m)
      t.values(m, static_cast<Eigen::Index>(nu)) = acc[static_cast<std::size_t>(m)] / (two_pi * I);
  }
  return t;
}

/// G(xi0, xi1) = (1/2 pi i) int f_1 d(Lambda)/Lambda with
/// Lambda = xi0 + xi1 f_1 + f_2.
inline cplx G_function(const BoundaryDataset& ds, cplx xi0, cplx xi1) {
  return cauchy_moment(ds.sheared(xi1), 1, -xi0);
}

/// (1/2 pi i) int theta u_l / Lambda.
inline cplx G_tilde(const BoundaryDataset& ds, int l, cplx xi0, cplx xi1) {
  if (l < 0 || l > 2) throw error(errc::precondition, "form index must be 0, 1 or 2");
  const auto sh = ds.sheared(xi1);
  require_guard(sh, -xi0);
  cplx acc = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const auto& g = sh.f[1][c];
    const auto& th = ds.theta[l][c];
    cplx s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) s += th[k] / (g[k] + xi0);
    acc += static_cast<double>(ds.curve[c].orientation) * s * (two_pi / static_cast<double>(g.size()));
  }
  return acc / (two_pi * I);
}

/// Winding number of Lambda_xi o f: intersections with the line in the
/// surface minus intersections at infinity.
inline Winding index_p_minus_q(const BoundaryDataset& ds, cplx xi0, cplx xi1) {
  const auto sh = ds.sheared(xi1);
  require_guard(sh, -xi0);
  cplx raw = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c)
    raw += static_cast<double>(ds.curve[c].orientation) *
           detail::raw_winding(sh.f[1][c] + xi0, sh.df[1][c]);
  return detail::finish_winding(raw);
}

/// Polynomial in (z1, z2) given as a list of monomials c * z1^i * z2^j.
struct BivariatePolynomial {
  std::vector<std::tuple<int, int, cplx>> terms;

  cplx operator()(cplx z1, cplx z2) const {
    cplx s = 0.0;
    for (const auto& [i, j, c] : terms) s += c * std::pow(z1, i) * std::pow(z2, j);
    return s;
  }
  cplx d1(cplx z1, cplx z2) const {
    cplx s = 0.0;
    for (const auto& [i, j, c] : terms)
      if (i > 0) s += c * static_cast<double>(i) * std::pow(z1, i - 1) * std::pow(z2, j);
    return s;
  }
  cplx d2(cplx z1, cplx z2) const {
    cplx s = 0.0;
    for (const auto& [i, j, c] : terms)
      if (j > 0) s += c * static_cast<double>(j) * std::pow(z1, i) * std::pow(z2, j - 1);
    return s;
  }
};

/// Winding of A o f over the oriented boundary.
inline Winding orientation_test(const BoundaryDataset& ds, const BivariatePolynomial& A) {
  cplx raw = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const std::size_t n = ds.curve[c].n;
    std::vector<cplx> g(n), dg(n);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx z1 = ds.f[0][c][k], z2 = ds.f[1][c][k];
      g[k] = A(z1, z2);
      dg[k] = A.d1(z1, z2) * ds.df[0][c][k] + A.d2(z1, z2) * ds.df[1][c][k];
    }
    raw += static_cast<double>(ds.curve[c].orientation) *
           detail::raw_winding(ComplexSamples(std::move(g)), ComplexSamples(std::move(dg)));
  }
  return detail::finish_winding(raw);
}

/// Affine line c0 + c1 z1 + c2 z2 = 0.
struct Line {
  cplx c0 = 0.0, c1 = 0.0, c2 = 1.0;
};

/// Winding of (Lxi / L) o f; equals the shift in intersection count when L is
/// replaced by Lxi.
inline Winding intersection_shift(const BoundaryDataset& ds, const Line& L, const Line& Lxi) {
  cplx raw = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const auto& f1 = ds.f[0][c];
    const auto& f2 = ds.f[1][c];
    const auto& d1 = ds.df[0][c];
    const auto& d2 = ds.df[1][c];
    auto eval = [&](const Line& l) {
      return std::make_pair(l.c0 + l.c1 * f1 + l.c2 * f2, l.c1 * d1 + l.c2 * d2);
    };
    auto [a, da] = eval(L);
    auto [b, db] = eval(Lxi);
    const double s = static_cast<double>(ds.curve[c].orientation);
    raw += s * (detail::raw_winding(b, db) - detail::raw_winding(a, da));
  }
  return detail::finish_winding(raw);
}

/// Result of the moment conditions int h_0^{k_0} ... h_N^{k_N} dh_0 = 0.
struct AffineMomentReport {
  double max_modulus = 0.0;
  std::vector<int> worst_index;
  std::size_t checked = 0;
  std::optional<double> flux;  // int (N u) tau*, when DN data is supplied
};

/// Enumerates every multi-index with total degree <= max_degree.
inline AffineMomentReport affine_moment_check(const ClosedCurve& curve,
                                              const std::vector<CurveField<cplx>>& h,
                                              int max_degree) {
  if (h.empty()) throw error(errc::precondition, "need at least one function");
  const std::size_t nf = h.size();
  for (const auto& hi : h)
    if (hi.size() != curve.size()) throw error(errc::invalid_grid, "function does not match curve");
  CurveField<cplx> dh0;
  for (const auto& comp : h[0]) dh0.push_back(spectral_derivative(comp));

  AffineMomentReport rep;
  std::vector<int> k(nf, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos == nf) {
      CurveField<cplx> integrand;
      for (std::size_t c = 0; c < curve.size(); ++c) {
        ComplexSamples s = dh0[c];
        for (std::size_t i = 0; i < nf; ++i)
          if (k[i] > 0) s = s * h[i][c].map([e = k[i]](const cplx& z) { return std::pow(z, e); });
        integrand.push_back(std::move(s));
      }
      const double v = std::abs(integrate_closed(curve, integrand));
      ++rep.checked;
      if (rep.worst_index.empty() || v > rep.max_modulus) {
        rep.max_modulus = v;
        rep.worst_index = k;
      }
      return;
    }
    for (int e = 0; e <= left; ++e) {
      k[pos] = e;
      rec(pos + 1, left - e);
    }
    k[pos] = 0;
  };
  rec(0, max_degree);
  return rep;
}

/// int (N u) tau* over the boundary: must vanish for a primitive to exist.
inline double dn_flux(const ClosedCurve& curve, const CurveField<double>& nu,
                      const std::vector<RealSamples>& jacobian) {
  // N u tau* pulls back to Nu |gamma'| dt on every component, whatever the orientation.
  double acc = 0.0;
  for (std::size_t c = 0; c < curve.size(); ++c)
    acc += integrate_closed((nu[c] * jacobian[c]).to_complex()).real();
  return acc;
}

/// Concentric-circle node grid with a seeded random angular offset per ring.
inline std::vector<cplx> concentric_nodes(cplx center, double radius, int rings, int per_ring,
                                          unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(0.0, two_pi);
  std::vector<cplx> out;
  for (int r = 1; r <= rings; ++r) {
    const double rho = radius * static_cast<double>(r) / static_cast<double>(rings);
    const double phase = offset(rng);
    for (int k = 0; k < per_ring; ++k)
      out.push_back(center + std::polar(rho, phase + two_pi * static_cast<double>(k) / per_ring));
  }
  return out;
}

}  // namespace dnsurf

#endif
