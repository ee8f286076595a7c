#ifndef DNSURF_BOUNDARY_HPP
#define DNSURF_BOUNDARY_HPP

// Restricted Dirichlet-Neumann data and the boundary maps derived from it.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dnsurf/curve.hpp"
#include "dnsurf/error.hpp"

namespace dnsurf {

/// Pullback of the holomorphic (1,0)-form of the harmonic extension of u:
/// lambda = (du/dt + i * orientation * Nu * |gamma'|) / 2.
inline ComplexSamples build_theta(const RealSamples& u, const RealSamples& nu,
                                  const RealSamples& jacobian, int orientation = +1) {
  validate_grid(u.size());
  if (nu.size() != u.size() || jacobian.size() != u.size())
    throw error(errc::invalid_grid, "build_theta inputs have different lengths");
  const auto du = spectral_derivative(u);
  std::vector<cplx> out(u.size());
  const double s = static_cast<double>(orientation);
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] = 0.5 * cplx(du[k], s * nu[k] * jacobian[k]);
  return ComplexSamples(std::move(out));
}

/// Outcome of the sampled injectivity test for the boundary map f.
struct EmbeddingReport {
  bool ok = true;
  double min_separation = INFINITY;
  double diameter = 0.0;
  std::size_t comp_a = 0, index_a = 0, comp_b = 0, index_b = 0;
};

/// Distinct samples must be separated by more than rel_floor * diameter in C^2.
inline EmbeddingReport check_embedding(const std::array<CurveField<cplx>, 2>& f,
                                       double rel_floor = 1e-6) {
  struct Pt {
    cplx a, b;
    std::size_t c, k;
  };
  std::vector<Pt> pts;
  for (std::size_t c = 0; c < f[0].size(); ++c)
    for (std::size_t k = 0; k < f[0][c].size(); ++k) pts.push_back({f[0][c][k], f[1][c][k], c, k});
  EmbeddingReport rep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = std::hypot(std::abs(pts[i].a - pts[j].a), std::abs(pts[i].b - pts[j].b));
      rep.diameter = std::max(rep.diameter, d);
      if (d < rep.min_separation) {
        rep.min_separation = d;
        rep.comp_a = pts[i].c;
        rep.index_a = pts[i].k;
        rep.comp_b = pts[j].c;
        rep.index_b = pts[j].k;
      }
    }
  }
  rep.ok = rep.min_separation > rel_floor * rep.diameter;
  return rep;
}

/// f = (lambda_1 / lambda_0, lambda_2 / lambda_0) on every component, followed by
/// the embedding check. Throws division_by_zero or not_an_embedding.
inline std::array<CurveField<cplx>, 2> build_f(const std::array<CurveField<cplx>, 3>& theta,
                                               EmbeddingReport* report = nullptr) {
  const std::size_t nc = theta[0].size();
  if (theta[1].size() != nc || theta[2].size() != nc)
    throw error(errc::invalid_grid, "theta triples have different component counts");
  std::array<CurveField<cplx>, 2> f;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& l0 = theta[0][c];
    validate_grid(l0.size());
    double scale = 0.0;
    for (const auto& v : l0) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < l0.size(); ++k) {
      if (!(std::abs(l0[k]) > 1e-12 * scale))
        throw error(errc::division_by_zero,
                    "theta_0 vanishes at sample " + std::to_string(k) + " of component " +
                        std::to_string(c),
                    {static_cast<double>(c), static_cast<double>(k)});
    }
    f[0].push_back(theta[1][c] / l0);
    f[1].push_back(theta[2][c] / l0);
  }
  auto rep = check_embedding(f);
  if (report) *report = rep;
  if (!rep.ok)
    throw error(errc::not_an_embedding, "boundary map f is not injective on the samples",
                {static_cast<double>(rep.comp_a), static_cast<double>(rep.index_a),
                 static_cast<double>(rep.comp_b), static_cast<double>(rep.index_b),
                 rep.min_separation});
  return f;
}

/// Boundary data (u_l, theta u_l) for l = 0, 1, 2 together with the map f.
/// Use make_dataset to construct; it validates shapes and caches df/dt.
struct BoundaryDataset {
  ClosedCurve curve;
  std::array<CurveField<double>, 3> u;
  std::array<CurveField<cplx>, 3> theta;
  std::array<CurveField<cplx>, 2> f;
  std::array<CurveField<cplx>, 2> df;
  std::string id;

  std::size_t component_count() const noexcept { return curve.size(); }

  /// Same data with f_2 replaced by f_2 + s * f_1; fibres of the pencil
  /// xi0 + xi1 z1 + z2 = 0 become fibres of z2' = -xi0 for s = xi1.
  BoundaryDataset sheared(cplx s) const {
    BoundaryDataset out = *this;
    for (std::size_t c = 0; c < curve.size(); ++c) {
      out.f[1][c] = f[1][c] + s * f[0][c];
      out.df[1][c] = df[1][c] + s * df[0][c];
    }
    return out;
  }
};

inline BoundaryDataset make_dataset(ClosedCurve curve, std::array<CurveField<double>, 3> u,
                                    std::array<CurveField<cplx>, 3> theta,
                                    std::optional<std::array<CurveField<cplx>, 2>> f = std::nullopt,
                                    std::string id = {}) {
  const std::size_t nc = curve.size();
  for (int l = 0; l < 3; ++l) {
    if (u[l].size() != nc || theta[l].size() != nc)
      throw error(errc::invalid_grid, "data does not match curve component count");
    for (std::size_t c = 0; c < nc; ++c) {
      if (u[l][c].size() != curve[c].n || theta[l][c].size() != curve[c].n)
        throw error(errc::invalid_grid, "data length does not match component grid size");
    }
  }
  BoundaryDataset ds;
  if (f) {
    for (int i = 0; i < 2; ++i) {
      if ((*f)[i].size() != nc) throw error(errc::invalid_grid, "f does not match curve");
      for (std::size_t c = 0; c < nc; ++c)
        if ((*f)[i][c].size() != curve[c].n) throw error(errc::invalid_grid, "f length mismatch");
    }
    ds.f = std::move(*f);
  } else {
    ds.f = build_f(theta);
  }
  for (int i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < nc; ++c) ds.df[i].push_back(spectral_derivative(ds.f[i][c]));
  ds.curve = std::move(curve);
  ds.u = std::move(u);
  ds.theta = std::move(theta);
  ds.id = std::move(id);
  return ds;
}

/// Consistency residuals of a dataset.
struct DatasetDiagnostics {
  double compatibility = 0.0;  // max |du/dt - 2 Re lambda|
  double link = 0.0;           // max |lambda_l - f_l lambda_0|, l = 1, 2
  double spectral_tail = 0.0;  // worst tail ratio over theta and f
  EmbeddingReport embedding;
};

inline DatasetDiagnostics diagnose(const BoundaryDataset& ds) {
  DatasetDiagnostics d;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    for (int l = 0; l < 3; ++l) {
      const auto du = spectral_derivative(ds.u[l][c]);
      for (std::size_t k = 0; k < du.size(); ++k)
        d.compatibility =
            std::max(d.compatibility, std::abs(du[k] - 2.0 * ds.theta[l][c][k].real()));
      d.spectral_tail = std::max(d.spectral_tail, spectral_tail(ds.theta[l][c]));
    }
    for (int l = 1; l < 3; ++l)
      for (std::size_t k = 0; k < ds.curve[c].n; ++k)
        d.link = std::max(d.link, std::abs(ds.theta[l][c][k] - ds.f[l - 1][c][k] * ds.theta[0][c][k]));
    for (int i = 0; i < 2; ++i) d.spectral_tail = std::max(d.spectral_tail, spectral_tail(ds.f[i][c]));
  }
  d.embedding = check_embedding(ds.f);
  return d;
}

/// A Dirichlet-to-Neumann operator acting on real boundary functions.
class DNOracle {
 public:
  virtual ~DNOracle() = default;
  virtual CurveField<double> apply(const CurveField<double>& v) const = 0;
};

/// Number of connected components of the surface, found by probing the DN
/// operator with a non-constant function supported on one boundary component.
/// A response is zero below 1e-8 * |probe| and nonzero above 1e-7 * |probe|.
inline int count_components(const DNOracle& oracle, const ClosedCurve& curve) {
  const std::size_t nc = curve.size();
  std::vector<bool> marked(nc, false);
  int count = 0;
  for (std::size_t start = 0; start < nc; ++start) {
    if (marked[start]) continue;
    CurveField<double> probe;
    for (std::size_t c = 0; c < nc; ++c)
      probe.push_back(c == start ? RealSamples::generate(curve[c].n, [](double t) { return std::cos(t); })
                                 : RealSamples(curve[c].n, 0.0));
    double probe_norm = 0.0;
    for (const auto& v : probe[start]) probe_norm = std::max(probe_norm, std::abs(v));
    const auto resp = oracle.apply(probe);
    for (std::size_t c = 0; c < nc; ++c) {
      double r = 0.0;
      for (const auto& v : resp[c]) r = std::max(r, std::abs(v));
      if (r > 1e-7 * probe_norm) {
        marked[c] = true;
      } else if (r >= 1e-8 * probe_norm) {
        throw error(errc::ambiguous_response,
                    "DN response on component " + std::to_string(c) + " is in the dead zone",
                    {static_cast<double>(c), r / probe_norm});
      }
    }
    marked[start] = true;
    ++count;
  }
  return count;
}

}  // namespace dnsurf

#endif
