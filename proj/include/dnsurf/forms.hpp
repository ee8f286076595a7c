#ifndef DNSURF_FORMS_HPP
#define DNSURF_FORMS_HPP

// Values of the holomorphic forms on the fibres and their periods.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

#include "dnsurf/branches.hpp"
#include "dnsurf/moments.hpp"

namespace dnsurf {

/// (1/2 pi i) int f_1^m theta u_l / (f_2 - xi).
inline cplx theta_moment(const BoundaryDataset& ds, int l, int m, cplx xi) {
  if (l < 0 || l > 2) throw error(errc::precondition, "form index must be 0, 1 or 2");
  require_guard(ds, xi);
  cplx acc = 0.0;
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    const auto& f1 = ds.f[0][c];
    const auto& f2 = ds.f[1][c];
    const auto& th = ds.theta[l][c];
    cplx s = 0.0;
    for (std::size_t k = 0; k < f1.size(); ++k) s += std::pow(f1[k], m) * th[k] / (f2[k] - xi);
    acc += static_cast<double>(ds.curve[c].orientation) * s * (two_pi / static_cast<double>(f1.size()));
  }
  return acc / (two_pi * I);
}

/// Values v_j = (d u_l / d F_2)(h_j) on a fibre and the polynomial parts Q_m.
struct FormFiber {
  int l = 0;
  std::vector<cplx> values;               // aligned with BranchSet::points
  std::vector<std::vector<cplx>> infinity_polys;  // Q_m, monomial coefficients in xi
  double residual = 0.0;
  double min_singular = 0.0;               // relative smallest singular value
};

/// Solves sum_j h_j^m v_j + Q_m = T_m on the fibre's node cluster. Without
/// points at infinity Q vanishes and only the centre node is used.
inline FormFiber recover_form_values(const BoundaryDataset& ds, int l, const BranchSet& b) {
  FormFiber out;
  out.l = l;
  const int p = b.p;
  const Eigen::Index A = static_cast<Eigen::Index>(b.cluster.size());
  const int B = std::max(p + 1, static_cast<int>(A / 2));
  if (p == 0) {
    out.infinity_polys.assign(static_cast<std::size_t>(B), {});
    return out;
  }
  if (!b.with_infinity) {
    Eigen::MatrixXcd V(B, p);
    Eigen::VectorXcd T(B);
    for (int m = 0; m < B; ++m) {
      T(m) = theta_moment(ds, l, m, b.xi);
      for (int j = 0; j < p; ++j) V(m, j) = std::pow(b.points[static_cast<std::size_t>(j)], m);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.min_singular = sv(sv.size() - 1) / sv(0);
    if (!(out.min_singular > 1e-12))
      throw error(errc::ill_posed_fiber, "fibre Vandermonde system is rank deficient", {out.min_singular});
    Eigen::VectorXcd v = svd.solve(T);
    out.residual = (V * v - T).cwiseAbs().maxCoeff() / std::max(1.0, T.cwiseAbs().maxCoeff());
    out.values.assign(v.data(), v.data() + p);
    out.infinity_polys.assign(static_cast<std::size_t>(B), {});
    for (int m = 0; m < B; ++m) out.infinity_polys[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m + 1), 0.0);
    return out;
  }

  const cplx c = b.cluster.front();
  double rho = 0.0;
  for (const auto& z : b.cluster) rho = std::max(rho, std::abs(z - c));
  if (rho == 0.0) rho = 1.0;
  const Eigen::Index nv = p * A;
  const Eigen::Index nq = static_cast<Eigen::Index>(B) * (B + 1) / 2;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(B * A, nv + nq);
  Eigen::VectorXcd T(B * A);
  for (Eigen::Index nu = 0; nu < A; ++nu) {
    const cplx xi = b.cluster[static_cast<std::size_t>(nu)];
    const cplx t = (xi - c) / rho;
    for (int m = 0; m < B; ++m) {
      const Eigen::Index row = m * A + nu;
      T(row) = theta_moment(ds, l, m, xi);
      for (int j = 0; j < p; ++j) M(row, nu * p + j) = std::pow(b.cluster_points(j, nu), m);
      const Eigen::Index q0 = nv + static_cast<Eigen::Index>(m) * (m + 1) / 2;
      for (int k = 0; k <= m; ++k) M(row, q0 + k) = std::pow(t, k);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.min_singular = sv(sv.size() - 1) / sv(0);
  if (!(out.min_singular > 1e-13))
    throw error(errc::ill_posed_fiber, "form recovery system is rank deficient", {out.min_singular});
  Eigen::VectorXcd x = svd.solve(T);
  out.residual = (M * x - T).cwiseAbs().maxCoeff() / std::max(1.0, T.cwiseAbs().maxCoeff());
  for (int j = 0; j < p; ++j) out.values.push_back(x(j));
  for (int m = 0; m < B; ++m) {
    const Eigen::Index q0 = nv + static_cast<Eigen::Index>(m) * (m + 1) / 2;
    out.infinity_polys.push_back(detail::local_to_global(x.segment(q0, m + 1), c, rho));
  }
  return out;
}

struct PeriodResult {
  cplx period = 0.0;        // integral of the form along the closed lift
  int loops = 0;            // passes around the base loop needed to close the lift
  std::vector<std::size_t> monodromy;
};

/// Integral of (d u_l / d F_2) dF_2 along the lift of a closed loop in the
/// xi-plane starting on branch `branch`. The loop is given by uniformly
/// parametrised vertices (the closing vertex may be omitted) and is traversed
/// repeatedly until the lift closes. Uniform loops with an even number (>= 16)
/// of vertices use the periodic trapezoid rule with a spectral derivative of
/// the loop; otherwise chords are used.
inline PeriodResult period_check(const BoundaryDataset& ds, int l, std::vector<cplx> loop, int p,
                                 std::size_t branch, const ContinuationOptions& opt = {}) {
  if (loop.size() < 3) throw error(errc::precondition, "loop needs at least three vertices");
  if (std::abs(loop.front() - loop.back()) <= 1e-14 * (1.0 + std::abs(loop.front()))) loop.pop_back();
  if (branch >= static_cast<std::size_t>(p)) throw error(errc::precondition, "branch index out of range");
  const std::size_t L = loop.size();
  std::vector<cplx> closed = loop;
  closed.push_back(loop.front());
  const auto tr = continue_branches(ds, closed, p, opt);
  std::vector<FormFiber> forms;
  for (const auto& f : tr.fibers) forms.push_back(recover_form_values(ds, l, f));
  PeriodResult res;
  res.monodromy = monodromy(tr);
  const bool spectral = tr.refinements == 0 && L >= 16 && L % 2 == 0;
  ComplexSamples dloop;
  if (spectral) dloop = spectral_derivative(ComplexSamples(loop));
  std::size_t j = branch;
  do {
    if (spectral) {
      for (std::size_t k = 0; k < L; ++k) res.period += forms[k].values[j] * dloop[k] * (two_pi / static_cast<double>(L));
    } else {
      for (std::size_t k = 0; k + 1 < tr.vertices.size(); ++k) {
        const cplx dxi = tr.vertices[k + 1] - tr.vertices[k];
        res.period += 0.5 * (forms[k].values[j] + forms[k + 1].values[j]) * dxi;
      }
    }
    j = res.monodromy[j];
    ++res.loops;
  } while (j != branch && res.loops <= p);
  return res;
}

}  // namespace dnsurf

#endif
