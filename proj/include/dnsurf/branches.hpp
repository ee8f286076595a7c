#ifndef DNSURF_BRANCHES_HPP
#define DNSURF_BRANCHES_HPP

// Fibres of the surface over the z2-pencil: separation of moment tables into
// power sums and polynomial parts at infinity, root recovery, analytic
// continuation and point-cloud sampling.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dnsurf/boundary.hpp"
#include "dnsurf/error.hpp"
#include "dnsurf/moments.hpp"
#include "dnsurf/symmetric.hpp"

namespace dnsurf {

struct SeparationOptions {
  double tol = 1e-6;            // relative residual accepted as a fit
  int max_iter = 200;           // Levenberg-Marquardt iterations per start
  int restarts = 6;             // seeded random restarts for the nonlinear fit
  unsigned long long seed = 1;
  std::optional<std::vector<cplx>> init;  // starting fibre for every node
};

/// Power sums and polynomial parts at infinity on the nodes of a table.
struct SeparationResult {
  int p = 0;
  bool with_infinity = false;  // false when every P_m vanishes identically
  Eigen::MatrixXcd S;          // orders x nodes, S(m, nu) = sum_j h_j(nu)^m
  Eigen::MatrixXcd points;     // p x nodes, the fibre at each node
  std::vector<std::vector<cplx>> infinity_polys;  // P_m as monomial coefficients in xi
  double residual = 0.0;       // max |C - S - P| / max(1, max |C|)
  double condition = 1.0;      // condition number of the local Vandermonde matrix
};

namespace detail {

inline double table_scale(const MomentTable& t) {
  return std::max(1.0, t.values.cwiseAbs().maxCoeff());
}

inline cplx node_center(const std::vector<cplx>& nodes) { return nodes.front(); }

inline double node_radius(const std::vector<cplx>& nodes) {
  double r = 0.0;
  for (const auto& z : nodes) r = std::max(r, std::abs(z - nodes.front()));
  return r > 0.0 ? r : 1.0;
}

/// Power-sum matrix of a fibre matrix (p x A) for orders 0..B-1.
inline Eigen::MatrixXcd power_sum_matrix(const Eigen::MatrixXcd& h, int B, Eigen::Index A) {
  Eigen::MatrixXcd S(B, A);
  for (Eigen::Index nu = 0; nu < A; ++nu) {
    for (int m = 0; m < B; ++m) {
      cplx s = 0.0;
      for (Eigen::Index j = 0; j < h.rows(); ++j) s += std::pow(h(j, nu), m);
      S(m, nu) = s;
    }
  }
  return S;
}

/// Monomial coefficients of sum_k pi_k ((xi - c)/rho)^k.
inline std::vector<cplx> local_to_global(const Eigen::VectorXcd& pi, cplx c, double rho) {
  const Eigen::Index K = pi.size();
  std::vector<cplx> g(static_cast<std::size_t>(K), 0.0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const cplx a = pi(k) / std::pow(rho, static_cast<double>(k));
    double binom = 1.0;
    for (Eigen::Index i = 0; i <= k; ++i) {
      g[static_cast<std::size_t>(i)] += a * binom * std::pow(-c, static_cast<double>(k - i));
      binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
  }
  return g;
}

/// Fibre at each node from the first p moments alone (no part at infinity).
inline Eigen::MatrixXcd infinity_free_points(const MomentTable& t, int p) {
  const Eigen::Index A = static_cast<Eigen::Index>(t.nodes.size());
  Eigen::MatrixXcd h(p, A);
  for (Eigen::Index nu = 0; nu < A; ++nu) {
    std::vector<cplx> S(static_cast<std::size_t>(p));
    for (int m = 1; m <= p; ++m) S[static_cast<std::size_t>(m - 1)] = t.values(m, nu);
    const auto r = roots_monic(newton_girard(S));
    for (int j = 0; j < p; ++j) h(j, nu) = r.roots[static_cast<std::size_t>(j)];
  }
  return h;
}

/// Weighted Prony fit of order r at one node; keeps the p nodes whose weight
/// is closest to +1. Returns nothing when the table is too short.
inline std::optional<std::vector<cplx>> weighted_prony(const MomentTable& t, Eigen::Index nu, int r, int p) {
  const int B = t.orders;
  if (r < p || B - r < r || r == 0) return std::nullopt;
  Eigen::MatrixXcd H(B - r, r);
  Eigen::VectorXcd rhs(B - r);
  for (int m = 0; m < B - r; ++m) {
    for (int k = 0; k < r; ++k) H(m, k) = t.values(m + k, nu);
    rhs(m) = -t.values(m + r, nu);
  }
  Eigen::VectorXcd a = H.completeOrthogonalDecomposition().solve(rhs);
  std::vector<cplx> c(static_cast<std::size_t>(r + 1));
  for (int k = 0; k < r; ++k) c[static_cast<std::size_t>(k)] = a(k);
  c[static_cast<std::size_t>(r)] = 1.0;
  std::vector<cplx> z;
  try {
    z = roots_monic(c).roots;
  } catch (const error&) {
    return std::nullopt;
  }
  Eigen::MatrixXcd V(B, r);
  for (int m = 0; m < B; ++m)
    for (int k = 0; k < r; ++k) V(m, k) = std::pow(z[static_cast<std::size_t>(k)], m);
  Eigen::VectorXcd w = V.completeOrthogonalDecomposition().solve(t.values.col(nu));
  std::vector<int> idx(static_cast<std::size_t>(r));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a1, int b1) {
    return std::abs(w(a1) - cplx(1.0)) < std::abs(w(b1) - cplx(1.0));
  });
  std::vector<cplx> out;
  for (int j = 0; j < p; ++j) out.push_back(z[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])]);
  return out;
}

/// Variable-projection Levenberg-Marquardt for the reduced system
/// Pi_m (C_m - S_m(h)) = 0, m = 1..B-1, where Pi_m removes polynomials of
/// degree <= m in the local node coordinate.
class ReducedFit {
 public:
  ReducedFit(const MomentTable& t, int p) : t_(t), p_(p) {
    B_ = t.orders;
    A_ = static_cast<Eigen::Index>(t.nodes.size());
    const cplx c = node_center(t.nodes);
    rho_ = node_radius(t.nodes);
    V_.resize(A_, B_);
    for (Eigen::Index nu = 0; nu < A_; ++nu)
      for (int k = 0; k < B_; ++k) V_(nu, k) = std::pow((t.nodes[static_cast<std::size_t>(nu)] - c) / rho_, k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V_);
    const auto& sv = svd.singularValues();
    condition_ = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(condition_ < 1e12))
      throw error(errc::ill_conditioned_nodes, "local Vandermonde matrix is ill-conditioned", {condition_});
    qr_.compute(V_);
    Q_ = qr_.householderQ() * Eigen::MatrixXcd::Identity(A_, B_);
    proj_.resize(static_cast<std::size_t>(B_));
    for (int m = 0; m < B_; ++m) {
      const auto Qm = Q_.leftCols(m + 1);
      proj_[static_cast<std::size_t>(m)] = Eigen::MatrixXcd::Identity(A_, A_) - Qm * Qm.adjoint();
    }
  }

  double condition() const { return condition_; }

  /// Stacked projected residual for orders 0..B-1.
  Eigen::VectorXcd residual(const Eigen::MatrixXcd& h) const {
    const auto S = power_sum_matrix(h, B_, A_);
    Eigen::VectorXcd r(B_ * A_);
    for (int m = 0; m < B_; ++m) {
      Eigen::VectorXcd d = (t_.values.row(m) - S.row(m)).transpose();
      r.segment(m * A_, A_) = proj_[static_cast<std::size_t>(m)] * d;
    }
    return r;
  }

  /// Levenberg-Marquardt from h0; returns the improved fibre matrix.
  Eigen::MatrixXcd solve(Eigen::MatrixXcd h, int max_iter) const {
    const Eigen::Index nx = p_ * A_;
    if (nx == 0) return h;
    Eigen::VectorXcd r = residual(h);
    double cost = r.squaredNorm();
    double mu = -1.0;
    for (int it = 0; it < max_iter && cost > 0.0; ++it) {
      Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(B_ * A_, nx);
      for (int m = 1; m < B_; ++m) {
        const auto& P = proj_[static_cast<std::size_t>(m)];
        for (Eigen::Index nu = 0; nu < A_; ++nu)
          for (Eigen::Index j = 0; j < p_; ++j)
            J.block(m * A_, nu * p_ + j, A_, 1) =
                -P.col(nu) * (static_cast<double>(m) * std::pow(h(j, nu), m - 1));
      }
      const Eigen::MatrixXcd JhJ = J.adjoint() * J;
      const Eigen::VectorXcd g = J.adjoint() * r;
      if (mu < 0) mu = 1e-3 * std::max(1e-300, JhJ.diagonal().real().maxCoeff());
      bool improved = false;
      for (int tries = 0; tries < 12; ++tries) {
        Eigen::MatrixXcd M = JhJ;
        M.diagonal().array() += mu;
        Eigen::VectorXcd delta = M.ldlt().solve(-g);
        Eigen::MatrixXcd hn = h;
        for (Eigen::Index nu = 0; nu < A_; ++nu)
          for (Eigen::Index j = 0; j < p_; ++j) hn(j, nu) += delta(nu * p_ + j);
        Eigen::VectorXcd rn = residual(hn);
        const double cn = rn.squaredNorm();
        if (std::isfinite(cn) && cn < cost) {
          const double step = delta.norm();
          h = std::move(hn);
          r = std::move(rn);
          const double old = cost;
          cost = cn;
          mu = std::max(mu / 3.0, 1e-300);
          improved = true;
          if (step <= 1e-15 * (1.0 + h.norm()) || old - cn <= 1e-30 * old) return h;
          break;
        }
        mu *= 4.0;
      }
      if (!improved) break;
    }
    return h;
  }

  /// Coefficients of P_m in the local basis given a fitted fibre.
  std::vector<Eigen::VectorXcd> local_infinity(const Eigen::MatrixXcd& S) const {
    std::vector<Eigen::VectorXcd> out;
    const Eigen::MatrixXcd R = qr_.matrixQR().topLeftCorner(B_, B_).triangularView<Eigen::Upper>();
    for (int m = 0; m < B_; ++m) {
      Eigen::VectorXcd d = (t_.values.row(m) - S.row(m)).transpose();
      Eigen::VectorXcd coef = Q_.leftCols(m + 1).adjoint() * d;
      Eigen::VectorXcd pi = R.topLeftCorner(m + 1, m + 1).triangularView<Eigen::Upper>().solve(coef);
      out.push_back(pi);
    }
    return out;
  }

  double rho() const { return rho_; }

 private:
  const MomentTable& t_;
  int p_;
  int B_;
  Eigen::Index A_;
  double rho_;
  double condition_ = 1.0;
  Eigen::MatrixXcd V_, Q_;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr_;
  std::vector<Eigen::MatrixXcd> proj_;
};

inline double mean_c0(const MomentTable& t) {
  return t.values.row(0).mean().real();
}

}  // namespace detail

/// Splits C_m(xi) = S_m(xi) + P_m(xi) on the nodes of `t` for a fibre of size p.
/// When the order-0 moments equal p there are no points at infinity, every
/// P_m vanishes and the fibre follows from the first p moments; otherwise the
/// polynomial parts are eliminated by projection and the fibre is fitted.
inline SeparationResult separate_power_sums(const MomentTable& t, int p, const SeparationOptions& opt = {}) {
  if (p < 0) throw error(errc::precondition, "fibre size must be non-negative");
  const int B = t.orders;
  const Eigen::Index A = static_cast<Eigen::Index>(t.nodes.size());
  if (B < p + 1) throw error(errc::precondition, "moment table has too few orders for this p");
  const double scale = detail::table_scale(t);
  SeparationResult best;
  best.p = p;
  best.residual = std::numeric_limits<double>::infinity();

  // No points at infinity: P == 0.
  if (std::abs(detail::mean_c0(t) - p) < 1e-6 * scale) {
    SeparationResult res;
    res.p = p;
    res.points = p > 0 ? detail::infinity_free_points(t, p) : Eigen::MatrixXcd(0, A);
    res.S = detail::power_sum_matrix(res.points, B, A);
    res.residual = (t.values - res.S).cwiseAbs().maxCoeff() / scale;
    res.infinity_polys.assign(static_cast<std::size_t>(B), std::vector<cplx>{});
    for (int m = 0; m < B; ++m) res.infinity_polys[static_cast<std::size_t>(m)].assign(static_cast<std::size_t>(m + 1), 0.0);
    if (res.residual < opt.tol) return res;
    best = res;
  }

  if (A < B) throw error(errc::precondition, "moment table needs at least as many nodes as orders");
  detail::ReducedFit fit(t, p);
  std::vector<Eigen::MatrixXcd> starts;
  auto from_fibre = [&](const std::vector<cplx>& pts) {
    Eigen::MatrixXcd h(p, A);
    for (Eigen::Index nu = 0; nu < A; ++nu)
      for (int j = 0; j < p; ++j) h(j, nu) = pts[static_cast<std::size_t>(j)];
    return h;
  };
  if (opt.init && static_cast<int>(opt.init->size()) == p) starts.push_back(from_fibre(*opt.init));
  if (p > 0) {
    const int q = std::max(1, static_cast<int>(std::lround(p - detail::mean_c0(t))));
    for (int r = p + q; r >= p + 1; --r) {
      Eigen::MatrixXcd h(p, A);
      bool ok = true;
      for (Eigen::Index nu = 0; nu < A && ok; ++nu) {
        auto z = detail::weighted_prony(t, nu, r, p);
        if (!z) ok = false;
        else
          for (int j = 0; j < p; ++j) h(j, nu) = (*z)[static_cast<std::size_t>(j)];
      }
      if (ok) starts.push_back(h);
    }
    try {
      starts.push_back(detail::infinity_free_points(t, p));
    } catch (const error&) {
    }
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const double spread = std::max(1.0, std::pow(scale, 1.0 / std::max(1, B - 1)));
    for (int k = 0; k < opt.restarts; ++k) {
      std::vector<cplx> pts(static_cast<std::size_t>(p));
      for (auto& z : pts) z = spread * cplx(nd(rng), nd(rng));
      starts.push_back(from_fibre(pts));
    }
  } else {
    starts.push_back(Eigen::MatrixXcd(0, A));
  }

  Eigen::MatrixXcd fitted;
  double fitted_res = std::numeric_limits<double>::infinity();
  for (const auto& h0 : starts) {
    Eigen::MatrixXcd h = fit.solve(h0, opt.max_iter);
    const double res = fit.residual(h).cwiseAbs().maxCoeff() / scale;
    if (res < fitted_res) {
      fitted_res = res;
      fitted = std::move(h);
    }
    if (fitted_res < 1e-3 * opt.tol) break;
  }
  if (fitted_res < best.residual) {
    best.with_infinity = true;
    best.points = std::move(fitted);
    best.residual = fitted_res;
    best.S = detail::power_sum_matrix(best.points, B, A);
    best.condition = fit.condition();
    best.infinity_polys.clear();
    for (const auto& pi : fit.local_infinity(best.S))
      best.infinity_polys.push_back(detail::local_to_global(pi, detail::node_center(t.nodes), fit.rho()));
  }
  return best;
}

/// Smallest p <= p_max whose separation fits the table.
struct PEstimate {
  int p = 0;
  std::vector<double> residuals;  // indexed by p - p_lo
  int p_lo = 0;
};

inline PEstimate estimate_p_detailed(const MomentTable& t, int p_max, const SeparationOptions& opt = {}) {
  PEstimate est;
  est.p_lo = std::max(0, static_cast<int>(std::lround(detail::mean_c0(t))));
  for (int p = est.p_lo; p <= p_max; ++p) {
    if (2 * p + 1 > t.orders) break;
    double res = std::numeric_limits<double>::infinity();
    try {
      res = separate_power_sums(t, p, opt).residual;
    } catch (const error& e) {
      if (e.code() == errc::ill_conditioned_nodes) throw;
    }
    est.residuals.push_back(res);
    if (res < opt.tol) {
      est.p = p;
      return est;
    }
  }
  throw error(errc::estimate_failure, "no fibre size up to p_max fits the moments", est.residuals);
}

inline int estimate_p(const MomentTable& t, int p_max, const SeparationOptions& opt = {}) {
  return estimate_p_detailed(t, p_max, opt).p;
}

/// Fibre of the surface over z2 = xi.
struct BranchSet {
  cplx xi = 0.0;
  int p = 0;
  bool with_infinity = false;
  std::vector<cplx> points;      // z1-coordinates h_j
  std::vector<cplx> monic;       // coefficients of prod (X - h_j), low to high
  std::vector<std::vector<cplx>> infinity_polys;
  double residual = 0.0;         // separation residual
  double root_residual = 0.0;    // backward error of the roots
  double min_gap = std::numeric_limits<double>::infinity();
  std::vector<cplx> cluster;     // moment nodes, cluster[0] == xi
  Eigen::MatrixXcd cluster_points;  // p x nodes, rows aligned with `points`
};

struct FiberOptions {
  int p_max = 4;
  double cluster_factor = 0.1;  // node radius relative to the distance to f_2(boundary)
  int extra_orders = 3;         // orders B = 2p + extra_orders
  SeparationOptions separation;
};

/// Moment nodes: xi followed by A - 1 points on a circle about xi.
inline std::vector<cplx> node_cluster(const BoundaryDataset& ds, cplx xi, int A, double factor) {
  const double r = factor * distance_to_image(ds, xi);
  std::vector<cplx> nodes{xi};
  for (int k = 0; k < A - 1; ++k) nodes.push_back(xi + std::polar(r, two_pi * k / (A - 1)));
  return nodes;
}

namespace detail {
inline BranchSet assemble_fiber(cplx xi, const std::vector<cplx>& nodes, const SeparationResult& sep) {
  BranchSet b;
  b.xi = xi;
  b.p = sep.p;
  b.with_infinity = sep.with_infinity;
  b.residual = sep.residual;
  b.infinity_polys = sep.infinity_polys;
  b.cluster = nodes;
  std::vector<cplx> S;
  for (int m = 1; m <= sep.p; ++m) S.push_back(sep.S(m, 0));
  b.monic = newton_girard(S);
  auto roots = roots_monic(b.monic);
  b.root_residual = roots.residual;
  // Keep the fitted node values when they are available; they agree with the
  // roots to the fit accuracy and avoid a second ordering problem.
  std::vector<cplx> at0;
  for (int j = 0; j < sep.p; ++j) at0.push_back(sep.points(j, 0));
  if (sep.p > 0) {
    const auto mt = match_points(at0, roots.roots);
    b.points.resize(static_cast<std::size_t>(sep.p));
    for (int j = 0; j < sep.p; ++j) b.points[static_cast<std::size_t>(j)] = roots.roots[mt.perm[static_cast<std::size_t>(j)]];
  }
  for (std::size_t i = 0; i < b.points.size(); ++i)
    for (std::size_t j = i + 1; j < b.points.size(); ++j)
      b.min_gap = std::min(b.min_gap, std::abs(b.points[i] - b.points[j]));
  const Eigen::Index A = static_cast<Eigen::Index>(nodes.size());
  b.cluster_points.resize(sep.p, A);
  for (Eigen::Index nu = 0; nu < A; ++nu) {
    std::vector<cplx> col;
    for (int j = 0; j < sep.p; ++j) col.push_back(sep.points(j, nu));
    if (sep.p == 0) continue;
    const auto mt = match_points(b.points, col);
    for (int j = 0; j < sep.p; ++j) b.cluster_points(j, nu) = col[mt.perm[static_cast<std::size_t>(j)]];
  }
  return b;
}
}  // namespace detail

/// Fibre of size p over z2 = xi: moments on a node cluster, separation,
/// Newton-Girard and roots. Errors carry the failing stage.
inline BranchSet fiber(const BoundaryDataset& ds, cplx xi, int p, const FiberOptions& opt = {}) {
  const int B = 2 * p + opt.extra_orders;
  const int A = 2 * B;
  std::vector<cplx> nodes;
  MomentTable table;
  try {
    require_guard(ds, xi);
    nodes = node_cluster(ds, xi, A, opt.cluster_factor);
    table = build_moment_table(ds, nodes, B);
  } catch (const error& e) {
    throw e.with_stage("moments");
  }
  SeparationResult sep;
  try {
    sep = separate_power_sums(table, p, opt.separation);
  } catch (const error& e) {
    throw e.with_stage("separation");
  }
  if (!(sep.residual < opt.separation.tol))
    throw error(errc::estimate_failure, "moments do not fit a fibre of the requested size", {sep.residual})
        .with_stage("separation");
  try {
    return detail::assemble_fiber(xi, nodes, sep);
  } catch (const error& e) {
    throw e.with_stage("roots");
  }
}

/// Estimates p at xi and returns the fibre.
inline BranchSet fiber_auto(const BoundaryDataset& ds, cplx xi, const FiberOptions& opt = {}) {
  const int B = 2 * opt.p_max + opt.extra_orders;
  const int A = 2 * B;
  std::vector<cplx> nodes;
  MomentTable table;
  try {
    require_guard(ds, xi);
    nodes = node_cluster(ds, xi, A, opt.cluster_factor);
    table = build_moment_table(ds, nodes, B);
  } catch (const error& e) {
    throw e.with_stage("moments");
  }
  int p = 0;
  try {
    p = estimate_p(table, opt.p_max, opt.separation);
  } catch (const error& e) {
    throw e.with_stage("estimate");
  }
  return fiber(ds, xi, p, opt);
}

/// Fibre over the line xi0 + xi1 z1 + z2 = 0.
inline BranchSet line_fiber(const BoundaryDataset& ds, cplx xi0, cplx xi1, int p, const FiberOptions& opt = {}) {
  return fiber(ds.sheared(xi1), -xi0, p, opt);
}

/// Branches followed along a path; points[k][j] is track j at vertex k.
struct BranchTrack {
  std::vector<cplx> vertices;
  std::vector<std::vector<cplx>> points;
  std::vector<BranchSet> fibers;  // aligned with `points`
  int refinements = 0;            // number of inserted midpoints
  double min_separation = std::numeric_limits<double>::infinity();
};

struct ContinuationOptions {
  FiberOptions fiber;
  int max_halvings = 6;
  double ambiguity_ratio = 2.0;  // second-best / best matching cost must exceed this
  double collision_floor = 1e-8;
};

namespace detail {
inline BranchSet reorder(const BranchSet& b, const std::vector<std::size_t>& perm) {
  BranchSet out = b;
  for (std::size_t j = 0; j < perm.size(); ++j) {
    out.points[j] = b.points[perm[j]];
    if (b.cluster_points.cols() > 0)
      out.cluster_points.row(static_cast<Eigen::Index>(j)) = b.cluster_points.row(static_cast<Eigen::Index>(perm[j]));
  }
  return out;
}
}  // namespace detail

/// Continues the p branches along the polyline `path`, halving steps where
/// the matching between consecutive fibres is ambiguous.
inline BranchTrack continue_branches(const BoundaryDataset& ds, const std::vector<cplx>& path, int p,
                                     const ContinuationOptions& opt = {}) {
  if (path.size() < 2) throw error(errc::precondition, "path needs at least two vertices");
  BranchTrack tr;
  auto fib = [&](cplx xi, const std::vector<cplx>* init) {
    FiberOptions fo = opt.fiber;
    if (init) fo.separation.init = *init;
    return fiber(ds, xi, p, fo);
  };
  auto push = [&](cplx xi, BranchSet b) {
    if (b.min_gap < opt.collision_floor)
      throw error(errc::branch_collision, "branches collide along the path", {xi.real(), xi.imag(), b.min_gap});
    tr.min_separation = std::min(tr.min_separation, b.min_gap);
    tr.vertices.push_back(xi);
    tr.points.push_back(b.points);
    tr.fibers.push_back(std::move(b));
  };
  push(path[0], fib(path[0], nullptr));

  // Advances from the last accepted vertex to `target`, refining as needed.
  std::function<void(cplx, int)> advance = [&](cplx target, int depth) {
    const auto prev = tr.fibers.back();
    BranchSet next = fib(target, &prev.points);
    const auto mt = match_points(prev.points, next.points);
    const bool ambiguous = p > 1 && mt.second <= opt.ambiguity_ratio * mt.cost;
    if (ambiguous) {
      if (depth >= opt.max_halvings)
        throw error(errc::branch_collision, "branch matching stays ambiguous after step halving",
                    {target.real(), target.imag(), mt.cost, mt.second});
      const cplx mid = 0.5 * (tr.vertices.back() + target);
      ++tr.refinements;
      advance(mid, depth + 1);
      advance(target, depth + 1);
      return;
    }
    push(target, detail::reorder(next, mt.perm));
  };
  for (std::size_t k = 1; k < path.size(); ++k) advance(path[k], 0);
  return tr;
}

/// Permutation induced by a closed path: track j ends at starting branch perm[j].
inline std::vector<std::size_t> monodromy(const BranchTrack& tr) {
  if (tr.points.empty()) return {};
  return match_points(tr.points.back(), tr.points.front()).perm;
}

/// Number of worker threads: explicit value, else RIEMANN_DN_THREADS, else 1.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RIEMANN_DN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

struct CloudPoint {
  cplx z1 = 0.0, z2 = 0.0;
  int branch = 0;
  std::vector<cplx> forms;  // optional form values v_l at the point
};

struct SkippedNode {
  cplx xi = 0.0;
  std::string reason;
};

struct PointCloud {
  std::vector<CloudPoint> points;
  std::vector<SkippedNode> skipped;
  std::vector<BranchSet> fibers;  // one per accepted node, labels in branch order
};

struct SampleOptions {
  FiberOptions fiber;
  int threads = 0;
  double collision_floor = 1e-6;  // relative to the fibre scale
};

/// Union of fibres over the grid, labelled by continuation along a minimum
/// spanning tree rooted at the first accepted node.
inline PointCloud sample_surface(const BoundaryDataset& ds, const std::vector<cplx>& grid,
                                 const SampleOptions& opt = {}) {
  const std::size_t n = grid.size();
  std::vector<std::optional<BranchSet>> fib(n);
  std::vector<std::string> why(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        auto b = fiber_auto(ds, grid[i], opt.fiber);
        double scale = 1.0;
        for (const auto& z : b.points) scale = std::max(scale, std::abs(z));
        if (b.min_gap < opt.collision_floor * scale) {
          why[i] = "near-discriminant";
        } else {
          fib[i] = std::move(b);
        }
      } catch (const error& e) {
        why[i] = std::string(to_string(e.code())) + (e.stage().empty() ? "" : " (" + e.stage() + ")");
      }
    }
  };
  const int nt = std::max(1, std::min<int>(resolve_threads(opt.threads), static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  PointCloud cloud;
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < n; ++i) {
    if (fib[i]) ok.push_back(i);
    else cloud.skipped.push_back({grid[i], why[i]});
  }
  if (ok.empty()) return cloud;
  // Prim's algorithm over accepted nodes.
  const std::size_t m = ok.size();
  std::vector<double> dist(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(m, m);
  std::vector<bool> in(m, false);
  std::vector<std::vector<int>> labels(m);
  dist[0] = 0.0;
  int next_label = 0;
  for (std::size_t it = 0; it < m; ++it) {
    std::size_t u = m;
    for (std::size_t k = 0; k < m; ++k)
      if (!in[k] && (u == m || dist[k] < dist[u])) u = k;
    in[u] = true;
    const auto& bu = *fib[ok[u]];
    if (parent[u] == m || fib[ok[parent[u]]]->p != bu.p) {
      for (int j = 0; j < bu.p; ++j) labels[u].push_back(next_label++);
    } else {
      const auto& bp = *fib[ok[parent[u]]];
      const auto mt = match_points(bp.points, bu.points);
      labels[u].assign(static_cast<std::size_t>(bu.p), 0);
      for (std::size_t j = 0; j < mt.perm.size(); ++j) labels[u][mt.perm[j]] = labels[parent[u]][j];
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (in[k]) continue;
      const double d = std::abs(grid[ok[k]] - grid[ok[u]]);
      if (d < dist[k]) {
        dist[k] = d;
        parent[k] = u;
      }
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto& b = *fib[ok[k]];
    for (int j = 0; j < b.p; ++j)
      cloud.points.push_back({b.points[static_cast<std::size_t>(j)], b.xi, labels[k][static_cast<std::size_t>(j)], {}});
    cloud.fibers.push_back(b);
  }
  return cloud;
}

}  // namespace dnsurf

#endif
