#ifndef DNSURF_SHOCKWAVE_HPP
#define DNSURF_SHOCKWAVE_HPP

// Shock-wave functions h_y = h_x h as truncated series: residuals, the
// symmetric system of their coefficients, the operators D_H and L_H, the
// shock polynomial built from a trace H, the characterization of a trace G up
// to an affine term, and the elementary-fraction decomposition of that term.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dnsurf/error.hpp"
#include "dnsurf/series.hpp"
#include "dnsurf/symmetric.hpp"

namespace dnsurf {

// ---------------------------------------------------------------- residuals

/// h_y - h_x h, exact to order K - 1.
inline Series2 shock_residual(const Series2& h) { return h.dy() - h.dx() * h; }

/// Finite-difference derivatives on a 5 x 5 stencil centred at (x0, y0).
struct StencilDerivatives {
  cplx value = 0.0, hx = 0.0, hy = 0.0, hxx = 0.0, hyy = 0.0;
  double step = 0.0;
  cplx shock_residual() const { return hy - hx * value; }
};

/// samples[a][b] = h(x0 + (a - 2) step, y0 + (b - 2) step).
inline StencilDerivatives stencil_derivatives(const std::array<std::array<cplx, 5>, 5>& samples, double step) {
  auto d1 = [&](cplx m2, cplx m1, cplx p1, cplx p2) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * step); };
  auto d2 = [&](cplx m2, cplx m1, cplx c, cplx p1, cplx p2) {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * step * step);
  };
  const auto& s = samples;
  StencilDerivatives d;
  d.step = step;
  d.value = s[2][2];
  d.hx = d1(s[0][2], s[1][2], s[3][2], s[4][2]);
  d.hy = d1(s[2][0], s[2][1], s[2][3], s[2][4]);
  d.hxx = d2(s[0][2], s[1][2], s[2][2], s[3][2], s[4][2]);
  d.hyy = d2(s[2][0], s[2][1], s[2][2], s[2][3], s[2][4]);
  return d;
}

inline StencilDerivatives stencil_derivatives(const std::function<cplx(cplx, cplx)>& h, cplx x0, cplx y0,
                                              double step) {
  std::array<std::array<cplx, 5>, 5> s{};
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) s[a][b] = h(x0 + static_cast<double>(a - 2) * step, y0 + static_cast<double>(b - 2) * step);
  return stencil_derivatives(s, step);
}

struct SymmetricResidual {
  Series2 closing;             // sigma_p sigma_{1,x} + sigma_{p,y}
  std::vector<Series2> chain;  // sigma_k sigma_{1,x} + sigma_{k,y} - sigma_{k+1,x}, k = 1..p-1
  double max_abs() const {
    double m = closing.max_abs();
    for (const auto& c : chain) m = std::max(m, c.max_abs());
    return m;
  }
};

inline SymmetricResidual symmetric_system_residual(const std::vector<Series2>& sigma) {
  if (sigma.empty()) throw error(errc::precondition, "symmetric system needs p >= 1");
  const Series2 s1x = sigma.front().dx();
  SymmetricResidual r;
  r.closing = sigma.back() * s1x + sigma.back().dy();
  for (std::size_t k = 0; k + 1 < sigma.size(); ++k) r.chain.push_back(sigma[k] * s1x + sigma[k].dy() - sigma[k + 1].dx());
  return r;
}

// ---------------------------------------------------------------- operators

/// D_H u = u_y - H_x u.
inline Series2 op_D(const Series2& H, const Series2& u) { return u.dy() - H.dx() * u; }

/// e^{A} d/dy (u e^{-A}) with A = int_0^y H_x dy.
inline Series2 op_D_exponential(const Series2& H, const Series2& u) {
  const Series2 A = H.dx().integrate_y();
  return (u * (-A).exp()).dy() * A.exp();
}

/// L_H u = int_0^x D_H u dx.
inline Series2 op_L(const Series2& H, const Series2& u) { return op_D(H, u).integrate_x(); }

// ---------------------------------------------------------------- polynomial

struct ShockPolynomial {
  int p = 0;
  std::vector<Series2> s;   // T = X^p + sum_k s_k X^{p-k}
  Series2 residual;         // D_H s_p
  double residual_max = 0.0;
  Series2 discriminant;
  double discriminant_max = 0.0;
  bool discriminant_ok = false;
};

namespace detail {

/// Determinant of a small square matrix of series by expansion over column subsets.
inline Series2 series_determinant(const std::vector<std::vector<Series2>>& M, int order) {
  const int p = static_cast<int>(M.size());
  const unsigned full = (1u << p) - 1u;
  std::vector<Series2> D(static_cast<std::size_t>(full + 1), Series2(order));
  D[full] = Series2::constant(order, 1.0);
  for (unsigned mask = full; mask-- > 0;) {
    const int row = __builtin_popcount(mask);
    Series2 acc(order);
    int pos = 0;
    for (int c = 0; c < p; ++c) {
      if (mask & (1u << c)) continue;
      const Series2 term = M[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)] * D[mask | (1u << c)];
      acc = (pos % 2 == 0) ? acc + term : acc - term;
      ++pos;
    }
    D[mask] = acc;
  }
  return D[0];
}

}  // namespace detail

/// Discriminant of X^p + sum s_k X^{p-k} as the Hankel determinant of the
/// power sums of its roots.
inline Series2 discriminant(const std::vector<Series2>& s) {
  const int p = static_cast<int>(s.size());
  if (p == 0) throw error(errc::precondition, "empty shock polynomial");
  if (p > 12) throw error(errc::precondition, "discriminant limited to p <= 12");
  int K = s.front().order();
  for (const auto& v : s) K = std::min(K, v.order());
  std::vector<Series2> e;
  for (int k = 1; k <= p; ++k) e.push_back((k % 2 == 0 ? 1.0 : -1.0) * s[static_cast<std::size_t>(k - 1)].truncated(K));
  const auto S = power_sums_from_elementary(e, static_cast<std::size_t>(2 * p - 2), Series2(K));
  auto power = [&](int k) { return k == 0 ? Series2::constant(K, static_cast<double>(p)) : S[static_cast<std::size_t>(k - 1)]; };
  std::vector<std::vector<Series2>> M(static_cast<std::size_t>(p), std::vector<Series2>(static_cast<std::size_t>(p)));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) M[i][j] = power(i + j);
  return detail::series_determinant(M, K);
}

inline double discriminant_scale(const std::vector<Series2>& s) {
  double m = 1.0;
  for (const auto& v : s) m = std::max(m, v.max_abs());
  const int p = static_cast<int>(s.size());
  return std::pow(m, p * (p - 1));
}

/// s_1 = -H, s_{k+1} = L_H s_k + lambda_k(y), residual D_H s_p. Does not throw
/// on a failed test; see build_shock_polynomial.
inline ShockPolynomial shock_polynomial(const Series2& H, const std::vector<Series1>& lambdas) {
  ShockPolynomial T;
  T.p = static_cast<int>(lambdas.size()) + 1;
  const int K = H.order();
  T.s.push_back(-H);
  for (const auto& lam : lambdas) T.s.push_back(op_L(H, T.s.back()) + Series2::lift_y(lam, K));
  T.residual = op_D(H, T.s.back());
  T.residual_max = T.residual.max_abs();
  T.discriminant = discriminant(T.s);
  T.discriminant_max = T.discriminant.max_abs();
  T.discriminant_ok = T.discriminant_max > 1e-8 * discriminant_scale(T.s);
  return T;
}

/// As shock_polynomial, throwing when H is not a p-shock trace (relative
/// residual above tol) or the discriminant vanishes within truncation.
inline ShockPolynomial build_shock_polynomial(const Series2& H, const std::vector<Series1>& lambdas,
                                              double tol = 1e-10) {
  auto T = shock_polynomial(H, lambdas);
  const double scale = std::max(1.0, H.max_abs());
  if (T.residual_max > tol * std::pow(scale, T.p + 1))
    throw error(errc::not_a_shock_trace, "trace fails the shock polynomial equation", {T.residual_max});
  if (!T.discriminant_ok)
    throw error(errc::degenerate_discriminant, "discriminant vanishes within truncation", {T.discriminant_max});
  return T;
}

// ---------------------------------------------------------------- characterize

struct CharacterizeOptions {
  int p_max = 4;
  double tol = 1e-10;         // relative residual for acceptance
  double affine_tol = 1e-10;  // relative size of x^i y^j, i >= 2, below which G counts as affine
  double radius = 0.0;        // polydisc radius the coefficients were sampled on, 0 if unknown
  int restarts = 4;
  int max_iter = 60;
  std::uint64_t seed = 1;
};

enum class Verdict { decomposed, negative };

struct Characterization {
  Verdict verdict = Verdict::negative;
  int p = 0;
  Series1 a, b;
  std::vector<Series1> lambda;
  ShockPolynomial polynomial;
  double residual = 0.0;         // relative max |D_H s_p|
  double trace_residual = 0.0;   // max |G + s_1 + L| to order K - 2
  bool unique = true;
  int solutions = 0;             // distinct accepted solutions among the starts
  double jacobian_min_singular = 0.0;
  std::vector<double> residual_by_p;
};

namespace detail {

struct ShockUnknowns {
  Series1 a, b;
  std::vector<Series1> lam;
};

class ShockSolver {
 public:
  ShockSolver(const Series2& G, int p) : G_(G), p_(p), K_(G.order()) {
    u_.a = Series1(K_ - 1);
    u_.b = Series1(K_);
    u_.lam.assign(static_cast<std::size_t>(p - 1), Series1(K_));
  }

  int free_count() const { return 2 * p_ + p_ * (p_ - 1) / 2; }

  Series2 trace(const ShockUnknowns& u, int order = -1) const {
    const int o = order < 0 ? K_ : order;
    return G_.truncated(o) + Series2::x_times(u.a, o) + Series2::lift_y(u.b, o);
  }

  /// D_H s_p; computing at order o gives the coefficients of degree < o exactly.
  Series2 residual(const ShockUnknowns& u, int order = -1) const {
    const int o = order < 0 ? K_ : order;
    const Series2 H = trace(u, o);
    Series2 s = -H;
    for (const auto& lam : u.lam) s = op_L(H, s).truncated(o) + Series2::lift_y(lam, o);
    return op_D(H, s);
  }

  /// Coefficient slot fixed by row (i, j) of the residual.
  cplx& slot(ShockUnknowns& u, int i, int j) const {
    if (i == p_) return u.a[j + p_];
    if (i == p_ - 1) return u.b[j + p_];
    const int k = p_ - 1 - i;
    return u.lam[static_cast<std::size_t>(k - 1)][j + p_ - k];
  }

  cplx& free_slot(ShockUnknowns& u, int idx) const {
    if (idx < p_) return u.a[idx];
    idx -= p_;
    if (idx < p_) return u.b[idx];
    idx -= p_;
    for (int k = 1; k < p_; ++k) {
      if (idx < p_ - k) return u.lam[static_cast<std::size_t>(k - 1)][idx];
      idx -= p_ - k;
    }
    throw error(errc::precondition, "free constant index out of range");
  }

  /// Fills every non-free coefficient level by level from the free constants.
  ShockUnknowns complete(const Eigen::VectorXcd& c) const {
    ShockUnknowns u = u_;
    for (int k = 0; k < c.size(); ++k) free_slot(u, k) = c(k);
    for (int j = 0; j + 1 <= K_; ++j) {
      std::vector<int> rows;
      for (int i = 0; i <= p_; ++i)
        if (i + j <= K_ - 1) rows.push_back(i);
      if (rows.empty()) break;
      const auto n = static_cast<Eigen::Index>(rows.size());
      // Each level is affine in its own unknowns, so a unit step gives the
      // exact Jacobian.
      const int o = std::min(K_, p_ + j + 1);
      const Series2 r0 = residual(u, o);
      Eigen::VectorXcd f(n);
      for (Eigen::Index k = 0; k < n; ++k) f(k) = r0.at(rows[k], j);
      Eigen::MatrixXcd J(n, n);
      for (Eigen::Index c2 = 0; c2 < n; ++c2) {
        ShockUnknowns v = u;
        slot(v, rows[c2], j) += 1.0;
        const Series2 r1 = residual(v, o);
        for (Eigen::Index k = 0; k < n; ++k) J(k, c2) = r1.at(rows[k], j) - f(k);
      }
      const Eigen::VectorXcd d = J.colPivHouseholderQr().solve(-f);
      for (Eigen::Index c2 = 0; c2 < n; ++c2) slot(u, rows[c2], j) += d(c2);
    }
    return u;
  }

  Eigen::VectorXcd residual_vector(const ShockUnknowns& u) const {
    const Series2 r = residual(u);
    const int R = r.order();
    Eigen::VectorXcd v((R + 1) * (R + 2) / 2);
    Eigen::Index k = 0;
    for (int d = 0; d <= R; ++d)
      for (int i = 0; i <= d; ++i) v(k++) = r.at(i, d - i);
    return v;
  }

  /// Central differences; F is holomorphic in c.
  Eigen::MatrixXcd jacobian(const Eigen::VectorXcd& c, const Eigen::VectorXcd& f0) const {
    Eigen::MatrixXcd J(f0.size(), c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      Eigen::VectorXcd cp = c, cm = c;
      const double h = 1e-5 * std::max(1.0, std::abs(c(k)));
      cp(k) += h;
      cm(k) -= h;
      J.col(k) = (residual_vector(complete(cp)) - residual_vector(complete(cm))) / (2.0 * h);
    }
    return J;
  }

  /// Gauss-Newton with SVD steps; falls back to damped steps when the full
  /// step increases the cost more than fourfold. Returns the best iterate.
  Eigen::VectorXcd solve(Eigen::VectorXcd c, int max_iter, double target) const {
    Eigen::VectorXcd f = residual_vector(complete(c));
    double cost = f.norm();
    Eigen::VectorXcd best = c;
    double best_cost = cost;
    for (int it = 0; it < max_iter && best_cost > target; ++it) {
      const Eigen::MatrixXcd J = jacobian(c, f);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd sv = svd.singularValues();
      const Eigen::VectorXcd Utf = svd.matrixU().adjoint() * f;
      auto step = [&](double mu) {
        Eigen::VectorXcd w(sv.size());
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
          const double s = sv(k);
          w(k) = (s > 1e-14 * sv(0)) ? -Utf(k) * s / (s * s + mu) : cplx(0.0);
        }
        return Eigen::VectorXcd(svd.matrixV() * w);
      };
      bool moved = false;
      for (int t = 0; t < 14 && !moved; ++t) {
        const double mu = t == 0 ? 0.0 : sv(0) * sv(0) * std::pow(10.0, t - 13);
        const Eigen::VectorXcd d = step(mu);
        const Eigen::VectorXcd cn = c + d;
        const Eigen::VectorXcd fn = residual_vector(complete(cn));
        const double cn2 = fn.norm();
        if (!std::isfinite(cn2)) continue;
        if ((t == 0 && cn2 < 4.0 * cost) || cn2 < cost) {
          moved = d.norm() > 1e-15 * (1.0 + c.norm());
          c = cn;
          f = fn;
          cost = cn2;
          if (cost < best_cost) {
            best_cost = cost;
            best = c;
          }
          if (!moved) break;
        }
      }
      if (!moved) break;
    }
    return best;
  }

  int order() const { return K_; }

 private:
  Series2 G_;
  int p_;
  int K_;
  ShockUnknowns u_;
};

}  // namespace detail

namespace detail {

/// Scale sigma with |G_ij| sigma^{i+j} roughly flat in the total degree.
inline double growth_scale(const Series2& G) {
  const int K = G.order();
  std::vector<double> M(static_cast<std::size_t>(K + 1), 0.0);
  for (int d = 0; d <= K; ++d)
    for (int i = 0; i <= d; ++i) M[d] = std::max(M[d], std::abs(G.at(i, d - i)));
  double ref = std::max(M[0], K >= 1 ? M[1] : 0.0);
  if (ref == 0.0) ref = *std::max_element(M.begin(), M.end());
  if (ref == 0.0) return 1.0;
  double r = 0.0;
  for (int d = 1; d <= K; ++d)
    if (M[d] > 0.0) r = std::max(r, std::pow(M[d] / ref, 1.0 / d));
  return r == 0.0 ? 1.0 : std::clamp(1.0 / r, 1e-3, 1e3);
}

inline Series2 rescale(const Series2& G, double s) {
  Series2 r(G.order());
  for (int d = 0; d <= G.order(); ++d)
    for (int i = 0; i <= d; ++i) r.at(i, d - i) = G.at(i, d - i) * std::pow(s, d);
  return r;
}

/// u_n s^{n + shift}.
inline Series1 rescale(const Series1& u, double s, int shift) {
  Series1 r(u.order());
  for (int n = 0; n <= u.order(); ++n) r[n] = u[n] * std::pow(s, n + shift);
  return r;
}

/// max |D_H s_p| relative to the larger of its two terms.
inline double relative_shock_residual(const Series2& H, const Series2& sp) {
  const Series2 a = sp.dy(), b = H.dx() * sp;
  const double scale = std::max({a.max_abs(), b.max_abs(), 1e-300});
  return (a - b).max_abs() / scale;
}

}  // namespace detail

/// Affinity in x judged on G(r x, r y), relative to its largest coefficient.
inline bool is_affine_in_x(const Series2& G, double r = 1.0, double tol = 1e-10) {
  const Series2 Gr = detail::rescale(G, r);
  return Gr.affine_in_x(tol * std::max(Gr.max_abs(), 1e-300));
}

/// Searches the smallest p <= p_max for which G + x a(y) + b(y) is the trace
/// of a p-valued shock wave, solving the coefficients order by order. The
/// search runs on G(sigma x, sigma y), which leaves the equation and the form
/// of the affine term unchanged. Throws a precondition error when G is affine
/// in x or the order is too low.
inline Characterization characterize(const Series2& G, const CharacterizeOptions& opt = {}) {
  const int K = G.order();
  if (opt.p_max < 1) throw error(errc::precondition, "p_max must be at least 1");
  if (K < 2 * opt.p_max + 2) throw error(errc::precondition, "series order must be at least 2 p_max + 2", {double(K)});
  if (is_affine_in_x(G, opt.radius > 0.0 ? opt.radius : 1.0, opt.affine_tol))
    throw error(errc::precondition, "G is affine in x");

  const double sigma = opt.radius > 0.0 ? opt.radius : detail::growth_scale(G);
  const Series2 Gs = detail::rescale(G, sigma);
  const double term_scale = std::max({Gs.dy().max_abs(), (Gs.dx() * Gs).max_abs(), 1e-300});
  const double sscale = std::max(Gs.max_abs(), 1e-300);

  Characterization out;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int p = 1; p <= opt.p_max; ++p) {
    const detail::ShockSolver solver(Gs, p);
    const int nf = solver.free_count();
    auto rel = [&](const detail::ShockUnknowns& u) {
      const Series2 H = solver.trace(u);
      Series2 s = -H;
      for (const auto& lam : u.lam) s = op_L(H, s) + Series2::lift_y(lam, K);
      return detail::relative_shock_residual(H, s);
    };
    std::vector<Eigen::VectorXcd> accepted;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd best_c;
    for (int start = 0; start <= opt.restarts; ++start) {
      Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(nf);
      if (start > 0)
        for (Eigen::Index k = 0; k < nf; ++k) c0(k) = sscale * cplx(nd(rng), nd(rng));
      const Eigen::VectorXcd c = solver.solve(c0, opt.max_iter, 1e-3 * opt.tol * term_scale);
      const double r = rel(solver.complete(c));
      if (r < best) {
        best = r;
        best_c = c;
      }
      if (r <= opt.tol) {
        const bool seen = std::any_of(accepted.begin(), accepted.end(), [&](const Eigen::VectorXcd& o) {
          return (o - c).norm() <= 1e-6 * (1.0 + c.norm());
        });
        if (!seen) accepted.push_back(c);
      }
    }
    out.residual_by_p.push_back(best);
    if (accepted.empty()) continue;
    const auto us = solver.complete(best_c);
    detail::ShockUnknowns u;
    u.a = detail::rescale(us.a, 1.0 / sigma, 1);
    u.b = detail::rescale(us.b, 1.0 / sigma, 0);
    for (const auto& l : us.lam) u.lam.push_back(detail::rescale(l, 1.0 / sigma, 0));
    if (!shock_polynomial(solver.trace(us), us.lam).discriminant_ok) continue;
    const Series2 H = G + Series2::x_times(u.a, K) + Series2::lift_y(u.b, K);
    auto T = shock_polynomial(H, u.lam);
    T.discriminant_ok = true;
    out.verdict = Verdict::decomposed;
    out.p = p;
    out.a = u.a;
    out.b = u.b;
    out.lambda = u.lam;
    out.residual = best;
    const Series2 L = Series2::x_times(u.a, K) + Series2::lift_y(u.b, K);
    out.trace_residual = (G + T.s.front() + L).max_abs_to(K - 2);
    out.polynomial = std::move(T);
    out.solutions = static_cast<int>(accepted.size());
    const Eigen::VectorXcd f = solver.residual_vector(us);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(solver.jacobian(best_c, f));
    const auto& sv = svd.singularValues();
    out.jacobian_min_singular = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    out.unique = out.solutions == 1 && out.jacobian_min_singular > 1e-10;
    return out;
  }
  return out;
}

// ---------------------------------------------------------------- affine part

/// h = q x / (1 - q y) + c / (1 - q y)^ell; ell = 1 is an ordinary shock wave.
struct FractionTerm {
  cplx q = 0.0;
  cplx c = 0.0;
  int ell = 1;
  cplx kappa() const { return c / std::pow(q, ell); }
};

inline Series2 fraction_series(const FractionTerm& t, int order) {
  Series1 g(order);
  cplx pw = 1.0;
  for (int n = 0; n <= order; ++n, pw *= t.q) g[n] = pw;  // 1 / (1 - q y)
  Series1 gl(order, 0.0);
  gl[0] = 1.0;
  for (int k = 0; k < t.ell; ++k) gl = gl * g;
  return Series2::x_times(g * t.q, order) + Series2::lift_y(gl * t.c, order);
}

/// max |h_y - h_x h - (ell - 1) kappa h_x^{ell + 1}|.
inline double generalized_shock_residual(const FractionTerm& t, int order) {
  const Series2 h = fraction_series(t, order);
  const Series2 hx = h.dx();
  Series2 r = shock_residual(h);
  if (t.ell > 1) r = r - hx.pow(t.ell + 1) * (static_cast<double>(t.ell - 1) * t.kappa());
  return r.max_abs();
}

struct AffineDecomposition {
  std::vector<cplx> Q0, Q1;  // coefficients of y^0..y^{q-1}
  std::vector<cplx> E;       // 1 - int Q1 = exp(-int a), degree q
  int degree = 0;
  bool generic = true;
  double fit_residual = 0.0;
  double recomposition_residual = 0.0;
  double identity_residual = 0.0;
  std::vector<FractionTerm> terms;
};

/// Recovers Q0, Q1 with a = Q1 / E and b = Q0 / E, E = 1 - int_0^y Q1, and
/// splits x a + b into elementary fractions.
inline AffineDecomposition affine_decompose(const Series1& a, const Series1& b, int q_cap, double tol = 1e-8,
                                            double cluster_tol = 1e-5) {
  if (q_cap < 0) throw error(errc::precondition, "degree cap must be non-negative");
  const int K = std::min(a.order() + 1, b.order());
  if (K < 2 * q_cap) throw error(errc::precondition, "affine part needs order >= 2 q", {double(K)});
  AffineDecomposition out;
  const Series1 E = (-(a.integral())).exp().truncated(K);
  const Series1 Q0s = (b * E).truncated(K);
  const double scale = std::max({1.0, E.max_abs(), Q0s.max_abs()});
  for (int n = q_cap + 1; n <= K; ++n) out.fit_residual = std::max(out.fit_residual, std::abs(E[n]));
  for (int n = q_cap; n <= K; ++n) out.fit_residual = std::max(out.fit_residual, std::abs(Q0s[n]));
  out.fit_residual /= scale;
  if (out.fit_residual > tol)
    throw error(errc::not_affine_decomposable, "affine part is not rational of the expected degree", {out.fit_residual});

  int d = 0;
  for (int n = 1; n <= q_cap; ++n)
    if (std::abs(E[n]) > tol * scale) d = n;
  out.degree = d;
  out.E.assign(E.coeffs().begin(), E.coeffs().begin() + d + 1);
  out.Q1.assign(static_cast<std::size_t>(std::max(d, 1)), 0.0);
  for (int n = 0; n + 1 <= d; ++n) out.Q1[n] = -static_cast<double>(n + 1) * E[n + 1];
  out.Q0.assign(static_cast<std::size_t>(std::max(d, 1)), 0.0);
  for (int n = 0; n < std::max(d, 1) && n <= K; ++n) out.Q0[n] = Q0s[n];
  if (d == 0) {
    // A constant is itself a shock wave (q = 0).
    if (std::abs(Q0s[0]) > tol * scale) out.terms.push_back({0.0, Q0s[0], 1});
    return out;
  }

  std::vector<cplx> monic(out.E.begin(), out.E.end());
  for (auto& v : monic) v /= out.E.back();
  const auto roots = roots_monic(monic).roots;
  struct Cluster { cplx q; int mult; };
  std::vector<Cluster> cl;
  for (const auto& y : roots) {
    const cplx q = 1.0 / y;
    bool merged = false;
    for (auto& c : cl) {
      if (std::abs(c.q - q) <= cluster_tol * std::max(1.0, std::abs(q))) {
        c.q = (c.q * static_cast<double>(c.mult) + q) / static_cast<double>(c.mult + 1);
        ++c.mult;
        merged = true;
        break;
      }
    }
    if (!merged) cl.push_back({q, 1});
  }
  out.generic = std::all_of(cl.begin(), cl.end(), [](const Cluster& c) { return c.mult == 1; });

  // Q0 = sum c_{j,l} E / (1 - q_j y)^l, matched on y^0..y^{d-1}.
  auto factor_poly = [&](std::size_t skip, int power_of_skip) {
    std::vector<cplx> poly{1.0};
    auto mul = [&](cplx q, int times) {
      for (int t = 0; t < times; ++t) {
        std::vector<cplx> n(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
          n[k] += poly[k];
          n[k + 1] -= q * poly[k];
        }
        poly = std::move(n);
      }
    };
    for (std::size_t j = 0; j < cl.size(); ++j) mul(cl[j].q, j == skip ? power_of_skip : cl[j].mult);
    return poly;
  };
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(d, d);
  Eigen::VectorXcd rhs(d);
  for (int n = 0; n < d; ++n) rhs(n) = out.Q0[static_cast<std::size_t>(n)];
  std::vector<std::pair<std::size_t, int>> cols;
  for (std::size_t j = 0; j < cl.size(); ++j)
    for (int l = 1; l <= cl[j].mult; ++l) {
      const auto poly = factor_poly(j, cl[j].mult - l);
      for (int n = 0; n < d && n < static_cast<int>(poly.size()); ++n) M(n, static_cast<Eigen::Index>(cols.size())) = poly[n];
      cols.emplace_back(j, l);
    }
  const Eigen::VectorXcd c = M.colPivHouseholderQr().solve(rhs);
  for (std::size_t k = 0; k < cols.size(); ++k)
    out.terms.push_back({cl[cols[k].first].q, c(static_cast<Eigen::Index>(k)), cols[k].second});

  const int order = std::min(K, 12);
  Series2 sum(order);
  for (const auto& t : out.terms) {
    sum = sum + fraction_series(t, order);
    out.identity_residual = std::max(out.identity_residual, generalized_shock_residual(t, order));
  }
  const Series2 target = Series2::x_times(a.truncated(order - 1), order) + Series2::lift_y(b.truncated(order), order);
  out.recomposition_residual = (sum - target).max_abs() / std::max(1.0, target.max_abs());
  return out;
}

}  // namespace dnsurf

#endif
