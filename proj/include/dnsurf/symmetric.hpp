#ifndef DNSURF_SYMMETRIC_HPP
#define DNSURF_SYMMETRIC_HPP

// Power sums, elementary symmetric functions, monic polynomials and their
// roots, and branch matching by minimum-cost assignment.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "dnsurf/error.hpp"

namespace dnsurf {

using cplx = std::complex<double>;

/// Newton-Girard: elementary symmetric e_1..e_p from power sums S_1..S_p.
/// T needs +, -, * and multiplication by double; `one` is the unit of T.
template <class T>
std::vector<T> elementary_from_power_sums(const std::vector<T>& S, const T& one) {
  const std::size_t p = S.size();
  std::vector<T> e;
  e.reserve(p + 1);
  e.push_back(one);
  for (std::size_t k = 1; k <= p; ++k) {
    T acc = e[k - 1] * S[0];
    for (std::size_t i = 2; i <= k; ++i) {
      const T term = e[k - i] * S[i - 1];
      acc = (i % 2 == 0) ? acc - term : acc + term;
    }
    e.push_back(acc * (1.0 / static_cast<double>(k)));
  }
  e.erase(e.begin());
  return e;
}

/// Power sums S_1..S_count from e_1..e_p (e_k = 0 for k > p).
template <class T>
std::vector<T> power_sums_from_elementary(const std::vector<T>& e, std::size_t count, const T& zero) {
  const std::size_t p = e.size();
  std::vector<T> S;
  for (std::size_t k = 1; k <= count; ++k) {
    T acc = zero;
    for (std::size_t i = 1; i < k && i <= p; ++i) {
      const T term = e[i - 1] * S[k - i - 1];
      acc = (i % 2 == 1) ? acc + term : acc - term;
    }
    if (k <= p) {
      const T term = e[k - 1] * static_cast<double>(k);
      acc = (k % 2 == 1) ? acc + term : acc - term;
    }
    S.push_back(acc);
  }
  return S;
}

/// Monic polynomial X^p - e_1 X^{p-1} + ... + (-1)^p e_p, returned as
/// coefficients c[0..p] of X^0..X^p with c[p] = 1.
inline std::vector<cplx> newton_girard(const std::vector<cplx>& S) {
  const auto e = elementary_from_power_sums(S, cplx(1.0));
  const std::size_t p = S.size();
  std::vector<cplx> c(p + 1);
  c[p] = 1.0;
  for (std::size_t k = 1; k <= p; ++k) c[p - k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k - 1];
  return c;
}

inline cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

inline cplx poly_deriv_eval(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
  return acc;
}

/// Expands prod (X - r_j) into coefficients c[0..p].
inline std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const auto& r : roots) {
    std::vector<cplx> n(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      n[k + 1] += c[k];
      n[k] -= r * c[k];
    }
    c = std::move(n);
  }
  return c;
}

struct RootsResult {
  std::vector<cplx> roots;
  double residual = 0.0;  // max |P(z)| / sum |c_k| |z|^k
};

/// Roots of a monic polynomial (coefficients low to high, c[p] = 1) from the
/// companion matrix eigenvalues, polished by Newton steps.
inline RootsResult roots_monic(const std::vector<cplx>& c) {
  if (c.empty()) throw error(errc::precondition, "empty polynomial");
  const std::size_t p = c.size() - 1;
  if (std::abs(c[p] - cplx(1.0)) > 1e-14) throw error(errc::precondition, "polynomial is not monic");
  RootsResult out;
  if (p == 0) return out;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 1; i < p; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < p; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p - 1)) = -c[i];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw error(errc::root_failure, "companion eigenvalue solver failed");
  auto backward = [&](cplx z) {
    double den = 0.0, az = std::abs(z), pw = 1.0;
    for (std::size_t k = 0; k <= p; ++k, pw *= az) den += std::abs(c[k]) * pw;
    return std::abs(poly_eval(c, z)) / den;
  };
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    cplx z = es.eigenvalues()(i);
    double r = backward(z);
    for (int it = 0; it < 4; ++it) {
      const cplx d = poly_deriv_eval(c, z);
      if (d == cplx(0.0)) break;
      const cplx zn = z - poly_eval(c, z) / d;
      const double rn = backward(zn);
      if (!(rn < r)) break;
      z = zn;
      r = rn;
    }
    if (!std::isfinite(r)) throw error(errc::root_failure, "root polishing diverged");
    out.roots.push_back(z);
    out.residual = std::max(out.residual, r);
  }
  return out;
}

/// Minimum-cost matching of `from` onto `to` (equal sizes). perm[i] is the
/// index in `to` assigned to from[i]. `second` is the cost of the best
/// assignment that differs from the optimum.
struct Matching {
  std::vector<std::size_t> perm;
  double cost = 0.0;
  double second = std::numeric_limits<double>::infinity();
};

inline Matching match_points(const std::vector<cplx>& from, const std::vector<cplx>& to) {
  const std::size_t p = from.size();
  if (to.size() != p) throw error(errc::precondition, "matching needs equal sizes");
  Matching m;
  std::vector<std::size_t> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  auto cost = [&](const std::vector<std::size_t>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += std::abs(from[i] - to[q[i]]);
    return s;
  };
  if (p <= 8) {
    m.cost = std::numeric_limits<double>::infinity();
    do {
      const double c = cost(perm);
      if (c < m.cost) {
        m.second = m.cost;
        m.cost = c;
        m.perm = perm;
      } else if (c < m.second) {
        m.second = c;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return m;
  }
  // Greedy nearest-pair assignment for large p.
  std::vector<bool> used(p, false);
  m.perm.assign(p, 0);
  double second_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i) {
    double best = std::numeric_limits<double>::infinity(), next = best;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < p; ++j) {
      if (used[j]) continue;
      const double d = std::abs(from[i] - to[j]);
      if (d < best) {
        next = best;
        best = d;
        arg = j;
      } else if (d < next) {
        next = d;
      }
    }
    used[arg] = true;
    m.perm[i] = arg;
    m.cost += best;
    second_gap = std::min(second_gap, next - best);
  }
  m.second = m.cost + 2.0 * second_gap;
  return m;
}

}  // namespace dnsurf

#endif
