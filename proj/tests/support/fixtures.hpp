#ifndef DNSURF_TEST_FIXTURES_HPP
#define DNSURF_TEST_FIXTURES_HPP

#include <algorithm>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "dnsurf/boundary.hpp"
#include "dnsurf/oracle.hpp"

namespace dnsurf::test {

/// Exact-data datasets, built once per (scenario, n).
inline const BoundaryDataset& dataset(const std::string& name, std::size_t n = 256) {
  static std::map<std::pair<std::string, std::size_t>, BoundaryDataset> cache;
  auto it = cache.find({name, n});
  if (it == cache.end()) it = cache.emplace(std::pair{name, n}, sample_dataset(make_scenario(name), n)).first;
  return it->second;
}

inline const Scenario& scenario(const std::string& name) {
  static std::map<std::string, Scenario> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, make_scenario(name)).first;
  return it->second;
}

/// Copy with every component orientation flipped.
inline BoundaryDataset reversed(const BoundaryDataset& ds) {
  std::vector<CurveComponent> comps = ds.curve.components();
  for (auto& c : comps) c.orientation = -c.orientation;
  BoundaryDataset out = ds;
  out.curve = ClosedCurve(std::move(comps));
  return out;
}

inline bool lex_less(cplx a, cplx b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

inline std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

/// Max distance between two unordered sets of equal size, optimal pairing.
inline double set_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<std::size_t> idx(b.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  double best = INFINITY;
  do {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[idx[i]]));
    best = std::min(best, m);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

/// Roots of z^2 = xi inside the unit disk.
inline std::vector<cplx> disk_fiber(cplx xi) {
  const cplx r = std::sqrt(xi);
  std::vector<cplx> out;
  for (cplx z : {r, -r})
    if (std::abs(z) < 1.0) out.push_back(z);
  return out;
}

inline const std::vector<std::string>& all_scenarios() {
  static const std::vector<std::string> names = scenario_names();
  return names;
}

}  // namespace dnsurf::test

#endif
