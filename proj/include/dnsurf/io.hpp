#ifndef DNSURF_IO_HPP
#define DNSURF_IO_HPP

// JSON and CSV serialisation. Objects keep keys sorted and doubles are written
// as shortest round-trip decimals, so write -> read -> write is byte-stable.

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dnsurf/boundary.hpp"
#include "dnsurf/branches.hpp"
#include "dnsurf/series.hpp"

namespace dnsurf {

using json = nlohmann::json;

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw error(errc::parse, "complex number must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_array_json(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back(complex_json(z));
  return a;
}

inline std::vector<cplx> complex_array_from_json(const json& j) {
  if (!j.is_array()) throw error(errc::parse, "expected an array of complex numbers");
  std::vector<cplx> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(complex_from_json(e));
  return v;
}

struct DatasetFile {
  BoundaryDataset data;
  json meta = json::object();
};

/// {"components": [{n, orientation, u, theta, f?, z?}], "meta": {...}}.
inline json dataset_to_json(const DatasetFile& file, bool with_f = false) {
  const auto& ds = file.data;
  json comps = json::array();
  for (std::size_t c = 0; c < ds.curve.size(); ++c) {
    json jc;
    jc["n"] = ds.curve[c].n;
    jc["orientation"] = ds.curve[c].orientation;
    json u = json::array();
    for (int l = 0; l < 3; ++l) u.push_back(ds.u[l][c].values());
    jc["u"] = std::move(u);
    json th = json::array();
    for (int l = 0; l < 3; ++l) th.push_back(complex_array_json(ds.theta[l][c].values()));
    jc["theta"] = std::move(th);
    if (with_f) {
      json f = json::array();
      for (int l = 0; l < 2; ++l) f.push_back(complex_array_json(ds.f[l][c].values()));
      jc["f"] = std::move(f);
    }
    if (ds.curve[c].has_points()) jc["z"] = complex_array_json(ds.curve[c].points.values());
    comps.push_back(std::move(jc));
  }
  return json{{"components", std::move(comps)}, {"meta", file.meta}};
}

/// Parses and validates a dataset; f is recomputed from theta when absent.
inline DatasetFile dataset_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("components") || !j["components"].is_array() || j["components"].empty())
      throw error(errc::parse, "dataset needs a non-empty components array");
    std::vector<CurveComponent> comps;
    std::array<CurveField<double>, 3> u;
    std::array<CurveField<cplx>, 3> theta;
    std::array<CurveField<cplx>, 2> f;
    bool have_f = true;
    for (const auto& jc : j["components"]) {
      const auto n = jc.at("n").get<std::size_t>();
      validate_grid(n);
      const int orientation = jc.value("orientation", 1);
      if (orientation != 1 && orientation != -1) throw error(errc::parse, "orientation must be +1 or -1");
      CurveComponent comp{n, orientation, {}};
      if (jc.contains("z")) {
        auto z = complex_array_from_json(jc["z"]);
        if (z.size() != n) throw error(errc::parse, "z length differs from n");
        comp.points = ComplexSamples(std::move(z));
      }
      comps.push_back(std::move(comp));
      const auto& ju = jc.at("u");
      const auto& jt = jc.at("theta");
      if (ju.size() != 3 || jt.size() != 3) throw error(errc::parse, "u and theta need three arrays each");
      for (int l = 0; l < 3; ++l) {
        auto uv = ju[l].get<std::vector<double>>();
        auto tv = complex_array_from_json(jt[l]);
        if (uv.size() != n || tv.size() != n) throw error(errc::parse, "array length differs from n");
        u[l].emplace_back(std::move(uv));
        theta[l].emplace_back(std::move(tv));
      }
      if (jc.contains("f")) {
        const auto& jf = jc["f"];
        if (jf.size() != 2) throw error(errc::parse, "f needs two arrays");
        for (int l = 0; l < 2; ++l) {
          auto fv = complex_array_from_json(jf[l]);
          if (fv.size() != n) throw error(errc::parse, "f length differs from n");
          f[l].emplace_back(std::move(fv));
        }
      } else {
        have_f = false;
      }
    }
    DatasetFile out;
    out.meta = j.value("meta", json::object());
    const std::string id = out.meta.value("id", std::string{});
    out.data = make_dataset(ClosedCurve(std::move(comps)), std::move(u), std::move(theta),
                            have_f ? std::optional(std::move(f)) : std::nullopt, id);
    return out;
  } catch (const json::exception& e) {
    throw error(errc::parse, std::string("malformed dataset: ") + e.what());
  }
}

inline std::string canonical_dump(const json& j) { return j.dump() + "\n"; }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::parse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw error(errc::parse, "invalid JSON in " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::parse, "cannot write " + path);
  out << text;
}

inline DatasetFile read_dataset(const std::string& path) { return dataset_from_json(read_json_file(path)); }

inline void write_dataset(const std::string& path, const DatasetFile& file, bool with_f = false) {
  write_text_file(path, canonical_dump(dataset_to_json(file, with_f)));
}

/// {"order": K, "coeffs": [[c_{i,0}, ..., c_{i,K-i}] for i = 0..K]}.
inline json series_to_json(const Series2& s) {
  json rows = json::array();
  for (int i = 0; i <= s.order(); ++i) {
    json row = json::array();
    for (int j = 0; i + j <= s.order(); ++j) row.push_back(complex_json(s.at(i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"order", s.order()}, {"coeffs", std::move(rows)}};
}

inline Series2 series_from_json(const json& j) {
  try {
    const int K = j.at("order").get<int>();
    const auto& rows = j.at("coeffs");
    if (K < 0 || rows.size() != static_cast<std::size_t>(K + 1)) throw error(errc::parse, "coefficient rows must number order + 1");
    Series2 s(K);
    for (int i = 0; i <= K; ++i) {
      if (rows[i].size() != static_cast<std::size_t>(K - i + 1)) throw error(errc::parse, "coefficient array is not triangular");
      for (int jj = 0; i + jj <= K; ++jj) s.at(i, jj) = complex_from_json(rows[i][jj]);
    }
    return s;
  } catch (const json::exception& e) {
    throw error(errc::parse, std::string("malformed series: ") + e.what());
  }
}

inline json univariate_json(const Series1& u) { return complex_array_json(u.coeffs()); }

inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  std::size_t nforms = 0;
  for (const auto& p : cloud.points) nforms = std::max(nforms, p.forms.size());
  os << "z1_re,z1_im,z2_re,z2_im,branch";
  for (std::size_t l = 0; l < nforms; ++l) os << ",v" << l << "_re,v" << l << "_im";
  os << '\n' << std::setprecision(17);
  for (const auto& p : cloud.points) {
    os << p.z1.real() << ',' << p.z1.imag() << ',' << p.z2.real() << ',' << p.z2.imag() << ',' << p.branch;
    for (std::size_t l = 0; l < nforms; ++l) {
      const cplx v = l < p.forms.size() ? p.forms[l] : cplx(0.0);
      os << ',' << v.real() << ',' << v.imag();
    }
    os << '\n';
  }
}

inline json cloud_to_json(const PointCloud& cloud) {
  json pts = json::array();
  for (const auto& p : cloud.points) {
    json jp{{"z1", complex_json(p.z1)}, {"z2", complex_json(p.z2)}, {"branch", p.branch}};
    if (!p.forms.empty()) jp["forms"] = complex_array_json(p.forms);
    pts.push_back(std::move(jp));
  }
  json skipped = json::array();
  for (const auto& s : cloud.skipped) skipped.push_back({{"xi", complex_json(s.xi)}, {"reason", s.reason}});
  return json{{"points", std::move(pts)}, {"skipped", std::move(skipped)}};
}

}  // namespace dnsurf

#endif
