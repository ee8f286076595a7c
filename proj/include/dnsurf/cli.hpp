#ifndef DNSURF_CLI_HPP
#define DNSURF_CLI_HPP

// Command-line front end: forward, reconstruct, characterize, check.
// Exit codes: 0 success (verdicts and failed checks included), 2 usage or
// input errors, 3 reconstruction infeasible, 4 check preconditions violated.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dnsurf/branches.hpp"
#include "dnsurf/forms.hpp"
#include "dnsurf/io.hpp"
#include "dnsurf/moments.hpp"
#include "dnsurf/oracle.hpp"
#include "dnsurf/shockwave.hpp"

namespace dnsurf::cli {

enum exit_code : int { ok = 0, usage = 2, infeasible = 3, check_precondition = 4 };

namespace detail {

inline cplx parse_complex(const std::string& s) {
  std::stringstream ss(s);
  double re = 0.0, im = 0.0;
  char sep = 0;
  if (!(ss >> re)) throw error(errc::parse, "cannot parse complex number '" + s + "'");
  if (ss >> sep) {
    if (sep != ',' || !(ss >> im)) throw error(errc::parse, "complex numbers are written re,im");
  }
  return {re, im};
}

/// "i:j:re[:im];..." -> polynomial in (z1, z2).
inline BivariatePolynomial parse_polynomial(const std::string& s) {
  BivariatePolynomial P;
  std::stringstream ss(s);
  std::string term;
  while (std::getline(ss, term, ';')) {
    if (term.empty()) continue;
    std::vector<std::string> parts;
    std::stringstream ts(term);
    std::string part;
    while (std::getline(ts, part, ':')) parts.push_back(part);
    if (parts.size() < 3 || parts.size() > 4) throw error(errc::parse, "polynomial terms are i:j:re[:im]");
    try {
      const double im = parts.size() == 4 ? std::stod(parts[3]) : 0.0;
      P.terms.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]), cplx(std::stod(parts[2]), im));
    } catch (const std::exception&) {
      throw error(errc::parse, "bad polynomial term '" + term + "'");
    }
  }
  if (P.terms.empty()) throw error(errc::parse, "empty polynomial");
  return P;
}

inline json error_json(const error& e) {
  json j{{"error", to_string(e.code())}, {"message", e.what()}};
  if (!e.stage().empty()) j["stage"] = e.stage();
  if (!e.detail().empty()) j["detail"] = e.detail();
  return j;
}

inline int report_error(std::ostream& err, const error& e, int code) {
  err << canonical_dump(error_json(e));
  return code;
}

inline int input_error_code(const error& e) {
  switch (e.code()) {
    case errc::parse:
    case errc::unknown_scenario:
    case errc::not_implemented:
    case errc::invalid_grid:
      return usage;
    default:
      return infeasible;
  }
}

inline DatasetFile load(const std::string& path) { return read_dataset(path); }

inline ScenarioParams params_from_meta(const json& meta) {
  ScenarioParams p;
  if (meta.contains("params")) {
    const auto& m = meta["params"];
    p.a = m.value("a", p.a);
    p.r = m.value("r", p.r);
    p.c = m.value("c", p.c);
    p.shift = m.value("shift", p.shift);
  }
  return p;
}

inline std::string stem_of(const std::string& path) {
  const auto dot = path.rfind(".json");
  return dot == std::string::npos ? path : path.substr(0, dot);
}

inline double max_abs_f1(const BoundaryDataset& ds) {
  double m = 0.0;
  for (const auto& comp : ds.f[0])
    for (const auto& z : comp) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace detail

// ------------------------------------------------------------------- forward

struct ForwardArgs {
  std::string scenario;
  std::size_t n = 256;
  std::string out;
  std::string truth;
  bool via_dn = false;
  bool with_f = false;
  ScenarioParams params;
};

inline json ground_truth_json(const Scenario& s, std::size_t n) {
  GroundTruth gt(s);
  json j;
  j["scenario"] = s.name;
  j["n"] = n;
  j["q"] = gt.q();
  j["surface_components"] = s.surface_components;
  j["base_line"] = complex_array_json({s.base_line[0], s.base_line[1]});
  j["base_fiber"] = complex_json(s.base_fiber);
  j["p"] = gt.p(-s.base_fiber, 0.0);
  j["index_p_minus_q"] = gt.p(s.base_line[0], s.base_line[1]) - gt.q();
  j["fiber"] = complex_array_json(gt.fiber(s.base_fiber));
  j["line_fiber"] = complex_array_json(gt.line_fiber(s.base_line[0], s.base_line[1]));
  j["G"] = complex_json(gt.G(s.base_line[0], s.base_line[1]));
  json P = json::array();
  for (int m = 0; m < 6; ++m) P.push_back(complex_array_json(gt.infinity_poly(m)));
  j["infinity_polys"] = std::move(P);
  json forms = json::array();
  for (int l = 0; l < 3; ++l) forms.push_back(complex_array_json(gt.form_values(l, s.base_fiber)));
  j["form_values"] = std::move(forms);
  return j;
}

inline int cmd_forward(const ForwardArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = make_scenario(a.scenario, a.params);
    DatasetFile file;
    file.data = a.via_dn ? sample_dataset_via_dn(s, a.n) : sample_dataset(s, a.n);
    file.meta = json{{"id", file.data.id},
                     {"scenario", s.name},
                     {"n", a.n},
                     {"base_line", complex_array_json({s.base_line[0], s.base_line[1]})},
                     {"base_fiber", complex_json(s.base_fiber)},
                     {"params", {{"a", a.params.a}, {"r", a.params.r}, {"c", a.params.c}, {"shift", a.params.shift}}}};
    const std::string path = a.out.empty() ? s.name + ".json" : a.out;
    const std::string truth = a.truth.empty() ? detail::stem_of(path) + ".truth.json" : a.truth;
    write_dataset(path, file, a.with_f);
    write_text_file(truth, canonical_dump(ground_truth_json(s, a.n)));
    out << canonical_dump(json{{"dataset", path}, {"truth", truth}});
    return ok;
  } catch (const error& e) {
    return detail::report_error(err, e, detail::input_error_code(e));
  }
}

// --------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string dataset;
  int p_max = 4;
  std::optional<cplx> center;
  std::optional<double> radius;
  int rings = 5;
  int per_ring = 10;
  std::string out;        // CSV cloud
  std::string json_out;   // JSON cloud
  std::string report;     // report path; stdout when empty
  bool forms = false;
  int threads = 0;
  std::uint64_t seed = 1;
  std::string scenario;   // optional, for the implicit-equation residual
};

inline int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  DatasetFile file;
  try {
    file = detail::load(a.dataset);
  } catch (const error& e) {
    return detail::report_error(err, e, detail::input_error_code(e));
  }
  const auto& ds = file.data;
  try {
    cplx center = a.center.value_or(file.meta.contains("base_fiber") ? complex_from_json(file.meta["base_fiber"]) : cplx(0.0));
    const double radius = a.radius.value_or(0.5 * distance_to_image(ds, center));
    const auto grid = concentric_nodes(center, radius, a.rings, a.per_ring, a.seed);
    SampleOptions so;
    so.fiber.p_max = a.p_max;
    so.fiber.separation.seed = a.seed;
    so.threads = a.threads;
    auto cloud = sample_surface(ds, grid, so);
    if (cloud.fibers.empty()) throw error(errc::estimate_failure, "no grid node produced a fibre");

    std::map<int, int> votes;
    for (const auto& f : cloud.fibers) ++votes[f.p];
    const int p = std::max_element(votes.begin(), votes.end(),
                                   [](const auto& x, const auto& y) { return x.second < y.second; })->first;
    json report;
    report["p"] = p;
    report["nodes"] = grid.size();
    report["points"] = cloud.points.size();
    report["center"] = complex_json(center);
    report["radius"] = radius;

    const BranchSet* ref = nullptr;
    for (const auto& f : cloud.fibers)
      if (f.p == p && (!ref || std::abs(f.xi - center) < std::abs(ref->xi - center))) ref = &f;
    report["with_infinity"] = ref->with_infinity;
    json P = json::array();
    for (const auto& poly : ref->infinity_polys) P.push_back(complex_array_json(poly));
    report["P"] = std::move(P);
    report["P_xi"] = complex_json(ref->xi);

    double sep = 0.0, root = 0.0;
    for (const auto& f : cloud.fibers) {
      sep = std::max(sep, f.residual);
      root = std::max(root, f.root_residual);
    }
    json res{{"separation", sep}, {"roots", root}};

    if (a.forms) {
      json Q = json::array();
      double form_res = 0.0;
      std::map<std::pair<double, double>, std::vector<std::vector<cplx>>> by_xi;
      for (const auto& f : cloud.fibers) {
        std::vector<std::vector<cplx>> vals(3);
        for (int l = 0; l < 3; ++l) {
          const auto ff = recover_form_values(ds, l, f);
          form_res = std::max(form_res, ff.residual);
          vals[l] = ff.values;
          if (&f == ref) Q.push_back([&] {
            json q = json::array();
            for (const auto& poly : ff.infinity_polys) q.push_back(complex_array_json(poly));
            return q;
          }());
        }
        by_xi[{f.xi.real(), f.xi.imag()}] = std::move(vals);
      }
      for (auto& pt : cloud.points) {
        const auto it = by_xi.find({pt.z2.real(), pt.z2.imag()});
        if (it == by_xi.end()) continue;
        const auto& fib = *std::find_if(cloud.fibers.begin(), cloud.fibers.end(),
                                         [&](const BranchSet& b) { return b.xi == pt.z2; });
        for (std::size_t j = 0; j < fib.points.size(); ++j)
          if (fib.points[j] == pt.z1)
            for (int l = 0; l < 3; ++l) pt.forms.push_back(it->second[l][j]);
      }
      report["Q"] = std::move(Q);
      res["forms"] = form_res;
    }
    if (!a.scenario.empty()) {
      const Scenario s = make_scenario(a.scenario, detail::params_from_meta(file.meta));
      double imp = 0.0;
      for (const auto& pt : cloud.points) imp = std::max(imp, std::abs(s.implicit(pt.z1, pt.z2)));
      res["implicit"] = imp;
    }
    report["residuals"] = std::move(res);
    json skipped = json::array();
    for (const auto& s : cloud.skipped) skipped.push_back({{"xi", complex_json(s.xi)}, {"reason", s.reason}});
    report["skipped"] = std::move(skipped);

    if (!a.out.empty()) {
      std::ofstream os(a.out);
      if (!os) throw error(errc::parse, "cannot write " + a.out);
      write_cloud_csv(os, cloud);
    }
    if (!a.json_out.empty()) write_text_file(a.json_out, canonical_dump(cloud_to_json(cloud)));
    if (a.report.empty())
      out << canonical_dump(report);
    else
      write_text_file(a.report, canonical_dump(report));
    return ok;
  } catch (const error& e) {
    return detail::report_error(err, e, detail::input_error_code(e));
  }
}

// -------------------------------------------------------------- characterize

struct CharacterizeArgs {
  std::string dataset;
  std::string series;  // alternative input: series JSON
  int p_max = 4;
  int order = 12;
  std::optional<std::array<cplx, 2>> base;
  std::optional<double> radius;
  int affine_q = -1;          // run affine_decompose when >= 0
  int moment_degree = -1;     // run affine_moment_check when >= 0
  std::string orientation_poly;
  std::uint64_t seed = 1;
  bool emit_series = false;
};

inline json univariate_list_json(const std::vector<Series1>& v) {
  json a = json::array();
  for (const auto& s : v) a.push_back(univariate_json(s));
  return a;
}

inline int cmd_characterize(const CharacterizeArgs& a, std::ostream& out, std::ostream& err) {
  try {
    json rep;
    Series2 G;
    double sample_radius = 0.0;
    std::optional<DatasetFile> file;
    if (!a.series.empty()) {
      G = series_from_json(read_json_file(a.series));
      rep["source"] = "series";
    } else {
      file = detail::load(a.dataset);
      const auto& ds = file->data;
      std::array<cplx, 2> base{cplx(-4.0), cplx(0.0)};
      if (a.base) {
        base = *a.base;
      } else if (file->meta.contains("base_line")) {
        const auto b = complex_array_from_json(file->meta["base_line"]);
        if (b.size() == 2) base = {b[0], b[1]};
      }
      const double d = distance_to_image(ds.sheared(base[1]), -base[0]);
      const double r = a.radius.value_or(0.8 * d / (1.0 + detail::max_abs_f1(ds)));
      if (!(r > 0.0)) throw error(errc::xi_too_close, "base point lies on the boundary image");
      G = taylor_from_function([&](cplx x, cplx y) { return G_function(ds, x, y); }, base[0], base[1], r, r, a.order,
                               std::max(64, 4 * (a.order + 1)));
      rep["source"] = "dataset";
      rep["base"] = complex_array_json({base[0], base[1]});
      rep["radius"] = r;
      sample_radius = r;
      if (a.moment_degree >= 0) {
        const auto m = affine_moment_check(ds.curve, {ds.f[0], ds.f[1]}, a.moment_degree);
        rep["moment_check"] = {{"max_modulus", m.max_modulus}, {"worst_index", m.worst_index}, {"checked", m.checked}};
      }
      if (!a.orientation_poly.empty()) {
        const auto P = detail::parse_polynomial(a.orientation_poly);
        try {
          const auto w = orientation_test(ds, P);
          rep["orientation_test"] = {{"value", w.value}, {"residual", w.residual}};
        } catch (const error& e) {
          rep["orientation_test"] = detail::error_json(e);
        }
      }
    }
    rep["order"] = G.order();
    if (a.emit_series) rep["G"] = series_to_json(G);

    CharacterizeOptions opt;
    opt.p_max = std::min(a.p_max, (G.order() - 2) / 2);
    opt.seed = a.seed;
    opt.radius = sample_radius;
    rep["p_max"] = opt.p_max;
    if (opt.p_max < 1) throw error(errc::parse, "order too low for any p");
    if (is_affine_in_x(G, sample_radius > 0.0 ? sample_radius : 1.0, opt.affine_tol)) {
      rep["verdict"] = "excluded-affine";
      rep["route"] = "moment-condition";
      out << canonical_dump(rep);
      return ok;
    }
    const auto C = characterize(G, opt);
    rep["residual_by_p"] = C.residual_by_p;
    if (C.verdict == Verdict::negative) {
      rep["verdict"] = "negative";
      out << canonical_dump(rep);
      return ok;
    }
    rep["verdict"] = "decomposed";
    rep["p"] = C.p;
    rep["a"] = univariate_json(C.a);
    rep["b"] = univariate_json(C.b);
    rep["lambda"] = univariate_list_json(C.lambda);
    rep["residual"] = C.residual;
    rep["trace_residual"] = C.trace_residual;
    rep["unique"] = C.unique;
    rep["solutions"] = C.solutions;
    rep["jacobian_min_singular"] = C.jacobian_min_singular;
    if (a.affine_q >= 0) {
      try {
        const auto D = affine_decompose(C.a, C.b, a.affine_q);
        json terms = json::array();
        for (const auto& t : D.terms) terms.push_back({{"q", complex_json(t.q)}, {"c", complex_json(t.c)}, {"ell", t.ell}});
        rep["affine"] = {{"Q0", complex_array_json(D.Q0)}, {"Q1", complex_array_json(D.Q1)}, {"degree", D.degree},
                         {"generic", D.generic}, {"terms", std::move(terms)}, {"fit_residual", D.fit_residual},
                         {"identity_residual", D.identity_residual}};
      } catch (const error& e) {
        rep["affine"] = detail::error_json(e);
      }
    }
    out << canonical_dump(rep);
    return ok;
  } catch (const error& e) {
    return detail::report_error(err, e, detail::input_error_code(e));
  }
}

// --------------------------------------------------------------------- check

struct CheckArgs {
  std::string dataset;
  std::string scenario;
  int points = 8;
  bool points_given = false;
  bool green = false;
  double eps = 1e-2;
  bool jump = true;
  std::optional<std::array<double, 4>> loop;  // cx, cy, r, L
  int branch = 0;
  int form = 0;
  int p_max = 4;
  double green_tol = 1e-8;
  double jump_tol = 1e-3;
  double period_tol = 1e-6;
};

/// Exterior points on the first circle |z| = R whose samples all lie outside.
inline std::vector<cplx> exterior_points(const Scenario& s, int K) {
  for (double R : {1.5, 2.0, 4.0, 6.0, 0.5, 0.3, 0.1}) {
    std::vector<cplx> pts;
    for (int k = 0; k < K; ++k) pts.push_back(std::polar(R, two_pi * (k + 0.25) / K));
    if (std::all_of(pts.begin(), pts.end(), [&](cplx z) { return s.outside(z); })) return pts;
  }
  throw error(errc::placement, "no exterior circle found for the scenario");
}

inline int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  DatasetFile file;
  try {
    file = detail::load(a.dataset);
  } catch (const error& e) {
    return detail::report_error(err, e, detail::input_error_code(e));
  }
  const auto& ds = file.data;
  if (a.scenario.empty() && (a.green || a.points_given))
    return detail::report_error(err, error(errc::precondition, "Green checks need --scenario"), check_precondition);
  try {
    json rep;
    bool pass = true;
    std::optional<Scenario> s;
    if (!a.scenario.empty()) s = make_scenario(a.scenario, detail::params_from_meta(file.meta));
    if (s) {
      const auto pts = exterior_points(*s, a.points);
      double worst = 0.0;
      json per = json::array();
      for (const auto& z : pts) {
        const auto r = green_moment_check(*s, ds, z);
        double m = 0.0;
        for (const auto& v : r) m = std::max(m, std::abs(v));
        worst = std::max(worst, m);
        per.push_back({{"z", complex_json(z)}, {"residual", m}});
      }
      const bool g = worst < a.green_tol;
      pass = pass && g;
      rep["green"] = {{"max_residual", worst}, {"points", std::move(per)}, {"pass", g}, {"tolerance", a.green_tol}};
      if (s->dn) {
        const int count = count_components(*s->dn, ds.curve);
        const bool c = count == s->surface_components;
        pass = pass && c;
        rep["components"] = {{"count", count}, {"expected", s->surface_components}, {"pass", c}};
      }
    }
    if (a.jump && ds.curve.has_points()) {
      json jj = json::array();
      bool jp = true;
      for (int l = 0; l < 3; ++l) {
        const auto r = jump_check(ds, l, 0, 0, a.eps);
        const bool ok_l = r.value_error < a.jump_tol && r.dbar_error < a.jump_tol;
        jp = jp && ok_l;
        jj.push_back({{"form", l}, {"value_error", r.value_error}, {"dbar_error", r.dbar_error},
                      {"max_imag", r.max_imag}, {"upsampled", r.upsampled}, {"pass", ok_l}});
      }
      pass = pass && jp;
      rep["jump"] = {{"eps", a.eps}, {"forms", std::move(jj)}, {"pass", jp}};
    }
    if (a.loop) {
      const auto [cx, cy, r, L] = *a.loop;
      const int n = static_cast<int>(L);
      if (n < 3 || !(r > 0.0)) throw error(errc::precondition, "loop needs a positive radius and >= 3 vertices");
      std::vector<cplx> verts;
      for (int k = 0; k < n; ++k) verts.push_back(cplx(cx, cy) + std::polar(r, two_pi * k / n));
      ContinuationOptions co;
      co.fiber.p_max = a.p_max;
      const auto b0 = fiber_auto(ds, verts.front(), co.fiber);
      const auto res = period_check(ds, a.form, verts, b0.p, static_cast<std::size_t>(a.branch), co);
      const bool pp = std::abs(res.period.real()) < a.period_tol;
      pass = pass && pp;
      std::vector<int> mono(res.monodromy.begin(), res.monodromy.end());
      rep["period"] = {{"value", complex_json(res.period)}, {"loops", res.loops}, {"monodromy", mono}, {"pass", pp}};
    }
    rep["result"] = pass ? "pass" : "fail";
    out << canonical_dump(rep);
    return ok;
  } catch (const error& e) {
    const int code = (e.code() == errc::placement || e.code() == errc::precondition) ? check_precondition
                                                                                      : detail::input_error_code(e);
    return detail::report_error(err, e, code);
  }
}

// ---------------------------------------------------------------------- main

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Reconstruction of bordered Riemann surfaces from boundary Dirichlet-Neumann data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  int threads = 0;
  app.add_option("--seed", seed, "Seed for randomised steps")->default_val(1);
  app.add_option("--threads", threads, "Worker threads (default: RIEMANN_DN_THREADS or 1)");

  ForwardArgs fa;
  std::string scen_names;
  for (const auto& n : scenario_names()) scen_names += (scen_names.empty() ? "" : ", ") + n;
  auto* fwd = app.add_subcommand("forward", "Sample a synthetic scenario (" + scen_names + ")");
  fwd->add_option("scenario", fa.scenario, "Scenario name")->required();
  fwd->add_option("--n", fa.n, "Samples per boundary component")->default_val(256);
  fwd->add_option("--out", fa.out, "Dataset JSON path");
  fwd->add_option("--truth", fa.truth, "Ground-truth JSON path");
  fwd->add_flag("--via-dn", fa.via_dn, "Build theta through the Dirichlet-Neumann operator");
  fwd->add_flag("--with-f", fa.with_f, "Store the boundary map f in the dataset");
  fwd->add_option("--a", fa.params.a, "Pole location (disk-pole)");
  fwd->add_option("--r", fa.params.r, "Inner radius (annulus)");

  ReconstructArgs ra;
  std::string center;
  auto* rec = app.add_subcommand("reconstruct", "Recover fibres and a point cloud of the surface");
  rec->add_option("dataset", ra.dataset)->required();
  rec->add_option("--pmax", ra.p_max, "Largest fibre size considered")->default_val(4);
  rec->add_option("--center", center, "Grid centre re,im");
  rec->add_option("--radius", ra.radius, "Grid radius");
  rec->add_option("--rings", ra.rings)->default_val(5);
  rec->add_option("--per-ring", ra.per_ring)->default_val(10);
  rec->add_option("--out", ra.out, "Cloud CSV path");
  rec->add_option("--json", ra.json_out, "Cloud JSON path");
  rec->add_option("--report", ra.report, "Report JSON path (stdout when omitted)");
  rec->add_flag("--forms", ra.forms, "Recover the form values on every fibre");
  rec->add_option("--scenario", ra.scenario, "Scenario for the implicit-equation residual");

  CharacterizeArgs ca;
  std::string base;
  auto* chr = app.add_subcommand("characterize", "Decide whether G is a shock-wave trace up to an affine term");
  chr->add_option("dataset", ca.dataset, "Dataset JSON");
  chr->add_option("--series", ca.series, "Series JSON instead of a dataset");
  chr->add_option("--pmax", ca.p_max)->default_val(4);
  chr->add_option("--order", ca.order, "Truncation order")->default_val(12);
  chr->add_option("--base", base, "Base point x0,y0 (real parts)");
  chr->add_option("--radius", ca.radius, "Torus radius for the Taylor extraction");
  chr->add_option("--affine-q", ca.affine_q, "Decompose the affine term with this degree cap");
  chr->add_option("--moments", ca.moment_degree, "Run the moment condition up to this degree");
  chr->add_option("--orientation-poly", ca.orientation_poly, "Polynomial i:j:re[:im];... for the orientation test");
  chr->add_flag("--emit-series", ca.emit_series, "Include the G series in the report");

  CheckArgs ka;
  std::vector<double> loop;
  auto* chk = app.add_subcommand("check", "Consistency checks on a dataset");
  chk->add_option("dataset", ka.dataset)->required();
  chk->add_option("--scenario", ka.scenario, "Scenario the dataset claims to sample");
  auto* pts_opt = chk->add_option("--points", ka.points, "Number of exterior Green points")->default_val(8);
  chk->add_flag("--green", ka.green, "Require the Green checks");
  chk->add_option("--eps", ka.eps, "Offset for the jump check")->default_val(1e-2);
  chk->add_flag("!--no-jump", ka.jump, "Skip the jump check");
  chk->add_option("--loop", loop, "Period loop cx cy r L")->expected(4);
  chk->add_option("--branch", ka.branch)->default_val(0);
  chk->add_option("--form", ka.form)->default_val(0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }
  try {
    if (*fwd) return cmd_forward(fa, out, err);
    if (*rec) {
      if (!center.empty()) ra.center = detail::parse_complex(center);
      ra.threads = threads;
      ra.seed = seed;
      return cmd_reconstruct(ra, out, err);
    }
    if (*chr) {
      if (ca.dataset.empty() == ca.series.empty()) throw error(errc::parse, "give exactly one of a dataset or --series");
      if (!base.empty()) {
        const cplx b = detail::parse_complex(base);
        ca.base = std::array<cplx, 2>{cplx(b.real()), cplx(b.imag())};
      }
      ca.seed = seed;
      return cmd_characterize(ca, out, err);
    }
    if (*chk) {
      ka.points_given = pts_opt->count() > 0;
      if (!loop.empty()) ka.loop = std::array<double, 4>{loop[0], loop[1], loop[2], loop[3]};
      return cmd_check(ka, out, err);
    }
  } catch (const error& e) {
    return detail::report_error(err, e, usage);
  }
  return usage;
}

}  // namespace dnsurf::cli

#endif
