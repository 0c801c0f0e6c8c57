#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "arrangement.hpp"
#include "error.hpp"

namespace hypertoric::io {

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json point_json(const arrangement::Point& p) {
  Json out = Json::array();
  for (const auto& x : p) out.push_back(rational_to_json(x));
  return out;
}

Json int_vector_json(const lattice::IntVector& v) {
  Json out = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(v[i].get_si());
  return out;
}

Json base_point_json(const config::BasePoint& p) {
  Json b = Json::array();
  for (const auto& z : p.b) b.push_back(Json::array({z.real(), z.imag()}));
  return Json{{"a", p.a}, {"b", b}};
}

Json level_json(const config::ImQuaternion& q) {
  return Json::array({rational_to_json(q.re), rational_to_json(q.cx_re), rational_to_json(q.cx_im)});
}

Json flat_json(const config::Flat& f) {
  return Json{{"index", f.index},
              {"family", f.family},
              {"member", f.member},
              {"generator", int_vector_json(f.generator)},
              {"level", level_json(f.level)}};
}

Json header(const char* command, const RunOptions& options) {
  Json j;
  j["command"] = command;
  j["parameters"] = parameters_json(options);
  return j;
}

void finish(Report& r) {
  Json out;
  out["status"] = r.pass ? "PASS" : "FAIL";
  for (auto& [k, v] : r.json.items()) out[k] = std::move(v);
  r.json = std::move(out);
}

bool positive_definite(const Eigen::MatrixXd& m) { return Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success; }

std::vector<config::BasePoint> sample_points(const config::FlatConfiguration& cfg, const RunOptions& options) {
  std::mt19937_64 rng(options.seed);
  const double reach = options.box.value_or(3.0);
  std::uniform_real_distribution<double> coord(-reach, reach);
  std::vector<config::BasePoint> out;
  const std::size_t n = cfg.rank();
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(options.samples, 1);
  for (std::size_t attempt = 0; out.size() < options.samples; ++attempt) {
    if (attempt >= max_attempts) {
      throw Error(ErrorCode::kConvergence, "could not sample points away from the flats and strings inside the box; try a larger --box or a smaller --window");
    }
    config::BasePoint p;
    for (std::size_t i = 0; i < n; ++i) p.a.push_back(coord(rng));
    for (std::size_t i = 0; i < n; ++i) {
      const double re = coord(rng);
      p.b.emplace_back(re, coord(rng));
    }
    // Keep away from the flats, and from the strings s <= 0, v = 0 where the
    // fourth derivatives of s log(s + r) grow like |s| / |v|^4.
    bool clear = true;
    double predicted = 0.0;
    for (const auto& d : metric::flat_data(p, cfg, options.window)) {
      clear = clear && d.distance >= 0.25 && d.string_gap > 0;
      if (d.s < 0 && clear) predicted += options.h * options.h * -d.s / std::pow(std::norm(d.v), 2);
    }
    if (clear && predicted <= 0.1 * options.identity_tol) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

Json parameters_json(const RunOptions& options) {
  Json p;
  p["window"] = options.window;
  p["truncation"] = options.truncation;
  p["tol"] = options.tol;
  p["identity_tol"] = options.identity_tol;
  p["h"] = options.h;
  p["box"] = options.box ? Json(*options.box) : Json(nullptr);
  p["seed"] = options.seed;
  p["samples"] = options.samples;
  return p;
}

Report validate_report(const config::FlatConfiguration& cfg, const RunOptions& options) {
  Report r;
  r.json = header("validate", options);
  const auto certified = cfg.certified();
  const auto& cert = *certified.certificate();
  Json c;
  c["pass"] = cert.pass;
  c["reason"] = cert.reason;
  c["divergent_family"] = cert.divergent_family ? Json(*cert.divergent_family) : Json(nullptr);
  Json tails = Json::array();
  for (const auto& t : cert.tails) {
    tails.push_back(Json{{"family", t.family}, {"prefix_size", t.prefix_size}, {"c", t.c}, {"delta", t.delta}});
  }
  c["tails"] = std::move(tails);
  if (cert.pass) c["tail_bound_past_window"] = cert.tail_bound(options.window);
  r.json["convergence"] = std::move(c);

  const auto flats = config::enumerate_flats(cfg, options.window);
  const auto gens = config::generator_set(flats, cfg.rank());
  const std::size_t bound = static_cast<std::size_t>(std::pow(3.0, static_cast<double>(cfg.rank()))) - 1;
  r.json["generators"] = Json{{"distinct", gens.generators.size()}, {"bound", bound}};

  if (!cert.pass) {
    r.pass = false;
    r.json["smoothness"] = nullptr;
    finish(r);
    return r;
  }
  config::SmoothnessOptions so;
  so.box_radius = options.box;
  const auto s = config::check_smoothness(certified, options.window, so);
  std::map<std::size_t, const config::Flat*> by_index;
  for (const auto& f : flats) by_index[f.index] = &f;
  Json sj;
  sj["pass"] = s.pass;
  sj["window"] = s.window;
  sj["flats_checked"] = s.flats_checked;
  sj["flats_pruned"] = s.flats_pruned;
  sj["consistent_subsets"] = s.consistent_subsets;
  sj["coverage"] = s.coverage;
  Json violations = Json::array();
  for (const auto& w : s.violations) {
    Json v;
    v["condition"] = w.condition == config::Condition::kA ? "a" : "b";
    Json fl = Json::array();
    for (std::size_t idx : w.flats) fl.push_back(by_index.count(idx) ? flat_json(*by_index[idx]) : Json(idx));
    v["flats"] = std::move(fl);
    v["determinant"] = w.determinant ? Json(w.determinant->get_si()) : Json(nullptr);
    violations.push_back(std::move(v));
  }
  sj["violations"] = std::move(violations);
  r.pass = s.pass;
  r.json["smoothness"] = std::move(sj);
  finish(r);
  return r;
}

Report topology_report(const config::FlatConfiguration& cfg, const RunOptions& options) {
  Report r;
  r.json = header("topology", options);
  const auto planes = arrangement::build_arrangement(cfg, options.window);
  const auto guards = arrangement::window_guards(cfg, options.window);
  arrangement::Box box;
  if (options.box) {
    if (!(*options.box > 0)) throw Error(ErrorCode::kInvalidArgument, "--box must be > 0");
    const Rational half = to_rational(*options.box);
    box.lo.assign(cfg.rank(), -half);
    box.hi.assign(cfg.rank(), half);
  } else {
    box = arrangement::bounding_box(planes, cfg.rank());
  }
  const auto h = arrangement::homotopy_report(planes, box, guards);

  r.json["box"] = Json{{"lo", point_json(box.lo)}, {"hi", point_json(box.hi)}};
  Json hp = Json::array();
  for (const auto& p : planes) {
    hp.push_back(Json{{"flat", p.flat_index}, {"normal", int_vector_json(p.normal)}, {"level", rational_to_json(p.level)}});
  }
  r.json["hyperplanes"] = std::move(hp);
  Json gj = Json::array();
  for (const auto& g : guards) {
    gj.push_back(Json{{"family", g.family}, {"normal", int_vector_json(g.normal)}, {"min_abs_level", g.min_abs_level}});
  }
  r.json["window_guards"] = std::move(gj);
  r.json["chamber_count"] = h.chamber_count;
  r.json["truncated_excluded"] = h.truncated_excluded;

  Json polys = Json::array();
  Json plot = Json::array();
  for (std::size_t i = 0; i < h.polytopes.size(); ++i) {
    const auto& c = h.polytopes[i];
    Json pj;
    pj["index"] = i;
    pj["signs"] = c.signs;
    Json verts = Json::array();
    for (const auto& v : c.vertices) verts.push_back(point_json(v));
    pj["vertices"] = std::move(verts);
    pj["interior"] = point_json(c.interior);
    polys.push_back(std::move(pj));

    std::vector<std::vector<double>> pts;
    for (const auto& v : c.vertices) {
      std::vector<double> d;
      for (const auto& x : v) d.push_back(to_double(x));
      pts.push_back(std::move(d));
    }
    if (cfg.rank() == 2 && pts.size() > 2) {
      double cx = 0, cy = 0;
      for (const auto& p : pts) {
        cx += p[0];
        cy += p[1];
      }
      cx /= static_cast<double>(pts.size());
      cy /= static_cast<double>(pts.size());
      std::sort(pts.begin(), pts.end(), [&](const auto& p, const auto& q) {
        return std::atan2(p[1] - cy, p[0] - cx) < std::atan2(q[1] - cy, q[0] - cx);
      });
    }
    plot.push_back(pts);
  }
  r.json["polytopes"] = std::move(polys);

  Json adj = Json::array();
  for (const auto& a : h.adjacency) {
    Json shared = Json::array();
    for (const auto& v : a.shared_vertices) shared.push_back(point_json(v));
    adj.push_back(Json{{"first", a.first}, {"second", a.second}, {"face_dimension", a.face_dimension},
                       {"shared_vertices", std::move(shared)}});
  }
  r.json["adjacency"] = std::move(adj);

  Json elems = Json::array();
  for (const auto& e : h.poset) {
    elems.push_back(Json{{"dimension", e.dimension}, {"planes", e.planes}, {"point", point_json(e.point)}});
  }
  Json covers = Json::array();
  for (const auto& [hi, lo] : h.poset_covers) covers.push_back(Json::array({hi, lo}));
  r.json["poset"] = Json{{"elements", std::move(elems)}, {"covers", std::move(covers)}};
  r.json["plot"] = Json{{"polytopes", std::move(plot)}};
  finish(r);
  return r;
}

Report eval_report(const config::FlatConfiguration& cfg, const std::vector<config::BasePoint>& points,
                   const metric::Deformation& deformation, const RunOptions& options) {
  Report r;
  r.json = header("eval", options);
  const auto certified = cfg.certified();
  metric::TruncationPlan plan;
  plan.n = options.truncation;
  Json rows = Json::array();
  for (const auto& p : points) {
    Json row = base_point_json(p);
    const auto st = moment::stabilizer(p, certified, options.window, options.tol);
    row["flats_through"] = st.incident;
    row["stabilizer"] = Json{{"rank", st.rank}, {"fiber_dim", st.fiber_dim}, {"fixed_point", st.fixed_point}};
    const auto g = metric::gram_matrix(p, certified, plan, deformation);
    row["phi"] = matrix_json(g.potential.phi);
    row["tail_bound"] = g.potential.tail_bound;
    row["truncation"] = g.potential.truncation;
    row["exact"] = g.potential.exact;
    row["phi_positive_definite"] = positive_definite(g.potential.phi);
    row["gram"] = matrix_json(g.g);
    row["gram_positive_definite"] = positive_definite(g.g);
    const auto conn = metric::connection(p, certified, g.potential.truncation, deformation);
    row["connection"] = Json{{"dx", matrix_json(conn.dx)}, {"dy", matrix_json(conn.dy)}};
    r.pass = r.pass && positive_definite(g.g);
    rows.push_back(std::move(row));
  }
  r.json["points"] = std::move(rows);
  finish(r);
  return r;
}

Report identities_report(const config::FlatConfiguration& cfg, const std::vector<config::BasePoint>& points,
                         const metric::Deformation& deformation, const RunOptions& options) {
  Report r;
  r.json = header("identities", options);
  const auto certified = cfg.certified();
  const auto pts = points.empty() ? sample_points(certified, options) : points;
  r.json["sampled"] = points.empty();
  Json rows = Json::array();
  double worst = 0.0;
  for (const auto& p : pts) {
    Json row = base_point_json(p);
    const auto poly = metric::polyharmonic_check(p, certified, options.window, options.h, deformation);
    const auto poly_half = metric::polyharmonic_check(p, certified, options.window, options.h / 2, deformation);
    const auto pot = metric::potential_check(p, certified, options.window, options.h, deformation);
    const auto mono = metric::monopole_check(p, certified, options.window, options.h, deformation);
    const double pot_rel = pot.residual / std::max(1.0, pot.scale);
    const double mono_rel = mono.residual / std::max(1.0, mono.scale);
    const bool ok = poly.residual < options.identity_tol && pot_rel < options.identity_tol && mono_rel < options.identity_tol;
    row["polyharmonic"] = Json{{"residual", poly.residual}, {"residual_half_h", poly_half.residual},
                               {"ratio", poly_half.residual > 0 ? Json(poly.residual / poly_half.residual) : Json(nullptr)}};
    row["potential"] = Json{{"residual", pot.residual}, {"scale", pot.scale}};
    row["monopole"] = Json{{"residual", mono.residual}, {"scale", mono.scale}};
    row["pass"] = ok;
    worst = std::max({worst, poly.residual, pot_rel, mono_rel});
    r.pass = r.pass && ok;
    rows.push_back(std::move(row));
  }
  r.json["max_residual"] = worst;
  r.json["points"] = std::move(rows);
  finish(r);
  return r;
}

Report solve_moment_report(const moment::MomentProblem& problem, const RunOptions& options) {
  Report r;
  r.json = header("solve-moment", options);
  moment::MomentOptions mo;
  const auto s = moment::moment_solve(problem, mo);
  r.json["tol"] = mo.tol;
  r.json["eta"] = s.eta;
  r.json["y"] = s.y;
  r.json["residual"] = s.residual;
  r.json["iterations"] = s.iterations;
  r.json["gradient_steps"] = s.gradient_steps;
  r.pass = s.residual <= mo.tol;
  finish(r);
  return r;
}

Report periodic_report(const PeriodicInput& input, const std::vector<config::BasePoint>& points,
                       const RunOptions& options) {
  Report r;
  r.json = header("periodic", options);
  Json rows = Json::array();
  for (const auto& p : points) {
    Json row = base_point_json(p);
    const auto phi = periodic::periodic_potential(p, input.families, options.truncation);
    row["phi"] = matrix_json(phi.phi);
    row["tail_bound"] = phi.tail_bound;
    row["truncation"] = phi.truncation;
    row["positive_definite"] = positive_definite(phi.phi);
    const auto per = periodic::periodicity_residual(p, input.families, options.truncation);
    row["periodicity"] = Json{{"residual", per.residual}, {"bound", per.bound}, {"pass", per.residual <= per.bound}};
    r.pass = r.pass && per.residual <= per.bound;
    const auto fib = periodic::fibration_report(p.b, input.families, options.window, options.tol);
    Json circles = Json::array();
    for (const auto& c : fib.circles) {
      circles.push_back(Json{{"family", c.family}, {"direction", int_vector_json(c.direction)}, {"levels", c.levels}});
    }
    row["fibration"] = Json{{"incident", fib.incident}, {"circles", std::move(circles)}, {"description", fib.description}};
    rows.push_back(std::move(row));
  }
  r.json["points"] = std::move(rows);
  finish(r);
  return r;
}

std::string plot_text(const Json& topology) {
  std::ostringstream out;
  out.precision(17);
  const auto it = topology.find("plot");
  if (it == topology.end()) return {};
  for (const auto& poly : (*it)["polytopes"]) {
    for (const auto& v : poly) {
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i].get<double>();
      out << "\n";
    }
    if (!poly.empty() && poly.size() > 2) {
      const auto& v = poly[0];
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i].get<double>();
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace hypertoric::io
