// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/grid_oracle.hpp"
#include "arrangement.hpp"
#include "config.hpp"
#include "error.hpp"
#include "lattice.hpp"
#include "metric.hpp"
#include "moment.hpp"
#include "periodic.hpp"

using namespace hypertoric;
using C = std::complex<double>;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

config::FlatFamily flat(std::vector<long> u, Rational re, Rational cre = 0, Rational cim = 0) {
  std::vector<Integer> e(u.begin(), u.end());
  config::FlatFamily f;
  f.generator = lattice::IntVector(e);
  f.levels.prefix.push_back({re, cre, cim});
  return f;
}

// Random certified finite configuration with small generators and dyadic levels.
config::FlatConfiguration random_finite(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_int_distribution<int> level(-4, 4);
  while (true) {
    std::vector<config::FlatFamily> fams;
    const std::size_t m = n + 1 + rng() % 4;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<long> e(n);
      do {
        for (auto& x : e) x = entry(rng);
      } while (std::all_of(e.begin(), e.end(), [](long x) { return x == 0; }));
      fams.push_back(flat(e, make_rational(level(rng), 2), make_rational(level(rng), 4), make_rational(level(rng), 4)));
    }
    try {
      return config::FlatConfiguration::create(n, std::move(fams)).certified();
    } catch (const Error&) {
      // duplicate flat or non-spanning generators; draw again
    }
  }
}

config::BasePoint random_point(std::mt19937& rng, std::size_t n, double reach) {
  std::uniform_real_distribution<double> coord(-reach, reach);
  config::BasePoint p;
  for (std::size_t i = 0; i < n; ++i) p.a.push_back(coord(rng));
  for (std::size_t i = 0; i < n; ++i) {
    const double re = coord(rng);
    p.b.emplace_back(re, coord(rng));
  }
  return p;
}

// Point at flat distance >= min_distance and string gap >= min_gap for the first `window` members.
config::BasePoint clear_point(std::mt19937& rng, const config::FlatConfiguration& cfg, std::size_t window,
                              double reach, double min_distance, double min_gap) {
  while (true) {
    auto p = random_point(rng, cfg.rank(), reach);
    bool ok = true;
    for (const auto& d : metric::flat_data(p, cfg, window)) ok = ok && d.distance >= min_distance && d.string_gap >= min_gap;
    if (ok) return p;
  }
}

// ---------------------------------------------------------------------------

Outcome smoothness_gate() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto goto_cfg = config::builtin_goto(2, 8).certified();
  const auto good = config::check_smoothness(goto_cfg, 50);
  const auto bad_cfg = config::FlatConfiguration::create(2, {flat({1, 1}, 0), flat({1, -1}, 0)}).certified();
  const auto bad = config::check_smoothness(bad_cfg, 50);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Outcome out;
  out.pass = good.pass && good.window == 50 && good.flats_checked >= 100;
  bool witness_ok = !bad.pass && !bad.violations.empty();
  if (witness_ok) {
    const auto& w = bad.violations.front();
    witness_ok = w.condition == config::Condition::kB && w.determinant && abs(*w.determinant) == 2 &&
                 w.flats == std::vector<std::size_t>{0, 1};
  }
  out.pass = out.pass && witness_ok && seconds < 5.0;
  out.detail = fmt("Goto n=2 window 50: %s (%zu flats); det -2 pair: %s; %.3f s", good.pass ? "PASS" : "FAIL",
                   good.flats_checked, witness_ok ? "FAIL(b) with |det| = 2 witness {0, 1}" : "wrong verdict", seconds);
  return out;
}

// Independent integer determinant by cofactor expansion.
long det(const std::vector<std::vector<long>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  long acc = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<long>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    acc += (c % 2 ? -1 : 1) * m[0][c] * det(minor);
  }
  return acc;
}

bool all_subsets_unimodular(const std::vector<std::vector<long>>& gens, std::size_t n, const std::vector<long>& extra) {
  // Only subsets containing `extra` are new.
  std::vector<std::size_t> idx(n - 1);
  const std::size_t m = gens.size();
  if (m < n - 1) return true;
  std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n - 1) {
      std::vector<std::vector<long>> cols;
      for (auto i : idx) cols.push_back(gens[i]);
      cols.push_back(extra);
      std::vector<std::vector<long>> mat(n, std::vector<long>(n));
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) mat[r][c] = cols[c][r];
      }
      const long d = det(mat);
      return d == 0 || d == 1 || d == -1;
    }
    for (std::size_t i = start; i < m; ++i) {
      idx[depth] = i;
      if (!rec(i + 1, depth + 1)) return false;
    }
    return true;
  };
  return rec(0, 0);
}

Outcome lattice_bound() {
  std::mt19937 rng(1001);
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::size_t violations = 0, largest[4] = {0, 0, 0, 0}, not_ternary = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = trial % 2 ? 3 : 2;
    // Random unimodular basis from elementary moves.
    std::vector<std::vector<long>> b(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) b[i][i] = 1;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int step = 0; step < 8; ++step) {
      const auto i = pick(rng), j = pick(rng);
      if (i == j) continue;
      const int c = coeff(rng);
      for (std::size_t k = 0; k < n; ++k) b[i][k] += c * b[j][k];
    }
    std::vector<std::vector<long>> gens;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<long> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = b[i][j];
      gens.push_back(col);
    }
    // Greedy closure: add random lattice vectors while every independent n-subset stays a Z-basis.
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::vector<long> c(n), v(n, 0);
      for (auto& x : c) x = coeff(rng);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[i] += b[i][j] * c[j];
      }
      if (std::all_of(v.begin(), v.end(), [](long x) { return x == 0; })) continue;
      if (std::find(gens.begin(), gens.end(), v) != gens.end()) continue;
      if (all_subsets_unimodular(gens, n, v)) gens.push_back(v);
    }
    std::vector<lattice::IntVector> per_flat;
    for (const auto& g : gens) per_flat.emplace_back(std::vector<Integer>(g.begin(), g.end()));
    const auto gs = lattice::GeneratorSet::from_flats(n, per_flat);
    const auto norm = lattice::normalize_generators(gs);
    const std::size_t count = norm.generators.generators.size();
    largest[n] = std::max(largest[n], count);
    if (count > static_cast<std::size_t>(std::pow(3, n)) - 1) ++violations;
    for (const auto& g : norm.generators.generators) {
      for (const auto& e : g.entries()) {
        if (abs(e) > 1) ++not_ternary;
      }
    }
  }
  Outcome out;
  out.pass = violations == 0 && not_ternary == 0;
  out.detail = fmt("1000 configurations, %zu violations; largest count n=2: %zu (bound 8), n=3: %zu (bound 26)",
                   violations, largest[2], largest[3]);
  return out;
}

std::vector<arrangement::Hyperplane> planes_of(const std::vector<oracle::Plane>& defs) {
  std::vector<arrangement::Hyperplane> out;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    std::vector<Integer> u(defs[i].normal.begin(), defs[i].normal.end());
    out.push_back({lattice::IntVector(u), to_rational(defs[i].level), i});
  }
  return out;
}

Outcome chamber_oracle() {
  std::mt19937 rng(303);
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_int_distribution<int> level(-4, 4);
  std::size_t checked = 0, mismatches = 0, chambers_total = 0;
  for (int trial = 0; trial < 450; ++trial) {
    const std::size_t n = trial < 50 ? 1 : trial < 350 ? 2 : 3;
    const std::size_t m = 1 + trial % 6;
    std::vector<oracle::Plane> defs;
    int guard = 0;
    while (defs.size() < m && ++guard < 1000) {
      oracle::Plane p;
      for (std::size_t j = 0; j < n; ++j) p.normal.push_back(entry(rng));
      if (std::all_of(p.normal.begin(), p.normal.end(), [](int v) { return v == 0; })) continue;
      // Primitive normals in {-1, 0, 1}^n are automatic; levels are halves.
      p.level = level(rng) / 2.0;
      bool dup = false;
      for (const auto& q : defs) {
        bool flipped = q.level == -p.level, same = q.level == p.level && q.normal == p.normal;
        for (std::size_t j = 0; j < n; ++j) flipped = flipped && q.normal[j] == -p.normal[j];
        dup = dup || same || flipped;
      }
      if (!dup) defs.push_back(p);
    }
    const auto planes = planes_of(defs);
    const auto chambers = arrangement::enumerate_chambers(planes, arrangement::bounding_box(planes, n));
    double reach = 0;
    for (const auto& v : arrangement::enumerate_vertices(planes)) {
      for (const auto& c : v.point) reach = std::max(reach, std::abs(c.get_d()));
    }
    for (const auto& p : defs) reach = std::max(reach, std::abs(p.level));
    reach = std::floor(reach) + 3;
    const double step = n == 1 ? 1.0 / 64 : n == 2 ? 1.0 / 32 : 1.0 / 8;
    const auto grid = oracle::grid_chambers(defs, n, reach, step);
    ++checked;
    chambers_total += chambers.size();
    bool same = grid.size() == chambers.size();
    for (const auto& c : chambers) {
      const auto it = grid.find(c.signs);
      same = same && it != grid.end() && it->second.bounded == c.bounded;
    }
    if (!same) {
      ++mismatches;
      if (std::getenv("HT_DEBUG")) {
        std::fprintf(stderr, "n=%zu grid=%zu enum=%zu planes:", n, grid.size(), chambers.size());
        for (const auto& p : defs) {
          std::fprintf(stderr, " (");
          for (int v : p.normal) std::fprintf(stderr, "%d ", v);
          std::fprintf(stderr, "| %g)", p.level);
        }
        std::fprintf(stderr, "\n");
        for (const auto& c : chambers) {
          const auto it = grid.find(c.signs);
          if (it == grid.end() || it->second.bounded != c.bounded) {
            std::fprintf(stderr, "  enum chamber bounded=%d grid=%s\n", c.bounded, it == grid.end() ? "missing" : it->second.bounded ? "bounded" : "unbounded");
          }
        }
      }
    }
  }

  // Window x = 0, y = 0, x + y = 1, x = 2.
  const std::vector<oracle::Plane> fig = {{{1, 0}, 0}, {{0, 1}, 0}, {{1, 1}, 1}, {{1, 0}, 2}};
  const auto fp = planes_of(fig);
  std::vector<std::set<std::pair<double, double>>> bounded;
  for (const auto& c : arrangement::enumerate_chambers(fp, arrangement::bounding_box(fp, 2))) {
    if (!c.bounded) continue;
    std::set<std::pair<double, double>> vs;
    for (const auto& v : c.vertices) vs.insert({v[0].get_d(), v[1].get_d()});
    bounded.push_back(vs);
  }
  const std::set<std::pair<double, double>> t1 = {{0, 0}, {1, 0}, {0, 1}}, t2 = {{1, 0}, {2, 0}, {2, -1}};
  const bool four_lines = bounded.size() == 2 && ((bounded[0] == t1 && bounded[1] == t2) || (bounded[0] == t2 && bounded[1] == t1));

  Outcome out;
  out.pass = mismatches == 0 && four_lines;
  out.detail = fmt("%zu arrangements (n = 1..3, <= 6 planes, %zu chambers), %zu mismatches; four-line window: %s", checked,
                   chambers_total, mismatches, four_lines ? "2 bounded chambers with the stated vertices" : "MISMATCH");
  return out;
}

Outcome goto_pattern() {
  Outcome out;
  std::string windows;
  const auto cfg = config::builtin_goto(2, 12).certified();
  for (std::size_t window : {4, 6, 10}) {
    const auto planes = arrangement::build_arrangement(cfg, window);
    const auto guards = arrangement::window_guards(cfg, window);
    const auto report = arrangement::homotopy_report(planes, arrangement::bounding_box(planes, 2), guards, {false});
    const auto& polys = report.polytopes;
    std::vector<std::size_t> order(polys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return polys[a].interior[0] < polys[b].interior[0]; });
    std::vector<std::size_t> rank(polys.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

    std::vector<std::size_t> simplices;
    for (std::size_t i = 0; i < polys.size(); ++i) {
      if (polys[i].vertices.size() == 3) simplices.push_back(i);
    }
    bool ok = simplices.size() == 2 && polys.size() >= 4;
    std::size_t truncated = 0;
    for (const auto& p : polys) truncated += p.vertices.size() == 4;
    ok = ok && truncated + 2 == polys.size();
    // Simplices are adjacent in x order; every other consecutive pair meets in an edge.
    if (ok) ok = std::max(rank[simplices[0]], rank[simplices[1]]) - std::min(rank[simplices[0]], rank[simplices[1]]) == 1;
    std::size_t point_contacts = 0, edge_contacts = 0;
    for (const auto& a : report.adjacency) {
      const auto lo = std::min(rank[a.first], rank[a.second]), hi = std::max(rank[a.first], rank[a.second]);
      const bool simplex_pair = std::set<std::size_t>{a.first, a.second} == std::set<std::size_t>(simplices.begin(), simplices.end());
      if (hi - lo != 1) ok = false;
      if (simplex_pair) {
        ok = ok && a.face_dimension == 0 && a.shared_vertices.size() == 1;
        ++point_contacts;
      } else {
        ok = ok && a.face_dimension == 1 && a.shared_vertices.size() == 2;
        ++edge_contacts;
      }
    }
    ok = ok && point_contacts == 1 && edge_contacts + 2 == polys.size();
    out.pass = out.pass && ok;
    windows += fmt("%swindow %zu: %zu polytopes, 1 point + %zu edge contacts%s", windows.empty() ? "" : "; ", window,
                   polys.size(), edge_contacts, ok ? "" : " (MISMATCH)");
  }
  out.detail = windows;
  return out;
}

Outcome retraction() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  double worst_tau = 0, worst_hyp = 0;
  std::size_t identity_failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const double x = unit(rng) * std::pow(10.0, exponent(rng));
    const double y = unit(rng) * std::pow(10.0, exponent(rng));
    const double t = i % 50 == 0 ? (i % 100 == 0 ? 0.0 : 1.0) : unit(rng);
    const auto [j1, j2] = arrangement::retraction_pair(t, x, y);
    const double scale = x * x + y * y;
    if (scale == 0) continue;
    const double tau1 = 0.5 * (j1 * j1 - j2 * j2), tau2 = j1 * j2;
    worst_tau = std::max({worst_tau, std::abs(tau1 - 0.5 * (x * x - y * y)) / scale, std::abs(tau2 - t * x * y) / scale});
    worst_hyp = std::max(worst_hyp, std::abs((j1 * j1 - j2 * j2) - (x * x - y * y)) / scale);
    if (t == 1.0 && (j1 != x || j2 != y)) ++identity_failures;
  }
  Outcome out;
  out.pass = worst_tau <= 1e-12 && worst_hyp <= 1e-12 && identity_failures == 0;
  out.detail = fmt("1e5 samples: tau residual %.2e, hyperbola residual %.2e (relative to x^2 + y^2); t = 1 identity failures: %zu",
                   worst_tau, worst_hyp, identity_failures);
  return out;
}

Outcome polyharmonic() {
  std::mt19937 rng(606);
  double worst = 0, ratio_lo = 1e9, ratio_hi = 0;
  std::size_t points = 0, ratio_skipped = 0;
  bool ok = true;
  while (points < 100) {
    const std::size_t n = 1 + points % 3;
    const auto cfg = random_finite(rng, n);
    for (int k = 0; k < 4 && points < 100; ++k, ++points) {
      const auto p = clear_point(rng, cfg, 100, 3.0, 0.25, 0.5);
      const auto r1 = metric::polyharmonic_check(p, cfg, 100, 1e-4);
      const auto r2 = metric::polyharmonic_check(p, cfg, 100, 5e-5);
      worst = std::max(worst, r1.residual);
      ok = ok && r1.residual < 1e-6;
      if (r1.residual > 1e-18) {
        const double ratio = r1.residual / r2.residual;
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
        ok = ok && ratio >= 3.5 && ratio <= 4.5;
      } else {
        ++ratio_skipped;
      }
    }
  }
  Outcome out;
  out.pass = ok;
  out.detail = fmt("100 points, n = 1..3: max residual %.2e at h = 1e-4; h-halving ratio in [%.3f, %.3f] (%zu below 1e-18)",
                   worst, ratio_lo, ratio_hi, ratio_skipped);
  return out;
}

Outcome potential_correctness() {
  std::mt19937 rng(707);
  double worst_gh = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = random_finite(rng, 1);
    const auto p = clear_point(rng, cfg, 100, 3.0, 0.05, 0.0);
    // Gibbons-Hawking: sum over centres x_k = u_k (lambda_k) of 1 / (2 |x - x_k|).
    double gh = 0;
    for (const auto& fam : cfg.families()) {
      const double u = fam.generator[0].get_d();
      for (const auto& q : fam.levels.prefix) {
        const double dx = p.a[0] - u * q.re.get_d();
        const C db = p.b[0] - u * q.complex_part();
        gh += 1.0 / (2.0 * std::sqrt(dx * dx + std::norm(db)));
      }
    }
    const double phi = metric::potential(p, cfg, {}).phi(0, 0);
    worst_gh = std::max(worst_gh, std::abs(phi - gh) / gh);
  }

  const auto goto_cfg = config::builtin_goto(2, 8).certified();
  std::size_t violations = 0;
  double worst_gap = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = clear_point(rng, goto_cfg, 200, 3.0, 0.1, 0.0);
    metric::TruncationPlan small, large;
    small.n = 20;
    const auto a = metric::potential(p, goto_cfg, small);
    large.n = 4 * a.truncation;
    const auto b = metric::potential(p, goto_cfg, large);
    const double gap = (b.phi - a.phi).cwiseAbs().maxCoeff();
    worst_gap = std::max(worst_gap, gap / a.tail_bound);
    // Omitted terms are positive semidefinite, so the diagonal can only grow.
    const bool diag_up = (b.phi.diagonal() - a.phi.diagonal()).minCoeff() >= -1e-14;
    if (gap > a.tail_bound + 1e-14 || !diag_up || b.tail_bound > a.tail_bound) ++violations;
  }
  Outcome out;
  out.pass = worst_gh <= 1e-12 && violations == 0;
  out.detail = fmt("n = 1 vs Gibbons-Hawking: max relative error %.2e; Goto N vs 4N on 100 points: %zu bracket violations "
                   "(largest |Phi_4N - Phi_N| / tail_N = %.3f)",
                   worst_gh, violations, worst_gap);
  return out;
}

Eigen::MatrixXd random_taub_nut(std::mt19937& rng, std::size_t n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = g(rng);
  }
  Eigen::MatrixXd c = a.transpose() * a;
  std::uniform_real_distribution<double> size(0.0, 0.1);
  const double norm = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c).eigenvalues().maxCoeff();
  return c * (size(rng) / norm);
}

Outcome positive_definite() {
  std::mt19937 rng(808);
  std::vector<std::pair<std::string, config::FlatConfiguration>> configs = {
      {"Goto n=2", config::builtin_goto(2, 8).certified()},
      {"Goto n=3", config::builtin_goto(3, 6).certified()},
      {"random n=2", random_finite(rng, 2)},
      {"random n=3", random_finite(rng, 3)},
  };
  std::size_t failures = 0, checks = 0;
  for (const auto& [name, cfg] : configs) {
    for (int k = 0; k < 100; ++k) {
      const auto p = clear_point(rng, cfg, 100, 3.0, 0.05, 0.0);
      for (int with_c = 0; with_c < 2; ++with_c) {
        metric::Deformation d;
        if (with_c) d = metric::TaubNutDeformation{random_taub_nut(rng, cfg.rank()), {}};
        const auto g = metric::gram_matrix(p, cfg, {}, d);
        checks += 2;
        if (Eigen::LLT<Eigen::MatrixXd>(g.potential.phi).info() != Eigen::Success) ++failures;
        if (Eigen::LLT<Eigen::MatrixXd>(g.g).info() != Eigen::Success) ++failures;
      }
    }
  }
  Outcome out;
  out.pass = failures == 0;
  out.detail = fmt("%zu Cholesky factorizations (Phi and Gram, 4 configurations x 100 points, with and without c), %zu failures",
                   checks, failures);
  return out;
}

moment::MomentProblem random_problem(std::mt19937& rng) {
  std::uniform_int_distribution<int> dim(1, 3);
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.2, 2.0);
  while (true) {
    const std::size_t n = dim(rng);
    const std::size_t m = n + 1 + rng() % (10 - n);
    std::vector<lattice::IntVector> us;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Integer> e(n);
      do {
        for (auto& x : e) x = entry(rng);
      } while (std::all_of(e.begin(), e.end(), [](const Integer& x) { return x == 0; }));
      us.emplace_back(e);
    }
    moment::MomentProblem p;
    p.kernel_basis = moment::kernel_of(us);
    if (p.kernel_basis.empty()) continue;
    for (std::size_t i = 0; i < m; ++i) {
      p.z.push_back(std::polar(mag(rng), 3 * real(rng)));
      p.w.push_back(std::polar(mag(rng), 3 * real(rng)));
      p.lambda1.push_back(real(rng));
    }
    p.generators = us;
    p.target.assign(p.kernel_basis.size(), 0.0);
    return p;
  }
}

Outcome moment_solver() {
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> real(-1.0, 1.0);
  double worst = 0;
  std::size_t failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_problem(rng);
    std::vector<double> planted;
    for (std::size_t j = 0; j < p.kernel_basis.size(); ++j) planted.push_back(real(rng));
    double reach = 0;
    for (std::size_t i = 0; i < p.z.size(); ++i) {
      double y = 0;
      for (std::size_t j = 0; j < planted.size(); ++j) y += p.kernel_basis[j][i].get_d() * planted[j];
      reach = std::max(reach, std::abs(y));
    }
    for (auto& x : planted) x /= std::max(reach, 1.0);
    p.target = moment::moment_map(p, planted);
    try {
      const auto s = moment::moment_solve(p);
      worst = std::max(worst, s.residual);
      if (s.residual > 1e-10) ++failures;
    } catch (const Error&) {
      ++failures;
    }
  }

  moment::MomentProblem closed;
  closed.z = {1.0, 1.0};
  closed.w = {1.0, 1.0};
  closed.lambda1 = {0.0, 0.0};
  closed.kernel_basis = {{Rational(1), Rational(-1)}};
  closed.generators = std::vector<lattice::IntVector>{{1}, {1}};
  closed.target = {2 * std::sinh(1.0)};
  const double t = moment::moment_solve(closed).eta[0];

  std::size_t monotone_failures = 0;
  moment::MomentProblem p;
  for (int pair = 0; pair < 10000; ++pair) {
    if (pair % 100 == 0) p = random_problem(rng);
    const std::size_t d = p.kernel_basis.size();
    std::vector<double> e1(d), e2(d);
    for (auto& x : e1) x = 2 * real(rng);
    for (auto& x : e2) x = 2 * real(rng);
    const auto m1 = moment::moment_map(p, e1), m2 = moment::moment_map(p, e2);
    double dot = 0;
    for (std::size_t j = 0; j < d; ++j) dot += (m1[j] - m2[j]) * (e1[j] - e2[j]);
    if (dot < 0) ++monotone_failures;
  }
  Outcome out;
  out.pass = failures == 0 && std::abs(t - 0.5) <= 1e-10 && monotone_failures == 0;
  out.detail = fmt("100 random problems: %zu failures, max residual %.2e; sinh case t = %.12f; monotonicity failures %zu / 10000",
                   failures, worst, t, monotone_failures);
  return out;
}

Outcome ooguri_vafa() {
  const double exact = 4 * std::numbers::ln2;
  const auto s1 = periodic::ov_potential(0.5, 0, 10000);
  const auto s2 = periodic::ov_potential(0.5, 0, 20000);
  const double e1 = std::abs(s1.value - exact), e2 = std::abs(s2.value - exact);
  bool ok = e1 <= s1.tail_bound && e1 < 1e-3 && e2 < e1 && std::abs(s2.tail_bound / s1.tail_bound - 0.5) < 0.01;

  std::mt19937 rng(1010);
  std::uniform_real_distribution<double> xs(-3.0, 3.0), radius(0.0, 0.99), angle(0.0, 2 * std::numbers::pi);
  std::size_t periodic_failures = 0, harmonic_failures = 0;
  double worst_ratio = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = xs(rng);
    const C w = std::polar(radius(rng), angle(rng));
    const auto a = periodic::ov_potential(x, w, 1000);
    const auto b = periodic::ov_potential(x + 1, w, 1000);
    const double bound = 2 * std::max(a.tail_bound, b.tail_bound);
    worst_ratio = std::max(worst_ratio, std::abs(b.value - a.value) / bound);
    if (std::abs(b.value - a.value) >= bound) ++periodic_failures;

    // Away from the centres, the truncated sum is harmonic up to the O(h^2) stencil error.
    const double dist = std::sqrt(std::pow(x - std::round(x), 2) + std::norm(w));
    if (dist < 0.2) continue;
    const double h = 1e-2;
    const double l1 = periodic::ov_laplacian(x, w, 1000, h), l2 = periodic::ov_laplacian(x, w, 1000, h / 2);
    const bool small = std::abs(l1) <= 10 * h * h / std::pow(dist, 5);
    const bool order = std::abs(l1) < 1e-9 || std::abs(l1 / l2 - 4) < 0.5;
    if (!small || !order) ++harmonic_failures;
  }
  ok = ok && periodic_failures == 0 && harmonic_failures == 0;
  Outcome out;
  out.pass = ok;
  out.detail = fmt("Phi(1/2, 0) error %.2e <= tail %.2e at N = 1e4 (%.2e at 2N, tail ratio %.3f); periodicity failures %zu / 100 "
                   "(max residual / 2 tail = %.3f); harmonicity failures %zu",
                   e1, s1.tail_bound, e2, s2.tail_bound / s1.tail_bound, periodic_failures, worst_ratio, harmonic_failures);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"smoothness gate", smoothness_gate},
      {"lattice bound", lattice_bound},
      {"chamber oracle", chamber_oracle},
      {"Goto homotopy pattern", goto_pattern},
      {"retraction identities", retraction},
      {"polyharmonic residual", polyharmonic},
      {"potential correctness", potential_correctness},
      {"positive definiteness", positive_definite},
      {"moment solver", moment_solver},
      {"Ooguri-Vafa", ooguri_vafa},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
