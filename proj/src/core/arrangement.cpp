#include "arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "error.hpp"
#include "linprog.hpp"

namespace hypertoric::arrangement {

namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (int c = cmp(a[i], b[i]); c != 0) return c < 0;
    }
    return a.size() < b.size();
  }
};

Rational dot(const IntVector& u, const Point& p) {
  Rational s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += Rational(u[i]) * p[i];
  return s;
}

std::vector<Rational> as_rational(const IntVector& u) {
  std::vector<Rational> out;
  for (const auto& e : u.entries()) out.emplace_back(e);
  return out;
}

IntVector unit(std::size_t n, std::size_t j) {
  std::vector<Integer> e(n, 0);
  e[j] = 1;
  return IntVector(std::move(e));
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t m) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < m - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Visits every n-subset of `planes` whose normals are independent, with the
// unique common point.
template <typename Visit>
void for_each_simple_intersection(std::span<const Hyperplane> planes, std::size_t n, Visit&& visit) {
  if (planes.size() < n || n == 0) return;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  do {
    IntegerMatrix u;
    for (auto i : idx) u.push_back(planes[i].normal.entries());
    if (determinant(u) == 0) continue;
    RationalMatrix a;
    std::vector<Rational> b;
    for (auto i : idx) {
      a.push_back(as_rational(planes[i].normal));
      b.push_back(planes[i].level);
    }
    visit(idx, *solve_linear(std::move(a), std::move(b)));
  } while (next_combination(idx, planes.size()));
}

std::size_t dimension_of(std::span<const Hyperplane> planes) {
  return planes.empty() ? 0 : planes.front().normal.size();
}

int sign_of(const Rational& x) { return sgn(x); }

}  // namespace

bool Box::contains_closed(const Point& p) const {
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo[i] || p[i] > hi[i]) return false;
  }
  return true;
}

std::vector<Hyperplane> build_arrangement(const config::FlatConfiguration& cfg, std::size_t window) {
  std::vector<Hyperplane> planes;
  for (const auto& flat : config::enumerate_flats(cfg, window)) {
    if (flat.level.has_complex_part()) {
      throw Error(ErrorCode::kDomain, "complex levels nonzero; rotate or project first (flat " +
                                          std::to_string(flat.index) + ")");
    }
    planes.push_back({flat.generator, flat.level.re, flat.index});
  }
  return planes;
}

std::vector<WindowGuard> window_guards(const config::FlatConfiguration& cfg, std::size_t window) {
  std::vector<WindowGuard> guards;
  for (std::size_t f = 0; f < cfg.families().size(); ++f) {
    const auto& fam = cfg.families()[f];
    double least = std::numeric_limits<double>::infinity();
    for (std::size_t k = window + 1; k <= fam.levels.prefix.size(); ++k) {
      least = std::min(least, std::abs(fam.levels.prefix[k - 1].real_part()));
    }
    if (const auto& tail = fam.levels.tail) {
      const double start = static_cast<double>(std::max(window, fam.levels.prefix.size()) + 1);
      least = std::min(least, tail->growth_constant() * std::pow(start, tail->growth_exponent()));
    }
    if (std::isfinite(least)) guards.push_back({f, fam.generator, least});
  }
  return guards;
}

std::vector<Vertex> enumerate_vertices(std::span<const Hyperplane> planes) {
  const std::size_t n = dimension_of(planes);
  std::map<Point, std::size_t, PointLess> seen;
  std::vector<Vertex> vertices;
  for_each_simple_intersection(planes, n, [&](const std::vector<std::size_t>&, Point p) {
    if (seen.count(p)) return;
    seen.emplace(p, vertices.size());
    Vertex v;
    v.point = std::move(p);
    for (std::size_t i = 0; i < planes.size(); ++i) {
      if (dot(planes[i].normal, v.point) == planes[i].level) v.planes.push_back(i);
    }
    vertices.push_back(std::move(v));
  });
  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& a, const Vertex& b) { return PointLess{}(a.point, b.point); });
  return vertices;
}

Box bounding_box(std::span<const Hyperplane> planes, std::size_t dimension, const Rational& margin) {
  Box box;
  box.lo.assign(dimension, Rational(0));
  box.hi.assign(dimension, Rational(0));
  auto include = [&](const Point& p) {
    for (std::size_t i = 0; i < dimension; ++i) {
      box.lo[i] = std::min(box.lo[i], p[i]);
      box.hi[i] = std::max(box.hi[i], p[i]);
    }
  };
  for (const auto& v : enumerate_vertices(planes)) include(v.point);
  // Without vertices the minimal flats are r-fold intersections, r = rank of
  // the normals; every chamber closure contains one, so the box needs a point
  // of each.
  RationalMatrix normals;
  for (const auto& h : planes) {
    std::vector<Rational> row;
    for (const auto& e : h.normal.entries()) row.emplace_back(e);
    normals.push_back(std::move(row));
  }
  const std::size_t r = planes.empty() ? 0 : rational_rank(normals);
  if (r > 1 && r < dimension) {
    std::vector<std::size_t> idx(r);
    auto visit = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
      if (depth == r) {
        RationalMatrix sub;
        for (auto i : idx) sub.push_back(normals[i]);
        if (rational_rank(sub) < r) return;
        // Least-norm point N^T mu with (N N^T) mu = levels.
        RationalMatrix gram(r, std::vector<Rational>(r));
        std::vector<Rational> rhs;
        for (std::size_t a = 0; a < r; ++a) {
          rhs.push_back(planes[idx[a]].level);
          for (std::size_t b = 0; b < r; ++b) {
            for (std::size_t k = 0; k < dimension; ++k) gram[a][b] += sub[a][k] * sub[b][k];
          }
        }
        const auto mu = solve_linear(std::move(gram), std::move(rhs));
        if (!mu) return;
        Point p(dimension, Rational(0));
        for (std::size_t a = 0; a < r; ++a) {
          for (std::size_t k = 0; k < dimension; ++k) p[k] += sub[a][k] * (*mu)[a];
        }
        include(p);
        return;
      }
      for (std::size_t i = start; i < planes.size(); ++i) {
        idx[depth] = i;
        self(self, i + 1, depth + 1);
      }
    };
    visit(visit, 0, 0);
  }
  for (const auto& h : planes) {
    // Closest point of the hyperplane to the origin.
    Rational norm2 = 0;
    for (const auto& e : h.normal.entries()) norm2 += Rational(e * e);
    Point p;
    for (const auto& e : h.normal.entries()) p.push_back(Rational(e) * h.level / norm2);
    include(p);
  }
  for (std::size_t i = 0; i < dimension; ++i) {
    box.lo[i] -= margin;
    box.hi[i] += margin;
  }
  return box;
}

namespace {

class ChamberCollector {
 public:
  ChamberCollector(std::span<const Hyperplane> planes, const Box& box) : planes_(planes), box_(box) {
    n_ = box.lo.size();
    for (const auto& h : planes) {
      if (h.normal.size() != n_) throw Error(ErrorCode::kArity, "hyperplane and box dimensions differ");
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (box.lo[j] >= box.hi[j]) throw Error(ErrorCode::kInvalidArgument, "box must have lo < hi");
    }
  }

  std::vector<Chamber> run() {
    std::vector<Hyperplane> all(planes_.begin(), planes_.end());
    for (std::size_t j = 0; j < n_; ++j) {
      all.push_back({unit(n_, j), box_.lo[j], 0});
      all.push_back({unit(n_, j), box_.hi[j], 0});
    }
    std::set<Point, PointLess> candidates;
    for_each_simple_intersection(all, n_, [&](const std::vector<std::size_t>& idx, Point p) {
      const bool arrangement_only = std::all_of(idx.begin(), idx.end(), [&](auto i) { return i < planes_.size(); });
      if (!box_.contains_closed(p)) {
        if (arrangement_only) {
          throw Error(ErrorCode::kPrecondition, "box too small: an arrangement vertex lies outside it");
        }
        return;
      }
      candidates.insert(std::move(p));
    });
    for (const auto& p : candidates) visit(p);

    std::vector<Chamber> out;
    out.reserve(chambers_.size());
    for (auto& [signs, chamber] : chambers_) {
      decide_boundedness(chamber);
      std::sort(chamber.vertices.begin(), chamber.vertices.end(), PointLess{});
      chamber.vertices.erase(std::unique(chamber.vertices.begin(), chamber.vertices.end()), chamber.vertices.end());
      out.push_back(std::move(chamber));
    }
    return out;
  }

 private:
  void visit(const Point& p) {
    std::vector<int> side(planes_.size());
    std::vector<Rational> offset(planes_.size());
    std::vector<std::size_t> through;
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      offset[i] = dot(planes_[i].normal, p) - planes_[i].level;
      side[i] = sign_of(offset[i]);
      if (side[i] == 0) through.push_back(i);
    }
    RationalMatrix box_rows;
    for (std::size_t j = 0; j < n_; ++j) {
      std::vector<Rational> row(n_, Rational(0));
      if (p[j] == box_.lo[j]) {
        row[j] = 1;
        box_rows.push_back(row);
      } else if (p[j] == box_.hi[j]) {
        row[j] = -1;
        box_rows.push_back(row);
      }
    }
    IntegerMatrix through_normals;
    for (auto i : through) through_normals.push_back(planes_[i].normal.entries());
    const bool is_vertex = !through.empty() && integer_rank(through_normals) == n_;

    std::vector<int> local(through.size(), 0);
    local_cells(p, side, offset, through, box_rows, is_vertex, local, 0);
  }

  void local_cells(const Point& p, const std::vector<int>& side, const std::vector<Rational>& offset,
                   const std::vector<std::size_t>& through, const RationalMatrix& box_rows, bool is_vertex,
                   std::vector<int>& local, std::size_t depth) {
    if (through.empty()) {
      // Off the arrangement (a box corner); only the box constrains directions.
      auto d = feasible_point(box_rows, std::vector<Rational>(box_rows.size(), Rational(1)), n_);
      if (d) record(p, side, offset, through, local, *d, false);
      return;
    }
    for (int s : {-1, 1}) {
      local[depth] = s;
      RationalMatrix rows = box_rows;
      for (std::size_t k = 0; k <= depth; ++k) {
        auto row = as_rational(planes_[through[k]].normal);
        for (auto& x : row) x *= local[k];
        rows.push_back(std::move(row));
      }
      auto d = feasible_point(rows, std::vector<Rational>(rows.size(), Rational(1)), n_);
      if (!d) continue;
      if (depth + 1 < through.size()) {
        local_cells(p, side, offset, through, box_rows, is_vertex, local, depth + 1);
      } else {
        record(p, side, offset, through, local, *d, is_vertex);
      }
    }
  }

  void record(const Point& p, std::vector<int> signs, const std::vector<Rational>& offset,
              const std::vector<std::size_t>& through, const std::vector<int>& local, const Point& d,
              bool is_vertex) {
    for (std::size_t k = 0; k < through.size(); ++k) signs[through[k]] = local[k];
    std::vector<std::int8_t> key(signs.begin(), signs.end());
    auto [it, inserted] = chambers_.try_emplace(key);
    Chamber& chamber = it->second;
    if (inserted) {
      chamber.signs = key;
      chamber.interior = step_inside(p, offset, d);
    }
    if (is_vertex) chamber.vertices.push_back(p);
  }

  // p + eps d, with eps small enough to stay off every other hyperplane and inside the box.
  Point step_inside(const Point& p, const std::vector<Rational>& offset, const Point& d) const {
    Rational eps = 1;
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      if (offset[i] == 0) continue;
      const Rational g = dot(planes_[i].normal, d);
      if (sgn(g) * sgn(offset[i]) < 0) eps = std::min(eps, Rational(abs(offset[i]) / abs(g)));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (d[j] > 0) eps = std::min(eps, Rational((box_.hi[j] - p[j]) / d[j]));
      if (d[j] < 0) eps = std::min(eps, Rational((p[j] - box_.lo[j]) / -d[j]));
    }
    eps /= 2;
    Point q = p;
    for (std::size_t j = 0; j < n_; ++j) q[j] += eps * d[j];
    return q;
  }

  void decide_boundedness(Chamber& chamber) const {
    std::set<std::vector<Rational>, PointLess> unique_rows;
    for (std::size_t i = 0; i < planes_.size(); ++i) {
      auto row = as_rational(planes_[i].normal);
      for (auto& x : row) x *= chamber.signs[i];
      unique_rows.insert(std::move(row));
    }
    const RationalMatrix cone(unique_rows.begin(), unique_rows.end());
    for (std::size_t j = 0; j < n_; ++j) {
      for (int s : {1, -1}) {
        RationalMatrix rows = cone;
        std::vector<Rational> rhs(rows.size(), Rational(0));
        std::vector<Rational> pick(n_, Rational(0));
        pick[j] = s;
        rows.push_back(pick);
        rhs.push_back(1);
        if (auto d = feasible_point(rows, rhs, n_)) {
          chamber.bounded = false;
          chamber.recession = std::move(*d);
          return;
        }
      }
    }
    chamber.bounded = true;
  }

  std::span<const Hyperplane> planes_;
  const Box& box_;
  std::size_t n_ = 0;
  std::map<std::vector<std::int8_t>, Chamber> chambers_;
};

int affine_dimension(const std::vector<Point>& points) {
  if (points.empty()) return -1;
  RationalMatrix diffs;
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::vector<Rational> row;
    for (std::size_t j = 0; j < points[i].size(); ++j) row.push_back(points[i][j] - points[0][j]);
    diffs.push_back(std::move(row));
  }
  return static_cast<int>(rational_rank(std::move(diffs)));
}

}  // namespace

std::vector<Chamber> enumerate_chambers(std::span<const Hyperplane> planes, const Box& box) {
  if (box.lo.empty() || box.lo.size() != box.hi.size()) throw Error(ErrorCode::kArity, "malformed box");
  return ChamberCollector(planes, box).run();
}

std::pair<std::vector<PosetElement>, std::vector<std::pair<std::size_t, std::size_t>>> intersection_poset(
    std::span<const Hyperplane> planes, std::size_t dimension) {
  std::vector<PosetElement> elements;
  std::vector<std::pair<std::size_t, std::size_t>> covers;
  // Internally elements carry positions into `planes`; flat indices are substituted at the end.
  std::vector<std::vector<std::size_t>> members;

  elements.push_back({static_cast<int>(dimension), {}, Point(dimension, Rational(0))});
  members.push_back({});
  std::vector<std::size_t> level = {0};

  auto normals_rank = [&](const std::vector<std::size_t>& set) {
    IntegerMatrix m;
    for (auto i : set) m.push_back(planes[i].normal.entries());
    return integer_rank(std::move(m));
  };

  for (std::size_t rank = 0; rank < dimension && !level.empty(); ++rank) {
    std::map<std::vector<std::size_t>, std::size_t> next_index;
    std::vector<std::vector<std::size_t>> containing(planes.size());  // plane -> new elements containing it
    std::vector<std::size_t> next;
    for (auto e : level) {
      const auto set = members[e];
      for (std::size_t j = 0; j < planes.size(); ++j) {
        if (std::binary_search(set.begin(), set.end(), j)) continue;
        // Already produced: some new element contains set + {j}.
        std::optional<std::size_t> found;
        for (auto c : containing[j]) {
          if (std::includes(members[c].begin(), members[c].end(), set.begin(), set.end())) {
            found = c;
            break;
          }
        }
        if (found) {
          covers.emplace_back(e, *found);
          continue;
        }
        auto trial = set;
        trial.push_back(j);
        std::sort(trial.begin(), trial.end());
        if (normals_rank(trial) != rank + 1) continue;  // parallel to the element but not containing it
        RationalMatrix a;
        std::vector<Rational> b;
        for (auto i : trial) {
          a.push_back(as_rational(planes[i].normal));
          b.push_back(planes[i].level);
        }
        auto p = solve_linear(std::move(a), std::move(b));
        if (!p) continue;
        std::vector<std::size_t> full;
        for (std::size_t l = 0; l < planes.size(); ++l) {
          if (dot(planes[l].normal, *p) != planes[l].level) continue;
          auto with = trial;
          if (!std::binary_search(trial.begin(), trial.end(), l)) {
            with.push_back(l);
            if (normals_rank(with) != rank + 1) continue;
          }
          full.push_back(l);
        }
        auto [it, inserted] = next_index.try_emplace(full, elements.size());
        if (inserted) {
          elements.push_back({static_cast<int>(dimension - rank - 1), {}, *p});
          members.push_back(full);
          for (auto l : full) containing[l].push_back(it->second);
          next.push_back(it->second);
        }
        covers.emplace_back(e, it->second);
      }
    }
    level = std::move(next);
  }
  std::sort(covers.begin(), covers.end());
  covers.erase(std::unique(covers.begin(), covers.end()), covers.end());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (auto l : members[i]) elements[i].planes.push_back(planes[l].flat_index);
  }
  return {std::move(elements), std::move(covers)};
}

HomotopyReport homotopy_report(std::span<const Hyperplane> planes, const Box& box,
                               std::span<const WindowGuard> guards, const PosetOptions& options) {
  HomotopyReport report;
  auto chambers = enumerate_chambers(planes, box);
  report.chamber_count = chambers.size();
  for (auto& c : chambers) {
    if (!c.bounded) continue;
    for (const auto& g : guards) {
      Rational reach = 0;
      for (const auto& v : c.vertices) reach = std::max(reach, Rational(abs(dot(g.normal, v))));
      if (reach.get_d() >= g.min_abs_level) c.window_truncated = true;
    }
    if (c.window_truncated) {
      ++report.truncated_excluded;
      continue;
    }
    report.polytopes.push_back(std::move(c));
  }

  for (std::size_t i = 0; i < report.polytopes.size(); ++i) {
    for (std::size_t j = i + 1; j < report.polytopes.size(); ++j) {
      const auto& a = report.polytopes[i].vertices;
      const auto& b = report.polytopes[j].vertices;
      std::vector<Point> shared;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(shared), PointLess{});
      if (shared.empty()) continue;
      report.adjacency.push_back({i, j, affine_dimension(shared), std::move(shared)});
    }
  }

  if (options.include_poset) {
    auto [elements, covers] = intersection_poset(planes, box.lo.size());
    report.poset = std::move(elements);
    report.poset_covers = std::move(covers);
  }
  return report;
}

std::pair<double, double> tau_inverse(double p, double q) {
  // x^2 = p + R, y^2 = -p + R with R = |(p, q)|; the smaller one is taken from
  // x^2 y^2 = q^2 to avoid cancellation.
  const double r = std::hypot(p, q);
  double a = 0.0;
  double b = 0.0;
  if (p >= 0) {
    a = p + r;
    b = a > 0 ? q * q / a : 0.0;
  } else {
    b = r - p;
    a = q * q / b;
  }
  return {std::sqrt(a), std::sqrt(b)};
}

std::pair<double, double> retraction_pair(double t, double x, double y) {
  if (x < 0 || y < 0 || std::isnan(x) || std::isnan(y)) {
    throw Error(ErrorCode::kDomain, "retraction_pair needs x, y >= 0");
  }
  if (!(t >= 0 && t <= 1)) throw Error(ErrorCode::kDomain, "retraction_pair needs t in [0, 1]");
  if (t == 1) return {x, y};
  // j_t = tau^{-1}(p, t q) for tau(x, y) = (p, q).
  const auto [jx, jy] = tau_inverse(0.5 * (x - y) * (x + y), t * x * y);
  return {std::min(jx, x), std::min(jy, y)};
}

std::pair<std::complex<double>, std::complex<double>> deform_pair(double t, std::complex<double> z,
                                                                  std::complex<double> w) {
  const double x = std::abs(z);
  const double y = std::abs(w);
  const auto [jx, jy] = retraction_pair(t, x, y);
  const std::complex<double> phase_z = x > 0 ? z / x : std::complex<double>(1.0, 0.0);
  const std::complex<double> phase_w = y > 0 ? w / y : std::complex<double>(1.0, 0.0);
  return {jx * phase_z, jy * phase_w};
}

}  // namespace hypertoric::arrangement
