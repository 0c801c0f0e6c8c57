#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "error.hpp"

namespace hypertoric::config {

namespace {

// Members of the tail checked at construction for growth and distinctness.
constexpr std::size_t kSampleWindow = 256;

Rational exact_power(std::size_t k, double delta) {
  if (delta == std::floor(delta) && delta >= 0 && delta <= 64) {
    Integer p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(delta));
    return Rational(p);
  }
  return to_rational(std::pow(static_cast<double>(k), delta));
}

// Sign-canonical (generator, level) key: H(u, l) == H(-u, -l).
std::pair<IntVector, ImQuaternion> canonical_flat(const IntVector& u, const ImQuaternion& l) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0) return {u, l};
    if (u[i] < 0) return {-u, -l};
  }
  return {u, l};
}

struct FlatKeyLess {
  bool operator()(const std::pair<IntVector, ImQuaternion>& x, const std::pair<IntVector, ImQuaternion>& y) const {
    if (auto c = x.first <=> y.first; c != 0) return c < 0;
    if (int c = cmp(x.second.re, y.second.re); c != 0) return c < 0;
    if (int c = cmp(x.second.cx_re, y.second.cx_re); c != 0) return c < 0;
    return cmp(x.second.cx_im, y.second.cx_im) < 0;
  }
};

std::string describe(const IntVector& u) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < u.size(); ++i) out << (i ? "," : "") << u[i].get_str();
  out << ')';
  return out.str();
}

}  // namespace

double ImQuaternion::norm() const {
  const double r = re.get_d();
  return std::sqrt(r * r + std::norm(complex_part()));
}

ImQuaternion TailLaw::level(std::size_t k) const {
  ImQuaternion q;
  q.cx_re = cx_re;
  q.cx_im = cx_im;
  if (kind == TailKind::kArithmetic) {
    q.re = lambda0 + d * Rational(static_cast<unsigned long>(k));
  } else {
    q.re = lambda0 + Rational(sign) * to_rational(c) * exact_power(k, delta);
  }
  return q;
}

double TailLaw::growth_constant() const { return kind == TailKind::kArithmetic ? std::abs(d.get_d()) : c; }
double TailLaw::growth_exponent() const { return kind == TailKind::kArithmetic ? 1.0 : delta; }

std::optional<ImQuaternion> LambdaLaw::member(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "family members are 1-based");
  if (k <= prefix.size()) return prefix[k - 1];
  if (tail) return tail->level(k);
  return std::nullopt;
}

FlatConfiguration FlatConfiguration::create(std::size_t rank, std::vector<FlatFamily> families) {
  if (rank == 0) throw Error(ErrorCode::kSchema, "rank must be >= 1");
  if (families.empty()) throw Error(ErrorCode::kSchema, "configuration has no families");

  std::vector<IntVector> generators;
  std::set<std::pair<IntVector, ImQuaternion>, FlatKeyLess> seen;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& fam = families[f];
    const std::string where = "families[" + std::to_string(f) + "]";
    if (fam.generator.size() != rank) throw Error(ErrorCode::kSchema, where + ".generator has wrong length");
    if (fam.generator.is_zero()) throw Error(ErrorCode::kSchema, where + ".generator is the zero vector");
    if (!lattice::is_primitive(fam.generator)) {
      throw Error(ErrorCode::kSchema, where + ".generator " + describe(fam.generator) + " is not primitive");
    }
    if (fam.levels.prefix.empty() && !fam.levels.tail) throw Error(ErrorCode::kSchema, where + " has no flats");
    generators.push_back(fam.generator);

    if (const auto& tail = fam.levels.tail) {
      if (tail->kind == TailKind::kPower) {
        if (!(tail->c > 0) || !std::isfinite(tail->c)) throw Error(ErrorCode::kSchema, where + ".tail.c must be > 0");
        if (!(tail->delta > 0) || !std::isfinite(tail->delta)) {
          throw Error(ErrorCode::kSchema, where + ".tail.delta must be > 0");
        }
        if (tail->sign != 1 && tail->sign != -1) throw Error(ErrorCode::kSchema, where + ".tail.sign must be +1 or -1");
      } else if (tail->d == 0) {
        throw Error(ErrorCode::kSchema, where + ".tail.d must be nonzero");
      }
    }

    const std::size_t sample = fam.levels.prefix.size() + (fam.levels.tail ? kSampleWindow : 0);
    for (std::size_t k = 1; k <= sample; ++k) {
      const ImQuaternion level = *fam.levels.member(k);
      if (k > fam.levels.prefix.size()) {
        const auto& tail = *fam.levels.tail;
        const double bound = tail.growth_constant() * std::pow(static_cast<double>(k), tail.growth_exponent());
        if (level.norm() < bound * (1 - 1e-12)) {
          throw Error(ErrorCode::kSchema, where + ".tail violates |lambda_k| >= c k^delta at k = " + std::to_string(k));
        }
      }
      if (!seen.insert(canonical_flat(fam.generator, level)).second) {
        throw Error(ErrorCode::kSchema, where + " member " + std::to_string(k) + " duplicates an existing flat");
      }
    }
  }
  if (!lattice::spans_full_rank(generators, rank)) {
    throw Error(ErrorCode::kSchema, "generators do not span R^" + std::to_string(rank));
  }

  FlatConfiguration cfg;
  cfg.rank_ = rank;
  cfg.families_ = std::move(families);
  return cfg;
}

FlatConfiguration FlatConfiguration::certified() const {
  FlatConfiguration out = *this;
  out.certificate_ = certify_convergence(*this);
  return out;
}

void FlatConfiguration::require_certified(const char* operation) const {
  if (!is_certified()) {
    throw Error(ErrorCode::kOrdering, std::string(operation) + " requires a configuration with a passing convergence certificate");
  }
}

bool operator==(const FlatConfiguration& a, const FlatConfiguration& b) {
  if (a.rank_ != b.rank_ || a.families_.size() != b.families_.size()) return false;
  for (std::size_t f = 0; f < a.families_.size(); ++f) {
    const auto& x = a.families_[f];
    const auto& y = b.families_[f];
    if (x.generator != y.generator || x.levels.prefix != y.levels.prefix) return false;
    if (x.levels.tail.has_value() != y.levels.tail.has_value()) return false;
    if (x.levels.tail) {
      const auto& s = *x.levels.tail;
      const auto& t = *y.levels.tail;
      if (s.kind != t.kind || s.c != t.c || s.delta != t.delta || s.sign != t.sign || s.lambda0 != t.lambda0 ||
          s.d != t.d || s.cx_re != t.cx_re || s.cx_im != t.cx_im) {
        return false;
      }
    }
  }
  return true;
}

double ConvergenceCertificate::family_tail_bound(std::size_t family, std::size_t window) const {
  double bound = 0.0;
  if (family < prefix_terms.size()) {
    const auto& terms = prefix_terms[family];
    for (std::size_t k = window; k < terms.size(); ++k) bound += terms[k];
  }
  for (const auto& t : tails) {
    if (t.family != family) continue;
    const std::size_t start = std::max(window, t.prefix_size);
    if (start == 0) {
      // member 1 contributes at most 1; integral comparison from 1 onwards.
      bound += 1.0 + 1.0 / (t.c * (t.delta - 1.0));
    } else {
      bound += std::pow(static_cast<double>(start), 1.0 - t.delta) / (t.c * (t.delta - 1.0));
    }
  }
  return bound;
}

double ConvergenceCertificate::tail_bound(std::size_t window) const {
  if (!pass) return std::numeric_limits<double>::infinity();
  double bound = 0.0;
  for (std::size_t f = 0; f < prefix_terms.size(); ++f) bound += family_tail_bound(f, window);
  return bound;
}

ConvergenceCertificate certify_convergence(const FlatConfiguration& cfg) {
  ConvergenceCertificate cert;
  cert.pass = true;
  for (std::size_t f = 0; f < cfg.families().size(); ++f) {
    const auto& levels = cfg.families()[f].levels;
    auto& terms = cert.prefix_terms.emplace_back();
    for (const auto& l : levels.prefix) terms.push_back(1.0 / (1.0 + l.norm()));
    if (!levels.tail) continue;
    const double delta = levels.tail->growth_exponent();
    if (delta <= 1.0) {
      if (cert.pass) {
        cert.pass = false;
        cert.divergent_family = f;
        cert.reason = "family " + std::to_string(f) + " grows like k^" + std::to_string(delta) +
                      " (delta <= 1): sum of 1/(1+|lambda_k|) diverges by comparison with the harmonic series";
      }
      continue;
    }
    cert.tails.push_back({f, levels.prefix.size(), levels.tail->growth_constant(), delta});
  }
  if (cert.pass) cert.reason = "all tails grow like k^delta with delta > 1 (integral test)";
  return cert;
}

std::vector<Flat> enumerate_flats(const FlatConfiguration& cfg, std::size_t window) {
  std::vector<Flat> flats;
  std::size_t index = 0;
  for (std::size_t k = 1; k <= window; ++k) {
    bool any = false;
    for (std::size_t f = 0; f < cfg.families().size(); ++f) {
      const auto& fam = cfg.families()[f];
      const auto level = fam.levels.member(k);
      if (!level) continue;
      any = true;
      flats.push_back({index++, f, k, fam.generator, *level});
    }
    if (!any) break;
  }
  return flats;
}

std::vector<std::size_t> flats_through(const std::vector<Flat>& flats, const BasePoint& point, double tol) {
  if (tol < 0) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  std::vector<std::size_t> out;
  if (flats.empty()) return out;
  const std::size_t n = flats.front().generator.size();
  if (point.a.size() != n || point.b.size() != n) throw Error(ErrorCode::kArity, "point has wrong dimension");

  if (tol == 0) {
    std::vector<Rational> a, bre, bim;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(to_rational(point.a[i]));
      bre.push_back(to_rational(point.b[i].real()));
      bim.push_back(to_rational(point.b[i].imag()));
    }
    for (const auto& flat : flats) {
      Rational x = 0, y = 0, z = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Rational u(flat.generator[i]);
        x += a[i] * u;
        y += bre[i] * u;
        z += bim[i] * u;
      }
      if (x == flat.level.re && y == flat.level.cx_re && z == flat.level.cx_im) out.push_back(flat.index);
    }
    return out;
  }

  for (const auto& flat : flats) {
    double x = 0;
    std::complex<double> y = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = flat.generator[i].get_d();
      x += point.a[i] * u;
      y += point.b[i] * u;
    }
    if (std::abs(x - flat.level.real_part()) <= tol && std::abs(y - flat.level.complex_part()) <= tol) {
      out.push_back(flat.index);
    }
  }
  return out;
}

std::vector<std::size_t> flats_through(const FlatConfiguration& cfg, const BasePoint& point, std::size_t window,
                                       double tol) {
  cfg.require_certified("flats_through");
  return flats_through(enumerate_flats(cfg, window), point, tol);
}

lattice::GeneratorSet generator_set(const std::vector<Flat>& flats, std::size_t rank) {
  std::vector<IntVector> per_flat;
  per_flat.reserve(flats.size());
  for (const auto& f : flats) per_flat.push_back(f.generator);
  return lattice::GeneratorSet::from_flats(rank, per_flat);
}

namespace {

class SmoothnessSearch {
 public:
  SmoothnessSearch(std::vector<Flat> flats, std::size_t n, bool exhaustive, SmoothnessReport& report)
      : flats_(std::move(flats)), n_(n), exhaustive_(exhaustive), report_(report) {
    std::map<IntVector, std::size_t> classes;
    for (const auto& f : flats_) {
      IntVector key = canonical_flat(f.generator, f.level).first;
      class_of_.push_back(classes.try_emplace(key, classes.size()).first->second);
      std::vector<Rational> row;
      for (std::size_t i = 0; i < n_; ++i) row.emplace_back(f.generator[i]);
      row.push_back(f.level.re);
      row.push_back(f.level.cx_re);
      row.push_back(f.level.cx_im);
      rows_.push_back(std::move(row));
    }
  }

  void run() {
    std::vector<std::size_t> subset;
    extend(subset, 0);
  }

 private:
  // The three component systems U^T a^c = lambda^c are consistent iff
  // appending any of the level columns leaves the rank unchanged.
  bool consistent(const std::vector<std::size_t>& subset) const {
    RationalMatrix m;
    for (auto i : subset) m.push_back(rows_[i]);
    RationalMatrix normals;
    for (auto i : subset) normals.emplace_back(rows_[i].begin(), rows_[i].begin() + static_cast<std::ptrdiff_t>(n_));
    return rational_rank(std::move(m)) == rational_rank(std::move(normals));
  }

  bool extend(std::vector<std::size_t>& subset, std::size_t start) {
    for (std::size_t j = start; j < flats_.size(); ++j) {
      bool same_class = false;
      for (auto i : subset) same_class = same_class || class_of_[i] == class_of_[j];
      if (same_class) continue;  // distinct parallel flats never meet
      subset.push_back(j);
      if (consistent(subset)) {
        ++report_.consistent_subsets;
        if (!record(subset) && !exhaustive_) return false;
        if (subset.size() < n_ + 1 && !extend(subset, j + 1)) return false;
      }
      subset.pop_back();
    }
    return true;
  }

  // Returns false when a violation was recorded.
  bool record(const std::vector<std::size_t>& subset) {
    std::vector<std::size_t> ids;
    for (auto i : subset) ids.push_back(flats_[i].index);
    if (subset.size() == n_ + 1) {
      report_.pass = false;
      report_.violations.push_back({Condition::kA, ids, std::nullopt});
      return false;
    }
    if (subset.size() == n_) {
      std::vector<IntVector> us;
      for (auto i : subset) us.push_back(flats_[i].generator);
      const Integer det = lattice::determinant_of_columns(us);
      if (det != 1 && det != -1) {
        report_.pass = false;
        report_.violations.push_back({Condition::kB, ids, det});
        return false;
      }
    }
    return true;
  }

  std::vector<Flat> flats_;
  std::size_t n_;
  bool exhaustive_;
  SmoothnessReport& report_;
  std::vector<std::size_t> class_of_;
  RationalMatrix rows_;
};

}  // namespace

SmoothnessReport check_smoothness(const FlatConfiguration& cfg, std::size_t window, const SmoothnessOptions& options) {
  cfg.require_certified("check_smoothness");
  SmoothnessReport report;
  report.window = window;

  std::vector<Flat> flats = enumerate_flats(cfg, window);
  if (options.box_radius) {
    const double radius = *options.box_radius;
    std::vector<Flat> kept;
    for (auto& f : flats) {
      double l1 = 0;
      for (const auto& e : f.generator.entries()) l1 += std::abs(e.get_d());
      const double reach = radius * l1;
      if (std::abs(f.level.real_part()) <= reach && std::abs(f.level.complex_part().real()) <= reach &&
          std::abs(f.level.complex_part().imag()) <= reach) {
        kept.push_back(std::move(f));
      } else {
        ++report.flats_pruned;
      }
    }
    flats = std::move(kept);
  }
  report.flats_checked = flats.size();

  SmoothnessSearch(std::move(flats), cfg.rank(), options.exhaustive, report).run();

  std::ostringstream coverage;
  coverage << "conditions (a)/(b) certified only for the first " << window << " members of each family";
  if (options.box_radius) coverage << " meeting the cube of radius " << *options.box_radius;
  report.coverage = coverage.str();
  return report;
}

FlatConfiguration transform(const FlatConfiguration& cfg, const lattice::BasisChange& change) {
  std::vector<FlatFamily> families = cfg.families();
  for (auto& f : families) f.generator = change.matrix.apply(f.generator);
  FlatConfiguration out = FlatConfiguration::create(cfg.rank(), std::move(families));
  return cfg.certificate() ? out.certified() : out;
}

FlatConfiguration builtin_goto(std::size_t n, std::size_t prefix_depth) {
  if (n == 0 || prefix_depth == 0) throw Error(ErrorCode::kInvalidArgument, "builtin_goto needs n >= 1 and K >= 1");
  auto unit = [n](std::size_t i, long value) {
    std::vector<Integer> e(n, 0);
    e[i] = value;
    return IntVector(std::move(e));
  };

  std::vector<FlatFamily> families;
  // Lambda = m i gives lambda = -m^2/2 i; Lambda = -m k gives +m^2/2 i.
  for (int sign : {-1, 1}) {
    FlatFamily fam;
    fam.generator = unit(0, 1);
    for (std::size_t m = 1; m <= prefix_depth; ++m) {
      fam.levels.prefix.push_back({make_rational(sign * static_cast<long>(m * m), 2), 0, 0});
    }
    TailLaw tail;
    tail.kind = TailKind::kPower;
    tail.c = 0.5;
    tail.delta = 2.0;
    tail.sign = sign;
    fam.levels.tail = tail;
    families.push_back(std::move(fam));
  }
  {
    FlatFamily fam;
    fam.generator = IntVector(std::vector<Integer>(n, 1));
    fam.levels.prefix.push_back({0, 0, 0});
    families.push_back(std::move(fam));
  }
  for (std::size_t r = 1; r < n; ++r) {
    FlatFamily fam;
    fam.generator = unit(r, -1);
    fam.levels.prefix.push_back({0, 0, 0});
    families.push_back(std::move(fam));
  }
  return FlatConfiguration::create(n, std::move(families));
}

}  // namespace hypertoric::config
