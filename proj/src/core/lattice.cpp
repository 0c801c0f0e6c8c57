#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "error.hpp"

namespace hypertoric::lattice {

IntVector::IntVector(std::initializer_list<long> entries) {
  entries_.reserve(entries.size());
  for (long e : entries) entries_.emplace_back(e);
}

bool IntVector::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Integer& e) { return e == 0; });
}

IntVector IntVector::operator-() const {
  std::vector<Integer> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.emplace_back(-e);
  return IntVector(std::move(out));
}

std::vector<double> IntVector::to_doubles() const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.get_d());
  return out;
}

double IntVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.get_d() * e.get_d();
  return std::sqrt(sum);
}

std::strong_ordering operator<=>(const IntVector& a, const IntVector& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int c = cmp(a[i], b[i]);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
  }
  return a.size() <=> b.size();
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m;
  m.rows.assign(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m.rows[i][i] = 1;
  return m;
}

IntMatrix IntMatrix::from_columns(std::span<const IntVector> columns) {
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  IntMatrix m;
  m.rows.assign(n, std::vector<Integer>(columns.size(), 0));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) throw Error(ErrorCode::kArity, "columns of unequal length");
    for (std::size_t i = 0; i < n; ++i) m.rows[i][j] = columns[j][i];
  }
  return m;
}

IntVector IntMatrix::apply(const IntVector& v) const {
  std::vector<Integer> out(rows.size(), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != v.size()) throw Error(ErrorCode::kArity, "matrix/vector size mismatch");
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += rows[i][j] * v[j];
  }
  return IntVector(std::move(out));
}

IntMatrix IntMatrix::operator*(const IntMatrix& other) const {
  const std::size_t n = rows.size();
  IntMatrix out;
  out.rows.assign(n, std::vector<Integer>(other.rows.empty() ? 0 : other.rows.front().size(), 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < other.rows.size(); ++k)
      for (std::size_t j = 0; j < out.rows[i].size(); ++j) out.rows[i][j] += rows[i][k] * other.rows[k][j];
  return out;
}

GeneratorSet GeneratorSet::from_flats(std::size_t dimension, std::span<const IntVector> per_flat) {
  GeneratorSet gs;
  gs.dimension = dimension;
  std::map<IntVector, std::size_t> slot;
  for (const auto& u : per_flat) {
    if (u.size() != dimension) throw Error(ErrorCode::kArity, "generator has wrong length");
    auto [it, inserted] = slot.try_emplace(u, gs.generators.size());
    if (inserted) gs.generators.push_back(u);
    gs.index_map.push_back(it->second);
  }
  return gs;
}

bool is_primitive(const IntVector& v) {
  if (v.is_zero()) throw Error(ErrorCode::kZeroVector, "primitivity is undefined for the zero vector");
  Integer g = 0;
  for (const auto& e : v.entries()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
  return g == 1;
}

Integer determinant_of_columns(std::span<const IntVector> columns) {
  return determinant(IntMatrix::from_columns(columns).rows);
}

bool is_z_basis(std::span<const IntVector> vs) {
  if (vs.empty()) throw Error(ErrorCode::kArity, "is_z_basis needs n >= 1 vectors");
  const std::size_t n = vs.front().size();
  if (vs.size() != n) {
    throw Error(ErrorCode::kArity, "is_z_basis needs exactly " + std::to_string(n) + " vectors, got " +
                                       std::to_string(vs.size()));
  }
  const Integer det = determinant_of_columns(vs);
  return det == 1 || det == -1;
}

std::size_t exact_rank(std::span<const IntVector> vs) {
  if (vs.empty()) return 0;
  IntegerMatrix rows;
  rows.reserve(vs.size());
  for (const auto& v : vs) rows.push_back(v.entries());
  return integer_rank(std::move(rows));
}

bool spans_full_rank(std::span<const IntVector> vs, std::size_t n) {
  if (vs.empty()) throw Error(ErrorCode::kInvalidArgument, "spans_full_rank needs a nonempty list");
  for (const auto& v : vs) {
    if (v.size() != n) throw Error(ErrorCode::kArity, "vector length differs from the ambient rank");
  }
  return exact_rank(vs) == n;
}

namespace {

// Advances `idx` (strictly increasing, values < m) to the next k-combination.
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

IntMatrix to_integer_matrix(const RationalMatrix& q) {
  IntMatrix m;
  m.rows.assign(q.size(), {});
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (const auto& x : q[i]) {
      if (x.get_den() != 1) throw Error(ErrorCode::kInvalidArgument, "inverse of a unimodular matrix is not integral");
      m.rows[i].push_back(x.get_num());
    }
  }
  return m;
}

}  // namespace

Normalization normalize_generators(const GeneratorSet& gs) {
  const std::size_t n = gs.dimension;
  const std::size_t m = gs.generators.size();
  if (n == 0 || m < n) throw Error(ErrorCode::kNoUnimodularSubset, "fewer generators than the rank");

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  do {
    IntVectors basis;
    for (auto i : idx) basis.push_back(gs.generators[i]);
    if (!is_z_basis(basis)) continue;

    const IntMatrix columns = IntMatrix::from_columns(basis);
    RationalMatrix q(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q[i][j] = columns.rows[i][j];
    const auto inv = inverse(q);

    Normalization out;
    out.change.matrix = to_integer_matrix(*inv);
    out.change.inverse = columns;
    out.basis_indices = idx;
    out.generators.dimension = n;
    out.generators.index_map = gs.index_map;
    for (const auto& u : gs.generators) out.generators.generators.push_back(out.change.matrix.apply(u));
    return out;
  } while (next_combination(idx, m));

  throw Error(ErrorCode::kNoUnimodularSubset, "no n-subset of the generators is a Z-basis");
}

bool independent_on_index_set(const GeneratorSet& gs, std::span<const std::size_t> flat_indices) {
  if (flat_indices.empty()) return true;
  if (flat_indices.size() > gs.dimension) return false;
  IntVectors vs;
  for (auto k : flat_indices) {
    if (k >= gs.index_map.size()) throw Error(ErrorCode::kInvalidArgument, "flat index out of range");
    vs.push_back(gs.of_flat(k));
  }
  return exact_rank(vs) == vs.size();
}

}  // namespace hypertoric::lattice
