#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "exact.hpp"

namespace hypertoric::lattice {

/// A vector in Z^n with arbitrary-precision entries.
class IntVector {
 public:
  IntVector() = default;
  explicit IntVector(std::vector<Integer> entries) : entries_(std::move(entries)) {}
  IntVector(std::initializer_list<long> entries);

  std::size_t size() const { return entries_.size(); }
  const Integer& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Integer>& entries() const { return entries_; }

  bool is_zero() const;
  IntVector operator-() const;
  std::vector<double> to_doubles() const;
  double norm() const;

  friend bool operator==(const IntVector& a, const IntVector& b) { return a.entries_ == b.entries_; }
  friend std::strong_ordering operator<=>(const IntVector& a, const IntVector& b);

 private:
  std::vector<Integer> entries_;
};

using IntVectors = std::vector<IntVector>;

/// Square integer matrix stored by rows, acting on column vectors.
struct IntMatrix {
  std::vector<std::vector<Integer>> rows;

  static IntMatrix identity(std::size_t n);
  static IntMatrix from_columns(std::span<const IntVector> columns);
  std::size_t size() const { return rows.size(); }
  IntVector apply(const IntVector& v) const;
  IntMatrix operator*(const IntMatrix& other) const;
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

/// A unimodular change of coordinates: `matrix` maps old coordinates to new.
struct BasisChange {
  IntMatrix matrix;
  IntMatrix inverse;
};

/// Distinct generators plus the map from flat index to generator slot.
struct GeneratorSet {
  std::size_t dimension = 0;
  IntVectors generators;
  std::vector<std::size_t> index_map;  // flat index -> position in `generators`

  /// Collapses a flat-indexed list of generators into distinct entries.
  static GeneratorSet from_flats(std::size_t dimension, std::span<const IntVector> per_flat);
  const IntVector& of_flat(std::size_t flat) const { return generators.at(index_map.at(flat)); }
};

struct Normalization {
  BasisChange change;
  GeneratorSet generators;                 // transformed, same index map
  std::vector<std::size_t> basis_indices;  // positions in the input generator list
};

/// gcd(entries) == 1; throws kZeroVector for v == 0.
bool is_primitive(const IntVector& v);

/// Exact |det| == 1 test on the matrix with columns `vs`; needs exactly n vectors of length n.
bool is_z_basis(std::span<const IntVector> vs);

Integer determinant_of_columns(std::span<const IntVector> columns);
std::size_t exact_rank(std::span<const IntVector> vs);
bool spans_full_rank(std::span<const IntVector> vs, std::size_t n);

/// Maps the first (input-order, lexicographic) Z-basis subset to e_1..e_n.
Normalization normalize_generators(const GeneratorSet& gs);

/// Linear independence of {u_k : k in flat_indices}; more than n indices is simply false.
bool independent_on_index_set(const GeneratorSet& gs, std::span<const std::size_t> flat_indices);

}  // namespace hypertoric::lattice
