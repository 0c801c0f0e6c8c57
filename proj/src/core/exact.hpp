#pragma once

// Exact integer/rational helpers shared by the lattice, configuration and
// arrangement code. Everything here is GMP-backed and allocation-heavy, so
// callers keep matrices small (n <= a handful, subsets of size <= n + 1).

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hypertoric {

using Integer = mpz_class;
using Rational = mpq_class;

using RationalMatrix = std::vector<std::vector<Rational>>;  // row-major
using IntegerMatrix = std::vector<std::vector<Integer>>;    // row-major

/// num/den in lowest terms (the two-argument mpq_class constructor does not reduce).
inline Rational make_rational(const Integer& num, const Integer& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Exact conversion; every finite double is a dyadic rational.
Rational to_rational(double value);
double to_double(const Rational& value);

/// Accepts "p", "p/q", or a decimal literal such as "-0.125" or "1e-3".
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& value);

/// True when `value` converts to a double and back without change.
bool is_double_exact(const Rational& value);

/// Fraction-free (Bareiss) determinant of a square integer matrix.
Integer determinant(IntegerMatrix m);

/// Rank via fraction-free elimination; rows may have any common length.
std::size_t integer_rank(IntegerMatrix m);

/// Rank via rational Gaussian elimination.
std::size_t rational_rank(RationalMatrix m);

/// Solves A x = b exactly. Returns one solution (free variables set to zero)
/// or nullopt if the system is inconsistent.
std::optional<std::vector<Rational>> solve_linear(RationalMatrix a, std::vector<Rational> b);

/// Basis of the right null space {x : A x = 0}; `columns` is the width of A.
std::vector<std::vector<Rational>> null_space(RationalMatrix a, std::size_t columns);

/// Exact inverse of a square matrix, or nullopt if singular.
std::optional<RationalMatrix> inverse(RationalMatrix a);

}  // namespace hypertoric
