#include "exact.hpp"

#include <cctype>
#include <cmath>
#include <utility>

#include "error.hpp"

namespace hypertoric {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kZeroVector: return "zero vector";
    case ErrorCode::kArity: return "arity";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kSingularity: return "singularity";
    case ErrorCode::kOrdering: return "ordering";
    case ErrorCode::kNoUnimodularSubset: return "no unimodular subset";
    case ErrorCode::kNonCoercive: return "unbounded direction";
    case ErrorCode::kConvergence: return "convergence failure";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kNoCertifiedTail: return "no certified tail";
    case ErrorCode::kDegeneratePotential: return "degenerate potential";
  }
  return "unknown";
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "non-finite value cannot be made exact");
  }
  Rational q;
  mpq_set_d(q.get_mpq_t(), value);
  return q;
}

double to_double(const Rational& value) { return value.get_d(); }

bool is_double_exact(const Rational& value) {
  const double d = value.get_d();
  if (!std::isfinite(d)) return false;
  return to_rational(d) == value;
}

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw Error(ErrorCode::kSchema, "not a rational literal: '" + std::string(text) + "'");
  };
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return fail();

  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num, den;
    if (num.set_str(std::string(text.substr(0, slash)), 10) != 0 ||
        den.set_str(std::string(text.substr(slash + 1)), 10) != 0 || den == 0) {
      return fail();
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (digits.empty()) return fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return fail();
    ++pos;
    const std::string exp_text(text.substr(pos));
    if (exp_text.empty()) return fail();
    std::size_t used = 0;
    try {
      exponent = std::stol(exp_text, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != exp_text.size()) return fail();
  }
  Integer mantissa(digits, 10);
  const long scale = exponent - frac_digits;
  Integer power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(mantissa, power) : Rational(mantissa * power, 1);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string format_rational(const Rational& value) {
  if (value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Integer determinant(IntegerMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  for (const auto& row : m) {
    if (row.size() != n) throw Error(ErrorCode::kArity, "determinant needs a square matrix");
  }
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::size_t integer_rank(IntegerMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  Integer prev = 1;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        Integer t = m[i][j] * m[rank][col] - m[i][col] * m[rank][j];
        // Entries are minors of the pivot submatrix, so the division is exact.
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][col] = 0;
    }
    prev = m[rank][col];
    ++rank;
  }
  return rank;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < m.size() && m[pivot][col] == 0) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[row], m[pivot]);
    const Rational inv = 1 / m[row][col];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || m[i][col] == 0) continue;
      const Rational f = m[i][col];
      for (std::size_t j = col; j < m[i].size(); ++j) m[i][j] -= f * m[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rational_rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  return rref(m, cols).size();
}

std::optional<std::vector<Rational>> solve_linear(RationalMatrix a, std::vector<Rational> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kArity, "solve_linear: row count mismatch");
  const std::size_t cols = a.empty() ? 0 : a.front().size();
  for (std::size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
  const auto pivots = rref(a, cols);
  for (std::size_t i = pivots.size(); i < a.size(); ++i) {
    if (a[i][cols] != 0) return std::nullopt;
  }
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = a[i][cols];
  return x;
}

std::vector<std::vector<Rational>> null_space(RationalMatrix a, std::size_t columns) {
  const auto pivots = rref(a, columns);
  std::vector<bool> is_pivot(columns, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(columns, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RationalMatrix> inverse(RationalMatrix a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw Error(ErrorCode::kArity, "inverse needs a square matrix");
    for (std::size_t j = 0; j < n; ++j) a[i].push_back(Rational(i == j ? 1 : 0));
  }
  const auto pivots = rref(a, n);
  if (pivots.size() != n) return std::nullopt;
  RationalMatrix inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i].assign(a[i].begin() + static_cast<std::ptrdiff_t>(n), a[i].end());
  return inv;
}

}  // namespace hypertoric
