#include "linprog.hpp"

#include "error.hpp"

namespace hypertoric {

std::optional<std::vector<Rational>> feasible_point(const RationalMatrix& a, const std::vector<Rational>& b,
                                                    std::size_t n) {
  const std::size_t m = a.size();
  if (b.size() != m) throw Error(ErrorCode::kArity, "feasible_point: row count mismatch");
  if (m == 0) return std::vector<Rational>(n, Rational(0));

  // Columns: x+ (n), x- (n), surplus (m), artificial (m), rhs.
  const std::size_t cols = 2 * n + 2 * m;
  RationalMatrix t(m, std::vector<Rational>(cols + 1, Rational(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw Error(ErrorCode::kArity, "feasible_point: row width mismatch");
    const int flip = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) {
      t[i][j] = flip * a[i][j];
      t[i][n + j] = -flip * a[i][j];
    }
    t[i][2 * n + i] = -flip;
    t[i][2 * n + m + i] = 1;
    t[i][cols] = flip * b[i];
    basis[i] = 2 * n + m + i;
  }

  // Reduced costs of the phase-one objective (sum of artificials).
  std::vector<Rational> cost(cols + 1, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= cols; ++j)
      if (j < 2 * n + m || j == cols) cost[j] -= t[i][j];

  for (;;) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][cols] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) break;  // phase one is bounded below by zero

    const Rational pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
    }
    if (cost[enter] != 0) {
      const Rational f = cost[enter];
      for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  if (cost[cols] != 0) return std::nullopt;  // minimum of the artificial sum is positive

  std::vector<Rational> x(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) x[basis[i]] += t[i][cols];
    else if (basis[i] < 2 * n) x[basis[i] - n] -= t[i][cols];
  }
  return x;
}

}  // namespace hypertoric
