#pragma once

#include <optional>
#include <vector>

#include "exact.hpp"

namespace hypertoric {

/// Exact feasibility of { x in Q^n : A x >= b } with x unrestricted in sign.
/// Returns a feasible point or nullopt. Phase-one simplex with Bland's rule.
std::optional<std::vector<Rational>> feasible_point(const RationalMatrix& a, const std::vector<Rational>& b,
                                                    std::size_t n);

}  // namespace hypertoric
