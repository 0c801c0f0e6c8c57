#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "exact.hpp"
#include "lattice.hpp"

namespace hypertoric::moment {

using config::BasePoint;
using config::FlatConfiguration;

struct StabilizerInfo {
  std::vector<std::size_t> incident;  // global flat indices
  std::size_t rank = 0;
  std::size_t fiber_dim = 0;
  bool fixed_point = false;
};

StabilizerInfo stabilizer(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double tol);

struct Lift {
  std::size_t flat = 0;
  std::complex<double> z;
  std::complex<double> w;
};

/// Solves |z|^2 - |w|^2 = 2(<a,u> - lambda^R), z w = <b,u> - lambda^C per flat.
/// Gauge: z real >= 0; if z = 0 then w real >= 0.
std::vector<Lift> point_lift(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window);

struct DiscreteStabilizerResult {
  bool discrete = true;
  std::vector<std::size_t> incident;  // flats whose complex flat contains b
  std::vector<std::size_t> witness;   // a dependent subset when !discrete
};

DiscreteStabilizerResult discrete_stabilizer_check(const FlatConfiguration& cfg,
                                                   const std::vector<std::complex<double>>& b, std::size_t window,
                                                   double tol = 0.0);

/// Finite moment problem on n = span of `kernel_basis` (vectors in R^m, m = #indices).
/// y = K eta, alpha_i(y) = y_i.
struct MomentProblem {
  std::vector<std::complex<double>> z;
  std::vector<std::complex<double>> w;
  std::vector<double> lambda1;
  std::vector<std::vector<Rational>> kernel_basis;
  std::vector<double> target;  // mu-tilde target, in the dual of the kernel basis
  /// When given, every kernel vector must satisfy sum_i k_i u_i = 0 exactly.
  std::optional<std::vector<lattice::IntVector>> generators;
};

struct MomentOptions {
  double tol = 1e-10;
  int max_iter = 200;
};

struct MomentSolution {
  std::vector<double> eta;  // coordinates in the kernel basis
  std::vector<double> y;    // K eta
  double residual = 0.0;
  int iterations = 0;
  int gradient_steps = 0;
};

/// mu~(eta)_j = 1/2 sum_i (|z_i|^2 e^{2 y_i} - |w_i|^2 e^{-2 y_i} + 2 lambda_i) K_ij.
std::vector<double> moment_map(const MomentProblem& p, const std::vector<double>& eta);
/// F(eta) = 1/4 sum_i (|z_i|^2 (e^{2 y_i} - 1) + |w_i|^2 (e^{-2 y_i} - 1) + 4 lambda_i y_i).
double functional(const MomentProblem& p, const std::vector<double>& eta);
std::vector<std::vector<double>> hessian(const MomentProblem& p, const std::vector<double>& eta);

class NonCoerciveError : public Error {
 public:
  NonCoerciveError(std::vector<double> direction, const std::string& message)
      : Error(ErrorCode::kNonCoercive, message), direction_(std::move(direction)) {}
  /// Nonzero eta on which every alpha_i with z_i w_i != 0 vanishes.
  const std::vector<double>& direction() const { return direction_; }

 private:
  std::vector<double> direction_;
};

/// Throws NonCoerciveError or kConvergence. (message carries a null covector) or kConvergence.
MomentSolution moment_solve(const MomentProblem& p, const MomentOptions& options = {});

/// Exact basis of {k in Q^m : sum_i k_i u_i = 0}.
std::vector<std::vector<Rational>> kernel_of(const std::vector<lattice::IntVector>& generators);

}  // namespace hypertoric::moment
