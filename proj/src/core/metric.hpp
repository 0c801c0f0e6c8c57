#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "config.hpp"

namespace hypertoric::metric {

using config::BasePoint;
using config::FlatConfiguration;

/// s = 2(<a,u> - lambda^R), v = <b,u> - lambda^C, r^2 = s^2 + 4|v|^2.
struct FlatDatum {
  std::size_t flat = 0;
  double s = 0.0;
  std::complex<double> v;
  double r = 0.0;
  double distance = 0.0;  // r / (2|u|)
  double string_gap = 0.0;  // s + r; zero on the half-line s <= 0, v = 0 where log(s + r) is singular
};

std::vector<FlatDatum> flat_data(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window);

/// Quadratic term sum c_ij (a_i a_j - (b_i conj(b_j) + b_j conj(b_i)) / 4) and
/// per-flat weights on the log terms (indexed by global flat index; missing = 1).
struct TaubNutDeformation {
  Eigen::MatrixXd c;
  std::vector<double> weights;

  double weight(std::size_t flat) const { return flat < weights.size() ? weights[flat] : 1.0; }
};

using Deformation = std::optional<TaubNutDeformation>;

struct TruncationPlan {
  std::size_t n = 50;
  std::size_t max_n = 1u << 20;
};

struct PotentialResult {
  Eigen::MatrixXd phi;
  std::size_t truncation = 0;  // window actually summed (may exceed the plan's n)
  double tail_bound = 0.0;     // entrywise bound on the omitted terms
  bool exact = false;          // nothing omitted
};

/// Phi = sum_k w_k u_k u_k^T / r_k (+ 2c), compensated summation.
PotentialResult potential(const BasePoint& point, const FlatConfiguration& cfg, const TruncationPlan& plan,
                          const Deformation& deformation = std::nullopt);

/// F = 1/4 sum_k w_k (s_k log(s_k + r_k) - r_k) over the first `window` members, plus the quadratic term.
double prepotential_truncated(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                              const Deformation& deformation = std::nullopt);

struct Connection {
  Eigen::MatrixXcd coefficients;  // C_jl = F_{a_j b_l} (Wirtinger)
  Eigen::MatrixXd dx;             // A_j = sum_l dx_jl d(Re b_l) + dy_jl d(Im b_l)
  Eigen::MatrixXd dy;
};

Connection connection(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                      const Deformation& deformation = std::nullopt);

struct GramMatrix {
  Eigen::MatrixXd g;  // 4n x 4n in (a, Re b, Im b, y)
  PotentialResult potential;
};

GramMatrix gram_matrix(const BasePoint& point, const FlatConfiguration& cfg, const TruncationPlan& plan,
                       const Deformation& deformation = std::nullopt);

struct IdentityResidual {
  double h = 0.0;
  double residual = 0.0;  // max over entries
  double scale = 0.0;     // max |entry| of the compared quantities
};

/// max_ij |F_{a_i a_j} + F_{x_i x_j} + F_{y_i y_j}| by central differences, b = x + i y.
IdentityResidual polyharmonic_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                                    double h, const Deformation& deformation = std::nullopt);
/// Finite-difference F_{a_i a_j} against potential().
IdentityResidual potential_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double h,
                                 const Deformation& deformation = std::nullopt);
/// Finite-difference F_{a_j b_l} = (d_x - i d_y) F_{a_j} / 2 against connection().
IdentityResidual monopole_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double h,
                                const Deformation& deformation = std::nullopt);

}  // namespace hypertoric::metric
