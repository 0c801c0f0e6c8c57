#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "metric.hpp"

namespace hypertoric::periodic {

using config::BasePoint;

/// Levels lambda0 + d k for all k in Z, fixed complex level.
struct PeriodicFamily {
  lattice::IntVector generator;
  double lambda0 = 0.0;
  double spacing = 1.0;
  std::complex<double> cx;
};

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  std::size_t truncation = 0;  // may exceed the request (N >= 2 |(x, w)|)
};

/// sum_{|k| <= N} [1/sqrt((x-k)^2 + |w|^2) - (k != 0) 1/|k|].
SeriesValue ov_potential(double x, std::complex<double> w, std::size_t n);

/// Validates generators and spacings; throws kSchema.
void validate_families(std::size_t rank, const std::vector<PeriodicFamily>& families);

/// Phi = sum_j u_j u_j^T ov(xi_j, omega_j), xi = (<a,u> - lambda0)/d, omega = (<b,u> - cx)/d.
metric::PotentialResult periodic_potential(const BasePoint& point, const std::vector<PeriodicFamily>& families,
                                           std::size_t n);

struct Periodicity {
  double residual = 0.0;  // max entry of |Phi(a + u_j) - Phi(a)| over j
  double bound = 0.0;     // sum of the two tail bounds
};

Periodicity periodicity_residual(const BasePoint& point, const std::vector<PeriodicFamily>& families, std::size_t n);

/// 3d Laplacian of ov_potential in (x, Re w, Im w) by central differences.
double ov_laplacian(double x, std::complex<double> w, std::size_t n, double h);

struct CollapsingCircle {
  std::size_t family = 0;
  lattice::IntVector direction;
  std::vector<double> levels;  // <a, u> = level, within the window
};

struct FibrationReport {
  std::size_t rank = 0;
  std::vector<std::size_t> incident;
  std::vector<CollapsingCircle> circles;
  std::string description;
};

FibrationReport fibration_report(const std::vector<std::complex<double>>& b,
                                 const std::vector<PeriodicFamily>& families, std::size_t window, double tol = 0.0);

}  // namespace hypertoric::periodic
