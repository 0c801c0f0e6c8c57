#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "schema.hpp"

namespace hypertoric::io {

struct RunOptions {
  std::size_t window = 50;     // flats per family
  std::size_t truncation = 50; // initial potential window; raised until the tail bound applies
  double tol = 1e-9;           // incidence tolerance
  double identity_tol = 1e-6;  // finite-difference residual budget
  double h = 1e-4;
  std::optional<double> box;   // half-width of the chamber box; default is data driven
  std::uint64_t seed = 0;
  std::size_t samples = 20;    // random points when none are given
};

struct Report {
  Json json;
  bool pass = true;
};

Json parameters_json(const RunOptions& options);

Report validate_report(const config::FlatConfiguration& cfg, const RunOptions& options);
Report topology_report(const config::FlatConfiguration& cfg, const RunOptions& options);
Report eval_report(const config::FlatConfiguration& cfg, const std::vector<config::BasePoint>& points,
                   const metric::Deformation& deformation, const RunOptions& options);
/// Random sample points (seeded) are drawn when `points` is empty.
Report identities_report(const config::FlatConfiguration& cfg, const std::vector<config::BasePoint>& points,
                         const metric::Deformation& deformation, const RunOptions& options);
Report solve_moment_report(const moment::MomentProblem& problem, const RunOptions& options);
Report periodic_report(const PeriodicInput& input, const std::vector<config::BasePoint>& points,
                       const RunOptions& options);

/// Plain "x y" rows per bounded polytope (2d: closed cyclic polygon), blank line between.
std::string plot_text(const Json& topology);

}  // namespace hypertoric::io
