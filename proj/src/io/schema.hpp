#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "metric.hpp"
#include "moment.hpp"
#include "periodic.hpp"

namespace hypertoric::io {

using Json = nlohmann::ordered_json;

/// Parses text into a Json tree; syntax errors become kSchema with "line L, column C".
Json parse_json(std::string_view text);

/// Level literal: integer, JSON float (exact binary value), or a string "p/q" / "0.125".
Rational rational_from_json(const Json& value, const std::string& field);
/// Integer when integral, a number when the double is exact, otherwise "p/q".
Json rational_to_json(const Rational& value);

config::FlatConfiguration parse_config(std::string_view text);
Json config_to_json(const config::FlatConfiguration& cfg);
std::string serialize_config(const config::FlatConfiguration& cfg);

struct PeriodicInput {
  std::size_t rank = 0;
  std::vector<periodic::PeriodicFamily> families;
};

PeriodicInput parse_periodic(std::string_view text);

/// Taub-NUT block: {"c": [[...]], "weights": [...]}; absent -> nullopt.
metric::Deformation parse_deformation(const Json& value, std::size_t rank);

/// One point per row: a_1..a_n, Re b_1, Im b_1, ..., Re b_n, Im b_n. A header
/// row is skipped when its first field is not numeric; '#' starts a comment.
std::vector<config::BasePoint> parse_points(std::string_view csv, std::size_t rank);

/// {"z": [[re, im], ...], "w": ..., "lambda": [...], "target": [...],
///  "generators": [[...]] | "kernel": [[...]]}
moment::MomentProblem parse_moment_problem(std::string_view text);

}  // namespace hypertoric::io
