#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "config.hpp"
#include "exact.hpp"
#include "lattice.hpp"

namespace hypertoric::arrangement {

using lattice::IntVector;
using Point = std::vector<Rational>;

/// H_{k,R} = { x : <x, normal> = level }.
struct Hyperplane {
  IntVector normal;
  Rational level;
  std::size_t flat_index = 0;
};

/// Open axis-aligned box lo < x < hi.
struct Box {
  Point lo;
  Point hi;

  bool contains_closed(const Point& p) const;
};

struct Vertex {
  Point point;
  std::vector<std::size_t> planes;  // positions in the hyperplane list
};

struct Chamber {
  std::vector<std::int8_t> signs;  // +1 / -1 per hyperplane
  std::vector<Point> vertices;     // arrangement vertices on the closure, sorted
  Point interior;                  // a witness point strictly inside, within the box
  bool bounded = false;
  std::optional<Point> recession;  // certificate of unboundedness
  bool window_truncated = false;
};

struct Adjacency {
  std::size_t first = 0;
  std::size_t second = 0;
  int face_dimension = 0;
  std::vector<Point> shared_vertices;
};

struct PosetElement {
  int dimension = 0;
  std::vector<std::size_t> planes;  // flat indices of hyperplanes containing the element
  Point point;                      // some point of the element
};

/// Bound on the levels of flats of one family that lie outside the window.
struct WindowGuard {
  std::size_t family = 0;
  IntVector normal;
  double min_abs_level = 0.0;
};

struct HomotopyReport {
  std::vector<Chamber> polytopes;
  std::vector<Adjacency> adjacency;
  std::vector<PosetElement> poset;
  std::vector<std::pair<std::size_t, std::size_t>> poset_covers;  // (larger, smaller) element ids
  std::size_t truncated_excluded = 0;
  std::size_t chamber_count = 0;
};

std::vector<Hyperplane> build_arrangement(const config::FlatConfiguration& cfg, std::size_t window);
std::vector<WindowGuard> window_guards(const config::FlatConfiguration& cfg, std::size_t window);

std::vector<Vertex> enumerate_vertices(std::span<const Hyperplane> planes);

/// Box around every vertex and one point of every hyperplane, padded by `margin`.
Box bounding_box(std::span<const Hyperplane> planes, std::size_t dimension, const Rational& margin = 1);

/// All chambers meeting the box, sorted by sign vector. Boundedness is decided
/// by the recession cone, not by the box.
std::vector<Chamber> enumerate_chambers(std::span<const Hyperplane> planes, const Box& box);

struct PosetOptions {
  bool include_poset = true;
};

HomotopyReport homotopy_report(std::span<const Hyperplane> planes, const Box& box,
                               std::span<const WindowGuard> guards = {}, const PosetOptions& options = {});

/// Intersection poset of the arrangement, top element (the whole space) first.
std::pair<std::vector<PosetElement>, std::vector<std::pair<std::size_t, std::size_t>>> intersection_poset(
    std::span<const Hyperplane> planes, std::size_t dimension);

/// (x, y) with x, y >= 0 and tau(x, y) = ((x^2 - y^2)/2, x y) = (p, q); q >= 0.
std::pair<double, double> tau_inverse(double p, double q);

/// (j_t^1(x, y), j_t^2(x, y)) for t in [0, 1], x, y >= 0.
std::pair<double, double> retraction_pair(double t, double x, double y);

/// h_t(z, w): the moduli go through retraction_pair, phases are kept; a zero
/// input component takes phase 1.
std::pair<std::complex<double>, std::complex<double>> deform_pair(double t, std::complex<double> z,
                                                                  std::complex<double> w);

}  // namespace hypertoric::arrangement
