#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "exact.hpp"
#include "lattice.hpp"

namespace hypertoric::config {

using lattice::IntVector;

/// lambda = (lambda^R, lambda^C) in R (+) C, held exactly.
struct ImQuaternion {
  Rational re;
  Rational cx_re;
  Rational cx_im;

  double real_part() const { return re.get_d(); }
  std::complex<double> complex_part() const { return {cx_re.get_d(), cx_im.get_d()}; }
  double norm() const;
  bool has_complex_part() const { return cx_re != 0 || cx_im != 0; }

  friend bool operator==(const ImQuaternion&, const ImQuaternion&) = default;
  ImQuaternion operator-() const { return {-re, -cx_re, -cx_im}; }
};

enum class TailKind { kPower, kArithmetic };

/// Analytic law for the levels past the explicit prefix. `k` is the 1-based
/// member index inside the family.
///   power:      lambda^R_k = lambda0 + sign * c * k^delta
///   arithmetic: lambda^R_k = lambda0 + d * k
/// The complex part is the fixed `cx` in both cases.
struct TailLaw {
  TailKind kind = TailKind::kPower;
  double c = 1.0;
  double delta = 2.0;
  int sign = 1;
  Rational lambda0 = 0;
  Rational d = 0;
  Rational cx_re = 0;
  Rational cx_im = 0;

  ImQuaternion level(std::size_t k) const;
  double growth_constant() const;
  double growth_exponent() const;
};

struct LambdaLaw {
  std::vector<ImQuaternion> prefix;
  std::optional<TailLaw> tail;

  bool finite() const { return !tail.has_value(); }
  /// Level of member k (1-based), or nullopt past the end of a finite law.
  std::optional<ImQuaternion> member(std::size_t k) const;
};

struct FlatFamily {
  IntVector generator;
  LambdaLaw levels;
};

struct FamilyTail {
  std::size_t family = 0;
  std::size_t prefix_size = 0;
  double c = 0.0;
  double delta = 0.0;
};

struct ConvergenceCertificate {
  bool pass = false;
  std::optional<std::size_t> divergent_family;
  std::string reason;
  std::vector<FamilyTail> tails;
  std::vector<std::vector<double>> prefix_terms;  // 1/(1+|lambda_k|) per family prefix

  /// Bound on sum over members k > window (all families) of 1/(1+|lambda_k|).
  double tail_bound(std::size_t window) const;
  double family_tail_bound(std::size_t family, std::size_t window) const;
};

/// The (beta, lambda) datum. Construction validates the schema-level
/// invariants; certification is a separate, explicit step.
class FlatConfiguration {
 public:
  static FlatConfiguration create(std::size_t rank, std::vector<FlatFamily> families);

  std::size_t rank() const { return rank_; }
  const std::vector<FlatFamily>& families() const { return families_; }
  const std::optional<ConvergenceCertificate>& certificate() const { return certificate_; }
  bool is_certified() const { return certificate_ && certificate_->pass; }

  /// Copy with the convergence certificate attached (pass or fail).
  FlatConfiguration certified() const;
  /// Throws kOrdering unless a passing certificate is attached.
  void require_certified(const char* operation) const;

  friend bool operator==(const FlatConfiguration& a, const FlatConfiguration& b);

 private:
  std::size_t rank_ = 0;
  std::vector<FlatFamily> families_;
  std::optional<ConvergenceCertificate> certificate_;
};

struct Flat {
  std::size_t index = 0;   // global, stable across windows
  std::size_t family = 0;
  std::size_t member = 0;  // 1-based inside the family
  IntVector generator;
  ImQuaternion level;
};

struct BasePoint {
  std::vector<double> a;
  std::vector<std::complex<double>> b;
};

ConvergenceCertificate certify_convergence(const FlatConfiguration& cfg);

/// First `window` members of every family, member-major.
std::vector<Flat> enumerate_flats(const FlatConfiguration& cfg, std::size_t window);

/// Enumerated flats containing the point. tol == 0 is exact membership.
std::vector<std::size_t> flats_through(const FlatConfiguration& cfg, const BasePoint& point,
                                       std::size_t window, double tol);

/// Same as above over an already enumerated list.
std::vector<std::size_t> flats_through(const std::vector<Flat>& flats, const BasePoint& point, double tol);

lattice::GeneratorSet generator_set(const std::vector<Flat>& flats, std::size_t rank);

enum class Condition { kA, kB };

struct SmoothnessWitness {
  Condition condition = Condition::kA;
  std::vector<std::size_t> flats;  // global flat indices
  std::optional<Integer> determinant;
};

struct SmoothnessOptions {
  bool exhaustive = false;
  /// When set, flats not meeting the cube |a^c_i| <= box_radius are pruned.
  std::optional<double> box_radius;
};

struct SmoothnessReport {
  bool pass = true;
  std::size_t window = 0;
  std::size_t flats_checked = 0;
  std::size_t flats_pruned = 0;
  std::size_t consistent_subsets = 0;
  std::vector<SmoothnessWitness> violations;
  std::string coverage;
};

SmoothnessReport check_smoothness(const FlatConfiguration& cfg, std::size_t window,
                                  const SmoothnessOptions& options = {});

/// Applies u -> M u to every generator; levels are unchanged.
FlatConfiguration transform(const FlatConfiguration& cfg, const lattice::BasisChange& change);

/// The Goto configuration: two e_1 families at -m^2/2 and +m^2/2 (K explicit
/// members each, then a k^2/2 power tail) plus sum(e_i) and -e_r at level 0.
FlatConfiguration builtin_goto(std::size_t n, std::size_t prefix_depth);

}  // namespace hypertoric::config
