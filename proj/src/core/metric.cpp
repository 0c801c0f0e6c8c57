#include "metric.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "error.hpp"

namespace hypertoric::metric {

namespace {

struct Term {
  std::size_t flat = 0;
  std::vector<double> u;
  double unorm = 0.0;
  double level = 0.0;
  std::complex<double> cx;
  double weight = 1.0;
};

std::vector<Term> terms_of(const FlatConfiguration& cfg, std::size_t window, const Deformation& deformation) {
  std::vector<Term> out;
  for (const auto& f : config::enumerate_flats(cfg, window)) {
    Term t;
    t.flat = f.index;
    t.u = f.generator.to_doubles();
    t.unorm = f.generator.norm();
    t.level = f.level.real_part();
    t.cx = f.level.complex_part();
    t.weight = deformation ? deformation->weight(f.index) : 1.0;
    out.push_back(std::move(t));
  }
  return out;
}

void check_point(const BasePoint& point, std::size_t n) {
  if (point.a.size() != n || point.b.size() != n) throw Error(ErrorCode::kArity, "point has wrong dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(point.a[i]) || !std::isfinite(point.b[i].real()) || !std::isfinite(point.b[i].imag())) {
      throw Error(ErrorCode::kDomain, "point has non-finite coordinates");
    }
  }
}

void check_deformation(const Deformation& deformation, std::size_t n) {
  if (!deformation || deformation->c.size() == 0) return;
  const auto& c = deformation->c;
  if (c.rows() != static_cast<Eigen::Index>(n) || c.cols() != static_cast<Eigen::Index>(n)) {
    throw Error(ErrorCode::kArity, "Taub-NUT matrix must be n x n");
  }
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "Taub-NUT matrix must be symmetric");
  }
}

// Finite-difference checks evaluate F in quad precision: with h = 1e-4 and large
// levels, eps |F| / h^2 in long double already reaches 1e-6.
using Wide = __float128;
using std::log;
using std::sqrt;
inline Wide sqrt(Wide x) { return sqrtq(x); }
inline Wide log(Wide x) { return logq(x); }

[[noreturn]] void on_flat(std::size_t flat) {
  throw Error(ErrorCode::kSingularity, "coordinate singularity: point on flat " + std::to_string(flat));
}

// s + r without cancellation for s < 0: (s + r)(r - s) = 4|v|^2.
template <typename T>
T s_plus_r(T s, T r, T v2, std::size_t flat) {
  const T out = s >= 0 ? s + r : 4 * v2 / (r - s);
  if (!(out > 0)) {
    throw Error(ErrorCode::kSingularity, "branch singularity: s + r = 0 on flat " + std::to_string(flat));
  }
  return out;
}

// Coordinates packed as (a, Re b, Im b).
template <typename T>
T prepotential_at(const std::vector<Term>& terms, const std::vector<T>& x, std::size_t n,
                  const Deformation& deformation) {
  T sum = 0;
  T carry = 0;
  for (const auto& t : terms) {
    T p = -static_cast<T>(t.level);
    T vr = -static_cast<T>(t.cx.real());
    T vi = -static_cast<T>(t.cx.imag());
    for (std::size_t i = 0; i < n; ++i) {
      p += static_cast<T>(t.u[i]) * x[i];
      vr += static_cast<T>(t.u[i]) * x[n + i];
      vi += static_cast<T>(t.u[i]) * x[2 * n + i];
    }
    const T s = 2 * p;
    const T v2 = vr * vr + vi * vi;
    const T r = sqrt(s * s + 4 * v2);
    if (r == 0) on_flat(t.flat);
    const T term = static_cast<T>(t.weight) * (s * log(s_plus_r(s, r, v2, t.flat)) - r) - carry;
    const T next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  T out = sum / 4;
  if (deformation && deformation->c.size() != 0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const T c = static_cast<T>(deformation->c(i, j));
        out += c * (x[i] * x[j] - (x[n + i] * x[n + j] + x[2 * n + i] * x[2 * n + j]) / 2);
      }
    }
  }
  return out;
}

std::vector<Wide> pack(const BasePoint& point) {
  const std::size_t n = point.a.size();
  std::vector<Wide> x(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = point.a[i];
    x[n + i] = point.b[i].real();
    x[2 * n + i] = point.b[i].imag();
  }
  return x;
}

// Central second difference d^2 F / dx_p dx_q.
template <typename F>
Wide second_difference(F&& f, std::vector<Wide> x, std::size_t p, std::size_t q, Wide h) {
  if (p == q) {
    const Wide mid = f(x);
    x[p] += h;
    const Wide up = f(x);
    x[p] -= 2 * h;
    const Wide down = f(x);
    return (up - 2 * mid + down) / (h * h);
  }
  Wide acc = 0;
  for (int sp : {1, -1}) {
    for (int sq : {1, -1}) {
      auto y = x;
      y[p] += sp * h;
      y[q] += sq * h;
      acc += sp * sq * f(y);
    }
  }
  return acc / (4 * h * h);
}

// Bound on the entries of sum over omitted flats of u u^T / r, or nullopt when
// `window` is too small for the estimate.
std::optional<double> omitted_bound(const FlatConfiguration& cfg, const BasePoint& point, std::size_t window) {
  double norm2 = 0;
  for (double x : point.a) norm2 += x * x;
  for (auto z : point.b) norm2 += std::norm(z);
  const double radius = std::sqrt(norm2);

  double bound = 0;
  for (const auto& fam : cfg.families()) {
    const double u2 = fam.generator.norm() * fam.generator.norm();
    const double reach = fam.generator.norm() * radius;
    for (std::size_t k = window + 1; k <= fam.levels.prefix.size(); ++k) {
      // r_k >= 2 (|lambda_k| - |u| |(a, b)|).
      const double gap = fam.levels.prefix[k - 1].norm() - reach;
      if (!(gap > 0.5 * fam.levels.prefix[k - 1].norm())) return std::nullopt;
      bound += u2 / (2 * gap);
    }
    if (const auto& tail = fam.levels.tail) {
      const double delta = tail->growth_exponent();
      const double c = tail->growth_constant();
      if (delta <= 1.0) {
        throw Error(ErrorCode::kNoCertifiedTail,
                    "no certified tail: a family grows like k^" + std::to_string(delta) + " with delta <= 1");
      }
      const std::size_t k0 = std::max(window, fam.levels.prefix.size());
      if (k0 == 0) return std::nullopt;
      const double kd = std::pow(static_cast<double>(k0), delta);
      const double rho = reach / (c * kd);
      if (rho > 0.5) return std::nullopt;
      bound += 0.5 * u2 * std::pow(static_cast<double>(k0), 1.0 - delta) / (c * (delta - 1.0) * (1.0 - rho));
    }
  }
  return bound;
}

}  // namespace

std::vector<FlatDatum> flat_data(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window) {
  cfg.require_certified("flat_data");
  const std::size_t n = cfg.rank();
  check_point(point, n);
  std::vector<FlatDatum> out;
  for (const auto& t : terms_of(cfg, window, std::nullopt)) {
    double p = -t.level;
    std::complex<double> v = -t.cx;
    for (std::size_t i = 0; i < n; ++i) {
      p += t.u[i] * point.a[i];
      v += t.u[i] * point.b[i];
    }
    FlatDatum d;
    d.flat = t.flat;
    d.s = 2 * p;
    d.v = v;
    d.r = std::hypot(d.s, 2 * std::abs(v));
    d.distance = d.r / (2 * t.unorm);
    d.string_gap = d.s >= 0 ? d.s + d.r : (d.r > 0 ? 4 * std::norm(v) / (d.r - d.s) : 0.0);
    out.push_back(d);
  }
  return out;
}

PotentialResult potential(const BasePoint& point, const FlatConfiguration& cfg, const TruncationPlan& plan,
                          const Deformation& deformation) {
  for (const auto& fam : cfg.families()) {
    if (fam.levels.tail && fam.levels.tail->growth_exponent() <= 1.0) {
      throw Error(ErrorCode::kNoCertifiedTail, "no certified tail: a family grows like k^delta with delta <= 1");
    }
  }
  cfg.require_certified("potential");
  const std::size_t n = cfg.rank();
  check_point(point, n);
  check_deformation(deformation, n);

  PotentialResult out;
  std::size_t window = plan.n;
  std::optional<double> tail;
  while (!(tail = omitted_bound(cfg, point, window))) {
    if (window >= plan.max_n) {
      std::ostringstream msg;
      msg << "no certified tail within max_n = " << plan.max_n << ": the point is too far out for the tail estimate";
      throw Error(ErrorCode::kConvergence, msg.str());
    }
    window = std::min(plan.max_n, std::max<std::size_t>(window * 2, window + 1));
  }
  out.truncation = window;
  out.tail_bound = *tail;
  out.exact = true;
  for (const auto& fam : cfg.families()) {
    if (fam.levels.tail || fam.levels.prefix.size() > window) out.exact = false;
  }

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : terms_of(cfg, window, deformation)) {
    double p = -t.level;
    std::complex<double> v = -t.cx;
    for (std::size_t i = 0; i < n; ++i) {
      p += t.u[i] * point.a[i];
      v += t.u[i] * point.b[i];
    }
    const double r = std::hypot(2 * p, 2 * std::abs(v));
    if (r == 0) on_flat(t.flat);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double term = t.weight * t.u[i] * t.u[j] / r - carry(i, j);
        const double next = sum(i, j) + term;
        carry(i, j) = (next - sum(i, j)) - term;
        sum(i, j) = next;
      }
    }
  }
  if (deformation && deformation->c.size() != 0) sum += 2 * deformation->c;
  out.phi = sum;
  return out;
}

double prepotential_truncated(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                              const Deformation& deformation) {
  cfg.require_certified("prepotential_truncated");
  check_point(point, cfg.rank());
  check_deformation(deformation, cfg.rank());
  const auto terms = terms_of(cfg, window, deformation);
  std::vector<double> x(3 * cfg.rank());
  const std::size_t n = cfg.rank();
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = point.a[i];
    x[n + i] = point.b[i].real();
    x[2 * n + i] = point.b[i].imag();
  }
  return prepotential_at(terms, x, n, deformation);
}

Connection connection(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                      const Deformation& deformation) {
  cfg.require_certified("connection");
  const std::size_t n = cfg.rank();
  check_point(point, n);
  Connection out;
  out.coefficients = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : terms_of(cfg, window, deformation)) {
    double p = -t.level;
    std::complex<double> v = -t.cx;
    for (std::size_t i = 0; i < n; ++i) {
      p += t.u[i] * point.a[i];
      v += t.u[i] * point.b[i];
    }
    const double s = 2 * p;
    const double v2 = std::norm(v);
    const double r = std::hypot(s, 2 * std::abs(v));
    if (r == 0) on_flat(t.flat);
    const double sr = s_plus_r(s, r, v2, t.flat);
    const std::complex<double> scale = t.weight * std::conj(v) / (r * sr);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) out.coefficients(j, l) += t.u[j] * t.u[l] * scale;
    }
  }
  // A_j = (i/2) sum_l (C_jl db_l - conj(C_jl) dconj(b_l)) = -sum_l Im(C_jl db_l).
  out.dx = -out.coefficients.imag();
  out.dy = -out.coefficients.real();
  return out;
}

GramMatrix gram_matrix(const BasePoint& point, const FlatConfiguration& cfg, const TruncationPlan& plan,
                       const Deformation& deformation) {
  GramMatrix out;
  out.potential = potential(point, cfg, plan, deformation);
  const auto& phi = out.potential.phi;
  const Eigen::Index n = phi.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(phi);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kDegeneratePotential, "degenerate potential: Phi is not positive definite at the point");
  }
  const Connection conn = connection(point, cfg, out.potential.truncation, deformation);
  const Eigen::MatrixXd phi_inv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, 4 * n);
  l.block(0, n, n, n) = -conn.dx;
  l.block(0, 2 * n, n, n) = -conn.dy;
  l.block(0, 3 * n, n, n) = Eigen::MatrixXd::Identity(n, n);

  out.g = l.transpose() * phi_inv * l;
  for (int block = 0; block < 3; ++block) out.g.block(block * n, block * n, n, n) += phi;
  out.g = (0.5 * (out.g + out.g.transpose())).eval();
  return out;
}

IdentityResidual polyharmonic_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window,
                                    double h, const Deformation& deformation) {
  cfg.require_certified("polyharmonic_check");
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "step h must be > 0");
  const std::size_t n = cfg.rank();
  check_point(point, n);
  check_deformation(deformation, n);
  const auto terms = terms_of(cfg, window, deformation);
  auto f = [&](const std::vector<Wide>& x) { return prepotential_at(terms, x, n, deformation); };
  const auto x = pack(point);
  IdentityResidual out;
  out.h = h;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Wide faa = second_difference(f, x, i, j, h);
      const Wide fxx = second_difference(f, x, n + i, n + j, h);
      const Wide fyy = second_difference(f, x, 2 * n + i, 2 * n + j, h);
      out.residual = std::max(out.residual, std::abs(static_cast<double>(faa + fxx + fyy)));
      out.scale = std::max(out.scale, std::abs(static_cast<double>(faa)));
    }
  }
  return out;
}

IdentityResidual potential_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double h,
                                 const Deformation& deformation) {
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "step h must be > 0");
  const std::size_t n = cfg.rank();
  cfg.require_certified("potential_check");
  check_point(point, n);
  check_deformation(deformation, n);
  const auto terms = terms_of(cfg, window, deformation);
  auto f = [&](const std::vector<Wide>& x) { return prepotential_at(terms, x, n, deformation); };
  // Only the explicit window: the analytic comparison excludes the tail.
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : terms) {
    double p = -t.level;
    std::complex<double> v = -t.cx;
    for (std::size_t i = 0; i < n; ++i) {
      p += t.u[i] * point.a[i];
      v += t.u[i] * point.b[i];
    }
    const double r = std::hypot(2 * p, 2 * std::abs(v));
    if (r == 0) on_flat(t.flat);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) phi(i, j) += t.weight * t.u[i] * t.u[j] / r;
    }
  }
  if (deformation && deformation->c.size() != 0) phi += 2 * deformation->c;
  const auto x = pack(point);
  IdentityResidual out;
  out.h = h;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double fd = static_cast<double>(second_difference(f, x, i, j, h));
      out.residual = std::max(out.residual, std::abs(fd - phi(i, j)));
      out.scale = std::max(out.scale, std::abs(phi(i, j)));
    }
  }
  return out;
}

IdentityResidual monopole_check(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double h,
                                const Deformation& deformation) {
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "step h must be > 0");
  const std::size_t n = cfg.rank();
  const Connection conn = connection(point, cfg, window, deformation);
  check_deformation(deformation, n);
  const auto terms = terms_of(cfg, window, deformation);
  auto f = [&](const std::vector<Wide>& x) { return prepotential_at(terms, x, n, deformation); };
  const auto x = pack(point);
  IdentityResidual out;
  out.h = h;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < n; ++l) {
      const Wide dx = second_difference(f, x, j, n + l, h);
      const Wide dy = second_difference(f, x, j, 2 * n + l, h);
      const std::complex<double> fd(static_cast<double>(dx / 2), static_cast<double>(-dy / 2));
      out.residual = std::max(out.residual, std::abs(fd - conn.coefficients(j, l)));
      out.scale = std::max(out.scale, std::abs(conn.coefficients(j, l)));
    }
  }
  return out;
}

}  // namespace hypertoric::metric
