#include "periodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"

namespace hypertoric::periodic {

namespace {

struct Reduced {
  double xi = 0.0;
  std::complex<double> omega;
};

Reduced reduce(const BasePoint& point, const PeriodicFamily& fam) {
  double p = -fam.lambda0;
  std::complex<double> v = -fam.cx;
  for (std::size_t i = 0; i < fam.generator.size(); ++i) {
    const double u = fam.generator[i].get_d();
    p += u * point.a[i];
    v += u * point.b[i];
  }
  return {p / fam.spacing, v / fam.spacing};
}

void check_domain(const std::vector<Reduced>& reduced) {
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    if (!(std::abs(reduced[j].omega) < 1.0)) {
      std::ostringstream msg;
      msg << "|v| / d = " << std::abs(reduced[j].omega) << " >= 1 for family " << j;
      throw Error(ErrorCode::kDomain, msg.str());
    }
  }
}

}  // namespace

SeriesValue ov_potential(double x, std::complex<double> w, std::size_t n) {
  if (!std::isfinite(x) || !std::isfinite(w.real()) || !std::isfinite(w.imag())) {
    throw Error(ErrorCode::kDomain, "non-finite argument");
  }
  const double rho2 = std::norm(w);
  if (rho2 == 0 && x == std::round(x) && std::abs(x) <= 1e15) {
    throw Error(ErrorCode::kSingularity, "coordinate singularity: point at the centre k = " + std::to_string(long(x)));
  }
  const double radius = std::sqrt(x * x + rho2);
  SeriesValue out;
  out.truncation = std::max<std::size_t>(n == 0 ? 1 : n, static_cast<std::size_t>(std::ceil(2 * radius)));

  double sum = 1.0 / std::sqrt(x * x + rho2);
  double carry = 0.0;
  for (std::size_t k = 1; k <= out.truncation; ++k) {
    const double kk = static_cast<double>(k);
    const double term = 1.0 / std::sqrt((x - kk) * (x - kk) + rho2) + 1.0 / std::sqrt((x + kk) * (x + kk) + rho2) -
                        2.0 / kk - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  out.value = sum;
  // |f(k)| <= 2/(k - R) - 2/k, summed by the integral from N.
  const double big_n = static_cast<double>(out.truncation);
  out.tail_bound = 2.0 * std::log(big_n / (big_n - radius));
  return out;
}

void validate_families(std::size_t rank, const std::vector<PeriodicFamily>& families) {
  if (rank == 0) throw Error(ErrorCode::kSchema, "rank must be >= 1");
  if (families.empty()) throw Error(ErrorCode::kSchema, "no periodic families");
  for (std::size_t j = 0; j < families.size(); ++j) {
    const auto& f = families[j];
    const std::string where = "families[" + std::to_string(j) + "]";
    if (f.generator.size() != rank) throw Error(ErrorCode::kSchema, where + ".generator has wrong length");
    if (f.generator.is_zero() || !lattice::is_primitive(f.generator)) {
      throw Error(ErrorCode::kSchema, where + ".generator must be primitive");
    }
    if (!(f.spacing > 0) || !std::isfinite(f.spacing)) throw Error(ErrorCode::kSchema, where + ".d must be > 0");
    if (!std::isfinite(f.lambda0)) throw Error(ErrorCode::kSchema, where + ".lambda0 must be finite");
  }
}

metric::PotentialResult periodic_potential(const BasePoint& point, const std::vector<PeriodicFamily>& families,
                                           std::size_t n) {
  const std::size_t rank = families.empty() ? 0 : families.front().generator.size();
  validate_families(rank, families);
  if (point.a.size() != rank || point.b.size() != rank) throw Error(ErrorCode::kArity, "point has wrong dimension");
  std::vector<Reduced> reduced;
  for (const auto& f : families) reduced.push_back(reduce(point, f));
  check_domain(reduced);

  metric::PotentialResult out;
  out.phi = Eigen::MatrixXd::Zero(rank, rank);
  out.truncation = n;
  for (std::size_t j = 0; j < families.size(); ++j) {
    SeriesValue s;
    try {
      s = ov_potential(reduced[j].xi, reduced[j].omega, n);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingularity) throw;
      throw Error(ErrorCode::kSingularity, "coordinate singularity: point on a flat of family " + std::to_string(j));
    }
    const auto u = families[j].generator.to_doubles();
    double u2 = 0;
    for (std::size_t i = 0; i < rank; ++i) {
      for (std::size_t l = 0; l < rank; ++l) out.phi(i, l) += u[i] * u[l] * s.value;
      u2 += u[i] * u[i];
    }
    out.tail_bound += u2 * s.tail_bound;
    out.truncation = std::max(out.truncation, s.truncation);
  }
  return out;
}

Periodicity periodicity_residual(const BasePoint& point, const std::vector<PeriodicFamily>& families, std::size_t n) {
  Periodicity out;
  const auto base = periodic_potential(point, families, n);
  for (const auto& f : families) {
    BasePoint shifted = point;
    for (std::size_t i = 0; i < shifted.a.size(); ++i) shifted.a[i] += f.generator[i].get_d();
    const auto moved = periodic_potential(shifted, families, n);
    out.residual = std::max(out.residual, (moved.phi - base.phi).cwiseAbs().maxCoeff());
    out.bound = std::max(out.bound, base.tail_bound + moved.tail_bound);
  }
  return out;
}

double ov_laplacian(double x, std::complex<double> w, std::size_t n, double h) {
  if (!(h > 0)) throw Error(ErrorCode::kInvalidArgument, "step h must be > 0");
  // Fix the truncation so every stencil point sums the same terms.
  const std::size_t big_n = ov_potential(x, w, n).truncation + 1;
  auto f = [&](double dx, double dre, double dim) {
    return ov_potential(x + dx, w + std::complex<double>(dre, dim), big_n).value;
  };
  const double mid = f(0, 0, 0);
  const double lap = f(h, 0, 0) + f(-h, 0, 0) + f(0, h, 0) + f(0, -h, 0) + f(0, 0, h) + f(0, 0, -h) - 6 * mid;
  return lap / (h * h);
}

FibrationReport fibration_report(const std::vector<std::complex<double>>& b,
                                 const std::vector<PeriodicFamily>& families, std::size_t window, double tol) {
  const std::size_t rank = families.empty() ? 0 : families.front().generator.size();
  validate_families(rank, families);
  if (b.size() != rank) throw Error(ErrorCode::kArity, "b has wrong dimension");
  BasePoint point{std::vector<double>(rank, 0.0), b};
  std::vector<Reduced> reduced;
  for (const auto& f : families) reduced.push_back(reduce(point, f));
  check_domain(reduced);

  FibrationReport out;
  out.rank = rank;
  for (std::size_t j = 0; j < families.size(); ++j) {
    if (std::abs(reduced[j].omega) * families[j].spacing > tol) continue;
    out.incident.push_back(j);
    CollapsingCircle c;
    c.family = j;
    c.direction = families[j].generator;
    const long w = static_cast<long>(window);
    for (long k = -w; k <= w; ++k) c.levels.push_back(families[j].lambda0 + families[j].spacing * static_cast<double>(k));
    out.circles.push_back(std::move(c));
  }
  std::ostringstream text;
  if (out.incident.empty()) {
    text << "generic fiber T^{2n} (T^" << 2 * rank << ")";
  } else if (rank == 1) {
    text << "nodal degeneration: one circle pinched over each point <a, u> = lambda0 + d k";
  } else {
    text << out.incident.size() << " collapsing circle direction" << (out.incident.size() > 1 ? "s" : "")
         << " over the real hyperplanes <a, u_j> = lambda0_j + d_j k";
  }
  out.description = text.str();
  return out;
}

}  // namespace hypertoric::periodic
