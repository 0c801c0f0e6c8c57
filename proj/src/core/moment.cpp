#include "moment.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "arrangement.hpp"

namespace hypertoric::moment {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Dense {
  MatrixXd k;  // m x d
  VectorXd zz;  // |z_i|^2
  VectorXd ww;  // |w_i|^2
  VectorXd lambda;
  VectorXd target;
};

Dense densify(const MomentProblem& p) {
  const std::size_t m = p.z.size();
  if (p.w.size() != m || p.lambda1.size() != m) {
    throw Error(ErrorCode::kArity, "z, w and lambda1 must have one entry per index");
  }
  const std::size_t d = p.kernel_basis.size();
  if (p.target.size() != d) throw Error(ErrorCode::kArity, "target must have one entry per kernel vector");
  Dense out;
  out.k.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    if (p.kernel_basis[j].size() != m) throw Error(ErrorCode::kArity, "kernel vector has wrong length");
    for (std::size_t i = 0; i < m; ++i) out.k(i, j) = p.kernel_basis[j][i].get_d();
  }
  out.zz.resize(m);
  out.ww.resize(m);
  out.lambda.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.zz[i] = std::norm(p.z[i]);
    out.ww[i] = std::norm(p.w[i]);
    out.lambda[i] = p.lambda1[i];
  }
  out.target = Eigen::Map<const VectorXd>(p.target.data(), static_cast<Eigen::Index>(d));
  return out;
}

VectorXd gradient(const Dense& s, const VectorXd& eta) {
  const VectorXd y = s.k * eta;
  VectorXd c(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    c[i] = 0.5 * (s.zz[i] * std::exp(2 * y[i]) - s.ww[i] * std::exp(-2 * y[i]) + 2 * s.lambda[i]);
  }
  return s.k.transpose() * c;
}

double value(const Dense& s, const VectorXd& eta) {
  const VectorXd y = s.k * eta;
  double f = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    f += s.zz[i] * std::expm1(2 * y[i]) + s.ww[i] * std::expm1(-2 * y[i]) + 4 * s.lambda[i] * y[i];
  }
  return 0.25 * f;
}

MatrixXd hess(const Dense& s, const VectorXd& eta) {
  const VectorXd y = s.k * eta;
  VectorXd weight(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) weight[i] = s.zz[i] * std::exp(2 * y[i]) + s.ww[i] * std::exp(-2 * y[i]);
  return s.k.transpose() * weight.asDiagonal() * s.k;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }
VectorXd from_std(const std::vector<double>& v) { return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

void verify_kernel(const MomentProblem& p) {
  if (!p.generators) return;
  const auto& us = *p.generators;
  if (us.size() != p.z.size()) throw Error(ErrorCode::kArity, "one generator per index expected");
  for (std::size_t j = 0; j < p.kernel_basis.size(); ++j) {
    const std::size_t n = us.empty() ? 0 : us.front().size();
    for (std::size_t c = 0; c < n; ++c) {
      Rational s = 0;
      for (std::size_t i = 0; i < us.size(); ++i) s += p.kernel_basis[j][i] * Rational(us[i][c]);
      if (s != 0) {
        throw Error(ErrorCode::kInvalidArgument, "kernel vector " + std::to_string(j) + " is not annihilated by beta");
      }
    }
  }
  RationalMatrix k(p.kernel_basis.begin(), p.kernel_basis.end());
  if (rational_rank(k) != p.kernel_basis.size()) {
    throw Error(ErrorCode::kInvalidArgument, "kernel basis vectors are dependent");
  }
}

void check_coercive(const MomentProblem& p, const Dense& s) {
  const std::size_t d = p.kernel_basis.size();
  RationalMatrix rows;
  for (std::size_t i = 0; i < p.z.size(); ++i) {
    if (p.z[i] == 0.0 || p.w[i] == 0.0) continue;
    std::vector<Rational> row;
    for (std::size_t j = 0; j < d; ++j) row.push_back(p.kernel_basis[j][i]);
    rows.push_back(std::move(row));
  }
  auto null = null_space(rows, d);
  if (null.empty()) return;
  std::vector<double> direction;
  for (const auto& x : null.front()) direction.push_back(x.get_d());
  std::ostringstream msg;
  msg << "unbounded direction: the alpha_i with z_i w_i != 0 do not span the dual of the kernel; null covector (";
  for (std::size_t j = 0; j < direction.size(); ++j) msg << (j ? ", " : "") << direction[j];
  msg << ")";
  (void)s;
  throw NonCoerciveError(std::move(direction), msg.str());
}

}  // namespace

std::vector<double> moment_map(const MomentProblem& p, const std::vector<double>& eta) {
  return to_std(gradient(densify(p), from_std(eta)));
}

double functional(const MomentProblem& p, const std::vector<double>& eta) { return value(densify(p), from_std(eta)); }

std::vector<std::vector<double>> hessian(const MomentProblem& p, const std::vector<double>& eta) {
  const MatrixXd h = hess(densify(p), from_std(eta));
  std::vector<std::vector<double>> out(h.rows(), std::vector<double>(h.cols()));
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) out[i][j] = h(i, j);
  }
  return out;
}

MomentSolution moment_solve(const MomentProblem& p, const MomentOptions& options) {
  if (!(options.tol > 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be > 0");
  const Dense s = densify(p);
  verify_kernel(p);
  check_coercive(p, s);

  const Eigen::Index d = s.k.cols();
  MomentSolution out;
  VectorXd eta = VectorXd::Zero(d);
  auto objective = [&](const VectorXd& e) { return value(s, e) - s.target.dot(e); };
  for (int iter = 0;; ++iter) {
    const VectorXd g = gradient(s, eta) - s.target;
    out.residual = g.norm();
    out.iterations = iter;
    if (out.residual <= options.tol || d == 0) break;
    if (iter >= options.max_iter) {
      std::ostringstream msg;
      msg << "moment_solve did not converge in " << options.max_iter << " iterations; residual " << out.residual;
      throw Error(ErrorCode::kConvergence, msg.str());
    }
    const MatrixXd h = hess(s, eta);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(h);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    VectorXd step;
    if (lo > 0 && hi / lo <= 1e12) {
      step = -h.ldlt().solve(g);
    } else {
      step = -g / std::max(hi, 1.0);
      ++out.gradient_steps;
    }
    // Armijo on the objective, or a decrease of the residual: near the
    // solution the objective change drops below rounding first.
    const double f0 = objective(eta);
    const double slope = g.dot(step);
    double alpha = 1.0;
    VectorXd next = eta + step;
    for (;; alpha *= 0.5) {
      if (alpha < 1e-16) {
        std::ostringstream msg;
        msg << "moment_solve line search stalled; residual " << out.residual;
        throw Error(ErrorCode::kConvergence, msg.str());
      }
      next = eta + alpha * step;
      const double f1 = objective(next);
      if (!std::isfinite(f1)) continue;
      if (f1 <= f0 + 1e-4 * alpha * slope) break;
      if ((gradient(s, next) - s.target).norm() < out.residual) break;
    }
    eta = next;
  }
  out.eta = to_std(eta);
  out.y = to_std(s.k * eta);
  return out;
}

std::vector<std::vector<Rational>> kernel_of(const std::vector<lattice::IntVector>& generators) {
  if (generators.empty()) return {};
  const std::size_t n = generators.front().size();
  RationalMatrix a(n, std::vector<Rational>(generators.size()));
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].size() != n) throw Error(ErrorCode::kArity, "generators of mixed length");
    for (std::size_t c = 0; c < n; ++c) a[c][i] = generators[i][c];
  }
  return null_space(std::move(a), generators.size());
}

StabilizerInfo stabilizer(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window, double tol) {
  cfg.require_certified("stabilizer");
  const auto flats = config::enumerate_flats(cfg, window);
  StabilizerInfo info;
  info.incident = config::flats_through(flats, point, tol);
  std::vector<lattice::IntVector> us;
  for (auto i : info.incident) us.push_back(flats[i].generator);
  info.rank = us.empty() ? 0 : lattice::exact_rank(us);
  info.fiber_dim = cfg.rank() - info.rank;
  info.fixed_point = info.rank == cfg.rank();
  return info;
}

std::vector<Lift> point_lift(const BasePoint& point, const FlatConfiguration& cfg, std::size_t window) {
  cfg.require_certified("point_lift");
  const std::size_t n = cfg.rank();
  if (point.a.size() != n || point.b.size() != n) throw Error(ErrorCode::kArity, "point has wrong dimension");
  std::vector<Lift> out;
  for (const auto& flat : config::enumerate_flats(cfg, window)) {
    double p = -flat.level.real_part();
    std::complex<double> c = -flat.level.complex_part();
    for (std::size_t i = 0; i < n; ++i) {
      const double u = flat.generator[i].get_d();
      p += u * point.a[i];
      c += u * point.b[i];
    }
    const auto [x, y] = arrangement::tau_inverse(p, std::abs(c));
    Lift lift{flat.index, {}, {}};
    if (x > 0) {
      lift.z = x;
      lift.w = c / x;
    } else {
      lift.w = y;
    }
    out.push_back(lift);
  }
  return out;
}

DiscreteStabilizerResult discrete_stabilizer_check(const FlatConfiguration& cfg,
                                                   const std::vector<std::complex<double>>& b, std::size_t window,
                                                   double tol) {
  cfg.require_certified("discrete_stabilizer_check");
  const std::size_t n = cfg.rank();
  if (b.size() != n) throw Error(ErrorCode::kArity, "b has wrong dimension");
  if (tol < 0) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  const auto flats = config::enumerate_flats(cfg, window);
  DiscreteStabilizerResult out;
  for (const auto& flat : flats) {
    bool on = false;
    if (tol == 0) {
      Rational re = -flat.level.cx_re;
      Rational im = -flat.level.cx_im;
      for (std::size_t i = 0; i < n; ++i) {
        re += Rational(flat.generator[i]) * to_rational(b[i].real());
        im += Rational(flat.generator[i]) * to_rational(b[i].imag());
      }
      on = re == 0 && im == 0;
    } else {
      std::complex<double> v = -flat.level.complex_part();
      for (std::size_t i = 0; i < n; ++i) v += flat.generator[i].get_d() * b[i];
      on = std::abs(v) <= tol;
    }
    if (on) out.incident.push_back(flat.index);
  }
  // Grow an independent set; the first flat that does not raise the rank closes a dependent subset.
  std::vector<lattice::IntVector> basis;
  std::vector<std::size_t> chosen;
  for (auto i : out.incident) {
    auto trial = basis;
    trial.push_back(flats[i].generator);
    if (lattice::exact_rank(trial) == trial.size()) {
      basis = std::move(trial);
      chosen.push_back(i);
      continue;
    }
    out.discrete = false;
    out.witness = chosen;
    out.witness.push_back(i);
    break;
  }
  return out;
}

}  // namespace hypertoric::moment
