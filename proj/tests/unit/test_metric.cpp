#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "metric.hpp"

using namespace hypertoric;
using namespace hypertoric::metric;
using C = std::complex<double>;

namespace {

config::FlatFamily flat(lattice::IntVector u, Rational re, Rational cre = 0, Rational cim = 0) {
  config::FlatFamily f;
  f.generator = std::move(u);
  f.levels.prefix.push_back({re, cre, cim});
  return f;
}

FlatConfiguration make(std::size_t n, std::vector<config::FlatFamily> fams) {
  return FlatConfiguration::create(n, std::move(fams)).certified();
}

FlatConfiguration random_finite(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<int> entry(-1, 1);
  std::uniform_int_distribution<int> level(-4, 4);
  while (true) {
    std::vector<config::FlatFamily> fams;
    const std::size_t m = n + 1 + rng() % 4;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Integer> e(n);
      do {
        for (auto& x : e) x = entry(rng);
      } while (std::all_of(e.begin(), e.end(), [](const Integer& x) { return x == 0; }));
      fams.push_back(flat(lattice::IntVector(e), make_rational(level(rng), 2), make_rational(level(rng), 4),
                          make_rational(level(rng), 4)));
    }
    try {
      return make(n, std::move(fams));
    } catch (const Error&) {
      // duplicate or non-spanning draw
    }
  }
}

BasePoint random_point(std::mt19937& rng, std::size_t n, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  BasePoint p;
  for (std::size_t i = 0; i < n; ++i) {
    p.a.push_back(u(rng));
    p.b.emplace_back(u(rng), u(rng));
  }
  return p;
}

double min_distance(const BasePoint& p, const FlatConfiguration& cfg, std::size_t window) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : flat_data(p, cfg, window)) d = std::min(d, f.distance);
  return d;
}

double min_string_gap(const BasePoint& p, const FlatConfiguration& cfg, std::size_t window) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : flat_data(p, cfg, window)) d = std::min(d, f.string_gap);
  return d;
}

}  // namespace

TEST_CASE("flat_data") {
  auto one = make(1, {flat({1}, 0)});
  auto d = flat_data({{0.5}, {0.0}}, one, 1)[0];
  CHECK(d.s == 1.0);
  CHECK(d.v == C(0.0));
  CHECK(d.r == 1.0);
  CHECK(d.distance == 0.5);
  auto on = flat_data({{0.0}, {0.0}}, one, 1)[0];
  CHECK(on.r == 0.0);

  auto two = make(2, {flat({1, 1}, 0), flat({1, 0}, 5), flat({0, 1}, 5)});
  auto e = flat_data({{1.0, 0.0}, {C(0, 1), C(0)}}, two, 1)[0];
  CHECK(e.s == 2.0);
  CHECK(e.v == C(0, 1));
  CHECK(e.r == doctest::Approx(std::sqrt(8.0)));
  // Distance r / 2|u| is the Euclidean distance in R^{3n} to the flat.
  CHECK(e.distance == doctest::Approx(1.0));
}

TEST_CASE("potential against closed forms") {
  auto one = make(1, {flat({1}, 0)});
  auto r1 = potential({{0.5}, {0.0}}, one, {1});
  CHECK(r1.phi(0, 0) == 1.0);
  CHECK(r1.tail_bound == 0.0);
  CHECK(r1.exact);

  auto two = make(1, {flat({1}, 0), flat({1}, 1)});
  CHECK(potential({{0.5}, {0.0}}, two, {1}).phi(0, 0) == doctest::Approx(2.0));

  try {
    potential({{1.0}, {0.0}}, two, {1});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularity);
    CHECK(std::string(e.what()).find("coordinate singularity") != std::string::npos);
  }
}

TEST_CASE("n = 1 reduces to the multi-centre Gibbons-Hawking sum") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> level(-6, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<config::FlatFamily> fams;
    std::vector<std::array<double, 3>> centres;
    for (int k = 0; k < 5; ++k) {
      const int sign = (rng() % 2) ? 1 : -1;
      const Rational re = make_rational(level(rng), 3), cre = make_rational(level(rng), 5), cim = make_rational(level(rng), 7);
      fams.push_back(flat({sign}, re, cre, cim));
      // H(-1, l) = H(1, -l).
      centres.push_back({sign * re.get_d(), sign * cre.get_d(), sign * cim.get_d()});
    }
    FlatConfiguration cfg;
    try {
      cfg = make(1, fams);
    } catch (const Error&) {
      continue;
    }
    auto p = random_point(rng, 1);
    double gh = 0;
    for (const auto& c : centres) {
      const double dist = std::hypot(p.a[0] - c[0], std::hypot(p.b[0].real() - c[1], p.b[0].imag() - c[2]));
      gh += 1.0 / (2.0 * dist);
    }
    CHECK(potential(p, cfg, {5}).phi(0, 0) == doctest::Approx(gh).epsilon(1e-12));
  }
}

TEST_CASE("Goto potential: tail bound brackets the longer truncation") {
  auto cfg = config::builtin_goto(2, 4).certified();
  std::mt19937 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto p = random_point(rng, 2, 3.0);
    if (min_distance(p, cfg, 200) < 1e-3) continue;
    for (std::size_t window : {8u, 20u}) {
      auto lo = potential(p, cfg, {window});
      auto hi = potential(p, cfg, {4 * lo.truncation});
      CHECK(lo.truncation >= window);
      CHECK_FALSE(lo.exact);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(std::abs(hi.phi(i, j) - lo.phi(i, j)) <= lo.tail_bound);
        CHECK(hi.phi(i, i) >= lo.phi(i, i));
      }
      CHECK(lo.tail_bound <= 2.0 * 2.0 / double(lo.truncation));
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("potential raises the window for far points and refuses divergent tails") {
  auto cfg = config::builtin_goto(2, 2).certified();
  BasePoint far{{40.3, -3.1}, {C(2.0, 1.0), C(0.5, 0.0)}};
  auto r = potential(far, cfg, {2, 1u << 12});
  CHECK(r.truncation > 2);
  CHECK_THROWS_AS(potential(far, cfg, {2, 4}), Error);

  config::FlatFamily f;
  f.generator = {1};
  config::TailLaw t;
  t.kind = config::TailKind::kArithmetic;
  t.d = 1;
  t.lambda0 = make_rational(1, 2);
  f.levels.tail = t;
  auto periodic = FlatConfiguration::create(1, {f});
  try {
    potential({{0.1}, {0.0}}, periodic, {10});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoCertifiedTail);
  }
}

TEST_CASE("prepotential") {
  auto one = make(1, {flat({1}, 0)});
  CHECK(prepotential_truncated({{0.5}, {0.0}}, one, 1) == doctest::Approx(0.25 * (std::log(2.0) - 1.0)));
  // s = 0, v = 0.3: the log term vanishes and F = -r/4 with r = 2|v|.
  CHECK(prepotential_truncated({{0.0}, {0.3}}, one, 1) == doctest::Approx(-0.25 * 0.6));
  // s < 0, v = 0 is on the branch locus.
  CHECK_THROWS_AS(prepotential_truncated({{-0.5}, {0.0}}, one, 1), Error);
  // Deep in s < 0 the stable form stays finite.
  CHECK(std::isfinite(prepotential_truncated({{-1e6}, {1e-3}}, one, 1)));
}

TEST_CASE("finite differences of the prepotential reproduce Phi and the connection") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    auto cfg = random_finite(rng, n);
    auto p = random_point(rng, n);
    if (min_distance(p, cfg, 10) < 0.2 || min_string_gap(p, cfg, 10) < 0.5) continue;
    auto pc = potential_check(p, cfg, 10, 1e-4);
    CHECK(pc.residual < 1e-6 * (1 + pc.scale));
    auto mc = monopole_check(p, cfg, 10, 1e-4);
    CHECK(mc.residual < 1e-6 * (1 + mc.scale));
  }
  // Single flat n = 1, a = 1/2, b = 0.1.
  auto one = make(1, {flat({1}, 0)});
  CHECK(monopole_check({{0.5}, {0.1}}, one, 1, 1e-4).residual < 1e-6);
}

TEST_CASE("polyharmonic identity") {
  auto one = make(1, {flat({1}, 0)});
  CHECK(polyharmonic_check({{0.7}, {C(0.3, 0.2)}}, one, 1, 1e-4).residual < 1e-6);

  std::mt19937 rng(37);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 3;
    auto cfg = random_finite(rng, n);
    auto p = random_point(rng, n);
    if (min_distance(p, cfg, 10) < 0.25 || min_string_gap(p, cfg, 10) < 0.5) continue;
    CHECK(polyharmonic_check(p, cfg, 10, 1e-4).residual < 1e-6);
    const double coarse = polyharmonic_check(p, cfg, 10, 0.02).residual;
    const double fine = polyharmonic_check(p, cfg, 10, 0.01).residual;
    if (coarse > 1e-9) {
      CHECK(coarse / fine > 3.5);
      CHECK(coarse / fine < 4.5);
    }
    ++checked;
  }
  CHECK(checked > 10);

  // The quadratic term alone is exactly polyharmonic.
  TaubNutDeformation tn;
  tn.c = Eigen::MatrixXd{{0.05, -0.02}, {-0.02, 0.08}};
  auto cfg = config::builtin_goto(2, 2).certified();
  CHECK(polyharmonic_check({{0.3, 0.4}, {C(0.1, 0.2), C(-0.3, 0.1)}}, cfg, 0, 1e-4, tn).residual < 1e-9);
}

TEST_CASE("connection") {
  auto one = make(1, {flat({1}, 0)});
  auto zero = connection({{0.5}, {0.0}}, one, 1);
  CHECK(std::abs(zero.coefficients(0, 0)) == 0.0);
  auto c1 = connection({{0.4}, {C(0.2, 0.3)}}, one, 1);
  auto c2 = connection({{0.4}, {C(0.2, -0.3)}}, one, 1);
  CHECK(std::abs(c1.coefficients(0, 0) - std::conj(c2.coefficients(0, 0))) < 1e-15);
  // b real, levels real: v real, C real.
  auto real_b = connection({{0.4}, {C(0.2, 0.0)}}, one, 1);
  CHECK(real_b.coefficients(0, 0).imag() == 0.0);
  CHECK(real_b.dx(0, 0) == 0.0);
}

TEST_CASE("gram matrix") {
  auto one = make(1, {flat({1}, 0)});
  auto g = gram_matrix({{0.5}, {0.0}}, one, {1});
  Eigen::Matrix4d expected = Eigen::Vector4d(1, 1, 1, 1).asDiagonal();
  CHECK((g.g - expected).norm() < 1e-15);
  auto g2 = gram_matrix({{2.0}, {0.0}}, one, {1});
  CHECK(g2.g(0, 0) == doctest::Approx(0.25));
  CHECK(g2.g(3, 3) == doctest::Approx(4.0));

  std::mt19937 rng(41);
  auto cfg = config::builtin_goto(2, 4).certified();
  for (int trial = 0; trial < 30; ++trial) {
    auto p = random_point(rng, 2);
    if (min_distance(p, cfg, 50) < 1e-3) continue;
    auto plain = gram_matrix(p, cfg, {20});
    TaubNutDeformation none;
    none.c = Eigen::MatrixXd::Zero(2, 2);
    auto same = gram_matrix(p, cfg, {20}, none);
    CHECK((plain.g - same.g).norm() == 0.0);
    CHECK((plain.g - plain.g.transpose()).norm() == 0.0);
    Eigen::LLT<Eigen::MatrixXd> llt(plain.g);
    CHECK(llt.info() == Eigen::Success);
    // Base block is Phi on each of the three imaginary directions.
    const auto& phi = plain.potential.phi;
    CHECK((plain.g.block(0, 0, 2, 2) - phi).norm() < 1e-12);
  }

  TaubNutDeformation bad;
  bad.c = Eigen::MatrixXd{{-10.0, 0.0}, {0.0, -10.0}};
  try {
    gram_matrix({{0.3, 0.1}, {C(0.1), C(0.2)}}, cfg, {20}, bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegeneratePotential);
  }
  TaubNutDeformation asym;
  asym.c = Eigen::MatrixXd{{0.0, 0.1}, {0.0, 0.0}};
  CHECK_THROWS_AS(gram_matrix({{0.3, 0.1}, {C(0.1), C(0.2)}}, cfg, {20}, asym), Error);
}
