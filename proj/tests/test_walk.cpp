#include <doctest.h>

#include <cmath>
#include <unordered_map>

#include "nbcpp/lattice.hpp"
#include "nbcpp/mc_walk.hpp"
#include "nbcpp/walk.hpp"

using namespace nbcpp;
using lattice::Point;

namespace {
Point pt(std::initializer_list<int> cs) {
  Point p;
  p.d = static_cast<int>(cs.size());
  int i = 0;
  for (int c : cs) p.c[i++] = c;
  return p;
}
}  // namespace

// mpmath references (30 digits)
static constexpr double kP3_O_d3 = 0.10103816881425746;
static constexpr double kP05_e1_d5 = 0.030669433344145726;
static constexpr double kP3_2e1_d5 = 0.0032830095797616006;
static constexpr double kGreenO_d3 = 1.516386059151978;
static constexpr double kGamma3 = 0.65946267044900086;
static constexpr double kGamma5 = 0.86482139017934471;
static constexpr double kGamma6 = 0.89528450437117799;
static constexpr double kGreenE1_d5 = 0.15630812484023118;
static constexpr double kSWeighted_d5 = 1.93494144038235;
static constexpr double kSWeighted_d6 = 1.51414785702459;
static constexpr double kH_d5_l1 = 0.572402527598809;
static constexpr double kC1_d5_l1 = 5.84686008780151;
static constexpr double kC1_d6_l2 = 3.77105553232002;
static constexpr double kZ5_6 = 31.714233348327687;
static constexpr double kZ1_6 = 2.0346861239688983;

TEST_CASE("transition probability basics") {
  CHECK(walk::transition_probability(0.0, pt({0, 0, 0}), 3) == 1.0);
  CHECK(walk::transition_probability(0.0, pt({1, 0, 0}), 3) == 0.0);
  CHECK_THROWS_AS(walk::transition_probability(-1.0, pt({0, 0, 0}), 3),
                  std::domain_error);
  // lattice symmetry
  const Point x = pt({2, -1, 0, 3, 1});
  CHECK(walk::transition_probability(1.7, x, 5) ==
        walk::transition_probability(1.7, -x, 5));
  // frozen references
  CHECK(walk::transition_probability(3.0, pt({0, 0, 0}), 3) ==
        doctest::Approx(kP3_O_d3).epsilon(1e-12));
  CHECK(walk::transition_probability(0.5, pt({1, 0, 0, 0, 0}), 5) ==
        doctest::Approx(kP05_e1_d5).epsilon(1e-12));
  CHECK(walk::transition_probability(3.0, pt({2, 0, 0, 0, 0}), 5) ==
        doctest::Approx(kP3_2e1_d5).epsilon(1e-12));
}

TEST_CASE("bessel route agrees with the uniformized series") {
  for (int d : {3, 5}) {
    for (double t : {0.5, 3.0}) {
      for (int r : {0, 1, 2}) {
        Point x = Point::zero(d);
        x.c[0] = r;
        const double a = walk::transition_probability(t, x, d);
        const auto s = walk::transition_probability_series(t, x, d, 1e-10);
        CHECK(std::abs(a - s.value) <= 1e-8 + s.tail_bound);
      }
    }
  }
}

TEST_CASE("mass in a 6 sqrt(t) ball is within 1e-6 of 1") {
  for (int d : {3, 5}) {
    for (double t : {0.5, 1.0, 5.0}) {
      const int r = static_cast<int>(std::ceil(6.0 * std::sqrt(t))) + 2;
      const double m = walk::transition_mass_in_ball(t, d, r);
      CHECK(m <= 1.0 + 1e-12);
      CHECK(m >= 1.0 - 1e-6);
    }
  }
}

TEST_CASE("chapman-kolmogorov on a small box") {
  const int d = 3;
  const double s = 0.7, t = 1.1;
  const Point x = pt({1, 1, 0});
  double conv = 0;
  for (const Point& y : lattice::l1_ball(d, 14)) {
    Point diff = x;
    for (int i = 0; i < d; ++i) diff.c[i] = x.c[i] - y.c[i];
    conv += walk::transition_probability(s, y, d) *
            walk::transition_probability(t, diff, d);
  }
  CHECK(conv == doctest::Approx(walk::transition_probability(s + t, x, d))
                    .epsilon(1e-6));
}

TEST_CASE("green function and escape probability") {
  CHECK(walk::green_function(pt({0, 0, 0}), 3) ==
        doctest::Approx(kGreenO_d3).epsilon(1e-10));
  CHECK(walk::escape_probability(3) == doctest::Approx(kGamma3).epsilon(1e-10));
  CHECK(walk::escape_probability(5) == doctest::Approx(kGamma5).epsilon(1e-10));
  CHECK(walk::escape_probability(6) == doctest::Approx(kGamma6).epsilon(1e-10));
  CHECK(walk::green_function(pt({1, 0, 0, 0, 0}), 5) ==
        doctest::Approx(kGreenE1_d5).epsilon(1e-10));
  // definitional identity
  CHECK(walk::escape_probability(5) *
            walk::green_function(Point::zero(5), 5) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // monotone in d
  CHECK(walk::green_function(Point::zero(5), 5) <
        walk::green_function(Point::zero(3), 3));
  // symmetry
  CHECK(walk::green_function(pt({2, -1, 0}), 3) ==
        doctest::Approx(walk::green_function(pt({-2, 1, 0}), 3))
            .epsilon(1e-14));
  CHECK_THROWS_AS(walk::green_function(pt({0, 0}), 2), std::domain_error);
  CHECK_THROWS_AS(walk::escape_probability(2), std::domain_error);
}

TEST_CASE("hitting probabilities") {
  CHECK(walk::hitting_probability(Point::zero(5), 5) == 1.0);
  const double phi_e1 = walk::hitting_probability(pt({1, 0, 0, 0, 0}), 5);
  // strong-Markov identity: Phi(e1) = 1 - gamma_d
  CHECK(phi_e1 == doctest::Approx(1.0 - kGamma5).epsilon(1e-10));
  CHECK(phi_e1 > 0.0);
  CHECK(phi_e1 <= 1.0);
  CHECK(walk::hitting_probability(pt({1, -2, 0}), 3) ==
        doctest::Approx(walk::hitting_probability(pt({-1, 2, 0}), 3))
            .epsilon(1e-13));
}

TEST_CASE("resolvent identities") {
  const int d = 3;
  const double theta = 0.5;
  // g_theta(O) <= 1/theta and g_0(O) = green(O)
  CHECK(walk::resolvent(theta, Point::zero(d), d) < 1.0 / theta);
  CHECK(walk::resolvent(0.0, Point::zero(d), d) ==
        doctest::Approx(kGreenO_d3).epsilon(1e-12));
  CHECK_THROWS_AS(walk::resolvent(0.0, Point::zero(2), 2), std::domain_error);

  // theta * sum_x g_theta(x) = 1 (geometric tail below 1e-9 at this radius)
  double total = 0;
  std::unordered_map<Point, double, lattice::PointHash> cache;
  lattice::for_each_canonical_l1(d, 24, [&](const Point& p) {
    const double v = walk::resolvent(theta, p, d);
    cache.emplace(p, v);
    total += lattice::orbit_size(p) * v;
  });
  CHECK(theta * total == doctest::Approx(1.0).epsilon(1e-6));

  // resolvent equation: theta g - L g = 1_{x=O}, residual <= 1e-8
  auto g = [&](const Point& p) {
    const Point c = lattice::canonical(p);
    auto it = cache.find(c);
    if (it != cache.end()) return it->second;
    const double v = walk::resolvent(theta, c, d);
    cache.emplace(c, v);
    return v;
  };
  for (const Point& p : lattice::l1_ball(d, 4)) {
    double lap = 0;
    for (int axis = 0; axis < d; ++axis) {
      for (int s : {-1, 1}) {
        Point q = p;
        q.c[axis] += s;
        lap += g(q) - g(p);
      }
    }
    const double lhs = theta * g(p) - lap / (2.0 * d);
    const double rhs = (l1_norm(p) == 0) ? 1.0 : 0.0;
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("supercriticality constant") {
  CHECK(walk::h_constant(5, 1.0) == doctest::Approx(kH_d5_l1).epsilon(1e-10));
  // vanishes at the threshold
  const double lc = walk::lambda_critical(5);
  CHECK(walk::h_constant(5, lc) == doctest::Approx(0.0).epsilon(1e-12));
  // lambda -> inf limit is 2 gamma - 1
  CHECK(walk::h_constant(5, 1e6) ==
        doctest::Approx(2 * kGamma5 - 1).epsilon(1e-4));
  CHECK(walk::h_constant(5, 1.0) > 0);
  CHECK(walk::supercritical(5, 1.0));
  CHECK_FALSE(walk::supercritical(5, 0.05));
}

TEST_CASE("epstein zeta") {
  CHECK(walk::epstein_zeta(1, 6) == doctest::Approx(kZ1_6).epsilon(1e-13));
  CHECK(walk::epstein_zeta(5, 6) == doctest::Approx(kZ5_6).epsilon(1e-12));
  CHECK_THROWS_AS(walk::epstein_zeta(5, 4.5), std::domain_error);
}

TEST_CASE("s-weighted return integral") {
  CHECK(walk::s_weighted_return_integral(5) ==
        doctest::Approx(kSWeighted_d5).epsilon(1e-9));
  CHECK(walk::s_weighted_return_integral(6) ==
        doctest::Approx(kSWeighted_d6).epsilon(1e-9));
  CHECK_THROWS_AS(walk::s_weighted_return_integral(4), std::domain_error);
}

TEST_CASE("far-field green matches quadrature in the overlap zone") {
  for (int d : {5, 6}) {
    for (auto xs : {std::initializer_list<int>{40, 0, 0, 0, 0, 0},
                    {30, 20, 10, 5, 1, 2},
                    {25, 25, 25, 0, 0, 1}}) {
      Point x = Point::zero(d);
      int i = 0;
      for (int c : xs) {
        if (i < d) x.c[i++] = c;
      }
      const double gq = walk::green_function(x, d);
      const double gf = walk::green_far(x, d);
      CHECK(gf == doctest::Approx(gq).epsilon(2e-5));
    }
  }
}

TEST_CASE("variance-rate constant: dual route agreement") {
  // quadrature route vs lattice-sum route, relative 1e-6
  const double a5 = walk::clt_constant(5, 1.0);
  const double b5 = walk::clt_constant_lattice(5, 1.0);
  CHECK(a5 == doctest::Approx(kC1_d5_l1).epsilon(1e-8));
  CHECK(std::abs(a5 - b5) / a5 <= 1e-6);

  const double a6 = walk::clt_constant(6, 2.0);
  const double b6 = walk::clt_constant_lattice(6, 2.0);
  CHECK(a6 == doctest::Approx(kC1_d6_l2).epsilon(1e-8));
  CHECK(std::abs(a6 - b6) / a6 <= 1e-6);

  // C1 * h does not depend on lambda
  const double p1 = walk::clt_constant(5, 1.0) * walk::h_constant(5, 1.0);
  const double p2 = walk::clt_constant(5, 5.0) * walk::h_constant(5, 5.0);
  CHECK(std::abs(p1 - p2) <= 1e-10 * std::abs(p1));

  CHECK_THROWS_AS(walk::clt_constant(4, 1.0), std::domain_error);
  CHECK_THROWS_AS(walk::clt_constant(5, 0.05), std::domain_error);
}

TEST_CASE("monte carlo oracles at reduced scale") {
  // quick cross-checks; full-scale versions live in the acceptance suite
  const auto esc = mc_walk::escape_probability(3, 4000, 200000, 99);
  CHECK(std::abs(esc.value - kGamma3) <=
        3.0 * esc.std_err + esc.bias_bound);
  const auto hit =
      mc_walk::hitting_probability(pt({1, 0, 0, 0, 0}), 5, 4000, 20000, 7);
  CHECK(std::abs(hit.value - (1.0 - kGamma5)) <=
        3.0 * hit.std_err + hit.bias_bound);
  const auto gv = mc_walk::green_visits(5, 3000, 20000, 5);
  CHECK(std::abs(gv.value - 1.0 / kGamma5) <= 3.0 * gv.std_err + gv.bias_bound);
}

TEST_CASE("tables bundle") {
  const auto t = walk::build_tables(5, 1.0, 0.05, 3);
  CHECK(t.points.size() == 231);
  CHECK(t.gamma_d == doctest::Approx(kGamma5).epsilon(1e-10));
  CHECK(t.h == doctest::Approx(kH_d5_l1).epsilon(1e-10));
  CHECK(t.c1 == doctest::Approx(kC1_d5_l1).epsilon(1e-8));
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    CHECK(t.phi[i] >= 0.0);
    CHECK(t.phi[i] <= 1.0);
    CHECK(t.g_theta[i] <= t.green[i] + 1e-14);
    CHECK(t.g_theta[i] <= 1.0 / 0.05);
    if (l1_norm(t.points[i]) == 0) CHECK(t.phi[i] == 1.0);
  }
}
