#include <doctest.h>

#include "nbcpp/lattice.hpp"

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

TEST_CASE("canonical form sorts absolute coordinates") {
  const Point p = lattice::canonical(pt({-3, 0, 2}));
  CHECK(p == pt({3, 2, 0}));
}

TEST_CASE("orbit sizes") {
  CHECK(lattice::orbit_size(pt({0, 0, 0})) == 1.0);
  CHECK(lattice::orbit_size(pt({1, 0, 0})) == 6.0);       // 2 * 3
  CHECK(lattice::orbit_size(pt({1, 1, 0})) == 12.0);      // 4 * 3
  CHECK(lattice::orbit_size(pt({2, 1, 0})) == 24.0);      // 4 * 6
  CHECK(lattice::orbit_size(pt({1, 1, 1})) == 8.0);
}

TEST_CASE("canonical enumeration covers the l1 ball exactly") {
  // |B_r| in Z^d via orbit sums must match the direct count
  for (int d : {1, 2, 3, 5}) {
    for (int r : {0, 1, 3, 6}) {
      double total = 0;
      lattice::for_each_canonical_l1(d, r, [&](const Point& p) {
        total += lattice::orbit_size(p);
      });
      CHECK(total == doctest::Approx(static_cast<double>(
                         lattice::l1_ball(d, r).size())));
    }
  }
  // d=5, r=3 ball has 231 points (the covariance offsets used downstream)
  CHECK(lattice::l1_ball(5, 3).size() == 231);
}

TEST_CASE("torus indexing round-trips and wraps") {
  lattice::Torus t(3, 5);
  CHECK(t.n_sites == 125);
  for (std::int64_t s : {0ll, 7ll, 124ll, 60ll}) {
    CHECK(t.index(t.coords(s)) == s);
  }
  // neighbor wrap on axis 0
  const std::int64_t edge = t.index(pt({4, 2, 3}));
  CHECK(t.neighbor(edge, 0, +1) == t.index(pt({0, 2, 3})));
  CHECK(t.neighbor(edge, 0, -1) == t.index(pt({3, 2, 3})));
  const std::int64_t zero = t.index(pt({0, 0, 0}));
  CHECK(t.neighbor(zero, 2, -1) == t.index(pt({0, 0, 4})));
}
