#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

// Z^d lattice points (d <= 6), hypercubic symmetry helpers, and finite torus
// geometry. Symmetric functions of a point are evaluated on the canonical
// representative (coordinates |x_i| sorted descending) and weighted by the
// orbit size, which shrinks d=5 ball sums by a factor ~2^d d!.

namespace nbcpp::lattice {

inline constexpr int kMaxDim = 6;

struct Point {
  std::array<int, kMaxDim> c{};
  int d = 0;

  static Point zero(int d) {
    Point p;
    p.d = d;
    return p;
  }
  static Point unit(int d, int axis, int sign = 1) {
    Point p = zero(d);
    p.c[axis] = sign;
    return p;
  }
  int& operator[](int i) { return c[i]; }
  int operator[](int i) const { return c[i]; }
  bool operator==(const Point& o) const {
    if (d != o.d) return false;
    for (int i = 0; i < d; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  Point operator-() const {
    Point p = *this;
    for (int i = 0; i < d; ++i) p.c[i] = -c[i];
    return p;
  }
};

inline int l1_norm(const Point& p) {
  int s = 0;
  for (int i = 0; i < p.d; ++i) s += std::abs(p.c[i]);
  return s;
}

inline long long l2_sq(const Point& p) {
  long long s = 0;
  for (int i = 0; i < p.d; ++i) s += 1ll * p.c[i] * p.c[i];
  return s;
}

// |coords| sorted descending
inline Point canonical(const Point& p) {
  Point q = p;
  for (int i = 0; i < q.d; ++i) q.c[i] = std::abs(q.c[i]);
  std::sort(q.c.begin(), q.c.begin() + q.d, std::greater<int>());
  return q;
}

// orbit size of a canonical point under coordinate permutations and sign flips
inline double orbit_size(const Point& canon) {
  static const double fact[] = {1, 1, 2, 6, 24, 120, 720};
  double m = fact[canon.d];
  int i = 0;
  while (i < canon.d) {
    int j = i;
    while (j < canon.d && canon.c[j] == canon.c[i]) ++j;
    m /= fact[j - i];
    if (canon.c[i] != 0) {
      for (int k = i; k < j; ++k) m *= 2.0;
    }
    i = j;
  }
  return m;
}

// all canonical points with c[0] >= c[1] >= ... >= 0 and c[0] <= max_coord
template <class F>
void for_each_canonical_box(int d, int max_coord, F&& f) {
  Point p = Point::zero(d);
  std::function<void(int, int)> rec = [&](int axis, int hi) {
    if (axis == d) {
      f(static_cast<const Point&>(p));
      return;
    }
    for (int v = hi; v >= 0; --v) {
      p.c[axis] = v;
      rec(axis + 1, v);
    }
  };
  rec(0, max_coord);
}

// all canonical points with l2 norm <= r
template <class F>
void for_each_canonical_l2(int d, double r, F&& f) {
  const long long r2 = static_cast<long long>(r * r + 1e-9);
  Point p = Point::zero(d);
  std::function<void(int, int, long long)> rec = [&](int axis, int hi,
                                                     long long left) {
    if (axis == d) {
      f(static_cast<const Point&>(p));
      return;
    }
    int top = static_cast<int>(std::sqrt(static_cast<double>(left)));
    while (1ll * top * top > left) --top;
    top = std::min(top, hi);
    for (int v = top; v >= 0; --v) {
      p.c[axis] = v;
      rec(axis + 1, v, left - 1ll * v * v);
    }
  };
  rec(0, static_cast<int>(r), r2);
}

// all canonical points with l1 norm <= r
template <class F>
void for_each_canonical_l1(int d, int r, F&& f) {
  Point p = Point::zero(d);
  std::function<void(int, int, int)> rec = [&](int axis, int hi, int budget) {
    if (axis == d) {
      f(static_cast<const Point&>(p));
      return;
    }
    const int top = std::min(hi, budget);
    for (int v = top; v >= 0; --v) {
      p.c[axis] = v;
      rec(axis + 1, v, budget - v);
    }
  };
  rec(0, r, r);
}

// dense enumeration of the full l1 ball (all orbits unfolded), fixed order
inline std::vector<Point> l1_ball(int d, int r) {
  std::vector<Point> pts;
  Point p = Point::zero(d);
  std::function<void(int, int)> rec = [&](int axis, int budget) {
    if (axis == d) {
      pts.push_back(p);
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      p.c[axis] = v;
      rec(axis + 1, budget - std::abs(v));
    }
  };
  rec(0, r);
  return pts;
}

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < p.d; ++i) {
      h ^= static_cast<std::uint32_t>(p.c[i] + (1 << 20));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Periodic box [0, L)^d with sites in row-major order.
struct Torus {
  int d = 0;
  int L = 0;
  std::int64_t n_sites = 0;
  std::array<std::int64_t, kMaxDim> stride{};

  Torus() = default;
  Torus(int d_, int L_) : d(d_), L(L_) {
    if (d < 1 || d > kMaxDim || L < 3)
      throw std::invalid_argument("torus: need 1 <= d <= 6 and L >= 3");
    n_sites = 1;
    for (int i = 0; i < d; ++i) {
      stride[i] = n_sites;
      n_sites *= L;
    }
  }

  std::int64_t index(const Point& p) const {
    std::int64_t s = 0;
    for (int i = 0; i < d; ++i) {
      int v = p.c[i] % L;
      if (v < 0) v += L;
      s += stride[i] * v;
    }
    return s;
  }

  Point coords(std::int64_t site) const {
    Point p = Point::zero(d);
    for (int i = 0; i < d; ++i) {
      p.c[i] = static_cast<int>(site % L);
      site /= L;
    }
    return p;
  }

  // site shifted by +-1 along an axis
  std::int64_t neighbor(std::int64_t site, int axis, int dir) const {
    const std::int64_t s = stride[axis];
    const int v = static_cast<int>((site / s) % L);
    if (dir > 0) return v == L - 1 ? site - s * (L - 1) : site + s;
    return v == 0 ? site + s * (L - 1) : site - s;
  }
};

}  // namespace nbcpp::lattice
