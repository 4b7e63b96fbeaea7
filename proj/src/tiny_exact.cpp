#include "nbcpp/tiny_exact.hpp"

#include <cmath>
#include <stdexcept>

#include "nbcpp/lattice.hpp"

namespace nbcpp::oracle {

namespace {

using Mat = std::vector<double>;

Mat mul(const Mat& a, const Mat& b, int n) {
  Mat c(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double aik = a[i * n + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  return c;
}

Mat add_scaled_identity(Mat m, double s, int n) {
  for (int i = 0; i < n; ++i) m[i * n + i] += s;
  return m;
}

// solve A X = B in place (partial pivoting); returns X
Mat solve(Mat a, Mat b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (a[piv * n + col] == 0.0) throw std::runtime_error("expm: singular");
    if (piv != col) {
      for (int j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(b[piv * n + j], b[col * n + j]);
      }
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      for (int j = 0; j < n; ++j) b[r * n + j] -= f * b[col * n + j];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const double inv = 1.0 / a[col * n + col];
    for (int j = 0; j < n; ++j) {
      double s = b[col * n + j];
      for (int r = col + 1; r < n; ++r) s -= a[col * n + r] * b[r * n + j];
      b[col * n + j] = s * inv;
    }
  }
  return b;
}

double norm1(const Mat& a, int n) {
  double best = 0;
  for (int j = 0; j < n; ++j) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::abs(a[i * n + j]);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

std::vector<double> expm(const std::vector<double>& a_in, int n) {
  constexpr double kTheta13 = 5.371920351148152;
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  Mat a = a_in;
  int squarings = 0;
  const double nrm = norm1(a, n);
  if (nrm > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / kTheta13)));
    const double f = std::ldexp(1.0, -squarings);
    for (double& v : a) v *= f;
  }

  const Mat a2 = mul(a, a, n);
  const Mat a4 = mul(a2, a2, n);
  const Mat a6 = mul(a2, a4, n);
  const std::size_t nn = static_cast<std::size_t>(n) * n;

  Mat w1(nn), w2(nn), z1(nn), z2(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    w1[i] = b[13] * a6[i] + b[11] * a4[i] + b[9] * a2[i];
    w2[i] = b[7] * a6[i] + b[5] * a4[i] + b[3] * a2[i];
    z1[i] = b[12] * a6[i] + b[10] * a4[i] + b[8] * a2[i];
    z2[i] = b[6] * a6[i] + b[4] * a4[i] + b[2] * a2[i];
  }
  w2 = add_scaled_identity(std::move(w2), b[1], n);
  z2 = add_scaled_identity(std::move(z2), b[0], n);

  Mat w = mul(a6, w1, n);
  for (std::size_t i = 0; i < nn; ++i) w[i] += w2[i];
  const Mat u = mul(a, w, n);
  Mat v = mul(a6, z1, n);
  for (std::size_t i = 0; i < nn; ++i) v[i] += z2[i];

  Mat num(nn), den(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    num[i] = v[i] + u[i];
    den[i] = v[i] - u[i];
  }
  Mat r = solve(std::move(den), std::move(num), n);
  for (int s = 0; s < squarings; ++s) r = mul(r, r, n);
  return r;
}

TinyMoments tiny_torus_moments(const ModelParams& par, double t) {
  const auto bad = par.validate();
  if (!bad.empty()) throw std::invalid_argument("params: " + bad.front());
  lattice::Torus geom(par.d, par.L);
  const std::int64_t ns = geom.n_sites;
  if (ns > 16) throw std::length_error("tiny oracle: needs L^d <= 16 sites");
  const int n = static_cast<int>(ns);
  const double wmove = 1.0 / (2.0 * par.d);
  const double wself = 1.0 / (2.0 * par.d * par.lambda);

  // first moments: d/dt E = L E (walk generator, row-stochastic rates)
  Mat a1(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    a1[i * n + i] = -1.0;
    for (int axis = 0; axis < par.d; ++axis)
      for (int s : {-1, 1})
        a1[i * n + geom.neighbor(i, axis, s)] += wmove;
  }

  // second moments: d/dt m = (H - 2 I) m on ordered site pairs
  const int np = n * n;
  Mat a2(static_cast<std::size_t>(np) * np, 0.0);
  auto pidx = [n](int a, int bidx) { return a * n + bidx; };
  for (int ia = 0; ia < n; ++ia) {
    for (int ib = 0; ib < n; ++ib) {
      const int row = pidx(ia, ib);
      a2[static_cast<std::size_t>(row) * np + row] -= 2.0;
      if (ia != ib) {
        for (int axis = 0; axis < par.d; ++axis)
          for (int s : {-1, 1}) {
            const int u = static_cast<int>(geom.neighbor(ia, axis, s));
            const int v = static_cast<int>(geom.neighbor(ib, axis, s));
            a2[static_cast<std::size_t>(row) * np + pidx(u, ib)] += wmove;
            a2[static_cast<std::size_t>(row) * np + pidx(ia, v)] += wmove;
          }
      } else {
        a2[static_cast<std::size_t>(row) * np + row] += wself;
        for (int axis = 0; axis < par.d; ++axis)
          for (int s : {-1, 1}) {
            const int u = static_cast<int>(geom.neighbor(ia, axis, s));
            a2[static_cast<std::size_t>(row) * np + pidx(u, u)] += wmove;
            a2[static_cast<std::size_t>(row) * np + pidx(u, ia)] += wmove;
            a2[static_cast<std::size_t>(row) * np + pidx(ia, u)] += wmove;
          }
      }
    }
  }

  for (double& v : a1) v *= t;
  for (double& v : a2) v *= t;
  const Mat e1t = expm(a1, n);
  const Mat e2t = expm(a2, np);

  TinyMoments out;
  out.n_sites = ns;
  out.first.assign(n, 0.0);
  out.second.assign(np, 0.0);
  // all-ones start: sum rows
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += e1t[i * n + j];
    out.first[i] = s;
  }
  for (int p = 0; p < np; ++p) {
    double s = 0;
    for (int q = 0; q < np; ++q) s += e2t[static_cast<std::size_t>(p) * np + q];
    out.second[p] = s;
  }
  return out;
}

}  // namespace nbcpp::oracle
