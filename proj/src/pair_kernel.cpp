#include "nbcpp/pair_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace nbcpp::pairs {

namespace {

// e^{-2t} sum_{n > n_used} (t rho)^n / n!, the certified series tail
double poisson_tail(double t, double rho, int n_used) {
  const double mu = t * rho;
  if (mu - 2.0 * t > 600.0)
    throw std::runtime_error("series: tail bound overflows, reduce t");
  double term = std::exp(-2.0 * t);
  double partial = term;  // n = 0
  for (int n = 1; n <= n_used; ++n) {
    term *= mu / n;
    partial += term;
  }
  // remaining mass of the weighted exponential series
  const double total = std::exp(mu - 2.0 * t);
  return std::max(0.0, total - partial);
}

int default_n_max(double t, double rho, int cap) {
  const double m = 2.0 * t * rho;
  const int n = static_cast<int>(std::ceil(m) + 40.0 * std::sqrt(m) + 20.0);
  return std::min(n, cap);
}

// The iterated vector is kept normalized by rho^n (else it overflows for
// large t); the coefficient absorbs the scale: chat_n = e^{-2t} (t rho)^n/n!.
struct SeriesAccum {
  double coeff;
  double mu;  // t * rho
  int n = 0;
  SeriesAccum(double t_, double rho) : coeff(std::exp(-2.0 * t_)), mu(t_ * rho) {}
  void step() {
    ++n;
    coeff *= mu / n;
  }
};

}  // namespace

PairKernel build_pair_kernel(int d, double lambda, int box_radius,
                             std::int64_t max_pairs) {
  if (box_radius < 1) throw std::invalid_argument("pair kernel: radius >= 1");
  if (!(lambda > 0)) throw std::invalid_argument("pair kernel: lambda > 0");
  PairKernel k;
  k.d = d;
  k.lambda = lambda;
  k.box_radius = box_radius;
  k.comp = lattice::l1_ball(d, box_radius);
  const std::int64_t nb = static_cast<std::int64_t>(k.comp.size());
  if (nb * nb > max_pairs) {
    // suggest the largest radius whose pair count fits
    int r = box_radius;
    while (r > 1) {
      --r;
      const std::int64_t m =
          static_cast<std::int64_t>(lattice::l1_ball(d, r).size());
      if (m * m <= max_pairs) break;
    }
    throw std::length_error(
        "pair kernel: box too large for the memory budget; try radius <= " +
        std::to_string(r));
  }
  for (std::int64_t i = 0; i < nb; ++i)
    k.comp_index.emplace(k.comp[i], static_cast<int>(i));

  const double wmove = 1.0 / (2.0 * d);
  const double wself = 1.0 / (2.0 * d * lambda);
  k.row_ptr.reserve(nb * nb + 1);
  k.row_ptr.push_back(0);

  auto find = [&](const Point& p) {
    auto it = k.comp_index.find(p);
    return it == k.comp_index.end() ? -1 : it->second;
  };

  for (std::int64_t iy = 0; iy < nb; ++iy) {
    for (std::int64_t iz = 0; iz < nb; ++iz) {
      const Point& y = k.comp[iy];
      const Point& z = k.comp[iz];
      double lost = 0;
      double row_sum = 0;
      auto emit = [&](int jy, int jz, double v) {
        row_sum += v;
        if (jy < 0 || jz < 0) {
          lost += v;
          return;
        }
        k.col_y.push_back(jy);
        k.col_z.push_back(jz);
        k.val.push_back(v);
      };
      if (iy != iz) {
        for (int axis = 0; axis < d; ++axis) {
          for (int s : {-1, 1}) {
            Point u = y;
            u.c[axis] += s;
            emit(find(u), static_cast<int>(iz), wmove);
            Point v = z;
            v.c[axis] += s;
            emit(static_cast<int>(iy), find(v), wmove);
          }
        }
      } else {
        emit(static_cast<int>(iy), static_cast<int>(iz), wself);
        for (int axis = 0; axis < d; ++axis) {
          for (int s : {-1, 1}) {
            Point u = y;
            u.c[axis] += s;
            const int ju = find(u);
            emit(ju, ju, wmove);          // both move together
            emit(ju, static_cast<int>(iz), wmove);  // first moves
            emit(static_cast<int>(iy), ju, wmove);  // second moves
          }
        }
      }
      k.row_loss.push_back(lost);
      k.row_ptr.push_back(static_cast<std::int64_t>(k.val.size()));
      if (row_sum > k.row_max) k.row_max = row_sum;
    }
  }
  return k;
}

QhatTable qhat_series(const PairKernel& k, const Point& w, double t,
                      const SeriesOptions& opt) {
  if (!(t >= 0)) throw std::domain_error("qhat: t >= 0");
  auto it = k.comp_index.find(w);
  if (it == k.comp_index.end())
    throw std::invalid_argument("qhat: source outside the box");
  const std::int64_t np = k.n_pairs();
  const std::int64_t src = k.pair_index(it->second, it->second);

  const int n_max = default_n_max(t, k.row_max, opt.n_max_cap);
  QhatTable out;
  out.value.assign(np, 0.0);
  std::vector<double> cur(np, 0.0), nxt(np, 0.0);
  cur[src] = 1.0;

  const double inv_rho = 1.0 / k.row_max;
  SeriesAccum acc(t, k.row_max);
  for (std::int64_t p = 0; p < np; ++p) out.value[p] = acc.coeff * cur[p];
  double escape = 0;

  const std::int64_t nb = static_cast<std::int64_t>(k.comp.size());
  int n = 0;
  while (n < n_max) {
    // v <- (v H) / rho (scatter by rows), tracking out-of-box loss
    std::fill(nxt.begin(), nxt.end(), 0.0);
    double lost = 0;
    for (std::int64_t p = 0; p < np; ++p) {
      const double vp = cur[p];
      if (vp == 0.0) continue;
      lost += vp * k.row_loss[p];
      for (std::int64_t e = k.row_ptr[p]; e < k.row_ptr[p + 1]; ++e) {
        nxt[k.col_y[e] * nb + k.col_z[e]] += vp * k.val[e];
      }
    }
    for (std::int64_t p = 0; p < np; ++p) nxt[p] *= inv_rho;
    cur.swap(nxt);
    acc.step();
    ++n;
    for (std::int64_t p = 0; p < np; ++p) out.value[p] += acc.coeff * cur[p];
    // normalized mass lost entering step n contributes to terms m >= n at
    // most lost * sum_{m>=n} e^{-2t} (t rho)^m / m!
    escape += lost * inv_rho * poisson_tail(t, k.row_max, n - 1);
    if (poisson_tail(t, k.row_max, n) < opt.tol) break;
  }
  out.n_used = n;
  out.tail_bound = poisson_tail(t, k.row_max, n);
  if (out.tail_bound >= opt.tol && n >= opt.n_max_cap)
    throw std::runtime_error("qhat: certified tail not within tolerance");
  out.escape_bound = escape;
  return out;
}

// ---- difference kernel ------------------------------------------------------

void DiffKernel::apply(const std::vector<double>& v, std::vector<double>& out,
                       double scale, double& lost) const {
  const std::size_t n = points.size();
  const double wmove = scale / d;
  out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    const std::int32_t* row = &nbr[i * 2 * d];
    for (int e = 0; e < 2 * d; ++e) {
      const std::int32_t j = row[e];
      if (j >= 0) s += v[j];
    }
    out[i] = s * wmove;
  }
  out[origin] += scale * diag_extra * v[origin];
  double l = 0;
  if (radius > 0) {
    for (std::size_t i = 0; i < n; ++i)
      if (lost_dirs[i]) l += v[i] * lost_dirs[i];
    l *= wmove;
  }
  lost = l;
}

namespace {
DiffKernel finish_diff(DiffKernel k) {
  k.diag_extra = 1.0 + 1.0 / (2.0 * k.d * k.lambda);
  k.row_max = 3.0 + 1.0 / (2.0 * k.d * k.lambda);
  return k;
}
}  // namespace

DiffKernel build_diff_kernel(int d, double lambda, int radius) {
  if (radius < 1) throw std::invalid_argument("diff kernel: radius >= 1");
  DiffKernel k;
  k.d = d;
  k.lambda = lambda;
  k.radius = radius;
  k.points = lattice::l1_ball(d, radius);
  const int n = static_cast<int>(k.points.size());
  for (int i = 0; i < n; ++i) k.index.emplace(k.points[i], i);
  k.origin = k.index.at(Point::zero(d));
  k.nbr.resize(static_cast<std::size_t>(n) * 2 * d);
  k.lost_dirs.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int axis = 0; axis < d; ++axis) {
      for (int s = 0; s < 2; ++s) {
        Point q = k.points[i];
        q.c[axis] += s ? 1 : -1;
        auto it = k.index.find(q);
        const std::int32_t j = it == k.index.end() ? -1 : it->second;
        k.nbr[(static_cast<std::size_t>(i) * 2 + s) * d + axis] = j;
        if (j < 0) ++k.lost_dirs[i];
      }
    }
  }
  return finish_diff(std::move(k));
}

DiffKernel build_diff_kernel_torus(const ModelParams& par) {
  DiffKernel k;
  k.d = par.d;
  k.lambda = par.lambda;
  k.radius = 0;
  k.torus_L = par.L;
  lattice::Torus geom(par.d, par.L);
  const std::int64_t n = geom.n_sites;
  if (n > (1 << 24)) throw std::length_error("torus diff kernel too large");
  k.points.resize(n);
  for (std::int64_t i = 0; i < n; ++i) k.points[i] = geom.coords(i);
  k.origin = 0;
  k.nbr.resize(static_cast<std::size_t>(n) * 2 * par.d);
  k.lost_dirs.assign(n, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int axis = 0; axis < par.d; ++axis) {
      for (int s = 0; s < 2; ++s) {
        k.nbr[(static_cast<std::size_t>(i) * 2 + s) * par.d + axis] =
            static_cast<std::int32_t>(geom.neighbor(i, axis, s ? 1 : -1));
      }
    }
  }
  return finish_diff(std::move(k));
}

namespace {

QTable diff_series(const DiffKernel& k, const Point& x, double t,
                   const SeriesOptions& opt) {
  if (!(t >= 0)) throw std::domain_error("series: t >= 0");
  int src;
  if (k.torus_L > 0) {
    lattice::Torus geom(k.d, k.torus_L);
    src = static_cast<int>(geom.index(x));
  } else {
    auto it = k.index.find(x);
    if (it == k.index.end())
      throw std::invalid_argument("series: source outside the box");
    src = it->second;
  }
  const int n_max = default_n_max(t, k.row_max, opt.n_max_cap);
  const std::size_t np = k.points.size();
  QTable out;
  out.value.assign(np, 0.0);
  std::vector<double> cur(np, 0.0), nxt(np, 0.0);
  cur[src] = 1.0;

  const double inv_rho = 1.0 / k.row_max;
  SeriesAccum acc(t, k.row_max);
  out.value[src] = acc.coeff;
  double escape = 0;
  int n = 0;
  while (n < n_max) {
    double lost = 0;
    k.apply(cur, nxt, inv_rho, lost);
    cur.swap(nxt);
    acc.step();
    ++n;
    for (std::size_t i = 0; i < np; ++i) out.value[i] += acc.coeff * cur[i];
    if (lost > 0) escape += lost * poisson_tail(t, k.row_max, n - 1);
    if (poisson_tail(t, k.row_max, n) < opt.tol) break;
  }
  out.n_used = n;
  out.tail_bound = poisson_tail(t, k.row_max, n);
  if (out.tail_bound >= opt.tol && n >= opt.n_max_cap)
    throw std::runtime_error("series: certified tail not within tolerance");
  out.escape_bound = escape;
  return out;
}

}  // namespace

QTable q_series(const DiffKernel& k, const Point& x, double t,
                const SeriesOptions& opt) {
  return diff_series(k, x, t, opt);
}

SecondMoment second_moment(const DiffKernel& k, const Point& x, double t,
                           const SeriesOptions& opt) {
  const QTable q = diff_series(k, x, t, opt);
  SecondMoment m;
  for (double v : q.value) m.value += v;
  m.tail_bound = q.tail_bound;
  m.escape_bound = q.escape_bound;
  m.n_used = q.n_used;
  return m;
}

}  // namespace nbcpp::pairs
