#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/params.hpp"

// Two-particle moment kernels. Second moments from the all-ones start solve
// d/dt m = (H - 2I) m for a weighted walk H on ordered site pairs; the
// series e^{-2t} sum t^n/n! H^n is evaluated by iterated sparse products.
//
// H depends on a pair only through the component difference and its
// increment, so fiber sums over {y - z = w} follow an autonomous walk on
// Z^d (or on the torus). That projected kernel evaluates second moments at
// box radii where the full pair table would not fit in memory; the pair
// kernel itself is kept for small boxes and structural checks.

namespace nbcpp::pairs {

using lattice::Point;

// ---- full pair-space kernel ------------------------------------------------

struct PairKernel {
  int d = 0;
  double lambda = 0;
  int box_radius = 0;
  std::vector<Point> comp;  // component ball, index order fixed
  std::unordered_map<Point, int, lattice::PointHash> comp_index;
  // CSR over pair indices p = iy * comp.size() + iz
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col_y, col_z;  // column split to save memory
  std::vector<double> val;
  std::vector<double> row_loss;  // H-mass of moves leaving the box
  double row_max = 0;            // max row sum including lost mass

  std::int64_t n_pairs() const {
    return static_cast<std::int64_t>(comp.size()) * comp.size();
  }
  std::int64_t pair_index(int iy, int iz) const {
    return static_cast<std::int64_t>(iy) * comp.size() + iz;
  }
  int deg(bool diagonal) const { return diagonal ? 6 * d + 1 : 4 * d; }
  // importance weight Theta = H * deg / 2 for a move out of a pair
  double theta(bool from_diagonal, double h_entry) const {
    return h_entry * deg(from_diagonal) / 2.0;
  }
};

PairKernel build_pair_kernel(int d, double lambda, int box_radius,
                             std::int64_t max_pairs = 40'000'000);

struct SeriesOptions {
  double tol = 1e-8;
  int n_max_cap = 10000;
};

struct QhatTable {
  std::vector<double> value;  // dense over pair indices
  double tail_bound = 0;      // certified series truncation
  double escape_bound = 0;    // certified out-of-box loss
  int n_used = 0;
};

// q-hat row from the diagonal source pair (w, w)
QhatTable qhat_series(const PairKernel& k, const Point& w, double t,
                      const SeriesOptions& opt = {});

// ---- difference-projected kernel -------------------------------------------

struct DiffKernel {
  int d = 0;
  double lambda = 0;
  int radius = 0;   // l1 truncation; 0 with torus_L > 0 means torus wrap
  int torus_L = 0;  // when > 0, the walk lives on the torus
  std::vector<Point> points;
  std::unordered_map<Point, int, lattice::PointHash> index;
  std::vector<std::int32_t> nbr;        // 2d entries per state, -1 = out
  std::vector<std::uint8_t> lost_dirs;  // # moves leaving the box
  int origin = 0;
  double diag_extra = 0;  // additional weight of the 0 -> 0 move
  double row_max = 0;

  // out = scale * (v H~); reports the l1 mass leaving the box
  void apply(const std::vector<double>& v, std::vector<double>& out,
             double scale, double& lost) const;
};

DiffKernel build_diff_kernel(int d, double lambda, int radius);
DiffKernel build_diff_kernel_torus(const ModelParams& par);

struct SecondMoment {
  double value = 0;        // E_1[eta_t(O) eta_t(x)]
  double tail_bound = 0;   // series truncation
  double escape_bound = 0; // box truncation (zero on the torus)
  int n_used = 0;
};

// E_1[eta_t(O) eta_t(x)] = total series mass from source difference x
SecondMoment second_moment(const DiffKernel& k, const Point& x, double t,
                           const SeriesOptions& opt = {});

// full fiber table q_t(x, .) (difference-indexed) plus diagnostics
struct QTable {
  std::vector<double> value;  // over k.points
  double tail_bound = 0;
  double escape_bound = 0;
  int n_used = 0;
};
QTable q_series(const DiffKernel& k, const Point& x, double t,
                const SeriesOptions& opt = {});

}  // namespace nbcpp::pairs
