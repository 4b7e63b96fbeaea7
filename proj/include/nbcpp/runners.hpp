#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbcpp/lattice.hpp"

// Subcommand drivers. Each validates its configuration, creates the output
// directory (with an INCOMPLETE marker while running), writes the payloads
// named in the interface plus the resolved configuration, and finalizes.
// Payload bytes depend only on the configuration and seed, never on the
// worker count.

namespace nbcpp::run {

struct RwConfig {
  int d = 5;
  double lambda = 1.0;
  double theta = 0.1;
  int radius = 4;
  double tol = 1e-10;
  std::string out = "rw_out";
};
void run_rw(const RwConfig& cfg);

struct SimulateConfig {
  int d = 5;
  double lambda = 1.0;
  int L = 15;
  double t_end = 20.0;
  std::vector<double> obs_times;  // defaults to {t_end}
  int replicas = 100;
  std::uint64_t seed = 1;
  std::string init = "ones";  // or "equilibrium"
  double burn_in = 25.0;
  std::vector<lattice::Point> observe;  // defaults to the origin
  int threads = 0;
  std::string out = "simulate_out";
  bool write_trajectories = true;
};
void run_simulate(const SimulateConfig& cfg);

struct MomentsConfig {
  int d = 5;
  double lambda = 1.0;
  double t = 1.0;
  int box_radius = 8;
  lattice::Point x;  // target offset, default origin
  int qhat_radius = 2;
  std::string out = "moments_out";
};
void run_moments(const MomentsConfig& cfg);

struct CltConfig {
  int d = 5;
  double lambda = 1.0;
  int L = 15;
  double scaling_n = 400;
  std::vector<double> times = {0.5, 1.0};
  int replicas = 2000;
  std::uint64_t seed = 1;
  double burn_in = 25.0;
  int threads = 0;
  std::string out = "clt_out";
};
void run_clt(const CltConfig& cfg);

}  // namespace nbcpp::run
