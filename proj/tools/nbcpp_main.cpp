#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "nbcpp/lattice.hpp"
#include "nbcpp/runners.hpp"
#include "nbcpp/version.hpp"

namespace {

nbcpp::lattice::Point parse_point(const std::string& s, int d) {
  nbcpp::lattice::Point p = nbcpp::lattice::Point::zero(d);
  int i = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma - pos);
    if (i >= d) throw CLI::ValidationError("observe", "too many coordinates");
    p.c[i++] = std::stoi(tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (i != d)
    throw CLI::ValidationError("observe",
                               "expected " + std::to_string(d) + " coordinates");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized binary contact path process laboratory"};
  app.set_version_flag("--version", nbcpp::kVersion);
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.allow_config_extras(false);
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  app.add_option("--seed", seed, "master seed")->capture_default_str();
  app.add_option("--threads", threads,
                 "worker threads (0: NBCPP_THREADS or hardware)")
      ->capture_default_str();
  app.add_option("--out", out, "output directory");

  // rw
  auto* rw = app.add_subcommand("rw", "random-walk tables and constants");
  rw->fallthrough();
  nbcpp::run::RwConfig rwc;
  rw->add_option("--d", rwc.d, "lattice dimension")->capture_default_str();
  rw->add_option("--lambda", rwc.lambda, "infection rate")
      ->capture_default_str();
  rw->add_option("--theta", rwc.theta, "resolvent damping")
      ->capture_default_str();
  rw->add_option("--radius", rwc.radius, "table radius (l1 ball)")
      ->capture_default_str();
  rw->add_option("--tol", rwc.tol, "quadrature tolerance")
      ->capture_default_str();

  // simulate
  auto* si = app.add_subcommand("simulate", "field simulation and moments");
  si->fallthrough();
  nbcpp::run::SimulateConfig sic;
  std::vector<std::string> observe_raw;
  si->add_option("--d", sic.d)->capture_default_str();
  si->add_option("--lambda", sic.lambda)->capture_default_str();
  si->add_option("--L", sic.L, "torus side")->capture_default_str();
  si->add_option("--t-end", sic.t_end)->capture_default_str();
  si->add_option("--obs-times", sic.obs_times,
                 "snapshot times (default: t-end)");
  si->add_option("--replicas", sic.replicas)->capture_default_str();
  si->add_option("--init", sic.init, "ones | equilibrium")
      ->capture_default_str();
  si->add_option("--burn-in", sic.burn_in)->capture_default_str();
  si->add_option("--observe", observe_raw,
                 "site to record, comma-separated coordinates (repeatable)");
  si->add_flag("!--no-trajectories", sic.write_trajectories,
               "skip per-replica trajectory files");

  // moments
  auto* mo = app.add_subcommand("moments", "series moment kernels");
  mo->fallthrough();
  nbcpp::run::MomentsConfig moc;
  std::string x_raw;
  mo->add_option("--d", moc.d)->capture_default_str();
  mo->add_option("--lambda", moc.lambda)->capture_default_str();
  mo->add_option("--t", moc.t)->capture_default_str();
  mo->add_option("--box-radius", moc.box_radius)->capture_default_str();
  mo->add_option("--qhat-radius", moc.qhat_radius,
                 "pair-table radius for qhat.csv")
      ->capture_default_str();
  mo->add_option("--x", x_raw, "target offset, comma-separated coordinates");

  // clt
  auto* cl = app.add_subcommand("clt", "occupation-time scaling analysis");
  cl->fallthrough();
  nbcpp::run::CltConfig clc;
  cl->add_option("--d", clc.d)->capture_default_str();
  cl->add_option("--lambda", clc.lambda)->capture_default_str();
  cl->add_option("--L", clc.L)->capture_default_str();
  cl->add_option("--N", clc.scaling_n, "scaling parameter")
      ->capture_default_str();
  cl->add_option("--times", clc.times, "grid, e.g. 0.5 1.0")
      ->capture_default_str();
  cl->add_option("--replicas", clc.replicas)->capture_default_str();
  cl->add_option("--burn-in", clc.burn_in)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (rw->parsed()) {
      if (!out.empty()) rwc.out = out;
      nbcpp::run::run_rw(rwc);
    } else if (si->parsed()) {
      if (!out.empty()) sic.out = out;
      sic.seed = seed;
      sic.threads = threads;
      sic.observe.clear();
      for (const auto& s : observe_raw)
        sic.observe.push_back(parse_point(s, sic.d));
      nbcpp::run::run_simulate(sic);
    } else if (mo->parsed()) {
      if (!out.empty()) moc.out = out;
      if (!x_raw.empty()) moc.x = parse_point(x_raw, moc.d);
      nbcpp::run::run_moments(moc);
    } else if (cl->parsed()) {
      if (!out.empty()) clc.out = out;
      clc.seed = seed;
      clc.threads = threads;
      nbcpp::run::run_clt(clc);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::length_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
