#include "nbcpp/runners.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nbcpp/clt.hpp"
#include "nbcpp/io.hpp"
#include "nbcpp/moments_mc.hpp"
#include "nbcpp/pair_kernel.hpp"
#include "nbcpp/params.hpp"
#include "nbcpp/stats.hpp"
#include "nbcpp/version.hpp"
#include "nbcpp/walk.hpp"

namespace nbcpp::run {

namespace {

nlohmann::json base_config(const std::string& subcommand) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  return j;
}

nlohmann::json point_json(const lattice::Point& p) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < p.d; ++i) a.push_back(p.c[i]);
  return a;
}

void require(bool ok, const std::string& key_msg) {
  if (!ok) throw std::invalid_argument(key_msg);
}

}  // namespace

void run_rw(const RwConfig& cfg) {
  require(cfg.d >= 3 && cfg.d <= lattice::kMaxDim,
          "d: needs 3 <= d <= 6 (no Green function below d = 3)");
  require(cfg.lambda > 0, "lambda: must be > 0");
  require(cfg.theta >= 0, "theta: must be >= 0");
  require(cfg.radius >= 0 && cfg.radius <= 40, "radius: needs 0..40");
  require(cfg.tol > 0, "tol: must be > 0");

  nlohmann::json resolved = base_config("rw");
  resolved["d"] = cfg.d;
  resolved["lambda"] = cfg.lambda;
  resolved["theta"] = cfg.theta;
  resolved["radius"] = cfg.radius;
  resolved["tol"] = cfg.tol;
  io::OutputDir dir(cfg.out);
  dir.write_config(resolved, io::config_hash(resolved));

  const walk::RWTables t =
      walk::build_tables(cfg.d, cfg.lambda, cfg.theta, cfg.radius, cfg.tol);

  nlohmann::json j;
  j["gamma_d"] = t.gamma_d;
  j["h"] = t.h;
  j["lambda_critical"] = t.lambda_crit;
  j["supercritical"] = t.supercritical;
  if (std::isnan(t.c1))
    j["c1"] = nullptr;
  else
    j["c1"] = t.c1;
  j["quadrature_t_end"] = t.t_end;
  nlohmann::json green = nlohmann::json::array();
  nlohmann::json phi = nlohmann::json::array();
  nlohmann::json res = nlohmann::json::array();
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    green.push_back({{"x", point_json(t.points[i])}, {"value", t.green[i]}});
    phi.push_back({{"x", point_json(t.points[i])}, {"value", t.phi[i]}});
    res.push_back({{"x", point_json(t.points[i])}, {"value", t.g_theta[i]}});
  }
  j["green"] = green;
  j["phi"] = phi;
  j["resolvent"] = res;
  dir.write_json("rw.json", j);

  std::vector<std::string> header;
  for (int i = 0; i < cfg.d; ++i) header.push_back("x" + std::to_string(i + 1));
  header.insert(header.end(), {"green", "phi", "g_theta"});
  io::CsvWriter csv(header);
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    for (int k = 0; k < cfg.d; ++k)
      csv.field(static_cast<std::int64_t>(t.points[i].c[k]));
    csv.field(t.green[i]);
    csv.field(t.phi[i]);
    csv.field(t.g_theta[i]);
    csv.end_row();
  }
  dir.write_text("rw_tables.csv", csv.buf);
  dir.finalize();
}

void run_simulate(const SimulateConfig& cfg) {
  ModelParams par{cfg.d, cfg.lambda, cfg.L};
  for (const auto& msg : par.validate()) throw std::invalid_argument(msg);
  require(cfg.t_end > 0, "t-end: must be > 0");
  require(cfg.replicas >= 2, "replicas: must be >= 2");
  require(cfg.init == "ones" || cfg.init == "equilibrium",
          "init: must be 'ones' or 'equilibrium'");
  require(cfg.burn_in >= 0, "burn-in: must be >= 0");

  std::vector<double> times = cfg.obs_times;
  if (times.empty()) times = {cfg.t_end};
  for (double t : times)
    require(t > 0 && t <= cfg.t_end, "obs-times: each in (0, t-end]");
  std::vector<lattice::Point> sites = cfg.observe;
  if (sites.empty()) sites = {lattice::Point::zero(cfg.d)};
  for (const auto& p : sites)
    require(p.d == cfg.d, "observe: site dimension mismatch");

  nlohmann::json resolved = base_config("simulate");
  resolved["d"] = cfg.d;
  resolved["lambda"] = cfg.lambda;
  resolved["L"] = cfg.L;
  resolved["t_end"] = cfg.t_end;
  resolved["obs_times"] = times;
  resolved["replicas"] = cfg.replicas;
  resolved["seed"] = cfg.seed;
  resolved["init"] = cfg.init;
  resolved["burn_in"] = cfg.burn_in;
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& p : sites) obs.push_back(point_json(p));
  resolved["observe"] = obs;
  io::OutputDir dir(cfg.out);
  dir.write_config(resolved, io::config_hash(resolved));

  const sim::InitialCondition ic =
      cfg.init == "ones" ? sim::InitialCondition::all_ones()
                         : sim::InitialCondition::equilibrium(cfg.burn_in);
  const sim::SnapshotEnsemble e = sim::run_snapshot_ensemble(
      par, ic, times, sites, cfg.replicas, cfg.seed, cfg.threads);

  if (cfg.write_trajectories) {
    std::filesystem::create_directories(dir.file("trajectories"));
    std::vector<std::string> header{"time"};
    for (int i = 0; i < cfg.d; ++i)
      header.push_back("x" + std::to_string(i + 1));
    header.push_back("eta");
    for (int r = 0; r < cfg.replicas; ++r) {
      io::CsvWriter csv(header);
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (std::size_t si = 0; si < sites.size(); ++si) {
          csv.field(times[ti]);
          for (int k = 0; k < cfg.d; ++k)
            csv.field(static_cast<std::int64_t>(sites[si].c[k]));
          csv.field(e.at(r, static_cast<int>(ti), static_cast<int>(si)));
          csv.end_row();
        }
      }
      dir.write_text("trajectories/" + std::to_string(r) + ".csv", csv.buf);
    }
  }

  nlohmann::json m;
  m["replicas"] = cfg.replicas;
  nlohmann::json per_time = nlohmann::json::array();
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    nlohmann::json jt;
    jt["t"] = times[ti];
    nlohmann::json per_site = nlohmann::json::array();
    for (std::size_t si = 0; si < sites.size(); ++si) {
      const int idx1[] = {static_cast<int>(si)};
      const int idx2[] = {static_cast<int>(si), static_cast<int>(si)};
      const int idx4[] = {static_cast<int>(si), static_cast<int>(si),
                          static_cast<int>(si), static_cast<int>(si)};
      const auto m1 = sim::product_moment(e, static_cast<int>(ti), idx1);
      const auto m2 = sim::product_moment(e, static_cast<int>(ti), idx2);
      const auto m4 = sim::product_moment(e, static_cast<int>(ti), idx4);
      per_site.push_back({{"x", point_json(sites[si])},
                          {"mean", m1.value},
                          {"mean_se", m1.std_err},
                          {"second", m2.value},
                          {"second_se", m2.std_err},
                          {"fourth", m4.value},
                          {"fourth_se", m4.std_err}});
    }
    jt["sites"] = per_site;
    per_time.push_back(jt);
  }
  m["moments"] = per_time;
  dir.write_json("moments.json", m);
  dir.finalize();
}

void run_moments(const MomentsConfig& cfg) {
  require(cfg.d >= 1 && cfg.d <= lattice::kMaxDim, "d: needs 1..6");
  require(cfg.lambda > 0, "lambda: must be > 0");
  require(cfg.t >= 0, "t: must be >= 0");
  require(cfg.box_radius >= 1, "box-radius: must be >= 1");
  require(cfg.qhat_radius >= 1 && cfg.qhat_radius <= 6,
          "qhat-radius: needs 1..6 (pair table is quadratic in ball size)");
  lattice::Point x = cfg.x;
  if (x.d == 0) x = lattice::Point::zero(cfg.d);
  require(x.d == cfg.d, "x: dimension mismatch");

  nlohmann::json resolved = base_config("moments");
  resolved["d"] = cfg.d;
  resolved["lambda"] = cfg.lambda;
  resolved["t"] = cfg.t;
  resolved["box_radius"] = cfg.box_radius;
  resolved["qhat_radius"] = cfg.qhat_radius;
  resolved["x"] = point_json(x);
  io::OutputDir dir(cfg.out);
  dir.write_config(resolved, io::config_hash(resolved));

  // pair table from the diagonal source at the origin
  const auto pk = pairs::build_pair_kernel(cfg.d, cfg.lambda, cfg.qhat_radius);
  const auto qh = pairs::qhat_series(pk, lattice::Point::zero(cfg.d), cfg.t);
  {
    std::vector<std::string> header;
    for (int i = 0; i < cfg.d; ++i)
      header.push_back("y" + std::to_string(i + 1));
    for (int i = 0; i < cfg.d; ++i)
      header.push_back("z" + std::to_string(i + 1));
    header.push_back("value");
    io::CsvWriter csv(header);
    const int nb = static_cast<int>(pk.comp.size());
    for (int iy = 0; iy < nb; ++iy) {
      for (int iz = 0; iz < nb; ++iz) {
        const double v = qh.value[pk.pair_index(iy, iz)];
        if (v == 0.0) continue;
        for (int k = 0; k < cfg.d; ++k)
          csv.field(static_cast<std::int64_t>(pk.comp[iy].c[k]));
        for (int k = 0; k < cfg.d; ++k)
          csv.field(static_cast<std::int64_t>(pk.comp[iz].c[k]));
        csv.field(v);
        csv.end_row();
      }
    }
    dir.write_text("qhat.csv", csv.buf);
  }

  const auto dk = pairs::build_diff_kernel(cfg.d, cfg.lambda, cfg.box_radius);
  const auto mo = pairs::second_moment(dk, lattice::Point::zero(cfg.d), cfg.t);
  const auto mx = pairs::second_moment(dk, x, cfg.t);
  nlohmann::json j;
  j["qhat_series"] = {{"n_used", qh.n_used},
                      {"tail_bound", qh.tail_bound},
                      {"escape_bound", qh.escape_bound}};
  j["second_moment_origin"] = {{"t", cfg.t},
                               {"value", mo.value},
                               {"tail_bound", mo.tail_bound},
                               {"escape_bound", mo.escape_bound},
                               {"n_used", mo.n_used}};
  j["second_moment_x"] = {{"x", point_json(x)},
                          {"t", cfg.t},
                          {"value", mx.value},
                          {"tail_bound", mx.tail_bound},
                          {"escape_bound", mx.escape_bound},
                          {"n_used", mx.n_used}};
  if (cfg.d >= 3 && walk::supercritical(cfg.d, cfg.lambda)) {
    const double h = walk::h_constant(cfg.d, cfg.lambda);
    j["equilibrium_second_moment"] = 1.0 + 1.0 / h;
    j["equilibrium_with_offset"] =
        1.0 + walk::hitting_probability(x, cfg.d) / h;
  }
  dir.write_json("second_moments.json", j);
  dir.finalize();
}

void run_clt(const CltConfig& cfg) {
  ModelParams par{cfg.d, cfg.lambda, cfg.L};
  for (const auto& msg : par.validate()) throw std::invalid_argument(msg);
  require(cfg.scaling_n > 0, "N: must be > 0");
  require(!cfg.times.empty() && cfg.times.size() <= 5,
          "times: needs 1..5 grid points");
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    require(cfg.times[i] > 0, "times: must be > 0");
    if (i) require(cfg.times[i] > cfg.times[i - 1], "times: must ascend");
  }
  require(cfg.replicas >= 2, "replicas: must be >= 2");
  require(cfg.burn_in >= 0, "burn-in: must be >= 0");

  nlohmann::json resolved = base_config("clt");
  resolved["d"] = cfg.d;
  resolved["lambda"] = cfg.lambda;
  resolved["L"] = cfg.L;
  resolved["N"] = cfg.scaling_n;
  resolved["times"] = cfg.times;
  resolved["replicas"] = cfg.replicas;
  resolved["seed"] = cfg.seed;
  resolved["burn_in"] = cfg.burn_in;
  io::OutputDir dir(cfg.out);
  dir.write_config(resolved, io::config_hash(resolved));

  const auto tables = sim::build_torus_tables(par, 1.0 / cfg.scaling_n);
  clt::EnsembleConfig ec;
  ec.par = par;
  ec.scaling_n = cfg.scaling_n;
  ec.times = cfg.times;
  ec.replicas = cfg.replicas;
  ec.seed = cfg.seed;
  ec.burn_in = cfg.burn_in;
  ec.threads = cfg.threads;
  const auto recs = clt::run_ensemble(ec, tables);

  io::CsvWriter csv({"replica", "t", "X", "M_over_sqrtN", "R_over_sqrtN",
                     "QV_over_N", "max_jump_sq"});
  for (std::size_t r = 0; r < recs.size(); ++r) {
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
      csv.field(static_cast<std::int64_t>(r));
      csv.field(cfg.times[ti]);
      csv.field(recs[r].x[ti]);
      csv.field(recs[r].m[ti]);
      csv.field(recs[r].r[ti]);
      csv.field(recs[r].qv[ti]);
      csv.field(recs[r].max_jump_sq);
      csv.end_row();
    }
  }
  dir.write_text("clt_samples.csv", csv.buf);

  nlohmann::json rep;
  const bool sup = cfg.d >= 5 && walk::supercritical(cfg.d, cfg.lambda);
  double c1 = std::numeric_limits<double>::quiet_NaN();
  if (sup) {
    c1 = walk::clt_constant(cfg.d, cfg.lambda);
    rep["c1"] = c1;
  } else {
    rep["c1"] = nullptr;
    rep["note"] =
        "d < 5 or subcritical rate: no variance constant; exploratory run";
  }
  const int last = static_cast<int>(cfg.times.size()) - 1;
  const auto xs = clt::column_x(recs, last);
  rep["x_mean"] = stats::mean(xs);
  rep["x_mean_se"] = stats::std_error_of_mean(xs);
  if (sup && recs.size() >= 500) {
    const auto vr =
        clt::variance_test(xs, cfg.times[last], c1, cfg.seed);
    rep["variance_ratio"] = {{"value", vr.ratio},
                             {"ci_lo", vr.ci_lo},
                             {"ci_hi", vr.ci_hi},
                             {"degenerate", vr.degenerate}};
    const auto ks = clt::normality_test(xs, cfg.times[last], c1);
    rep["ks"] = {{"statistic", ks.statistic},
                 {"p_value", ks.p_value},
                 {"skewness", ks.skewness},
                 {"excess_kurtosis", ks.excess_kurtosis}};
  }
  if (sup && recs.size() >= 1000 && cfg.times.size() >= 2) {
    std::vector<std::vector<double>> cols;
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti)
      cols.push_back(clt::column_x(recs, static_cast<int>(ti)));
    const auto f = clt::fdd_test(cols, cfg.times, c1);
    rep["fdd"] = {{"times", cfg.times},
                  {"covariance", f.covariance},
                  {"target", f.target},
                  {"max_rel_dev", f.max_rel_dev}};
  }
  // diagnostics
  nlohmann::json diag;
  const auto qv = clt::column_qv(recs, last);
  diag["qv_over_n_mean"] = stats::mean(qv);
  diag["qv_over_n_var"] = stats::variance(qv);
  const auto rr = clt::column_r(recs, last);
  double r2 = 0;
  for (double v : rr) r2 += v * v;
  diag["r_second_moment"] = r2 / static_cast<double>(rr.size());
  const auto mj = clt::column_max_jump(recs);
  diag["max_jump_sq_mean"] = stats::mean(mj);
  std::vector<double> e0(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) e0[i] = recs[i].eta0_sq;
  diag["eta0_second_moment"] = stats::mean(e0);
  nlohmann::json decomp = nlohmann::json::array();
  double max_gap = 0;
  for (const auto& r : recs) {
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti)
      max_gap = std::max(max_gap, std::abs(r.x[ti] - r.m[ti] - r.r[ti]));
  }
  diag["decomposition_max_gap"] = max_gap;
  rep["diagnostics"] = diag;
  dir.write_json("clt_report.json", rep);
  dir.finalize();
}

}  // namespace nbcpp::run
