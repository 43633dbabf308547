// sphereflow CLI: config-driven experiment runner for the interacting
// particle dynamics library. Every subcommand writes a CSV or JSON result
// plus a JSON run manifest (config echo, seed, wall time, library version);
// re-running from a manifest reproduces the result byte for byte.
//
// This binary talks to the library exclusively through the public C API.

#include "sphereflow.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

// ------------------------------------------------------------------ errors

// Thrown for anything that should terminate the process: code 1 for
// configuration problems, 2 for numeric failures (mirrors the C API codes).
struct ExitError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw ExitError{code, message};
}

// Wraps a C API status; on failure rethrows with the library's last error.
void check(int status) {
  if (status != SF_OK) fail(status, sf_last_error());
}

// ------------------------------------------------------------------ handles

template <auto Destroy>
struct HandleDeleter {
  template <typename T>
  void operator()(T* p) const {
    Destroy(p);
  }
};

using matrix_ptr = std::unique_ptr<sf_matrix, HandleDeleter<sf_matrix_destroy>>;
using ensemble_ptr =
    std::unique_ptr<sf_ensemble, HandleDeleter<sf_ensemble_destroy>>;
using trajectory_ptr =
    std::unique_ptr<sf_trajectory, HandleDeleter<sf_trajectory_destroy>>;
using clusters_ptr =
    std::unique_ptr<sf_clusters, HandleDeleter<sf_clusters_destroy>>;
using sweep_ptr = std::unique_ptr<sf_sweep, HandleDeleter<sf_sweep_destroy>>;
using density_ptr =
    std::unique_ptr<sf_density, HandleDeleter<sf_density_destroy>>;

// ------------------------------------------------------------------ parsing

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(1, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(1, "not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

// Comma-separated list of numbers, e.g. "1,3,4".
std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  for (const std::string& part : split(s, ',')) v.push_back(to_double(part));
  return v;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> v;
  for (double x : parse_list(s)) {
    int k = static_cast<int>(std::lround(x));
    if (static_cast<double>(k) != x) fail(1, "not an integer list: '" + s + "'");
    v.push_back(k);
  }
  return v;
}

// "start:stop:step" inclusive of both endpoints within 1e-12, or a single
// value.
std::vector<double> parse_range(const std::string& text) {
  std::vector<std::string> parts = split(text, ':');
  if (parts.size() == 1) return {to_double(parts[0])};
  if (parts.size() != 3)
    fail(1, "range must be 'value' or 'start:stop:step': '" + text + "'");
  double start = to_double(parts[0]);
  double stop = to_double(parts[1]);
  double step = to_double(parts[2]);
  if (!(step > 0)) fail(1, "range step must be positive: '" + text + "'");
  if (stop < start - 1e-12)
    fail(1, "range stop is below its start: '" + text + "'");
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double v = start + k * step;
    if (v > stop + 1e-12) break;
    grid.push_back(v);
  }
  return grid;
}

int parse_normalization(const std::string& s) {
  if (s == "partition") return SF_NORM_PARTITION;
  if (s == "constant") return SF_NORM_CONSTANT;
  fail(1, "normalization must be 'constant' or 'partition': '" + s + "'");
}

// ------------------------------------------------------------------ output

// Round-trip exact float formatting for CSV cells.
std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// "dir/run.csv" -> "dir/run.manifest.json" (extension replaced; a path with
// no extension just gains the suffix).
std::string manifest_path(const std::string& output) {
  std::size_t slash = output.find_last_of('/');
  std::size_t dot = output.find_last_of('.');
  bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  std::string stem = has_ext ? output.substr(0, dot) : output;
  return stem + ".manifest.json";
}

// "dir/run.csv" -> "dir/run_counts.csv" (companion summary table).
std::string counts_path(const std::string& output) {
  std::size_t slash = output.find_last_of('/');
  std::size_t dot = output.find_last_of('.');
  bool has_ext =
      dot != std::string::npos && (slash == std::string::npos || dot > slash);
  std::string stem = has_ext ? output.substr(0, dot) : output;
  std::string ext = has_ext ? output.substr(dot) : std::string(".csv");
  return stem + "_counts" + ext;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(1, "cannot open output file '" + path + "'");
  return f;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f = open_out(path);
  f << text;
  if (!f) fail(1, "failed writing '" + path + "'");
}

// ------------------------------------------------------------------ seeds

struct SeedOption {
  std::uint64_t value = 0;
  bool given = false;
};

// --seed wins; otherwise draw from entropy (recorded in the manifest so the
// run stays reproducible).
std::uint64_t resolve_seed(const SeedOption& seed) {
  if (seed.given) return seed.value;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^
         static_cast<std::uint64_t>(rd());
}

// ----------------------------------------------------------- matrix options

// The interaction matrix is given as --diag "1,3,4" (diagonal entries), as
// --matrix "a,b,...,z" (row-major, dim*dim entries), or as --dim n alone
// (identity). --matrix may omit --dim when the entry count is a square.
matrix_ptr make_matrix(int dim, const std::string& diag,
                       const std::string& matrix) {
  sf_matrix* m = nullptr;
  if (!matrix.empty()) {
    std::vector<double> v = parse_list(matrix);
    int d = dim;
    if (d <= 0) {
      d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    }
    if (d <= 0 || static_cast<std::size_t>(d) * d != v.size())
      fail(1, "--matrix needs dim*dim entries (row-major)");
    check(sf_matrix_create(d, v.data(), &m));
  } else if (!diag.empty()) {
    std::vector<double> v = parse_list(diag);
    check(sf_matrix_diagonal(static_cast<int>(v.size()), v.data(), &m));
  } else if (dim > 0) {
    check(sf_matrix_identity(dim, &m));
  } else {
    fail(1, "specify the interaction matrix with --diag, --matrix, or --dim");
  }
  return matrix_ptr(m);
}

int matrix_dim(const sf_matrix* m) {
  int d = 0;
  check(sf_matrix_dim(m, &d));
  return d;
}

// ---------------------------------------------------------------- simulate

struct SimulateCfg {
  int dim = 0;
  std::string diag;
  std::string matrix;
  int n_particles = 1;
  double tau = 0.075;
  int steps = 1500;
  int sign = 1;
  std::string normalization = "partition";
  int record_every = 1;
  double stop_residual = 0.0;
  SeedOption seed;
  std::string output = "simulate.csv";
};

json run_simulate(const SimulateCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  matrix_ptr d = make_matrix(cfg.dim, cfg.diag, cfg.matrix);
  int n = matrix_dim(d.get());

  sf_ensemble* init_raw = nullptr;
  check(sf_ensemble_random(n, cfg.n_particles, seed_used, &init_raw));
  ensemble_ptr init(init_raw);

  sf_trajectory* traj_raw = nullptr;
  check(sf_flow_run(init.get(), d.get(), cfg.tau, cfg.steps, cfg.sign,
                    parse_normalization(cfg.normalization), cfg.record_every,
                    cfg.stop_residual, &traj_raw));
  trajectory_ptr traj(traj_raw);

  int len = 0;
  check(sf_trajectory_length(traj.get(), &len));
  std::ofstream out = open_out(cfg.output);
  out << "step,energy,dissipation,max_residual\n";
  for (int k = 0; k < len; ++k) {
    int step = 0;
    double energy = 0, dissipation = 0;
    check(sf_trajectory_step_index(traj.get(), k, &step));
    check(sf_trajectory_energy(traj.get(), k, &energy));
    check(sf_trajectory_dissipation(traj.get(), k, &dissipation));
    sf_ensemble* snap_raw = nullptr;
    check(sf_trajectory_snapshot(traj.get(), k, &snap_raw));
    ensemble_ptr snap(snap_raw);
    double e2 = 0, max_residual = 0, diss2 = 0;
    check(sf_stationarity_report(snap.get(), d.get(), &e2, &max_residual,
                                 &diss2, nullptr));
    out << step << ',' << fmt(energy) << ',' << fmt(dissipation) << ','
        << fmt(max_residual) << '\n';
  }
  if (!out) fail(1, "failed writing '" + cfg.output + "'");

  json m;
  m["experiment"] = "simulate";
  m["dim"] = n;
  m["diag"] = cfg.diag;
  m["matrix"] = cfg.matrix;
  m["n_particles"] = cfg.n_particles;
  m["tau"] = cfg.tau;
  m["steps"] = cfg.steps;
  m["sign"] = cfg.sign;
  m["normalization"] = cfg.normalization;
  m["record_every"] = cfg.record_every;
  m["stop_residual"] = cfg.stop_residual;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

SimulateCfg simulate_from_manifest(const json& j) {
  SimulateCfg cfg;
  cfg.dim = j.value("dim", 0);
  cfg.diag = j.value("diag", std::string());
  cfg.matrix = j.value("matrix", std::string());
  cfg.n_particles = j.value("n_particles", cfg.n_particles);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.sign = j.value("sign", cfg.sign);
  cfg.normalization = j.value("normalization", cfg.normalization);
  cfg.record_every = j.value("record_every", cfg.record_every);
  cfg.stop_residual = j.value("stop_residual", cfg.stop_residual);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// ----------------------------------------------------------- sweep-clusters

struct SweepCfg {
  std::string lambda2 = "1.0:1.5:0.05";
  int trials = 100;
  int n_particles = 100;
  double tau = 0.075;
  int steps = 1000;
  int threads = 1;
  SeedOption seed;
  std::string output = "sweep_clusters.csv";
};

json run_sweep(const SweepCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  std::vector<double> grid = parse_range(cfg.lambda2);

  sf_sweep* sweep_raw = nullptr;
  check(sf_cluster_sweep(grid.data(), static_cast<int>(grid.size()),
                         cfg.trials, cfg.tau, cfg.steps, seed_used,
                         cfg.n_particles, cfg.threads, &sweep_raw));
  sweep_ptr sweep(sweep_raw);

  std::ofstream out = open_out(cfg.output);
  out << "lambda2,trial,k,center0_x,center0_y,center1_x,center1_y,"
         "energy_final,residual_final\n";
  for (std::size_t li = 0; li < grid.size(); ++li) {
    for (int t = 0; t < cfg.trials; ++t) {
      int k = 0, saturated = 0;
      double energy = 0, residual = 0;
      check(sf_sweep_trial(sweep.get(), static_cast<int>(li), t, &k,
                           &saturated, &energy, &residual));
      double c0[2] = {0, 0};
      check(sf_sweep_trial_center(sweep.get(), static_cast<int>(li), t, 0, c0));
      out << fmt(grid[li]) << ',' << t << ',' << k << ',' << fmt(c0[0]) << ','
          << fmt(c0[1]) << ',';
      if (k >= 2) {
        double c1[2] = {0, 0};
        check(
            sf_sweep_trial_center(sweep.get(), static_cast<int>(li), t, 1, c1));
        out << fmt(c1[0]) << ',' << fmt(c1[1]);
      } else {
        out << ',';
      }
      out << ',' << fmt(energy) << ',' << fmt(residual) << '\n';
    }
  }
  if (!out) fail(1, "failed writing '" + cfg.output + "'");

  std::string summary = counts_path(cfg.output);
  std::ofstream cnt = open_out(summary);
  cnt << "lambda2,count_single,count_two\n";
  for (std::size_t li = 0; li < grid.size(); ++li) {
    int count_single = 0, count_two = 0;
    check(sf_sweep_counts(sweep.get(), static_cast<int>(li), &count_single,
                          &count_two));
    cnt << fmt(grid[li]) << ',' << count_single << ',' << count_two << '\n';
  }
  if (!cnt) fail(1, "failed writing '" + summary + "'");

  json m;
  m["experiment"] = "sweep-clusters";
  m["lambda2"] = cfg.lambda2;
  m["trials"] = cfg.trials;
  m["n_particles"] = cfg.n_particles;
  m["tau"] = cfg.tau;
  m["steps"] = cfg.steps;
  m["threads"] = cfg.threads;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

SweepCfg sweep_from_manifest(const json& j) {
  SweepCfg cfg;
  cfg.lambda2 = j.value("lambda2", cfg.lambda2);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.n_particles = j.value("n_particles", cfg.n_particles);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// ---------------------------------------------------------------- four-peak

struct FourPeakCfg {
  double lambda1 = 1.0;
  std::string lambda2 = "0.5:8:0.5";
  double tau = 0.2;
  int steps = 10000;
  int sign = -1;
  std::string normalization = "partition";
  SeedOption seed;
  std::string output = "four_peak.csv";
};

json run_four_peak(const FourPeakCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  std::vector<double> grid = parse_range(cfg.lambda2);
  int norm = parse_normalization(cfg.normalization);
  const double pi = std::acos(-1.0);

  std::ofstream out = open_out(cfg.output);
  out << "lambda2,phi_mean,tanh_ratio,energy_final\n";
  for (double l2 : grid) {
    double de[2] = {cfg.lambda1, l2};
    sf_matrix* d_raw = nullptr;
    check(sf_matrix_diagonal(2, de, &d_raw));
    matrix_ptr d(d_raw);

    // Four equal peaks on the diagonals of the circle.
    sf_ensemble* init_raw = nullptr;
    check(sf_four_peak_ensemble(pi / 4.0, &init_raw));
    ensemble_ptr init(init_raw);

    sf_trajectory* traj_raw = nullptr;
    check(sf_flow_run(init.get(), d.get(), cfg.tau, cfg.steps, cfg.sign, norm,
                      cfg.steps, 0.0, &traj_raw));
    trajectory_ptr traj(traj_raw);

    int len = 0;
    check(sf_trajectory_length(traj.get(), &len));
    double energy_final = 0;
    check(sf_trajectory_energy(traj.get(), len - 1, &energy_final));
    sf_ensemble* fin_raw = nullptr;
    check(sf_trajectory_snapshot(traj.get(), len - 1, &fin_raw));
    ensemble_ptr fin(fin_raw);

    int count = 0;
    check(sf_ensemble_size(fin.get(), &count));
    std::vector<double> coords(static_cast<std::size_t>(count) * 2);
    check(sf_ensemble_coords(fin.get(), coords.data()));

    // Fold each particle into the first quadrant and measure how far the
    // tanh identity tanh(l1 cos^2 phi) / tanh(l2 sin^2 phi) = l2 / l1 is
    // from holding with ratio l2 (it holds exactly at the stationary angle).
    double phi_sum = 0, ratio_sum = 0;
    for (int i = 0; i < count; ++i) {
      double x = coords[2 * i], y = coords[2 * i + 1];
      double phi = std::atan2(std::fabs(y), std::fabs(x));
      phi_sum += phi;
      double c2 = std::cos(phi) * std::cos(phi);
      double s2 = std::sin(phi) * std::sin(phi);
      ratio_sum += std::tanh(cfg.lambda1 * c2) / std::tanh(l2 * s2);
    }
    out << fmt(l2) << ',' << fmt(phi_sum / count) << ','
        << fmt(ratio_sum / count) << ',' << fmt(energy_final) << '\n';
  }
  if (!out) fail(1, "failed writing '" + cfg.output + "'");

  json m;
  m["experiment"] = "four-peak";
  m["lambda1"] = cfg.lambda1;
  m["lambda2"] = cfg.lambda2;
  m["tau"] = cfg.tau;
  m["steps"] = cfg.steps;
  m["sign"] = cfg.sign;
  m["normalization"] = cfg.normalization;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

FourPeakCfg four_peak_from_manifest(const json& j) {
  FourPeakCfg cfg;
  cfg.lambda1 = j.value("lambda1", cfg.lambda1);
  cfg.lambda2 = j.value("lambda2", cfg.lambda2);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.sign = j.value("sign", cfg.sign);
  cfg.normalization = j.value("normalization", cfg.normalization);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// ------------------------------------------------------------------ density

struct DensityCfg {
  double eps = 0.1;
  std::string m_diag = "0,1";
  int n_points = 314;
  double tau = 0.1;
  int iters = 500;
  SeedOption seed;
  std::string output = "density.csv";
};

json run_density(const DensityCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  std::vector<double> mdiag = parse_list(cfg.m_diag);
  if (mdiag.size() != 2)
    fail(1, "--m-diag needs exactly 2 entries (circle densities)");

  sf_density* sol_raw = nullptr;
  check(sf_density_solve(cfg.eps, mdiag.data(), cfg.n_points, cfg.tau,
                         cfg.iters, &sol_raw));
  density_ptr sol(sol_raw);

  double upsilon = 0;
  check(sf_density_fit_upsilon(sol.get(), &upsilon));

  sf_density* asym_raw = nullptr;
  check(sf_density_asymptotic(cfg.eps, mdiag.data(), cfg.n_points, &asym_raw));
  density_ptr asym(asym_raw);

  sf_density* conj_raw = nullptr;
  check(sf_density_conjectured(upsilon, cfg.n_points, &conj_raw));
  density_ptr conj(conj_raw);

  int n = 0;
  check(sf_density_size(sol.get(), &n));
  std::vector<double> angles(n), mass(n), mass_asym(n), mass_conj(n);
  check(sf_density_angles(sol.get(), angles.data()));
  check(sf_density_mass(sol.get(), mass.data()));
  check(sf_density_mass(asym.get(), mass_asym.data()));
  check(sf_density_mass(conj.get(), mass_conj.data()));

  std::ofstream out = open_out(cfg.output);
  out << "theta,mass,asymptotic_mass,conjectured_mass\n";
  for (int i = 0; i < n; ++i) {
    out << fmt(angles[i]) << ',' << fmt(mass[i]) << ',' << fmt(mass_asym[i])
        << ',' << fmt(mass_conj[i]) << '\n';
  }
  if (!out) fail(1, "failed writing '" + cfg.output + "'");

  json m;
  m["experiment"] = "density";
  m["eps"] = cfg.eps;
  m["m_diag"] = cfg.m_diag;
  m["n_points"] = cfg.n_points;
  m["tau"] = cfg.tau;
  m["iters"] = cfg.iters;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

DensityCfg density_from_manifest(const json& j) {
  DensityCfg cfg;
  cfg.eps = j.value("eps", cfg.eps);
  cfg.m_diag = j.value("m_diag", cfg.m_diag);
  cfg.n_points = j.value("n_points", cfg.n_points);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.iters = j.value("iters", cfg.iters);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// -------------------------------------------------------------- maximize-nd

struct MaximizeCfg {
  int dim = 0;
  std::string diag = "-1,-3,-4";
  std::string matrix;
  int n_particles = 100;
  double tau = 0.1;
  int steps = 3000;
  int max_k = 2;
  double radius_tol = 0.3;
  SeedOption seed;
  std::string output = "maximize_nd.json";
};

json run_maximize(const MaximizeCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  matrix_ptr d = make_matrix(cfg.dim, cfg.diag, cfg.matrix);
  int n = matrix_dim(d.get());

  sf_ensemble* init_raw = nullptr;
  check(sf_ensemble_random(n, cfg.n_particles, seed_used, &init_raw));
  ensemble_ptr init(init_raw);

  sf_trajectory* traj_raw = nullptr;
  check(sf_flow_run(init.get(), d.get(), cfg.tau, cfg.steps, +1,
                    SF_NORM_PARTITION, cfg.steps, 0.0, &traj_raw));
  trajectory_ptr traj(traj_raw);

  int len = 0;
  check(sf_trajectory_length(traj.get(), &len));
  sf_ensemble* fin_raw = nullptr;
  check(sf_trajectory_snapshot(traj.get(), len - 1, &fin_raw));
  ensemble_ptr fin(fin_raw);

  double energy = 0, max_residual = 0, dissipation = 0;
  check(sf_stationarity_report(fin.get(), d.get(), &energy, &max_residual,
                               &dissipation, nullptr));

  sf_clusters* clus_raw = nullptr;
  check(sf_detect_clusters(fin.get(), cfg.max_k, cfg.radius_tol, seed_used,
                           &clus_raw));
  clusters_ptr clus(clus_raw);

  int k = 0, saturated = 0;
  double max_radius = 0;
  check(sf_clusters_k(clus.get(), &k));
  check(sf_clusters_saturated(clus.get(), &saturated));
  check(sf_clusters_max_radius(clus.get(), &max_radius));

  int candidate_known = 0;
  double candidate_energy = 0;
  check(sf_two_cluster_candidate(d.get(), &candidate_known, &candidate_energy));

  json result;
  result["k"] = k;
  result["saturated"] = saturated;
  result["max_radius"] = max_radius;
  result["energy_final"] = energy;
  result["max_residual"] = max_residual;
  for (int c = 0; c < k; ++c) {
    std::vector<double> center(n);
    check(sf_clusters_center(clus.get(), c, center.data()));
    for (int i = 0; i < n; ++i)
      result["center" + std::to_string(c) + "_" + std::to_string(i)] =
          center[i];
  }
  result["candidate_known"] = candidate_known;
  if (candidate_known) result["candidate_energy"] = candidate_energy;

  std::string text = result.dump(2) + "\n";
  write_text(cfg.output, text);
  std::fputs(text.c_str(), stdout);

  json m;
  m["experiment"] = "maximize-nd";
  m["dim"] = n;
  m["diag"] = cfg.diag;
  m["matrix"] = cfg.matrix;
  m["n_particles"] = cfg.n_particles;
  m["tau"] = cfg.tau;
  m["steps"] = cfg.steps;
  m["max_k"] = cfg.max_k;
  m["radius_tol"] = cfg.radius_tol;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

MaximizeCfg maximize_from_manifest(const json& j) {
  MaximizeCfg cfg;
  cfg.dim = j.value("dim", 0);
  cfg.diag = j.value("diag", std::string());
  cfg.matrix = j.value("matrix", std::string());
  cfg.n_particles = j.value("n_particles", cfg.n_particles);
  cfg.tau = j.value("tau", cfg.tau);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.max_k = j.value("max_k", cfg.max_k);
  cfg.radius_tol = j.value("radius_tol", cfg.radius_tol);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// -------------------------------------------------------- indefinite-energy

struct IndefiniteCfg {
  std::string lambda2 = "-1:1:0.05";
  SeedOption seed;
  std::string output = "indefinite_energy.csv";
};

json run_indefinite(const IndefiniteCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  std::vector<double> grid = parse_range(cfg.lambda2);

  std::ofstream out = open_out(cfg.output);
  out << "lambda2,e_single,e_two_min,e_two_max\n";
  for (double l2 : grid) {
    double e_single = 0, e_two_min = 0, e_two_max = 0;
    check(sf_indefinite_comparison(l2, &e_single, &e_two_min, &e_two_max));
    out << fmt(l2) << ',' << fmt(e_single) << ',' << fmt(e_two_min) << ','
        << fmt(e_two_max) << '\n';
  }
  if (!out) fail(1, "failed writing '" + cfg.output + "'");

  json m;
  m["experiment"] = "indefinite-energy";
  m["lambda2"] = cfg.lambda2;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

IndefiniteCfg indefinite_from_manifest(const json& j) {
  IndefiniteCfg cfg;
  cfg.lambda2 = j.value("lambda2", cfg.lambda2);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// --------------------------------------------------------- check-stationary

struct CheckCfg {
  int dim = 0;
  std::string diag;
  std::string matrix;
  bool uniform = false;
  bool four_peak = false;
  std::string eigen_mixture;    // comma-separated eigenvector indices
  std::string mixture_weights;  // comma-separated weights (default uniform)
  int dirac = -1;               // eigenvector index
  int resolution = 512;
  SeedOption seed;
  std::string output = "check_stationary.json";
};

json run_check(const CheckCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  matrix_ptr d = make_matrix(cfg.dim, cfg.diag, cfg.matrix);
  int n = matrix_dim(d.get());

  int modes = (cfg.uniform ? 1 : 0) + (cfg.four_peak ? 1 : 0) +
              (!cfg.eigen_mixture.empty() ? 1 : 0) + (cfg.dirac >= 0 ? 1 : 0);
  if (modes != 1)
    fail(1,
         "pick exactly one of --uniform, --four-peak, --eigen-mixture, "
         "--dirac");

  json result;
  if (cfg.uniform) {
    double residual = 0;
    check(sf_uniform_residual(d.get(), cfg.resolution, &residual));
    result["mode"] = "uniform";
    result["resolution"] = cfg.resolution;
    result["residual"] = residual;
  } else if (cfg.four_peak) {
    if (n != 2) fail(1, "--four-peak needs a 2x2 diagonal matrix");
    double off = 0, l1 = 0, l2 = 0;
    check(sf_matrix_entry(d.get(), 0, 1, &off));
    check(sf_matrix_entry(d.get(), 0, 0, &l1));
    check(sf_matrix_entry(d.get(), 1, 1, &l2));
    if (off != 0.0) fail(1, "--four-peak needs a 2x2 diagonal matrix");
    double phi = 0, defect = 0;
    check(sf_four_peak_angle(l1, l2, &phi, &defect));
    sf_ensemble* mu_raw = nullptr;
    check(sf_four_peak_ensemble(phi, &mu_raw));
    ensemble_ptr mu(mu_raw);
    double energy = 0, residual = 0, dissipation = 0;
    check(sf_stationarity_report(mu.get(), d.get(), &energy, &residual,
                                 &dissipation, nullptr));
    result["mode"] = "four_peak";
    result["phi"] = phi;
    result["tanh_defect"] = defect;
    result["residual"] = residual;
    result["energy"] = energy;
  } else if (!cfg.eigen_mixture.empty()) {
    std::vector<int> subset = parse_int_list(cfg.eigen_mixture);
    std::vector<double> t;
    if (cfg.mixture_weights.empty()) {
      t.assign(subset.size(), 1.0 / static_cast<double>(subset.size()));
    } else {
      t = parse_list(cfg.mixture_weights);
    }
    if (t.size() != subset.size())
      fail(1, "--mixture-weights must match --eigen-mixture in length");
    sf_ensemble* mu_raw = nullptr;
    check(sf_eigen_mixture(d.get(), subset.data(),
                           static_cast<int>(subset.size()), t.data(), &mu_raw));
    ensemble_ptr mu(mu_raw);
    double energy = 0, residual = 0, dissipation = 0;
    check(sf_stationarity_report(mu.get(), d.get(), &energy, &residual,
                                 &dissipation, nullptr));
    result["mode"] = "eigen_mixture";
    result["indices"] = cfg.eigen_mixture;
    result["weights"] = cfg.mixture_weights;
    result["residual"] = residual;
    result["energy"] = energy;
  } else {
    if (cfg.dirac >= n) fail(1, "--dirac index out of range");
    std::vector<double> vecs(static_cast<std::size_t>(n) * n);
    check(sf_matrix_eigenvectors(d.get(), vecs.data()));
    sf_ensemble* mu_raw = nullptr;
    check(sf_ensemble_create(n, 1, vecs.data() + cfg.dirac * n, nullptr,
                             &mu_raw));
    ensemble_ptr mu(mu_raw);
    double energy = 0, residual = 0, dissipation = 0;
    check(sf_stationarity_report(mu.get(), d.get(), &energy, &residual,
                                 &dissipation, nullptr));
    result["mode"] = "dirac";
    result["index"] = cfg.dirac;
    result["residual"] = residual;
    result["energy"] = energy;
  }

  std::string text = result.dump(2) + "\n";
  write_text(cfg.output, text);
  std::fputs(text.c_str(), stdout);

  json m;
  m["experiment"] = "check-stationary";
  m["dim"] = n;
  m["diag"] = cfg.diag;
  m["matrix"] = cfg.matrix;
  m["uniform"] = cfg.uniform;
  m["four_peak"] = cfg.four_peak;
  m["eigen_mixture"] = cfg.eigen_mixture;
  m["mixture_weights"] = cfg.mixture_weights;
  m["dirac"] = cfg.dirac;
  m["resolution"] = cfg.resolution;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

CheckCfg check_from_manifest(const json& j) {
  CheckCfg cfg;
  cfg.dim = j.value("dim", 0);
  cfg.diag = j.value("diag", std::string());
  cfg.matrix = j.value("matrix", std::string());
  cfg.uniform = j.value("uniform", false);
  cfg.four_peak = j.value("four_peak", false);
  cfg.eigen_mixture = j.value("eigen_mixture", std::string());
  cfg.mixture_weights = j.value("mixture_weights", std::string());
  cfg.dirac = j.value("dirac", -1);
  cfg.resolution = j.value("resolution", cfg.resolution);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// ---------------------------------------------------------------- constants

struct ConstantsCfg {
  int dim = 2;
  int resolution = 2048;
  SeedOption seed;
  std::string output = "constants.json";
};

json run_constants(const ConstantsCfg& cfg) {
  std::uint64_t seed_used = resolve_seed(cfg.seed);
  double c1 = 0, c2 = 0, c3 = 0;
  check(sf_perturbation_constants(cfg.dim, cfg.resolution, &c1, &c2, &c3));
  if (!(c1 > 0) || !(c2 > 0) || !(c3 > 0))
    fail(2, "perturbation constants must be positive");

  json result;
  result["c1"] = c1;
  result["c2"] = c2;
  result["c3"] = c3;
  result["alpha"] = -c1 / c2;

  std::string text = result.dump(2) + "\n";
  write_text(cfg.output, text);
  std::fputs(text.c_str(), stdout);

  json m;
  m["experiment"] = "constants";
  m["dim"] = cfg.dim;
  m["resolution"] = cfg.resolution;
  m["seed_used"] = seed_used;
  m["output"] = cfg.output;
  return m;
}

ConstantsCfg constants_from_manifest(const json& j) {
  ConstantsCfg cfg;
  cfg.dim = j.value("dim", cfg.dim);
  cfg.resolution = j.value("resolution", cfg.resolution);
  cfg.seed.value = j.value("seed_used", std::uint64_t{0});
  cfg.seed.given = j.contains("seed_used");
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

// ----------------------------------------------------------------- plumbing

// Runs one experiment, timing it and writing "<output stem>.manifest.json"
// beside the result.
template <typename Cfg, typename Runner>
void run_and_record(const Cfg& cfg, Runner runner) {
  auto t0 = std::chrono::steady_clock::now();
  json manifest = runner(cfg);
  std::chrono::duration<double> wall = std::chrono::steady_clock::now() - t0;
  manifest["version"] = sf_version();
  manifest["wall_seconds"] = wall.count();
  std::string path = manifest_path(manifest["output"].get<std::string>());
  write_text(path, manifest.dump(2) + "\n");
}

json load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(1, "cannot open manifest '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    fail(1, std::string("bad manifest: ") + e.what());
  }
  return j;
}

void run_from_manifest(const std::string& path, const std::string& output,
                       int threads) {
  json j = load_manifest(path);
  std::string experiment = j.value("experiment", std::string());
  if (experiment == "simulate") {
    SimulateCfg cfg = simulate_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_simulate);
  } else if (experiment == "sweep-clusters") {
    SweepCfg cfg = sweep_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    if (threads > 0) cfg.threads = threads;
    run_and_record(cfg, run_sweep);
  } else if (experiment == "four-peak") {
    FourPeakCfg cfg = four_peak_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_four_peak);
  } else if (experiment == "density") {
    DensityCfg cfg = density_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_density);
  } else if (experiment == "maximize-nd") {
    MaximizeCfg cfg = maximize_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_maximize);
  } else if (experiment == "indefinite-energy") {
    IndefiniteCfg cfg = indefinite_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_indefinite);
  } else if (experiment == "check-stationary") {
    CheckCfg cfg = check_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_check);
  } else if (experiment == "constants") {
    ConstantsCfg cfg = constants_from_manifest(j);
    if (!output.empty()) cfg.output = output;
    run_and_record(cfg, run_constants);
  } else {
    fail(1, "manifest has unknown experiment '" + experiment + "'");
  }
}

void add_seed_option(CLI::App* cmd, SeedOption& seed) {
  cmd->add_option_function<std::uint64_t>(
         "--seed",
         [&seed](std::uint64_t v) {
           seed.value = v;
           seed.given = true;
         },
         "RNG seed (omitted: drawn from entropy, recorded in the manifest)");
}

void add_matrix_options(CLI::App* cmd, int& dim, std::string& diag,
                        std::string& matrix) {
  cmd->add_option("--dim", dim, "dimension (identity matrix unless --diag/--matrix)");
  cmd->add_option("--diag", diag, "diagonal interaction matrix entries, e.g. '1,3,4'");
  cmd->add_option("--matrix", matrix,
                  "full symmetric interaction matrix, row-major comma list");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sphereflow: interacting particle dynamics on the unit sphere.\n"
      "Runs flow, sweep, stationary-state, and density experiments; every\n"
      "subcommand writes CSV or JSON plus a '<output>.manifest.json' echo of\n"
      "its full configuration for byte-identical re-runs."};
  app.set_version_flag("--version", sf_version());

  std::string from_manifest;
  std::string override_output;
  int override_threads = 0;
  app.add_option("--from-manifest", from_manifest,
                 "re-run the experiment recorded in a manifest file");
  app.add_option("-o,--output", override_output,
                 "with --from-manifest: write results to this path instead");
  app.add_option("--threads", override_threads,
                 "with --from-manifest: override the worker thread count");

  SimulateCfg sim;
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "run the particle flow and record its energy history");
  add_matrix_options(c_sim, sim.dim, sim.diag, sim.matrix);
  c_sim->add_option("--n-particles", sim.n_particles, "particle count");
  c_sim->add_option("--tau", sim.tau, "step size");
  c_sim->add_option("--steps", sim.steps, "step count");
  c_sim->add_option("--sign", sim.sign, "+1 ascends the energy, -1 descends")
      ->check(CLI::IsMember({-1, 1}));
  c_sim->add_option("--normalization", sim.normalization,
                    "mobility normalization: constant | partition")
      ->check(CLI::IsMember({"constant", "partition"}));
  c_sim->add_option("--record-every", sim.record_every,
                    "record every k-th step (endpoints always recorded)");
  c_sim->add_option("--stop-residual", sim.stop_residual,
                    "stop early when the max residual drops below this");
  add_seed_option(c_sim, sim.seed);
  c_sim->add_option("-o,--output", sim.output, "CSV output path");

  SweepCfg swp;
  CLI::App* c_swp = app.add_subcommand(
      "sweep-clusters",
      "tabulate single- vs two-cluster outcomes over a lambda2 grid");
  c_swp->add_option("--lambda2", swp.lambda2,
                    "grid 'start:stop:step' or single value");
  c_swp->add_option("--trials", swp.trials, "independent runs per grid point");
  c_swp->add_option("--n-particles", swp.n_particles, "particles per run");
  c_swp->add_option("--tau", swp.tau, "step size");
  c_swp->add_option("--steps", swp.steps, "steps per run");
  c_swp->add_option("--threads", swp.threads,
                    "worker threads (any count gives identical results)");
  add_seed_option(c_swp, swp.seed);
  c_swp->add_option("-o,--output", swp.output,
                    "per-trial CSV path (a *_counts.csv summary is written "
                    "alongside)");

  FourPeakCfg fpk;
  CLI::App* c_fpk = app.add_subcommand(
      "four-peak",
      "descend from four symmetric peaks and compare against the stationary "
      "tanh identity");
  c_fpk->add_option("--lambda1", fpk.lambda1, "first diagonal entry");
  c_fpk->add_option("--lambda2", fpk.lambda2,
                    "second diagonal entry grid 'start:stop:step'");
  c_fpk->add_option("--tau", fpk.tau, "step size");
  c_fpk->add_option("--steps", fpk.steps, "steps per run");
  c_fpk->add_option("--sign", fpk.sign, "+1 ascends the energy, -1 descends")
      ->check(CLI::IsMember({-1, 1}));
  c_fpk->add_option("--normalization", fpk.normalization,
                    "mobility normalization: constant | partition")
      ->check(CLI::IsMember({"constant", "partition"}));
  add_seed_option(c_fpk, fpk.seed);
  c_fpk->add_option("-o,--output", fpk.output, "CSV output path");

  DensityCfg den;
  CLI::App* c_den = app.add_subcommand(
      "density",
      "minimize a circle density by mirror descent and compare with the "
      "perturbative predictions");
  c_den->add_option("--eps", den.eps, "perturbation size in D = I + eps*M");
  c_den->add_option("--m-diag", den.m_diag, "diagonal of M, e.g. '0,1'");
  c_den->add_option("--n-points", den.n_points, "grid size");
  c_den->add_option("--tau", den.tau, "mirror-descent step size");
  c_den->add_option("--iters", den.iters, "mirror-descent iterations");
  add_seed_option(c_den, den.seed);
  c_den->add_option("-o,--output", den.output, "CSV output path");

  MaximizeCfg mxd;
  CLI::App* c_mxd = app.add_subcommand(
      "maximize-nd",
      "ascend under a negative-definite matrix and report the clustered "
      "final state");
  add_matrix_options(c_mxd, mxd.dim, mxd.diag, mxd.matrix);
  c_mxd->add_option("--n-particles", mxd.n_particles, "particle count");
  c_mxd->add_option("--tau", mxd.tau, "step size");
  c_mxd->add_option("--steps", mxd.steps, "step count");
  c_mxd->add_option("--max-k", mxd.max_k, "largest cluster count to consider");
  c_mxd->add_option("--radius-tol", mxd.radius_tol,
                    "chordal radius below which a cluster counts as tight");
  add_seed_option(c_mxd, mxd.seed);
  c_mxd->add_option("-o,--output", mxd.output, "JSON output path");

  IndefiniteCfg ind;
  CLI::App* c_ind = app.add_subcommand(
      "indefinite-energy",
      "closed-form energies of the competing states under D = diag(-1, "
      "lambda2)");
  c_ind->add_option("--lambda2", ind.lambda2,
                    "grid 'start:stop:step' or single value");
  add_seed_option(c_ind, ind.seed);
  c_ind->add_option("-o,--output", ind.output, "CSV output path");

  CheckCfg chk;
  CLI::App* c_chk = app.add_subcommand(
      "check-stationary",
      "stationarity residual of a named candidate state under D");
  add_matrix_options(c_chk, chk.dim, chk.diag, chk.matrix);
  c_chk->add_flag("--uniform", chk.uniform,
                  "uniform distribution on the sphere (quadrature)");
  c_chk->add_option("--resolution", chk.resolution,
                    "quadrature resolution for --uniform");
  c_chk->add_flag("--four-peak", chk.four_peak,
                  "balanced four-peak state at its stationary angle");
  c_chk->add_option("--eigen-mixture", chk.eigen_mixture,
                    "antipodal mixture on these eigenvector indices, e.g. "
                    "'0,1'");
  c_chk->add_option("--mixture-weights", chk.mixture_weights,
                    "weights for --eigen-mixture (default uniform)");
  c_chk->add_option("--dirac", chk.dirac,
                    "single particle on this eigenvector index");
  add_seed_option(c_chk, chk.seed);
  c_chk->add_option("-o,--output", chk.output, "JSON output path");

  ConstantsCfg cns;
  CLI::App* c_cns = app.add_subcommand(
      "constants",
      "quadrature constants of the near-identity perturbation expansion");
  c_cns->add_option("--dim", cns.dim, "sphere ambient dimension (2 or 3)");
  c_cns->add_option("--resolution", cns.resolution, "quadrature resolution");
  add_seed_option(c_cns, cns.seed);
  c_cns->add_option("-o,--output", cns.output, "JSON output path");

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (!from_manifest.empty()) {
      run_from_manifest(from_manifest, override_output, override_threads);
    } else if (c_sim->parsed()) {
      run_and_record(sim, run_simulate);
    } else if (c_swp->parsed()) {
      run_and_record(swp, run_sweep);
    } else if (c_fpk->parsed()) {
      run_and_record(fpk, run_four_peak);
    } else if (c_den->parsed()) {
      run_and_record(den, run_density);
    } else if (c_mxd->parsed()) {
      run_and_record(mxd, run_maximize);
    } else if (c_ind->parsed()) {
      run_and_record(ind, run_indefinite);
    } else if (c_chk->parsed()) {
      run_and_record(chk, run_check);
    } else if (c_cns->parsed()) {
      run_and_record(cns, run_constants);
    } else {
      std::fputs(app.help().c_str(), stderr);
      return 1;
    }
  } catch (const ExitError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code == SF_ERR_NUMERIC ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
