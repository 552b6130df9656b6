// Command-line front end. Talks to the library only through kuramoto.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kuramoto/kuramoto.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCertificateFail = 2;

struct CommonArgs {
  std::string network;
  double t_end = 100.0;
  double dt = 0.01;
  std::uint64_t seed = 0;
  std::string out = ".";
};

/// Thrown on a failed C call; carries the library's message.
struct CallFailed {
  kur_status status;
  std::string message;
};

void check(kur_status status) {
  if (status != KUR_OK) throw CallFailed{status, kur_last_error()};
}

class Network {
 public:
  explicit Network(const std::string& path) { check(kur_network_load(path.c_str(), &handle_)); }
  ~Network() { kur_network_destroy(handle_); }
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const kur_network* get() const { return handle_; }
  std::size_t size() const { return kur_network_size(handle_); }
  std::vector<double> gains() const {
    std::vector<double> g(kur_network_edge_count(handle_));
    check(kur_network_gains(handle_, g.data(), g.size()));
    return g;
  }

 private:
  kur_network* handle_ = nullptr;
};

/// Takes ownership of a library-allocated string.
std::string take(char* s) {
  std::string out = s ? s : "";
  kur_string_free(s);
  return out;
}

std::filesystem::path prepare(const std::string& dir) {
  std::filesystem::path p(dir);
  std::filesystem::create_directories(p);
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CallFailed{KUR_ERR_IO, "cannot write " + path.string()};
  out << text;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_network) {
  if (needs_network) {
    cmd->add_option("--network", args.network, "network definition file (JSON)")->required()->check(CLI::ExistingFile);
  }
  cmd->add_option("--t-end", args.t_end, "simulated time, s")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", args.dt, "RK4 step, s")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "seed for every random draw");
  cmd->add_option("--out", args.out, "output directory");
}

kur_invariance_options invariance_options(const CommonArgs& args, std::size_t samples, double horizon,
                                          double margin) {
  auto o = kur_invariance_defaults();
  o.n_samples = samples;
  o.horizon = horizon;
  o.dt = args.dt;
  o.margin = margin;
  o.seed = args.seed;
  return o;
}

int run_simulate(const CommonArgs& args, const std::vector<double>& theta0_arg) {
  Network net(args.network);
  std::vector<double> theta0 = theta0_arg;
  if (theta0.empty()) {
    std::mt19937_64 rng(args.seed);
    std::uniform_real_distribution<double> phase(-M_PI, M_PI);
    theta0.resize(net.size());
    for (auto& t : theta0) t = phase(rng);
  }
  kur_trajectory* traj = nullptr;
  check(kur_simulate(net.get(), theta0.data(), theta0.size(), args.t_end, args.dt, &traj));
  const auto path = prepare(args.out) / "trajectory.csv";
  const kur_status status = kur_trajectory_write_csv(traj, path.string().c_str());
  const std::size_t samples = kur_trajectory_length(traj);
  kur_trajectory_destroy(traj);
  check(status);
  std::cout << "wrote " << path.string() << " (" << samples << " samples)\n";
  return kExitOk;
}

int run_analyze(const CommonArgs& args, std::size_t samples, double horizon, double margin, double delta) {
  Network net(args.network);
  auto o = kur_analysis_defaults();
  o.delta = delta;
  o.invariance = invariance_options(args, samples, horizon, margin);
  int pass = 0;
  char* json = nullptr;
  check(kur_analysis_report(net.get(), &o, &pass, &json));
  const std::string report = take(json);
  const auto path = prepare(args.out) / "report.json";
  write_text(path, report);
  std::cout << report;
  return pass ? kExitOk : kExitCertificateFail;
}

int run_bounds(const CommonArgs& args, double delta) {
  Network net(args.network);
  char* json = nullptr;
  check(kur_bounds_report(net.get(), delta, &json));
  const std::string report = take(json);
  write_text(prepare(args.out) / "bounds.json", report);
  std::cout << report;
  return kExitOk;
}

int run_invariance(const CommonArgs& args, std::size_t samples, double horizon, double margin) {
  Network net(args.network);
  const auto o = invariance_options(args, samples, horizon, margin);
  int pass = 0;
  char* json = nullptr;
  check(kur_invariance_certificate(net.get(), &o, &pass, &json));
  const std::string report = take(json);
  write_text(prepare(args.out) / "invariance.json", report);
  std::cout << report;
  return pass ? kExitOk : kExitCertificateFail;
}

int run_portrait(const CommonArgs& args, std::size_t grid, double eps) {
  Network net(args.network);
  const auto dir = prepare(args.out);
  const auto field = dir / "field.csv";
  if (net.size() == 2) {
    const double k = net.gains()[0];
    const double span = k > 0.0 ? 2.0 * k : M_PI;
    check(kur_write_vector_field_csv(net.get(), grid, -M_PI, M_PI, -span, span, field.string().c_str()));
    std::cout << "wrote " << field.string() << '\n';
    if (k > 0.0) {
      std::vector<double> omega(2);
      check(kur_network_omega(net.get(), omega.data(), omega.size()));
      const auto boundary = dir / "boundary.csv";
      const auto cones = dir / "cones.csv";
      check(kur_planar_write_boundary_csv(k, omega[0] - omega[1], grid, boundary.string().c_str()));
      check(kur_planar_write_cone_csv(k, omega[0] - omega[1], eps, grid, cones.string().c_str()));
      std::cout << "wrote " << boundary.string() << "\nwrote " << cones.string() << '\n';
    }
  } else {
    check(kur_write_vector_field_csv(net.get(), grid, -M_PI, M_PI, -M_PI, M_PI, field.string().c_str()));
    std::cout << "wrote " << field.string() << '\n';
  }
  return kExitOk;
}

int run_experiment(const CommonArgs& args, const std::string& id, std::size_t grid) {
  const auto dir = prepare(args.out);
  const std::string dir_string = dir.string();
  auto o = kur_experiment_defaults();
  o.output_dir = dir_string.c_str();
  o.grid = grid;
  o.t_end = args.t_end;
  o.dt = args.dt;
  o.seed = args.seed;
  int verified = 0;
  char* json = nullptr;
  check(kur_run_experiment(id.c_str(), &o, &verified, &json));
  std::cout << take(json);
  if (!verified) std::cerr << "experiment " << id << ": verification failed (see report.json)\n";
  return verified ? kExitOk : kExitCertificateFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kuramoto oscillator network simulation and synchronization analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kur_version());

  CommonArgs args;
  std::vector<double> theta0;
  std::size_t samples = 100;
  double horizon = 50.0;
  double margin = 0.01;
  double delta = 0.1;
  std::size_t grid = 41;
  double eps = 0.05;
  std::string experiment_id;

  auto* simulate = app.add_subcommand("simulate", "integrate the network and write trajectory.csv");
  add_common(simulate, args, true);
  simulate->add_option("--theta0", theta0, "initial phases (default: uniform draw from --seed)");

  auto* analyze = app.add_subcommand("analyze", "equilibrium, stability, bounds and certificates -> report.json");
  add_common(analyze, args, true);
  analyze->add_option("--samples", samples, "invariance certificate trajectories");
  analyze->add_option("--horizon", horizon, "invariance certificate horizon, s");
  analyze->add_option("--margin", margin, "initial-state distance from the box faces, rad");
  analyze->add_option("--delta", delta, "attracting-set delta, rad");

  auto* bounds = app.add_subcommand("bounds", "coupling-gain bounds -> bounds.json");
  add_common(bounds, args, true);
  bounds->add_option("--delta", delta, "attracting-set delta, rad");

  auto* invariance = app.add_subcommand("invariance", "Monte-Carlo invariance certificate -> invariance.json");
  add_common(invariance, args, true);
  invariance->add_option("--samples", samples, "trajectories");
  invariance->add_option("--horizon", horizon, "horizon, s");
  invariance->add_option("--margin", margin, "initial-state distance from the box faces, rad");

  auto* portrait = app.add_subcommand("portrait", "planar vector field (N = 2 or 3) -> field.csv");
  add_common(portrait, args, true);
  portrait->add_option("--grid", grid, "samples per axis")->check(CLI::Range(2, 100000));
  portrait->add_option("--eps", eps, "cone half-width for the N = 2 sweep, rad");

  auto* experiment = app.add_subcommand("experiment", "reproduce a reference experiment");
  add_common(experiment, args, false);
  experiment->add_option("id", experiment_id, "three_chain | five_network")->required();
  experiment->add_option("--grid", grid, "field samples per axis")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error maps onto the error code.
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*simulate) return run_simulate(args, theta0);
    if (*analyze) return run_analyze(args, samples, horizon, margin, delta);
    if (*bounds) return run_bounds(args, delta);
    if (*invariance) return run_invariance(args, samples, horizon, margin);
    if (*portrait) return run_portrait(args, grid, eps);
    if (*experiment) return run_experiment(args, experiment_id, grid);
  } catch (const CallFailed& e) {
    std::cerr << "error: " << kur_status_string(e.status) << ": " << e.message << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
