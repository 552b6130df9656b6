#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "kuramoto/kuramoto.h"

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.141592653589793;

struct Network {
  kur_network* handle = nullptr;
  ~Network() { kur_network_destroy(handle); }
};

struct Text {
  char* str = nullptr;
  ~Text() { kur_string_free(str); }
  nlohmann::json json() const { return nlohmann::json::parse(str); }
};

Network chain() {
  const double omega[] = {1, 2, 3};
  const double gains[] = {9, 6, 0};
  Network net;
  REQUIRE(kur_network_create(3, omega, gains, 3, &net.handle) == KUR_OK);
  return net;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("kuramoto_capi_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(kur_version()) == "1.0.0");
  CHECK(std::string(kur_status_string(KUR_OK)) == "ok");
  CHECK(std::string(kur_status_string(KUR_ERR_PARSE)).size() > 0);
  CHECK(std::string(kur_status_string(static_cast<kur_status>(1234))).size() > 0);
  kur_string_free(nullptr);
}

TEST_CASE("network handles") {
  auto net = chain();
  CHECK(kur_network_size(net.handle) == 3);
  CHECK(kur_network_edge_count(net.handle) == 3);
  double omega[3];
  double gains[3];
  REQUIRE(kur_network_omega(net.handle, omega, 3) == KUR_OK);
  REQUIRE(kur_network_gains(net.handle, gains, 3) == KUR_OK);
  CHECK(omega[2] == 3.0);
  CHECK(gains[0] == 9.0);
  CHECK(kur_network_omega(net.handle, omega, 2) == KUR_ERR_INVALID_ARGUMENT);
  int connected = 0;
  REQUIRE(kur_network_is_connected(net.handle, &connected) == KUR_OK);
  CHECK(connected == 1);

  const double bad_gains[] = {1, -1, 0};
  kur_network* out = nullptr;
  CHECK(kur_network_create(3, omega, bad_gains, 3, &out) == KUR_ERR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  CHECK(std::string(kur_last_error()).find("coupling[1]") != std::string::npos);
  CHECK(kur_network_create(3, omega, gains, 2, &out) == KUR_ERR_INVALID_ARGUMENT);
  CHECK(kur_network_create(3, nullptr, gains, 3, &out) == KUR_ERR_INVALID_ARGUMENT);
  CHECK(kur_network_create(1, omega, gains, 0, &out) == KUR_ERR_INVALID_ARGUMENT);
  kur_network_destroy(nullptr);
}

TEST_CASE("network files") {
  const auto dir = scratch("files");
  auto net = chain();
  const auto path = (dir / "net.json").string();
  REQUIRE(kur_network_save(net.handle, path.c_str()) == KUR_OK);
  Network back;
  REQUIRE(kur_network_load(path.c_str(), &back.handle) == KUR_OK);
  double gains[3];
  REQUIRE(kur_network_gains(back.handle, gains, 3) == KUR_OK);
  CHECK(gains[1] == 6.0);

  std::ofstream(dir / "bad.json") << R"({"n": 3, "omega": [1, 2, 3], "coupling": [9, 6]})";
  kur_network* bad = nullptr;
  CHECK(kur_network_load((dir / "bad.json").string().c_str(), &bad) == KUR_ERR_PARSE);
  CHECK(kur_network_load((dir / "none.json").string().c_str(), &bad) == KUR_ERR_IO);
  fs::remove_all(dir);
}

TEST_CASE("simulation") {
  const double omega[] = {0.5, 0};
  const double gains[] = {1};
  Network net;
  REQUIRE(kur_network_create(2, omega, gains, 1, &net.handle) == KUR_OK);
  const double theta0[] = {0.2, -0.3};
  kur_trajectory* traj = nullptr;
  REQUIRE(kur_simulate(net.handle, theta0, 2, 100.0, 0.01, &traj) == KUR_OK);
  CHECK(kur_trajectory_length(traj) == 10001);
  double t = 0;
  double theta[2];
  double rate[2];
  REQUIRE(kur_trajectory_sample(traj, 10000, &t, theta, rate) == KUR_OK);
  CHECK(t == doctest::Approx(100.0));
  CHECK(std::remainder(theta[0] - theta[1], 2 * kPi) == doctest::Approx(kPi / 6).epsilon(1e-8));
  CHECK(rate[0] == doctest::Approx(0.25));
  CHECK(kur_trajectory_sample(traj, 10001, &t, nullptr, nullptr) == KUR_ERR_INVALID_ARGUMENT);

  const auto dir = scratch("sim");
  const auto csv = dir / "trajectory.csv";
  REQUIRE(kur_trajectory_write_csv(traj, csv.string().c_str()) == KUR_OK);
  CHECK(first_line(csv) == "t,theta_1,theta_2,thetadot_1,thetadot_2");
  kur_trajectory_destroy(traj);
  kur_trajectory_destroy(nullptr);

  CHECK(kur_simulate(net.handle, theta0, 2, 1.0, 0.0, &traj) == KUR_ERR_INVALID_ARGUMENT);
  CHECK(kur_simulate(net.handle, theta0, 3, 1.0, 0.01, &traj) == KUR_ERR_INVALID_ARGUMENT);
  fs::remove_all(dir);
}

TEST_CASE("field and planar outputs") {
  const auto dir = scratch("field");
  auto net = chain();
  const auto field = dir / "field.csv";
  REQUIRE(kur_write_vector_field_csv(net.handle, 5, -kPi, kPi, -kPi, kPi, field.string().c_str()) == KUR_OK);
  CHECK(first_line(field) == "x1,x2,dx1,dx2");
  REQUIRE(kur_planar_write_boundary_csv(1.0, 0.5, 21, (dir / "b.csv").string().c_str()) == KUR_OK);
  CHECK(first_line(dir / "b.csv") == "x1,upper,lower");
  REQUIRE(kur_planar_write_cone_csv(1.0, 0.5, 0.05, 21, (dir / "c.csv").string().c_str()) == KUR_OK);
  CHECK(first_line(dir / "c.csv") == "a,lo_slope,hi_slope,nontangent");
  CHECK(kur_planar_write_cone_csv(1.0, 0.5, 2.0, 21, (dir / "c.csv").string().c_str()) == KUR_ERR_OUT_OF_DOMAIN);
  CHECK(kur_planar_write_boundary_csv(0.0, 0.5, 21, (dir / "b.csv").string().c_str()) == KUR_ERR_INVALID_ARGUMENT);

  const double omega[] = {1, 2, 3, 4};
  const double gains[] = {1, 1, 1, 1, 1, 1};
  Network four;
  REQUIRE(kur_network_create(4, omega, gains, 6, &four.handle) == KUR_OK);
  CHECK(kur_write_vector_field_csv(four.handle, 5, -1, 1, -1, 1, field.string().c_str()) == KUR_ERR_UNSUPPORTED);

  int sync = 0;
  Text verdict;
  REQUIRE(kur_planar_global_sync(1.0, 0.5, &sync, &verdict.str) == KUR_OK);
  CHECK(sync == 1);
  CHECK(verdict.json()["stable_phase"].get<double>() == doctest::Approx(kPi / 6));
  Text no;
  REQUIRE(kur_planar_global_sync(1.0, 1.5, &sync, &no.str) == KUR_OK);
  CHECK(sync == 0);
  fs::remove_all(dir);
}

TEST_CASE("analysis calls") {
  auto net = chain();
  double x[3];
  REQUIRE(kur_solve_equilibrium(net.handle, nullptr, x, 3) == KUR_OK);
  CHECK(x[1] == doctest::Approx(-kPi / 6));
  kur_stability s = KUR_INDETERMINATE;
  REQUIRE(kur_classify_stability(net.handle, x, 3, 1e-9, &s) == KUR_OK);
  CHECK(s == KUR_SEMISTABLE_CANDIDATE);

  double bounds[3];
  REQUIRE(kur_sufficient_gain_bounds(net.handle, bounds, 3) == KUR_OK);
  CHECK(bounds[1] == doctest::Approx(3.0));
  double k0 = 0;
  REQUIRE(kur_uniform_critical_gain(net.handle, &k0) == KUR_OK);
  CHECK(k0 == doctest::Approx(1.5));
  double mean = 0;
  REQUIRE(kur_sync_frequency(net.handle, &mean) == KUR_OK);
  CHECK(mean == doctest::Approx(2.0));
  int holds = 0;
  double margin = 0;
  REQUIRE(kur_attracting_set_check(net.handle, kPi / 2, &holds, &margin) == KUR_OK);
  CHECK(holds == 1);
  CHECK(margin == doctest::Approx(3.0));
  CHECK(kur_attracting_set_check(net.handle, 0.0, &holds, &margin) == KUR_ERR_INVALID_ARGUMENT);

  int nontangent = 0;
  const double zero[] = {0, 0, 0};
  REQUIRE(kur_nontangency_rank_test(net.handle, zero, 3, &nontangent) == KUR_OK);
  CHECK(nontangent == 1);
  const double edge[] = {kPi / 2, 0, 0};
  CHECK(kur_nontangency_rank_test(net.handle, edge, 3, &nontangent) == KUR_ERR_OUT_OF_DOMAIN);

  const double omega[] = {1.5, 0};
  const double weak[] = {1};
  Network drift;
  REQUIRE(kur_network_create(2, omega, weak, 1, &drift.handle) == KUR_OK);
  CHECK(kur_solve_equilibrium(drift.handle, nullptr, x, 1) == KUR_ERR_NO_EQUILIBRIUM);
  CHECK(std::string(kur_last_error()).size() > 0);

  Text bj;
  REQUIRE(kur_bounds_report(net.handle, 0.1, &bj.str) == KUR_OK);
  CHECK(bj.json()["uniform_K0"].get<double>() == doctest::Approx(1.5));
}

TEST_CASE("certificates and reports") {
  const double omega[] = {0.5, 0};
  const double gains[] = {1};
  Network net;
  REQUIRE(kur_network_create(2, omega, gains, 1, &net.handle) == KUR_OK);
  auto opts = kur_invariance_defaults();
  CHECK(opts.n_samples == 100);
  opts.n_samples = 20;
  opts.horizon = 10.0;
  int pass = 0;
  Text cert;
  REQUIRE(kur_invariance_certificate(net.handle, &opts, &pass, &cert.str) == KUR_OK);
  CHECK(pass == 1);
  CHECK(cert.json()["samples"] == 20);

  auto aopts = kur_analysis_defaults();
  aopts.invariance = opts;
  Text report;
  int cpass = 0;
  REQUIRE(kur_analysis_report(net.handle, &aopts, &cpass, &report.str) == KUR_OK);
  CHECK(cpass == 1);
  CHECK(report.json()["classification"] == "semistable-candidate");
}

TEST_CASE("experiments") {
  const auto dir = scratch("exp");
  auto opts = kur_experiment_defaults();
  const auto out = dir.string();
  opts.output_dir = out.c_str();
  opts.grid = 9;
  int verified = 0;
  Text report;
  REQUIRE(kur_run_experiment("three_chain", &opts, &verified, &report.str) == KUR_OK);
  CHECK(verified == 1);
  CHECK(fs::exists(dir / "field.csv"));
  CHECK(fs::exists(dir / "report.json"));
  Text again;
  CHECK(kur_run_experiment("nope", &opts, &verified, &again.str) == KUR_ERR_INVALID_ARGUMENT);
  fs::remove_all(dir);
}
