#include "kuramoto/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "kuramoto/error.hpp"

namespace kuramoto::io {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::parse_error, std::string(source) + ": " + what);
}

[[noreturn]] void invalid(std::string_view source, const std::string& what) {
  throw Error(ErrorCode::invalid_argument, std::string(source) + ": " + what);
}

json number_array(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round15(v[i]));
  return out;
}

json complex_array(const std::vector<std::complex<double>>& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back({round15(z.real()), round15(z.imag())});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Network files

OscillatorNetwork parse_network_text(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(source, e.what());
  }
  if (!doc.is_object()) parse_fail(source, "top level must be an object");
  for (const char* key : {"n", "omega", "coupling"}) {
    if (!doc.contains(key)) parse_fail(source, std::string("missing field '") + key + "'");
  }

  const json& n_field = doc["n"];
  if (!n_field.is_number_integer()) parse_fail(source, "field 'n' must be an integer");
  const auto n_signed = n_field.get<long long>();
  if (n_signed < 2) invalid(source, "field 'n' must be >= 2, got " + std::to_string(n_signed));
  const auto n = static_cast<std::size_t>(n_signed);
  const std::size_t e = edge_count(n);

  const json& omega_field = doc["omega"];
  if (!omega_field.is_array()) parse_fail(source, "field 'omega' must be an array");
  if (omega_field.size() != n) {
    parse_fail(source, "field 'omega' has " + std::to_string(omega_field.size()) + " entries, expected n = " +
                           std::to_string(n));
  }
  Eigen::VectorXd omega(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!omega_field[i].is_number()) parse_fail(source, "omega[" + std::to_string(i) + "] is not a number");
    omega[static_cast<Eigen::Index>(i)] = omega_field[i].get<double>();
  }

  const json& coupling = doc["coupling"];
  if (!coupling.is_array()) parse_fail(source, "field 'coupling' must be an array");
  std::size_t numbers = 0;
  std::size_t records = 0;
  for (const auto& item : coupling) {
    if (item.is_number()) ++numbers;
    else if (item.is_object()) ++records;
    else parse_fail(source, "field 'coupling' entries must be numbers or {i, j, k} records");
  }
  if (numbers > 0 && records > 0) {
    parse_fail(source, "field 'coupling' mixes the dense gain array and the {i, j, k} record list");
  }

  Eigen::VectorXd gains = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e));
  if (numbers > 0) {
    if (numbers != e) {
      parse_fail(source, "field 'coupling' has " + std::to_string(numbers) + " gains, expected n(n-1)/2 = " +
                             std::to_string(e));
    }
    for (std::size_t k = 0; k < e; ++k) {
      const double g = coupling[k].get<double>();
      if (!(g >= 0.0)) invalid(source, "coupling[" + std::to_string(k) + "] = " + format_number(g) + " is negative");
      gains[static_cast<Eigen::Index>(k)] = g;
    }
  } else {
    std::set<std::size_t> seen;
    for (std::size_t r = 0; r < coupling.size(); ++r) {
      const json& rec = coupling[r];
      const std::string where = "coupling[" + std::to_string(r) + "]";
      for (const char* key : {"i", "j", "k"}) {
        if (!rec.contains(key)) parse_fail(source, where + " is missing '" + key + "'");
      }
      if (!rec["i"].is_number_integer() || !rec["j"].is_number_integer()) {
        parse_fail(source, where + ": 'i' and 'j' must be integers");
      }
      if (!rec["k"].is_number()) parse_fail(source, where + ": 'k' must be a number");
      const auto i = rec["i"].get<long long>();
      const auto j = rec["j"].get<long long>();
      if (i < 1 || j > static_cast<long long>(n) || i >= j) {
        invalid(source, where + ": need 1 <= i < j <= n, got i = " + std::to_string(i) + ", j = " + std::to_string(j));
      }
      const double g = rec["k"].get<double>();
      if (!(g >= 0.0)) invalid(source, where + ": gain " + format_number(g) + " is negative");
      const auto k = edge_index(n, static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
      if (!seen.insert(k).second) {
        invalid(source, where + ": edge (" + std::to_string(i) + ", " + std::to_string(j) + ") listed twice");
      }
      gains[static_cast<Eigen::Index>(k)] = g;
    }
  }

  try {
    return OscillatorNetwork(std::move(omega), std::move(gains));
  } catch (const Error& err) {
    invalid(source, err.what());
  }
}

OscillatorNetwork parse_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open network file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network_text(buffer.str(), path.string());
}

std::string emit_network(const OscillatorNetwork& net) {
  json doc;
  doc["n"] = net.size();
  doc["omega"] = std::vector<double>(net.natural_frequencies().begin(), net.natural_frequencies().end());
  doc["coupling"] = std::vector<double>(net.coupling_gains().begin(), net.coupling_gains().end());
  return doc.dump(2) + "\n";
}

void write_network(const OscillatorNetwork& net, const std::filesystem::path& path) {
  write_file(path, emit_network(net));
}

// ---------------------------------------------------------------------------
// CSV

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

double round15(double value) {
  if (!std::isfinite(value)) return value;
  return std::stod(format_number(value));
}

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
  const auto n = trajectory.thetas.empty() ? 0 : trajectory.thetas.front().size();
  out << 't';
  for (Eigen::Index i = 1; i <= n; ++i) out << ",theta_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",thetadot_" << i;
  out << '\n';
  for (std::size_t s = 0; s < trajectory.size(); ++s) {
    out << format_number(trajectory.times[s]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(trajectory.thetas[s][i]);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(trajectory.theta_dots[s][i]);
    out << '\n';
  }
}

void write_field_csv(const std::vector<FieldSample>& samples, std::ostream& out) {
  out << "x1,x2,dx1,dx2\n";
  for (const auto& s : samples) {
    out << format_number(s.x1) << ',' << format_number(s.x2) << ',' << format_number(s.dx1) << ','
        << format_number(s.dx2) << '\n';
  }
}

void write_boundary_csv(const planar::PlanarParams& p, std::size_t points, std::ostream& out) {
  if (points < 1) throw Error(ErrorCode::invalid_argument, "boundary needs at least one point");
  out << "x1,upper,lower\n";
  for (std::size_t s = 1; s <= points; ++s) {
    const double x1 = -0.5 * kPi + kPi * static_cast<double>(s) / static_cast<double>(points + 1);
    out << format_number(x1) << ',' << format_number(planar::region_G_boundary(x1, p, planar::Side::upper)) << ','
        << format_number(planar::region_G_boundary(x1, p, planar::Side::lower)) << '\n';
  }
}

void write_cone_csv(const planar::PlanarParams& p, double eps, std::size_t points, std::ostream& out) {
  if (points < 1) throw Error(ErrorCode::invalid_argument, "cone sweep needs at least one point");
  if (!(eps > 0.0) || !(eps < 0.5 * kPi)) throw Error(ErrorCode::out_of_domain, "eps must lie in (0, pi/2)");
  out << "a,lo_slope,hi_slope,nontangent\n";
  const double half = 0.5 * kPi - eps;
  for (std::size_t s = 1; s <= points; ++s) {
    const double a = -half + 2.0 * half * static_cast<double>(s) / static_cast<double>(points + 1);
    const auto cone = planar::direction_cone_estimate(a, eps, p);
    out << format_number(a) << ',' << format_number(cone.lo) << ',' << format_number(cone.hi) << ','
        << (planar::nontangency_planar(a, eps, p) ? 1 : 0) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  write_with(path, [&](std::ostream& out) { out << contents; });
}

// ---------------------------------------------------------------------------
// Reports

json bounds_json(const CouplingBounds& bounds) {
  return {
      {"per_edge_sufficient", number_array(bounds.per_edge_sufficient)},
      {"sufficient_met", bounds.sufficient_met},
      {"uniform_K0", round15(bounds.uniform_K0)},
      {"onset_lower", number_array(bounds.onset_lower)},
      {"attracting",
       {{"holds", bounds.attracting.holds},
        {"inequality", bounds.attracting.inequality},
        {"side_condition", bounds.attracting.side_condition},
        {"lhs", round15(bounds.attracting.lhs)},
        {"rhs", round15(bounds.attracting.rhs)},
        {"margin", round15(bounds.attracting.margin)},
        {"delta_m", round15(bounds.attracting.delta_m)}}},
  };
}

json stability_json(const StabilityReport& report) {
  return {
      {"equilibrium", number_array(report.equilibrium_X)},
      {"eigenvalues", complex_array(report.eigenvalues)},
      {"restricted_eigenvalues", complex_array(report.restricted_eigenvalues)},
      {"n_zero", report.n_zero},
      {"expected_zero", report.expected_zero},
      {"classification", std::string(to_string(report.classification))},
  };
}

json invariance_json(const InvarianceReport& report, const InvarianceOptions& options) {
  return {
      {"pass", report.pass()},
      {"bounds_met", report.bounds_met},
      {"samples", report.n_samples},
      {"remained", report.n_remained},
      {"remained_box", report.n_remained_box},
      {"lyapunov_monotone", report.n_lyapunov_monotone},
      {"max_v2_increase", round15(report.max_v2_increase)},
      {"max_v2_dot", round15(report.max_v2_dot)},
      {"draws", report.draws},
      {"horizon", round15(options.horizon)},
      {"dt", round15(options.dt)},
      {"margin", round15(options.margin)},
      {"seed", report.seed},
  };
}

json analysis_report(const OscillatorNetwork& net, const AnalysisOptions& options) {
  json r;
  r["network"] = json::parse(emit_network(net));
  r["connected"] = is_connected(net);
  r["sync_frequency"] = round15(sync_frequency(net));
  r["seed"] = options.invariance.seed;

  try {
    const auto eq = solve_equilibrium(net);
    const auto stability = classify_stability(net, eq.X, options.tol_zero);
    r["equilibrium"] = {{"X", number_array(eq.X)},
                        {"theta", number_array(eq.theta)},
                        {"residual", round15(eq.residual)},
                        {"iterations", eq.iterations}};
    r["eigenvalues"] = complex_array(stability.eigenvalues);
    r["restricted_eigenvalues"] = complex_array(stability.restricted_eigenvalues);
    r["n_zero"] = stability.n_zero;
    r["classification"] = std::string(to_string(stability.classification));
    const Eigen::VectorXd wrapped = wrap_angles(eq.X);
    r["nontangent"] = (wrapped.array().abs() < 0.5 * kPi).all() ? json(nontangency_rank_test(net, wrapped)) : json();
  } catch (const Error& err) {
    r["equilibrium"] = nullptr;
    r["equilibrium_error"] = err.what();
    r["eigenvalues"] = json::array();
    r["classification"] = nullptr;
  }

  r["bounds"] = bounds_json(coupling_bounds(net, options.delta));
  r["bounds"]["delta"] = round15(options.delta);

  try {
    const auto cert = invariance_certificate(net, options.invariance);
    r["certificates"]["invariance"] = invariance_json(cert, options.invariance);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::sampling_infeasible) throw;
    r["certificates"]["invariance"] = {{"pass", false}, {"error", err.what()}};
  }
  return r;
}

// ---------------------------------------------------------------------------
// Experiments

ExperimentId parse_experiment_id(std::string_view name) {
  if (name == "three_chain") return ExperimentId::three_chain;
  if (name == "five_network") return ExperimentId::five_network;
  throw Error(ErrorCode::invalid_argument, "unknown experiment '" + std::string(name) +
                                               "' (expected three_chain or five_network)");
}

std::string_view to_string(ExperimentId id) noexcept {
  return id == ExperimentId::three_chain ? "three_chain" : "five_network";
}

OscillatorNetwork three_chain_network() {
  // The reduced equations ẋ₁ = −1 − 6 sin x₁ − 2 sin x₂, ẋ₂ = −2 − 3 sin x₁ − 4 sin x₂
  // come out of K = diag(K̃)/N with K̃ = 3·(3, 2, 0).
  return OscillatorNetwork(Eigen::Vector3d(1.0, 2.0, 3.0), Eigen::Vector3d(9.0, 6.0, 0.0));
}

OscillatorNetwork five_oscillator_network() {
  Eigen::VectorXd gains = Eigen::VectorXd::Zero(10);
  const std::pair<std::pair<std::size_t, std::size_t>, double> edges[] = {
      {{1, 2}, 10.0}, {{1, 3}, 8.0}, {{2, 3}, 6.0}, {{2, 4}, 12.0}, {{3, 5}, 9.0}, {{4, 5}, 7.0},
  };
  for (const auto& [pair, gain] : edges) gains[static_cast<Eigen::Index>(edge_index(5, pair.first - 1, pair.second - 1))] = gain;
  Eigen::VectorXd omega(5);
  omega << 1.0, 2.0, 3.0, 4.0, 5.0;
  return OscillatorNetwork(omega, gains);
}

Eigen::VectorXd five_oscillator_initial_phases() {
  Eigen::VectorXd theta(5);
  theta << -2.0 * kPi / 3.0, 2.0 * kPi / 3.0, kPi / 3.0, -kPi / 6.0, 0.0;
  return theta;
}

namespace {

ExperimentResult run_three_chain(const ExperimentOptions& options) {
  ExperimentResult result;
  const auto net = three_chain_network();
  const auto& dir = options.output_dir;

  const GridSpec grid{-kPi, kPi, -kPi, kPi, options.grid, options.grid};
  write_with(dir / "field.csv", [&](std::ostream& out) { write_field_csv(vector_field_grid(net, {0, 1}, grid), out); });
  result.files.push_back((dir / "field.csv").string());

  const auto eq = solve_equilibrium(net);
  const auto stability = classify_stability(net, eq.X);

  // Multi-start Newton over the box: every in-box solution must coincide.
  std::size_t in_box = 0;
  double spread = 0.0;
  for (double a : {-1.2, -0.6, 0.0, 0.6, 1.2}) {
    for (double b : {-1.2, -0.6, 0.0, 0.6, 1.2}) {
      try {
        const auto other = solve_equilibrium(net, Eigen::Vector3d(a, b, 0.0));
        const Eigen::VectorXd w = wrap_angles(other.X);
        if ((w.array().abs() < 0.5 * kPi).all()) {
          ++in_box;
          spread = std::max(spread, (w - wrap_angles(eq.X)).lpNorm<Eigen::Infinity>());
        }
      } catch (const Error&) {
      }
    }
  }

  const Eigen::Vector2d expected(0.0, -kPi / 6.0);
  const Eigen::Vector2d found = wrap_angles(eq.X).head(2);
  const double error = (found - expected).lpNorm<Eigen::Infinity>();
  const bool point_ok = error <= 1e-9;
  const bool class_ok = stability.classification == Stability::semistable_candidate;
  const bool unique_ok = in_box > 0 && spread <= 1e-8;
  result.verified = point_ok && class_ok && unique_ok;

  result.report = {
      {"experiment", "three_chain"},
      {"network", json::parse(emit_network(net))},
      {"stability", stability_json(stability)},
      {"fixed_point", {round15(found[0]), round15(found[1])}},
      {"expected_fixed_point", {round15(expected[0]), round15(expected[1])}},
      {"fixed_point_error", round15(error)},
      {"in_box_solutions", in_box},
      {"in_box_spread", round15(spread)},
      {"checks", {{"fixed_point", point_ok}, {"classification", class_ok}, {"unique_in_box", unique_ok}}},
      {"verified", result.verified},
  };
  return result;
}

ExperimentResult run_five_network(const ExperimentOptions& options) {
  ExperimentResult result;
  const auto net = five_oscillator_network();
  const auto& dir = options.output_dir;
  const auto trajectory = simulate(net, five_oscillator_initial_phases(), options.t_end, options.dt);
  write_with(dir / "trajectory.csv", [&](std::ostream& out) { write_trajectory_csv(trajectory, out); });
  result.files.push_back((dir / "trajectory.csv").string());

  const double omega_star = sync_frequency(net);
  const Eigen::VectorXd& final_rates = trajectory.theta_dots.back();
  const double error = (final_rates.array() - 3.0).abs().maxCoeff();
  const auto t_sync = synchronization_time(trajectory, net.incidence());
  const bool mean_ok = std::abs(omega_star - 3.0) <= 1e-12;
  const bool converged = error <= 1e-6;
  result.verified = mean_ok && converged && t_sync.has_value();

  result.report = {
      {"experiment", "five_network"},
      {"network", json::parse(emit_network(net))},
      {"connected", is_connected(net)},
      {"sync_frequency", round15(omega_star)},
      {"final_theta_dot", number_array(final_rates)},
      {"max_frequency_error", round15(error)},
      {"synchronized_at", t_sync ? json(round15(*t_sync)) : json()},
      {"t_end", round15(options.t_end)},
      {"dt", round15(options.dt)},
      {"checks", {{"mean_frequency", mean_ok}, {"converged", converged}, {"sustained", t_sync.has_value()}}},
      {"verified", result.verified},
  };
  return result;
}

}  // namespace

ExperimentResult run_experiment(ExperimentId id, const ExperimentOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(options.output_dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create '" + options.output_dir.string() + "': " + ec.message());

  auto result = id == ExperimentId::three_chain ? run_three_chain(options) : run_five_network(options);
  result.report["seed"] = options.seed;
  const auto report_path = options.output_dir / "report.json";
  write_file(report_path, result.report.dump(2) + "\n");
  result.files.push_back(report_path.string());
  return result;
}

}  // namespace kuramoto::io
