#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kuramoto/analysis.hpp"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/network.hpp"
#include "kuramoto/two_oscillator.hpp"

namespace kuramoto::io {

// Network definition files:
//   {"n": 3, "omega": [1, 2, 3], "coupling": [9, 6, 0]}
//   {"n": 3, "omega": [1, 2, 3], "coupling": [{"i": 1, "j": 2, "k": 9}, ...]}
// Record indices are 1-based with i < j; unlisted edges get 0.

/// `source` names the input in error messages.
OscillatorNetwork parse_network_text(std::string_view text, std::string_view source = "<string>");
OscillatorNetwork parse_network(const std::filesystem::path& path);

/// Dense-array form; parse_network_text(emit_network(net)) == net.
std::string emit_network(const OscillatorNetwork& net);
void write_network(const OscillatorNetwork& net, const std::filesystem::path& path);

/// "%.15g".
std::string format_number(double value);
/// Rounds to 15 significant digits so JSON output carries at most 15.
double round15(double value);

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);
void write_field_csv(const std::vector<FieldSample>& samples, std::ostream& out);
/// `x1,upper,lower` over `points` interior samples of (−π/2, π/2).
void write_boundary_csv(const planar::PlanarParams& p, std::size_t points, std::ostream& out);
/// `a,lo_slope,hi_slope,nontangent` over `points` samples of (−π/2 + ε, π/2 − ε).
void write_cone_csv(const planar::PlanarParams& p, double eps, std::size_t points, std::ostream& out);

/// Opens `path` for writing or throws io_error.
void write_file(const std::filesystem::path& path, const std::string& contents);
template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer);

// Reports

nlohmann::json bounds_json(const CouplingBounds& bounds);
nlohmann::json stability_json(const StabilityReport& report);
nlohmann::json invariance_json(const InvarianceReport& report, const InvarianceOptions& options);

struct AnalysisOptions {
  double delta = 0.1;
  double tol_zero = 1e-9;
  InvarianceOptions invariance;
};

/// Fields: network, equilibrium, eigenvalues, classification, bounds,
/// certificates, sync_frequency, seed.
nlohmann::json analysis_report(const OscillatorNetwork& net, const AnalysisOptions& options);

// Experiments

enum class ExperimentId { three_chain, five_network };

ExperimentId parse_experiment_id(std::string_view name);
std::string_view to_string(ExperimentId id) noexcept;

/// N = 3 open chain, ω = (1, 2, 3), K̃ = (9, 6, 0).
OscillatorNetwork three_chain_network();
/// N = 5, ω = (1, …, 5), the shipped five-oscillator topology.
OscillatorNetwork five_oscillator_network();
/// θ(0) of the five-oscillator run.
Eigen::VectorXd five_oscillator_initial_phases();

struct ExperimentOptions {
  std::filesystem::path output_dir = ".";
  std::size_t grid = 41;
  double t_end = 100.0;
  double dt = kDefaultStep;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  bool verified = false;
  nlohmann::json report;
  std::vector<std::string> files;  ///< written outputs
};

/// Runs one reproduction end to end, writes CSVs and report.json into
/// `output_dir`. `verified` is false when a quantitative check misses.
ExperimentResult run_experiment(ExperimentId id, const ExperimentOptions& options);

}  // namespace kuramoto::io

#include <fstream>

#include "kuramoto/error.hpp"

namespace kuramoto::io {

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "' for writing");
  writer(out);
  if (!out) throw Error(ErrorCode::io_error, "write to '" + path.string() + "' failed");
}

}  // namespace kuramoto::io
