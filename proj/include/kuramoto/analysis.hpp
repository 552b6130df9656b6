#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/network.hpp"

namespace kuramoto {

// ---------------------------------------------------------------------------
// Equilibria and linearization

struct Equilibrium {
  Eigen::VectorXd theta;  ///< node phases with θ_N = 0
  Eigen::VectorXd X;      ///< Bᵀθ, not wrapped
  double residual = 0.0;  ///< ‖Bᵀω − BᵀBK sin X‖∞
  int iterations = 0;
};

struct NewtonOptions {
  int max_iterations = 100;
  double tolerance = 1e-12;
};

/// Phase-locked state near `theta_guess` (zeros when omitted).
///
/// Throws invalid_argument for a disconnected network, no_equilibrium when
/// Newton does not reach the tolerance, singular_jacobian when the grounded
/// Jacobian is singular at an iterate.
Equilibrium solve_equilibrium(const OscillatorNetwork& net,
                              const std::optional<Eigen::VectorXd>& theta_guess = std::nullopt,
                              const NewtonOptions& options = {});

/// A = [[0, I], [0, G(X*)]], 2e × 2e.
Eigen::MatrixXd linearize(const OscillatorNetwork& net, const Eigen::VectorXd& X_star);

enum class Stability { semistable_candidate, unstable, indeterminate };

std::string_view to_string(Stability s) noexcept;

struct StabilityReport {
  Eigen::VectorXd equilibrium_X;
  std::vector<std::complex<double>> eigenvalues;             ///< spectrum of A, length 2e
  std::vector<std::complex<double>> restricted_eigenvalues;  ///< G on Col(Bᵀ), length N−1
  std::size_t n_zero = 0;
  std::size_t expected_zero = 0;  ///< 2e − (N − 1)
  Stability classification = Stability::indeterminate;
};

/// `tol_zero` is scaled by max(1, ‖A‖∞).
StabilityReport classify_stability(const OscillatorNetwork& net, const Eigen::VectorXd& X_star,
                                   double tol_zero = 1e-9);

// ---------------------------------------------------------------------------
// Coupling-gain bounds

/// (N/2)|eᵢᵀBᵀω| per edge: gains at or above these keep ℋ positively invariant.
Eigen::VectorXd sufficient_gain_bounds(const OscillatorNetwork& net);

/// N‖Bᵀω‖∞ / (2(N − 1)), the uniform all-to-all threshold.
double uniform_critical_gain(const OscillatorNetwork& net);

/// Per edge, (2/N)K̃ᵢ + (1/N)Σ_{j≠i}|(BᵀB)ᵢⱼ|K̃ⱼ: the largest restoring term
/// the edge can see. ℋ cannot hold an edge whose |eᵢᵀBᵀω| reaches it.
Eigen::VectorXd onset_lower_bounds(const OscillatorNetwork& net);

struct AttractingCheck {
  bool holds = false;           ///< inequality and side condition
  bool inequality = false;
  bool side_condition = false;  ///< nonzero K̃ᵢ ≥ (N − 2)Δₘ/2
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;   ///< lhs − rhs
  double delta_m = 0.0;  ///< max − min over nonzero gains
};

/// Sufficient condition for ℋ to attract the region with |xᵢ| < π − δ.
/// Throws invalid_argument unless δ ∈ (0, π).
AttractingCheck attracting_set_check(const OscillatorNetwork& net, double delta);

struct CouplingBounds {
  Eigen::VectorXd per_edge_sufficient;
  double uniform_K0 = 0.0;
  Eigen::VectorXd onset_lower;
  AttractingCheck attracting;
  bool sufficient_met = false;  ///< K̃ ≥ per_edge_sufficient componentwise
};

CouplingBounds coupling_bounds(const OscillatorNetwork& net, double delta);

/// Mean natural frequency, the common limit frequency.
double sync_frequency(const OscillatorNetwork& net);

// ---------------------------------------------------------------------------
// Invariant set ℋ

struct HMembership {
  bool inside = false;
  bool in_box = false;             ///< every |xᵢ| < π/2
  bool in_column_space = false;    ///< X ∈ Col(Bᵀ)
  bool velocity_consistent = false;  ///< V = Bᵀω − BᵀBK sin X
  bool inequality = false;         ///< per-edge slack ≥ 0
  Eigen::VectorXd slack;           ///< RHS − LHS of the per-edge inequality
};

HMembership in_set_H(const EdgeState& state, const OscillatorNetwork& net, double tolerance = 1e-9);

/// Norm of the component of X outside Col(Bᵀ); uses the projector BᵀB/N.
double column_space_residual(const Eigen::VectorXd& X, const OscillatorNetwork& net);

struct InvarianceOptions {
  std::size_t n_samples = 100;
  double horizon = 50.0;
  double dt = kDefaultStep;
  double margin = 0.01;  ///< initial |xᵢ| < π/2 − margin
  std::uint64_t seed = 0;
  std::size_t max_draws = 100000;
  std::size_t workers = 0;  ///< 0: hardware concurrency
};

struct InvarianceReport {
  bool bounds_met = false;
  std::size_t n_samples = 0;
  std::size_t n_remained = 0;         ///< trajectories with every stored state in ℋ
  std::size_t n_remained_box = 0;     ///< same, ignoring the per-edge 𝒥 inequality
  std::size_t n_lyapunov_monotone = 0;  ///< V₂ non-increasing and V̇₂ ≤ 1e-12 at every step
  double max_v2_increase = 0.0;
  double max_v2_dot = 0.0;
  std::size_t draws = 0;              ///< rejection-sampling draws used
  std::uint64_t seed = 0;

  bool pass() const noexcept { return n_samples > 0 && n_remained == n_samples; }
};

/// Draws θ with every |(Bᵀθ)ᵢ| < π/2 − margin by rejection from
/// θ ∈ [−π/2, π/2]ᴺ. Throws sampling_infeasible after `max_draws` rejections.
std::vector<Eigen::VectorXd> sample_box_states(const OscillatorNetwork& net, std::size_t count,
                                               double margin, std::mt19937_64& rng,
                                               std::size_t max_draws, std::size_t* draws_used = nullptr);

/// Monte-Carlo check that trajectories started in ℋ stay there, with the V₂
/// Lyapunov bookkeeping on the same runs.
InvarianceReport invariance_certificate(const OscillatorNetwork& net, const InvarianceOptions& options);

// ---------------------------------------------------------------------------
// Nontangency and Lyapunov functions

/// Rank of G(X) restricted to Col(Bᵀ), threshold 1e-10·σ_max.
std::size_t restricted_rank(const OscillatorNetwork& net, const Eigen::VectorXd& X);

/// True iff G(X)v = 0 has no nonzero solution v ∈ Col(Bᵀ).
/// Throws out_of_domain unless X ∈ (−π/2, π/2)ᵉ.
bool nontangency_rank_test(const OscillatorNetwork& net, const Eigen::VectorXd& X);

struct LyapunovSample {
  double v2;
  double v2_dot;
};

/// V₂ = ‖V‖²/2 and V̇₂ = VᵀG(X)V at each stored step.
std::vector<LyapunovSample> lyapunov_v2_along(const Trajectory& trajectory, const OscillatorNetwork& net);

/// V₃ = Σ|xᵢ| − (N − 1)π/2.
double lyapunov_v3(const Eigen::VectorXd& X, std::size_t n);

/// Set-valued Lie derivative of V₃ along (X, V): Σ sign(xᵢ)vᵢ, or nullopt
/// (the empty set) when some xᵢ = 0 has vᵢ ≠ 0.
std::optional<double> lyapunov_v3_derivative(const Eigen::VectorXd& X, const Eigen::VectorXd& V);

}  // namespace kuramoto
