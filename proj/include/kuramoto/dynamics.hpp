#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/network.hpp"

namespace kuramoto {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps an angle to (-π, π].
double wrap_angle(double x) noexcept;
Eigen::VectorXd wrap_angles(const Eigen::VectorXd& x);

/// Phase and frequency differences across every edge.
struct EdgeState {
  Eigen::VectorXd X;  ///< Bᵀθ wrapped to (-π, π]
  Eigen::VectorXd V;  ///< Bᵀθ̇
};

/// θ̇ = ω − B K sin(Bᵀθ).
Eigen::VectorXd theta_dot(const Eigen::VectorXd& theta, const OscillatorNetwork& net);

/// Edge-space velocity Bᵀω − BᵀBK sin(X); equals Bᵀθ̇ when X = Bᵀθ.
Eigen::VectorXd edge_velocity(const Eigen::VectorXd& X, const OscillatorNetwork& net);

EdgeState edge_transform(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_dot,
                         const IncidenceMatrix& b);

/// G(X) = −BᵀB K diag(cos X).
Eigen::MatrixXd g_matrix(const Eigen::VectorXd& X, const OscillatorNetwork& net);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> thetas;      ///< wrapped to (-π, π]
  std::vector<Eigen::VectorXd> theta_dots;  ///< f(θ) at the stored point

  std::size_t size() const noexcept { return times.size(); }
  std::vector<EdgeState> edge_states(const IncidenceMatrix& b) const;
};

/// Called once per stored step with the unwrapped phases. Returning false
/// stops the integration after that step.
using StepObserver = std::function<bool(std::size_t step, double t, const Eigen::VectorXd& theta,
                                        const Eigen::VectorXd& theta_dot)>;

/// Fixed-step RK4 of the phase dynamics on unwrapped phases. The observer sees
/// step 0 (the initial state) and every step after it; t_k = k·dt.
/// Returns the number of steps taken.
std::size_t integrate(const OscillatorNetwork& net, const Eigen::VectorXd& theta0, double t_end,
                      double dt, const StepObserver& observer);

/// Default step, seconds.
inline constexpr double kDefaultStep = 0.01;

/// Stores wrapped phases of every step of `integrate`.
Trajectory simulate(const OscillatorNetwork& net, const Eigen::VectorXd& theta0, double t_end,
                    double dt = kDefaultStep);

/// First time after which ‖V‖∞ stays below `tolerance` for `hold` seconds of
/// stored samples, or nullopt if that never happens within the trajectory.
std::optional<double> synchronization_time(const Trajectory& trajectory, const IncidenceMatrix& b,
                                           double tolerance = 1e-6, double hold = 1.0);

/// Rebuilds a continuous phase series from wrapped samples (no jumps > π).
std::vector<double> unwrap_series(const std::vector<double>& wrapped);

struct FieldSample {
  double x1, x2, dx1, dx2;
};

struct GridSpec {
  double x1_min, x1_max;
  double x2_min, x2_max;
  std::size_t n1, n2;  ///< samples per axis, endpoints included
};

/// Planar reduced field at (x1, x2).
///
/// N = 2: (x1, x2) = (Δθ, Δθ̇) with (ẋ1, ẋ2) = (x2, −K̃ x2 cos x1).
/// N = 3: (x1, x2) are the phase differences of edges `coords`; the third edge
/// follows from X ∈ Col(Bᵀ) and the field is the matching rows of
/// Bᵀω − BᵀBK sin X.
FieldSample reduced_field(const OscillatorNetwork& net, std::pair<std::size_t, std::size_t> coords,
                          double x1, double x2);

/// Samples reduced_field over a rectangular grid; x1 is the outer loop.
/// Throws unsupported for N > 3.
std::vector<FieldSample> vector_field_grid(const OscillatorNetwork& net,
                                           std::pair<std::size_t, std::size_t> coords,
                                           const GridSpec& grid);

}  // namespace kuramoto
