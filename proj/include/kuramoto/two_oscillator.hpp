#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kuramoto/network.hpp"

namespace kuramoto::planar {

/// Two-oscillator system in (x1, x2) = (Δθ, Δθ̇):
/// ẋ1 = x2, ẋ2 = −K x2 cos x1, with Δθ̇ = Δω − K sin Δθ on the physical
/// manifold. K here is the edge gain K̃ of the N = 2 network.
struct PlanarParams {
  double K;
  double delta_omega;

  /// Throws Error(invalid_argument) unless K > 0 and both values are finite.
  PlanarParams(double gain, double frequency_difference);
};

/// N = 2 network with ω = (Δω, 0) and K̃ = (K).
OscillatorNetwork as_network(const PlanarParams& p);

Eigen::Vector2d planar_field(const Eigen::Vector2d& x, const PlanarParams& p);

enum class Side { upper, lower };

/// Boundary of 𝒢: upper K(1 − sin x1), lower −K(1 + sin x1).
/// Throws out_of_domain unless x1 ∈ (−π/2, π/2).
double region_G_boundary(double x1, const PlanarParams& p, Side side);

/// Membership in 𝒢 (x1 bounds open, x2 bounds closed). `tolerance` widens the
/// x2 bounds only.
bool in_region_G(const Eigen::Vector2d& x, const PlanarParams& p, double tolerance = 0.0);

struct SlopeInterval {
  double lo;
  double hi;

  bool contains(double slope) const noexcept { return lo <= slope && slope <= hi; }
};

inline constexpr double kDefaultConeHalfWidth = 0.05;

/// Outer estimate of the direction cone at the equilibrium (a, 0): the lines
/// y2 = p·y1 with p between −K cos(a + ε) and −K cos(a − ε).
/// Throws out_of_domain unless |a| + ε < π/2 and ε > 0.
SlopeInterval direction_cone_estimate(double a, double eps, const PlanarParams& p);

/// True iff the cone estimate at (a, 0) meets the tangent cone {(c, 0)} only
/// at the origin, i.e. no admissible slope is zero.
bool nontangency_planar(double a, double eps, const PlanarParams& p);

struct GlobalSyncReport {
  bool synchronizes = false;          ///< |Δω| ≤ K
  double min_divergence_Q = 0.0;      ///< min of −K cos x1 over the sampled 𝒬
  bool divergence_positive_Q = false;
  std::optional<double> stable_phase;    ///< arcsin(Δω/K) when it exists
  std::optional<double> unstable_phase;  ///< π − arcsin(Δω/K), wrapped
};

/// `q_samples` points are placed on each of the two x1 intervals of 𝒬.
GlobalSyncReport global_sync_verdict(const PlanarParams& p, std::size_t q_samples = 256);

/// RK4 trajectory of the planar field, including the start point.
std::vector<Eigen::Vector2d> integrate_planar(const PlanarParams& p, const Eigen::Vector2d& x0,
                                              double t_end, double dt);

}  // namespace kuramoto::planar
