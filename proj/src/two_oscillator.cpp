#include "kuramoto/two_oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/error.hpp"
#include "kuramoto/rk4.hpp"

namespace kuramoto::planar {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

}  // namespace

PlanarParams::PlanarParams(double gain, double frequency_difference)
    : K(gain), delta_omega(frequency_difference) {
  if (!std::isfinite(K) || !(K > 0.0)) throw Error(ErrorCode::invalid_argument, "planar gain K must be > 0");
  if (!std::isfinite(delta_omega)) throw Error(ErrorCode::invalid_argument, "delta_omega must be finite");
}

OscillatorNetwork as_network(const PlanarParams& p) {
  return OscillatorNetwork(Eigen::Vector2d(p.delta_omega, 0.0), Eigen::VectorXd::Constant(1, p.K));
}

Eigen::Vector2d planar_field(const Eigen::Vector2d& x, const PlanarParams& p) {
  return {x[1], -p.K * x[1] * std::cos(x[0])};
}

double region_G_boundary(double x1, const PlanarParams& p, Side side) {
  if (!(std::abs(x1) < kHalfPi)) {
    throw Error(ErrorCode::out_of_domain, "x1 = " + std::to_string(x1) + " outside (-pi/2, pi/2)");
  }
  const double s = std::sin(x1);
  return side == Side::upper ? p.K * (1.0 - s) : -p.K * (1.0 + s);
}

bool in_region_G(const Eigen::Vector2d& x, const PlanarParams& p, double tolerance) {
  if (!(std::abs(x[0]) < kHalfPi)) return false;
  const double s = std::sin(x[0]);
  return x[1] >= -p.K * (1.0 + s) - tolerance && x[1] <= p.K * (1.0 - s) + tolerance;
}

SlopeInterval direction_cone_estimate(double a, double eps, const PlanarParams& p) {
  if (!(eps > 0.0) || !(std::abs(a) + eps < kHalfPi)) {
    throw Error(ErrorCode::out_of_domain,
                "cone estimate needs eps > 0 and |a| + eps < pi/2 (a = " + std::to_string(a) +
                    ", eps = " + std::to_string(eps) + ")");
  }
  const double first = -p.K * std::cos(a + eps);
  const double second = -p.K * std::cos(a - eps);
  return {std::min(first, second), std::max(first, second)};
}

bool nontangency_planar(double a, double eps, const PlanarParams& p) {
  const auto cone = direction_cone_estimate(a, eps, p);
  return !cone.contains(0.0);
}

GlobalSyncReport global_sync_verdict(const PlanarParams& p, std::size_t q_samples) {
  GlobalSyncReport report;
  report.synchronizes = std::abs(p.delta_omega) <= p.K;

  // 𝒬 projects onto x1 ∈ (−π, −π/2) ∪ (π/2, π]; sample both pieces away from
  // the excluded endpoints ±π/2.
  const std::size_t m = std::max<std::size_t>(q_samples, 1);
  double min_div = std::numeric_limits<double>::infinity();
  for (std::size_t s = 1; s <= m; ++s) {
    const double upper = kHalfPi + kHalfPi * static_cast<double>(s) / static_cast<double>(m);
    const double lower = -kHalfPi - kHalfPi * static_cast<double>(s) / static_cast<double>(m + 1);
    min_div = std::min({min_div, -p.K * std::cos(upper), -p.K * std::cos(lower)});
  }
  report.min_divergence_Q = min_div;
  report.divergence_positive_Q = min_div > 0.0;

  if (report.synchronizes) {
    const double stable = std::asin(p.delta_omega / p.K);
    report.stable_phase = stable;
    report.unstable_phase = wrap_angle(kPi - stable);
  }
  return report;
}

std::vector<Eigen::Vector2d> integrate_planar(const PlanarParams& p, const Eigen::Vector2d& x0,
                                              double t_end, double dt) {
  if (!(dt > 0.0) || !(t_end >= dt)) throw Error(ErrorCode::invalid_argument, "need dt > 0 and t_end >= dt");
  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  const auto field = [&p](const Eigen::Vector2d& x) { return planar_field(x, p); };
  std::vector<Eigen::Vector2d> out;
  out.reserve(steps + 1);
  out.push_back(x0);
  for (std::size_t s = 0; s < steps; ++s) out.push_back(rk4_step(field, out.back(), dt));
  return out;
}

}  // namespace kuramoto::planar
