#include <doctest.h>

#include <cmath>
#include <random>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/error.hpp"
#include "kuramoto/two_oscillator.hpp"

using kuramoto::ErrorCode;
using kuramoto::kPi;
using kuramoto::planar::PlanarParams;
using kuramoto::planar::Side;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const kuramoto::Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

// Uniform draw from 𝒢 with the level x₂ + K sin x₁ restricted to [−fraction·K, fraction·K].
Eigen::Vector2d sample_region(const PlanarParams& p, std::mt19937_64& rng, double fraction = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double x1 = (kPi / 2) * 0.999999 * u(rng);
  const double level = fraction * p.K * u(rng);
  return {x1, level - p.K * std::sin(x1)};
}

}  // namespace

TEST_CASE("planar parameters") {
  CHECK_NOTHROW(PlanarParams(1.0, 0.5));
  CHECK(code_of([] { PlanarParams(0.0, 0.5); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { PlanarParams(-1.0, 0.5); }) == ErrorCode::invalid_argument);

  const auto net = kuramoto::planar::as_network(PlanarParams(2.0, 0.5));
  CHECK(net.size() == 2);
  CHECK(net.natural_frequencies()[0] - net.natural_frequencies()[1] == doctest::Approx(0.5));
  CHECK(net.coupling_gains()[0] == doctest::Approx(2.0));
}

TEST_CASE("planar field examples") {
  const PlanarParams p(1.0, 0.3);
  for (double a : {-2.0, 0.0, 1.1}) CHECK(kuramoto::planar::planar_field({a, 0.0}, p).isZero());
  CHECK(kuramoto::planar::planar_field({0.0, 1.0}, p).isApprox(Eigen::Vector2d(1, -1)));
  const auto f = kuramoto::planar::planar_field({kPi / 2, 0.7}, p);
  CHECK(f[0] == doctest::Approx(0.7));
  CHECK(std::abs(f[1]) < 1e-15);
}

TEST_CASE("planar field matches the phase dynamics") {
  // x₁ = θ₁ − θ₂ and x₂ = ẋ₁ evolve under the planar field.
  const PlanarParams p(1.3, 0.4);
  const auto net = kuramoto::planar::as_network(p);
  const Eigen::Vector2d theta(0.7, -0.2);
  const double h = 1e-6;
  auto x2_of = [&](const Eigen::VectorXd& th) {
    const auto r = kuramoto::theta_dot(th, net);
    return r[0] - r[1];
  };
  const auto r = kuramoto::theta_dot(theta, net);
  const double x2 = r[0] - r[1];
  const double x2_dot = (x2_of(theta + h * r) - x2_of(theta - h * r)) / (2 * h);
  const auto f = kuramoto::planar::planar_field({theta[0] - theta[1], x2}, p);
  CHECK(f[0] == doctest::Approx(x2));
  CHECK(f[1] == doctest::Approx(x2_dot).epsilon(1e-6));
}

TEST_CASE("region boundaries") {
  const PlanarParams p(1.0, 0.0);
  CHECK(kuramoto::planar::region_G_boundary(0.0, p, Side::upper) == doctest::Approx(1.0));
  CHECK(kuramoto::planar::region_G_boundary(0.0, p, Side::lower) == doctest::Approx(-1.0));
  CHECK(std::abs(kuramoto::planar::region_G_boundary(kPi / 2 - 1e-7, p, Side::upper)) < 1e-12);
  CHECK(code_of([&] { kuramoto::planar::region_G_boundary(kPi / 2, p, Side::upper); }) == ErrorCode::out_of_domain);
  CHECK(code_of([&] { kuramoto::planar::region_G_boundary(-2.0, p, Side::lower); }) == ErrorCode::out_of_domain);

  const PlanarParams q(2.5, 0.0);
  CHECK(kuramoto::planar::region_G_boundary(0.4, q, Side::upper) == doctest::Approx(2.5 * (1 - std::sin(0.4))));
  CHECK(kuramoto::planar::region_G_boundary(0.4, q, Side::lower) == doctest::Approx(-2.5 * (1 + std::sin(0.4))));
}

TEST_CASE("upper boundary is a trajectory") {
  const PlanarParams p(1.0, 0.0);
  const auto path = kuramoto::planar::integrate_planar(p, {0.0, p.K}, 50.0, 0.01);
  REQUIRE(path.size() == 5001);
  for (const auto& x : path) CHECK(std::abs(x[1] + p.K * std::sin(x[0]) - p.K) < 1e-6);
}

TEST_CASE("region membership") {
  for (double k : {0.5, 1.0, 3.0}) {
    const PlanarParams p(k, 0.0);
    CHECK(kuramoto::planar::in_region_G({0.0, 0.0}, p));
    CHECK(kuramoto::planar::in_region_G({0.0, k}, p));
    CHECK(kuramoto::planar::in_region_G({0.0, -k}, p));
    CHECK_FALSE(kuramoto::planar::in_region_G({0.0, k * 1.001}, p));
    CHECK_FALSE(kuramoto::planar::in_region_G({kPi / 2, 0.0}, p));
    CHECK_FALSE(kuramoto::planar::in_region_G({-kPi / 2, 0.0}, p));
    CHECK(kuramoto::planar::in_region_G({0.0, k * (1 + 1e-9)}, p, 1e-7));
  }
}

TEST_CASE("region is positively invariant") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> gain(0.2, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const PlanarParams p(gain(rng), 0.0);
    const auto x0 = sample_region(p, rng);
    REQUIRE(kuramoto::planar::in_region_G(x0, p));
    const auto path = kuramoto::planar::integrate_planar(p, x0, 50.0, 0.01);
    bool stayed = true;
    for (const auto& x : path) stayed = stayed && kuramoto::planar::in_region_G(x, p, 1e-7);
    CHECK(stayed);
  }
}

TEST_CASE("boundary level is conserved by the field") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const PlanarParams p(gain(rng), 0.0);
    const Eigen::Vector2d x(u(rng), u(rng));
    const auto f = kuramoto::planar::planar_field(x, p);
    CHECK(std::abs(f[1] + p.K * std::cos(x[0]) * f[0]) <= 1e-12);
  }
}

TEST_CASE("kinetic energy decreases to a stable equilibrium") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> gain(0.5, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const PlanarParams p(gain(rng), 0.0);
    const auto x0 = sample_region(p, rng, 0.95);
    const auto path = kuramoto::planar::integrate_planar(p, x0, 100.0, 0.01);
    bool monotone = true;
    for (std::size_t s = 1; s < path.size(); ++s) {
      monotone = monotone && path[s][1] * path[s][1] / 2 <= path[s - 1][1] * path[s - 1][1] / 2 + 1e-9;
    }
    CHECK(monotone);
    const auto limit = path.back();
    CHECK(std::abs(limit[1]) < 1e-6);
    CHECK(std::abs(limit[0]) < kPi / 2);

    const Eigen::Vector2d kicked = limit + Eigen::Vector2d(1e-3, -1e-3);
    const auto again = kuramoto::planar::integrate_planar(p, kicked, 100.0, 0.01).back();
    CHECK(std::abs(again[1]) < 1e-6);
    CHECK((again - limit).norm() < 1e-2);
  }
}

TEST_CASE("direction cone estimate") {
  const PlanarParams p(1.0, 0.0);
  const auto flat = kuramoto::planar::direction_cone_estimate(0.0, 0.1, p);
  CHECK(flat.lo == doctest::Approx(-std::cos(0.1)));
  CHECK(flat.hi == doctest::Approx(-std::cos(0.1)));

  const auto c = kuramoto::planar::direction_cone_estimate(kPi / 4, 0.1, p);
  CHECK(c.lo == doctest::Approx(-std::cos(0.685398163397448)));
  CHECK(c.hi == doctest::Approx(-std::cos(0.885398163397448)));
  const auto m = kuramoto::planar::direction_cone_estimate(-kPi / 4, 0.1, p);
  CHECK(m.lo == doctest::Approx(c.lo));
  CHECK(m.hi == doctest::Approx(c.hi));
  CHECK(m.lo <= m.hi);

  const PlanarParams strong(3.0, 0.0);
  const auto s = kuramoto::planar::direction_cone_estimate(0.5, 0.2, strong);
  CHECK(s.lo == doctest::Approx(-3.0 * std::cos(0.3)));
  CHECK(s.hi == doctest::Approx(-3.0 * std::cos(0.7)));

  CHECK(code_of([&] { kuramoto::planar::direction_cone_estimate(1.47, 0.2, p); }) == ErrorCode::out_of_domain);
  CHECK(code_of([&] { kuramoto::planar::direction_cone_estimate(0.0, 0.0, p); }) == ErrorCode::out_of_domain);
  CHECK(code_of([&] { kuramoto::planar::nontangency_planar(-1.5, 0.1, p); }) == ErrorCode::out_of_domain);
}

TEST_CASE("nontangency across the equilibrium segment") {
  const PlanarParams p(1.0, 0.0);
  CHECK(kuramoto::planar::nontangency_planar(0.0, 0.1, p));
  const double eps = kuramoto::planar::kDefaultConeHalfWidth;
  for (int i = 1; i <= 100; ++i) {
    const double a = -kPi / 2 + eps + (kPi - 2 * eps) * i / 101.0;
    const auto cone = kuramoto::planar::direction_cone_estimate(a, eps, p);
    CHECK_FALSE(cone.contains(0.0));
    CHECK(kuramoto::planar::nontangency_planar(a, eps, p));
  }
}

TEST_CASE("global synchronization verdict") {
  const auto yes = kuramoto::planar::global_sync_verdict(PlanarParams(1.0, 0.5));
  CHECK(yes.synchronizes);
  CHECK(yes.divergence_positive_Q);
  CHECK(yes.min_divergence_Q > 0.0);
  REQUIRE(yes.stable_phase.has_value());
  REQUIRE(yes.unstable_phase.has_value());
  CHECK(*yes.stable_phase == doctest::Approx(kPi / 6));
  CHECK(*yes.unstable_phase == doctest::Approx(5 * kPi / 6));

  const auto edge = kuramoto::planar::global_sync_verdict(PlanarParams(1.0, 1.0));
  CHECK(edge.synchronizes);
  REQUIRE(edge.stable_phase.has_value());
  CHECK(*edge.stable_phase == doctest::Approx(kPi / 2));

  const auto no = kuramoto::planar::global_sync_verdict(PlanarParams(1.0, 1.5));
  CHECK_FALSE(no.synchronizes);
  CHECK_FALSE(no.stable_phase.has_value());

  // Without a locked state the unwrapped phase difference drifts without bound.
  const auto net = kuramoto::planar::as_network(PlanarParams(1.0, 1.5));
  const auto traj = kuramoto::simulate(net, Eigen::Vector2d::Zero(), 200.0);
  std::vector<double> dx;
  for (const auto& th : traj.thetas) dx.push_back(kuramoto::wrap_angle(th[0] - th[1]));
  const auto un = kuramoto::unwrap_series(dx);
  CHECK(un.back() > 100.0);
  CHECK(un[un.size() / 2] < un.back());
}

TEST_CASE("phase difference locks at arcsin for sub-critical detuning") {
  for (double ratio : {-0.9, -0.5, -0.1, 0.0, 0.3, 0.7, 0.95}) {
    const PlanarParams p(2.0, 2.0 * ratio);
    const auto traj = kuramoto::simulate(kuramoto::planar::as_network(p), Eigen::Vector2d(1.0, -1.0), 150.0);
    const auto& th = traj.thetas.back();
    CHECK(kuramoto::wrap_angle(th[0] - th[1]) == doctest::Approx(std::asin(ratio)).epsilon(1e-6).scale(1.0));
  }
}
