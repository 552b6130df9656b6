#include "kuramoto/dynamics.hpp"

#include <cmath>
#include <string>

#include "kuramoto/error.hpp"
#include "kuramoto/rk4.hpp"

namespace kuramoto {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

void require_size(const Eigen::VectorXd& v, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(v.size()) != expected) {
    throw Error(ErrorCode::invalid_argument, std::string(what) + " has length " +
                                                 std::to_string(v.size()) + ", expected " +
                                                 std::to_string(expected));
  }
}

}  // namespace

double wrap_angle(double x) noexcept {
  double r = std::fmod(x + kPi, kTwoPi);
  if (r <= 0.0) r += kTwoPi;
  return r - kPi;
}

Eigen::VectorXd wrap_angles(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return wrap_angle(v); });
}

Eigen::VectorXd theta_dot(const Eigen::VectorXd& theta, const OscillatorNetwork& net) {
  const auto n = net.size();
  require_size(theta, n, "theta");
  const auto& k = net.coupling_matrix_diagonal();
  Eigen::VectorXd dot = net.natural_frequencies();
  Eigen::Index edge = 0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j, ++edge) {
      if (k[edge] == 0.0) continue;
      const double flow = k[edge] * std::sin(theta[i] - theta[j]);
      dot[i] -= flow;
      dot[j] += flow;
    }
  }
  return dot;
}

Eigen::VectorXd edge_velocity(const Eigen::VectorXd& X, const OscillatorNetwork& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  require_size(X, net.edge_count(), "X");
  const auto& k = net.coupling_matrix_diagonal();
  const auto& omega = net.natural_frequencies();
  // Node-space coupling term B K sin X, then difference across each edge.
  Eigen::VectorXd node = Eigen::VectorXd::Zero(n);
  Eigen::Index edge = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++edge) {
      const double flow = k[edge] * std::sin(X[edge]);
      node[i] += flow;
      node[j] -= flow;
    }
  }
  Eigen::VectorXd v(X.size());
  edge = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++edge) {
      v[edge] = (omega[i] - omega[j]) - (node[i] - node[j]);
    }
  }
  return v;
}

EdgeState edge_transform(const Eigen::VectorXd& theta, const Eigen::VectorXd& theta_dot,
                         const IncidenceMatrix& b) {
  require_size(theta, b.nodes(), "theta");
  require_size(theta_dot, b.nodes(), "theta_dot");
  const Eigen::MatrixXd& bm = b.real();
  return {wrap_angles(bm.transpose() * theta), bm.transpose() * theta_dot};
}

Eigen::MatrixXd g_matrix(const Eigen::VectorXd& X, const OscillatorNetwork& net) {
  require_size(X, net.edge_count(), "X");
  const Eigen::VectorXd weights =
      net.coupling_matrix_diagonal().cwiseProduct(X.array().cos().matrix());
  return -(net.edge_laplacian() * weights.asDiagonal());
}

std::vector<EdgeState> Trajectory::edge_states(const IncidenceMatrix& b) const {
  std::vector<EdgeState> out;
  out.reserve(size());
  for (std::size_t s = 0; s < size(); ++s) out.push_back(edge_transform(thetas[s], theta_dots[s], b));
  return out;
}

std::size_t integrate(const OscillatorNetwork& net, const Eigen::VectorXd& theta0, double t_end,
                      double dt, const StepObserver& observer) {
  require_size(theta0, net.size(), "theta0");
  if (!std::isfinite(dt) || dt <= 0.0) throw Error(ErrorCode::invalid_argument, "dt must be finite and > 0");
  if (!std::isfinite(t_end) || t_end < dt) {
    throw Error(ErrorCode::invalid_argument, "t_end must be finite and >= dt");
  }
  if (!theta0.allFinite()) throw Error(ErrorCode::invalid_argument, "theta0 is not finite");

  const auto steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
  const auto field = [&net](const Eigen::VectorXd& theta) { return theta_dot(theta, net); };

  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd rate = field(theta);
  if (observer && !observer(0, 0.0, theta, rate)) return 0;
  for (std::size_t step = 1; step <= steps; ++step) {
    theta = rk4_step(field, theta, dt);
    if (!theta.allFinite()) {
      throw Error(ErrorCode::divergence, "non-finite state at step " + std::to_string(step));
    }
    rate = field(theta);
    if (observer && !observer(step, static_cast<double>(step) * dt, theta, rate)) return step;
  }
  return steps;
}

Trajectory simulate(const OscillatorNetwork& net, const Eigen::VectorXd& theta0, double t_end, double dt) {
  Trajectory out;
  integrate(net, theta0, t_end, dt,
            [&out](std::size_t, double t, const Eigen::VectorXd& theta, const Eigen::VectorXd& rate) {
              out.times.push_back(t);
              out.thetas.push_back(wrap_angles(theta));
              out.theta_dots.push_back(rate);
              return true;
            });
  return out;
}

std::optional<double> synchronization_time(const Trajectory& trajectory, const IncidenceMatrix& b,
                                           double tolerance, double hold) {
  if (trajectory.size() == 0) return std::nullopt;
  const Eigen::MatrixXd bt = b.real().transpose();
  std::optional<std::size_t> start;
  for (std::size_t s = trajectory.size(); s-- > 0;) {
    const double v = (bt * trajectory.theta_dots[s]).lpNorm<Eigen::Infinity>();
    if (v >= tolerance) break;
    start = s;
  }
  if (!start) return std::nullopt;
  const double t0 = trajectory.times[*start];
  if (trajectory.times.back() - t0 < hold - 1e-12) return std::nullopt;
  return t0;
}

std::vector<double> unwrap_series(const std::vector<double>& wrapped) {
  std::vector<double> out(wrapped.size());
  double offset = 0.0;
  for (std::size_t s = 0; s < wrapped.size(); ++s) {
    if (s > 0) {
      const double jump = wrapped[s] - wrapped[s - 1];
      if (jump > kPi) offset -= kTwoPi;
      else if (jump < -kPi) offset += kTwoPi;
    }
    out[s] = wrapped[s] + offset;
  }
  return out;
}

FieldSample reduced_field(const OscillatorNetwork& net, std::pair<std::size_t, std::size_t> coords,
                          double x1, double x2) {
  const auto n = net.size();
  if (n == 2) {
    const double gain = net.coupling_gains()[0];
    return {x1, x2, x2, -gain * x2 * std::cos(x1)};
  }
  if (n != 3) {
    throw Error(ErrorCode::unsupported,
                "planar reduction exists only for N = 2 or 3, got N = " + std::to_string(n));
  }
  const auto [a, b] = coords;
  if (a >= 3 || b >= 3 || a == b) {
    throw Error(ErrorCode::invalid_argument, "reduced coordinates must be two distinct edges of 3");
  }
  // Phases with θ₃ = 0 reproducing the two chosen edge differences.
  const Eigen::MatrixXd& bm = net.incidence().real();
  Eigen::Matrix2d rows;
  rows << bm(0, static_cast<Eigen::Index>(a)), bm(1, static_cast<Eigen::Index>(a)),
      bm(0, static_cast<Eigen::Index>(b)), bm(1, static_cast<Eigen::Index>(b));
  const Eigen::Vector2d head = rows.partialPivLu().solve(Eigen::Vector2d(x1, x2));
  const Eigen::Vector3d theta(head[0], head[1], 0.0);
  const Eigen::VectorXd X = bm.transpose() * theta;
  const Eigen::VectorXd v = edge_velocity(X, net);
  return {x1, x2, v[static_cast<Eigen::Index>(a)], v[static_cast<Eigen::Index>(b)]};
}

std::vector<FieldSample> vector_field_grid(const OscillatorNetwork& net,
                                           std::pair<std::size_t, std::size_t> coords,
                                           const GridSpec& grid) {
  if (net.size() > 3) {
    throw Error(ErrorCode::unsupported, "no planar reduction for N = " + std::to_string(net.size()));
  }
  if (grid.n1 < 2 || grid.n2 < 2) throw Error(ErrorCode::invalid_argument, "grid needs >= 2 points per axis");
  std::vector<FieldSample> out;
  out.reserve(grid.n1 * grid.n2);
  const double h1 = (grid.x1_max - grid.x1_min) / static_cast<double>(grid.n1 - 1);
  const double h2 = (grid.x2_max - grid.x2_min) / static_cast<double>(grid.n2 - 1);
  for (std::size_t i = 0; i < grid.n1; ++i) {
    const double x1 = grid.x1_min + h1 * static_cast<double>(i);
    for (std::size_t j = 0; j < grid.n2; ++j) {
      out.push_back(reduced_field(net, coords, x1, grid.x2_min + h2 * static_cast<double>(j)));
    }
  }
  return out;
}

}  // namespace kuramoto
