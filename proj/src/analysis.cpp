#include "kuramoto/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "kuramoto/error.hpp"

namespace kuramoto {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

void require_edges(const Eigen::VectorXd& X, const OscillatorNetwork& net) {
  if (static_cast<std::size_t>(X.size()) != net.edge_count()) {
    throw Error(ErrorCode::invalid_argument, "edge vector has length " + std::to_string(X.size()) +
                                                 ", expected " + std::to_string(net.edge_count()));
  }
}

bool in_open_box(const Eigen::VectorXd& X) {
  return (X.array().abs() < kHalfPi).all();
}

/// Basis of Col(Bᵀ): the first N − 1 rows of B, as columns.
Eigen::MatrixXd column_space_basis(const OscillatorNetwork& net) {
  const auto m = static_cast<Eigen::Index>(net.size()) - 1;
  return net.incidence().real().topRows(m).transpose();
}

Eigen::VectorXd edge_frequency_differences(const OscillatorNetwork& net) {
  return net.incidence().real().transpose() * net.natural_frequencies();
}

}  // namespace

// ---------------------------------------------------------------------------

Equilibrium solve_equilibrium(const OscillatorNetwork& net, const std::optional<Eigen::VectorXd>& theta_guess,
                              const NewtonOptions& options) {
  if (!is_connected(net)) {
    throw Error(ErrorCode::invalid_argument, "equilibrium solve needs a connected network");
  }
  const auto n = static_cast<Eigen::Index>(net.size());
  const Eigen::Index m = n - 1;
  const Eigen::MatrixXd& b = net.incidence().real();
  const double mean = net.natural_frequencies().mean();
  const double gain_scale = net.coupling_matrix_diagonal().maxCoeff();

  Eigen::VectorXd theta = theta_guess.value_or(Eigen::VectorXd::Zero(n));
  if (theta.size() != n) throw Error(ErrorCode::invalid_argument, "theta_guess has wrong length");
  if (!theta.allFinite()) throw Error(ErrorCode::invalid_argument, "theta_guess is not finite");
  theta.array() -= theta[n - 1];

  // Node-space residual with the common frequency removed; θ_N stays pinned.
  const auto node_residual = [&](const Eigen::VectorXd& th) -> Eigen::VectorXd {
    return (theta_dot(th, net).array() - mean).matrix().head(m);
  };

  Eigen::VectorXd residual = node_residual(theta);
  for (int it = 0; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd X = b.transpose() * theta;
    const double g_norm = edge_velocity(X, net).lpNorm<Eigen::Infinity>();
    if (g_norm < options.tolerance) return {theta, X, g_norm, it};
    if (it == options.max_iterations) break;

    const Eigen::VectorXd weights = net.coupling_matrix_diagonal().cwiseProduct(X.array().cos().matrix());
    const Eigen::MatrixXd jac = -(b.topRows(m) * weights.asDiagonal() * b.topRows(m).transpose());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible() || lu.maxPivot() <= 1e-12 * gain_scale) {
      throw Error(ErrorCode::singular_jacobian,
                  "Jacobian singular at Newton iterate " + std::to_string(it) +
                      " (a phase difference crossed cos x = 0)");
    }
    const Eigen::VectorXd step = lu.solve(-residual);

    // Backtracking on ‖residual‖₂ keeps far-off guesses from overshooting.
    const double current = residual.norm();
    double alpha = 1.0;
    Eigen::VectorXd trial(n);
    Eigen::VectorXd trial_residual;
    for (;;) {
      trial = theta;
      trial.head(m) += alpha * step;
      trial_residual = node_residual(trial);
      if (trial_residual.norm() <= (1.0 - 1e-4 * alpha) * current || alpha < 1.0 / 1024.0) break;
      alpha *= 0.5;
    }
    theta = trial;
    residual = trial_residual;
  }
  throw Error(ErrorCode::no_equilibrium,
              "Newton did not converge in " + std::to_string(options.max_iterations) +
                  " iterations; the gains may be below the locking threshold");
}

Eigen::MatrixXd linearize(const OscillatorNetwork& net, const Eigen::VectorXd& X_star) {
  require_edges(X_star, net);
  const auto e = static_cast<Eigen::Index>(net.edge_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * e, 2 * e);
  a.topRightCorner(e, e).setIdentity();
  a.bottomRightCorner(e, e) = g_matrix(X_star, net);
  return a;
}

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::semistable_candidate: return "semistable-candidate";
    case Stability::unstable: return "unstable";
    case Stability::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

StabilityReport classify_stability(const OscillatorNetwork& net, const Eigen::VectorXd& X_star, double tol_zero) {
  require_edges(X_star, net);
  const auto e = net.edge_count();
  const Eigen::MatrixXd g = g_matrix(X_star, net);
  const Eigen::MatrixXd a = linearize(net, X_star);
  const double tol = tol_zero * std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff());

  StabilityReport report;
  report.equilibrium_X = X_star;
  report.expected_zero = 2 * e - (net.size() - 1);

  // A is block upper-triangular: e structural zeros plus the spectrum of G.
  report.eigenvalues.assign(e, {0.0, 0.0});
  const Eigen::EigenSolver<Eigen::MatrixXd> g_solver(g, false);
  for (Eigen::Index i = 0; i < g_solver.eigenvalues().size(); ++i) {
    report.eigenvalues.push_back(g_solver.eigenvalues()[i]);
  }

  const Eigen::MatrixXd u = column_space_basis(net);
  const Eigen::MatrixXd restricted = (u.transpose() * u).ldlt().solve(u.transpose() * g * u);
  const Eigen::EigenSolver<Eigen::MatrixXd> r_solver(restricted, false);
  for (Eigen::Index i = 0; i < r_solver.eigenvalues().size(); ++i) {
    report.restricted_eigenvalues.push_back(r_solver.eigenvalues()[i]);
  }

  bool any_growing = false;
  bool all_settled = true;
  for (const auto& lambda : report.eigenvalues) {
    const bool zero = std::abs(lambda) < tol;
    if (zero) ++report.n_zero;
    if (lambda.real() > tol) any_growing = true;
    if (!zero && !(lambda.real() < -tol)) all_settled = false;
  }

  if (any_growing) {
    report.classification = Stability::unstable;
  } else if (in_open_box(wrap_angles(X_star)) && all_settled && report.n_zero == report.expected_zero) {
    report.classification = Stability::semistable_candidate;
  } else {
    report.classification = Stability::indeterminate;
  }
  return report;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd sufficient_gain_bounds(const OscillatorNetwork& net) {
  return 0.5 * static_cast<double>(net.size()) * edge_frequency_differences(net).cwiseAbs();
}

double uniform_critical_gain(const OscillatorNetwork& net) {
  const double n = static_cast<double>(net.size());
  return n * edge_frequency_differences(net).lpNorm<Eigen::Infinity>() / (2.0 * (n - 1.0));
}

Eigen::VectorXd onset_lower_bounds(const OscillatorNetwork& net) {
  const Eigen::MatrixXd& l = net.edge_laplacian();
  const Eigen::VectorXd& gains = net.coupling_gains();
  const double n = static_cast<double>(net.size());
  Eigen::VectorXd out = l.cwiseAbs() * gains;  // diagonal contributes 2K̃ᵢ
  return out / n;
}

AttractingCheck attracting_set_check(const OscillatorNetwork& net, double delta) {
  if (!std::isfinite(delta) || !(delta > 0.0) || !(delta < kPi)) {
    throw Error(ErrorCode::invalid_argument, "delta must lie in (0, pi)");
  }
  const Eigen::VectorXd& gains = net.coupling_gains();
  const double n = static_cast<double>(net.size());

  double k_max = 0.0;
  double k_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (gains[i] > 0.0) {
      k_max = std::max(k_max, gains[i]);
      k_min = std::min(k_min, gains[i]);
    }
  }
  AttractingCheck check;
  check.delta_m = k_max > 0.0 ? k_max - k_min : 0.0;

  const double spread = (n - 2.0) * check.delta_m;
  double active = 0.0;
  double inactive = 0.0;
  check.side_condition = true;
  for (Eigen::Index i = 0; i < gains.size(); ++i) {
    if (gains[i] > 0.0) {
      active += 2.0 * gains[i] - spread;
      if (gains[i] < 0.5 * spread) check.side_condition = false;
    } else {
      inactive += spread;
    }
  }
  check.lhs = active * std::sin(std::abs(delta)) / n;
  check.rhs = edge_frequency_differences(net).cwiseAbs().sum() + inactive / n;
  check.margin = check.lhs - check.rhs;
  check.inequality = check.lhs > check.rhs;
  check.holds = check.inequality && check.side_condition;
  return check;
}

CouplingBounds coupling_bounds(const OscillatorNetwork& net, double delta) {
  CouplingBounds out;
  out.per_edge_sufficient = sufficient_gain_bounds(net);
  out.uniform_K0 = uniform_critical_gain(net);
  out.onset_lower = onset_lower_bounds(net);
  out.attracting = attracting_set_check(net, delta);
  out.sufficient_met = (net.coupling_gains().array() >= out.per_edge_sufficient.array()).all();
  return out;
}

double sync_frequency(const OscillatorNetwork& net) { return net.natural_frequencies().mean(); }

// ---------------------------------------------------------------------------

double column_space_residual(const Eigen::VectorXd& X, const OscillatorNetwork& net) {
  require_edges(X, net);
  // (BᵀB)² = N·BᵀB, so BᵀB/N is the orthogonal projector onto Col(Bᵀ).
  return (X - net.edge_laplacian() * X / static_cast<double>(net.size())).norm();
}

HMembership in_set_H(const EdgeState& state, const OscillatorNetwork& net, double tolerance) {
  require_edges(state.X, net);
  require_edges(state.V, net);
  const auto& X = state.X;
  const Eigen::VectorXd freq = edge_frequency_differences(net);
  const Eigen::VectorXd& gains = net.coupling_gains();
  const double n = static_cast<double>(net.size());
  const double scale = std::max(1.0, freq.lpNorm<Eigen::Infinity>() + 2.0 * gains.maxCoeff());

  HMembership out;
  out.in_box = in_open_box(X);
  out.in_column_space = column_space_residual(X, net) <= tolerance * std::max(1.0, X.norm());
  out.velocity_consistent = (state.V - edge_velocity(X, net)).lpNorm<Eigen::Infinity>() <= tolerance * scale;

  const Eigen::VectorXd weighted = gains.cwiseProduct(X.array().abs().sin().matrix());
  const Eigen::MatrixXd& l = net.edge_laplacian();
  out.slack.resize(X.size());
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    double rhs = 2.0 * gains[i];
    for (Eigen::Index j = 0; j < X.size(); ++j) {
      if (j != i) rhs += std::abs(l(i, j)) * weighted[j];
    }
    out.slack[i] = rhs / n - std::abs(freq[i]);
  }
  out.inequality = (out.slack.array() >= -tolerance * scale).all();
  out.inside = out.in_box && out.in_column_space && out.velocity_consistent && out.inequality;
  return out;
}

std::vector<Eigen::VectorXd> sample_box_states(const OscillatorNetwork& net, std::size_t count, double margin,
                                               std::mt19937_64& rng, std::size_t max_draws,
                                               std::size_t* draws_used) {
  if (!(margin >= 0.0) || !(margin < kHalfPi)) throw Error(ErrorCode::invalid_argument, "margin must lie in [0, pi/2)");
  const auto n = static_cast<Eigen::Index>(net.size());
  const Eigen::MatrixXd bt = net.incidence().real().transpose();
  std::uniform_real_distribution<double> phase(-kHalfPi, kHalfPi);
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  std::size_t draws = 0;
  std::size_t misses = 0;
  while (out.size() < count) {
    if (misses >= max_draws) {
      throw Error(ErrorCode::sampling_infeasible,
                  "no admissible initial state after " + std::to_string(misses) + " consecutive draws");
    }
    ++draws;
    Eigen::VectorXd theta(n);
    for (Eigen::Index i = 0; i < n; ++i) theta[i] = phase(rng);
    const Eigen::VectorXd X = bt * theta;
    if ((X.array().abs() < kHalfPi - margin).all() &&
        in_set_H({X, bt * theta_dot(theta, net)}, net).inside) {
      out.push_back(std::move(theta));
      misses = 0;
    } else {
      ++misses;
    }
  }
  if (draws_used) *draws_used = draws;
  return out;
}

namespace {

struct SampleOutcome {
  bool remained = true;
  bool remained_box = true;
  bool monotone = true;
  double max_v2_increase = 0.0;
  double max_v2_dot = -std::numeric_limits<double>::infinity();
};

SampleOutcome run_sample(const OscillatorNetwork& net, const Eigen::VectorXd& theta0, const InvarianceOptions& options) {
  SampleOutcome outcome;
  const Eigen::MatrixXd bt = net.incidence().real().transpose();
  double previous_v2 = std::numeric_limits<double>::infinity();
  integrate(net, theta0, options.horizon, options.dt,
            [&](std::size_t, double, const Eigen::VectorXd& theta, const Eigen::VectorXd& rate) {
              const EdgeState state{wrap_angles(bt * theta), bt * rate};
              const auto member = in_set_H(state, net);
              if (!(member.in_box && member.in_column_space && member.velocity_consistent)) {
                outcome.remained = false;
                outcome.remained_box = false;
                return false;
              }
              if (!member.inequality) outcome.remained = false;
              const double v2 = 0.5 * state.V.squaredNorm();
              const double v2_dot = state.V.dot(g_matrix(state.X, net) * state.V);
              if (std::isfinite(previous_v2)) {
                outcome.max_v2_increase = std::max(outcome.max_v2_increase, v2 - previous_v2);
                if (v2 - previous_v2 > 1e-9) outcome.monotone = false;
              }
              outcome.max_v2_dot = std::max(outcome.max_v2_dot, v2_dot);
              if (v2_dot > 1e-12) outcome.monotone = false;
              previous_v2 = v2;
              return true;
            });
  return outcome;
}

}  // namespace

InvarianceReport invariance_certificate(const OscillatorNetwork& net, const InvarianceOptions& options) {
  InvarianceReport report;
  report.seed = options.seed;
  report.n_samples = options.n_samples;
  report.bounds_met = (net.coupling_gains().array() >= sufficient_gain_bounds(net).array()).all();

  std::mt19937_64 rng(options.seed);
  const auto starts =
      sample_box_states(net, options.n_samples, options.margin, rng, options.max_draws, &report.draws);

  std::vector<SampleOutcome> outcomes(starts.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t s = next++; s < starts.size(); s = next++) outcomes[s] = run_sample(net, starts[s], options);
  };
  std::size_t workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(starts.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  report.max_v2_dot = outcomes.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (const auto& o : outcomes) {
    if (o.remained) ++report.n_remained;
    if (o.remained_box) ++report.n_remained_box;
    if (o.monotone) ++report.n_lyapunov_monotone;
    report.max_v2_increase = std::max(report.max_v2_increase, o.max_v2_increase);
    report.max_v2_dot = std::max(report.max_v2_dot, o.max_v2_dot);
  }
  return report;
}

// ---------------------------------------------------------------------------

std::size_t restricted_rank(const OscillatorNetwork& net, const Eigen::VectorXd& X) {
  const Eigen::MatrixXd m = g_matrix(X, net) * column_space_basis(net);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double threshold = 1e-10 * sv[0];
  return static_cast<std::size_t>((sv.array() > threshold).count());
}

bool nontangency_rank_test(const OscillatorNetwork& net, const Eigen::VectorXd& X) {
  require_edges(X, net);
  if (!in_open_box(X)) throw Error(ErrorCode::out_of_domain, "nontangency test needs X in (-pi/2, pi/2)^e");
  return restricted_rank(net, X) == net.size() - 1;
}

std::vector<LyapunovSample> lyapunov_v2_along(const Trajectory& trajectory, const OscillatorNetwork& net) {
  std::vector<LyapunovSample> out;
  out.reserve(trajectory.size());
  for (const auto& state : trajectory.edge_states(net.incidence())) {
    out.push_back({0.5 * state.V.squaredNorm(), state.V.dot(g_matrix(state.X, net) * state.V)});
  }
  return out;
}

double lyapunov_v3(const Eigen::VectorXd& X, std::size_t n) {
  return X.cwiseAbs().sum() - static_cast<double>(n - 1) * kHalfPi;
}

std::optional<double> lyapunov_v3_derivative(const Eigen::VectorXd& X, const Eigen::VectorXd& V) {
  if (X.size() != V.size()) throw Error(ErrorCode::invalid_argument, "X and V lengths differ");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    if (X[i] == 0.0) {
      if (V[i] != 0.0) return std::nullopt;
    } else {
      sum += (X[i] > 0.0 ? 1.0 : -1.0) * V[i];
    }
  }
  return sum;
}

}  // namespace kuramoto
