#include "kuramoto/kuramoto.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "kuramoto/analysis.hpp"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/error.hpp"
#include "kuramoto/io.hpp"
#include "kuramoto/network.hpp"
#include "kuramoto/two_oscillator.hpp"

struct kur_network {
  kuramoto::OscillatorNetwork net;
};

struct kur_trajectory {
  kuramoto::Trajectory traj;
};

namespace {

thread_local std::string last_error;

kur_status to_status(kuramoto::ErrorCode code) {
  using kuramoto::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return KUR_ERR_INVALID_ARGUMENT;
    case ErrorCode::out_of_domain: return KUR_ERR_OUT_OF_DOMAIN;
    case ErrorCode::parse_error: return KUR_ERR_PARSE;
    case ErrorCode::io_error: return KUR_ERR_IO;
    case ErrorCode::divergence: return KUR_ERR_DIVERGENCE;
    case ErrorCode::no_equilibrium: return KUR_ERR_NO_EQUILIBRIUM;
    case ErrorCode::singular_jacobian: return KUR_ERR_SINGULAR;
    case ErrorCode::unsupported: return KUR_ERR_UNSUPPORTED;
    case ErrorCode::sampling_infeasible: return KUR_ERR_SAMPLING_INFEASIBLE;
  }
  return KUR_ERR_INTERNAL;
}

kur_status fail(kur_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename Body>
kur_status guarded(Body&& body) noexcept {
  try {
    body();
    return KUR_OK;
  } catch (const kuramoto::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(KUR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(KUR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(KUR_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw kuramoto::Error(kuramoto::ErrorCode::invalid_argument, message);
}

Eigen::VectorXd copy_in(const double* data, std::size_t len) {
  require(data != nullptr || len == 0, "null input buffer");
  Eigen::VectorXd out(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) out[static_cast<Eigen::Index>(i)] = data[i];
  return out;
}

void copy_out(const Eigen::VectorXd& v, double* out, std::size_t len) {
  require(out != nullptr, "null output buffer");
  require(len == static_cast<std::size_t>(v.size()), "output buffer has the wrong length");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

char* duplicate(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_json(const nlohmann::json& doc, char** json) {
  if (json) *json = duplicate(doc.dump(2) + "\n");
}

const kuramoto::OscillatorNetwork& deref(const kur_network* net) {
  require(net != nullptr, "null network handle");
  return net->net;
}

kuramoto::InvarianceOptions to_cpp(const kur_invariance_options& o) {
  kuramoto::InvarianceOptions out;
  out.n_samples = o.n_samples;
  out.horizon = o.horizon;
  out.dt = o.dt;
  out.margin = o.margin;
  out.seed = o.seed;
  return out;
}

}  // namespace

extern "C" {

const char* kur_version(void) { return "1.0.0"; }

const char* kur_status_string(kur_status status) {
  switch (status) {
    case KUR_OK: return "ok";
    case KUR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KUR_ERR_OUT_OF_DOMAIN: return "out of domain";
    case KUR_ERR_PARSE: return "parse error";
    case KUR_ERR_IO: return "i/o error";
    case KUR_ERR_DIVERGENCE: return "divergence";
    case KUR_ERR_NO_EQUILIBRIUM: return "no equilibrium found";
    case KUR_ERR_SINGULAR: return "singular Jacobian";
    case KUR_ERR_UNSUPPORTED: return "unsupported";
    case KUR_ERR_SAMPLING_INFEASIBLE: return "sampling infeasible";
    case KUR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* kur_last_error(void) { return last_error.c_str(); }

void kur_string_free(char* str) { std::free(str); }

kur_status kur_network_create(size_t n, const double* omega, const double* gains, size_t n_gains, kur_network** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new kur_network{kuramoto::OscillatorNetwork(copy_in(omega, n), copy_in(gains, n_gains))};
  });
}

kur_status kur_network_load(const char* path, kur_network** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new kur_network{kuramoto::io::parse_network(path)};
  });
}

kur_status kur_network_save(const kur_network* net, const char* path) {
  return guarded([&] {
    require(path != nullptr, "null path");
    kuramoto::io::write_network(deref(net), path);
  });
}

void kur_network_destroy(kur_network* net) { delete net; }

size_t kur_network_size(const kur_network* net) { return net ? net->net.size() : 0; }

size_t kur_network_edge_count(const kur_network* net) { return net ? net->net.edge_count() : 0; }

kur_status kur_network_omega(const kur_network* net, double* out, size_t len) {
  return guarded([&] { copy_out(deref(net).natural_frequencies(), out, len); });
}

kur_status kur_network_gains(const kur_network* net, double* out, size_t len) {
  return guarded([&] { copy_out(deref(net).coupling_gains(), out, len); });
}

kur_status kur_network_is_connected(const kur_network* net, int* connected) {
  return guarded([&] {
    require(connected != nullptr, "null output");
    *connected = kuramoto::is_connected(deref(net)) ? 1 : 0;
  });
}

kur_status kur_simulate(const kur_network* net, const double* theta0, size_t n, double t_end, double dt,
                        kur_trajectory** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    auto traj = kuramoto::simulate(deref(net), copy_in(theta0, n), t_end, dt);
    *out = new kur_trajectory{std::move(traj)};
  });
}

void kur_trajectory_destroy(kur_trajectory* traj) { delete traj; }

size_t kur_trajectory_length(const kur_trajectory* traj) { return traj ? traj->traj.size() : 0; }

kur_status kur_trajectory_sample(const kur_trajectory* traj, size_t index, double* t, double* theta,
                                 double* theta_dot) {
  return guarded([&] {
    require(traj != nullptr, "null trajectory handle");
    require(index < traj->traj.size(), "sample index out of range");
    if (t) *t = traj->traj.times[index];
    const auto& th = traj->traj.thetas[index];
    const auto& rate = traj->traj.theta_dots[index];
    if (theta) copy_out(th, theta, static_cast<std::size_t>(th.size()));
    if (theta_dot) copy_out(rate, theta_dot, static_cast<std::size_t>(rate.size()));
  });
}

kur_status kur_trajectory_write_csv(const kur_trajectory* traj, const char* path) {
  return guarded([&] {
    require(traj != nullptr && path != nullptr, "null argument");
    kuramoto::io::write_with(path, [&](std::ostream& o) { kuramoto::io::write_trajectory_csv(traj->traj, o); });
  });
}

kur_status kur_write_vector_field_csv(const kur_network* net, size_t grid, double x1_min, double x1_max,
                                      double x2_min, double x2_max, const char* path) {
  return guarded([&] {
    require(path != nullptr, "null path");
    const kuramoto::GridSpec spec{x1_min, x1_max, x2_min, x2_max, grid, grid};
    const auto samples = kuramoto::vector_field_grid(deref(net), {0, 1}, spec);
    kuramoto::io::write_with(path, [&](std::ostream& o) { kuramoto::io::write_field_csv(samples, o); });
  });
}

kur_status kur_planar_write_boundary_csv(double K, double delta_omega, size_t points, const char* path) {
  return guarded([&] {
    require(path != nullptr, "null path");
    const kuramoto::planar::PlanarParams p(K, delta_omega);
    kuramoto::io::write_with(path, [&](std::ostream& o) { kuramoto::io::write_boundary_csv(p, points, o); });
  });
}

kur_status kur_planar_write_cone_csv(double K, double delta_omega, double eps, size_t points, const char* path) {
  return guarded([&] {
    require(path != nullptr, "null path");
    const kuramoto::planar::PlanarParams p(K, delta_omega);
    kuramoto::io::write_with(path, [&](std::ostream& o) { kuramoto::io::write_cone_csv(p, eps, points, o); });
  });
}

kur_status kur_planar_global_sync(double K, double delta_omega, int* synchronizes, char** json) {
  return guarded([&] {
    const kuramoto::planar::PlanarParams p(K, delta_omega);
    const auto v = kuramoto::planar::global_sync_verdict(p);
    if (synchronizes) *synchronizes = v.synchronizes ? 1 : 0;
    using kuramoto::io::round15;
    nlohmann::json doc = {
        {"K", round15(K)},
        {"delta_omega", round15(delta_omega)},
        {"synchronizes", v.synchronizes},
        {"min_divergence_Q", round15(v.min_divergence_Q)},
        {"divergence_positive_Q", v.divergence_positive_Q},
        {"stable_phase", v.stable_phase ? nlohmann::json(round15(*v.stable_phase)) : nlohmann::json()},
        {"unstable_phase", v.unstable_phase ? nlohmann::json(round15(*v.unstable_phase)) : nlohmann::json()},
    };
    emit_json(doc, json);
  });
}

kur_status kur_solve_equilibrium(const kur_network* net, const double* theta_guess, double* x_star, size_t len) {
  return guarded([&] {
    const auto& n = deref(net);
    std::optional<Eigen::VectorXd> guess;
    if (theta_guess) guess = copy_in(theta_guess, n.size());
    copy_out(kuramoto::solve_equilibrium(n, guess).X, x_star, len);
  });
}

kur_status kur_classify_stability(const kur_network* net, const double* x_star, size_t len, double tol_zero,
                                  kur_stability* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto report = kuramoto::classify_stability(deref(net), copy_in(x_star, len), tol_zero);
    switch (report.classification) {
      case kuramoto::Stability::semistable_candidate: *out = KUR_SEMISTABLE_CANDIDATE; break;
      case kuramoto::Stability::unstable: *out = KUR_UNSTABLE; break;
      case kuramoto::Stability::indeterminate: *out = KUR_INDETERMINATE; break;
    }
  });
}

kur_status kur_sufficient_gain_bounds(const kur_network* net, double* out, size_t len) {
  return guarded([&] { copy_out(kuramoto::sufficient_gain_bounds(deref(net)), out, len); });
}

kur_status kur_uniform_critical_gain(const kur_network* net, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = kuramoto::uniform_critical_gain(deref(net));
  });
}

kur_status kur_sync_frequency(const kur_network* net, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = kuramoto::sync_frequency(deref(net));
  });
}

kur_status kur_attracting_set_check(const kur_network* net, double delta, int* holds, double* margin) {
  return guarded([&] {
    const auto check = kuramoto::attracting_set_check(deref(net), delta);
    if (holds) *holds = check.holds ? 1 : 0;
    if (margin) *margin = check.margin;
  });
}

kur_status kur_nontangency_rank_test(const kur_network* net, const double* x, size_t len, int* nontangent) {
  return guarded([&] {
    require(nontangent != nullptr, "null output");
    *nontangent = kuramoto::nontangency_rank_test(deref(net), copy_in(x, len)) ? 1 : 0;
  });
}

kur_invariance_options kur_invariance_defaults(void) {
  const kuramoto::InvarianceOptions d;
  return {d.n_samples, d.horizon, d.dt, d.margin, d.seed};
}

kur_status kur_invariance_certificate(const kur_network* net, const kur_invariance_options* options, int* pass,
                                      char** json) {
  return guarded([&] {
    const auto opts = to_cpp(options ? *options : kur_invariance_defaults());
    const auto report = kuramoto::invariance_certificate(deref(net), opts);
    if (pass) *pass = report.pass() ? 1 : 0;
    emit_json(kuramoto::io::invariance_json(report, opts), json);
  });
}

kur_status kur_bounds_report(const kur_network* net, double delta, char** json) {
  return guarded([&] {
    auto doc = kuramoto::io::bounds_json(kuramoto::coupling_bounds(deref(net), delta));
    doc["delta"] = kuramoto::io::round15(delta);
    emit_json(doc, json);
  });
}

kur_analysis_options kur_analysis_defaults(void) {
  const kuramoto::io::AnalysisOptions d;
  kur_analysis_options out;
  out.delta = d.delta;
  out.tol_zero = d.tol_zero;
  out.invariance = kur_invariance_defaults();
  return out;
}

kur_status kur_analysis_report(const kur_network* net, const kur_analysis_options* options, int* certificate_pass,
                               char** json) {
  return guarded([&] {
    const auto o = options ? *options : kur_analysis_defaults();
    kuramoto::io::AnalysisOptions opts;
    opts.delta = o.delta;
    opts.tol_zero = o.tol_zero;
    opts.invariance = to_cpp(o.invariance);
    const auto report = kuramoto::io::analysis_report(deref(net), opts);
    if (certificate_pass) *certificate_pass = report["certificates"]["invariance"].value("pass", false) ? 1 : 0;
    emit_json(report, json);
  });
}

kur_experiment_options kur_experiment_defaults(void) {
  const kuramoto::io::ExperimentOptions d;
  return {".", d.grid, d.t_end, d.dt, d.seed};
}

kur_status kur_run_experiment(const char* id, const kur_experiment_options* options, int* verified, char** json) {
  return guarded([&] {
    require(id != nullptr, "null experiment id");
    const auto o = options ? *options : kur_experiment_defaults();
    kuramoto::io::ExperimentOptions opts;
    opts.output_dir = o.output_dir ? o.output_dir : ".";
    opts.grid = o.grid;
    opts.t_end = o.t_end;
    opts.dt = o.dt;
    opts.seed = o.seed;
    const auto result = kuramoto::io::run_experiment(kuramoto::io::parse_experiment_id(id), opts);
    if (verified) *verified = result.verified ? 1 : 0;
    emit_json(result.report, json);
  });
}

}  // extern "C"
