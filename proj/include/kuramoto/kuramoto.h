/*
 * C interface to the kuramoto library.
 *
 * Objects are opaque handles created by kur_*_create / kur_*_load and released
 * with the matching kur_*_destroy. Every fallible call returns a kur_status;
 * on failure kur_last_error() holds a message for the calling thread until its
 * next failing call. Strings returned through char** are owned by the caller
 * and released with kur_string_free.
 *
 * Vectors indexed by edge follow the lexicographic pair order
 * (1,2),(1,3),...,(1,N),(2,3),...,(N-1,N); an edge count is e = N(N-1)/2.
 */
#ifndef KURAMOTO_KURAMOTO_H
#define KURAMOTO_KURAMOTO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(KURAMOTO_BUILDING_LIBRARY)
#    define KUR_API __declspec(dllexport)
#  else
#    define KUR_API __declspec(dllimport)
#  endif
#elif defined(__GNUC__) && __GNUC__ >= 4
#  define KUR_API __attribute__((visibility("default")))
#else
#  define KUR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kur_status {
  KUR_OK = 0,
  KUR_ERR_INVALID_ARGUMENT = 1,
  KUR_ERR_OUT_OF_DOMAIN = 2,
  KUR_ERR_PARSE = 3,
  KUR_ERR_IO = 4,
  KUR_ERR_DIVERGENCE = 5,
  KUR_ERR_NO_EQUILIBRIUM = 6,
  KUR_ERR_SINGULAR = 7,
  KUR_ERR_UNSUPPORTED = 8,
  KUR_ERR_SAMPLING_INFEASIBLE = 9,
  KUR_ERR_INTERNAL = 100
} kur_status;

typedef enum kur_stability {
  KUR_SEMISTABLE_CANDIDATE = 0,
  KUR_UNSTABLE = 1,
  KUR_INDETERMINATE = 2
} kur_stability;

typedef struct kur_network kur_network;
typedef struct kur_trajectory kur_trajectory;

KUR_API const char* kur_version(void);
KUR_API const char* kur_status_string(kur_status status);
KUR_API const char* kur_last_error(void);
KUR_API void kur_string_free(char* str);

/* ---- networks ---------------------------------------------------------- */

KUR_API kur_status kur_network_create(size_t n, const double* omega, const double* gains,
                                      size_t n_gains, kur_network** out);
KUR_API kur_status kur_network_load(const char* path, kur_network** out);
KUR_API kur_status kur_network_save(const kur_network* net, const char* path);
KUR_API void kur_network_destroy(kur_network* net);

KUR_API size_t kur_network_size(const kur_network* net);
KUR_API size_t kur_network_edge_count(const kur_network* net);
/* Copies N natural frequencies / e gains into the caller's buffer. */
KUR_API kur_status kur_network_omega(const kur_network* net, double* out, size_t len);
KUR_API kur_status kur_network_gains(const kur_network* net, double* out, size_t len);
KUR_API kur_status kur_network_is_connected(const kur_network* net, int* connected);

/* ---- simulation --------------------------------------------------------- */

KUR_API kur_status kur_simulate(const kur_network* net, const double* theta0, size_t n,
                                double t_end, double dt, kur_trajectory** out);
KUR_API void kur_trajectory_destroy(kur_trajectory* traj);
KUR_API size_t kur_trajectory_length(const kur_trajectory* traj);
/* theta and theta_dot receive N values each; either may be NULL. */
KUR_API kur_status kur_trajectory_sample(const kur_trajectory* traj, size_t index, double* t,
                                         double* theta, double* theta_dot);
/* Header t,theta_1..theta_N,thetadot_1..thetadot_N; 15 significant digits. */
KUR_API kur_status kur_trajectory_write_csv(const kur_trajectory* traj, const char* path);

/* Planar field over [x1_min,x1_max]x[x2_min,x2_max], `grid` points per axis.
 * N = 2 uses (dtheta, dtheta_dot); N = 3 uses the first two edges. */
KUR_API kur_status kur_write_vector_field_csv(const kur_network* net, size_t grid, double x1_min,
                                              double x1_max, double x2_min, double x2_max,
                                              const char* path);

/* ---- two-oscillator system ---------------------------------------------- */

KUR_API kur_status kur_planar_write_boundary_csv(double K, double delta_omega, size_t points,
                                                 const char* path);
KUR_API kur_status kur_planar_write_cone_csv(double K, double delta_omega, double eps,
                                             size_t points, const char* path);
/* JSON verdict of the global synchronization dichotomy. */
KUR_API kur_status kur_planar_global_sync(double K, double delta_omega, int* synchronizes,
                                          char** json);

/* ---- analysis ----------------------------------------------------------- */

/* theta_guess may be NULL; x_star receives e values. */
KUR_API kur_status kur_solve_equilibrium(const kur_network* net, const double* theta_guess,
                                         double* x_star, size_t len);
KUR_API kur_status kur_classify_stability(const kur_network* net, const double* x_star,
                                          size_t len, double tol_zero, kur_stability* out);
KUR_API kur_status kur_sufficient_gain_bounds(const kur_network* net, double* out, size_t len);
KUR_API kur_status kur_uniform_critical_gain(const kur_network* net, double* out);
KUR_API kur_status kur_sync_frequency(const kur_network* net, double* out);
KUR_API kur_status kur_attracting_set_check(const kur_network* net, double delta, int* holds,
                                            double* margin);
KUR_API kur_status kur_nontangency_rank_test(const kur_network* net, const double* x,
                                             size_t len, int* nontangent);

typedef struct kur_invariance_options {
  size_t n_samples;
  double horizon;
  double dt;
  double margin;
  uint64_t seed;
} kur_invariance_options;

KUR_API kur_invariance_options kur_invariance_defaults(void);

/* *pass is 1 when every sampled trajectory stayed in the invariant set. */
KUR_API kur_status kur_invariance_certificate(const kur_network* net,
                                              const kur_invariance_options* options, int* pass,
                                              char** json);

/* Coupling bounds report (per-edge, uniform, onset, attracting margin). */
KUR_API kur_status kur_bounds_report(const kur_network* net, double delta, char** json);

typedef struct kur_analysis_options {
  double delta;
  double tol_zero;
  kur_invariance_options invariance;
} kur_analysis_options;

KUR_API kur_analysis_options kur_analysis_defaults(void);
/* *certificate_pass (may be NULL) mirrors certificates.invariance.pass. */
KUR_API kur_status kur_analysis_report(const kur_network* net, const kur_analysis_options* options,
                                       int* certificate_pass, char** json);

/* ---- experiments -------------------------------------------------------- */

typedef struct kur_experiment_options {
  const char* output_dir;
  size_t grid;
  double t_end;
  double dt;
  uint64_t seed;
} kur_experiment_options;

KUR_API kur_experiment_options kur_experiment_defaults(void);
/* id is "three_chain" or "five_network". */
KUR_API kur_status kur_run_experiment(const char* id, const kur_experiment_options* options,
                                      int* verified, char** json);

#ifdef __cplusplus
}
#endif

#endif /* KURAMOTO_KURAMOTO_H */
