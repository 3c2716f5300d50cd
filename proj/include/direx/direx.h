/* direx - device-independent randomness expansion rate calculator for
 * CHSH-based protocols.
 *
 * C API of the shared library. All functions return a direx_status; results
 * come back through out-parameters. Objects with identity (curves) are
 * opaque handles released with their matching _free call. All calls are
 * thread-safe; handles are immutable after creation.
 */
#ifndef DIREX_H
#define DIREX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum direx_status {
  DIREX_OK = 0,
  DIREX_ERR_ARG = 1,        /* bad argument / null pointer */
  DIREX_ERR_DOMAIN = 2,     /* input outside the documented domain */
  DIREX_ERR_NUMERIC = 3,    /* non-finite intermediate or failed iteration */
  DIREX_ERR_IO = 4,         /* file could not be read or written */
  DIREX_ERR_INFEASIBLE = 5, /* no feasible point / unreachable score */
  DIREX_ERR_MISMATCH = 6    /* curve does not match the requested use */
} direx_status;

typedef enum direx_quantity {
  DIREX_Q_AB_00E = 0,
  DIREX_Q_AB_XYE = 1,
  DIREX_Q_AB_E = 2,
  DIREX_Q_A_00E = 3,
  DIREX_Q_A_XYE = 4,
  DIREX_Q_A_E = 5
} direx_quantity;

typedef enum direx_protocol_variant {
  DIREX_PROTO_SPOTCHECK = 0,
  DIREX_PROTO_BIASED = 1,
  DIREX_PROTO_RECYCLED = 2
} direx_protocol_variant;

/* Strategy layout: {R, theta, delta, alpha0, alpha1, beta0, beta1}.
 * Input distribution layout: {p00, p01, p10, p11} row-major in (x, y). */

typedef struct direx_opt_config {
  uint32_t restarts;
  uint32_t max_iters;
  double tolerance;
  uint64_t seed;
  uint32_t threads; /* 0 = hardware concurrency */
} direx_opt_config;

typedef struct direx_protocol {
  int variant; /* direx_protocol_variant */
  double gamma;
  double zeta_a;
  double zeta_b;
  double omega_exp;
  double delta_conf;
  uint64_t rounds;
} direx_protocol;

typedef struct direx_error_budget {
  double eps_h;
  double eps_eat;
  double eps_ext;
  double eps_completeness;
  double ext_loss_const;
} direx_error_budget;

typedef struct direx_eat_result {
  double hmin_bound;
  double input_bits;
  double output_len;
  double net_expansion;
  double alpha;
  double t;
  double gamma_or_zeta;
  double delta_conf;
  double rate_r;
  double eps_s;
} direx_eat_result;

typedef struct direx_sim_config {
  uint64_t seed;
  uint32_t trials;
  uint32_t threads;
} direx_sim_config;

typedef struct direx_sim_summary {
  uint32_t trials;
  uint32_t aborts;
  double abort_rate;
  double analytic_bound;
  double mean_score;
  double score_stddev;
} direx_sim_summary;

typedef struct direx_curve direx_curve;

const char* direx_version(void);
const char* direx_status_str(int status);
/* Message of the last failing call on this thread; empty string if none. */
const char* direx_last_error(void);

void direx_opt_config_default(direx_opt_config* cfg);

/* ---- entropy core ---- */
direx_status direx_hbin(double p, double* out);
direx_status direx_theta_max(double r, double* out);
direx_status direx_delta_star(double r, double theta, double* out);
direx_status direx_bell_spectrum(const double strategy[7], double lambda[4]);
direx_status direx_epsilon_table(const double strategy[7], double eps[4]);
direx_status direx_chsh_score(const double strategy[7], double* out);
direx_status direx_entropy(int quantity, const double strategy[7], const double pxy[4], double* out);
direx_status direx_entropy_brute_force(int quantity, const double strategy[7], const double pxy[4], double* out);
direx_status direx_analytic_a00e(double omega, double* out);
direx_status direx_analytic_g1(double omega, double* out);
direx_status direx_analytic_g2(double omega, double* out);
direx_status direx_random_strategy(uint64_t seed, uint64_t index, double strategy[7]);
direx_status direx_solve_r_for_score(double theta, const double angles[4], double omega, double* out);

/* ---- curves ---- */
direx_status direx_default_grid(uint32_t base_points, double* out, size_t capacity, size_t* out_n);
direx_status direx_curve_build(int quantity, const double* omegas, size_t n, const double pxy[4],
                               const direx_opt_config* cfg, direx_curve** out);
direx_status direx_curve_envelope(const direx_curve* g, direx_curve** out);
void direx_curve_free(direx_curve* c);
direx_status direx_curve_info(const direx_curve* c, int* quantity, int* kind /* 0=G,1=F */, size_t* num_points);
direx_status direx_curve_point(const direx_curve* c, size_t index, double* omega, double* entropy,
                               double strategy_or_null[7], int* has_strategy);
direx_status direx_curve_tangent(const direx_curve* c, int* has_tangent, double* omega_star, double* slope);
direx_status direx_curve_eval(const direx_curve* c, double omega, double* value, double* deriv_or_null);
direx_status direx_curve_save(const direx_curve* c, const char* path);
direx_status direx_curve_load(const char* path, direx_curve** out);
direx_status direx_curve_export(const direx_curve* c, int format /* 0=csv,1=json */, char** text);
void direx_string_free(char* text);

/* ---- EAT rates ---- */
direx_status direx_completeness_error(const direx_protocol* p, double* out);
direx_status direx_delta_for_completeness(const direx_protocol* p, double eps_c, double* out);
direx_status direx_input_randomness(const direx_protocol* p, double* out);
direx_status direx_eat_net(const direx_curve* f, const direx_protocol* p, const direx_error_budget* b,
                           int optimize_rate_param, direx_eat_result* out);
direx_status direx_eat_crossover(const direx_curve* f, const direx_protocol* p, const direx_error_budget* b,
                                 int optimize_rate_param, int* found, uint64_t* n_out, direx_eat_result* out);

/* ---- simulation ---- */
direx_status direx_simulate(const direx_protocol* p, const double omega_xy[4], const direx_sim_config* cfg,
                            direx_sim_summary* out, uint8_t* aborted_or_null, double* scores_or_null);

/* ---- verification ----
 * Dual-path check of the entropy formulas on `count` seeded random
 * strategies across all six quantities; fills the worst absolute deviation
 * and fails with DIREX_ERR_MISMATCH when it exceeds tol. */
direx_status direx_verify_oracle(uint64_t seed, uint32_t count, double tol, uint32_t threads, double* max_dev);
/* Never-below-envelope check of a curve against `count` random strategies. */
direx_status direx_verify_envelope(const direx_curve* f, uint64_t seed, uint32_t count, double tol,
                                   double* worst_margin);

#ifdef __cplusplus
}
#endif

#endif /* DIREX_H */
