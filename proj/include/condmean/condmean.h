/* Conditional-mean regularity toolkit: C interface.
 *
 * Every function returns a cm_status. On failure the outputs are left
 * untouched and cm_last_error() describes the problem (per thread).
 * Handles are opaque and must be released with their *_free function;
 * passing NULL to a *_free function is a no-op.
 */
#ifndef CONDMEAN_CONDMEAN_H
#define CONDMEAN_CONDMEAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CONDMEAN_BUILDING_LIBRARY)
#    define CONDMEAN_API __declspec(dllexport)
#  else
#    define CONDMEAN_API __declspec(dllimport)
#  endif
#else
#  define CONDMEAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cm_status {
  CM_OK = 0,
  CM_ERR_INVALID_ARGUMENT = 1,
  CM_ERR_INVALID_SAMPLE = 2,
  CM_ERR_OUT_OF_SUPPORT = 3,
  CM_ERR_DENSITY_SPEC = 4,
  CM_ERR_DOMAIN = 5,
  CM_ERR_NULL_POINTER = 6,
  CM_ERR_INTERNAL = 7
} cm_status;

CONDMEAN_API const char* cm_version(void);
CONDMEAN_API const char* cm_status_name(cm_status status);
/* Message of the last failed call on this thread; "" if none. */
CONDMEAN_API const char* cm_last_error(void);

typedef struct cm_seed {
  uint64_t master_seed;
  uint64_t stream_index;
} cm_seed;

/* ---- laws ------------------------------------------------------------ */

typedef struct cm_law cm_law;

typedef enum cm_law_kind {
  CM_LAW_UNIFORM = 0,
  CM_LAW_GAUSSIAN = 1,
  CM_LAW_SMOOTH = 2
} cm_law_kind;

typedef double (*cm_density_fn)(double t, void* user);

typedef struct cm_smooth_constants {
  double c1;
  double ell_star;
  double c_star;
} cm_smooth_constants;

typedef struct cm_law_info {
  cm_law_kind kind;
  double ell;        /* support length; 0 for Gaussian */
  double offset;     /* left end of the support (uniform); 0 otherwise */
  double mean;       /* Gaussian only */
  double variance;   /* Gaussian only */
  double rho_min;    /* smooth only */
  double rho_max;    /* sup of the density */
  double c_rho_prime;
  cm_smooth_constants constants; /* smooth only */
} cm_law_info;

CONDMEAN_API cm_status cm_law_uniform(double ell, double offset, cm_law** out);
CONDMEAN_API cm_status cm_law_gaussian(double mean, double variance, cm_law** out);
/* Built-in smooth families on [0, ell]: "cosine-bump", "linear-tilt". */
CONDMEAN_API cm_status cm_law_registry(const char* name, double parameter, double ell,
                                       cm_law** out);
/* Custom smooth density. The callbacks and `user` must outlive the law and
 * be callable from several threads at once. */
CONDMEAN_API cm_status cm_law_smooth(const char* name, double ell, cm_density_fn rho,
                                     cm_density_fn rho_prime, void* user,
                                     double rho_min, double rho_max,
                                     double c_rho_prime, cm_law** out);
CONDMEAN_API void cm_law_free(cm_law* law);
CONDMEAN_API cm_status cm_law_get_info(const cm_law* law, cm_law_info* out);
/* Probability of [a, b]. */
CONDMEAN_API cm_status cm_law_mass(const cm_law* law, double a, double b, double* out);

/* ---- geometry -------------------------------------------------------- */

typedef struct cm_fiber_geometry {
  double length;
  double x_min;
  double x_max;
  double range;
} cm_fiber_geometry;

/* eta has n entries, y has n - 1; either may be NULL. */
CONDMEAN_API cm_status cm_decompose(const double* x, size_t n, double* xi,
                                    double* xi_tilde, double* eta, double* y);
/* offsets may be NULL (all zero). */
CONDMEAN_API cm_status cm_fiber_length_cube(const double* x, size_t n, double ell,
                                            const double* offsets,
                                            cm_fiber_geometry* out);
CONDMEAN_API cm_status cm_fiber_length_bruteforce(const double* x, size_t n, double ell,
                                                  const double* offsets, double step,
                                                  double* out);

/* ---- sampling and exact oracles --------------------------------------- */

typedef struct cm_sampler cm_sampler;

CONDMEAN_API cm_status cm_sampler_new(const cm_law* law, cm_seed seed, uint64_t substream,
                                      cm_sampler** out);
CONDMEAN_API void cm_sampler_free(cm_sampler* sampler);
CONDMEAN_API cm_status cm_sampler_fill(cm_sampler* sampler, double* out, size_t n);
CONDMEAN_API cm_status cm_sampler_draw_restricted(cm_sampler* sampler, double a, double b,
                                                  double* out);

CONDMEAN_API cm_status cm_sample_iid(const cm_law* law, size_t n, cm_seed seed,
                                     double* out);
CONDMEAN_API cm_status cm_uniform_range_cdf(size_t n, double ell, double w, double* out);
CONDMEAN_API cm_status cm_fiber_length_tail_exact_uniform(size_t n, double ell, double r,
                                                          double* out);
CONDMEAN_API cm_status cm_gaussian_mean_density_bound(size_t n, double* out);

/* ---- moduli ----------------------------------------------------------- */

typedef struct cm_fiber_modulus {
  double nu;      /* min(raw, 1) */
  double raw;     /* +inf for a zero-length fiber */
  int point_mass;
} cm_fiber_modulus;

CONDMEAN_API cm_status cm_modulus_uniform_exact(const cm_fiber_geometry* geom, double s,
                                                size_t n, cm_fiber_modulus* out);
CONDMEAN_API cm_status cm_modulus_gaussian(size_t n, double s, double variance,
                                           double* exact, double* linear_bound);
CONDMEAN_API cm_status cm_modulus_smooth_numeric(const double* x, size_t n,
                                                 const cm_law* law, double s,
                                                 size_t grid, cm_fiber_modulus* out);
/* Simpson integral of the normalized conditional density along the fiber. */
CONDMEAN_API cm_status cm_fiber_density_normalization(const double* x, size_t n,
                                                      const cm_law* law, size_t grid,
                                                      double* out);

typedef struct cm_log_derivative_check {
  double density;
  double fd_derivative;
  double analytic_derivative;
  double abs_diff;
  double log_derivative_fd;
  double log_derivative;
  double log_abs_diff;
  double c1_bound;
  int within_c1_bound;
} cm_log_derivative_check;

CONDMEAN_API cm_status cm_log_derivative_check_at(const double* x, size_t n,
                                                  const cm_law* law, double u, double h,
                                                  size_t grid,
                                                  cm_log_derivative_check* out);

/* ---- bounds ----------------------------------------------------------- */

typedef struct cm_bound {
  double value; /* clamped to [0, 1] */
  double raw;
} cm_bound;

typedef struct cm_pair_bound {
  cm_bound pairwise;
  cm_bound published;
} cm_pair_bound;

CONDMEAN_API cm_status cm_bound_lemma41(size_t n, double ell, double delta, cm_bound* out);
CONDMEAN_API cm_status cm_bound_thm42(size_t n, double ell, double delta, cm_bound* out);
CONDMEAN_API cm_status cm_bound_thm42_alpha(size_t n, double ell, double s, double alpha,
                                            cm_bound* out);
CONDMEAN_API cm_status cm_bound_lemma51(size_t n, double rho_max, double r,
                                        cm_pair_bound* out);
CONDMEAN_API cm_status cm_bound_lemma51_uniform(size_t n, double ell, double r,
                                                cm_pair_bound* out);
CONDMEAN_API cm_status cm_bound_thm52(size_t n, double ell, double delta, double s,
                                      cm_pair_bound* out);
CONDMEAN_API cm_status cm_bound_thm52_alpha(size_t n, double ell, double s, double alpha,
                                            cm_pair_bound* out);

typedef struct cm_rcm_params {
  double c_prime;
  double c_double;
  double a_prime;
  double a_double;
  double b_prime;
  double b_double;
} cm_rcm_params;

typedef struct cm_rcm_check {
  int holds;
  double threshold;
  double rhs;
} cm_rcm_check;

CONDMEAN_API cm_status cm_rcm_params_uniform(double ell, double alpha, cm_rcm_params* out);
CONDMEAN_API cm_status cm_rcm_check_tail(const cm_rcm_params* params, size_t q_size,
                                         double s, double empirical_tail,
                                         cm_rcm_check* out);

typedef struct cm_conditional_bound {
  int applicable;
  double delta_max;
  cm_bound bound; /* meaningful only when applicable */
} cm_conditional_bound;

CONDMEAN_API cm_status cm_bound_thm61(size_t n, double ell, double rho_max, double delta,
                                      const cm_smooth_constants* constants,
                                      cm_conditional_bound* out);
CONDMEAN_API cm_status cm_bound_wegner_gaussian(size_t volume, double interval_len,
                                                cm_bound* out);
CONDMEAN_API cm_status cm_evc_bound(size_t volume, double nu, cm_bound* out);

/* ---- Monte Carlo ------------------------------------------------------ */

typedef enum cm_mode {
  CM_MODE_UNIFORM_EXACT = 0,
  CM_MODE_SMOOTH_NUMERIC = 1,
  CM_MODE_GAUSSIAN_CLOSED_FORM = 2
} cm_mode;

typedef struct cm_tail_estimate {
  double p_hat;
  double std_error;
  double ci95_lo;
  double ci95_hi;
  uint64_t trials;
  uint64_t hits;
  int has_oracle;
  double oracle;
} cm_tail_estimate;

typedef struct cm_experiment {
  const cm_law* law;
  size_t n;
  uint64_t trials;
  double s;
  int has_delta;
  double delta;
  int has_alpha;
  double alpha;
  cm_seed seed;
  cm_mode mode;
  size_t grid;
  int clamp;
  unsigned workers;
} cm_experiment;

/* n = 2, trials = 1e5, s = 0.1, no delta/alpha, grid = 256, workers = 1. */
CONDMEAN_API void cm_experiment_init(cm_experiment* cfg);
CONDMEAN_API cm_status cm_experiment_validate(const cm_experiment* cfg);
CONDMEAN_API cm_status cm_estimate_modulus_tail(const cm_experiment* cfg,
                                                cm_tail_estimate* out);
CONDMEAN_API cm_status cm_estimate_fiber_tail(const cm_experiment* cfg, double r,
                                              cm_tail_estimate* out);
CONDMEAN_API cm_status cm_make_tail_estimate(uint64_t hits, uint64_t trials,
                                             cm_tail_estimate* out);

typedef enum cm_mu_kind {
  CM_MU_CONSTANT = 0,
  CM_MU_MEDIAN_ETA = 1
} cm_mu_kind;

typedef struct cm_partition_report {
  cm_tail_estimate direct;
  double decomposed;
  double decomposed_std_error;
  double sup_box;
  size_t boxes;
  int agree;
  int sup_holds;
} cm_partition_report;

/* `intervals` + 1 cut points of [lo, hi] with uniformly drawn interior cuts. */
CONDMEAN_API cm_status cm_partition_random(cm_seed seed, uint64_t substream,
                                           size_t intervals, double lo, double hi,
                                           double* cuts_out);
CONDMEAN_API cm_status cm_estimate_local_partition(const cm_experiment* cfg,
                                                   const double* cuts, size_t n_cuts,
                                                   cm_mu_kind mu_kind, double mu_value,
                                                   cm_partition_report* out);

/* ---- graphs ----------------------------------------------------------- */

typedef struct cm_graph cm_graph;

CONDMEAN_API cm_status cm_graph_path(size_t n, cm_graph** out);
CONDMEAN_API cm_status cm_graph_box(int dimension, size_t side, cm_graph** out);
CONDMEAN_API void cm_graph_free(cm_graph* graph);
CONDMEAN_API size_t cm_graph_vertices(const cm_graph* graph);
CONDMEAN_API size_t cm_graph_central_vertex(const cm_graph* graph);
/* Valid while the graph lives. */
CONDMEAN_API const char* cm_graph_describe(const cm_graph* graph);
CONDMEAN_API cm_status cm_graph_ball_size(const cm_graph* graph, size_t center,
                                          size_t radius, size_t* out);
CONDMEAN_API cm_status cm_graph_default_growth(const cm_graph* graph, double* c_d, int* d);

typedef struct cm_rcm_report {
  size_t q_size;
  size_t radius;
  double s;
  double alpha;
  cm_tail_estimate tail;
  cm_rcm_check check;
  int holds;
  int growth_holds;
  double growth_bound;
} cm_rcm_report;

CONDMEAN_API cm_status cm_rcm_experiment(const cm_law* law, const cm_graph* graph,
                                         size_t center, size_t radius, double s,
                                         double alpha, uint64_t trials, cm_seed seed,
                                         double c_d, int d, unsigned workers,
                                         cm_rcm_report* out);

/* ---- spectral --------------------------------------------------------- */

typedef enum cm_kinetic {
  CM_KINETIC_ADJACENCY = 0,
  CM_KINETIC_LAPLACIAN = 1
} cm_kinetic;

/* a is n x n row-major; values receives n ascending eigenvalues; vectors
 * (n x n row-major, eigenvectors as columns) may be NULL; sweeps may be NULL. */
CONDMEAN_API cm_status cm_jacobi_eigen(const double* a, size_t n, double* values,
                                       double* vectors, int* sweeps);
CONDMEAN_API cm_status cm_eigenvalues_symmetric(const double* a, size_t n, double* values);
CONDMEAN_API cm_status cm_count_in_interval(const double* sorted_eigs, size_t n, double t,
                                            double s, size_t* out);

typedef struct cm_operator cm_operator;

CONDMEAN_API cm_status cm_operator_build(const cm_graph* graph, const cm_law* law,
                                         cm_seed seed, cm_kinetic kinetic,
                                         cm_operator** out);
CONDMEAN_API cm_status cm_operator_from_potential(const cm_graph* graph,
                                                  const double* potential,
                                                  cm_kinetic kinetic, cm_operator** out);
CONDMEAN_API void cm_operator_free(cm_operator* op);
CONDMEAN_API size_t cm_operator_size(const cm_operator* op);
CONDMEAN_API double cm_operator_xi(const cm_operator* op);
/* Copies size entries / size x size row-major matrices. */
CONDMEAN_API cm_status cm_operator_potential(const cm_operator* op, double* out);
CONDMEAN_API cm_status cm_operator_hamiltonian(const cm_operator* op, double* out);
CONDMEAN_API cm_status cm_operator_fluct_part(const cm_operator* op, double* out);

typedef struct cm_evc_report cm_evc_report;

typedef struct cm_evc_point {
  double t;
  cm_tail_estimate tail;
  int has_wegner_bound;
  double wegner_bound;
  int has_evc_diagnostic;
  double evc_diagnostic;
  int holds;
} cm_evc_point;

typedef struct cm_evc_summary {
  size_t volume;
  double s;
  uint64_t trials;
  size_t points;
  double max_identity_error;
  double mean_modulus;
} cm_evc_summary;

CONDMEAN_API cm_status cm_evc_experiment(const cm_graph* graph, const cm_law* law,
                                         const double* t_values, size_t n_t, double s,
                                         uint64_t trials, cm_seed seed,
                                         cm_kinetic kinetic, unsigned workers,
                                         cm_evc_report** out);
CONDMEAN_API void cm_evc_report_free(cm_evc_report* report);
CONDMEAN_API cm_status cm_evc_report_summary(const cm_evc_report* report,
                                             cm_evc_summary* out);
CONDMEAN_API cm_status cm_evc_report_point(const cm_evc_report* report, size_t index,
                                           cm_evc_point* out);

/* ---- Gaussian independence -------------------------------------------- */

typedef struct cm_gauss_report cm_gauss_report;

typedef struct cm_gauss_summary {
  size_t n;
  uint64_t samples;
  size_t bins;
  double max_ks;
  double ks_tolerance;
  double bin_width;
  double peak_density;
  double density_bound;
  double peak_slack;
  int ks_ok;
  int peak_ok;
  size_t histogram_bins;
} cm_gauss_summary;

CONDMEAN_API cm_status cm_gaussian_independence_check(size_t n, uint64_t samples,
                                                      size_t bins, double bin_width,
                                                      cm_seed seed, unsigned workers,
                                                      double ks_tolerance,
                                                      double peak_slack,
                                                      cm_gauss_report** out);
CONDMEAN_API void cm_gauss_report_free(cm_gauss_report* report);
CONDMEAN_API cm_status cm_gauss_report_summary(const cm_gauss_report* report,
                                               cm_gauss_summary* out);
CONDMEAN_API cm_status cm_gauss_report_bin_ks(const cm_gauss_report* report, size_t bin,
                                              double* out);
CONDMEAN_API cm_status cm_gauss_report_histogram(const cm_gauss_report* report,
                                                 size_t index, double* centre,
                                                 double* density);

/* ---- fiber identity --------------------------------------------------- */

typedef struct cm_fiber_identity_row {
  size_t n;
  double ell;
  uint64_t samples;
  double step;
  double tolerance;
  double max_abs_diff;
  double max_translation_diff;
  double min_lower_bound_slack;
  int pass;
} cm_fiber_identity_row;

/* rows receives n_ns * n_ells entries, ordered n-major. */
CONDMEAN_API cm_status cm_fiber_identity_check(const size_t* ns, size_t n_ns,
                                               const double* ells, size_t n_ells,
                                               uint64_t samples, double step_rel,
                                               cm_seed seed, unsigned workers,
                                               cm_fiber_identity_row* rows);

#ifdef __cplusplus
}
#endif

#endif /* CONDMEAN_CONDMEAN_H */
