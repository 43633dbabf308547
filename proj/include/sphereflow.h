/* sphereflow — interacting particle dynamics on the unit sphere.
 *
 * C interface to a library that simulates the ascent/descent dynamics of the
 * interaction energy
 *
 *     E(mu) = sum_{i,j} w_i w_j exp(X_i . D X_j),      X_i on S^{n-1},
 *
 * for a symmetric matrix D, together with the diagnostics used to study its
 * minimizers and maximizers: closed-form extremizer predictions, stationarity
 * residuals, cluster detection, a four-peak stationary family on the circle,
 * a mirror-descent density solver, and the quadrature constants of the
 * near-identity perturbation expansion.
 *
 * Conventions
 *   - Every function that can fail returns an int status:
 *       0  success
 *       1  invalid argument (bad sizes, bad weights, out-of-range input)
 *       2  numeric failure (overflow, negative mass, no convergence, ...)
 *     On failure sf_last_error() returns a thread-local description of the
 *     most recent error in the calling thread, prefixed with a stable tag
 *     (e.g. "ZeroNorm: ..."). Output parameters are untouched on failure.
 *   - Handles are opaque; destroy functions accept NULL and never fail.
 *   - Coordinate buffers are row-major: particle i occupies entries
 *     [i*dim, (i+1)*dim). Callers own all buffers they pass.
 *   - Seeds fully determine results: equal inputs give bitwise-equal outputs.
 */

#ifndef SPHEREFLOW_H
#define SPHEREFLOW_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SF_OK 0
#define SF_ERR_INVALID 1
#define SF_ERR_NUMERIC 2

/* Normalization of the per-particle mobility J_i in the flow. */
#define SF_NORM_CONSTANT 0  /* J_i = 1 */
#define SF_NORM_PARTITION 1 /* J_i = sum_j w_j exp(X_i . D X_j) */

typedef struct sf_matrix sf_matrix;         /* symmetric interaction matrix */
typedef struct sf_ensemble sf_ensemble;     /* weighted particles on the sphere */
typedef struct sf_trajectory sf_trajectory; /* recorded integrator history */
typedef struct sf_clusters sf_clusters;     /* cluster detection report */
typedef struct sf_sweep sf_sweep;           /* cluster-count sweep table */
typedef struct sf_density sf_density;       /* grid density on the circle */

/* Library version, "major.minor.patch". Static storage; do not free. */
const char* sf_version(void);

/* Description of the most recent error in this thread ("" if none).
 * Thread-local static storage; valid until the next failing call. */
const char* sf_last_error(void);

/* ------------------------------------------------------------------ matrix */

/* Create from a row-major dim x dim array. Fails unless symmetric to 1e-12. */
int sf_matrix_create(int dim, const double* row_major, sf_matrix** out);

/* Diagonal matrix with the given dim entries. */
int sf_matrix_diagonal(int dim, const double* diag, sf_matrix** out);

/* Identity matrix of the given dimension. */
int sf_matrix_identity(int dim, sf_matrix** out);

void sf_matrix_destroy(sf_matrix* m);

int sf_matrix_dim(const sf_matrix* m, int* out);

int sf_matrix_entry(const sf_matrix* m, int row, int col, double* out);

/* Eigenvalues in descending order; `out` holds dim entries. */
int sf_matrix_eigenvalues(const sf_matrix* m, double* out);

/* Orthonormal eigenvectors matching sf_matrix_eigenvalues order; `out` holds
 * dim*dim entries, eigenvector k in rows: out[k*dim .. k*dim+dim-1]. Each
 * vector's largest-magnitude entry is made positive so signs are stable. */
int sf_matrix_eigenvectors(const sf_matrix* m, double* out);

/* The matrix C^T D C describing the energy after pushing every particle
 * through x -> Cx / |Cx| (C invertible, row-major dim x dim). */
int sf_matrix_conjugate(const sf_matrix* d, const double* c_row_major,
                        sf_matrix** out);

/* ---------------------------------------------------------------- ensemble */

/* Weighted particles. coords holds count*dim entries (each particle is
 * normalized onto the sphere; zero vectors fail). weights may be NULL for
 * uniform 1/count, otherwise count nonnegative entries summing to 1. */
int sf_ensemble_create(int dim, int count, const double* coords,
                       const double* weights, sf_ensemble** out);

/* count particles drawn uniformly on S^{dim-1} from an RNG stream derived
 * from seed, with uniform weights. */
int sf_ensemble_random(int dim, int count, uint64_t seed, sf_ensemble** out);

void sf_ensemble_destroy(sf_ensemble* mu);

int sf_ensemble_dim(const sf_ensemble* mu, int* out);

int sf_ensemble_size(const sf_ensemble* mu, int* out);

/* Copies count*dim coordinates into `out`. */
int sf_ensemble_coords(const sf_ensemble* mu, double* out);

/* Copies count weights into `out`. */
int sf_ensemble_weights(const sf_ensemble* mu, double* out);

/* ------------------------------------------------- energy and diagnostics */

/* E(mu) = sum_{i,j} w_i w_j exp(X_i . D X_j). */
int sf_energy(const sf_ensemble* mu, const sf_matrix* d, double* out);

/* Stationarity report in one pass:
 *   energy       as sf_energy
 *   max_residual max_i || sum_j w_j e^{X_i . D X_j} P_{X_i}(D X_j) ||
 *   dissipation  mobility-weighted squared energy gradient
 *   per_particle (optional, NULL to skip) count residual entries
 * A measure is stationary exactly when max_residual vanishes. */
int sf_stationarity_report(const sf_ensemble* mu, const sf_matrix* d,
                           double* energy, double* max_residual,
                           double* dissipation, double* per_particle);

/* Directional derivative of the energy when particle i moves along the
 * tangential part of directions[i*dim .. ]; matches finite differences of
 * sf_energy under x -> proj(x + t P_x V). */
int sf_first_variation(const sf_ensemble* mu, const sf_matrix* d,
                       const double* directions, double* out);

/* Closed-form minimizer prediction from the spectrum of D. On return *known
 * is 1 when a proven form exists (then *value is its energy and direction,
 * when it is a single axis, fills dim entries; otherwise direction entries
 * are zero), 0 when the case is open (*value is NaN). description receives a
 * short human-readable label, truncated to cap-1 characters. */
int sf_predicted_minimizer(const sf_matrix* d, int* known, double* value,
                           double* direction, char* description, int cap);

/* Closed-form maximizer prediction; same contract as sf_predicted_minimizer. */
int sf_predicted_maximizer(const sf_matrix* d, int* known, double* value,
                           double* direction, char* description, int cap);

/* For spectra where no maximizer is proven: *flag is 1 when the antipodal
 * pair on the most negative axis beats every single dirac (then *energy is
 * its energy cosh(lambda_min)), else 0 with *energy NaN. */
int sf_two_cluster_candidate(const sf_matrix* d, int* flag, double* energy);

/* -------------------------------------------------------------------- flow */

/* Integrate the projected explicit-Euler dynamics
 *   X_i <- proj( X_i + sign * (tau / J_i) * sum_j w_j e^{X_i . D X_j} D X_j )
 * for `steps` synchronous steps (sign +1 ascends, -1 descends; J_i per
 * `normalization`). Records energy, dissipation, and a snapshot at step 0,
 * every record_every steps, and at the final step. stop_residual > 0 ends
 * the run early once the max stationarity residual drops below it; pass 0
 * to always run the full count. */
int sf_flow_run(const sf_ensemble* init, const sf_matrix* d, double tau,
                int steps, int sign, int normalization, int record_every,
                double stop_residual, sf_trajectory** out);

/* A single flow step (same update as sf_flow_run). */
int sf_flow_step(const sf_ensemble* mu, const sf_matrix* d, double tau,
                 int sign, int normalization, sf_ensemble** out);

/* One power-iteration step x <- proj(D x); x and out hold dim entries.
 * This is the large-step limit of the single-particle ascent. */
int sf_power_iteration_step(const sf_matrix* d, const double* x, double* out);

void sf_trajectory_destroy(sf_trajectory* traj);

/* Number of recorded entries (snapshots/energies/dissipations align). */
int sf_trajectory_length(const sf_trajectory* traj, int* out);

int sf_trajectory_step_index(const sf_trajectory* traj, int k, int* out);

int sf_trajectory_energy(const sf_trajectory* traj, int k, double* out);

int sf_trajectory_dissipation(const sf_trajectory* traj, int k, double* out);

/* Copy of recorded snapshot k (caller destroys). */
int sf_trajectory_snapshot(const sf_trajectory* traj, int k, sf_ensemble** out);

/* Monotonicity audit of the recorded energies for the given sign:
 * *violations counts adverse increments beyond the discretization allowance
 * 10 tau^2 N e^{|lambda|max} |lambda|max^2; *max_violation is the worst
 * adverse increment magnitude even when inside the allowance. */
int sf_trajectory_monotonicity(const sf_trajectory* traj, int sign,
                               int* violations, double* max_violation);

/* ---------------------------------------------------------------- clusters */

/* Spherical k-means model selection: the smallest k <= max_k whose clusters
 * all have chordal radius <= radius_tol (50 seeded restarts per k). When no
 * k passes, the max_k result is returned with saturated = 1. */
int sf_detect_clusters(const sf_ensemble* mu, int max_k, double radius_tol,
                       uint64_t seed, sf_clusters** out);

void sf_clusters_destroy(sf_clusters* c);

int sf_clusters_k(const sf_clusters* c, int* out);

int sf_clusters_saturated(const sf_clusters* c, int* out);

int sf_clusters_max_radius(const sf_clusters* c, double* out);

/* Center i as dim entries. */
int sf_clusters_center(const sf_clusters* c, int index, double* out);

/* Nearest-center index per particle; `out` holds ensemble-size entries. */
int sf_clusters_assignment(const sf_clusters* c, int* out);

/* The single-vs-two-cluster transition experiment: for each lambda2 run
 * `trials` ascent flows under D = diag(1, lambda2) from independent uniform
 * initializations of nparticles particles on the circle (trial RNG streams
 * derived from seed), classify the final states (k-means, max_k = 2, radius
 * 0.3), and tabulate. threads > 1 distributes trials without changing any
 * result. tau/steps configure each flow. */
int sf_cluster_sweep(const double* lambda2, int n_lambda2, int trials,
                     double tau, int steps, uint64_t seed, int nparticles,
                     int threads, sf_sweep** out);

void sf_sweep_destroy(sf_sweep* s);

int sf_sweep_size(const sf_sweep* s, int* n_lambda2, int* trials);

/* Counts for grid entry `index`: final states with one cluster vs. more. */
int sf_sweep_counts(const sf_sweep* s, int index, int* count_single,
                    int* count_two);

/* Per-trial detail: cluster count, saturation flag, final energy and max
 * stationarity residual. Any output pointer may be NULL to skip it. */
int sf_sweep_trial(const sf_sweep* s, int lambda_index, int trial, int* k,
                   int* saturated, double* energy_final, double* residual_final);

/* Center `center_index` (< trial's k) of one trial's final state; 2 entries. */
int sf_sweep_trial_center(const sf_sweep* s, int lambda_index, int trial,
                          int center_index, double* out);

/* ------------------------------------------------- circle stationary states */

/* The balanced four-peak family on the circle: under D = diag(l1, l2) the
 * equal-weight peaks at angles {phi, pi-phi, pi+phi, 2pi-phi} are stationary
 * exactly when tanh(l1 cos^2 phi) / tanh(l2 sin^2 phi) = l2 / l1. Solves for
 * the unique phi in (0, pi/2) given l1, l2 > 0; *residual (NULL to skip)
 * reports the tanh-identity defect at the root. */
int sf_four_peak_angle(double lambda1, double lambda2, double* phi,
                       double* residual);

/* The four equal-weight particles at angles phi, pi-phi, pi+phi, 2pi-phi. */
int sf_four_peak_ensemble(double phi, sf_ensemble** out);

/* Stationary mixture sum_k (t[k]/2)(delta_{z_k} + delta_{-z_k}) over the
 * eigenvectors of D selected by `subset` (n_subset distinct indices into the
 * descending eigenvalue order). t holds n_subset nonnegative weights summing
 * to 1. */
int sf_eigen_mixture(const sf_matrix* d, const int* subset, int n_subset,
                     const double* t, sf_ensemble** out);

/* Stationarity residual of the uniform distribution on S^{n-1} under D,
 * evaluated by deterministic quadrature with `resolution` nodes (>= 64;
 * n = 2 or 3). Zero exactly when all eigenvalue magnitudes coincide. */
int sf_uniform_residual(const sf_matrix* d, int resolution, double* out);

/* Energies of the three competing states under D = diag(-1, lambda2):
 * single dirac on the lambda2 axis (e^lambda2), antipodal pair on the -1
 * axis (cosh 1), antipodal pair on the lambda2 axis (cosh lambda2). */
int sf_indefinite_comparison(double lambda2, double* single, double* two_min,
                             double* two_max);

/* ----------------------------------------------------------- grid densities */

/* Minimize the energy of a density on n_points circle grid angles under
 * D = Id + eps*diag(m_diag[0], m_diag[1]) by exponentiated-gradient descent
 * from the uniform density: `iters` multiplicative steps of size tau. The
 * result records the energy before the first step and after each step. */
int sf_density_solve(double eps, const double* m_diag, int n_points,
                     double tau, int iters, sf_density** out);

/* First-order prediction (1/N)(1 + eps(alpha x.Mx + beta)) of the perturbed
 * minimizer, renormalized; alpha = -C1/C2 from the quadrature constants and
 * beta centers the correction. Fails with a numeric error when eps is too
 * large for the predicted mass to stay nonnegative. */
int sf_density_asymptotic(double eps, const double* m_diag, int n_points,
                          sf_density** out);

/* Density proportional to exp(upsilon cos 2theta) on the grid. */
int sf_density_conjectured(double upsilon, int n_points, sf_density** out);

void sf_density_destroy(sf_density* m);

int sf_density_size(const sf_density* m, int* out);

/* Grid angles theta_i = -pi + 2 pi i / N; `out` holds N entries. */
int sf_density_angles(const sf_density* m, double* out);

/* Mass vector (sums to 1); `out` holds N entries. */
int sf_density_mass(const sf_density* m, double* out);

/* Number of recorded energies (0 unless the density came from a solve). */
int sf_density_energy_count(const sf_density* m, int* out);

int sf_density_energies(const sf_density* m, double* out);

/* Least-squares exponent of the exp(upsilon cos 2theta) model against this
 * density (exact round trip with sf_density_conjectured). */
int sf_density_fit_upsilon(const sf_density* m, double* out);

/* No-intercept least squares of upsilon values against (eps, eps^2). */
int sf_upsilon_regression(const double* eps, const double* upsilon, int count,
                          double* linear, double* quadratic);

/* --------------------------------------------- perturbation-expansion constants */

/* The three quadrature constants of the near-identity expansion on S^{n-1}
 * (n = 2 or 3), defined by integrals of e^{x.y} against the uniform measure:
 *   C1: kernel-weighted alignment   integral e^{x.y} (x.y) dmu0
 *   C2, C3: coordinates of the square moment  integral e^{x.y} x_i^2 dmu0
 *           = C2 y_i^2 + C3.
 * Computed by deterministic quadrature with `resolution` panels (>= 128). */
int sf_perturbation_constants(int n, int resolution, double* c1, double* c2,
                              double* c3);

/* Max deviation of integral e^{x.y} x dmu0(x) from C1*y over `trials` seeded
 * random directions y. */
int sf_verify_vector_identity(int n, int resolution, int trials, double* out);

/* Max deviation of integral e^{x.y} x_i^2 dmu0(x) from C2 y_i^2 + C3. */
int sf_verify_square_identity(int n, int resolution, int trials, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPHEREFLOW_H */
