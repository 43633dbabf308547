// C ABI for the sphereflow core: opaque handles around the C++ value types,
// exceptions mapped to integer status codes, error text kept per thread.

#include "sphereflow.h"

#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "core/asymptotics.hpp"
#include "core/clusters.hpp"
#include "core/density.hpp"
#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/interaction.hpp"
#include "core/rng.hpp"
#include "core/stationary.hpp"

using namespace sphereflow;

struct sf_matrix {
    InteractionMatrix m;
};

struct sf_ensemble {
    Ensemble e;
};

struct sf_trajectory {
    Trajectory t;
};

struct sf_clusters {
    ClusterReport r;
    int dim = 0;
    int count = 0;
};

struct sf_sweep {
    SweepResult s;
    int trials = 0;
};

struct sf_density {
    GridDensity g;
    Vec energies;
};

namespace {

thread_local std::string g_last_error;

// Run `fn` translating exceptions into status codes and the thread-local
// error text. The sphereflow::error code distinguishes invalid arguments
// from numeric failures; anything else counts as numeric.
template <typename Fn>
int guard(Fn&& fn) {
    try {
        fn();
        return SF_OK;
    } catch (const error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SF_ERR_NUMERIC;
    }
}

int fail_null(const char* what) {
    g_last_error = std::string("NullPointer: ") + what + " must not be null";
    return SF_ERR_INVALID;
}

int fail_range(const char* what) {
    g_last_error = std::string("BadIndex: ") + what + " out of range";
    return SF_ERR_INVALID;
}

Normalization to_normalization(int code) {
    if (code == SF_NORM_CONSTANT) return Normalization::Constant;
    if (code == SF_NORM_PARTITION) return Normalization::Partition;
    throw error(errc::invalid_argument, "BadConfig",
                "normalization must be SF_NORM_CONSTANT or SF_NORM_PARTITION");
}

void fill_prediction(const ExtremizerPrediction& p, int dim, int* known,
                     double* value, double* direction, char* description,
                     int cap) {
    *known = p.known ? 1 : 0;
    *value = p.value;
    for (int i = 0; i < dim; ++i)
        direction[i] = i < static_cast<int>(p.direction.size()) ? p.direction[i] : 0.0;
    if (cap < 1)
        throw error(errc::invalid_argument, "BadConfig", "description capacity must be >= 1");
    std::size_t n = std::min(p.description.size(), static_cast<std::size_t>(cap - 1));
    std::memcpy(description, p.description.data(), n);
    description[n] = '\0';
}

} // namespace

extern "C" {

const char* sf_version(void) { return "1.0.0"; }

const char* sf_last_error(void) { return g_last_error.c_str(); }

// ------------------------------------------------------------------ matrix

int sf_matrix_create(int dim, const double* row_major, sf_matrix** out) {
    if (!row_major) return fail_null("row_major");
    if (!out) return fail_null("out");
    return guard([&] {
        if (dim < 1)
            throw error(errc::invalid_argument, "BadConfig", "dim must be >= 1");
        std::vector<double> data(row_major, row_major + static_cast<std::size_t>(dim) * dim);
        *out = new sf_matrix{InteractionMatrix(dim, std::move(data))};
    });
}

int sf_matrix_diagonal(int dim, const double* diag, sf_matrix** out) {
    if (!diag) return fail_null("diag");
    if (!out) return fail_null("out");
    return guard([&] {
        if (dim < 1)
            throw error(errc::invalid_argument, "BadConfig", "dim must be >= 1");
        *out = new sf_matrix{InteractionMatrix::diagonal(Vec(diag, diag + dim))};
    });
}

int sf_matrix_identity(int dim, sf_matrix** out) {
    if (!out) return fail_null("out");
    return guard([&] {
        if (dim < 1)
            throw error(errc::invalid_argument, "BadConfig", "dim must be >= 1");
        *out = new sf_matrix{InteractionMatrix::identity(dim)};
    });
}

void sf_matrix_destroy(sf_matrix* m) { delete m; }

int sf_matrix_dim(const sf_matrix* m, int* out) {
    if (!m) return fail_null("matrix");
    if (!out) return fail_null("out");
    *out = m->m.dim();
    return SF_OK;
}

int sf_matrix_entry(const sf_matrix* m, int row, int col, double* out) {
    if (!m) return fail_null("matrix");
    if (!out) return fail_null("out");
    if (row < 0 || row >= m->m.dim() || col < 0 || col >= m->m.dim())
        return fail_range("matrix entry");
    *out = m->m.entry(row, col);
    return SF_OK;
}

int sf_matrix_eigenvalues(const sf_matrix* m, double* out) {
    if (!m) return fail_null("matrix");
    if (!out) return fail_null("out");
    const Vec& ev = m->m.eigenvalues();
    std::memcpy(out, ev.data(), ev.size() * sizeof(double));
    return SF_OK;
}

int sf_matrix_eigenvectors(const sf_matrix* m, double* out) {
    if (!m) return fail_null("matrix");
    if (!out) return fail_null("out");
    int dim = m->m.dim();
    for (int k = 0; k < dim; ++k)
        std::memcpy(out + static_cast<std::size_t>(k) * dim, m->m.eigenvectors()[k].data(),
                    static_cast<std::size_t>(dim) * sizeof(double));
    return SF_OK;
}

int sf_matrix_conjugate(const sf_matrix* d, const double* c_row_major, sf_matrix** out) {
    if (!d) return fail_null("matrix");
    if (!c_row_major) return fail_null("c_row_major");
    if (!out) return fail_null("out");
    return guard([&] {
        std::size_t n = static_cast<std::size_t>(d->m.dim()) * d->m.dim();
        std::vector<double> c(c_row_major, c_row_major + n);
        *out = new sf_matrix{transform_ellipsoid(c, d->m)};
    });
}

// ---------------------------------------------------------------- ensemble

int sf_ensemble_create(int dim, int count, const double* coords, const double* weights,
                       sf_ensemble** out) {
    if (!coords) return fail_null("coords");
    if (!out) return fail_null("out");
    return guard([&] {
        if (dim < 1 || count < 1)
            throw error(errc::invalid_argument, "EmptyEnsemble",
                        "need dim >= 1 and count >= 1");
        std::vector<Vec> points(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            points[i].assign(coords + static_cast<std::size_t>(i) * dim,
                             coords + static_cast<std::size_t>(i + 1) * dim);
        if (weights)
            *out = new sf_ensemble{Ensemble(points, Vec(weights, weights + count))};
        else
            *out = new sf_ensemble{Ensemble(points)};
    });
}

int sf_ensemble_random(int dim, int count, uint64_t seed, sf_ensemble** out) {
    if (!out) return fail_null("out");
    return guard([&] {
        Rng rng(derive_stream(seed, 0, 0));
        *out = new sf_ensemble{Ensemble::random(dim, count, rng)};
    });
}

void sf_ensemble_destroy(sf_ensemble* mu) { delete mu; }

int sf_ensemble_dim(const sf_ensemble* mu, int* out) {
    if (!mu) return fail_null("ensemble");
    if (!out) return fail_null("out");
    *out = mu->e.dim();
    return SF_OK;
}

int sf_ensemble_size(const sf_ensemble* mu, int* out) {
    if (!mu) return fail_null("ensemble");
    if (!out) return fail_null("out");
    *out = mu->e.size();
    return SF_OK;
}

int sf_ensemble_coords(const sf_ensemble* mu, double* out) {
    if (!mu) return fail_null("ensemble");
    if (!out) return fail_null("out");
    std::memcpy(out, mu->e.coords().data(), mu->e.coords().size() * sizeof(double));
    return SF_OK;
}

int sf_ensemble_weights(const sf_ensemble* mu, double* out) {
    if (!mu) return fail_null("ensemble");
    if (!out) return fail_null("out");
    std::memcpy(out, mu->e.weights().data(), mu->e.weights().size() * sizeof(double));
    return SF_OK;
}

// ------------------------------------------------- energy and diagnostics

int sf_energy(const sf_ensemble* mu, const sf_matrix* d, double* out) {
    if (!mu) return fail_null("ensemble");
    if (!d) return fail_null("matrix");
    if (!out) return fail_null("out");
    return guard([&] { *out = energy(mu->e, d->m); });
}

int sf_stationarity_report(const sf_ensemble* mu, const sf_matrix* d, double* energy_out,
                           double* max_residual, double* dissipation_out,
                           double* per_particle) {
    if (!mu) return fail_null("ensemble");
    if (!d) return fail_null("matrix");
    if (!energy_out) return fail_null("energy");
    if (!max_residual) return fail_null("max_residual");
    if (!dissipation_out) return fail_null("dissipation");
    return guard([&] {
        EnergyReport rep = stationarity_residual(mu->e, d->m);
        *energy_out = rep.energy;
        *max_residual = rep.max_residual;
        *dissipation_out = rep.dissipation;
        if (per_particle)
            std::memcpy(per_particle, rep.per_particle_residual.data(),
                        rep.per_particle_residual.size() * sizeof(double));
    });
}

int sf_first_variation(const sf_ensemble* mu, const sf_matrix* d, const double* directions,
                       double* out) {
    if (!mu) return fail_null("ensemble");
    if (!d) return fail_null("matrix");
    if (!directions) return fail_null("directions");
    if (!out) return fail_null("out");
    return guard([&] {
        int dim = mu->e.dim();
        std::vector<Vec> v(static_cast<std::size_t>(mu->e.size()));
        for (int i = 0; i < mu->e.size(); ++i)
            v[i].assign(directions + static_cast<std::size_t>(i) * dim,
                        directions + static_cast<std::size_t>(i + 1) * dim);
        *out = first_variation(mu->e, d->m, v);
    });
}

int sf_predicted_minimizer(const sf_matrix* d, int* known, double* value, double* direction,
                           char* description, int cap) {
    if (!d) return fail_null("matrix");
    if (!known) return fail_null("known");
    if (!value) return fail_null("value");
    if (!direction) return fail_null("direction");
    if (!description) return fail_null("description");
    return guard([&] {
        ExtremizerCatalog cat = extremizer_catalog(d->m);
        fill_prediction(cat.minimizer, d->m.dim(), known, value, direction, description, cap);
    });
}

int sf_predicted_maximizer(const sf_matrix* d, int* known, double* value, double* direction,
                           char* description, int cap) {
    if (!d) return fail_null("matrix");
    if (!known) return fail_null("known");
    if (!value) return fail_null("value");
    if (!direction) return fail_null("direction");
    if (!description) return fail_null("description");
    return guard([&] {
        ExtremizerCatalog cat = extremizer_catalog(d->m);
        fill_prediction(cat.maximizer, d->m.dim(), known, value, direction, description, cap);
    });
}

int sf_two_cluster_candidate(const sf_matrix* d, int* flag, double* energy_out) {
    if (!d) return fail_null("matrix");
    if (!flag) return fail_null("flag");
    if (!energy_out) return fail_null("energy");
    return guard([&] {
        ExtremizerCatalog cat = extremizer_catalog(d->m);
        *flag = cat.two_cluster_candidate ? 1 : 0;
        *energy_out = cat.candidate_energy;
    });
}

// -------------------------------------------------------------------- flow

int sf_flow_run(const sf_ensemble* init, const sf_matrix* d, double tau, int steps, int sign,
                int normalization, int record_every, double stop_residual,
                sf_trajectory** out) {
    if (!init) return fail_null("ensemble");
    if (!d) return fail_null("matrix");
    if (!out) return fail_null("out");
    return guard([&] {
        FlowConfig cfg;
        cfg.tau = tau;
        cfg.steps = steps;
        cfg.sign = sign;
        cfg.normalization = to_normalization(normalization);
        cfg.record_every = record_every;
        cfg.stop_residual = stop_residual;
        *out = new sf_trajectory{run(init->e, d->m, cfg)};
    });
}

int sf_flow_step(const sf_ensemble* mu, const sf_matrix* d, double tau, int sign,
                 int normalization, sf_ensemble** out) {
    if (!mu) return fail_null("ensemble");
    if (!d) return fail_null("matrix");
    if (!out) return fail_null("out");
    return guard([&] {
        FlowConfig cfg;
        cfg.tau = tau;
        cfg.steps = 1;
        cfg.sign = sign;
        cfg.normalization = to_normalization(normalization);
        *out = new sf_ensemble{step(mu->e, d->m, cfg)};
    });
}

int sf_power_iteration_step(const sf_matrix* d, const double* x, double* out) {
    if (!d) return fail_null("matrix");
    if (!x) return fail_null("x");
    if (!out) return fail_null("out");
    return guard([&] {
        Vec next = power_iteration_step(Vec(x, x + d->m.dim()), d->m);
        std::memcpy(out, next.data(), next.size() * sizeof(double));
    });
}

void sf_trajectory_destroy(sf_trajectory* traj) { delete traj; }

int sf_trajectory_length(const sf_trajectory* traj, int* out) {
    if (!traj) return fail_null("trajectory");
    if (!out) return fail_null("out");
    *out = static_cast<int>(traj->t.step_indices.size());
    return SF_OK;
}

int sf_trajectory_step_index(const sf_trajectory* traj, int k, int* out) {
    if (!traj) return fail_null("trajectory");
    if (!out) return fail_null("out");
    if (k < 0 || k >= static_cast<int>(traj->t.step_indices.size()))
        return fail_range("trajectory entry");
    *out = traj->t.step_indices[static_cast<std::size_t>(k)];
    return SF_OK;
}

int sf_trajectory_energy(const sf_trajectory* traj, int k, double* out) {
    if (!traj) return fail_null("trajectory");
    if (!out) return fail_null("out");
    if (k < 0 || k >= static_cast<int>(traj->t.energies.size()))
        return fail_range("trajectory entry");
    *out = traj->t.energies[static_cast<std::size_t>(k)];
    return SF_OK;
}

int sf_trajectory_dissipation(const sf_trajectory* traj, int k, double* out) {
    if (!traj) return fail_null("trajectory");
    if (!out) return fail_null("out");
    if (k < 0 || k >= static_cast<int>(traj->t.dissipations.size()))
        return fail_range("trajectory entry");
    *out = traj->t.dissipations[static_cast<std::size_t>(k)];
    return SF_OK;
}

int sf_trajectory_snapshot(const sf_trajectory* traj, int k, sf_ensemble** out) {
    if (!traj) return fail_null("trajectory");
    if (!out) return fail_null("out");
    if (k < 0 || k >= static_cast<int>(traj->t.snapshots.size()))
        return fail_range("trajectory entry");
    return guard([&] { *out = new sf_ensemble{traj->t.snapshots[static_cast<std::size_t>(k)]}; });
}

int sf_trajectory_monotonicity(const sf_trajectory* traj, int sign, int* violations,
                               double* max_violation) {
    if (!traj) return fail_null("trajectory");
    if (!violations) return fail_null("violations");
    if (!max_violation) return fail_null("max_violation");
    return guard([&] {
        MonotonicityReport rep = energy_monotonicity_check(traj->t, sign);
        *violations = rep.violations;
        *max_violation = rep.max_violation;
    });
}

// ---------------------------------------------------------------- clusters

int sf_detect_clusters(const sf_ensemble* mu, int max_k, double radius_tol, uint64_t seed,
                       sf_clusters** out) {
    if (!mu) return fail_null("ensemble");
    if (!out) return fail_null("out");
    return guard([&] {
        ClusterReport rep = detect_clusters(mu->e, max_k, radius_tol, seed);
        *out = new sf_clusters{std::move(rep), mu->e.dim(), mu->e.size()};
    });
}

void sf_clusters_destroy(sf_clusters* c) { delete c; }

int sf_clusters_k(const sf_clusters* c, int* out) {
    if (!c) return fail_null("clusters");
    if (!out) return fail_null("out");
    *out = c->r.k;
    return SF_OK;
}

int sf_clusters_saturated(const sf_clusters* c, int* out) {
    if (!c) return fail_null("clusters");
    if (!out) return fail_null("out");
    *out = c->r.saturated ? 1 : 0;
    return SF_OK;
}

int sf_clusters_max_radius(const sf_clusters* c, double* out) {
    if (!c) return fail_null("clusters");
    if (!out) return fail_null("out");
    *out = c->r.max_radius;
    return SF_OK;
}

int sf_clusters_center(const sf_clusters* c, int index, double* out) {
    if (!c) return fail_null("clusters");
    if (!out) return fail_null("out");
    if (index < 0 || index >= static_cast<int>(c->r.centers.size()))
        return fail_range("cluster center");
    const Vec& center = c->r.centers[static_cast<std::size_t>(index)];
    std::memcpy(out, center.data(), center.size() * sizeof(double));
    return SF_OK;
}

int sf_clusters_assignment(const sf_clusters* c, int* out) {
    if (!c) return fail_null("clusters");
    if (!out) return fail_null("out");
    for (std::size_t i = 0; i < c->r.assignment.size(); ++i) out[i] = c->r.assignment[i];
    return SF_OK;
}

int sf_cluster_sweep(const double* lambda2, int n_lambda2, int trials, double tau, int steps,
                     uint64_t seed, int nparticles, int threads, sf_sweep** out) {
    if (!lambda2) return fail_null("lambda2");
    if (!out) return fail_null("out");
    return guard([&] {
        if (n_lambda2 < 1)
            throw error(errc::invalid_argument, "BadConfig", "need at least one lambda2");
        FlowConfig cfg;
        cfg.tau = tau;
        cfg.steps = steps;
        cfg.sign = +1;
        cfg.normalization = Normalization::Partition;
        cfg.seed = seed;
        SweepResult res = cluster_sweep(Vec(lambda2, lambda2 + n_lambda2), trials, cfg,
                                        nparticles, threads);
        *out = new sf_sweep{std::move(res), trials};
    });
}

void sf_sweep_destroy(sf_sweep* s) { delete s; }

int sf_sweep_size(const sf_sweep* s, int* n_lambda2, int* trials) {
    if (!s) return fail_null("sweep");
    if (!n_lambda2) return fail_null("n_lambda2");
    if (!trials) return fail_null("trials");
    *n_lambda2 = static_cast<int>(s->s.rows.size());
    *trials = s->trials;
    return SF_OK;
}

int sf_sweep_counts(const sf_sweep* s, int index, int* count_single, int* count_two) {
    if (!s) return fail_null("sweep");
    if (!count_single) return fail_null("count_single");
    if (!count_two) return fail_null("count_two");
    if (index < 0 || index >= static_cast<int>(s->s.rows.size()))
        return fail_range("sweep row");
    *count_single = s->s.rows[static_cast<std::size_t>(index)].count_single;
    *count_two = s->s.rows[static_cast<std::size_t>(index)].count_two;
    return SF_OK;
}

namespace {

const TrialDetail* find_trial(const sf_sweep* s, int lambda_index, int trial) {
    if (lambda_index < 0 || lambda_index >= static_cast<int>(s->s.rows.size())) return nullptr;
    if (trial < 0 || trial >= s->trials) return nullptr;
    return &s->s.trials[static_cast<std::size_t>(lambda_index) * s->trials + trial];
}

} // namespace

int sf_sweep_trial(const sf_sweep* s, int lambda_index, int trial, int* k, int* saturated,
                   double* energy_final, double* residual_final) {
    if (!s) return fail_null("sweep");
    const TrialDetail* detail = find_trial(s, lambda_index, trial);
    if (!detail) return fail_range("sweep trial");
    if (k) *k = detail->k;
    if (saturated) *saturated = detail->saturated ? 1 : 0;
    if (energy_final) *energy_final = detail->energy_final;
    if (residual_final) *residual_final = detail->residual_final;
    return SF_OK;
}

int sf_sweep_trial_center(const sf_sweep* s, int lambda_index, int trial, int center_index,
                          double* out) {
    if (!s) return fail_null("sweep");
    if (!out) return fail_null("out");
    const TrialDetail* detail = find_trial(s, lambda_index, trial);
    if (!detail) return fail_range("sweep trial");
    if (center_index < 0 || center_index >= static_cast<int>(detail->centers.size()))
        return fail_range("trial center");
    const Vec& center = detail->centers[static_cast<std::size_t>(center_index)];
    std::memcpy(out, center.data(), center.size() * sizeof(double));
    return SF_OK;
}

// ------------------------------------------------- circle stationary states

int sf_four_peak_angle(double lambda1, double lambda2, double* phi, double* residual) {
    if (!phi) return fail_null("phi");
    return guard([&] {
        FourPeakSolution sol = four_peak_angle(lambda1, lambda2);
        *phi = sol.phi;
        if (residual) *residual = sol.residual;
    });
}

int sf_four_peak_ensemble(double phi, sf_ensemble** out) {
    if (!out) return fail_null("out");
    return guard([&] { *out = new sf_ensemble{four_peak_ensemble(phi)}; });
}

int sf_eigen_mixture(const sf_matrix* d, const int* subset, int n_subset, const double* t,
                     sf_ensemble** out) {
    if (!d) return fail_null("matrix");
    if (!subset) return fail_null("subset");
    if (!t) return fail_null("t");
    if (!out) return fail_null("out");
    return guard([&] {
        if (n_subset < 1)
            throw error(errc::invalid_argument, "BadConfig", "need at least one eigenvector");
        std::vector<int> idx(subset, subset + n_subset);
        *out = new sf_ensemble{eigen_mixture(d->m, idx, Vec(t, t + n_subset))};
    });
}

int sf_uniform_residual(const sf_matrix* d, int resolution, double* out) {
    if (!d) return fail_null("matrix");
    if (!out) return fail_null("out");
    return guard([&] { *out = uniform_stationarity_residual(d->m, resolution); });
}

int sf_indefinite_comparison(double lambda2, double* single, double* two_min,
                             double* two_max) {
    if (!single) return fail_null("single");
    if (!two_min) return fail_null("two_min");
    if (!two_max) return fail_null("two_max");
    return guard([&] {
        IndefiniteComparison cmp = indefinite_energy_comparison(lambda2);
        *single = cmp.single;
        *two_min = cmp.two_min;
        *two_max = cmp.two_max;
    });
}

// ----------------------------------------------------------- grid densities

int sf_density_solve(double eps, const double* m_diag, int n_points, double tau, int iters,
                     sf_density** out) {
    if (!m_diag) return fail_null("m_diag");
    if (!out) return fail_null("out");
    return guard([&] {
        DensitySolution sol = solve_density(eps, Vec(m_diag, m_diag + 2), n_points, tau, iters);
        *out = new sf_density{std::move(sol.density), std::move(sol.energies)};
    });
}

int sf_density_asymptotic(double eps, const double* m_diag, int n_points, sf_density** out) {
    if (!m_diag) return fail_null("m_diag");
    if (!out) return fail_null("out");
    return guard([&] {
        *out = new sf_density{asymptotic_density(eps, Vec(m_diag, m_diag + 2), n_points), {}};
    });
}

int sf_density_conjectured(double upsilon, int n_points, sf_density** out) {
    if (!out) return fail_null("out");
    return guard([&] { *out = new sf_density{conjectured_density(upsilon, n_points), {}}; });
}

void sf_density_destroy(sf_density* m) { delete m; }

int sf_density_size(const sf_density* m, int* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    *out = m->g.n_points;
    return SF_OK;
}

int sf_density_angles(const sf_density* m, double* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    std::memcpy(out, m->g.angles.data(), m->g.angles.size() * sizeof(double));
    return SF_OK;
}

int sf_density_mass(const sf_density* m, double* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    std::memcpy(out, m->g.mass.data(), m->g.mass.size() * sizeof(double));
    return SF_OK;
}

int sf_density_energy_count(const sf_density* m, int* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    *out = static_cast<int>(m->energies.size());
    return SF_OK;
}

int sf_density_energies(const sf_density* m, double* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    std::memcpy(out, m->energies.data(), m->energies.size() * sizeof(double));
    return SF_OK;
}

int sf_density_fit_upsilon(const sf_density* m, double* out) {
    if (!m) return fail_null("density");
    if (!out) return fail_null("out");
    return guard([&] { *out = fit_upsilon(m->g); });
}

int sf_upsilon_regression(const double* eps, const double* upsilon, int count, double* linear,
                          double* quadratic) {
    if (!eps) return fail_null("eps");
    if (!upsilon) return fail_null("upsilon");
    if (!linear) return fail_null("linear");
    if (!quadratic) return fail_null("quadratic");
    return guard([&] {
        UpsilonRegression reg =
            upsilon_regression(Vec(eps, eps + count), Vec(upsilon, upsilon + count));
        *linear = reg.linear;
        *quadratic = reg.quadratic;
    });
}

// --------------------------------------------- perturbation-expansion constants

int sf_perturbation_constants(int n, int resolution, double* c1, double* c2, double* c3) {
    if (!c1) return fail_null("c1");
    if (!c2) return fail_null("c2");
    if (!c3) return fail_null("c3");
    return guard([&] {
        PerturbationConstants c = compute_constants(n, resolution);
        *c1 = c.c1;
        *c2 = c.c2;
        *c3 = c.c3;
    });
}

int sf_verify_vector_identity(int n, int resolution, int trials, double* out) {
    if (!out) return fail_null("out");
    return guard([&] { *out = verify_vector_identity(n, resolution, trials); });
}

int sf_verify_square_identity(int n, int resolution, int trials, double* out) {
    if (!out) return fail_null("out");
    return guard([&] { *out = verify_square_identity(n, resolution, trials); });
}

} // extern "C"
