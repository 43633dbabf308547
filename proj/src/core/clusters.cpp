#include "clusters.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <thread>

#include "errors.hpp"

namespace sphereflow {

namespace {

double chordal(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double dkk = a[k] - b[k];
        s += dkk * dkk;
    }
    return std::sqrt(s);
}

struct KMeansRun {
    std::vector<Vec> centers;
    std::vector<int> assignment;
    double inertia = std::numeric_limits<double>::infinity();
};

int nearest_center(const double* x, const std::vector<Vec>& centers, int n) {
    int best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = dot(x, centers[c].data(), static_cast<std::size_t>(n));
        if (d > best_dot) {
            best_dot = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

/// One restart of weighted spherical k-means with k centers.
KMeansRun kmeans_once(const Ensemble& mu, int k, Rng& rng) {
    const int n = mu.dim();
    const int count = mu.size();

    // Forgy initialization: k distinct particles.
    std::vector<int> init;
    init.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(init.size()) < k) {
        const int j = std::min(count - 1, static_cast<int>(rng.uniform() * count));
        if (std::find(init.begin(), init.end(), j) == init.end()) init.push_back(j);
    }
    KMeansRun run;
    run.centers.reserve(static_cast<std::size_t>(k));
    for (int j : init) run.centers.push_back(mu.point_vec(j));
    run.assignment.assign(static_cast<std::size_t>(count), -1);

    for (int iter = 0; iter < 200; ++iter) {
        // Assignment step.
        bool changed = false;
        for (int i = 0; i < count; ++i) {
            const int c = nearest_center(mu.point(i), run.centers, n);
            if (c != run.assignment[static_cast<std::size_t>(i)]) {
                run.assignment[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
        }

        // Repair empty clusters: seize the particle farthest from its center.
        for (int c = 0; c < k; ++c) {
            const bool empty = std::none_of(run.assignment.begin(), run.assignment.end(),
                                            [c](int a) { return a == c; });
            if (!empty) continue;
            int worst = 0;
            double worst_d = -1.0;
            for (int i = 0; i < count; ++i) {
                const double d = chordal(
                    mu.point(i),
                    run.centers[static_cast<std::size_t>(run.assignment[static_cast<std::size_t>(i)])].data(), n);
                if (d > worst_d) {
                    worst_d = d;
                    worst = i;
                }
            }
            run.assignment[static_cast<std::size_t>(worst)] = c;
            run.centers[static_cast<std::size_t>(c)] = mu.point_vec(worst);
            changed = true;
        }
        if (!changed && iter > 0) break;

        // Update step: normalized weighted means.
        for (int c = 0; c < k; ++c) {
            Vec mean(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < count; ++i) {
                if (run.assignment[static_cast<std::size_t>(i)] != c) continue;
                const double* x = mu.point(i);
                const double w = mu.weight(i);
                for (int kk = 0; kk < n; ++kk) mean[static_cast<std::size_t>(kk)] += w * x[kk];
            }
            const double nrm = norm2(mean);
            if (nrm > 1e-12) {
                for (auto& v : mean) v /= nrm;
                run.centers[static_cast<std::size_t>(c)] = std::move(mean);
            } else {
                // Degenerate (e.g. antipodal) cluster: fall back to the member
                // farthest from the other centers (lowest index on ties).
                int pick = -1;
                double pick_score = -1.0;
                for (int i = 0; i < count; ++i) {
                    if (run.assignment[static_cast<std::size_t>(i)] != c) continue;
                    double nearest_other = std::numeric_limits<double>::infinity();
                    for (int c2 = 0; c2 < k; ++c2) {
                        if (c2 == c) continue;
                        nearest_other = std::min(
                            nearest_other,
                            chordal(mu.point(i), run.centers[static_cast<std::size_t>(c2)].data(), n));
                    }
                    const double score = (k == 1) ? 0.0 : nearest_other;
                    if (pick < 0 || score > pick_score) {
                        pick = i;
                        pick_score = score;
                    }
                }
                run.centers[static_cast<std::size_t>(c)] = mu.point_vec(pick);
            }
        }
    }

    // Final assignment pass so the nearest-center invariant holds exactly
    // even when the loop exits at the iteration cap.
    for (int i = 0; i < count; ++i) {
        run.assignment[static_cast<std::size_t>(i)] = nearest_center(mu.point(i), run.centers, n);
    }

    run.inertia = 0.0;
    for (int i = 0; i < count; ++i) {
        const double d = chordal(
            mu.point(i), run.centers[static_cast<std::size_t>(run.assignment[static_cast<std::size_t>(i)])].data(), n);
        run.inertia += mu.weight(i) * d * d;
    }
    return run;
}

} // namespace

ClusterReport detect_clusters(const Ensemble& mu, int max_k, double radius_tol,
                              std::uint64_t seed) {
    if (max_k < 1) throw_invalid("BadConfig", "max_k must be >= 1");
    if (!(radius_tol > 0.0)) throw_invalid("BadConfig", "radius_tol must be positive");

    const int n = mu.dim();
    const int upper = std::min(max_k, mu.size());
    ClusterReport last;
    for (int k = 1; k <= upper; ++k) {
        KMeansRun best;
        for (int restart = 0; restart < 50; ++restart) {
            Rng rng(derive_stream(seed, static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(restart)));
            KMeansRun candidate = kmeans_once(mu, k, rng);
            if (candidate.inertia < best.inertia) best = std::move(candidate);
        }
        ClusterReport report;
        report.k = k;
        report.centers = best.centers;
        report.assignment = best.assignment;
        report.max_radius = 0.0;
        for (int i = 0; i < mu.size(); ++i) {
            report.max_radius = std::max(
                report.max_radius,
                chordal(mu.point(i),
                        best.centers[static_cast<std::size_t>(best.assignment[static_cast<std::size_t>(i)])].data(),
                        n));
        }
        if (report.max_radius <= radius_tol) return report;
        last = std::move(report);
    }
    last.saturated = true;
    return last;
}

SweepResult cluster_sweep(const Vec& lambda2_grid, int trials, const FlowConfig& cfg,
                          int nparticles, int threads) {
    if (lambda2_grid.empty()) throw_invalid("BadConfig", "sweep needs at least one lambda2");
    for (double l2 : lambda2_grid) {
        if (!(l2 > 0.0 && l2 <= 8.0)) {
            throw_invalid("BadConfig",
                          "lambda2 grid values must lie in (0, 8], got " + std::to_string(l2));
        }
    }
    if (trials < 1) throw_invalid("BadConfig", "trials must be >= 1");
    if (nparticles < 1) throw_invalid("BadConfig", "nparticles must be >= 1");
    if (threads < 1) throw_invalid("BadConfig", "threads must be >= 1");

    FlowConfig run_cfg = cfg;
    run_cfg.sign = 1;                    // the experiment ascends the energy
    run_cfg.record_every = cfg.steps;    // only the final state is needed

    const int grid_count = static_cast<int>(lambda2_grid.size());
    const int total = grid_count * trials;
    SweepResult result;
    result.trials.assign(static_cast<std::size_t>(total), TrialDetail{});

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= total) return;
            const int a = task / trials;
            const int b = task % trials;
            const double l2 = lambda2_grid[static_cast<std::size_t>(a)];
            const InteractionMatrix d = InteractionMatrix::diagonal({1.0, l2});

            Rng rng(derive_stream(run_cfg.seed, static_cast<std::uint64_t>(a),
                                  static_cast<std::uint64_t>(b)));
            const Ensemble init = Ensemble::random(2, nparticles, rng);
            const Trajectory traj = run(init, d, run_cfg);
            const Ensemble& final_state = traj.final_state();

            // Classification RNG derived from the same stream family, with
            // trial index offset so it never collides with an init stream.
            const ClusterReport report =
                detect_clusters(final_state, 2, kDefaultRadiusTol,
                                derive_stream(run_cfg.seed, static_cast<std::uint64_t>(a),
                                              static_cast<std::uint64_t>(b) + 0x80000000ULL));

            TrialDetail& detail = result.trials[static_cast<std::size_t>(task)];
            detail.lambda_index = a;
            detail.trial = b;
            detail.k = report.k;
            detail.saturated = report.saturated;
            detail.centers = report.centers;
            detail.energy_final = traj.final_energy();
            detail.residual_final = stationarity_residual(final_state, d).max_residual;
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.rows.reserve(static_cast<std::size_t>(grid_count));
    for (int a = 0; a < grid_count; ++a) {
        SweepRow row;
        row.lambda2 = lambda2_grid[static_cast<std::size_t>(a)];
        for (int b = 0; b < trials; ++b) {
            const TrialDetail& detail = result.trials[static_cast<std::size_t>(a * trials + b)];
            if (detail.k == 1) {
                ++row.count_single;
            } else {
                ++row.count_two;
            }
        }
        result.rows.push_back(row);
    }
    return result;
}

} // namespace sphereflow
