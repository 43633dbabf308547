#pragma once

#include <cstdint>
#include <vector>

#include "flow.hpp"
#include "interaction.hpp"

namespace sphereflow {

struct ClusterReport {
    int k = 0;                       // chosen cluster count
    std::vector<Vec> centers;        // k unit vectors
    double max_radius = 0.0;         // max chordal distance member -> its center
    std::vector<int> assignment;     // nearest-center index per particle
    bool saturated = false;          // no k <= max_k met radius_tol
};

/// Spherical k-means model selection: for k = 1, 2, ... runs weighted
/// k-means on the sphere (centers are normalized means; 50 restarts seeded
/// deterministically from `seed`, best inertia wins) and returns the
/// smallest k whose max chordal radius is <= radius_tol. When even
/// k = max_k fails the radius test the max_k result is returned with
/// saturated = true. Deterministic for fixed inputs; ties break to the
/// lowest index everywhere.
ClusterReport detect_clusters(const Ensemble& mu, int max_k, double radius_tol,
                              std::uint64_t seed);

/// Default chordal radius used to call a group of particles one cluster.
inline constexpr double kDefaultRadiusTol = 0.3;

/// One row of the sweep summary: how many of the `trials` flows for this
/// lambda2 ended in one cluster vs. more than one.
struct SweepRow {
    double lambda2 = 0.0;
    int count_single = 0;
    int count_two = 0;
};

/// Per-trial sweep detail, kept so reports can show final centers/energies.
struct TrialDetail {
    int lambda_index = 0;
    int trial = 0;
    int k = 0;
    bool saturated = false;
    std::vector<Vec> centers;
    double energy_final = 0.0;
    double residual_final = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;        // one per grid value, in grid order
    std::vector<TrialDetail> trials;   // grid-major, trial-minor order
};

/// The single-vs-two-cluster transition experiment: for each lambda2 in the
/// grid (all in (0, 8]) run `trials` ascent flows under D = diag(1, lambda2)
/// from independent uniform initializations of `nparticles` particles on
/// S^1, then classify each final state with detect_clusters (max_k = 2,
/// kDefaultRadiusTol). k = 1 counts as single, anything else as two.
/// Trial (a, b) draws its initial state from the RNG stream
/// derive_stream(cfg.seed, a, b), so results are bitwise identical for any
/// `threads` count (trials are distributed over threads, each writing only
/// its own slot). cfg.sign is forced to +1 (the experiment is an ascent) and
/// snapshots are recorded only at the final step.
SweepResult cluster_sweep(const Vec& lambda2_grid, int trials, const FlowConfig& cfg,
                          int nparticles = 100, int threads = 1);

} // namespace sphereflow
