#pragma once

#include <cstdint>
#include <vector>

#include "interaction.hpp"

namespace sphereflow {

/// Parameters of the projected explicit-Euler integrator.
struct FlowConfig {
    double tau = 0.075;      // step size, > 0
    int steps = 1500;        // iteration count, >= 1
    int sign = 1;            // +1 ascends the energy, -1 descends
    Normalization normalization = Normalization::Partition;
    std::uint64_t seed = 0;  // consumed by callers that draw the initial state
    int record_every = 1;    // snapshot/energy recording stride, >= 1
    double stop_residual = 0.0; // early exit when max residual drops below; 0 disables
};

/// Recorded history of one integrator run. All four lists are parallel:
/// entry k belongs to step index step_indices[k] (strictly increasing; index
/// 0 is the initial state, the final step is always recorded).
struct Trajectory {
    std::vector<int> step_indices;
    std::vector<Ensemble> snapshots;
    Vec energies;
    Vec dissipations;
    // Run metadata, kept so diagnostics can reconstruct tolerances.
    double tau = 0.0;
    int sign = 1;
    int nparticles = 0;
    double abs_lambda_max = 0.0;

    const Ensemble& final_state() const { return snapshots.back(); }
    double final_energy() const { return energies.back(); }
};

struct MonotonicityReport {
    int violations = 0;      // adverse energy increments beyond the tolerance
    double max_violation = 0.0; // worst adverse increment, 0 when none
};

/// One synchronous update: every particle moves by
///   X_i <- proj( X_i + sign * (tau / J_i) * sum_j w_j e^{X_i . D X_j} D X_j )
/// with all sums and J_i evaluated on the pre-step state. Weights unchanged.
Ensemble step(const Ensemble& mu, const InteractionMatrix& d, const FlowConfig& cfg);

/// Iterate step() cfg.steps times, recording energy, dissipation, and a
/// snapshot at step 0, every record_every steps, and at the final step.
/// Deterministic for fixed inputs. Errors from step() are rethrown with the
/// failing step index prepended to the message.
Trajectory run(const Ensemble& init, const InteractionMatrix& d, const FlowConfig& cfg);

/// The large-step limit of the single-particle ascent scheme: x <- proj(D x).
Vec power_iteration_step(const Vec& x, const InteractionMatrix& d);

/// Count adverse energy increments along the recorded energies: entry k is a
/// violation when sign * (E_{k+1} - E_k) < -tol with the discretization
/// allowance tol = 10 * tau^2 * N * e^{|lambda|max} * |lambda|max^2.
/// max_violation reports the worst adverse increment magnitude even when it
/// stays inside the tolerance.
MonotonicityReport energy_monotonicity_check(const Trajectory& traj, int sign);

} // namespace sphereflow
