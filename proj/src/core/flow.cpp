#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace sphereflow {

namespace {

void validate(const FlowConfig& cfg) {
    if (!(cfg.tau > 0.0)) throw_invalid("BadConfig", "step size tau must be positive");
    if (cfg.steps < 1) throw_invalid("BadConfig", "step count must be >= 1");
    if (cfg.record_every < 1) throw_invalid("BadConfig", "record_every must be >= 1");
    if (cfg.sign != 1 && cfg.sign != -1) {
        throw_invalid("BadSign", "sign must be +1 (ascent) or -1 (descent)");
    }
    if (cfg.stop_residual < 0.0) {
        throw_invalid("BadConfig", "stop_residual must be >= 0 (0 disables early exit)");
    }
}

} // namespace

Ensemble step(const Ensemble& mu, const InteractionMatrix& d, const FlowConfig& cfg) {
    validate(cfg);
    std::vector<Vec> drive;
    Vec mass;
    kernel_sums(mu, d, drive, mass);

    const int n = mu.dim();
    Ensemble next = mu;
    Vec y(static_cast<std::size_t>(n));
    for (int i = 0; i < mu.size(); ++i) {
        const double j = (cfg.normalization == Normalization::Partition)
                             ? mass[static_cast<std::size_t>(i)]
                             : 1.0;
        const double scale = static_cast<double>(cfg.sign) * cfg.tau / j;
        const double* xi = mu.point(i);
        const Vec& di = drive[static_cast<std::size_t>(i)];
        for (int k = 0; k < n; ++k) {
            y[static_cast<std::size_t>(k)] = xi[k] + scale * di[static_cast<std::size_t>(k)];
        }
        next.set_point(i, y); // projection enforces unit norm; ZeroNorm surfaces here
    }
    return next;
}

Trajectory run(const Ensemble& init, const InteractionMatrix& d, const FlowConfig& cfg) {
    validate(cfg);
    Trajectory traj;
    traj.tau = cfg.tau;
    traj.sign = cfg.sign;
    traj.nparticles = init.size();
    traj.abs_lambda_max = d.abs_lambda_max();

    Ensemble cur = init;
    auto record = [&](int step_index, const EnergyReport& rep) {
        traj.step_indices.push_back(step_index);
        traj.snapshots.push_back(cur);
        traj.energies.push_back(rep.energy);
        traj.dissipations.push_back(rep.dissipation);
    };

    const EnergyReport initial = stationarity_residual(cur, d);
    record(0, initial);
    if (cfg.stop_residual > 0.0 && initial.max_residual < cfg.stop_residual) {
        return traj; // already stationary to the requested tolerance
    }
    for (int k = 1; k <= cfg.steps; ++k) {
        try {
            cur = step(cur, d, cfg);
        } catch (const error& e) {
            throw error(e.code(), e.tag(),
                        "flow step " + std::to_string(k) + ": " + e.message());
        }
        const bool stride = (k % cfg.record_every == 0) || (k == cfg.steps);
        if (cfg.stop_residual > 0.0) {
            const EnergyReport rep = stationarity_residual(cur, d);
            const bool stopping = rep.max_residual < cfg.stop_residual;
            if (stride || stopping) record(k, rep);
            if (stopping) break;
        } else if (stride) {
            record(k, stationarity_residual(cur, d));
        }
    }
    return traj;
}

Vec power_iteration_step(const Vec& x, const InteractionMatrix& d) {
    if (static_cast<int>(x.size()) != d.dim()) {
        throw_invalid("DimensionMismatch", "power_iteration_step: dimension mismatch");
    }
    return project_to_sphere(d.apply(x));
}

MonotonicityReport energy_monotonicity_check(const Trajectory& traj, int sign) {
    if (sign != 1 && sign != -1) {
        throw_invalid("BadSign", "sign must be +1 (ascent) or -1 (descent)");
    }
    if (traj.energies.size() < 2) {
        throw_invalid("BadConfig", "monotonicity check needs at least two energy records");
    }
    const double lam = traj.abs_lambda_max;
    const double tol = 10.0 * traj.tau * traj.tau * static_cast<double>(traj.nparticles) *
                       std::exp(lam) * lam * lam;
    MonotonicityReport rep;
    for (std::size_t k = 0; k + 1 < traj.energies.size(); ++k) {
        const double adverse =
            -static_cast<double>(sign) * (traj.energies[k + 1] - traj.energies[k]);
        if (adverse > rep.max_violation) rep.max_violation = adverse;
        if (adverse > tol) ++rep.violations;
    }
    return rep;
}

} // namespace sphereflow
