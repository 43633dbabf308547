// Synchronous projected Euler flow: fixed points, convergence, monotonicity
// accounting, determinism, and rotation equivariance.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/clusters.hpp"
#include "core/flow.hpp"
#include "core/geometry.hpp"
#include "core/interaction.hpp"
#include "core/rng.hpp"
#include "core/stationary.hpp"

using namespace sphereflow;

namespace {

double dist2(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

double dist_to_pole(const double* p, int dim) {
    Vec plus(static_cast<std::size_t>(dim), 0.0), minus(static_cast<std::size_t>(dim), 0.0);
    plus.back() = 1.0;
    minus.back() = -1.0;
    Vec x(p, p + dim);
    return std::min(dist2(x, plus), dist2(x, minus));
}

std::vector<double> random_symmetric(int n, double scale, Rng& rng) {
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = scale * rng.gaussian();
            m[static_cast<std::size_t>(i) * n + j] = v;
            m[static_cast<std::size_t>(j) * n + i] = v;
        }
    }
    return m;
}

}  // namespace

TEST_CASE("aligned particles are fixed points of the step") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    Ensemble top({{0.0, 0.0, 1.0}});
    FlowConfig cfg;
    cfg.tau = 0.1;
    for (Normalization norm : {Normalization::Constant, Normalization::Partition}) {
        cfg.normalization = norm;
        Ensemble out = step(top, d, cfg);
        CHECK(dist2(out.point_vec(0), {0.0, 0.0, 1.0}) <= 1e-15);
    }

    // A single particle under the identity matrix never moves.
    Rng rng(2);
    Ensemble lone({sample_uniform(3, rng)});
    Ensemble moved = step(lone, InteractionMatrix::identity(3), cfg);
    CHECK(dist2(moved.point_vec(0), lone.point_vec(0)) <= 1e-15);
}

TEST_CASE("ascent increases the energy of a perturbed pair") {
    InteractionMatrix d = InteractionMatrix::diagonal({2.0, 1.0});
    Vec a = project_to_sphere({1e-3, 1.0});
    Vec b = project_to_sphere({-1e-3, -1.0});
    Ensemble mu({a, b});
    const double e0 = energy(mu, d);
    FlowConfig cfg;
    cfg.tau = 0.075;
    cfg.sign = +1;
    for (int s = 0; s < 100; ++s) mu = step(mu, d, cfg);
    CHECK(energy(mu, d) > e0);
}

TEST_CASE("trajectory recording and convergence of the one-particle ascent") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    FlowConfig cfg;
    cfg.tau = 0.075;
    cfg.steps = 1500;
    cfg.sign = +1;
    cfg.normalization = Normalization::Partition;
    cfg.record_every = 500;
    for (std::uint64_t seed : {1, 7, 13, 22, 30}) {
        Rng rng(derive_stream(seed, 0, 0));
        Ensemble init = Ensemble::random(3, 1, rng);
        Trajectory traj = run(init, d, cfg);
        REQUIRE(traj.step_indices.front() == 0);
        REQUIRE(traj.step_indices.back() == 1500);
        REQUIRE(traj.snapshots.size() == traj.step_indices.size());
        REQUIRE(traj.energies.size() == traj.step_indices.size());
        CHECK(dist_to_pole(traj.final_state().point(0), 3) <= 1e-6);
        CHECK(traj.final_energy() == doctest::Approx(std::exp(4.0)).epsilon(1e-6));
    }
}

TEST_CASE("ascent under a negative definite matrix splits into an antipodal pair") {
    InteractionMatrix d = InteractionMatrix::diagonal({-1.0, -3.0, -4.0});
    FlowConfig cfg;
    cfg.tau = 0.1;
    cfg.steps = 3000;
    cfg.sign = +1;
    cfg.normalization = Normalization::Partition;
    cfg.record_every = 3000;
    Rng rng(derive_stream(23, 0, 0));
    Ensemble init = Ensemble::random(3, 100, rng);
    Trajectory traj = run(init, d, cfg);
    ClusterReport rep = detect_clusters(traj.final_state(), 2, 0.05, 9001);
    CHECK(rep.k == 2);
    CHECK(rep.max_radius < 0.05);
    CHECK(std::fabs(traj.final_energy() - std::cosh(4.0)) <= 1e-6);
    CHECK(dist_to_pole(rep.centers[0].data(), 3) <= 1e-3);
    CHECK(dist_to_pole(rep.centers[1].data(), 3) <= 1e-3);
}

TEST_CASE("descent under the identity spreads mass out") {
    InteractionMatrix d = InteractionMatrix::identity(3);
    FlowConfig cfg;
    cfg.tau = 0.2;
    cfg.steps = 3000;
    cfg.sign = -1;
    cfg.normalization = Normalization::Partition;
    cfg.record_every = 3000;
    Rng rng(derive_stream(7, 0, 0));
    Ensemble init = Ensemble::random(3, 400, rng);
    Trajectory traj = run(init, d, cfg);
    const Ensemble& fin = traj.final_state();
    EnergyReport rep = stationarity_residual(fin, d);
    CHECK(rep.max_residual < 1e-4);

    // No chordal ball of radius 0.5 holds more than 30% of the mass.
    double worst = 0.0;
    for (int c = 0; c < fin.size(); ++c) {
        double mass = 0.0;
        for (int i = 0; i < fin.size(); ++i) {
            if (dist2(fin.point_vec(c), fin.point_vec(i)) <= 0.5) mass += fin.weight(i);
        }
        worst = std::max(worst, mass);
    }
    CHECK(worst <= 0.30);
}

TEST_CASE("power iteration on the sphere finds the top eigenvector") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    Vec z = {0.0, 0.0, 1.0};
    CHECK(dist2(power_iteration_step(z, d), z) <= 1e-15);

    InteractionMatrix neg = InteractionMatrix::diagonal({-2.0, -1.0});
    Vec w = {1.0, 0.0};
    Vec flipped = power_iteration_step(w, neg);
    CHECK(dist2(flipped, {-1.0, 0.0}) <= 1e-15);

    Vec x = project_to_sphere({1.0, 1.0, 1.0});
    for (int s = 0; s < 50; ++s) x = power_iteration_step(x, d);
    CHECK(std::fabs(std::fabs(x[2]) - 1.0) <= 1e-10);
}

TEST_CASE("monotonicity accounting distinguishes noise from genuine violations") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 2.0});

    FlowConfig cfg;
    cfg.tau = 0.05;
    cfg.steps = 2000;
    cfg.sign = +1;
    cfg.normalization = Normalization::Partition;
    cfg.record_every = 1;
    Rng rng(derive_stream(11, 0, 0));
    Ensemble init = Ensemble::random(2, 50, rng);
    Trajectory traj = run(init, d, cfg);
    MonotonicityReport rep = energy_monotonicity_check(traj, +1);
    CHECK(rep.violations == 0);

    // A huge step size produces adverse energy increments, but they stay
    // below the step-size-dependent tolerance, which is enormous at tau=10.
    FlowConfig wild = cfg;
    wild.tau = 10.0;
    wild.sign = -1;
    Rng rng2(derive_stream(99, 0, 0));
    Ensemble init2 = Ensemble::random(2, 50, rng2);
    Trajectory traj2 = run(init2, d, wild);
    MonotonicityReport rep2 = energy_monotonicity_check(traj2, -1);
    CHECK(rep2.violations == 0);
    CHECK(rep2.max_violation > 0.0);
}

TEST_CASE("violation counts do not grow as the step size shrinks") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 2.0});
    int prev = 1 << 30;
    for (double tau : {0.1, 0.05, 0.025}) {
        FlowConfig cfg;
        cfg.tau = tau;
        cfg.steps = 1200;
        cfg.sign = +1;
        cfg.normalization = Normalization::Partition;
        cfg.record_every = 1;
        Rng rng(derive_stream(5, 0, 0));
        Ensemble init = Ensemble::random(2, 40, rng);
        MonotonicityReport rep = energy_monotonicity_check(run(init, d, cfg), +1);
        CHECK(rep.violations <= prev);
        prev = rep.violations;
    }
}

TEST_CASE("runs are bitwise deterministic") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, -2.0, 0.5});
    FlowConfig cfg;
    cfg.tau = 0.1;
    cfg.steps = 200;
    cfg.sign = +1;
    cfg.normalization = Normalization::Partition;
    cfg.record_every = 50;
    auto make = [&] {
        Rng rng(derive_stream(321, 0, 0));
        Ensemble init = Ensemble::random(3, 20, rng);
        return run(init, d, cfg);
    };
    Trajectory a = make();
    Trajectory b = make();
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t s = 0; s < a.snapshots.size(); ++s) {
        CHECK(a.snapshots[s].coords() == b.snapshots[s].coords());
        CHECK(a.energies[s] == b.energies[s]);
    }
}

TEST_CASE("every recorded snapshot stays on the sphere") {
    Rng rng(606);
    InteractionMatrix d(3, random_symmetric(3, 1.2, rng));
    FlowConfig cfg;
    cfg.tau = 0.15;
    cfg.steps = 400;
    cfg.sign = -1;
    cfg.normalization = Normalization::Constant;
    cfg.record_every = 20;
    Rng init_rng(derive_stream(8, 0, 0));
    Trajectory traj = run(Ensemble::random(3, 25, init_rng), d, cfg);
    for (const Ensemble& snap : traj.snapshots) {
        for (int i = 0; i < snap.size(); ++i) {
            CHECK(std::fabs(norm2(snap.point_vec(i)) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("exact stationary configurations barely move") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 2.0, 3.0});
    Ensemble mix = eigen_mixture(d, {0, 1, 2}, {0.2, 0.3, 0.5});
    REQUIRE(stationarity_residual(mix, d).max_residual <= 1e-14);
    FlowConfig cfg;
    cfg.tau = 0.1;
    cfg.sign = -1;
    cfg.normalization = Normalization::Partition;
    Ensemble moved = step(mix, d, cfg);
    for (int i = 0; i < mix.size(); ++i) {
        CHECK(dist2(moved.point_vec(i), mix.point_vec(i)) <= cfg.tau * 1e-12);
    }
}

TEST_CASE("rotating the frame commutes with the step") {
    Rng rng(740);
    // Random rotation of R^3 from a QR-like Gram-Schmidt of Gaussian columns.
    Vec a = sample_uniform(3, rng);
    Vec b_raw = sample_uniform(3, rng);
    TangentVector t = tangent_project(a, b_raw);
    Vec b = project_to_sphere(t.direction);
    Vec c = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    std::vector<double> q(9);
    for (int r = 0; r < 3; ++r) {
        q[static_cast<std::size_t>(r) * 3 + 0] = a[static_cast<std::size_t>(r)];
        q[static_cast<std::size_t>(r) * 3 + 1] = b[static_cast<std::size_t>(r)];
        q[static_cast<std::size_t>(r) * 3 + 2] = c[static_cast<std::size_t>(r)];
    }
    auto rotate = [&](const Vec& x) {
        Vec y(3, 0.0);
        for (int r = 0; r < 3; ++r) {
            for (int s = 0; s < 3; ++s) y[static_cast<std::size_t>(r)] += q[static_cast<std::size_t>(r) * 3 + s] * x[static_cast<std::size_t>(s)];
        }
        return y;
    };

    InteractionMatrix d(3, random_symmetric(3, 1.0, rng));
    // Q D Q^T via the congruence helper applied to Q^T (columns become rows).
    std::vector<double> qt(9);
    for (int r = 0; r < 3; ++r) {
        for (int s = 0; s < 3; ++s) qt[static_cast<std::size_t>(r) * 3 + s] = q[static_cast<std::size_t>(s) * 3 + r];
    }
    InteractionMatrix rotated_d = transform_ellipsoid(qt, d);

    Rng init_rng(derive_stream(444, 0, 0));
    Ensemble mu = Ensemble::random(3, 15, init_rng);
    std::vector<Vec> rot_pts;
    for (int i = 0; i < mu.size(); ++i) rot_pts.push_back(rotate(mu.point_vec(i)));
    Ensemble rotated_mu(rot_pts, mu.weights());

    FlowConfig cfg;
    cfg.tau = 0.1;
    cfg.sign = +1;
    cfg.normalization = Normalization::Partition;
    Ensemble stepped = step(mu, d, cfg);
    Ensemble stepped_rot = step(rotated_mu, rotated_d, cfg);
    for (int i = 0; i < mu.size(); ++i) {
        CHECK(dist2(stepped_rot.point_vec(i), rotate(stepped.point_vec(i))) <= 1e-12);
    }
}
