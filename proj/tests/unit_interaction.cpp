// Interaction matrix, kernel energy, stationarity residual, first variation,
// dissipation, and the closed-form extremizer catalog.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/interaction.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

using namespace sphereflow;

namespace {

double dist2(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

// Distance up to a global sign flip (eigenvectors are defined up to sign).
double dist_up_to_sign(const Vec& a, const Vec& b) {
    Vec neg = b;
    for (double& v : neg) v = -v;
    return std::min(dist2(a, b), dist2(a, neg));
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

Ensemble random_ensemble(int dim, int count, Rng& rng, bool random_weights) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(sample_uniform(dim, rng));
    if (!random_weights) return Ensemble(pts);
    Vec w(static_cast<std::size_t>(count));
    double total = 0.0;
    for (double& v : w) {
        v = 0.05 + rng.uniform();
        total += v;
    }
    for (double& v : w) v /= total;
    return Ensemble(pts, w);
}

Vec reflect(const Vec& x, const Vec& z) {
    const double c = 2.0 * dot(x, z);
    Vec out = x;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= c * z[i];
    return out;
}

// (mu + H#mu)/2 for an arbitrary pointwise map H.
template <typename Map>
Ensemble symmetrize(const Ensemble& mu, Map&& h) {
    std::vector<Vec> pts;
    Vec w;
    for (int i = 0; i < mu.size(); ++i) {
        pts.push_back(mu.point_vec(i));
        w.push_back(mu.weight(i) / 2.0);
        pts.push_back(h(mu.point_vec(i)));
        w.push_back(mu.weight(i) / 2.0);
    }
    return Ensemble(pts, w);
}

}  // namespace

TEST_CASE("eigendecomposition: diagonal, off-diagonal, identity") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    CHECK(d.eigenvalues() == Vec{4.0, 3.0, 1.0});
    CHECK(dist_up_to_sign(d.eigenvectors()[0], {0.0, 0.0, 1.0}) <= 1e-12);
    CHECK(dist_up_to_sign(d.eigenvectors()[1], {0.0, 1.0, 0.0}) <= 1e-12);
    CHECK(dist_up_to_sign(d.eigenvectors()[2], {1.0, 0.0, 0.0}) <= 1e-12);

    InteractionMatrix flip(2, {0.0, 1.0, 1.0, 0.0});
    CHECK(std::fabs(flip.eigenvalues()[0] - 1.0) <= 1e-13);
    CHECK(std::fabs(flip.eigenvalues()[1] + 1.0) <= 1e-13);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(dist_up_to_sign(flip.eigenvectors()[0], {s, s}) <= 1e-12);
    CHECK(dist_up_to_sign(flip.eigenvectors()[1], {s, -s}) <= 1e-12);

    InteractionMatrix id = InteractionMatrix::identity(3);
    for (double lambda : id.eigenvalues()) CHECK(lambda == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigendecomposition residual and orthonormality on random matrices") {
    Rng rng(5150);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + rep % 4;  // 2..5
        InteractionMatrix d(n, random_symmetric(n, 1.5, rng));
        const Vec& lambda = d.eigenvalues();
        for (int i = 0; i + 1 < n; ++i) CHECK(lambda[static_cast<std::size_t>(i)] >= lambda[static_cast<std::size_t>(i) + 1]);
        for (int i = 0; i < n; ++i) {
            const Vec& z = d.eigenvectors()[static_cast<std::size_t>(i)];
            Vec dz = d.apply(z);
            for (int k = 0; k < n; ++k) dz[static_cast<std::size_t>(k)] -= lambda[static_cast<std::size_t>(i)] * z[static_cast<std::size_t>(k)];
            CHECK(norm2(dz) <= 1e-10 * std::max(1.0, std::fabs(lambda[static_cast<std::size_t>(i)])));
            for (int j = 0; j < n; ++j) {
                const double g = dot(z, d.eigenvectors()[static_cast<std::size_t>(j)]);
                CHECK(std::fabs(g - (i == j ? 1.0 : 0.0)) <= 1e-10);
            }
        }
    }
}

TEST_CASE("asymmetric input is rejected") {
    CHECK_THROWS_AS(InteractionMatrix(2, {0.0, 1.0, 0.0, 0.0}), const error&);
    try {
        InteractionMatrix(2, {0.0, 1.0, 0.0, 0.0});
    } catch (const error& e) {
        CHECK(e.tag() == "NotSymmetric");
        CHECK(e.code() == errc::invalid_argument);
    }
}

TEST_CASE("transform_ellipsoid congruence") {
    InteractionMatrix d = InteractionMatrix::diagonal({2.0, -1.0});

    InteractionMatrix same = transform_ellipsoid({1.0, 0.0, 0.0, 1.0}, d);
    CHECK(same.data() == d.data());

    InteractionMatrix gains =
        transform_ellipsoid({1.5, 0.0, 0.0, 0.5}, InteractionMatrix::identity(2));
    CHECK(gains.entry(0, 0) == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(gains.entry(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(std::fabs(gains.entry(0, 1)) <= 1e-14);

    const double a = 0.7;
    std::vector<double> q = {std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
    InteractionMatrix lam = InteractionMatrix::diagonal({3.0, 3.0});
    InteractionMatrix conj = transform_ellipsoid(q, lam);
    CHECK(std::fabs(conj.entry(0, 0) - 3.0) <= 1e-12);
    CHECK(std::fabs(conj.entry(1, 1) - 3.0) <= 1e-12);
    CHECK(std::fabs(conj.entry(0, 1)) <= 1e-12);

    CHECK_THROWS_AS(transform_ellipsoid({1.0, 1.0, 1.0, 1.0}, d), const error&);
    try {
        transform_ellipsoid({1.0, 1.0, 1.0, 1.0}, d);
    } catch (const error& e) {
        CHECK(e.tag() == "SingularTransform");
    }
}

TEST_CASE("energy closed forms") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    Ensemble top({{0.0, 0.0, 1.0}});
    CHECK(energy(top, d) == doctest::Approx(std::exp(4.0)).epsilon(1e-14));

    Ensemble pair({{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}});
    CHECK(energy(pair, d) == doctest::Approx(std::cosh(4.0)).epsilon(1e-14));

    InteractionMatrix zero(2, {0.0, 0.0, 0.0, 0.0});
    Rng rng(3);
    Ensemble any = random_ensemble(2, 7, rng, true);
    CHECK(energy(any, zero) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("velocity direction and stationarity") {
    InteractionMatrix d = InteractionMatrix::diagonal({2.0, 1.0});
    Ensemble dirac({{1.0, 0.0}});
    TangentVector v = velocity(dirac, d, +1, Normalization::Partition, 0);
    CHECK(norm2(v.direction) <= 1e-15);

    InteractionMatrix id = InteractionMatrix::identity(2);
    Ensemble two({{1.0, 0.0}, {0.0, 1.0}});
    TangentVector at0 = velocity(two, id, +1, Normalization::Partition, 0);
    CHECK(at0.direction[1] > 0.0);                  // pulled toward the other particle
    CHECK(std::fabs(at0.direction[0]) <= 1e-15);    // tangent at e1
}

TEST_CASE("stationarity residual flags the right configurations") {
    Rng rng(99);
    InteractionMatrix d(3, random_symmetric(3, 1.0, rng));

    Ensemble dirac({d.eigenvectors()[0]});
    CHECK(stationarity_residual(dirac, d).max_residual <= 1e-12);

    Ensemble pair({d.eigenvectors()[1], [&] {
                       Vec neg = d.eigenvectors()[1];
                       for (double& x : neg) x = -x;
                       return neg;
                   }()});
    CHECK(stationarity_residual(pair, d).max_residual <= 1e-12);

    // Four peaks at the wrong angle are visibly non-stationary.
    const double phi = quad::kPi / 5.0;
    std::vector<Vec> pts;
    for (double a : {phi, quad::kPi - phi, quad::kPi + phi, quad::kTwoPi - phi}) {
        pts.push_back({std::cos(a), std::sin(a)});
    }
    InteractionMatrix d12 = InteractionMatrix::diagonal({1.0, 2.0});
    CHECK(stationarity_residual(Ensemble(pts), d12).max_residual > 1e-3);
}

TEST_CASE("energy report is internally consistent") {
    Rng rng(123);
    InteractionMatrix d(3, random_symmetric(3, 1.0, rng));
    Ensemble mu = random_ensemble(3, 12, rng, true);
    EnergyReport rep = stationarity_residual(mu, d);
    CHECK(rep.energy == doctest::Approx(energy(mu, d)).epsilon(1e-14));
    double max_r = 0.0;
    for (double r : rep.per_particle_residual) max_r = std::max(max_r, r);
    CHECK(rep.max_residual == max_r);
    CHECK(rep.dissipation == doctest::Approx(dissipation(mu, d, +1)).epsilon(1e-14));
}

TEST_CASE("first variation: linearity, stationarity, finite differences") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    Rng rng(17);

    Ensemble mu = random_ensemble(3, 8, rng, false);
    std::vector<Vec> zero(8, Vec(3, 0.0));
    CHECK(first_variation(mu, d, zero) == 0.0);

    Ensemble dirac({{0.0, 0.0, 1.0}});
    std::vector<Vec> v1 = {{0.3, -0.2, 0.9}};
    CHECK(std::fabs(first_variation(dirac, d, v1)) <= 1e-12);

    // 20 random (mu, V) pairs against transported finite differences.
    for (int rep = 0; rep < 20; ++rep) {
        InteractionMatrix dr(3, random_symmetric(3, 0.8, rng));
        Ensemble base = random_ensemble(3, 8, rng, rep % 2 == 1);
        std::vector<Vec> v;
        for (int i = 0; i < base.size(); ++i) {
            Vec w(3);
            for (double& x : w) x = rng.gaussian();
            v.push_back(w);
        }
        // Central differences of the transported energy kill the curvature
        // term, so the derivative identity is tested well below 1e-4.
        const double t = 1e-5;
        auto transported = [&](double h) {
            std::vector<Vec> moved;
            for (int i = 0; i < base.size(); ++i) {
                TangentVector tan =
                    tangent_project(base.point_vec(i), v[static_cast<std::size_t>(i)]);
                Vec y = base.point_vec(i);
                for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] += h * tan.direction[static_cast<std::size_t>(k)];
                moved.push_back(project_to_sphere(y));
            }
            return energy(Ensemble(moved, base.weights()), dr);
        };
        const double fd = (transported(t) - transported(-t)) / (2.0 * t);
        const double dv = first_variation(base, dr, v);
        CHECK(std::fabs(dv - fd) <= 1e-4 * std::max(1.0, std::fabs(fd)));
    }
}

TEST_CASE("dissipation: zero at stationary points, nonnegative, decays along the flow") {
    InteractionMatrix d = InteractionMatrix::diagonal({1.0, 3.0, 4.0});
    Ensemble dirac({{0.0, 0.0, 1.0}});
    CHECK(dissipation(dirac, d, +1) <= 1e-20);
    Ensemble pair({{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}});
    CHECK(dissipation(pair, d, -1) <= 1e-20);

    Rng rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        InteractionMatrix dr(3, random_symmetric(3, 1.0, rng));
        Ensemble mu = random_ensemble(3, 6, rng, true);
        CHECK(dissipation(mu, dr, rep % 2 == 0 ? +1 : -1) >= 0.0);
    }
}

TEST_CASE("extremizer catalog case analysis") {
    ExtremizerCatalog cat = extremizer_catalog(InteractionMatrix::diagonal({1.0, 3.0, 4.0}));
    CHECK(cat.maximizer.known);
    CHECK(cat.maximizer.value == doctest::Approx(std::exp(4.0)).epsilon(1e-14));
    CHECK(dist_up_to_sign(cat.maximizer.direction, {0.0, 0.0, 1.0}) <= 1e-12);
    CHECK_FALSE(cat.minimizer.known);  // positive definite: closed form open
    CHECK(std::isnan(cat.minimizer.value));

    ExtremizerCatalog neg = extremizer_catalog(InteractionMatrix::diagonal({-1.0, -1.0, -1.0}));
    CHECK(neg.minimizer.known);
    CHECK(neg.minimizer.value == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(neg.maximizer.known);
    CHECK(neg.maximizer.value == doctest::Approx(std::cosh(1.0)).epsilon(1e-14));

    ExtremizerCatalog null_case = extremizer_catalog(InteractionMatrix::diagonal({1.0, 0.0, 1.0}));
    CHECK(null_case.minimizer.known);
    CHECK(null_case.minimizer.value == doctest::Approx(1.0).epsilon(1e-14));

    // Indefinite, negative side dominant: open case, but the antipodal pair
    // on the most negative axis provably beats every dirac.
    ExtremizerCatalog mixed = extremizer_catalog(InteractionMatrix::diagonal({1.0, -3.0}));
    CHECK_FALSE(mixed.maximizer.known);
    CHECK(mixed.two_cluster_candidate);
    CHECK(mixed.candidate_energy == doctest::Approx(std::cosh(3.0)).epsilon(1e-14));

    // Indefinite, positive side dominant: the top dirac is the proven maximizer.
    ExtremizerCatalog posdom = extremizer_catalog(InteractionMatrix::diagonal({3.0, -1.0}));
    CHECK(posdom.maximizer.known);
    CHECK(posdom.maximizer.value == doctest::Approx(std::exp(3.0)).epsilon(1e-14));
    CHECK_FALSE(posdom.two_cluster_candidate);
}

TEST_CASE("energy bounds on random ensembles") {
    Rng rng(808);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + rep % 3;
        InteractionMatrix d(n, random_symmetric(n, 0.9, rng));
        Ensemble mu = random_ensemble(n, 2 + rep % 7, rng, rep % 2 == 1);
        const double e = energy(mu, d);

        Vec mean(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < mu.size(); ++i) {
            for (int k = 0; k < n; ++k) mean[static_cast<std::size_t>(k)] += mu.weight(i) * mu.point(i)[k];
        }
        const double mean_form = dot(mean, d.apply(mean));
        const double cap = std::exp(d.abs_lambda_max());
        CHECK(e >= std::exp(mean_form) - 1e-12 * cap);
        if (d.lambda_min() <= 0.0) CHECK(e >= std::exp(d.lambda_min()) - 1e-12 * cap);
        CHECK(e <= cap * (1.0 + 1e-12));
    }
}

TEST_CASE("reflection through an eigenvector axis preserves the energy") {
    Rng rng(414);
    for (int rep = 0; rep < 100; ++rep) {
        InteractionMatrix d(3, random_symmetric(3, 1.0, rng));
        Ensemble mu = random_ensemble(3, 9, rng, rep % 2 == 0);
        const Vec z = d.eigenvectors()[static_cast<std::size_t>(rep % 3)];
        std::vector<Vec> pts;
        for (int i = 0; i < mu.size(); ++i) pts.push_back(reflect(mu.point_vec(i), z));
        Ensemble mirrored(pts, mu.weights());
        const double e0 = energy(mu, d);
        CHECK(std::fabs(e0 - energy(mirrored, d)) <= 1e-12 * std::max(1.0, e0));
    }
}

TEST_CASE("positive definite kernel: convexity surrogate and symmetrization") {
    Rng rng(525);
    for (int rep = 0; rep < 100; ++rep) {
        // Positive definite D: shift a random symmetric matrix by its spectrum.
        InteractionMatrix raw(3, random_symmetric(3, 0.7, rng));
        std::vector<double> shifted = raw.data();
        const double shift = std::max(0.0, -raw.lambda_min()) + 0.25;
        for (int k = 0; k < 3; ++k) shifted[static_cast<std::size_t>(k) * 3 + k] += shift;
        InteractionMatrix d(3, shifted);
        REQUIRE(d.lambda_min() > 0.0);

        Ensemble mu1 = random_ensemble(3, 6, rng, false);
        Ensemble mu2 = random_ensemble(3, 6, rng, true);
        const double cross = cross_energy(mu1, mu2, d);
        CHECK(energy(mu1, d) + energy(mu2, d) >= 2.0 * cross - 1e-12 * std::exp(d.abs_lambda_max()));

        // Symmetrizing across an eigenvector axis strictly lowers the energy
        // of a generic (non-symmetric) ensemble.
        const Vec z = d.eigenvectors()[0];
        Ensemble sym = symmetrize(mu1, [&z](const Vec& x) { return reflect(x, z); });
        CHECK(energy(sym, d) < energy(mu1, d));
    }
}

TEST_CASE("negative definite kernel: antipodal symmetrization raises the energy") {
    Rng rng(626);
    for (int rep = 0; rep < 100; ++rep) {
        InteractionMatrix raw(3, random_symmetric(3, 0.7, rng));
        std::vector<double> shifted = raw.data();
        const double shift = std::max(0.0, raw.lambda_max()) + 0.25;
        for (int k = 0; k < 3; ++k) shifted[static_cast<std::size_t>(k) * 3 + k] -= shift;
        InteractionMatrix d(3, shifted);
        REQUIRE(d.lambda_max() < 0.0);

        Ensemble mu = random_ensemble(3, 6, rng, rep % 2 == 0);
        Ensemble anti = symmetrize(mu, [](const Vec& x) {
            Vec y = x;
            for (double& v : y) v = -v;
            return y;
        });
        CHECK(energy(anti, d) >= energy(mu, d) - 1e-12);
    }
}

TEST_CASE("pushing particles through C matches the congruent matrix") {
    Rng rng(737);
    for (int rep = 0; rep < 50; ++rep) {
        InteractionMatrix d(3, random_symmetric(3, 0.8, rng));
        // Well-conditioned random C: Gaussian perturbation of the identity.
        std::vector<double> c(9, 0.0);
        for (int k = 0; k < 3; ++k) c[static_cast<std::size_t>(k) * 3 + k] = 1.0;
        for (double& v : c) v += 0.35 * rng.gaussian();
        InteractionMatrix conj = transform_ellipsoid(c, d);

        Ensemble mu = random_ensemble(3, 5, rng, rep % 2 == 1);
        double pushed = 0.0;
        for (int i = 0; i < mu.size(); ++i) {
            Vec ci(3, 0.0);
            for (int r = 0; r < 3; ++r) {
                for (int s = 0; s < 3; ++s) ci[static_cast<std::size_t>(r)] += c[static_cast<std::size_t>(r) * 3 + s] * mu.point(i)[s];
            }
            for (int j = 0; j < mu.size(); ++j) {
                Vec cj(3, 0.0);
                for (int r = 0; r < 3; ++r) {
                    for (int s = 0; s < 3; ++s) cj[static_cast<std::size_t>(r)] += c[static_cast<std::size_t>(r) * 3 + s] * mu.point(j)[s];
                }
                pushed += mu.weight(i) * mu.weight(j) * std::exp(dot(ci, d.apply(cj)));
            }
        }
        const double direct = energy(mu, conj);
        CHECK(std::fabs(direct - pushed) <= 1e-12 * std::max(1.0, std::fabs(direct)));
    }
}

TEST_CASE("flow driven by the identity matrix dissipates to a cluster") {
    // Small ascent run: dissipation at the final state is tiny.
    Rng rng(954);
    Ensemble mu = random_ensemble(3, 16, rng, false);
    InteractionMatrix d = InteractionMatrix::identity(3);
    // (The flow module owns run(); here we only need repeated steps through
    // velocity/dissipation to stay within this module's API.)
    // Synchronous explicit Euler, matching the integrator definition.
    const double tau = 0.05;
    for (int s = 0; s < 5000; ++s) {
        std::vector<Vec> next;
        next.reserve(static_cast<std::size_t>(mu.size()));
        for (int i = 0; i < mu.size(); ++i) {
            TangentVector v = velocity(mu, d, +1, Normalization::Partition, i);
            Vec y = mu.point_vec(i);
            for (int k = 0; k < 3; ++k) y[static_cast<std::size_t>(k)] += tau * v.direction[static_cast<std::size_t>(k)];
            next.push_back(project_to_sphere(y));
        }
        mu = Ensemble(next, mu.weights());
    }
    CHECK(dissipation(mu, d, +1) < 1e-8);
}
