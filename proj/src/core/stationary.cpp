#include "stationary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "quadrature.hpp"

namespace sphereflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

/// sinh form of the four-peak balance condition; same root as the tanh
/// ratio equation but regular on the closed interval.
double peak_balance(double l1, double l2, double phi) {
    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    return std::sinh(l1 * c2 + l2 * s2) * (l2 - l1) +
           std::sinh(-l1 * c2 + l2 * s2) * (l1 + l2);
}

} // namespace

FourPeakSolution four_peak_angle(double lambda1, double lambda2) {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) {
        throw_invalid("NonPositiveEigenvalue",
                      "the four-peak condition needs both eigenvalues positive");
    }
    // Bracket: the balance is -2 l1 sinh(l1) < 0 at 0 and +2 l2 sinh(l2) > 0
    // at pi/2, and has exactly one root in between.
    double lo = 0.0;
    double hi = kPi / 2.0;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        if (peak_balance(lambda1, lambda2, mid) <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    FourPeakSolution sol;
    sol.phi = 0.5 * (lo + hi);
    sol.lambda1 = lambda1;
    sol.lambda2 = lambda2;

    const double c2 = std::cos(sol.phi) * std::cos(sol.phi);
    const double s2 = std::sin(sol.phi) * std::sin(sol.phi);
    const double ratio = std::tanh(lambda1 * c2) / std::tanh(lambda2 * s2);
    sol.residual = std::abs(ratio - lambda2 / lambda1);
    if (!(sol.residual <= 1e-10)) {
        throw_numeric("NoConvergence",
                      "four-peak root failed the tanh-ratio identity: residual " +
                          std::to_string(sol.residual));
    }
    return sol;
}

Ensemble four_peak_ensemble(double phi) {
    if (!(phi >= 0.0 && phi < kTwoPi)) {
        throw_invalid("AngleOutOfRange", "peak angle must lie in [0, 2*pi)");
    }
    const double angles[4] = {phi, kPi - phi, kPi + phi, kTwoPi - phi};
    std::vector<Vec> pts;
    pts.reserve(4);
    for (double a : angles) pts.push_back({std::cos(a), std::sin(a)});
    return Ensemble(pts); // equal weights 1/4
}

Ensemble eigen_mixture(const InteractionMatrix& d, const std::vector<int>& subset,
                       const Vec& t) {
    if (subset.empty()) throw_invalid("EmptyEnsemble", "eigen_mixture needs at least one axis");
    if (t.size() != subset.size()) {
        throw_invalid("BadWeights", "need exactly one weight per selected eigenvector");
    }
    for (int idx : subset) {
        if (idx < 0 || idx >= d.dim()) {
            throw_invalid("DimensionMismatch", "eigenvector index out of range");
        }
    }
    double total = 0.0;
    for (double w : t) {
        if (!(w >= 0.0)) throw_invalid("BadWeights", "mixture weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw_invalid("BadWeights", "mixture weights must sum to 1");
    }
    const auto& evecs = d.eigenvectors();
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            const double ip = dot(evecs[static_cast<std::size_t>(subset[a])],
                                  evecs[static_cast<std::size_t>(subset[b])]);
            if (std::abs(ip) > 1e-10) {
                throw_invalid("NotOrthogonal",
                              "selected eigenvectors must be mutually orthogonal");
            }
        }
    }
    std::vector<Vec> pts;
    Vec weights;
    pts.reserve(2 * subset.size());
    weights.reserve(2 * subset.size());
    for (std::size_t a = 0; a < subset.size(); ++a) {
        const Vec& z = evecs[static_cast<std::size_t>(subset[a])];
        Vec anti(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) anti[k] = -z[k];
        pts.push_back(z);
        pts.push_back(std::move(anti));
        weights.push_back(t[a] / 2.0);
        weights.push_back(t[a] / 2.0);
    }
    return Ensemble(pts, std::move(weights));
}

double uniform_stationarity_residual(const InteractionMatrix& d, int resolution) {
    const int n = d.dim();
    if (n > 3) {
        throw_invalid("UnsupportedDimension",
                      "uniform-distribution residual is implemented for n = 2 and n = 3");
    }
    if (resolution < 64) {
        throw_invalid("BadConfig", "resolution must be >= 64");
    }
    const quad::SphereGrid grid = (n == 2) ? quad::circle_grid(resolution)
                                           : quad::sphere3_grid(resolution);
    const std::vector<Vec> probes = quad::probe_directions(n, resolution);

    // Precompute D y and w for every grid node.
    const std::size_t g = grid.points.size();
    std::vector<Vec> z(g);
    for (std::size_t j = 0; j < g; ++j) z[j] = d.apply(grid.points[j]);

    double worst = 0.0;
    Vec v(static_cast<std::size_t>(n));
    for (const Vec& x : probes) {
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t j = 0; j < g; ++j) {
            const double e = grid.weights[j] * std::exp(dot(x, z[j]));
            for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] += e * z[j][static_cast<std::size_t>(k)];
        }
        const double xv = dot(x, v);
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double c = v[static_cast<std::size_t>(k)] - xv * x[static_cast<std::size_t>(k)];
            r2 += c * c;
        }
        worst = std::max(worst, std::sqrt(r2));
    }
    return worst;
}

IndefiniteComparison indefinite_energy_comparison(double lambda2) {
    const InteractionMatrix d = InteractionMatrix::diagonal({-1.0, lambda2});
    const Ensemble single({Vec{0.0, 1.0}});
    const Ensemble pair_min({Vec{1.0, 0.0}, Vec{-1.0, 0.0}});
    const Ensemble pair_max({Vec{0.0, 1.0}, Vec{0.0, -1.0}});

    IndefiniteComparison cmp;
    cmp.single = energy(single, d);
    cmp.two_min = energy(pair_min, d);
    cmp.two_max = energy(pair_max, d);

    const double closed[3] = {std::exp(lambda2), std::cosh(1.0), std::cosh(lambda2)};
    const double got[3] = {cmp.single, cmp.two_min, cmp.two_max};
    for (int i = 0; i < 3; ++i) {
        if (std::abs(got[i] - closed[i]) > 1e-12 * std::max(1.0, std::abs(closed[i]))) {
            throw_numeric("NoConvergence",
                          "energy evaluation drifted from its closed form by " +
                              std::to_string(std::abs(got[i] - closed[i])));
        }
    }
    return cmp;
}

} // namespace sphereflow
