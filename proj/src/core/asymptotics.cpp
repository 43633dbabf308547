#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "quadrature.hpp"

namespace sphereflow {

namespace {

// Fixed stream for the random probe directions of the verify_* checks;
// keeps their results reproducible without threading a seed through.
constexpr std::uint64_t kProbeSeed = 0x9B97F4A7C15EULL;

void validate(int n, int resolution) {
    if (n != 2 && n != 3) {
        throw_invalid("UnsupportedDimension", "constants are implemented for n = 2 and n = 3");
    }
    if (resolution < 128) throw_invalid("BadConfig", "resolution must be >= 128");
    if (n == 3 && resolution % 2 != 0) {
        throw_invalid("BadConfig", "Simpson quadrature needs an even resolution");
    }
}

} // namespace

PerturbationConstants compute_constants(int n, int resolution) {
    validate(n, resolution);
    PerturbationConstants k;
    k.n = n;
    if (n == 2) {
        // Probability measure on S^1: the 1/(2*pi) prefactor is the grid weight.
        const double w = 1.0 / resolution;
        double c1 = 0.0;
        double c2 = 0.0;
        double c3 = 0.0;
        for (int i = 0; i < resolution; ++i) {
            const double th = quad::kTwoPi * i / resolution;
            const double e = std::exp(std::cos(th));
            const double c = std::cos(th);
            const double s = std::sin(th);
            c1 += w * e * c;
            c2 += w * e * (c * c - s * s);
            c3 += w * e * s * s;
        }
        k.c1 = c1;
        k.c2 = c2;
        k.c3 = c3;
    } else {
        // Reduced polar-angle forms on S^2; the uniform marginal of the polar
        // angle is (1/2) sin(phi) dphi.
        const auto c1_f = [](double p) { return std::exp(std::cos(p)) * std::cos(p) * std::sin(p); };
        const auto sq_f = [](double p) {
            return std::exp(std::cos(p)) * std::cos(p) * std::cos(p) * std::sin(p);
        };
        const auto c3_f = [](double p) {
            const double s = std::sin(p);
            return std::exp(std::cos(p)) * s * s * s;
        };
        k.c1 = 0.5 * quad::simpson(c1_f, 0.0, quad::kPi, resolution);
        const double second_moment = 0.5 * quad::simpson(sq_f, 0.0, quad::kPi, resolution);
        k.c3 = 0.25 * quad::simpson(c3_f, 0.0, quad::kPi, resolution);
        k.c2 = second_moment - k.c3;
    }
    if (!(k.c1 > 0.0) || !(k.c2 > 0.0) || !(k.c3 > 0.0)) {
        throw_numeric("NoConvergence", "perturbation constants must be positive");
    }
    k.alpha = -k.c1 / k.c2;
    return k;
}

namespace {

quad::SphereGrid grid_for(int n, int resolution) {
    return (n == 2) ? quad::circle_grid(resolution) : quad::sphere3_grid(resolution);
}

} // namespace

double verify_vector_identity(int n, int resolution, int trials) {
    validate(n, resolution);
    if (trials < 1) throw_invalid("BadConfig", "trials must be >= 1");
    const PerturbationConstants k = compute_constants(n, resolution);
    const quad::SphereGrid grid = grid_for(n, resolution);

    Rng rng(derive_stream(kProbeSeed, static_cast<std::uint64_t>(n), 1));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Vec y = sample_uniform(n, rng);
        Vec lhs(static_cast<std::size_t>(n), 0.0);
        for (std::size_t g = 0; g < grid.points.size(); ++g) {
            const double e = grid.weights[g] * std::exp(dot(grid.points[g], y));
            for (int i = 0; i < n; ++i) lhs[static_cast<std::size_t>(i)] += e * grid.points[g][static_cast<std::size_t>(i)];
        }
        double dev2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = lhs[static_cast<std::size_t>(i)] - k.c1 * y[static_cast<std::size_t>(i)];
            dev2 += r * r;
        }
        worst = std::max(worst, std::sqrt(dev2));
    }
    return worst;
}

double verify_square_identity(int n, int resolution, int trials) {
    validate(n, resolution);
    if (trials < 1) throw_invalid("BadConfig", "trials must be >= 1");
    const PerturbationConstants k = compute_constants(n, resolution);
    const quad::SphereGrid grid = grid_for(n, resolution);

    Rng rng(derive_stream(kProbeSeed, static_cast<std::uint64_t>(n), 2));
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Vec y = sample_uniform(n, rng);
        Vec lhs(static_cast<std::size_t>(n), 0.0);
        for (std::size_t g = 0; g < grid.points.size(); ++g) {
            const double e = grid.weights[g] * std::exp(dot(grid.points[g], y));
            for (int i = 0; i < n; ++i) {
                const double xi = grid.points[g][static_cast<std::size_t>(i)];
                lhs[static_cast<std::size_t>(i)] += e * xi * xi;
            }
        }
        for (int i = 0; i < n; ++i) {
            const double yi = y[static_cast<std::size_t>(i)];
            worst = std::max(worst, std::abs(lhs[static_cast<std::size_t>(i)] - (k.c2 * yi * yi + k.c3)));
        }
    }
    return worst;
}

} // namespace sphereflow
