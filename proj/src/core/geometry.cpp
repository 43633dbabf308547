#include "geometry.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace sphereflow {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;
} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot(const Vec& a, const Vec& b) { return dot(a.data(), b.data(), a.size()); }

double norm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

double norm2(const Vec& a) { return norm2(a.data(), a.size()); }

Vec project_to_sphere(const Vec& x) {
    const double nrm = norm2(x);
    if (!(nrm > 1e-300)) {
        throw_numeric("ZeroNorm", "cannot project a vector of norm " + std::to_string(nrm) +
                                      " onto the sphere");
    }
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / nrm;
    return out;
}

TangentVector tangent_project(const Vec& x, const Vec& z) {
    if (x.size() != z.size()) {
        throw_invalid("DimensionMismatch", "tangent_project: base and vector dimensions differ");
    }
    const double xz = dot(x, z);
    Vec dir(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) dir[i] = z[i] - xz * x[i];
    return TangentVector{x, std::move(dir)};
}

Vec spherical_to_cartesian(const Vec& phi) {
    const std::size_t n = phi.size() + 1;
    if (n < 2) throw_invalid("AngleOutOfRange", "need at least one angle");
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
        if (!(phi[i] >= 0.0 && phi[i] <= kPi)) {
            throw_invalid("AngleOutOfRange",
                          "angle " + std::to_string(i + 1) + " must lie in [0, pi]");
        }
    }
    const double last = phi.back();
    if (!(last >= 0.0 && last < kTwoPi)) {
        throw_invalid("AngleOutOfRange", "final angle must lie in [0, 2*pi)");
    }

    // x_1 = cos(phi_1); x_i = cos(phi_i) * prod_{j<i} sin(phi_j);
    // x_n = prod_{j<=n-1} sin(phi_j).
    Vec x(n);
    double sin_prod = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        x[i] = std::cos(phi[i]) * sin_prod;
        sin_prod *= std::sin(phi[i]);
    }
    x[n - 1] = sin_prod;
    return x;
}

double spherical_jacobian(const Vec& phi) {
    const std::size_t n = phi.size() + 1;
    double j = 1.0;
    // Exponents n-1-i for i = 1..n-2; the final angle does not contribute.
    for (std::size_t i = 0; i + 2 <= n - 1; ++i) {
        j *= std::pow(std::sin(phi[i]), static_cast<double>(n - 1 - (i + 1)));
    }
    return j;
}

namespace {

/// Composite Simpson of sin^k over [0, pi] with an even panel count.
double simpson_sin_power(int k, int panels) {
    const double h = kPi / panels;
    double acc = 0.0; // endpoint values sin(0) = sin(pi) = 0 for k >= 1
    for (int i = 1; i < panels; ++i) {
        const double w = (i % 2 == 1) ? 4.0 : 2.0;
        acc += w * std::pow(std::sin(i * h), static_cast<double>(k));
    }
    return acc * h / 3.0;
}

} // namespace

double sphere_surface(int n) {
    if (n < 2) throw_invalid("DimensionMismatch", "sphere_surface requires n >= 2");
    // Upward recursion from |S^1| = 2*pi.
    double surf = kTwoPi;
    for (int m = 3; m <= n; ++m) {
        surf *= simpson_sin_power(m - 2, 2048);
    }
    return surf;
}

Vec sample_uniform(int n, Rng& rng) {
    if (n < 2) throw_invalid("DimensionMismatch", "sample_uniform requires n >= 2");
    Vec x(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& v : x) v = rng.gaussian();
        const double nrm = norm2(x);
        if (nrm > 1e-12) {
            for (auto& v : x) v /= nrm;
            return x;
        }
    }
}

} // namespace sphereflow
