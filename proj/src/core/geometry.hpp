#pragma once

#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace sphereflow {

using Vec = std::vector<double>;

// ---- small dense helpers (dimensions here are tiny: n = 2..5) ----

double dot(const double* a, const double* b, std::size_t n);
double dot(const Vec& a, const Vec& b);
double norm2(const double* a, std::size_t n);
double norm2(const Vec& a);

/// A tangent direction anchored at a base point on the sphere; the
/// constructor-free aggregate is produced by tangent_project which
/// guarantees base . direction = 0 up to rounding.
struct TangentVector {
    Vec base;
    Vec direction;
};

/// x / ||x||. Throws ZeroNorm for ||x|| <= 1e-300 (degenerate state that the
/// model excludes; we report it instead of regularizing).
Vec project_to_sphere(const Vec& x);

/// P_x(z) = z - (x.z) x, the tangent-space projection at unit x.
TangentVector tangent_project(const Vec& x, const Vec& z);

/// Spherical coordinate map for S^{n-1}: phi has n-1 entries, the first n-2
/// in [0, pi] and the last in [0, 2*pi). First coordinate is cos(phi_1) and
/// the remaining block satisfies the recursion X_n(phi) = (cos phi_1,
/// sin(phi_1) * X_{n-1}(phi_2..)). Throws AngleOutOfRange on bad bounds.
Vec spherical_to_cartesian(const Vec& phi);

/// Volume factor of the coordinate map: product of sin^{n-1-i}(phi_i) over
/// i = 1..n-2; equals 1 for n = 2 (empty product).
double spherical_jacobian(const Vec& phi);

/// Surface measure |S^{n-1}| for ambient dimension n >= 2, computed by the
/// recursion |S^{n-1}| = |S^{n-2}| * int_0^pi sin^{n-2}(phi) dphi with the
/// integral evaluated by composite Simpson (2048 panels). Bases: |S^0| = 2,
/// |S^1| = 2*pi. The recursion is evaluated rather than a Gamma closed form
/// so the identity itself is exercised.
double sphere_surface(int n);

/// Uniform sample on S^{n-1}: normalized standard-normal vector (rotation
/// invariant); resamples on a (measure-zero) near-zero draw.
Vec sample_uniform(int n, Rng& rng);

} // namespace sphereflow
