#pragma once

#include "geometry.hpp"

namespace sphereflow {

/// Dimension-dependent constants of the first-order expansion of the
/// minimizer under D = Id + eps*M: for the uniform measure mu0 on S^{n-1},
///   integral e^{x.y} x     dmu0(x) = C1 * y                  (unit y)
///   integral e^{x.y} x_i^2 dmu0(x) = C2 * y_i^2 + C3         (unit y)
/// and the optimal density correction has slope alpha = -C1/C2.
struct PerturbationConstants {
    int n = 0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double alpha = 0.0; // -c1/c2
};

/// Evaluate C1, C2, C3 by quadrature of their reduced 1-D forms:
/// periodic trapezoid with `resolution` points (n = 2) or composite Simpson
/// with `resolution` panels over the polar angle (n = 3, even resolution).
/// All three constants are positive; computed, never hard-coded.
/// resolution >= 128; n in {2, 3} (UnsupportedDimension otherwise).
PerturbationConstants compute_constants(int n, int resolution = 2048);

/// Max over `trials` random unit y of || integral e^{x.y} x dmu0(x) - C1 y ||,
/// the integral on the deterministic sphere grid at `resolution`. The y draws
/// use a fixed internal stream, so the result is reproducible.
double verify_vector_identity(int n, int resolution, int trials);

/// Max over trials and coordinates i of
/// | integral e^{x.y} x_i^2 dmu0(x) - (C2 y_i^2 + C3) |, same grid and
/// deterministic y stream as verify_vector_identity.
double verify_square_identity(int n, int resolution, int trials);

} // namespace sphereflow
