#pragma once

#include <vector>

#include "geometry.hpp"

namespace sphereflow {

/// Probability density on the circle, discretized on N equispaced angles
/// theta_i = -pi + 2*pi*i/N with pointwise masses summing to 1.
struct GridDensity {
    int n_points = 0;
    Vec angles;
    Vec mass;
};

/// The uniform density: mass 1/N everywhere.
GridDensity uniform_density(int n_points);

/// Wrap a mass vector (nonnegative, sum 1 to 1e-12) as a GridDensity.
GridDensity density_from_mass(Vec mass);

/// Energy of the density under the perturbed kernel e^{x.(Id + eps*M)y}
/// with M = diag(m_diag[0], m_diag[1]):  E = sum_{i,j} K_ij m_i m_j.
/// Rejects parameters with max_k |1 + eps*m_diag[k]| > 700 (Overflow).
double grid_energy(const GridDensity& m, double eps, const Vec& m_diag);

/// Exact gradient of grid_energy: (2 K m)_i.
Vec grid_gradient(const GridDensity& m, double eps, const Vec& m_diag);

/// One exponentiated-gradient (mirror descent) step on the simplex:
///   m'_i = m_i exp(-tau g_i) / sum_j m_j exp(-tau g_j),
/// computed in log space with max-subtraction. Needs strictly positive mass.
GridDensity mirror_descent_step(const GridDensity& m, double eps, const Vec& m_diag,
                                double tau);

struct DensitySolution {
    GridDensity density;
    Vec energies; // energy before the first step and after every step
};

/// Run `iters` mirror-descent steps from the uniform density, recording the
/// energy at every iteration. The kernel matrix is built once per call.
DensitySolution solve_density(double eps, const Vec& m_diag, int n_points, double tau,
                              int iters);

/// First-order prediction for the minimizer of the perturbed energy:
///   m_i proportional to 1 + eps*(alpha * x_i.M x_i + beta),
/// with alpha = -C1/C2 from the perturbation constants and beta chosen so
/// the correction integrates to zero against the uniform measure
/// (beta = -alpha*(m_diag[0]+m_diag[1])/2). Renormalized to sum 1. Throws
/// NegativeMass when eps is too large for the first-order form to stay
/// a probability density.
GridDensity asymptotic_density(double eps, const Vec& m_diag, int n_points);

/// The conjectured closed form: m_i proportional to exp(upsilon*cos(2*theta_i)).
GridDensity conjectured_density(double upsilon, int n_points);

/// Least-squares exponent of the conjectured form for a given density:
/// slope of log(mass) against cos(2*theta) (the intercept is absorbed by
/// normalization). Exact round trip with conjectured_density.
double fit_upsilon(const GridDensity& m);

/// Coefficients of the no-intercept regression u ~ linear*eps + quadratic*eps^2.
struct UpsilonRegression {
    double linear = 0.0;
    double quadratic = 0.0;
};

UpsilonRegression upsilon_regression(const Vec& eps_grid, const Vec& upsilon_values);

} // namespace sphereflow
