#pragma once

#include <vector>

#include "interaction.hpp"

namespace sphereflow {

/// The balanced four-peak configuration on S^1 under D = diag(l1, l2):
/// peaks at angles {phi, pi-phi, pi+phi, 2pi-phi} are stationary exactly
/// when tanh(l1 cos^2 phi) / tanh(l2 sin^2 phi) = l2 / l1.
struct FourPeakSolution {
    double phi = 0.0;       // the unique root in (0, pi/2)
    double residual = 0.0;  // |tanh ratio - l2/l1| at phi, <= 1e-10
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Solve the four-peak balance condition for positive l1, l2 by bisection
/// (to bracket width 1e-14) of the equivalent sinh form
///   sinh(l1 cos^2 + l2 sin^2)(l2 - l1) + sinh(-l1 cos^2 + l2 sin^2)(l1 + l2),
/// which is negative at 0+ and positive at pi/2- and avoids the removable
/// 0/0 of the tanh ratio at phi -> 0. The tanh identity is re-verified on
/// the result. Throws NonPositiveEigenvalue unless l1, l2 > 0.
FourPeakSolution four_peak_angle(double lambda1, double lambda2);

/// Four equal-weight particles on S^1 at angles phi, pi-phi, pi+phi,
/// 2pi-phi (the orbit of phi under both axis reflections). phi in [0, 2pi).
Ensemble four_peak_ensemble(double phi);

/// Stationary mixture sum_k (t_k/2)(delta_{z_k} + delta_{-z_k}) over the
/// selected eigenvectors of D. The vectors must be mutually orthogonal to
/// 1e-10 (NotOrthogonal; also rejects a repeated index); t must be
/// nonnegative and sum to 1 (BadWeights).
Ensemble eigen_mixture(const InteractionMatrix& d, const std::vector<int>& subset,
                       const Vec& t);

/// Stationarity residual of the uniform distribution on S^{n-1}:
///   max over probe directions x of || integral e^{x . D y} P_x(D y) dmu0(y) ||,
/// the integral evaluated on a deterministic grid (periodic trapezoid with
/// `resolution` points for n = 2; Simpson x trapezoid with the sin(phi)
/// area factor for n = 3). Zero exactly when all |eigenvalues| coincide.
/// resolution >= 64; n > 3 is UnsupportedDimension.
double uniform_stationarity_residual(const InteractionMatrix& d, int resolution = 512);

/// Energies of the three competing states under D = diag(-1, l2):
/// a single dirac on the l2-axis, the antipodal pair on the -1 axis, and
/// the antipodal pair on the l2-axis. Each is evaluated through energy()
/// and cross-checked against its closed form (e^{l2}, cosh(1), cosh(l2))
/// to 1e-12.
struct IndefiniteComparison {
    double single = 0.0;   // e^{l2}
    double two_min = 0.0;  // cosh(-1) = cosh(1)
    double two_max = 0.0;  // cosh(l2)
};

IndefiniteComparison indefinite_energy_comparison(double lambda2);

} // namespace sphereflow
