#pragma once

#include <string>
#include <vector>

#include "geometry.hpp"

namespace sphereflow {

/// Dense symmetric eigensolver (cyclic Jacobi) for the tiny matrices used
/// here (n = 2..5). Outputs eigenvalues in descending order with matching
/// orthonormal eigenvectors; each eigenvector's largest-magnitude entry is
/// made positive so results are deterministic. Convergence: off-diagonal
/// Frobenius norm below 1e-13 * max(1, ||A||_F).
void eigendecompose(int n, const std::vector<double>& matrix_row_major,
                    Vec& eigenvalues, std::vector<Vec>& eigenvectors);

/// Symmetric interaction matrix with cached eigendecomposition. The kernel
/// it drives is e^{x . D y}, so construction rejects |lambda|_max > 700
/// (exp overflow) and asymmetry beyond 1e-12.
class InteractionMatrix {
public:
    InteractionMatrix(int dim, std::vector<double> matrix_row_major);

    static InteractionMatrix diagonal(const Vec& diag);
    static InteractionMatrix identity(int dim);

    int dim() const noexcept { return dim_; }
    double entry(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim_ + j]; }
    const std::vector<double>& data() const noexcept { return data_; }
    /// Descending eigenvalues.
    const Vec& eigenvalues() const noexcept { return eigenvalues_; }
    /// eigenvectors()[k] pairs with eigenvalues()[k]; orthonormal.
    const std::vector<Vec>& eigenvectors() const noexcept { return eigenvectors_; }
    double lambda_max() const noexcept { return eigenvalues_.front(); }
    double lambda_min() const noexcept { return eigenvalues_.back(); }
    /// max_i |lambda_i|; bounds |x . D y| on the sphere.
    double abs_lambda_max() const noexcept;

    /// y = D x for a unit vector given as a raw pointer of length dim().
    Vec apply(const double* x) const;
    Vec apply(const Vec& x) const { return apply(x.data()); }

private:
    int dim_;
    std::vector<double> data_;
    Vec eigenvalues_;
    std::vector<Vec> eigenvectors_;
};

/// Congruence transform C^T D C (the interaction felt on the ellipsoid
/// C S^{n-1}), with a fresh eigendecomposition. C is row-major dim x dim.
/// Rejects C with 2-norm condition number >= 1e12 (SingularTransform).
InteractionMatrix transform_ellipsoid(const std::vector<double>& c_row_major,
                                      const InteractionMatrix& d);

/// Weighted empirical measure: N unit vectors with nonnegative weights
/// summing to 1 (to 1e-12; checked, not repaired). Points are projected
/// to exact unit norm on construction and on every set_point.
class Ensemble {
public:
    Ensemble(const std::vector<Vec>& points, Vec weights);
    explicit Ensemble(const std::vector<Vec>& points); // uniform weights 1/N

    /// N uniform-weight points drawn uniformly on S^{n-1}.
    static Ensemble random(int dim, int count, Rng& rng);

    int dim() const noexcept { return dim_; }
    int size() const noexcept { return count_; }
    const double* point(int i) const { return coords_.data() + static_cast<std::size_t>(i) * dim_; }
    Vec point_vec(int i) const;
    const Vec& coords() const noexcept { return coords_; }
    const Vec& weights() const noexcept { return weights_; }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

    /// Replace particle i by the unit-sphere projection of x.
    void set_point(int i, const Vec& x);

private:
    Ensemble() = default;
    int dim_ = 0;
    int count_ = 0;
    Vec coords_;  // row-major count x dim
    Vec weights_;
};

enum class Normalization {
    Constant,   // J_i = 1 (weighted analogue of dividing by the count)
    Partition,  // J_i = sum_j w_j e^{X_i . D X_j} (self-attention softmax mass)
};

struct EnergyReport {
    double energy = 0.0;
    Vec per_particle_residual;
    double max_residual = 0.0;
    double dissipation = 0.0;
};

/// Per-particle kernel sums, the shared core of every interaction quantity:
///   mass[i]  = sum_j w_j e^{X_i . D X_j}
///   drive[i] = sum_j w_j e^{X_i . D X_j} D X_j
/// The kernel matrix is symmetric (D is), so each pair is exponentiated once.
void kernel_sums(const Ensemble& mu, const InteractionMatrix& d,
                 std::vector<Vec>& drive, Vec& mass);

/// Interaction energy E(mu) = sum_{i,j} w_i w_j e^{X_i . D X_j}.
double energy(const Ensemble& mu, const InteractionMatrix& d);

/// Kernel energy between two measures: sum_{i,j} a_i b_j e^{X_i . D Y_j}.
/// cross_energy(mu, mu, D) == energy(mu, D).
double cross_energy(const Ensemble& a, const Ensemble& b, const InteractionMatrix& d);

/// Velocity field of the projected dynamics at particle i:
///   sign * P_x( drive[i] ) / J_i,
/// tangent at X_i. sign = +1 ascends the energy, -1 descends.
TangentVector velocity(const Ensemble& mu, const InteractionMatrix& d, int sign,
                       Normalization normalization, int i);

/// Stationarity diagnostics. per_particle_residual[i] =
/// || sum_j w_j e^{X_i . D X_j} P_{X_i}(D X_j) ||_2; a measure is stationary
/// iff this vanishes at every support point. Also fills energy and
/// dissipation so one call yields the full report.
EnergyReport stationarity_residual(const Ensemble& mu, const InteractionMatrix& d);

/// Directional derivative of the energy when each particle moves with
/// velocity V[i] (transported as x -> proj(x + t P_x V[i])):
///   dE = 2 sum_{i,j} w_i w_j e^{X_i . D X_j} (P_{X_i} D X_j) . V[i].
/// The factor 2 is inherited from the energy being quadratic in mu; it makes
/// the value match finite differences of energy() exactly.
double first_variation(const Ensemble& mu, const InteractionMatrix& d,
                       const std::vector<Vec>& v);

/// Dissipation sum_i w_i m_i ||g_i||^2 with m_i the kernel mass at X_i and
/// g_i = 2 sum_j w_j e^{X_i . D X_j} P_{X_i}(D X_j) the metric gradient of
/// the energy. Independent of sign (it enters squared); the parameter is
/// kept so call sites document which flow they are diagnosing.
double dissipation(const Ensemble& mu, const InteractionMatrix& d, int sign);

/// One side (minimizer or maximizer) of the closed-form prediction.
struct ExtremizerPrediction {
    bool known = false;     // closed form proven for this case
    std::string description;
    double value = 0.0;     // predicted energy; NaN when !known
    Vec direction;          // supporting eigenvector for dirac/pair cases; empty otherwise
};

struct ExtremizerCatalog {
    ExtremizerPrediction minimizer;
    ExtremizerPrediction maximizer;
    /// Set when the maximizer has no proven form but the antipodal pair at
    /// the most negative eigenvalue beats every dirac: e^{l_max} < cosh(l_min).
    bool two_cluster_candidate = false;
    double candidate_energy = 0.0; // cosh(l_min) when flagged; NaN otherwise
};

/// Case analysis of the proven minimizers/maximizers of E over probability
/// measures on the sphere, keyed on the spectrum of D.
ExtremizerCatalog extremizer_catalog(const InteractionMatrix& d);

} // namespace sphereflow
