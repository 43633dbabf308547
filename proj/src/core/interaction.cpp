#include "interaction.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>

#include "errors.hpp"

namespace sphereflow {

namespace {

double frobenius(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

/// Fix the sign of an eigenvector deterministically: the entry of largest
/// magnitude (lowest index on ties) is made positive.
void canonicalize_sign(Vec& v) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (std::abs(v[k]) > std::abs(v[arg])) arg = k;
    }
    if (v[arg] < 0.0) {
        for (auto& x : v) x = -x;
    }
}

} // namespace

void eigendecompose(int n, const std::vector<double>& matrix_row_major,
                    Vec& eigenvalues, std::vector<Vec>& eigenvectors) {
    if (n < 1 || matrix_row_major.size() != static_cast<std::size_t>(n) * n) {
        throw_invalid("DimensionMismatch", "eigendecompose: matrix storage does not match n*n");
    }
    std::vector<double> a = matrix_row_major;
    auto at = [&a, n](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    // Accumulated rotations; columns become eigenvectors.
    std::vector<double> vmat(static_cast<std::size_t>(n) * n, 0.0);
    auto vt = [&vmat, n](int i, int j) -> double& { return vmat[static_cast<std::size_t>(i) * n + j]; };
    for (int i = 0; i < n; ++i) vt(i, i) = 1.0;

    const double thresh = 1e-13 * std::max(1.0, frobenius(a));
    constexpr int kMaxSweeps = 100;
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
        if (std::sqrt(off) < thresh) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // A <- J^T A J with the Givens rotation J acting on (p, q).
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vt(k, p);
                    const double vkq = vt(k, q);
                    vt(k, p) = c * vkp - s * vkq;
                    vt(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps) {
        throw_numeric("NoConvergence", "Jacobi eigensolver did not converge in 100 sweeps");
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return at(i, i) > at(j, j); });

    eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
    eigenvectors.assign(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n)));
    for (int r = 0; r < n; ++r) {
        const int col = order[static_cast<std::size_t>(r)];
        eigenvalues[static_cast<std::size_t>(r)] = at(col, col);
        for (int k = 0; k < n; ++k) eigenvectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = vt(k, col);
        canonicalize_sign(eigenvectors[static_cast<std::size_t>(r)]);
    }
}

InteractionMatrix::InteractionMatrix(int dim, std::vector<double> matrix_row_major)
    : dim_(dim), data_(std::move(matrix_row_major)) {
    if (dim_ < 2) {
        throw_invalid("UnsupportedDimension", "interaction matrices need dimension >= 2");
    }
    if (data_.size() != static_cast<std::size_t>(dim_) * dim_) {
        throw_invalid("DimensionMismatch", "matrix storage does not match dim*dim");
    }
    for (int i = 0; i < dim_; ++i) {
        for (int j = i + 1; j < dim_; ++j) {
            if (std::abs(entry(i, j) - entry(j, i)) > 1e-12) {
                throw_invalid("NotSymmetric", "interaction matrix must be symmetric to 1e-12");
            }
        }
    }
    eigendecompose(dim_, data_, eigenvalues_, eigenvectors_);
    if (abs_lambda_max() > 700.0) {
        throw_numeric("Overflow",
                      "largest |eigenvalue| " + std::to_string(abs_lambda_max()) +
                          " would overflow the kernel e^{x . D y}");
    }
}

InteractionMatrix InteractionMatrix::diagonal(const Vec& diag) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = diag[static_cast<std::size_t>(i)];
    return InteractionMatrix(n, std::move(m));
}

InteractionMatrix InteractionMatrix::identity(int dim) {
    return diagonal(Vec(static_cast<std::size_t>(dim), 1.0));
}

double InteractionMatrix::abs_lambda_max() const noexcept {
    return std::max(std::abs(eigenvalues_.front()), std::abs(eigenvalues_.back()));
}

Vec InteractionMatrix::apply(const double* x) const {
    Vec y(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int j = 0; j < dim_; ++j) s += entry(i, j) * x[j];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

InteractionMatrix transform_ellipsoid(const std::vector<double>& c_row_major,
                                      const InteractionMatrix& d) {
    const int n = d.dim();
    if (c_row_major.size() != static_cast<std::size_t>(n) * n) {
        throw_invalid("DimensionMismatch", "transform matrix must be dim x dim of D");
    }
    auto c = [&c_row_major, n](int i, int j) { return c_row_major[static_cast<std::size_t>(i) * n + j]; };

    // Condition estimate through the spectrum of C^T C (exact 2-norm condition).
    std::vector<double> ctc(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += c(k, i) * c(k, j);
            ctc[static_cast<std::size_t>(i) * n + j] = s;
        }
    }
    Vec gram_evals;
    std::vector<Vec> gram_evecs;
    eigendecompose(n, ctc, gram_evals, gram_evecs);
    const double smax = gram_evals.front();
    const double smin = gram_evals.back();
    if (!(smin > 0.0) || std::sqrt(smax / smin) >= 1e12) {
        throw_invalid("SingularTransform",
                      "transform is singular or has condition number >= 1e12");
    }

    // M = C^T D C, symmetrized exactly to absorb rounding asymmetry.
    std::vector<double> dc(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += d.entry(i, k) * c(k, j);
            dc[static_cast<std::size_t>(i) * n + j] = s;
        }
    }
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += c(k, i) * dc[static_cast<std::size_t>(k) * n + j];
            m[static_cast<std::size_t>(i) * n + j] = s;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double sym = 0.5 * (m[static_cast<std::size_t>(i) * n + j] + m[static_cast<std::size_t>(j) * n + i]);
            m[static_cast<std::size_t>(i) * n + j] = sym;
            m[static_cast<std::size_t>(j) * n + i] = sym;
        }
    }
    return InteractionMatrix(n, std::move(m));
}

Ensemble::Ensemble(const std::vector<Vec>& points, Vec weights) {
    if (points.empty()) throw_invalid("EmptyEnsemble", "an ensemble needs at least one particle");
    dim_ = static_cast<int>(points.front().size());
    if (dim_ < 2) throw_invalid("UnsupportedDimension", "particles need dimension >= 2");
    count_ = static_cast<int>(points.size());
    if (weights.size() != points.size()) {
        throw_invalid("BadWeights", "need exactly one weight per particle");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw_invalid("BadWeights", "weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw_invalid("BadWeights",
                      "weights must sum to 1 (got " + std::to_string(total) + ")");
    }
    coords_.resize(static_cast<std::size_t>(count_) * dim_);
    for (int i = 0; i < count_; ++i) {
        if (static_cast<int>(points[static_cast<std::size_t>(i)].size()) != dim_) {
            throw_invalid("DimensionMismatch", "all particles must share one dimension");
        }
        const Vec unit = project_to_sphere(points[static_cast<std::size_t>(i)]);
        std::copy(unit.begin(), unit.end(), coords_.begin() + static_cast<std::size_t>(i) * dim_);
    }
    weights_ = std::move(weights);
}

Ensemble::Ensemble(const std::vector<Vec>& points)
    : Ensemble(points, Vec(points.size(), points.empty() ? 0.0 : 1.0 / static_cast<double>(points.size()))) {}

Ensemble Ensemble::random(int dim, int count, Rng& rng) {
    if (count < 1) throw_invalid("EmptyEnsemble", "an ensemble needs at least one particle");
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pts.push_back(sample_uniform(dim, rng));
    return Ensemble(pts);
}

Vec Ensemble::point_vec(int i) const {
    const double* p = point(i);
    return Vec(p, p + dim_);
}

void Ensemble::set_point(int i, const Vec& x) {
    if (static_cast<int>(x.size()) != dim_) {
        throw_invalid("DimensionMismatch", "set_point: wrong dimension");
    }
    const Vec unit = project_to_sphere(x);
    std::copy(unit.begin(), unit.end(), coords_.begin() + static_cast<std::size_t>(i) * dim_);
}

namespace {

void require_same_dim(const Ensemble& mu, const InteractionMatrix& d) {
    if (mu.dim() != d.dim()) {
        throw_invalid("DimensionMismatch", "ensemble and interaction matrix dimensions differ");
    }
}

} // namespace

void kernel_sums(const Ensemble& mu, const InteractionMatrix& d,
                 std::vector<Vec>& drive, Vec& mass) {
    require_same_dim(mu, d);
    const int nparticles = mu.size();
    const int n = mu.dim();
    std::vector<Vec> z(static_cast<std::size_t>(nparticles));
    for (int j = 0; j < nparticles; ++j) z[static_cast<std::size_t>(j)] = d.apply(mu.point(j));

    drive.assign(static_cast<std::size_t>(nparticles), Vec(static_cast<std::size_t>(n), 0.0));
    mass.assign(static_cast<std::size_t>(nparticles), 0.0);
    for (int i = 0; i < nparticles; ++i) {
        const double* xi = mu.point(i);
        const double wi = mu.weight(i);
        {
            const double e = std::exp(dot(xi, z[static_cast<std::size_t>(i)].data(), static_cast<std::size_t>(n)));
            mass[static_cast<std::size_t>(i)] += wi * e;
            const double coef = wi * e;
            Vec& di = drive[static_cast<std::size_t>(i)];
            const Vec& zi = z[static_cast<std::size_t>(i)];
            for (int k = 0; k < n; ++k) di[static_cast<std::size_t>(k)] += coef * zi[static_cast<std::size_t>(k)];
        }
        for (int j = i + 1; j < nparticles; ++j) {
            // e^{X_i . D X_j} = e^{X_j . D X_i}: one exp per unordered pair.
            const double e = std::exp(dot(xi, z[static_cast<std::size_t>(j)].data(), static_cast<std::size_t>(n)));
            const double wj = mu.weight(j);
            mass[static_cast<std::size_t>(i)] += wj * e;
            mass[static_cast<std::size_t>(j)] += wi * e;
            Vec& di = drive[static_cast<std::size_t>(i)];
            Vec& dj = drive[static_cast<std::size_t>(j)];
            const Vec& zi = z[static_cast<std::size_t>(i)];
            const Vec& zj = z[static_cast<std::size_t>(j)];
            for (int k = 0; k < n; ++k) {
                di[static_cast<std::size_t>(k)] += wj * e * zj[static_cast<std::size_t>(k)];
                dj[static_cast<std::size_t>(k)] += wi * e * zi[static_cast<std::size_t>(k)];
            }
        }
    }
}

double energy(const Ensemble& mu, const InteractionMatrix& d) {
    require_same_dim(mu, d);
    const int nparticles = mu.size();
    const int n = mu.dim();
    std::vector<Vec> z(static_cast<std::size_t>(nparticles));
    for (int j = 0; j < nparticles; ++j) z[static_cast<std::size_t>(j)] = d.apply(mu.point(j));
    double total = 0.0;
    for (int i = 0; i < nparticles; ++i) {
        const double* xi = mu.point(i);
        const double wi = mu.weight(i);
        total += wi * wi * std::exp(dot(xi, z[static_cast<std::size_t>(i)].data(), static_cast<std::size_t>(n)));
        for (int j = i + 1; j < nparticles; ++j) {
            total += 2.0 * wi * mu.weight(j) *
                     std::exp(dot(xi, z[static_cast<std::size_t>(j)].data(), static_cast<std::size_t>(n)));
        }
    }
    return total;
}

double cross_energy(const Ensemble& a, const Ensemble& b, const InteractionMatrix& d) {
    require_same_dim(a, d);
    require_same_dim(b, d);
    const int n = d.dim();
    std::vector<Vec> z(static_cast<std::size_t>(b.size()));
    for (int j = 0; j < b.size(); ++j) z[static_cast<std::size_t>(j)] = d.apply(b.point(j));
    double total = 0.0;
    for (int i = 0; i < a.size(); ++i) {
        const double* xi = a.point(i);
        double row = 0.0;
        for (int j = 0; j < b.size(); ++j) {
            row += b.weight(j) * std::exp(dot(xi, z[static_cast<std::size_t>(j)].data(), static_cast<std::size_t>(n)));
        }
        total += a.weight(i) * row;
    }
    return total;
}

namespace {

void require_sign(int sign) {
    if (sign != 1 && sign != -1) {
        throw_invalid("BadSign", "sign must be +1 (ascent) or -1 (descent)");
    }
}

} // namespace

TangentVector velocity(const Ensemble& mu, const InteractionMatrix& d, int sign,
                       Normalization normalization, int i) {
    require_same_dim(mu, d);
    require_sign(sign);
    if (i < 0 || i >= mu.size()) {
        throw_invalid("DimensionMismatch", "velocity: particle index out of range");
    }
    std::vector<Vec> drive;
    Vec mass;
    kernel_sums(mu, d, drive, mass);
    const double j = (normalization == Normalization::Partition) ? mass[static_cast<std::size_t>(i)] : 1.0;
    TangentVector tv = tangent_project(mu.point_vec(i), drive[static_cast<std::size_t>(i)]);
    const double scale = static_cast<double>(sign) / j;
    for (auto& c : tv.direction) c *= scale;
    return tv;
}

EnergyReport stationarity_residual(const Ensemble& mu, const InteractionMatrix& d) {
    require_same_dim(mu, d);
    std::vector<Vec> drive;
    Vec mass;
    kernel_sums(mu, d, drive, mass);
    const int nparticles = mu.size();
    EnergyReport report;
    report.per_particle_residual.assign(static_cast<std::size_t>(nparticles), 0.0);
    for (int i = 0; i < nparticles; ++i) {
        const TangentVector tv = tangent_project(mu.point_vec(i), drive[static_cast<std::size_t>(i)]);
        const double r = norm2(tv.direction);
        report.per_particle_residual[static_cast<std::size_t>(i)] = r;
        report.max_residual = std::max(report.max_residual, r);
        report.energy += mu.weight(i) * mass[static_cast<std::size_t>(i)];
        // g_i = 2 * projected drive; m_i = kernel mass.
        report.dissipation += mu.weight(i) * mass[static_cast<std::size_t>(i)] * 4.0 * r * r;
    }
    return report;
}

double first_variation(const Ensemble& mu, const InteractionMatrix& d,
                       const std::vector<Vec>& v) {
    require_same_dim(mu, d);
    if (static_cast<int>(v.size()) != mu.size()) {
        throw_invalid("DimensionMismatch", "first_variation: need one velocity per particle");
    }
    for (const Vec& vi : v) {
        if (static_cast<int>(vi.size()) != mu.dim()) {
            throw_invalid("DimensionMismatch", "first_variation: velocity dimension mismatch");
        }
    }
    std::vector<Vec> drive;
    Vec mass;
    kernel_sums(mu, d, drive, mass);
    double acc = 0.0;
    for (int i = 0; i < mu.size(); ++i) {
        const TangentVector tv = tangent_project(mu.point_vec(i), drive[static_cast<std::size_t>(i)]);
        acc += mu.weight(i) * dot(tv.direction, v[static_cast<std::size_t>(i)]);
    }
    return 2.0 * acc;
}

double dissipation(const Ensemble& mu, const InteractionMatrix& d, int sign) {
    require_sign(sign);
    return stationarity_residual(mu, d).dissipation;
}

ExtremizerCatalog extremizer_catalog(const InteractionMatrix& d) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double zero_tol = 1e-12 * std::max(1.0, frobenius(d.data()));
    const double lmax = d.lambda_max();
    const double lmin = d.lambda_min();
    const bool lmin_zero = std::abs(lmin) <= zero_tol;
    const bool lmax_zero = std::abs(lmax) <= zero_tol;

    ExtremizerCatalog cat;
    cat.candidate_energy = nan;

    // Minimizer cases, keyed on the smallest eigenvalue.
    if (lmin < -zero_tol) {
        cat.minimizer.known = true;
        cat.minimizer.description = "dirac at the eigenvector of the smallest eigenvalue";
        cat.minimizer.value = std::exp(lmin);
        cat.minimizer.direction = d.eigenvectors().back();
    } else if (lmin_zero) {
        cat.minimizer.known = true;
        cat.minimizer.description = "any probability measure supported on the null space";
        cat.minimizer.value = 1.0;
    } else {
        cat.minimizer.known = false;
        cat.minimizer.description =
            "no closed form; some minimizer is symmetric with respect to every eigenvector reflection";
        cat.minimizer.value = nan;
    }

    // Maximizer cases.
    if (lmax > zero_tol && lmax >= std::abs(lmin)) {
        // The eigenvalue of largest magnitude is positive: a dirac there wins.
        cat.maximizer.known = true;
        cat.maximizer.description = "dirac at the eigenvector of the largest eigenvalue";
        cat.maximizer.value = std::exp(lmax);
        cat.maximizer.direction = d.eigenvectors().front();
    } else if (lmax <= zero_tol && lmin < -zero_tol) {
        // Negative semi-definite: the antipodal pair at the most negative mode.
        cat.maximizer.known = true;
        cat.maximizer.description =
            "equal-weight antipodal pair at the eigenvector of the smallest eigenvalue";
        cat.maximizer.value = std::cosh(lmin);
        cat.maximizer.direction = d.eigenvectors().back();
    } else if (lmax_zero && lmin_zero) {
        cat.maximizer.known = true;
        cat.maximizer.description = "any probability measure (the kernel is constant)";
        cat.maximizer.value = 1.0;
    } else {
        // Indefinite with the negative side dominant: no proven maximizer.
        cat.maximizer.known = false;
        cat.maximizer.value = nan;
        if (std::exp(lmax) < std::cosh(lmin)) {
            cat.two_cluster_candidate = true;
            cat.candidate_energy = std::cosh(lmin);
            cat.maximizer.description =
                "no proven form; the antipodal pair at the smallest eigenvalue beats every dirac";
            cat.maximizer.direction = d.eigenvectors().back();
        } else {
            cat.maximizer.description =
                "no proven form; best known candidates are the top dirac and the antipodal pair";
        }
    }
    return cat;
}

} // namespace sphereflow
