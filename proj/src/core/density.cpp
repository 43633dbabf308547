#include "density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "asymptotics.hpp"
#include "errors.hpp"

namespace sphereflow {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

Vec grid_angles(int n_points) {
    Vec th(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        th[static_cast<std::size_t>(i)] = -kPi + kTwoPi * i / n_points;
    }
    return th;
}

void require_points(int n_points) {
    if (n_points < 4) throw_invalid("BadConfig", "grid densities need at least 4 points");
}

void require_diag(const Vec& m_diag) {
    if (m_diag.size() != 2) {
        throw_invalid("DimensionMismatch", "the circle solver takes a 2-entry diagonal for M");
    }
}

void require_kernel_bounded(double eps, const Vec& m_diag) {
    const double bound = std::max(std::abs(1.0 + eps * m_diag[0]), std::abs(1.0 + eps * m_diag[1]));
    if (bound > 700.0) {
        throw_numeric("Overflow", "kernel exponent bound " + std::to_string(bound) +
                                      " exceeds 700; e^{x.(Id+eps M)y} would overflow");
    }
}

/// Dense symmetric kernel K_ij = e^{x_i.(Id+eps M)x_j} for the grid angles.
std::vector<double> build_kernel(const Vec& th, double eps, const Vec& m_diag) {
    const int n = static_cast<int>(th.size());
    Vec c(static_cast<std::size_t>(n));
    Vec s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        c[static_cast<std::size_t>(i)] = std::cos(th[static_cast<std::size_t>(i)]);
        s[static_cast<std::size_t>(i)] = std::sin(th[static_cast<std::size_t>(i)]);
    }
    std::vector<double> k(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double ip =
                (1.0 + eps * m_diag[0]) * c[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(j)] +
                (1.0 + eps * m_diag[1]) * s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)];
            const double e = std::exp(ip);
            k[static_cast<std::size_t>(i) * n + j] = e;
            k[static_cast<std::size_t>(j) * n + i] = e;
        }
    }
    return k;
}

Vec matvec(const std::vector<double>& k, const Vec& m) {
    const int n = static_cast<int>(m.size());
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = k.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) acc += row[j] * m[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Vec softmax_step(const Vec& mass, const Vec& gradient, double tau) {
    const std::size_t n = mass.size();
    Vec logits(n);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mass[i] > 0.0)) {
            throw_numeric("NegativeMass", "mirror descent needs strictly positive mass");
        }
        logits[i] = std::log(mass[i]) - tau * gradient[i];
        top = std::max(top, logits[i]);
    }
    double total = 0.0;
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(logits[i] - top);
        total += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= total;
    return out;
}

} // namespace

GridDensity uniform_density(int n_points) {
    require_points(n_points);
    GridDensity m;
    m.n_points = n_points;
    m.angles = grid_angles(n_points);
    m.mass.assign(static_cast<std::size_t>(n_points), 1.0 / n_points);
    return m;
}

GridDensity density_from_mass(Vec mass) {
    require_points(static_cast<int>(mass.size()));
    double total = 0.0;
    for (double v : mass) {
        if (!(v >= 0.0)) throw_invalid("BadWeights", "density mass must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw_invalid("BadWeights", "density mass must sum to 1");
    }
    GridDensity m;
    m.n_points = static_cast<int>(mass.size());
    m.angles = grid_angles(m.n_points);
    m.mass = std::move(mass);
    return m;
}

double grid_energy(const GridDensity& m, double eps, const Vec& m_diag) {
    require_diag(m_diag);
    require_kernel_bounded(eps, m_diag);
    const std::vector<double> k = build_kernel(m.angles, eps, m_diag);
    const Vec km = matvec(k, m.mass);
    return dot(m.mass, km);
}

Vec grid_gradient(const GridDensity& m, double eps, const Vec& m_diag) {
    require_diag(m_diag);
    require_kernel_bounded(eps, m_diag);
    const std::vector<double> k = build_kernel(m.angles, eps, m_diag);
    Vec g = matvec(k, m.mass);
    for (auto& v : g) v *= 2.0;
    return g;
}

GridDensity mirror_descent_step(const GridDensity& m, double eps, const Vec& m_diag,
                                double tau) {
    if (!(tau >= 0.0)) throw_invalid("BadConfig", "mirror-descent step size must be >= 0");
    const Vec g = grid_gradient(m, eps, m_diag);
    GridDensity out;
    out.n_points = m.n_points;
    out.angles = m.angles;
    out.mass = softmax_step(m.mass, g, tau);
    return out;
}

DensitySolution solve_density(double eps, const Vec& m_diag, int n_points, double tau,
                              int iters) {
    require_points(n_points);
    require_diag(m_diag);
    require_kernel_bounded(eps, m_diag);
    if (!(tau > 0.0)) throw_invalid("BadConfig", "mirror-descent step size must be positive");
    if (iters < 1) throw_invalid("BadConfig", "iteration count must be >= 1");

    DensitySolution sol;
    sol.density = uniform_density(n_points);
    const std::vector<double> k = build_kernel(sol.density.angles, eps, m_diag);

    sol.energies.reserve(static_cast<std::size_t>(iters) + 1);
    for (int it = 0; it <= iters; ++it) {
        Vec g = matvec(k, sol.density.mass);
        for (auto& v : g) v *= 2.0;
        // E = m.K m = (1/2) m.g: the matvec serves both records and updates.
        sol.energies.push_back(0.5 * dot(sol.density.mass, g));
        if (it == iters) break;
        sol.density.mass = softmax_step(sol.density.mass, g, tau);
    }
    return sol;
}

GridDensity asymptotic_density(double eps, const Vec& m_diag, int n_points) {
    require_points(n_points);
    require_diag(m_diag);
    const PerturbationConstants k = compute_constants(2);
    const double beta = -k.alpha * (m_diag[0] + m_diag[1]) / 2.0;

    GridDensity m;
    m.n_points = n_points;
    m.angles = grid_angles(n_points);
    m.mass.resize(static_cast<std::size_t>(n_points));
    double total = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double c = std::cos(m.angles[static_cast<std::size_t>(i)]);
        const double s = std::sin(m.angles[static_cast<std::size_t>(i)]);
        const double quadratic = m_diag[0] * c * c + m_diag[1] * s * s; // x.Mx
        const double raw = (1.0 + eps * (k.alpha * quadratic + beta)) / n_points;
        if (raw < 0.0) {
            throw_numeric("NegativeMass",
                          "eps is too large for the first-order density to stay nonnegative");
        }
        m.mass[static_cast<std::size_t>(i)] = raw;
        total += raw;
    }
    for (auto& v : m.mass) v /= total;
    return m;
}

GridDensity conjectured_density(double upsilon, int n_points) {
    require_points(n_points);
    GridDensity m;
    m.n_points = n_points;
    m.angles = grid_angles(n_points);
    m.mass.resize(static_cast<std::size_t>(n_points));
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_points; ++i) {
        top = std::max(top, upsilon * std::cos(2.0 * m.angles[static_cast<std::size_t>(i)]));
    }
    double total = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const double v = std::exp(upsilon * std::cos(2.0 * m.angles[static_cast<std::size_t>(i)]) - top);
        m.mass[static_cast<std::size_t>(i)] = v;
        total += v;
    }
    for (auto& v : m.mass) v /= total;
    return m;
}

double fit_upsilon(const GridDensity& m) {
    const std::size_t n = m.mass.size();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(m.mass[i] > 0.0)) {
            throw_numeric("NegativeMass", "fit_upsilon needs strictly positive mass");
        }
        y[i] = std::log(m.mass[i]);
    }
    double cbar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cbar += std::cos(2.0 * m.angles[i]);
        ybar += y[i];
    }
    cbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cc = std::cos(2.0 * m.angles[i]) - cbar;
        num += cc * (y[i] - ybar);
        den += cc * cc;
    }
    if (!(den > 0.0)) throw_numeric("NoConvergence", "degenerate regressor in fit_upsilon");
    return num / den;
}

UpsilonRegression upsilon_regression(const Vec& eps_grid, const Vec& upsilon_values) {
    if (eps_grid.size() != upsilon_values.size() || eps_grid.size() < 2) {
        throw_invalid("BadConfig", "regression needs matching grids with >= 2 points");
    }
    double s11 = 0.0;
    double s12 = 0.0;
    double s22 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double e = eps_grid[i];
        const double u = upsilon_values[i];
        const double e2 = e * e;
        s11 += e2;
        s12 += e2 * e;
        s22 += e2 * e2;
        b1 += e * u;
        b2 += e2 * u;
    }
    const double det = s11 * s22 - s12 * s12;
    if (!(std::abs(det) > 0.0)) {
        throw_numeric("NoConvergence", "singular normal equations in upsilon_regression");
    }
    UpsilonRegression fit;
    fit.linear = (b1 * s22 - b2 * s12) / det;
    fit.quadratic = (s11 * b2 - s12 * b1) / det;
    return fit;
}

} // namespace sphereflow
