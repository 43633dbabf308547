#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace sphereflow::quad {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 6.28318530717958647692;

/// Composite Simpson of f over [a, b]; panels must be even and >= 2.
template <typename F>
double simpson(F&& f, double a, double b, int panels) {
    if (panels < 2 || panels % 2 != 0) {
        throw_invalid("BadWeights", "Simpson rule needs an even panel count >= 2");
    }
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        acc += ((i % 2 == 1) ? 4.0 : 2.0) * f(a + i * h);
    }
    return acc * h / 3.0;
}

/// Trapezoid rule for a (2*pi)-periodic f over one period, sampled at
/// theta_k = 2*pi*k/points. Spectrally accurate for smooth periodic
/// integrands, which is why the circle quadratures below use it.
template <typename F>
double periodic_trapezoid(F&& f, int points) {
    if (points < 1) throw_invalid("BadWeights", "periodic trapezoid needs >= 1 point");
    double acc = 0.0;
    const double h = kTwoPi / points;
    for (int k = 0; k < points; ++k) acc += f(k * h);
    return acc * h;
}

/// Discretization of the uniform probability measure on S^{n-1} as weighted
/// nodes: sum(weights) = 1 exactly (weights are normalized by their raw sum,
/// absorbing any quadrature defect of the total mass).
struct SphereGrid {
    int dim = 0;                      // ambient dimension n
    std::vector<Vec> points;          // unit vectors
    std::vector<double> weights;      // probability weights, sum = 1
};

/// Circle grid: res equispaced angles theta_k = 2*pi*k/res, weight 1/res.
inline SphereGrid circle_grid(int res) {
    if (res < 4) throw_invalid("BadWeights", "circle grid needs at least 4 points");
    SphereGrid g;
    g.dim = 2;
    g.points.reserve(static_cast<std::size_t>(res));
    g.weights.assign(static_cast<std::size_t>(res), 1.0 / res);
    for (int k = 0; k < res; ++k) {
        const double t = kTwoPi * k / res;
        g.points.push_back({std::cos(t), std::sin(t)});
    }
    return g;
}

/// S^2 grid: Simpson in the polar angle (res panels over [0, pi]) times
/// periodic trapezoid in the azimuth (res points), with the sin(phi)
/// area factor; raw weights are normalized to total mass exactly 1.
inline SphereGrid sphere3_grid(int res) {
    if (res < 4 || res % 2 != 0) {
        throw_invalid("BadWeights", "sphere grid needs an even resolution >= 4");
    }
    SphereGrid g;
    g.dim = 3;
    const int nphi = res + 1; // Simpson nodes
    const int nth = res;      // periodic trapezoid nodes
    g.points.reserve(static_cast<std::size_t>(nphi) * nth);
    g.weights.reserve(static_cast<std::size_t>(nphi) * nth);
    double raw_sum = 0.0;
    for (int i = 0; i < nphi; ++i) {
        const double phi = kPi * i / res;
        double wphi = (i == 0 || i == res) ? 1.0 : ((i % 2 == 1) ? 4.0 : 2.0);
        wphi *= std::sin(phi);
        if (wphi == 0.0) continue; // poles carry zero weight; skip the nodes
        for (int k = 0; k < nth; ++k) {
            const double th = kTwoPi * k / nth;
            g.points.push_back(spherical_to_cartesian({phi, th}));
            const double w = wphi;
            g.weights.push_back(w);
            raw_sum += w;
        }
    }
    for (auto& w : g.weights) w /= raw_sum;
    return g;
}

/// Grid of probe directions used when a stationarity residual must be
/// maximized over the whole sphere: coarser than the integration grid,
/// since the maximized functions vary on O(1) angular scales.
inline std::vector<Vec> probe_directions(int dim, int res) {
    std::vector<Vec> probes;
    if (dim == 2) {
        const int m = std::min(res, 128);
        probes.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double t = kTwoPi * k / m;
            probes.push_back({std::cos(t), std::sin(t)});
        }
    } else if (dim == 3) {
        const int m = std::min(res, 20);
        probes.reserve(static_cast<std::size_t>(m + 1) * m);
        for (int i = 0; i <= m; ++i) {
            const double phi = kPi * i / m;
            for (int k = 0; k < m; ++k) {
                const double th = kTwoPi * k / m;
                probes.push_back(spherical_to_cartesian({phi, th}));
                if (i == 0 || i == m) break; // poles collapse over theta
            }
        }
    } else {
        throw_invalid("UnsupportedDimension",
                      "probe grids are provided for n = 2 and n = 3 only");
    }
    return probes;
}

} // namespace sphereflow::quad
