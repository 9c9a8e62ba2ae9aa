#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dbar/common.hpp"

namespace dbar {

/// Nodes and positive weights discretizing a region (disc, circle, or torus).
/// Weights carry the region's measure: they sum to pi for the unit disc and
/// to 2*pi for the unit circle.
struct WeightedNodes {
    std::vector<cplx> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Weighted nodes on (dD)^dim; each node is a dim-vector of unimodular
/// complex numbers, stored flat.
struct TorusNodes {
    int dim = 1;
    std::vector<cplx> nodes;  // size() * dim entries, node k at [k*dim, (k+1)*dim)
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    const cplx* node(std::size_t k) const { return nodes.data() + k * static_cast<std::size_t>(dim); }
};

/// 1-D rule on [0, t_max] for the Henkin radial profile.
struct RadialNodes {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_m.
inline void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(m), 0.0);
    w.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= m; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -t;
        x[static_cast<std::size_t>(m - 1 - i)] = t;
        double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(m - 1 - i)] = wi;
    }
}

/// Append an m-point Gauss rule mapped to [a, b].
inline void append_gauss_panel(double a, double b, int m,
                               std::vector<double>& nodes, std::vector<double>& weights) {
    std::vector<double> x, w;
    gauss_legendre(m, x, w);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        nodes.push_back(mid + half * x[static_cast<std::size_t>(i)]);
        weights.push_back(half * w[static_cast<std::size_t>(i)]);
    }
}

}  // namespace detail

/// Polar product rule on the unit disc: Gauss-Legendre in radius with the
/// Jacobian r folded into the weights, trapezoid in angle. Weights sum to pi.
inline WeightedNodes disc_nodes(int radial_count, int angular_count) {
    if (radial_count < 2 || angular_count < 2)
        throw std::invalid_argument("disc_nodes: counts must be >= 2");
    std::vector<double> x, w;
    detail::gauss_legendre(radial_count, x, w);
    WeightedNodes out;
    out.nodes.reserve(static_cast<std::size_t>(radial_count) * angular_count);
    out.weights.reserve(out.nodes.capacity());
    double dtheta = kTwoPi / angular_count;
    for (int i = 0; i < radial_count; ++i) {
        double r = 0.5 * (x[static_cast<std::size_t>(i)] + 1.0);
        double wr = 0.5 * w[static_cast<std::size_t>(i)] * r * dtheta;
        for (int k = 0; k < angular_count; ++k) {
            double th = dtheta * k;
            out.nodes.emplace_back(r * std::cos(th), r * std::sin(th));
            out.weights.push_back(wr);
        }
    }
    return out;
}

/// m equispaced nodes on the unit circle, weight 2*pi/m each. Spectrally
/// accurate trapezoid rule for smooth periodic integrands.
inline WeightedNodes circle_nodes(int m) {
    if (m < 4) throw std::invalid_argument("circle_nodes: m must be >= 4");
    WeightedNodes out;
    out.nodes.reserve(static_cast<std::size_t>(m));
    out.weights.assign(static_cast<std::size_t>(m), kTwoPi / m);
    for (int k = 0; k < m; ++k) {
        double th = kTwoPi * k / m;
        out.nodes.emplace_back(std::cos(th), std::sin(th));
    }
    return out;
}

/// Product of circle_nodes(m) over `dim` factors; m^dim nodes. Refuses rules
/// above 1e8 nodes: nested torus integrals must fail loudly, not hang.
inline TorusNodes torus_nodes(int dim, int m) {
    if (dim < 1) throw std::invalid_argument("torus_nodes: dim must be >= 1");
    if (m < 4) throw std::invalid_argument("torus_nodes: m must be >= 4");
    double total = std::pow(static_cast<double>(m), dim);
    if (total > 1e8) throw std::invalid_argument("torus_nodes: m^dim exceeds the 1e8 node guard");

    WeightedNodes circ = circle_nodes(m);
    std::size_t count = 1;
    for (int d = 0; d < dim; ++d) count *= static_cast<std::size_t>(m);

    TorusNodes out;
    out.dim = dim;
    out.nodes.resize(count * static_cast<std::size_t>(dim));
    out.weights.assign(count, std::pow(kTwoPi / m, dim));
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t idx = k;
        for (int d = 0; d < dim; ++d) {
            out.nodes[k * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] =
                circ.nodes[idx % static_cast<std::size_t>(m)];
            idx /= static_cast<std::size_t>(m);
        }
    }
    return out;
}

/// Graded composite Gauss rule on [0, t_max] whose panel boundaries include
/// each exclusion radius. Panels adjacent to an exclusion are refined
/// geometrically toward it, which resolves the integrable logarithmic
/// singularities of the Henkin radial integrand. No node lands within 1e-12
/// of an exclusion (Gauss nodes are interior to their panels).
inline RadialNodes radial_profile_nodes(double t_max, int count,
                                        const std::vector<double>& exclusions) {
    if (t_max <= 0.0) throw std::invalid_argument("radial_profile_nodes: t_max must be positive");
    if (count < 2) throw std::invalid_argument("radial_profile_nodes: count must be >= 2");

    std::vector<double> breaks{0.0, t_max};
    for (double e : exclusions) {
        if (e > 1e-12 && e < t_max - 1e-12) breaks.push_back(e);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                 breaks.end());

    auto is_exclusion = [&](double v) {
        for (double e : exclusions)
            if (std::abs(v - e) < 1e-13) return true;
        return false;
    };

    // Geometric grading toward singular endpoints, ratio 0.2, five levels.
    constexpr double kRatio = 0.2;
    constexpr int kLevels = 5;
    std::vector<std::pair<double, double>> panels;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        double a = breaks[p], b = breaks[p + 1];
        bool grade_left = is_exclusion(a);
        bool grade_right = is_exclusion(b) || (p + 2 == breaks.size() && is_exclusion(t_max));
        if (!grade_left && !grade_right) {
            panels.emplace_back(a, b);
            continue;
        }
        double mid = (grade_left && grade_right) ? 0.5 * (a + b) : (grade_left ? b : a);
        if (grade_left) {
            double lo = a, len = mid - a;
            std::vector<double> pts{mid};
            for (int l = 1; l <= kLevels; ++l) pts.push_back(lo + len * std::pow(kRatio, l));
            pts.push_back(lo);
            std::sort(pts.begin(), pts.end());
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) panels.emplace_back(pts[i], pts[i + 1]);
        }
        if (grade_right) {
            double hi = b, lo2 = (grade_left ? mid : a), len = hi - lo2;
            std::vector<double> pts{lo2};
            for (int l = kLevels; l >= 1; --l) pts.push_back(hi - len * std::pow(kRatio, l));
            pts.push_back(hi);
            std::sort(pts.begin(), pts.end());
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) panels.emplace_back(pts[i], pts[i + 1]);
        }
    }

    int per_panel = std::max(2, static_cast<int>(std::lround(
                                    static_cast<double>(count) / static_cast<double>(panels.size()))));
    RadialNodes out;
    for (auto [a, b] : panels) detail::append_gauss_panel(a, b, per_panel, out.nodes, out.weights);
    return out;
}

}  // namespace dbar
