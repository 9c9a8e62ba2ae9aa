#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dbar/common.hpp"
#include "dbar/field.hpp"
#include "dbar/quadrature.hpp"

namespace dbar {

/// Quadrature settings shared by the Cauchy-type operators.
struct OperatorConfig {
    int disc_radial = 64;
    int disc_angular = 128;
    int circle_count = 128;
    int torus_m = 256;
    bool subtraction = true;       // singularity removal via the exact T[1] = zbar datum
    double boundary_margin = 1e-3; // trapezoid circle kernels degrade inside this band
    int henkin_radial = 96;        // radial budget for the common-radius skeleton integrals
    int henkin_angular = 128;      // trapezoid count per skeleton angle
};

namespace detail {

// Rules are pure functions of their counts; cache them across operator calls.
inline const WeightedNodes& cached_disc_rule(int radial, int angular) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<WeightedNodes>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{radial, angular}];
    if (!slot) slot = std::make_unique<WeightedNodes>(disc_nodes(radial, angular));
    return *slot;
}

inline const WeightedNodes& cached_circle_rule(int m) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<WeightedNodes>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) slot = std::make_unique<WeightedNodes>(circle_nodes(m));
    return *slot;
}

inline bool on_unit_circle(cplx z, double tol = 1e-9) {
    return std::abs(std::abs(z) - 1.0) <= tol;
}

/// FD estimate of dbar f at z for the second-order singularity removal in the
/// solid Cauchy transforms. Any value is admissible there (the subtracted
/// datum is added back in closed form), so near the boundary, where the
/// stencil would leave the disc, zero is returned and the transform degrades
/// to first-order removal.
inline cplx dbar_slice_fd(const std::function<cplx(cplx)>& f, cplx z) {
    constexpr double h = 1e-5;
    if (std::abs(z) > 1.0 - 2.0 * h) return cplx(0.0, 0.0);
    cplx dre = f(z + h) - f(z - h);
    cplx dim = f(z + cplx(0.0, h)) - f(z - cplx(0.0, h));
    return (dre + cplx(0.0, 1.0) * dim) / (4.0 * h);
}

}  // namespace detail

/// Solid Cauchy transform over the unit disc,
///   T[f](z) = (1/2 pi i) int_D f(zeta)/(zeta - z) dzeta ^ dzetabar,
/// with orientation fixed so that T[1] = zbar (hence dbar T[f] = f). With
/// subtraction on, the integrand is f(zeta) - f(z) - c (zetabar - zbar) over
/// zeta - z with c ~ dbar f(z): the constant datum contributes exactly
/// f(z) zbar, the conjugate-linear datum exactly -c zbar^2 / 2, and the
/// remainder is differentiable at the pole. Defined on the closed disc; the
/// boundary value is the continuous extension.
inline cplx cauchy_disc_T(const std::function<cplx(cplx)>& f, cplx z, const OperatorConfig& cfg) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw OutOfDomainError("cauchy_disc_T: |z| > 1");
    const WeightedNodes& rule = detail::cached_disc_rule(cfg.disc_radial, cfg.disc_angular);
    cplx acc(0.0, 0.0);
    if (cfg.subtraction) {
        cplx fz = f(z);
        cplx c = detail::dbar_slice_fd(f, z);
        cplx zb = std::conj(z);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            cplx zeta = rule.nodes[k];
            acc += rule.weights[k] * (f(zeta) - fz - c * (std::conj(zeta) - zb)) / (zeta - z);
        }
        return -acc / kPi + fz * zb - c * zb * zb / 2.0;
    }
    for (std::size_t k = 0; k < rule.size(); ++k) {
        cplx zeta = rule.nodes[k];
        acc += rule.weights[k] * f(zeta) / (zeta - z);
    }
    return -acc / kPi;
}

/// Boundary Cauchy integral S[f](z) = (1/2 pi i) int_{dD} f(zeta)/(zeta-z) dzeta.
/// Interior points use the plain trapezoid rule; points within
/// boundary_margin of the circle are rejected except exactly on it, where the
/// nontangential limit is computed by Plemelj subtraction on a rotated grid.
inline cplx cauchy_circle_S(const std::function<cplx(cplx)>& f, cplx z, const OperatorConfig& cfg) {
    double r = std::abs(z);
    if (r > 1.0 + 1e-12) throw OutOfDomainError("cauchy_circle_S: |z| > 1");
    int m = cfg.circle_count;
    if (detail::on_unit_circle(z)) {
        // Interior limit: S[f](z*) = (1/2 pi i) PV + f(z*)/2 + f(z*)/2.
        cplx zstar = z / r;
        cplx fz = f(zstar);
        cplx rot = zstar * std::polar(1.0, kPi / m);  // keep nodes off z*
        cplx acc(0.0, 0.0);
        cplx node = rot;
        cplx step = std::polar(1.0, kTwoPi / m);
        for (int k = 0; k < m; ++k) {
            acc += (f(node) - fz) * node / (node - zstar);
            node *= step;
        }
        return acc / static_cast<double>(m) + fz;
    }
    if (r > 1.0 - cfg.boundary_margin)
        throw NearBoundaryError("cauchy_circle_S: point within boundary margin of dD",
                                cfg.boundary_margin);
    const WeightedNodes& rule = detail::cached_circle_rule(m);
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        cplx zeta = rule.nodes[k];
        acc += f(zeta) * zeta / (zeta - z);
    }
    return acc / static_cast<double>(m);
}

/// T_j applied to the j-th slice of a scalar function (indices 0-based).
inline cplx op_Tj(const ScalarFunction& g_comp, int j, const Point& z, const OperatorConfig& cfg) {
    if (j < 0 || j >= z.dim()) throw std::invalid_argument("op_Tj: index out of range");
    auto f = [&](cplx zeta) { return g_comp(z.with(j, zeta)); };
    return cauchy_disc_T(f, z[j], cfg);
}

/// Iterated boundary Cauchy integrals Stilde over the first `vars` variables:
/// vars = 0 is the identity, vars = j applies S_{j-1} ... S_0. When every
/// involved coordinate is interior this is a single product-torus quadrature
/// with kernel prod zeta_i/(zeta_i - z_i); coordinates on the unit circle fall
/// back to nested circle transforms so the Plemelj boundary value applies per
/// variable.
inline cplx op_Stilde(const ScalarFunction& f, int vars, const Point& z, const OperatorConfig& cfg) {
    if (vars < 0 || vars > z.dim()) throw std::invalid_argument("op_Stilde: bad variable count");
    if (vars == 0 || f.is_zero()) return f(z);

    bool all_interior = true;
    for (int i = 0; i < vars; ++i) {
        double r = std::abs(z[i]);
        if (detail::on_unit_circle(z[i])) {
            all_interior = false;
        } else if (r > 1.0 - cfg.boundary_margin) {
            throw NearBoundaryError("op_Stilde: coordinate within boundary margin of dD",
                                    cfg.boundary_margin);
        }
    }

    int m = cfg.circle_count;
    if (all_interior) {
        double total = std::pow(static_cast<double>(m), vars);
        if (total > 1e8)
            throw std::invalid_argument("op_Stilde: m^vars exceeds the 1e8 node guard");
        const WeightedNodes& circ = detail::cached_circle_rule(m);
        std::size_t count = 1;
        for (int i = 0; i < vars; ++i) count *= static_cast<std::size_t>(m);
        cplx acc(0.0, 0.0);
        Point p = z;
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t idx = k;
            cplx kern(1.0, 0.0);
            for (int i = 0; i < vars; ++i) {
                cplx zeta = circ.nodes[idx % static_cast<std::size_t>(m)];
                idx /= static_cast<std::size_t>(m);
                p[i] = zeta;
                kern *= zeta / (zeta - z[i]);
            }
            acc += f(p) * kern;
        }
        return acc / std::pow(static_cast<double>(m), vars);
    }

    // Outermost factor S_{vars-1}; inner factors recurse.
    auto inner = [&](cplx zeta) {
        return op_Stilde(f, vars - 1, z.with(vars - 1, zeta), cfg);
    };
    return cauchy_circle_S(inner, z[vars - 1], cfg);
}

/// The canonical solution operator T[g] = sum_j T_j Stilde_j [g_j].
inline cplx op_T(const Form01& g, const Point& z, const OperatorConfig& cfg) {
    int n = g.dim();
    if (n != z.dim()) throw std::invalid_argument("op_T: dimension mismatch");
    cplx acc(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
        if (g[j].is_zero()) continue;
        ScalarFunction comp = g[j].unmemoized();  // node sets too large to cache
        auto f = [&](cplx zeta) { return op_Stilde(comp, j, z.with(j, zeta), cfg); };
        acc += cauchy_disc_T(f, z[j], cfg);
    }
    return acc;
}

/// Evaluate T[g] at a batch of interior points, sharing the inner quadrature
/// sweeps across points. Relative to op_T the integration order is exchanged
/// (boundary tuples outermost, the solid transform innermost, singularity
/// removal per boundary tuple), so values agree with op_T to quadrature
/// accuracy but not bitwise. Data components are evaluated without
/// memoization; memory stays O(points x disc nodes) however fine the rules.
inline std::vector<cplx> op_T_batch(const Form01& g, const std::vector<Point>& points,
                                    const OperatorConfig& cfg) {
    int n = g.dim();
    std::size_t np = points.size();
    std::vector<cplx> out(np, cplx(0.0, 0.0));
    if (np == 0) return out;
    for (const Point& z : points) {
        if (z.dim() != n) throw std::invalid_argument("op_T_batch: dimension mismatch");
        for (int i = 0; i < n; ++i)
            if (std::abs(z[i]) > 1.0 - cfg.boundary_margin)
                throw NearBoundaryError("op_T_batch: point within boundary margin",
                                        cfg.boundary_margin);
    }

    const WeightedNodes& disc = detail::cached_disc_rule(cfg.disc_radial, cfg.disc_angular);
    const WeightedNodes& circ = detail::cached_circle_rule(cfg.circle_count);
    const std::size_t nd = disc.size();
    const std::size_t m = static_cast<std::size_t>(cfg.circle_count);

    for (int j = 0; j < n; ++j) {
        if (g[j].is_zero()) continue;

        // Disc-kernel tables in coordinate j, one row per point:
        // A[p][k] = w_k / (zeta_k - z_j), plus the datum sums
        // S0 = sum A, S1 = sum A (zetabar_k - zbar_j).
        std::vector<std::vector<cplx>> A(np, std::vector<cplx>(nd));
        std::vector<cplx> S0(np), S1(np);
        for (std::size_t p = 0; p < np; ++p) {
            cplx zj = points[p][j];
            cplx zb = std::conj(zj);
            cplx s0(0.0, 0.0), s1(0.0, 0.0);
            for (std::size_t k = 0; k < nd; ++k) {
                cplx a = disc.weights[k] / (disc.nodes[k] - zj);
                A[p][k] = a;
                s0 += a;
                s1 += a * (std::conj(disc.nodes[k]) - zb);
            }
            S0[p] = s0;
            S1[p] = s1;
        }

        std::size_t wcount = 1;
        for (int i = 0; i < j; ++i) wcount *= m;
        double wnorm = static_cast<double>(wcount);
        bool shared_tail = (j == n - 1);  // data values independent of the point

        std::vector<cplx> gv(nd);
        Point scratch = points[0];
        auto slice_eval = [&](cplx zeta) {
            scratch[j] = zeta;
            return g[j].raw(scratch);
        };
        auto fill_gv = [&]() {
            for (std::size_t k = 0; k < nd; ++k) {
                scratch[j] = disc.nodes[k];
                gv[k] = g[j].raw(scratch);
            }
        };

        for (std::size_t w = 0; w < wcount; ++w) {
            std::size_t idx = w;
            for (int i = 0; i < j; ++i) {
                scratch[i] = circ.nodes[idx % m];
                idx /= m;
            }
            if (shared_tail) fill_gv();
            for (std::size_t p = 0; p < np; ++p) {
                const Point& z = points[p];
                cplx kern(1.0, 0.0);
                for (int i = 0; i < j; ++i) kern *= scratch[i] / (scratch[i] - z[i]);
                if (!shared_tail) {
                    for (int i = j + 1; i < n; ++i) scratch[i] = z[i];
                    fill_gv();
                }
                cplx dot(0.0, 0.0);
                const std::vector<cplx>& Ap = A[p];
                for (std::size_t k = 0; k < nd; ++k) dot += Ap[k] * gv[k];
                cplx zj = z[j];
                cplx val;
                if (cfg.subtraction) {
                    cplx zb = std::conj(zj);
                    cplx fz = slice_eval(zj);
                    cplx c = detail::dbar_slice_fd(slice_eval, zj);
                    val = -(dot - fz * S0[p] - c * S1[p]) / kPi + fz * zb - c * zb * zb / 2.0;
                } else {
                    val = -dot / kPi;
                }
                out[p] += kern * val / wnorm;
            }
        }
    }
    return out;
}

/// Cauchy torus integral
///   K[u](z) = (1/2 pi i)^n int_{(dD)^n} u(zeta) / prod(zeta_j - z_j) dzeta.
/// Reproduces holomorphic functions and annihilates the range of T.
inline cplx op_K(const ScalarFunction& u, const Point& z, const OperatorConfig& cfg) {
    int n = z.dim();
    for (int i = 0; i < n; ++i)
        if (std::abs(z[i]) > 1.0 - cfg.boundary_margin)
            throw NearBoundaryError("op_K: point within boundary margin of the torus",
                                    cfg.boundary_margin);
    int m = cfg.torus_m;
    double total = std::pow(static_cast<double>(m), n);
    if (total > 1e8) throw std::invalid_argument("op_K: m^n exceeds the 1e8 node guard");
    const WeightedNodes& circ = detail::cached_circle_rule(m);
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= static_cast<std::size_t>(m);

    // Fixed-size chunks keep the summation order independent of scheduling.
    constexpr std::size_t kChunk = 8192;
    std::size_t chunks = (count + kChunk - 1) / kChunk;
    std::vector<cplx> partial(chunks, cplx(0.0, 0.0));
    parallel_for(chunks, [&](std::size_t c) {
        cplx acc(0.0, 0.0);
        Point p = z;
        std::size_t hi = std::min(count, (c + 1) * kChunk);
        for (std::size_t k = c * kChunk; k < hi; ++k) {
            std::size_t idx = k;
            cplx kern(1.0, 0.0);
            for (int i = 0; i < n; ++i) {
                cplx zeta = circ.nodes[idx % static_cast<std::size_t>(m)];
                idx /= static_cast<std::size_t>(m);
                p[i] = zeta;
                kern *= zeta / (zeta - z[i]);
            }
            acc += u(p) * kern;
        }
        partial[c] = acc;
    });
    cplx sum(0.0, 0.0);
    for (const cplx& v : partial) sum += v;
    return sum / total;
}

/// Beurling-type principal-value transform in variable j,
///   Pi_j[f](z) = (1/2 pi i) PV int_D f(...)/(zeta_j - z_j)^2 dzeta_j ^ dzetabar_j,
/// computed by subtraction: the PV of the constant term vanishes for interior
/// z. This is the z_j-derivative of T_j. Refused for data of unknown
/// smoothness (the PV may diverge).
inline cplx op_Pij(const ScalarFunction& f, int j, const Point& z, const OperatorConfig& cfg) {
    if (f.smoothness() == Smoothness::Unknown)
        throw std::invalid_argument("op_Pij: smoothness unknown, PV integral may diverge");
    if (std::abs(z[j]) >= 1.0) throw OutOfDomainError("op_Pij: z_j not interior");
    const WeightedNodes& rule = detail::cached_disc_rule(cfg.disc_radial, cfg.disc_angular);
    cplx fz = f(z);
    cplx zj = z[j];
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < rule.size(); ++k) {
        cplx zeta = rule.nodes[k];
        cplx d = zeta - zj;
        acc += rule.weights[k] * (f(z.with(j, zeta)) - fz) / (d * d);
    }
    return -acc / kPi;
}

/// Memoized evaluation oracle for z -> T[g](z). The inner Stilde stages are
/// memoized separately, so batch drivers (K compositions, FD stencils,
/// Hoelder sampling) share their quadrature work across points.
inline ScalarFunction make_solution_oracle(const Form01& g, const OperatorConfig& cfg) {
    int n = g.dim();
    auto stildes = std::make_shared<std::vector<ScalarFunction>>();
    for (int j = 0; j < n; ++j) {
        // The data components run without their memos: the quadrature node
        // sets below are huge and rarely revisited, and the Stilde stage memo
        // already deduplicates the expensive work.
        if (g[j].is_zero()) {
            stildes->push_back(ScalarFunction::zero(n));
        } else if (j == 0) {
            stildes->push_back(g[0].unmemoized());
        } else {
            ScalarFunction comp = g[j].unmemoized();
            stildes->push_back(ScalarFunction(
                [comp, j, cfg](const Point& z) { return op_Stilde(comp, j, z, cfg); }, n,
                comp.smoothness(), /*memoize=*/true));
        }
    }
    auto eval = [stildes, n, cfg](const Point& z) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            const ScalarFunction& sj = (*stildes)[static_cast<std::size_t>(j)];
            if (sj.is_zero()) continue;
            auto f = [&](cplx zeta) { return sj(z.with(j, zeta)); };
            acc += cauchy_disc_T(f, z[j], cfg);
        }
        return acc;
    };
    return ScalarFunction(eval, n, Smoothness::Hoelder, /*memoize=*/true);
}

/// Result record for the batch solve driver.
struct SolveDiagnostics {
    double wall_ms = 0.0;
    OperatorConfig settings;
    std::vector<std::string> errors;  // one entry per failed point, "" when ok
};

/// Evaluate T[g] at each point; per-point failures are collected, not fatal.
inline std::pair<std::vector<cplx>, SolveDiagnostics> solve_dbar(
    const Form01& g, const std::vector<Point>& points, const OperatorConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    ScalarFunction u = make_solution_oracle(g, cfg);
    std::vector<cplx> values(points.size(), cplx(0.0, 0.0));
    SolveDiagnostics diag;
    diag.settings = cfg;
    diag.errors.assign(points.size(), "");
    std::mutex mu;
    parallel_for(points.size(), [&](std::size_t i) {
        try {
            values[i] = u(points[i]);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mu);
            diag.errors[i] = e.what();
        }
    });
    diag.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return {std::move(values), std::move(diag)};
}

}  // namespace dbar
