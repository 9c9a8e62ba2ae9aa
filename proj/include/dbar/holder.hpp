#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dbar/common.hpp"
#include "dbar/field.hpp"
#include "dbar/henkin.hpp"

namespace dbar {

/// Empirically fitted Hoelder exponent with its fit diagnostics.
/// alpha_hat is capped at 1.05: estimates above Lipschitz are meaningless
/// here and flag a degenerate case.
struct HolderEstimate {
    double alpha_hat = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> bins;  // (distance scale, sup |delta f|)
    std::size_t pair_count = 0;
    bool degenerate = false;
    std::vector<double> dropped_scales;

    /// Finite-sample seminorm at exponent alpha: max over bins of sup/scale^alpha.
    double seminorm_at(double alpha) const {
        double s = 0.0;
        for (auto [scale, sup] : bins) s = std::max(s, sup / std::pow(scale, alpha));
        return s;
    }
};

/// Max over pairs of |f(x) - f(y)| / |x - y|^alpha, Euclidean distance on
/// C^n = R^{2n}. Coincident pairs are skipped; the skip count is reported.
inline double holder_seminorm(const ScalarFunction& f,
                              const std::vector<std::pair<Point, Point>>& pairs, double alpha,
                              std::size_t* skipped = nullptr) {
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("holder_seminorm: alpha must be in (0,1)");
    double best = 0.0;
    std::size_t skip = 0;
    for (const auto& [x, y] : pairs) {
        double d2 = 0.0;
        for (int i = 0; i < x.dim(); ++i) d2 += std::norm(x[i] - y[i]);
        double d = std::sqrt(d2);
        if (d < 1e-15) {
            ++skip;
            continue;
        }
        best = std::max(best, std::abs(f(x) - f(y)) / std::pow(d, alpha));
    }
    if (skipped) *skipped = skip;
    return best;
}

/// Pair generator for exponent estimation. Uniform pairs probe the bulk;
/// when a rough boundary point is known, half the pairs are anchored near it
/// and step inward along the singular axis (uniform sampling almost never
/// probes the singular set that determines the exponent). Optionally
/// restricted to one sector.
struct PairSampler {
    int n = 1;
    double max_modulus = 0.995;
    std::optional<int> rough_axis;      // singular boundary point at z_axis = 1
    double anchored_modulus = 0.9;      // non-singular coordinates of anchored pairs
    std::optional<SectorPermutation> sector;
    double sector_tie_tol = 1e-3;
    std::uint64_t seed = 12345;

    bool in_sector(const Point& p) const {
        if (!sector) return true;
        try {
            SectorPermutation s = sector_of(p, sector_tie_tol);
            return s.sigma == sector->sigma;
        } catch (const SectorTieError&) {
            return false;
        }
    }

    Point random_point(SplitMix64& rng, double cap) const {
        Point p;
        p.coords.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int tries = 0; tries < 100; ++tries) {
                cplx c(rng.uniform(-cap, cap), rng.uniform(-cap, cap));
                if (std::abs(c) <= cap) {
                    p[i] = c;
                    break;
                }
            }
        }
        return p;
    }

    /// Pairs at Euclidean distance exactly `scale`.
    std::vector<std::pair<Point, Point>> generate(double scale, int count,
                                                  std::uint64_t scale_salt) const {
        SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ull * (scale_salt + 1)));
        std::vector<std::pair<Point, Point>> out;
        static constexpr double kAnchorOffsets[] = {0.0, 0.5, 1.0, 2.0, 4.0};
        int anchored_made = 0;
        for (int k = 0; k < count; ++k) {
            bool anchored = rough_axis && (k % 2 == 0);
            if (anchored) {
                double rho = scale * kAnchorOffsets[(anchored_made++) % 5];
                if (rho + scale > 1.0) rho = 0.0;
                Point x = random_point(rng, anchored_modulus);
                x[*rough_axis] = cplx(1.0 - rho, 0.0);
                Point y = x;
                y[*rough_axis] = cplx(1.0 - rho - scale, 0.0);
                if (in_sector(x) && in_sector(y)) out.emplace_back(std::move(x), std::move(y));
                continue;
            }
            bool made = false;
            for (int tries = 0; tries < 50 && !made; ++tries) {
                Point x = random_point(rng, max_modulus);
                std::vector<double> dir(static_cast<std::size_t>(2 * n));
                double norm2 = 0.0;
                for (double& d : dir) {
                    d = rng.uniform(-1.0, 1.0);
                    norm2 += d * d;
                }
                if (norm2 < 1e-12) continue;
                double inv = scale / std::sqrt(norm2);
                Point y = x;
                for (int i = 0; i < n; ++i)
                    y[i] += cplx(dir[static_cast<std::size_t>(2 * i)] * inv,
                                 dir[static_cast<std::size_t>(2 * i + 1)] * inv);
                if (!y.in_closed_polydisc(0.0)) continue;
                if (!in_sector(x) || !in_sector(y)) continue;
                out.emplace_back(std::move(x), std::move(y));
                made = true;
            }
        }
        return out;
    }
};

/// Dyadic-bin sup fit of the Hoelder exponent: for each scale s record
/// sup |f(x) - f(y)| over sampled pairs at distance s, then fit the slope of
/// log sup against log s. The bin sup is the robust finite-sample analogue of
/// the seminorm's sup functional.
inline HolderEstimate estimate_exponent(const ScalarFunction& f, const PairSampler& sampler,
                                        const std::vector<double>& scales, int pairs_per_scale) {
    for (double s : scales)
        if (s < std::pow(2.0, -12) - 1e-15 || s > 0.25 + 1e-15)
            throw std::invalid_argument("estimate_exponent: scales must lie in [2^-12, 2^-2]");

    HolderEstimate est;
    for (std::size_t si = 0; si < scales.size(); ++si) {
        double s = scales[si];
        auto pairs = sampler.generate(s, pairs_per_scale, si);
        if (static_cast<int>(pairs.size()) < std::max(8, pairs_per_scale / 4)) {
            est.dropped_scales.push_back(s);
            continue;
        }
        double sup = 0.0;
        std::vector<double> deltas(pairs.size(), 0.0);
        parallel_for(pairs.size(), [&](std::size_t i) {
            deltas[i] = std::abs(f(pairs[i].first) - f(pairs[i].second));
        });
        for (double d : deltas) sup = std::max(sup, d);
        est.pair_count += pairs.size();
        est.bins.emplace_back(s, sup);
    }
    std::sort(est.bins.begin(), est.bins.end());

    bool all_tiny = true;
    for (auto [s, sup] : est.bins)
        if (sup > 1e-13) all_tiny = false;
    if (all_tiny || est.bins.size() < 2) {
        est.degenerate = true;
        est.alpha_hat = 1.05;
        est.r2 = 0.0;
        return est;
    }

    // Least squares on (log s, log sup), skipping empty bins.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int m = 0;
    for (auto [s, sup] : est.bins) {
        if (sup <= 1e-300) continue;
        double x = std::log(s), y = std::log(sup);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    double denom = m * sxx - sx * sx;
    double slope = (m * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / m;
    double intercept = (sy - slope * sx) / m;
    double ss_res = 0.0;
    for (auto [s, sup] : est.bins) {
        if (sup <= 1e-300) continue;
        double pred = intercept + slope * std::log(s);
        double resid = std::log(sup) - pred;
        ss_res += resid * resid;
    }
    est.alpha_hat = std::clamp(slope, 0.0, 1.05);
    est.r2 = (ss_tot > 1e-300) ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return est;
}

}  // namespace dbar
