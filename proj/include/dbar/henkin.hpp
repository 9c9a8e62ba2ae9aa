#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dbar/cauchy.hpp"
#include "dbar/common.hpp"
#include "dbar/field.hpp"
#include "dbar/quadrature.hpp"

namespace dbar {

/// The permutation sorting coordinate moduli strictly decreasing, plus the
/// smallest gap between consecutive moduli. Valid only off sector boundaries.
struct SectorPermutation {
    std::vector<int> sigma;  // |z_{sigma[0]}| > |z_{sigma[1]}| > ...
    double margin = 0.0;
};

/// One term of the sector-restricted Henkin sum: coordinates in J are pinned
/// at z, the complement shares a common modulus t <= bound, and component
/// g_{K[s]} carries the area factor.
struct HenkinTerm {
    int r = 0;                  // |J|
    std::vector<int> J;         // pinned coordinates, decreasing |z| order
    std::vector<int> K;         // complement, increasing index order
    int s = 0;                  // index into K of the d^2 zeta slot
    double bound = 1.0;         // common-radius upper limit (1 when J is empty)
};

/// Calibrated orientation constants: one sign per pinned-set size r.
struct SignTable {
    int n = 0;
    std::vector<int> signs;  // signs[r] in {-1, +1}, r = 0 .. n-1

    int sign(int r) const { return signs[static_cast<std::size_t>(r)]; }
};

/// Sort coordinates by strictly decreasing modulus. Two moduli within
/// tie_tol put z on a sector boundary, where the decomposition is invalid;
/// such points are rejected, never perturbed silently.
inline SectorPermutation sector_of(const Point& z, double tie_tol = 1e-9) {
    int n = z.dim();
    SectorPermutation sec;
    sec.sigma.resize(static_cast<std::size_t>(n));
    std::iota(sec.sigma.begin(), sec.sigma.end(), 0);
    std::stable_sort(sec.sigma.begin(), sec.sigma.end(),
                     [&](int a, int b) { return std::abs(z[a]) > std::abs(z[b]); });
    sec.margin = 2.0;
    for (int i = 0; i + 1 < n; ++i) {
        double gap = std::abs(z[sec.sigma[static_cast<std::size_t>(i)]]) -
                     std::abs(z[sec.sigma[static_cast<std::size_t>(i + 1)]]);
        if (gap <= tie_tol) {
            std::ostringstream os;
            os << "sector_of: moduli of coordinates " << sec.sigma[static_cast<std::size_t>(i)]
               << " and " << sec.sigma[static_cast<std::size_t>(i + 1)]
               << " coincide within " << tie_tol;
            throw SectorTieError(os.str());
        }
        sec.margin = std::min(sec.margin, gap);
    }
    if (n == 1) sec.margin = 1.0 - std::abs(z[0]);
    return sec;
}

/// Enumerate the nonvanishing terms at z: every pinned set J of size
/// r = 0 .. n-1 taken in decreasing-modulus order (the only order whose
/// skeleton region is nonempty), with one term per complement slot s.
/// The common-radius bound is min_{j in J} |z_j|, or 1 for J empty.
inline std::vector<HenkinTerm> henkin_terms(const Point& z, const SectorPermutation& sector) {
    int n = z.dim();
    std::vector<HenkinTerm> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        int r = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) ++r;
        if (r == n) continue;
        HenkinTerm base;
        base.r = r;
        for (int pos = 0; pos < n; ++pos) {
            int idx = sector.sigma[static_cast<std::size_t>(pos)];
            if (mask & (1u << idx)) base.J.push_back(idx);  // decreasing |z| automatically
        }
        for (int i = 0; i < n; ++i)
            if (!(mask & (1u << i))) base.K.push_back(i);
        base.bound = 1.0;
        for (int j : base.J) base.bound = std::min(base.bound, std::abs(z[j]));
        for (int s = 0; s < n - r; ++s) {
            HenkinTerm t = base;
            t.s = s;
            out.push_back(std::move(t));
        }
    }
    return out;
}

namespace detail {

/// Solid Cauchy transform over the sub-disc |zeta| <= rho with second-order
/// singularity removal when the pole is inside (mirroring cauchy_disc_T, so
/// the two agree bit-for-bit at rho = 1):
///   (1/pi) int_{|zeta|<=rho} f(zeta)/(zeta - w) dA.
inline cplx scaled_solid_cauchy(const std::function<cplx(cplx)>& f, cplx w, double rho,
                                const OperatorConfig& cfg) {
    const WeightedNodes& rule = cached_disc_rule(cfg.disc_radial, cfg.disc_angular);
    double rho2 = rho * rho;
    cplx acc(0.0, 0.0);
    if (std::abs(w) < rho) {
        cplx fw = f(w);
        cplx c = dbar_slice_fd(f, w);
        cplx wb = std::conj(w);
        for (std::size_t k = 0; k < rule.size(); ++k) {
            cplx zeta = rho * rule.nodes[k];
            acc += (rho2 * rule.weights[k]) *
                   (f(zeta) - fw - c * (std::conj(zeta) - wb)) / (zeta - w);
        }
        // Over the sub-disc, (1/pi) int dA/(zeta - w) = -conj(w) and
        // (1/pi) int (zetabar - wbar)/(zeta - w) dA = conj(w)^2 / 2, both
        // independent of rho for |w| < rho.
        return acc / kPi - fw * wb + c * wb * wb / 2.0;
    }
    for (std::size_t k = 0; k < rule.size(); ++k) {
        cplx zeta = rho * rule.nodes[k];
        acc += (rho2 * rule.weights[k]) * f(zeta) / (zeta - w);
    }
    return acc / kPi;
}

/// Common-radius skeleton integral shared by the Henkin terms and the model
/// operator P. Over t in [0, bound] and q angles,
///   (2/m^q) sum_t w_t t^q sum_angles prod_{i != s} e^{i theta_i}
///       f(t e^{i theta_1}, ..., t e^{i theta_q}) / prod_i (t e^{i theta_i} - w_i),
/// which is the pullback of the kernel form with the d^2 factor in slot s.
/// Each angle grid is rotated off arg(w_i); the radial rule is graded at
/// every |w_i| where the kernel crosses its pole radius.
inline cplx skeleton_integral(const std::function<cplx(const std::vector<cplx>&)>& f,
                              const std::vector<cplx>& w, int s, double bound,
                              const OperatorConfig& cfg) {
    int q = static_cast<int>(w.size());
    std::vector<double> exclusions;
    for (const cplx& wi : w) {
        double r = std::abs(wi);
        if (r < bound) exclusions.push_back(r);
    }
    RadialNodes radial = radial_profile_nodes(bound, cfg.henkin_radial, exclusions);
    int m = cfg.henkin_angular;

    std::vector<double> offsets(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i)
        offsets[static_cast<std::size_t>(i)] = std::arg(w[static_cast<std::size_t>(i)]) + kPi / m;

    std::size_t angle_count = 1;
    for (int i = 0; i < q; ++i) angle_count *= static_cast<std::size_t>(m);

    std::vector<cplx> phase(static_cast<std::size_t>(q) * static_cast<std::size_t>(m));
    for (int i = 0; i < q; ++i)
        for (int l = 0; l < m; ++l)
            phase[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(l)] =
                std::polar(1.0, offsets[static_cast<std::size_t>(i)] + kTwoPi * l / m);

    cplx total(0.0, 0.0);
    std::vector<cplx> row(static_cast<std::size_t>(q) * static_cast<std::size_t>(m));
    std::vector<cplx> zeta(static_cast<std::size_t>(q));
    for (std::size_t rt = 0; rt < radial.size(); ++rt) {
        double t = radial.nodes[rt];
        for (int i = 0; i < q; ++i) {
            for (int l = 0; l < m; ++l) {
                std::size_t idx = static_cast<std::size_t>(i) * m + static_cast<std::size_t>(l);
                cplx node = t * phase[idx];
                cplx kern = 1.0 / (node - w[static_cast<std::size_t>(i)]);
                if (i != s) kern *= phase[idx];
                row[idx] = kern;
            }
        }
        cplx acc(0.0, 0.0);
        for (std::size_t a = 0; a < angle_count; ++a) {
            std::size_t idx = a;
            cplx kern(1.0, 0.0);
            for (int i = 0; i < q; ++i) {
                std::size_t l = idx % static_cast<std::size_t>(m);
                idx /= static_cast<std::size_t>(m);
                zeta[static_cast<std::size_t>(i)] =
                    t * phase[static_cast<std::size_t>(i) * m + l];
                kern *= row[static_cast<std::size_t>(i) * m + l];
            }
            acc += f(zeta) * kern;
        }
        total += radial.weights[rt] * std::pow(t, q) * acc;
    }
    return total * 2.0 / std::pow(static_cast<double>(m), q);
}

}  // namespace detail

/// Evaluate one Henkin term (unsigned). Single free variables reduce to a
/// solid Cauchy transform over the sub-disc of radius `bound` and use the
/// subtraction datum; larger skeletons use the common-radius tensor rule.
inline cplx eval_henkin_term(const Form01& g, const Point& z, const HenkinTerm& term,
                             const OperatorConfig& cfg) {
    int q = static_cast<int>(term.K.size());
    int ks = term.K[static_cast<std::size_t>(term.s)];
    const ScalarFunction& comp = g[ks];
    if (comp.is_zero()) return cplx(0.0, 0.0);

    if (q == 1) {
        auto f = [&](cplx zeta) { return comp(z.with(ks, zeta)); };
        return detail::scaled_solid_cauchy(f, z[ks], term.bound, cfg);
    }

    std::vector<cplx> w(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) w[static_cast<std::size_t>(i)] = z[term.K[static_cast<std::size_t>(i)]];
    auto f = [&](const std::vector<cplx>& zeta) {
        Point p = z;
        for (int i = 0; i < q; ++i) p[term.K[static_cast<std::size_t>(i)]] = zeta[static_cast<std::size_t>(i)];
        return comp(p);
    };
    return detail::skeleton_integral(f, w, term.s, term.bound, cfg);
}

/// Henkin's solution operator H[g](z) = - sum over terms of the calibrated
/// sign times the term value. Agrees with T on sector interiors.
inline cplx op_H(const Form01& g, const Point& z, const SignTable& signs,
                 const OperatorConfig& cfg) {
    SectorPermutation sec = sector_of(z);
    cplx acc(0.0, 0.0);
    for (const HenkinTerm& term : henkin_terms(z, sec)) {
        const ScalarFunction& comp = g[term.K[static_cast<std::size_t>(term.s)]];
        if (comp.is_zero()) continue;
        acc += static_cast<double>(signs.sign(term.r)) * eval_henkin_term(g, z, term, cfg);
    }
    return -acc;
}

/// Search the 2^n sign assignments (n, r) -> +-1 for the unique one making H
/// agree with T on the calibration corpus. Zero or multiple admissible
/// assignments raise calibration-ambiguous (the paper fixes the constants
/// only up to "an integer depending on n, r").
inline SignTable calibrate_signs(int n, const std::vector<Form01>& corpus,
                                 const std::vector<Point>& points, const OperatorConfig& cfg,
                                 double tol = 2e-2) {
    if (corpus.empty()) throw std::invalid_argument("calibrate_signs: empty corpus");
    if (points.empty()) throw std::invalid_argument("calibrate_signs: no calibration points");

    // Per (case, point): the r-grouped term sums and the T reference value.
    struct Sample {
        std::vector<cplx> group;  // sum of term values with |J| = r
        cplx t_value;
    };
    std::vector<Sample> samples;
    for (const Form01& g : corpus) {
        for (const Point& z : points) {
            Sample smp;
            smp.group.assign(static_cast<std::size_t>(n), cplx(0.0, 0.0));
            SectorPermutation sec = sector_of(z);
            for (const HenkinTerm& term : henkin_terms(z, sec)) {
                const ScalarFunction& comp = g[term.K[static_cast<std::size_t>(term.s)]];
                if (comp.is_zero()) continue;
                smp.group[static_cast<std::size_t>(term.r)] += eval_henkin_term(g, z, term, cfg);
            }
            smp.t_value = op_T(g, z, cfg);
            samples.push_back(std::move(smp));
        }
    }

    std::vector<SignTable> admissible;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        SignTable table;
        table.n = n;
        for (int r = 0; r < n; ++r) table.signs.push_back((mask & (1u << r)) ? -1 : 1);
        double worst = 0.0;
        for (const Sample& smp : samples) {
            cplx h(0.0, 0.0);
            for (int r = 0; r < n; ++r)
                h -= static_cast<double>(table.signs[static_cast<std::size_t>(r)]) *
                     smp.group[static_cast<std::size_t>(r)];
            worst = std::max(worst, std::abs(h - smp.t_value));
        }
        if (worst < tol) admissible.push_back(std::move(table));
    }
    if (admissible.size() != 1) {
        std::ostringstream os;
        os << "calibrate_signs: " << admissible.size()
           << " admissible assignments at tolerance " << tol << " (enlarge the corpus)";
        throw CalibrationAmbiguousError(os.str());
    }
    return admissible.front();
}

/// The model operator of the sector analysis,
///   P[h](z, a, b) over |zeta_1| = ... = |zeta_q| <= |a|,
/// normalized so that q = 1, h == 1 gives conj(z). The point (z, a, b) must
/// lie in an open sector: the moduli |z_1|, ..., |z_q|, |a| pairwise distinct.
inline cplx op_P(const ScalarFunction& h, const std::vector<cplx>& z, cplx a, cplx b,
                 const OperatorConfig& cfg, double tie_tol = 1e-9) {
    int q = static_cast<int>(z.size());
    if (h.dim() != q + 2) throw std::invalid_argument("op_P: h must live on D^q x D x D");
    std::vector<double> moduli;
    for (const cplx& zi : z) moduli.push_back(std::abs(zi));
    moduli.push_back(std::abs(a));
    std::sort(moduli.begin(), moduli.end());
    for (std::size_t i = 0; i + 1 < moduli.size(); ++i)
        if (moduli[i + 1] - moduli[i] <= tie_tol)
            throw SectorTieError("op_P: point lies on a sector boundary");

    if (q == 1) {
        auto f = [&](cplx zeta) {
            Point p({zeta, a, b});
            return h(p);
        };
        return -detail::scaled_solid_cauchy(f, z[0], std::abs(a), cfg);
    }
    auto f = [&](const std::vector<cplx>& zeta) {
        Point p;
        p.coords = zeta;
        p.coords.push_back(a);
        p.coords.push_back(b);
        return h(p);
    };
    return -detail::skeleton_integral(f, z, /*s=*/0, std::abs(a), cfg);
}

}  // namespace dbar
