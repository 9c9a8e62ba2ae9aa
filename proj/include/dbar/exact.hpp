#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dbar/common.hpp"
#include "dbar/field.hpp"

namespace dbar {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex number with rational real and imaginary parts.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
    GaussianRational(long r) : re(r) {}

    bool is_zero() const { return re == 0 && im == 0; }

    GaussianRational operator+(const GaussianRational& o) const { return {re + o.re, im + o.im}; }
    GaussianRational operator-(const GaussianRational& o) const { return {re - o.re, im - o.im}; }
    GaussianRational operator-() const { return {-re, -im}; }
    GaussianRational operator*(const GaussianRational& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }

    GaussianRational divided_by(long d) const { return {re / d, im / d}; }

    cplx to_complex() const {
        return cplx(static_cast<double>(re), static_cast<double>(im));
    }
};

/// Per-variable exponents of a monomial z^a zbar^b.
struct Exponent {
    int a = 0;  // power of z_i
    int b = 0;  // power of zbar_i
    auto operator<=>(const Exponent&) const = default;
};

/// Exact finite sum of monomials prod z_i^{a_i} zbar_i^{b_i} with
/// Gaussian-rational coefficients. Zero coefficients are never stored.
class MonomialPoly {
  public:
    using Key = std::vector<Exponent>;
    using Terms = std::map<Key, GaussianRational>;

    explicit MonomialPoly(int dim = 1) : dim_(dim) {
        if (dim < 1) throw std::invalid_argument("MonomialPoly: dim must be >= 1");
    }

    static MonomialPoly monomial(int dim, const Key& exps, GaussianRational coeff = {1}) {
        MonomialPoly p(dim);
        p.add_term(exps, coeff);
        return p;
    }

    static MonomialPoly constant(int dim, GaussianRational coeff) {
        return monomial(dim, Key(static_cast<std::size_t>(dim)), std::move(coeff));
    }

    int dim() const { return dim_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Key& exps, const GaussianRational& coeff) {
        if (static_cast<int>(exps.size()) != dim_)
            throw std::invalid_argument("MonomialPoly: exponent vector has wrong dimension");
        for (const Exponent& e : exps)
            if (e.a < 0 || e.b < 0)
                throw std::invalid_argument("MonomialPoly: negative exponent");
        if (coeff.is_zero()) return;
        auto it = terms_.find(exps);
        if (it == terms_.end()) {
            terms_.emplace(exps, coeff);
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    MonomialPoly operator+(const MonomialPoly& o) const {
        check_dim(o);
        MonomialPoly out = *this;
        for (const auto& [k, c] : o.terms_) out.add_term(k, c);
        return out;
    }

    MonomialPoly operator-(const MonomialPoly& o) const {
        check_dim(o);
        MonomialPoly out = *this;
        for (const auto& [k, c] : o.terms_) out.add_term(k, -c);
        return out;
    }

    MonomialPoly operator*(const MonomialPoly& o) const {
        check_dim(o);
        MonomialPoly out(dim_);
        for (const auto& [k1, c1] : terms_) {
            for (const auto& [k2, c2] : o.terms_) {
                Key k = k1;
                for (int i = 0; i < dim_; ++i) {
                    k[static_cast<std::size_t>(i)].a += k2[static_cast<std::size_t>(i)].a;
                    k[static_cast<std::size_t>(i)].b += k2[static_cast<std::size_t>(i)].b;
                }
                out.add_term(k, c1 * c2);
            }
        }
        return out;
    }

    bool operator==(const MonomialPoly& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

    /// Floating evaluation at a point (powers by iterated multiply).
    cplx eval(const Point& z) const {
        cplx acc(0.0, 0.0);
        for (const auto& [k, c] : terms_) {
            cplx t = c.to_complex();
            for (int i = 0; i < dim_; ++i) {
                cplx zi = z[i], zbi = std::conj(zi);
                for (int p = 0; p < k[static_cast<std::size_t>(i)].a; ++p) t *= zi;
                for (int p = 0; p < k[static_cast<std::size_t>(i)].b; ++p) t *= zbi;
            }
            acc += t;
        }
        return acc;
    }

    /// Wrap as an evaluation oracle for the numeric operators. Coefficients
    /// are converted to complex doubles once, up front.
    ScalarFunction to_scalar_function() const {
        if (is_zero()) return ScalarFunction::zero(dim_);
        std::vector<std::pair<Key, cplx>> terms;
        terms.reserve(terms_.size());
        for (const auto& [k, c] : terms_) terms.emplace_back(k, c.to_complex());
        int d = dim_;
        auto eval = [terms = std::move(terms), d](const Point& z) {
            cplx acc(0.0, 0.0);
            for (const auto& [k, c] : terms) {
                cplx t = c;
                for (int i = 0; i < d; ++i) {
                    cplx zi = z[i], zbi = std::conj(zi);
                    for (int p = 0; p < k[static_cast<std::size_t>(i)].a; ++p) t *= zi;
                    for (int p = 0; p < k[static_cast<std::size_t>(i)].b; ++p) t *= zbi;
                }
                acc += t;
            }
            return acc;
        };
        return ScalarFunction(std::move(eval), dim_, Smoothness::Smooth);
    }

  private:
    void check_dim(const MonomialPoly& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("MonomialPoly: dimension mismatch");
    }

    int dim_;
    Terms terms_;
};

// ---------------------------------------------------------------------------
// Exact operator calculus (residue calculus on monomials; 0-based variable j)
// ---------------------------------------------------------------------------

/// Boundary Cauchy integral S_j on monomials: the substitution zbar_j = 1/zeta_j
/// on dD leaves z_j^{a-b} when a >= b and kills the term otherwise.
inline MonomialPoly exact_S(const MonomialPoly& p, int j) {
    MonomialPoly out(p.dim());
    for (const auto& [k, c] : p.terms()) {
        const Exponent& e = k[static_cast<std::size_t>(j)];
        if (e.a < e.b) continue;
        MonomialPoly::Key nk = k;
        nk[static_cast<std::size_t>(j)] = {e.a - e.b, 0};
        out.add_term(nk, c);
    }
    return out;
}

/// Solid Cauchy transform T_j on monomials:
///   z^a zbar^b  ->  (z^a zbar^{b+1} - [a >= b+1] z^{a-b-1}) / (b+1).
/// Pinned by the quadrature oracle together with the consistency checks
/// dbar(T_j p) = p and S_j(T_j p) = 0.
inline MonomialPoly exact_T(const MonomialPoly& p, int j) {
    MonomialPoly out(p.dim());
    for (const auto& [k, c] : p.terms()) {
        const Exponent& e = k[static_cast<std::size_t>(j)];
        GaussianRational coeff = c.divided_by(e.b + 1);
        MonomialPoly::Key nk = k;
        nk[static_cast<std::size_t>(j)] = {e.a, e.b + 1};
        out.add_term(nk, coeff);
        if (e.a >= e.b + 1) {
            MonomialPoly::Key hk = k;
            hk[static_cast<std::size_t>(j)] = {e.a - e.b - 1, 0};
            out.add_term(hk, -coeff);
        }
    }
    return out;
}

/// Cauchy torus integral K on monomials: per variable, z^a zbar^b -> z^{a-b}
/// when a >= b, otherwise the term dies.
inline MonomialPoly exact_K(const MonomialPoly& p) {
    MonomialPoly out(p.dim());
    for (const auto& [k, c] : p.terms()) {
        MonomialPoly::Key nk = k;
        bool alive = true;
        for (int i = 0; i < p.dim(); ++i) {
            Exponent& e = nk[static_cast<std::size_t>(i)];
            if (e.a < e.b) {
                alive = false;
                break;
            }
            e = {e.a - e.b, 0};
        }
        if (alive) out.add_term(nk, c);
    }
    return out;
}

/// Exact holomorphic derivative dp/dz_j.
inline MonomialPoly exact_dz(const MonomialPoly& p, int j) {
    MonomialPoly out(p.dim());
    for (const auto& [k, c] : p.terms()) {
        const Exponent& e = k[static_cast<std::size_t>(j)];
        if (e.a == 0) continue;
        MonomialPoly::Key nk = k;
        nk[static_cast<std::size_t>(j)] = {e.a - 1, e.b};
        out.add_term(nk, c * GaussianRational(e.a));
    }
    return out;
}

/// Exact dbar: component j is dp/dzbar_j.
inline std::vector<MonomialPoly> exact_dbar(const MonomialPoly& p) {
    std::vector<MonomialPoly> g;
    for (int j = 0; j < p.dim(); ++j) {
        MonomialPoly comp(p.dim());
        for (const auto& [k, c] : p.terms()) {
            const Exponent& e = k[static_cast<std::size_t>(j)];
            if (e.b == 0) continue;
            MonomialPoly::Key nk = k;
            nk[static_cast<std::size_t>(j)] = {e.a, e.b - 1};
            comp.add_term(nk, c * GaussianRational(e.b));
        }
        g.push_back(std::move(comp));
    }
    return g;
}

/// Exact canonical solution T[g] = sum_j T_j Stilde_j [g_j]. Requires exact
/// dbar-closedness; the violating index pair is reported otherwise.
inline MonomialPoly exact_opT(const std::vector<MonomialPoly>& g) {
    if (g.empty()) throw std::invalid_argument("exact_opT: empty form");
    int n = static_cast<int>(g.size());
    int dim = g.front().dim();
    if (dim != n) throw std::invalid_argument("exact_opT: component count must equal dimension");
    for (int i = 0; i < n; ++i) {
        auto di = exact_dbar(g[static_cast<std::size_t>(i)]);
        for (int j = i + 1; j < n; ++j) {
            auto dj = exact_dbar(g[static_cast<std::size_t>(j)]);
            if (!(di[static_cast<std::size_t>(j)] == dj[static_cast<std::size_t>(i)])) {
                std::ostringstream os;
                os << "exact_opT: form is not dbar-closed at pair (" << i << "," << j << ")";
                throw ClosednessViolationError(os.str(), i, j);
            }
        }
    }
    MonomialPoly acc(dim);
    for (int j = 0; j < n; ++j) {
        MonomialPoly chained = g[static_cast<std::size_t>(j)];
        for (int i = 0; i < j; ++i) chained = exact_S(chained, i);
        acc = acc + exact_T(chained, j);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Text serialization: one term per line,
//   (a1 b1 | a2 b2 | ...) re_rational im_rational
// e.g.  (0 1 | 0 1) 1 0   is  zbar_1 zbar_2.
// ---------------------------------------------------------------------------

inline void write_monomial_poly(std::ostream& os, const MonomialPoly& p) {
    for (const auto& [k, c] : p.terms()) {
        os << "(";
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) os << " | ";
            os << k[i].a << " " << k[i].b;
        }
        os << ") " << c.re << " " << c.im << "\n";
    }
}

/// Coefficient tokens may be integers, fractions "p/q", or finite decimals.
inline Rational parse_coefficient(const std::string& s) {
    std::size_t dot = s.find('.');
    if (dot == std::string::npos) return Rational(s);
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("MonomialPoly parse: bad coefficient: " + s);
    Rational den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(digits) / den;
}

inline MonomialPoly parse_monomial_poly(std::istream& is) {
    std::vector<std::pair<MonomialPoly::Key, GaussianRational>> parsed;
    int dim = -1;
    std::string line;
    while (std::getline(is, line)) {
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t open = line.find('(', start);
        std::size_t close = line.find(')', start);
        if (open == std::string::npos || close == std::string::npos || close < open)
            throw std::invalid_argument("MonomialPoly parse: malformed term line: " + line);
        std::string exps = line.substr(open + 1, close - open - 1);
        for (char& ch : exps)
            if (ch == '|') ch = ' ';
        std::istringstream es(exps);
        MonomialPoly::Key key;
        int a, b;
        while (es >> a >> b) key.push_back({a, b});
        if (key.empty()) throw std::invalid_argument("MonomialPoly parse: empty exponent list");
        if (dim < 0) dim = static_cast<int>(key.size());
        if (static_cast<int>(key.size()) != dim)
            throw std::invalid_argument("MonomialPoly parse: inconsistent dimension");
        std::istringstream cs(line.substr(close + 1));
        std::string re_s, im_s;
        if (!(cs >> re_s >> im_s))
            throw std::invalid_argument("MonomialPoly parse: missing coefficient: " + line);
        parsed.emplace_back(std::move(key),
                            GaussianRational(parse_coefficient(re_s), parse_coefficient(im_s)));
    }
    if (parsed.empty()) throw std::invalid_argument("MonomialPoly parse: no terms");
    MonomialPoly p(dim);
    for (auto& [k, c] : parsed) p.add_term(k, c);
    return p;
}

}  // namespace dbar
