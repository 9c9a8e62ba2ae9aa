#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbar/exact.hpp"
#include "dbar/field.hpp"

namespace dbar {

/// One verification case: a dbar-closed datum g together with a known solution
/// u_true (dbar u_true = g). Monomial cases also carry the exact polynomials
/// so identities can be checked in rational arithmetic.
struct TestCase {
    std::string id;
    int n = 1;
    Form01 g;
    ScalarFunction u_true;
    std::optional<MonomialPoly> u_poly;
    std::optional<std::vector<MonomialPoly>> g_polys;
    std::set<std::string> tags;          // "smooth", "rough", "zero"
    std::optional<int> rough_axis;       // coordinate singular at z_axis = 1
    std::optional<int> rough_form_axis;  // dzbar index carrying the rough component

    bool smooth() const { return tags.count("smooth") > 0 || tags.count("zero") > 0; }
};

/// Build a case from an exact potential u by differentiating it.
inline TestCase manufactured_case(std::string id, const MonomialPoly& u) {
    TestCase tc;
    tc.id = std::move(id);
    tc.n = u.dim();
    tc.u_poly = u;
    tc.g_polys = exact_dbar(u);
    tc.u_true = u.to_scalar_function().memoized();
    for (const MonomialPoly& comp : *tc.g_polys)
        tc.g.components.push_back(comp.to_scalar_function().memoized());
    tc.g.alpha_class = 1.0;
    tc.tags.insert(u.is_zero() ? "zero" : "smooth");
    return tc;
}

/// Rough datum g = (1 - z_i)^alpha dzbar_j (i != j), which is Hoelder-alpha up
/// to the closed polydisc with its singular set at z_i = 1. The principal
/// branch is well defined there since Re(1 - z_i) >= 0 on the closed disc.
/// Solution u = (1 - z_i)^alpha zbar_j satisfies dbar u = g exactly.
inline TestCase rough_case(std::string id, int n, double alpha, int i, int j) {
    if (n < 2) throw std::invalid_argument("rough_case: needs n >= 2");
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("rough_case: need distinct axes in range");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("rough_case: alpha must be in (0,1)");

    auto branch = [alpha, i](const Point& z) { return std::pow(cplx(1.0, 0.0) - z[i], alpha); };
    TestCase tc;
    tc.id = std::move(id);
    tc.n = n;
    tc.g.alpha_class = alpha;
    for (int k = 0; k < n; ++k) {
        if (k == j) {
            tc.g.components.push_back(
                ScalarFunction(branch, n, Smoothness::Hoelder).memoized());
        } else {
            tc.g.components.push_back(ScalarFunction::zero(n));
        }
    }
    tc.u_true = ScalarFunction(
                    [branch, j](const Point& z) { return branch(z) * std::conj(z[j]); }, n,
                    Smoothness::Hoelder)
                    .memoized();
    tc.tags.insert("rough");
    tc.rough_axis = i;
    tc.rough_form_axis = j;
    return tc;
}

namespace detail {

inline MonomialPoly mono(int dim, std::vector<Exponent> exps, GaussianRational c = {1}) {
    return MonomialPoly::monomial(dim, std::move(exps), std::move(c));
}

}  // namespace detail

/// The fixed case registry used by the verification harness and the CLI.
inline const std::vector<TestCase>& registry() {
    static const std::vector<TestCase> cases = [] {
        using detail::mono;
        std::vector<TestCase> cs;

        cs.push_back(manufactured_case("zero-n2", MonomialPoly(2)));

        // n = 1
        cs.push_back(manufactured_case("mono-n1-conj", mono(1, {{0, 1}})));
        cs.push_back(manufactured_case("mono-n1-mixed", mono(1, {{1, 1}})));
        cs.push_back(manufactured_case(
            "mono-n1-cubic",
            mono(1, {{2, 3}}) + mono(1, {{0, 2}}, GaussianRational(Rational(1, 2)))));

        // n = 2
        cs.push_back(manufactured_case("mono-n2-conj2", mono(2, {{0, 1}, {0, 1}})));
        cs.push_back(manufactured_case("mono-n2-mixed", mono(2, {{1, 1}, {0, 1}})));
        cs.push_back(manufactured_case(
            "mono-n2-deg3",
            mono(2, {{0, 2}, {1, 1}}) + mono(2, {{2, 1}, {0, 0}}, GaussianRational(Rational(-1, 3)))));

        // n = 3
        cs.push_back(manufactured_case("mono-n3-conj3", mono(3, {{0, 1}, {0, 1}, {0, 1}})));
        cs.push_back(manufactured_case("mono-n3-mixed",
                                       mono(3, {{1, 0}, {0, 1}, {0, 1}}) +
                                           mono(3, {{0, 1}, {0, 0}, {1, 1}},
                                                GaussianRational(Rational(1, 2)))));

        // Rough data, n = 2: singular axis z_2, form axis dzbar_1.
        cs.push_back(rough_case("rough-a03", 2, 0.3, 1, 0));
        cs.push_back(rough_case("rough-a05", 2, 0.5, 1, 0));
        cs.push_back(rough_case("rough-a09", 2, 0.9, 1, 0));

        return cs;
    }();
    return cases;
}

inline const TestCase& find_case(const std::string& id) {
    for (const TestCase& tc : registry())
        if (tc.id == id) return tc;
    throw std::invalid_argument("unknown case id: " + id);
}

}  // namespace dbar
