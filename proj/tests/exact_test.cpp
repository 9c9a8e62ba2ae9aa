#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dbar/exact.hpp"
#include "dbar/quadrature.hpp"

using namespace dbar;

namespace {

/// Test-only quadrature oracle for the solid Cauchy transform of a monomial:
/// direct polar discretization of -(1/pi) int_D (f(zeta) - f(z))/(zeta - z) dA
/// plus the analytic constant datum f(z) zbar. Radial panels split at |z| and
/// the angular grid is rotated off arg z, so no node hits the singularity.
cplx brute_T(int a, int b, cplx z) {
    auto f = [&](cplx zeta) {
        cplx v(1.0, 0.0);
        for (int i = 0; i < a; ++i) v *= zeta;
        for (int i = 0; i < b; ++i) v *= std::conj(zeta);
        return v;
    };
    const int angular = 512;
    std::vector<double> rn, rw;
    double rho = std::abs(z);
    if (rho > 1e-12 && rho < 1.0 - 1e-12) {
        detail::append_gauss_panel(0.0, rho, 120, rn, rw);
        detail::append_gauss_panel(rho, 1.0, 120, rn, rw);
    } else {
        detail::append_gauss_panel(0.0, 1.0, 240, rn, rw);
    }
    double offset = std::arg(z == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : z) + kPi / angular;
    cplx fz = f(z);
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < rn.size(); ++i) {
        double r = rn[i];
        cplx ring(0.0, 0.0);
        for (int k = 0; k < angular; ++k) {
            cplx zeta = std::polar(r, offset + kTwoPi * k / angular);
            ring += (f(zeta) - fz) / (zeta - z);
        }
        acc += rw[i] * r * ring * (kTwoPi / angular);
    }
    return -acc / kPi + fz * std::conj(z);
}

MonomialPoly mono1(int a, int b) { return MonomialPoly::monomial(1, {{a, b}}); }

}  // namespace

TEST_CASE("gaussian rational arithmetic") {
    GaussianRational i(Rational(0), Rational(1));
    CHECK(i * i == GaussianRational(Rational(-1)));
    GaussianRational x(Rational(1, 2), Rational(1, 3));
    CHECK(x + (-x) == GaussianRational());
    CHECK(x.divided_by(2) == GaussianRational(Rational(1, 4), Rational(1, 6)));
    CHECK(std::abs(x.to_complex() - cplx(0.5, 1.0 / 3.0)) < 1e-15);
}

TEST_CASE("closed-form T matches the quadrature oracle") {
    std::vector<cplx> pts{cplx(0.0, 0.0), cplx(0.4, 0.2), cplx(-0.6, 0.3), cplx(0.1, -0.7)};
    for (int a = 0; a <= 3; ++a) {
        for (int b = 0; b <= 3; ++b) {
            MonomialPoly tp = exact_T(mono1(a, b), 0);
            for (cplx z : pts) {
                cplx closed = tp.eval(Point{z});
                cplx brute = brute_T(a, b, z);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(std::abs(closed - brute) < 2e-3);
            }
        }
    }
}

TEST_CASE("T is a right inverse of dbar and lands in the kernel of S") {
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; b <= 4; ++b) {
            MonomialPoly p = mono1(a, b);
            MonomialPoly tp = exact_T(p, 0);
            CHECK(exact_dbar(tp)[0] == p);
            CHECK(exact_S(tp, 0).is_zero());
        }
    }
}

TEST_CASE("torus integral K reproduces the holomorphic part") {
    MonomialPoly p = MonomialPoly::monomial(1, {{2, 1}});  // z^2 zbar
    CHECK(exact_K(p) == mono1(1, 0));
    CHECK(exact_K(mono1(0, 1)).is_zero());
    MonomialPoly q = MonomialPoly::monomial(2, {{1, 1}, {3, 0}});
    MonomialPoly expect = MonomialPoly::monomial(2, {{0, 0}, {3, 0}});
    CHECK(exact_K(q) == expect);
}

TEST_CASE("holomorphic derivative") {
    MonomialPoly p = MonomialPoly::monomial(2, {{2, 1}, {0, 1}});
    MonomialPoly expect = MonomialPoly::monomial(2, {{1, 1}, {0, 1}}, GaussianRational(2));
    CHECK(exact_dz(p, 0) == expect);
    CHECK(exact_dz(p, 1).is_zero());
}

TEST_CASE("opT solves dbar u = g and reconstructs u with K") {
    std::vector<MonomialPoly> potentials{
        MonomialPoly::monomial(2, {{0, 1}, {0, 1}}),
        MonomialPoly::monomial(2, {{1, 2}, {2, 1}}) +
            MonomialPoly::monomial(2, {{0, 0}, {0, 3}}, GaussianRational(Rational(-2, 5))),
        MonomialPoly::monomial(3, {{0, 1}, {1, 1}, {0, 2}}),
    };
    for (const MonomialPoly& u : potentials) {
        auto g = exact_dbar(u);
        MonomialPoly tg = exact_opT(g);
        CHECK(exact_dbar(tg) == g);
        CHECK(exact_K(tg).is_zero());
        CHECK(tg + exact_K(u) == u);
    }
}

TEST_CASE("opT rejects non-closed forms with the violating pair") {
    std::vector<MonomialPoly> g{MonomialPoly::monomial(2, {{0, 0}, {0, 1}}), MonomialPoly(2)};
    try {
        exact_opT(g);
        FAIL("expected a closedness violation");
    } catch (const ClosednessViolationError& e) {
        CHECK(e.index_i == 0);
        CHECK(e.index_j == 1);
    }
}

TEST_CASE("text round-trip") {
    MonomialPoly p = MonomialPoly::monomial(2, {{1, 2}, {0, 1}},
                                            GaussianRational(Rational(3, 7), Rational(-1, 2))) +
                     MonomialPoly::monomial(2, {{0, 0}, {2, 0}}, GaussianRational(5));
    std::ostringstream os;
    write_monomial_poly(os, p);
    std::istringstream is("# comment line\n" + os.str());
    CHECK(parse_monomial_poly(is) == p);

    std::istringstream dec("(0 1) -0.5 1.25\n(2 0) 1/3 0\n");
    MonomialPoly q = MonomialPoly::monomial(1, {{0, 1}},
                                            GaussianRational(Rational(-1, 2), Rational(5, 4))) +
                     MonomialPoly::monomial(1, {{2, 0}}, GaussianRational(Rational(1, 3)));
    CHECK(parse_monomial_poly(dec) == q);

    std::istringstream bad("(1 2) 1");
    CHECK_THROWS_AS(parse_monomial_poly(bad), std::invalid_argument);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(parse_monomial_poly(empty), std::invalid_argument);
}
