#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dbar/corpus.hpp"
#include "dbar/henkin.hpp"

using namespace dbar;

namespace {

OperatorConfig small_cfg() {
    OperatorConfig cfg;
    cfg.disc_radial = 48;
    cfg.disc_angular = 96;
    cfg.circle_count = 64;
    cfg.henkin_radial = 64;
    cfg.henkin_angular = 96;
    return cfg;
}

SignTable all_plus(int n) {
    SignTable t;
    t.n = n;
    t.signs.assign(static_cast<std::size_t>(n), 1);
    return t;
}

}  // namespace

TEST_CASE("sector permutation sorts moduli and rejects ties") {
    Point z{cplx(0.2, 0.0), cplx(0.0, 0.8), cplx(0.5, 0.0)};
    SectorPermutation s = sector_of(z);
    CHECK(s.sigma == std::vector<int>{1, 2, 0});
    CHECK(s.margin == doctest::Approx(0.3));
    CHECK_THROWS_AS(sector_of(Point{cplx(0.5, 0.0), cplx(0.0, 0.5)}), SectorTieError);
}

TEST_CASE("term enumeration: counts, ordering, bounds") {
    Point z{cplx(0.2, 0.0), cplx(0.0, 0.8)};
    auto terms2 = henkin_terms(z, sector_of(z));
    CHECK(terms2.size() == 4);  // r=0 with two slots, two singleton pins

    Point w{cplx(0.2, 0.0), cplx(0.0, 0.8), cplx(0.5, 0.0)};
    auto terms3 = henkin_terms(w, sector_of(w));
    CHECK(terms3.size() == 12);  // 3 + 6 + 3

    for (const auto& t : terms3) {
        CHECK(t.r + static_cast<int>(t.K.size()) == 3);
        double expect = 1.0;
        for (int j : t.J) expect = std::min(expect, std::abs(w[j]));
        CHECK(t.bound == doctest::Approx(expect));
        for (std::size_t i = 0; i + 1 < t.J.size(); ++i)
            CHECK(std::abs(w[t.J[i]]) > std::abs(w[t.J[i + 1]]));
    }
}

TEST_CASE("n=1: the sector formula is the solid Cauchy transform") {
    OperatorConfig cfg = small_cfg();
    const TestCase& tc = find_case("mono-n1-mixed");
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.6, 0.1)}) {
        Point p{z};
        cplx h = op_H(tc.g, p, all_plus(1), cfg);
        cplx t = op_T(tc.g, p, cfg);
        CHECK(std::abs(h - t) < 1e-12);
    }
}

TEST_CASE("n=2: sector formula agrees with T on analytic data") {
    OperatorConfig cfg = small_cfg();
    SignTable signs = all_plus(2);

    // g = dzbar_1: T[g] = zbar_1.
    Form01 g1;
    g1.components.push_back(ScalarFunction::constant(cplx(1.0, 0.0), 2));
    g1.components.push_back(ScalarFunction::zero(2));
    // g = dbar(zbar_1 zbar_2).
    Form01 g2;
    g2.components.push_back(ScalarFunction([](const Point& z) { return std::conj(z[1]); }, 2));
    g2.components.push_back(ScalarFunction([](const Point& z) { return std::conj(z[0]); }, 2));

    std::vector<Point> pts{Point{cplx(0.25, 0.1), cplx(-0.4, 0.45)},
                           Point{cplx(0.0, 0.7), cplx(0.3, 0.0)}};
    for (const Point& z : pts) {
        CHECK(std::abs(op_H(g1, z, signs, cfg) - std::conj(z[0])) < 2e-3);
        cplx want = std::conj(z[0]) * std::conj(z[1]);  // T[g2] = zbar1 zbar2
        CHECK(std::abs(op_H(g2, z, signs, cfg) - want) < 2e-3);
    }
}

TEST_CASE("sign calibration finds the all-plus table uniquely") {
    OperatorConfig cfg = small_cfg();
    std::vector<Form01> corpus;
    for (const TestCase& tc : registry())
        if (tc.n == 2 && tc.smooth() && tc.tags.count("zero") == 0) corpus.push_back(tc.g);
    std::vector<Point> pts{Point{cplx(0.25, 0.1), cplx(-0.4, 0.45)},
                           Point{cplx(-0.1, 0.62), cplx(0.33, 0.0)}};
    SignTable table = calibrate_signs(2, corpus, pts, cfg);
    CHECK(table.signs == std::vector<int>{1, 1});
}

TEST_CASE("calibration with an uninformative corpus is ambiguous") {
    OperatorConfig cfg = small_cfg();
    Form01 zero;
    zero.components.push_back(ScalarFunction::zero(2));
    zero.components.push_back(ScalarFunction::zero(2));
    std::vector<Point> pts{Point{cplx(0.25, 0.1), cplx(-0.4, 0.45)}};
    CHECK_THROWS_AS(calibrate_signs(2, {zero}, pts, cfg), CalibrationAmbiguousError);
}

TEST_CASE("model operator P: normalization and sector-tie rejection") {
    OperatorConfig cfg = small_cfg();
    ScalarFunction one = ScalarFunction::constant(cplx(1.0, 0.0), 3);
    cplx a(0.8, 0.0), b(0.1, 0.1);
    cplx z0(0.3, 0.2);
    // q = 1, h == 1, |z| < |a|: P = zbar.
    CHECK(std::abs(op_P(one, {z0}, a, b, cfg) - std::conj(z0)) < 1e-10);
    CHECK_THROWS_AS(op_P(one, {cplx(0.8, 0.0)}, a, b, cfg), SectorTieError);
}
