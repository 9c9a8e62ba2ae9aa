#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dbar/holder.hpp"

using namespace dbar;

namespace {

ScalarFunction branch_pow(double alpha) {
    return ScalarFunction(
        [alpha](const Point& z) { return std::pow(cplx(1.0, 0.0) - z[1], alpha); }, 2,
        Smoothness::Hoelder);
}

}  // namespace

TEST_CASE("seminorm of the branch function at its own exponent is finite and ordered") {
    ScalarFunction f = branch_pow(0.5);
    PairSampler sampler;
    sampler.n = 2;
    sampler.rough_axis = 1;
    auto pairs = sampler.generate(1.0 / 64, 200, 0);
    std::size_t skipped = 0;
    double at_own = holder_seminorm(f, pairs, 0.5, &skipped);
    double at_low = holder_seminorm(f, pairs, 0.3, &skipped);
    CHECK(at_own > 0.5);    // anchored pairs realize ~s^0.5 / s^0.5
    CHECK(at_own < 10.0);
    CHECK(at_low < at_own);  // smaller exponent divides by a larger power
    CHECK_THROWS_AS(holder_seminorm(f, pairs, 1.5, nullptr), std::invalid_argument);
}

TEST_CASE("sampler: pair distance, domain, and determinism") {
    PairSampler sampler;
    sampler.n = 2;
    sampler.rough_axis = 1;
    sampler.seed = 777;
    auto a = sampler.generate(1.0 / 32, 60, 3);
    auto b = sampler.generate(1.0 / 32, 60, 3);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() > 30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].first[0] == b[i].first[0]);
        CHECK(a[i].second[1] == b[i].second[1]);
        double d2 = 0.0;
        for (int k = 0; k < 2; ++k) d2 += std::norm(a[i].first[k] - a[i].second[k]);
        CHECK(std::sqrt(d2) == doctest::Approx(1.0 / 32).epsilon(1e-9));
        CHECK(a[i].first.in_closed_polydisc());
        CHECK(a[i].second.in_closed_polydisc());
    }
}

TEST_CASE("exponent recovery for branch data") {
    std::vector<double> scales{1.0 / 256, 1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8};
    for (double alpha : {0.3, 0.5, 0.9}) {
        PairSampler sampler;
        sampler.n = 2;
        sampler.rough_axis = 1;
        HolderEstimate est = estimate_exponent(branch_pow(alpha), sampler, scales, 80);
        CAPTURE(alpha);
        CHECK_FALSE(est.degenerate);
        CHECK(est.alpha_hat == doctest::Approx(alpha).epsilon(0.08));
        CHECK(est.r2 > 0.95);
        CHECK(est.seminorm_at(alpha) > 0.0);
    }
}

TEST_CASE("smooth data estimates as Lipschitz-or-better") {
    ScalarFunction f([](const Point& z) { return z[0] * std::conj(z[1]); }, 2);
    PairSampler sampler;
    sampler.n = 2;
    std::vector<double> scales{1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16};
    HolderEstimate est = estimate_exponent(f, sampler, scales, 80);
    CHECK(est.alpha_hat > 0.9);
}

TEST_CASE("constants degenerate to the capped exponent") {
    ScalarFunction f = ScalarFunction::constant(cplx(2.0, 0.0), 2);
    PairSampler sampler;
    sampler.n = 2;
    std::vector<double> scales{1.0 / 64, 1.0 / 32, 1.0 / 16};
    HolderEstimate est = estimate_exponent(f, sampler, scales, 40);
    CHECK(est.degenerate);
    CHECK(est.alpha_hat == doctest::Approx(1.05));
}

TEST_CASE("out-of-range scales are rejected") {
    ScalarFunction f = ScalarFunction::constant(cplx(0.0, 0.0), 1);
    PairSampler sampler;
    CHECK_THROWS_AS(estimate_exponent(f, sampler, {0.5}, 10), std::invalid_argument);
}
