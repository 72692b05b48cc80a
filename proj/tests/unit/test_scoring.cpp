#include <doctest.h>

#include <cmath>
#include <random>

#include "exposure/errors.hpp"
#include "exposure/scoring.hpp"

using namespace exposure;

namespace {

// Long-double evaluation of the weighting function, independent of the engine.
long double pi_oracle(long double p, long double g) {
    const long double a = std::pow(p, g), b = std::pow(1.0L - p, g);
    return a / std::pow(a + b, 1.0L / g);
}

}  // namespace

TEST_CASE("probability weighting against the oracle") {
    CHECK(probability_weight(0.0, 0.61) == 0.0);
    CHECK(probability_weight(1.0, 0.61) == 1.0);
    // 50-digit reference values.
    CHECK(probability_weight(0.5, 0.61) == doctest::Approx(0.42063935433575615).epsilon(1e-14));
    CHECK(probability_weight(0.1, 0.61) == doctest::Approx(0.18630256637717415).epsilon(1e-14));
    CHECK(std::abs(probability_weight(0.5, 0.61) - 0.42063) < 1e-4);
    CHECK(std::abs(probability_weight(0.1, 0.61) - 0.18629) < 1e-4);
    for (int i = 0; i <= 1000; ++i) {
        const double p = i / 1000.0;
        CHECK(probability_weight(p, 0.61) == doctest::Approx(double(pi_oracle(p, 0.61L))).epsilon(1e-13));
    }
    CHECK(probability_weight(0.3, 1.0) == doctest::Approx(0.3));
    CHECK_THROWS_AS(probability_weight(1.2, 0.61), DomainError);
    CHECK_THROWS_AS(probability_weight(0.5, 0.0), DomainError);
}

TEST_CASE("weighting is strictly increasing and over/underweights at the ends") {
    double prev = probability_weight(0.0, 0.61);
    for (int i = 1; i <= 1000; ++i) {
        const double w = probability_weight(i / 1000.0, 0.61);
        CHECK(w > prev);
        prev = w;
    }
    for (int i = 1; i <= 30; ++i) CHECK(probability_weight(i / 100.0, 0.61) > i / 100.0);
    for (int i = 70; i <= 99; ++i) CHECK(probability_weight(i / 100.0, 0.61) < i / 100.0);
}

TEST_CASE("prospect value examples") {
    CHECK(prospect_value(0.0, 0.5).perceived == 0.0);
    const auto gain = prospect_value(100.0, 0.5);
    const auto loss = prospect_value(-100.0, 0.5);
    CHECK(gain.perceived == doctest::Approx(24.205268370050967).epsilon(1e-13));
    CHECK(loss.perceived == doctest::Approx(-54.46185383261468).epsilon(1e-13));
    CHECK(std::abs(gain.perceived - 24.20) < 0.02);
    CHECK(std::abs(loss.perceived + 54.46) < 0.05);
    CHECK(loss.perceived / gain.perceived == doctest::Approx(-2.25).epsilon(1e-15));
    CHECK(gain.weighted_probability == probability_weight(0.5, 0.61));
}

TEST_CASE("property: loss aversion ratio is exactly -lambda when alpha = beta") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(1e-3, 1e6), ps(1e-6, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = xs(rng), p = ps(rng);
        const double ratio = prospect_value(-x, p).perceived / prospect_value(x, p).perceived;
        CHECK(std::abs(ratio + 2.25) < 1e-12);
    }
}

TEST_CASE("property: diminishing sensitivity on gains") {
    const double h = 1e-3;
    double prev_slope = INFINITY;
    for (int i = 2; i <= 200; ++i) {
        const double x = i;
        const double slope = (prospect_value(x + h, 0.5).perceived - prospect_value(x - h, 0.5).perceived) / (2 * h);
        CHECK(slope < prev_slope * (1 + 1e-6));
        prev_slope = slope;
    }
}

TEST_CASE("likelihood examples") {
    const auto one = likelihood(1, 1, 1, 1);
    CHECK(one.raw == 1.0);
    CHECK(one.bounded == 0.5);
    const auto zero = likelihood(0, 0.7, 0.2, 0.3);
    CHECK(zero.raw == 0.0);
    CHECK(zero.bounded == 0.0);
    const auto ex = likelihood(0.8, 0.5, 0.9, 0.6);
    CHECK(std::abs(ex.raw - 0.4L / 0.54L) < 1e-12);
    CHECK(std::abs(ex.raw - 0.74074) < 1e-5);
    CHECK(ex.bounded == doctest::Approx(0.42553191489361702).epsilon(1e-13));
    CHECK(ex.contributions.e_factor == 0.8);
    CHECK(ex.contributions.t_factor == 0.9);

    // Floor applies to T and U only.
    const auto floored = likelihood(1, 1, 0, 0);
    CHECK(floored.raw == doctest::Approx(1.0 / (0.01 * 0.01)));
    LikelihoodParams p;
    p.exp_e = 2;
    CHECK(likelihood(0.5, 1, 1, 1, p).raw == 0.25);
}

TEST_CASE("property: likelihood monotone in each variable over a random grid") {
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> unit(0.0, 1.0), expo(0.2, 3.0);
    for (int i = 0; i < 10000; ++i) {
        LikelihoodParams p{expo(rng), expo(rng), expo(rng), expo(rng), 0.01};
        const double e = unit(rng), m = unit(rng), t = unit(rng), u = unit(rng), d = unit(rng);
        const double base = likelihood(e, m, t, u, p).raw;
        CHECK(likelihood(std::min(1.0, e + d), m, t, u, p).raw >= base);
        CHECK(likelihood(e, std::min(1.0, m + d), t, u, p).raw >= base);
        CHECK(likelihood(e, m, std::min(1.0, t + d), u, p).raw <= base);
        CHECK(likelihood(e, m, t, std::min(1.0, u + d), p).raw <= base);
        const auto r = likelihood(e, m, t, u, p);
        CHECK(r.bounded >= 0.0);
        CHECK(r.bounded < 1.0);
    }
    // With unit exponents and T = U = 1, raw is the plain product.
    for (int i = 0; i < 1000; ++i) {
        const double e = unit(rng), m = unit(rng);
        CHECK(likelihood(e, m, 1, 1).raw == e * m);
    }
}

TEST_CASE("bounded transform is strictly increasing in raw") {
    double prev = -1;
    for (int i = 0; i <= 1000; ++i) {
        const double b = likelihood(1, 1, 1.0 / (1 + i * 0.01), 1).bounded;
        CHECK(b > prev);
        prev = b;
    }
}

TEST_CASE("legacy ISUNF product") {
    CHECK(isunf_likelihood({1, 1, 1, 1, 1}) == 1.0);
    CHECK(isunf_likelihood({1, 0, 1, 1, 1}) == 0.0);
    CHECK(isunf_likelihood({0.5, 0.5, 1, 1, 1}) == 0.25);
}

TEST_CASE("risk_value composes the weighting with the bounded likelihood") {
    const auto l = likelihood(0.8, 0.5, 0.9, 0.6);
    CHECK(risk_value(0.0, l).perceived == 0.0);
    const auto r = risk_value(-1000.0, l);
    const long double expected =
        -2.25L * pi_oracle(static_cast<long double>(l.bounded), 0.61L) * std::pow(1000.0L, 0.88L);
    CHECK(r.perceived == doctest::Approx(double(expected)).epsilon(1e-13));
    CHECK(r.perceived == doctest::Approx(-376.0642370113976).epsilon(1e-10));
    const auto higher = likelihood(0.9, 0.9, 0.5, 0.5);
    CHECK(risk_value(-1000.0, higher).perceived < r.perceived);
}

TEST_CASE("parameter files") {
    const auto defaults = parse_params("{}");
    CHECK(defaults.cpt == CptParams{});
    CHECK(defaults.likelihood == LikelihoodParams{});
    const auto p = parse_params(R"({"cpt": {"gamma": 0.7, "lambda": 2}, "likelihood": {"exp_t": 2, "floor_epsilon": 0.05}})");
    CHECK(p.cpt.gamma_weight == 0.7);
    CHECK(p.cpt.lambda == 2.0);
    CHECK(p.cpt.alpha == 0.88);
    CHECK(p.likelihood.exp_t == 2.0);
    CHECK(p.likelihood.floor_epsilon == 0.05);
    CHECK_THROWS_AS(parse_params(R"({"cpt": {"gamma": 1.5}})"), RangeError);
    CHECK_THROWS_AS(parse_params(R"({"likelihood": {"exp_e": 0}})"), RangeError);
    CHECK_THROWS_AS(parse_params(R"({"likelihood": {"floor_epsilon": 0.5}})"), RangeError);
    CHECK_THROWS_AS(parse_params(R"({"cpt": {"delta": 1}})"), SchemaError);
    CHECK_THROWS_AS(parse_params("{"), SyntaxError);
    const CptParams low_lambda{0.88, 0.88, 0.5, 0.61};
    CHECK_THROWS_AS(low_lambda.validate(), DomainError);
}
