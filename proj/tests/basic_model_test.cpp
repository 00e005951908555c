#include "qsr/basic_model.hpp"

#include <catch2/catch.hpp>
#include <cmath>

#include "oracles.hpp"

using namespace qsr;

namespace {

BasicModelParams near_noiseless(double location) {
    BasicModelParams p;
    p.alpha_x = 1.1;
    p.theta = 1.6;
    p.r = 20.0;
    p.eta = 1.0;
    p.channel_noise = StableParams{2.0, 0.0, 0.0, location};
    return p;
}

}  // namespace

TEST_CASE("basic trials in the noise-free limit", "[basic_model]") {
    SECTION("subthreshold signal never crosses the threshold") {
        RngStream rng(41);
        const auto params = near_noiseless(0.0);
        for (int i = 0; i < 2000; ++i) CHECK(run_trial(params, rng).y == 0);
    }
    SECTION("a location inside the interval separates the symbols") {
        RngStream rng(42);
        const auto params = near_noiseless(1.6);
        for (int i = 0; i < 2000; ++i) {
            const auto trial = run_trial(params, rng);
            CHECK(trial.y == trial.s);
        }
    }
}

TEST_CASE("monte carlo matches the analytic crossing probability", "[basic_model]") {
    BasicModelParams params = near_noiseless(0.0);
    params.channel_noise = StableParams::gaussian_law(0.0, 1.0);
    RngStream rng(43);
    std::uint64_t ones = 0, s1 = 0;
    for (int i = 0; i < 1000000; ++i) {
        const auto trial = run_trial(params, rng);
        if (trial.s == 1) {
            ++s1;
            ones += trial.y;
        }
    }
    const double expected = 1.0 - static_cast<double>(oracle::gaussian_cdf_series(0.5L));
    CHECK(static_cast<double>(ones) / static_cast<double>(s1) == Approx(expected).margin(0.002));
}

TEST_CASE("conditional probabilities", "[basic_model]") {
    SECTION("mirror symmetry at a centered threshold") {
        BasicModelParams params;
        params.alpha_x = 1.1;
        params.theta = 0.0;  // supra-threshold: allowed, only flagged
        params.r = 0.3;
        params.channel_noise = StableParams::gaussian_law(0.0, 0.8);
        CHECK_FALSE(params.subthreshold());
        const auto probs = conditional_probs(params);
        CHECK(probs[1][1] == Approx(probs[0][0]).margin(1e-12));
        CHECK(probs[0][1] == Approx(probs[1][0]).margin(1e-12));
    }
    SECTION("all-gaussian case against the series oracle") {
        BasicModelParams params = near_noiseless(0.0);
        params.channel_noise = StableParams::gaussian_law(0.0, 1.0);
        const auto probs = conditional_probs(params);
        // effective sd = sqrt(e^{-40}/2 + 1) ~ 1, thresholds 0.5 and 2.7
        CHECK(probs[1][1] == Approx(1.0 - static_cast<double>(oracle::gaussian_cdf_series(0.5L))).margin(1e-9));
        CHECK(probs[0][1] == Approx(1.0 - static_cast<double>(oracle::gaussian_cdf_series(2.7L))).margin(1e-9));
        CHECK(probs[0][0] + probs[0][1] == 1.0);
        CHECK(probs[1][0] + probs[1][1] == 1.0);
    }
    SECTION("locations outside the interval decouple the output as noise vanishes") {
        BasicModelParams params = near_noiseless(0.0);
        params.channel_noise = StableParams{2.0, 0.0, 5e-19, 0.0};
        const auto probs = conditional_probs(params);
        CHECK(probs[1][1] == Approx(0.0).margin(1e-9));
        CHECK(probs[0][1] == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("monte carlo agrees with conditional_probs", "[basic_model][property]") {
    RngStream param_rng(44);
    for (int set = 0; set < 6; ++set) {
        BasicModelParams params;
        params.alpha_x = 0.6 + 0.8 * param_rng.uniform();
        params.theta = params.alpha_x + 0.3 + param_rng.uniform();
        params.r = 2.0 * param_rng.uniform();
        params.eta = 0.7 + 0.3 * param_rng.uniform();
        params.p_s1 = 0.35 + 0.3 * param_rng.uniform();
        if (set % 2 == 0)
            params.channel_noise = StableParams::gaussian_law(2.0 * param_rng.uniform() - 1.0, 0.3 + param_rng.uniform());
        else
            params.channel_noise = StableParams::cauchy_law(2.0 * param_rng.uniform() - 1.0, 0.2 + param_rng.uniform());

        const auto analytic = conditional_probs(params);
        RngStream rng(45, static_cast<std::uint64_t>(set));
        const std::uint64_t trials = 1000000;
        const auto counts = run_batch(params, trials, rng);
        INFO("set " << set);
        for (int s = 0; s < 2; ++s) {
            const double n_s = static_cast<double>(counts.counts[s][0] + counts.counts[s][1]);
            for (int y = 0; y < 2; ++y) {
                const double empirical = static_cast<double>(counts.counts[s][y]) / n_s;
                const double p = analytic[s][y];
                const double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n_s);
                CHECK(std::abs(empirical - p) <= 4.0 * se + 1e-6);
            }
        }
    }
}

TEST_CASE("chebyshev envelope bounds the probability difference", "[basic_model][property]") {
    // finite-variance noise, location below the interval:
    // p(0|0) - p(0|1) <= sigma^2 / eps^2 with eps = (theta - sqrt(eta)(alpha_x + mu)) / 2
    RngStream param_rng(46);
    for (int set = 0; set < 12; ++set) {
        BasicModelParams params;
        params.alpha_x = 0.6 + 0.8 * param_rng.uniform();
        params.theta = params.alpha_x + 0.4 + param_rng.uniform();
        params.r = 3.0 * param_rng.uniform();
        params.eta = 0.7 + 0.3 * param_rng.uniform();
        const double mu = params.theta - params.alpha_x - (0.05 + 1.5 * param_rng.uniform());
        const double sd = 0.05 + 0.8 * param_rng.uniform();
        const double var = sd * sd;
        switch (set % 3) {
            case 0: params.channel_noise = StableParams::gaussian_law(mu, var); break;
            case 1: params.channel_noise = uniform_channel_law(mu, sd); break;
            default: params.channel_noise = shifted_exponential_law(mu, sd); break;
        }

        const double root_eta = std::sqrt(params.eta);
        const double eps = (params.theta - root_eta * params.alpha_x - root_eta * mu) / 2.0;
        REQUIRE(eps > 0.0);
        const double sigma_sq = params.eta * (std::exp(-2.0 * params.r) / 2.0 + var) + (1.0 - params.eta) / 2.0;
        const auto probs = conditional_probs(params);
        const double diff = probs[0][0] - probs[1][0];
        CHECK(diff <= sigma_sq / (eps * eps) + 1e-9);
    }
}

TEST_CASE("heaviside tie maps to one", "[basic_model]") {
    CHECK(decode_threshold(1.5, 1.5) == 1);
    CHECK(decode_threshold(std::nextafter(1.5, 0.0), 1.5) == 0);

    // an exact atom at theta - sqrt(eta) alpha_x through the full trial path
    CustomLaw atom;
    atom.mean = 0.5;
    atom.variance = 0.0;
    atom.sampler = [](RngStream&) { return 0.5; };
    BasicModelParams params;
    params.alpha_x = 1.0;
    params.theta = 1.5;
    params.r = 1000.0;  // e^{-2r} underflows: the gaussian part is exactly zero
    params.eta = 1.0;
    params.channel_noise = atom;
    RngStream rng(47);
    int seen_one = 0;
    for (int i = 0; i < 500; ++i) {
        const auto trial = run_trial(params, rng);
        if (trial.s == 1) {
            ++seen_one;
            CHECK(trial.received == 1.5);
            CHECK(trial.y == 1);
        } else {
            CHECK(trial.y == 0);
        }
    }
    CHECK(seen_one > 0);
}

TEST_CASE("basic model parameter validation", "[basic_model]") {
    BasicModelParams params;
    params.alpha_x = -1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.alpha_x = 1.1;
    params.p_s1 = 1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.p_s1 = 0.5;
    params.eta = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
