#include "qsr/composite_noise.hpp"

#include <catch2/catch.hpp>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace qsr;

namespace {

std::vector<double> draw_noise(const CompositeNoise& noise, std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> samples(n);
    for (auto& s : samples) s = sample_noise(noise, rng);
    return samples;
}

double sample_variance(const std::vector<double>& samples) {
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    return var / static_cast<double>(samples.size() - 1);
}

}  // namespace

TEST_CASE("basic noise structural variance", "[composite]") {
    SECTION("noise-free limit") {
        const auto noise = basic_noise(1.0, 20.0, StableParams{2.0, 0.0, 0.0, 0.0});
        CHECK(noise.gauss_var <= 1e-17);
        CHECK(noise.channel_scale == 1.0);
    }
    SECTION("unsqueezed vacuum") {
        const auto noise = basic_noise(1.0, 0.0, StableParams{2.0, 0.0, 0.0, 0.0});
        CHECK(noise.gauss_var == 0.5);
        CHECK(noise.channel_scale == 1.0);
    }
    SECTION("total variance matches the structural formula") {
        // eta (e^{-2r}/2 + channel var) + (1 - eta)/2, evaluated in long double
        const auto noise = basic_noise(0.8, 1.0, StableParams::gaussian_law(0.0, 1.0));
        const long double expected = 0.8L * (std::exp(-2.0L) / 2.0L + 1.0L) + 0.1L;
        const auto var = noise.variance();
        REQUIRE(var.has_value());
        CHECK(*var == Approx(static_cast<double>(expected)).epsilon(1e-12));
        CHECK(*var == Approx(0.9541341132946451).epsilon(1e-12));

        const auto samples = draw_noise(noise, 1000000, 21);
        CHECK(sample_variance(samples) == Approx(*var).epsilon(0.03));
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(basic_noise(0.0, 1.0, StableParams{}), std::invalid_argument);
        CHECK_THROWS_AS(basic_noise(1.1, 1.0, StableParams{}), std::invalid_argument);
        CHECK_THROWS_AS(basic_noise(0.5, -0.1, StableParams{}), std::invalid_argument);
    }
}

TEST_CASE("cvqkd noise structural variance", "[composite]") {
    SECTION("all-noise-vanishing limit") {
        const auto noise = cvqkd_noise(1.0, 1.0, 1.0, 20.0, StableParams{2.0, 0.0, 0.0, 0.0});
        CHECK(noise.gauss_var <= 1e-17);
        CHECK(noise.channel_scale == 1.0);
    }
    SECTION("unsqueezed vacuum") {
        const auto noise = cvqkd_noise(1.0, 1.0, 1.0, 0.0, StableParams{2.0, 0.0, 0.0, 0.0});
        CHECK(noise.gauss_var == 0.5);
        CHECK(noise.channel_scale == 1.0);
    }
    SECTION("attack parameters enter the gaussian part") {
        const auto noise = cvqkd_noise(0.9, 0.8, 1.5, 0.5, StableParams{2.0, 0.0, 0.0, 0.0});
        const long double expected = (0.8L * (0.9L * 1.5L * std::exp(-1.0L) + 0.45L + 0.1L) + 0.2L) / 2.0L;
        CHECK(noise.gauss_var == Approx(static_cast<double>(expected)).epsilon(1e-12));
        CHECK(noise.channel_scale == Approx(std::sqrt(0.9 * 0.8 * 1.5)).epsilon(1e-15));

        const auto samples = draw_noise(noise, 1000000, 22);
        CHECK(sample_variance(samples) == Approx(noise.gauss_var).epsilon(0.03));
    }
    SECTION("parameter validation") {
        CHECK_THROWS_AS(cvqkd_noise(1.0, 1.0, 0.9, 0.0, StableParams{}), std::invalid_argument);
        CHECK_THROWS_AS(cvqkd_noise(1.2, 1.0, 1.0, 0.0, StableParams{}), std::invalid_argument);
    }
}

TEST_CASE("sample_noise laws", "[composite]") {
    SECTION("degenerate composite is a constant") {
        const CompositeNoise noise{0.0, 1.0, StableParams{1.5, 0.0, 0.0, 2.0}};
        RngStream rng(23);
        for (int i = 0; i < 50; ++i) CHECK(sample_noise(noise, rng) == 2.0);
    }
    SECTION("independent variances add") {
        const CompositeNoise noise{1.0, 1.0, StableParams::gaussian_law(0.0, 1.0)};
        const auto samples = draw_noise(noise, 1000000, 24);
        CHECK(sample_variance(samples) == Approx(2.0).margin(0.02));
    }
    SECTION("empirical cf matches noise_cf for a cauchy channel") {
        const CompositeNoise noise{0.25, 1.0, StableParams::cauchy_law(0.0, 1.0)};
        const auto samples = draw_noise(noise, 1000000, 25);
        for (double w : {0.5, 1.0, 2.0}) {
            const auto ecf = oracle::empirical_cf(samples, w);
            const auto target = noise_cf(noise, w);
            CHECK(std::abs(ecf.value.real() - target.real()) < 3.0 * ecf.se_re + 1e-12);
            CHECK(std::abs(ecf.value.imag() - target.imag()) < 3.0 * ecf.se_im + 1e-12);
        }
    }
}

TEST_CASE("noise_cf factorization", "[composite]") {
    SECTION("value at zero") {
        const CompositeNoise noise{0.7, 0.9, StableParams{1.5, 0.0, 1.0, 0.3}};
        const auto value = noise_cf(noise, 0.0);
        CHECK(value.real() == 1.0);
        CHECK(value.imag() == 0.0);
    }
    SECTION("degenerate gaussian part leaves the channel cf") {
        const CompositeNoise noise{0.0, 0.8, StableParams{1.5, 0.0, 1.0, 0.3}};
        for (double w : {0.4, 1.0, 3.0}) {
            const auto value = noise_cf(noise, w);
            const auto expected = stable_cf(StableParams{1.5, 0.0, 1.0, 0.3}, 0.8 * w);
            CHECK(value.real() == Approx(expected.real()).epsilon(1e-12));
            CHECK(value.imag() == Approx(expected.imag()).epsilon(1e-12));
        }
    }
    SECTION("basic model with gaussian channel") {
        // both factors evaluated independently: exp{-(e^{-2}/2 + 1)/2} at omega = 1
        const auto noise = basic_noise(1.0, 1.0, StableParams::gaussian_law(0.0, 1.0));
        const auto value = noise_cf(noise, 1.0);
        const long double expected = std::exp(-(std::exp(-2.0L) / 2.0L + 1.0L) / 2.0L);
        CHECK(value.real() == Approx(static_cast<double>(expected)).epsilon(1e-12));
        CHECK(value.imag() == Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("noise_cdf values", "[composite]") {
    SECTION("symmetric noise is half at its center") {
        const CompositeNoise noise{0.25, 1.5, StableParams::cauchy_law(2.0, 1.0)};
        CHECK(noise_cdf(noise, noise.mean()) == Approx(0.5).margin(1e-6));
    }
    SECTION("all-gaussian shortcut matches the cdf composition") {
        const auto noise = basic_noise(0.9, 0.5, StableParams::gaussian_law(0.4, 1.3));
        const double mean = noise.mean();
        const double sd = std::sqrt(*noise.variance());
        for (double x : {-2.0, 0.0, 0.7, 3.1}) {
            CHECK(noise_cdf(noise, x) == Approx(gaussian_cdf((x - mean) / sd)).margin(1e-9));
        }
    }
    SECTION("gaussian plus cauchy matches the convolution oracle") {
        const CompositeNoise noise{0.5, 1.0, StableParams::cauchy_law(0.0, 1.0)};
        const double expected =
            oracle::convolved_cdf(0.5, 1.0, [](double t) { return oracle::cauchy_cdf(t, 0.0, 1.0); });
        CHECK(noise_cdf(noise, 1.0) == Approx(expected).margin(1e-5));
    }
    SECTION("alpha = 1.5 channel against sampled quantiles") {
        const CompositeNoise noise{0.3, 1.2, StableParams{1.5, 0.0, 0.8, -0.4}};
        auto samples = draw_noise(noise, 200000, 26);
        std::sort(samples.begin(), samples.end());
        for (double q : {0.1, 0.35, 0.6, 0.9}) {
            const double x = samples[static_cast<std::size_t>(q * static_cast<double>(samples.size()))];
            CHECK(noise_cdf(noise, x) == Approx(q).margin(0.004));
        }
    }
    SECTION("custom laws go through the inversion") {
        const CompositeNoise uniform_noise{0.3, 0.8, uniform_channel_law(0.5, 1.2)};
        const CompositeNoise exp_noise{0.3, 0.8, shifted_exponential_law(0.5, 1.2)};
        for (double x : {-1.0, 0.2, 0.4, 1.5}) {
            // scaled channel: F_{c*X}(t) = F_X(t / c) for c > 0
            const double expected_u =
                oracle::convolved_cdf(0.3, x, [](double t) { return oracle::uniform_cdf(t / 0.8, 0.5, 1.2); });
            CHECK(noise_cdf(uniform_noise, x) == Approx(expected_u).margin(1e-5));
            const double expected_e = oracle::convolved_cdf(
                0.3, x, [](double t) { return oracle::shifted_exponential_cdf(t / 0.8, 0.5, 1.2); });
            CHECK(noise_cdf(exp_noise, x) == Approx(expected_e).margin(1e-5));
        }
    }
    SECTION("fully degenerate noise is a step") {
        const CompositeNoise noise{0.0, 1.0, StableParams{2.0, 0.0, 0.0, 1.5}};
        CHECK(noise_cdf(noise, 1.4999) == 0.0);
        CHECK(noise_cdf(noise, 1.5) == 1.0);
        CHECK(noise_cdf(noise, 1.6) == 1.0);
    }
}

TEST_CASE("noise_cdf properties", "[composite][property]") {
    const CompositeNoise cases[] = {
        {0.5, 1.0, StableParams::cauchy_law(0.3, 0.7)},
        {0.25, 0.9, StableParams{1.5, 0.0, 1.1, -0.6}},
        {0.1, 1.3, StableParams{1.9, 0.4, 0.5, 0.0}},
        {0.4, 0.8, CustomLaw(uniform_channel_law(-0.2, 0.9))},
    };
    for (const auto& noise : cases) {
        SECTION("nondecreasing with limits, scale " + std::to_string(noise.channel_scale)) {
            double prev = -0.1;
            for (double x = -6.0; x <= 6.0; x += 0.4) {
                const double f = noise_cdf(noise, x);
                CHECK(f >= prev - 1e-6);
                CHECK(f >= 0.0);
                CHECK(f <= 1.0);
                prev = f;
            }
            CHECK(noise_cdf(noise, -1000.0) < 2e-3);
            CHECK(noise_cdf(noise, 1000.0) > 1.0 - 2e-3);
        }
    }
}

TEST_CASE("sampling and cdf agree", "[composite][property]") {
    const CompositeNoise noise{0.25, 1.0, StableParams::cauchy_law(0.0, 0.8)};
    auto samples = draw_noise(noise, 1000000, 27);
    std::sort(samples.begin(), samples.end());
    // KS computed on a quantile grid; the cdf is smooth so this tracks the sup
    double d = 0.0;
    for (int i = 1; i < 400; ++i) {
        const double q = static_cast<double>(i) / 400.0;
        const double x = samples[static_cast<std::size_t>(q * static_cast<double>(samples.size()))];
        d = std::max(d, std::abs(noise_cdf(noise, x) - q));
    }
    CHECK(d < 0.002);
}

TEST_CASE("finite-variance bookkeeping", "[composite][property]") {
    const CompositeNoise noise{0.3, 0.8, CustomLaw(uniform_channel_law(0.5, 1.2))};
    const auto var = noise.variance();
    REQUIRE(var.has_value());
    CHECK(*var == Approx(0.3 + 0.64 * 1.44).epsilon(1e-12));
    const auto samples = draw_noise(noise, 1000000, 28);
    CHECK(sample_variance(samples) == Approx(*var).epsilon(0.03));

    const CompositeNoise heavy_tail{0.1, 1.1, StableParams{1.5, 0.0, 1.0, 0.0}};
    CHECK_FALSE(heavy_tail.variance().has_value());
}

TEST_CASE("noise cf degenerates to a pure phase in the vanishing limit", "[composite][property]") {
    const double a = 0.7;
    const auto basic = basic_noise(0.999999, 12.0, StableParams{1.5, 0.0, 1e-9, a});
    const auto qkd = cvqkd_noise(0.999999, 0.999999, 1.000001, 12.0, StableParams::cauchy_law(a, 1e-9));
    for (double w : {0.5, 1.0, 2.0, 4.0}) {
        CHECK(std::abs(noise_cf(basic, w) - std::polar(1.0, a * w)) < 1e-3);
        CHECK(std::abs(noise_cf(qkd, w) - std::polar(1.0, a * w)) < 1e-3);
    }
}

TEST_CASE("noise_cdf error reporting", "[composite]") {
    SECTION("custom law without a cf cannot be inverted") {
        CustomLaw law;
        law.mean = 0.0;
        law.variance = 1.0;
        law.sampler = [](RngStream& rng) { return rng.gaussian(); };
        const CompositeNoise noise{0.0, 1.0, law};
        CHECK_THROWS_AS(noise_cdf(noise, 0.0), std::invalid_argument);
    }
    SECTION("non-decaying cf is reported") {
        CustomLaw law;
        law.mean = 0.0;
        law.variance = 0.0;
        law.sampler = [](RngStream&) { return 0.0; };
        law.cf = [](double) { return std::complex<double>(1.0, 0.0); };
        const CompositeNoise noise{0.0, 1.0, law};
        CHECK_THROWS_AS(noise_cdf(noise, 0.0), InversionError);
    }
    SECTION("skewed heavy-tail channels are rejected") {
        const CompositeNoise noise{0.5, 1.0, StableParams{0.8, 0.5, 1.0, 0.0}};
        CHECK_THROWS_AS(noise_cdf(noise, 0.0), std::invalid_argument);
    }
}
