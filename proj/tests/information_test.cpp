#include "qsr/information.hpp"

#include <catch2/catch.hpp>
#include <cmath>
#include <vector>

#include "qsr/rng.hpp"
#include "oracles.hpp"

using namespace qsr;

TEST_CASE("mutual information closed cases", "[information]") {
    SECTION("perfect binary channel carries one bit") {
        CHECK(mutual_information({{0.5, 0.0}, {0.0, 0.5}}) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("product joint carries nothing") {
        CHECK(mutual_information({{0.25, 0.25}, {0.25, 0.25}}) == 0.0);
        CHECK(mutual_information({{0.06, 0.14}, {0.24, 0.56}}) == Approx(0.0).margin(1e-12));
    }
    SECTION("binary symmetric channel at crossover 0.11") {
        // frozen from the long-double entropy oracle: 1 - H2(0.11)
        const long double expected = 1.0L - oracle::binary_entropy(0.11L);
        CHECK(static_cast<double>(expected) == Approx(0.500084041835472).epsilon(1e-12));
        CHECK(mutual_information({{0.445, 0.055}, {0.055, 0.445}}) ==
              Approx(static_cast<double>(expected)).epsilon(1e-12));
    }
    SECTION("rejects non-normalized or negative input") {
        CHECK_THROWS_AS(mutual_information({{0.5, 0.4}, {0.0, 0.0}}), std::invalid_argument);
        CHECK_THROWS_AS(mutual_information({{0.7, -0.2}, {0.25, 0.25}}), std::invalid_argument);
        CHECK_THROWS_AS(mutual_information({{0.5, 0.5}, {0.5}}), std::invalid_argument);
    }
}

TEST_CASE("joint counts plumbing", "[information]") {
    SECTION("diagonal counts carry one bit") {
        JointCounts counts(2);
        counts.counts[0][0] = 5000;
        counts.counts[1][1] = 5000;
        counts.total = 10000;
        CHECK(estimate_mi(counts) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("uniform counts carry nothing") {
        JointCounts counts(2);
        counts.counts = {{{2500, 2500, 0}, {2500, 2500, 0}}};
        counts.total = 10000;
        CHECK(estimate_mi(counts) == Approx(0.0).margin(1e-12));
    }
    SECTION("merge is entrywise") {
        JointCounts a(3), b(3);
        a.add(0, 2);
        a.add(1, 1);
        b.add(0, 2);
        b.add(1, 0);
        a.merge(b);
        CHECK(a.total == 4);
        CHECK(a.counts[0][2] == 2);
        CHECK(a.counts[1][0] == 1);
        CHECK(a.counts[1][1] == 1);
        CHECK_THROWS_AS(a.merge(JointCounts(2)), std::invalid_argument);
    }
    SECTION("empty counts are rejected") {
        CHECK_THROWS_AS(estimate_mi(JointCounts(2)), std::invalid_argument);
    }
}

TEST_CASE("plug-in estimate converges to the bsc value", "[information]") {
    // draw (s, y) pairs from the crossover-0.11 channel and compare to the oracle
    const double expected = static_cast<double>(1.0L - oracle::binary_entropy(0.11L));
    RngStream rng(31);
    JointCounts counts(2);
    for (int i = 0; i < 1000000; ++i) {
        const int s = rng.bernoulli(0.5) ? 1 : 0;
        const int y = rng.bernoulli(0.11) ? 1 - s : s;
        counts.add(s, y);
    }
    CHECK(estimate_mi(counts) == Approx(expected).margin(0.003));
}

TEST_CASE("analytic mi from conditional rows", "[information]") {
    SECTION("identity channel") {
        CHECK(analytic_mi({{1.0, 0.0}, {0.0, 1.0}}, 0.5) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("equal rows carry nothing") {
        CHECK(analytic_mi({{0.3, 0.7}, {0.3, 0.7}}, 0.4) == Approx(0.0).margin(1e-12));
        CHECK(analytic_mi({{0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}}, 0.5) == Approx(0.0).margin(1e-12));
    }
    SECTION("gaussian threshold channel against the phi oracle") {
        // p(1|1) = 1 - Phi(0.5), p(1|0) = 1 - Phi(2.7) for the all-gaussian
        // basic channel at alpha_x = 1.1, theta = 1.6, unit channel sigma
        const double p11 = 1.0 - static_cast<double>(oracle::gaussian_cdf_series(0.5L));
        const double p10 = 1.0 - static_cast<double>(oracle::gaussian_cdf_series(2.7L));
        const double mi = analytic_mi({{1.0 - p10, p10}, {1.0 - p11, p11}}, 0.5);
        // frozen via H(Y) - H(Y|S) in long double
        const long double p1 = (p10 + p11) / 2.0L;
        const long double expected = oracle::binary_entropy(p1) -
                                     (oracle::binary_entropy(p10) + oracle::binary_entropy(p11)) / 2.0L;
        CHECK(mi == Approx(static_cast<double>(expected)).epsilon(1e-12));
        CHECK(mi == Approx(0.16225748551809319).epsilon(1e-9));
    }
    SECTION("malformed rows are rejected") {
        CHECK_THROWS_AS(analytic_mi({{0.5, 0.4}, {0.5, 0.5}}, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(analytic_mi({{0.5, 0.5}, {0.5, 0.5}}, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(analytic_mi({{1.2, -0.2}, {0.5, 0.5}}, 0.5), std::invalid_argument);
    }
}

TEST_CASE("mi bounds and estimator consistency", "[information][property]") {
    RngStream rng(32);
    SECTION("0 <= I <= H(S) on random channels") {
        for (int trial = 0; trial < 200; ++trial) {
            const double prior = 0.05 + 0.9 * rng.uniform();
            const int n_y = trial % 2 == 0 ? 2 : 3;
            std::vector<std::vector<double>> cond(2, std::vector<double>(static_cast<std::size_t>(n_y)));
            for (auto& row : cond) {
                double sum = 0.0;
                for (auto& p : row) {
                    p = rng.uniform_pos();
                    sum += p;
                }
                for (auto& p : row) p /= sum;
            }
            const double mi = analytic_mi(cond, prior);
            CHECK(mi >= 0.0);
            CHECK(mi <= binary_entropy(prior) + 1e-12);
        }
    }
    SECTION("zero mi exactly for equal rows, positive for perturbed rows") {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> row(3);
            double sum = 0.0;
            for (auto& p : row) {
                p = rng.uniform_pos();
                sum += p;
            }
            for (auto& p : row) p /= sum;
            CHECK(analytic_mi({row, row}, 0.5) == Approx(0.0).margin(1e-12));

            auto perturbed = row;
            const double shift = std::min(0.2, std::min(perturbed[0], 1.0 - perturbed[1]) * 0.5);
            perturbed[0] -= shift;
            perturbed[1] += shift;
            CHECK(analytic_mi({row, perturbed}, 0.5) > 1e-6);
        }
    }
    SECTION("mi is invariant under output relabeling") {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<std::vector<double>> joint(2, std::vector<double>(3));
            double sum = 0.0;
            for (auto& row : joint)
                for (auto& p : row) {
                    p = rng.uniform_pos();
                    sum += p;
                }
            for (auto& row : joint)
                for (auto& p : row) p /= sum;
            const double base = mutual_information(joint);
            const std::vector<std::vector<double>> swapped = {
                {joint[0][2], joint[0][0], joint[0][1]},
                {joint[1][2], joint[1][0], joint[1][1]},
            };
            CHECK(mutual_information(swapped) == Approx(base).margin(1e-12));
        }
    }
}

TEST_CASE("estimator error scales like 1/sqrt(n)", "[information][property]") {
    // fixed channel: crossover 0.11, uniform prior
    const double analytic = static_cast<double>(1.0L - oracle::binary_entropy(0.11L));
    const std::size_t sizes[] = {1000, 10000, 100000, 1000000};
    const int repeats = 12;
    std::vector<double> log_n, log_dev;
    RngStream rng(33);
    for (std::size_t n : sizes) {
        double mean_abs_dev = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            JointCounts counts(2);
            for (std::size_t i = 0; i < n; ++i) {
                const int s = rng.bernoulli(0.5) ? 1 : 0;
                const int y = rng.bernoulli(0.11) ? 1 - s : s;
                counts.add(s, y);
            }
            mean_abs_dev += std::abs(estimate_mi(counts) - analytic);
        }
        mean_abs_dev /= repeats;
        log_n.push_back(std::log(static_cast<double>(n)));
        log_dev.push_back(std::log(mean_abs_dev));
    }
    // least-squares slope on the log-log points; expect -1/2 within factor 2
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        mx += log_n[i];
        my += log_dev[i];
    }
    mx /= static_cast<double>(log_n.size());
    my /= static_cast<double>(log_n.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        num += (log_n[i] - mx) * (log_dev[i] - my);
        den += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = num / den;
    CHECK(slope < -0.25);
    CHECK(slope > -1.0);
}
