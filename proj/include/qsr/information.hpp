#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace qsr {

// Empirical joint histogram of (S, Y) over trials. S is the binary input;
// Y has two symbols for the basic model and three (0, 1, inconclusive) for
// the key-distribution model. Merging is entrywise, so parallel batches
// reduce deterministically.
struct JointCounts {
    std::array<std::array<std::uint64_t, 3>, 2> counts{};
    int n_outputs = 2;
    std::uint64_t total = 0;

    explicit JointCounts(int outputs = 2) : n_outputs(outputs) {
        if (outputs != 2 && outputs != 3) throw std::invalid_argument("joint counts: output alphabet must have 2 or 3 symbols");
    }

    void add(int s, int y) {
        counts[static_cast<std::size_t>(s)][static_cast<std::size_t>(y)] += 1;
        total += 1;
    }

    void merge(const JointCounts& other) {
        if (other.n_outputs != n_outputs) throw std::invalid_argument("joint counts: output alphabets differ");
        for (int s = 0; s < 2; ++s)
            for (int y = 0; y < n_outputs; ++y) counts[s][y] += other.counts[s][y];
        total += other.total;
    }
};

namespace detail {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace detail

// Mutual information I(S;Y) in bits of a normalized joint distribution
// (rows = input symbols), with the conventions 0 log 0 = 0 and 1 log 1 = 0.
inline double mutual_information(const std::vector<std::vector<double>>& joint) {
    if (joint.empty() || joint[0].empty()) throw std::invalid_argument("mutual information: empty joint");
    const std::size_t n_y = joint[0].size();
    double sum = 0.0;
    std::vector<double> p_y(n_y, 0.0);
    std::vector<double> p_s(joint.size(), 0.0);
    for (std::size_t s = 0; s < joint.size(); ++s) {
        if (joint[s].size() != n_y) throw std::invalid_argument("mutual information: ragged joint");
        for (std::size_t y = 0; y < n_y; ++y) {
            const double p = joint[s][y];
            if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("mutual information: entries must be finite and >= 0");
            sum += p;
            p_s[s] += p;
            p_y[y] += p;
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("mutual information: joint must sum to 1");

    double mi = 0.0;
    for (std::size_t s = 0; s < joint.size(); ++s)
        for (std::size_t y = 0; y < n_y; ++y) {
            const double p = joint[s][y];
            if (p > 0.0) mi += p * std::log2(p / (p_s[s] * p_y[y]));
        }
    return std::max(0.0, mi);
}

/// Plug-in MI of the empirical joint counts/total, in bits.
inline double estimate_mi(const JointCounts& counts) {
    if (counts.total == 0) throw std::invalid_argument("estimate_mi: no trials");
    const double n = static_cast<double>(counts.total);
    std::vector<std::vector<double>> joint(2, std::vector<double>(static_cast<std::size_t>(counts.n_outputs)));
    for (int s = 0; s < 2; ++s)
        for (int y = 0; y < counts.n_outputs; ++y) joint[s][y] = static_cast<double>(counts.counts[s][y]) / n;

    // renormalization guards the sum-to-1 validation against rounding
    double sum = 0.0;
    for (const auto& row : joint)
        for (double p : row) sum += p;
    for (auto& row : joint)
        for (double& p : row) p /= sum;
    return mutual_information(joint);
}

// Exact MI of the channel given by conditional rows P(y|s) and the prior
// Pr{S=1}, via I = H(Y) - H(Y|S). Serves as the Monte Carlo oracle.
inline double analytic_mi(const std::vector<std::vector<double>>& cond, double p_s1) {
    if (cond.size() != 2) throw std::invalid_argument("analytic_mi: need one conditional row per input symbol");
    if (!(p_s1 > 0.0) || !(p_s1 < 1.0)) throw std::invalid_argument("analytic_mi: prior must lie in (0, 1)");
    const std::size_t n_y = cond[0].size();
    if (cond[1].size() != n_y || n_y == 0) throw std::invalid_argument("analytic_mi: ragged conditional rows");
    const double p_s[2] = {1.0 - p_s1, p_s1};

    double h_y = 0.0, h_y_given_s = 0.0;
    for (std::size_t y = 0; y < n_y; ++y) {
        double p_y = 0.0;
        for (int s = 0; s < 2; ++s) {
            const double p = cond[static_cast<std::size_t>(s)][y];
            if (!(p >= -1e-12) || !std::isfinite(p)) throw std::invalid_argument("analytic_mi: malformed conditional row");
            p_y += p_s[s] * p;
            h_y_given_s -= p_s[s] * detail::plogp(std::max(0.0, p));
        }
        h_y -= detail::plogp(p_y);
    }
    for (int s = 0; s < 2; ++s) {
        double row_sum = 0.0;
        for (std::size_t y = 0; y < n_y; ++y) row_sum += cond[static_cast<std::size_t>(s)][y];
        if (std::abs(row_sum - 1.0) > 1e-9) throw std::invalid_argument("analytic_mi: conditional row must sum to 1");
    }
    return std::max(0.0, h_y - h_y_given_s);
}

/// Entropy in bits of a binary source with Pr{S=1} = p.
inline double binary_entropy(double p) { return -detail::plogp(p) - detail::plogp(1.0 - p); }

}  // namespace qsr
