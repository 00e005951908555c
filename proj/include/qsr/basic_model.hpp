#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "qsr/composite_noise.hpp"
#include "qsr/information.hpp"
#include "qsr/rng.hpp"

namespace qsr {

// Basic quantum-optical threshold channel. The message bit S is encoded as a
// displacement of +/- alpha_x on the position quadrature of squeezed light,
// the channel adds noise, and the receiver thresholds the inefficient
// homodyne measurement at theta.
struct BasicModelParams {
    double alpha_x = 1.1;  // signal amplitude, > 0
    double theta = 1.6;    // decoding threshold
    double r = 0.0;        // squeezing strength, >= 0
    double eta = 1.0;      // homodyne efficiency, (0, 1]
    ChannelLaw channel_noise = StableParams{};
    double p_s1 = 0.5;     // prior Pr{S = 1}

    void validate() const {
        if (!(alpha_x > 0.0) || !std::isfinite(alpha_x)) throw std::invalid_argument("basic model: alpha_x must be > 0");
        if (!std::isfinite(theta)) throw std::invalid_argument("basic model: theta must be finite");
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("basic model: r must be >= 0");
        if (!(eta > 0.0) || !(eta <= 1.0)) throw std::invalid_argument("basic model: eta must lie in (0, 1]");
        if (!(p_s1 > 0.0) || !(p_s1 < 1.0)) throw std::invalid_argument("basic model: prior must lie in (0, 1)");
        validate_channel(channel_noise);
    }

    // Theorem hypothesis; supra-threshold parameters are allowed for
    // exploration and surface only as a flag.
    bool subthreshold() const { return alpha_x < theta; }
};

struct TrialRecord {
    int s = 0;
    int y = 0;
    double received = 0.0;  // quadrature value before thresholding
};

inline CompositeNoise basic_noise(const BasicModelParams& p) {
    return basic_noise(p.eta, p.r, p.channel_noise);
}

/// Heaviside decoding with u(0) = 1: the bit is set when received >= theta.
inline int decode_threshold(double received, double theta) { return received >= theta ? 1 : 0; }

inline TrialRecord run_trial(const BasicModelParams& p, RngStream& rng) {
    p.validate();
    const CompositeNoise noise = basic_noise(p);
    const int s = rng.bernoulli(p.p_s1) ? 1 : 0;
    const double received = std::sqrt(p.eta) * (s == 1 ? p.alpha_x : -p.alpha_x) + sample_noise(noise, rng);
    return {s, decode_threshold(received, p.theta), received};
}

/// Monte Carlo batch reduced to an empirical (S, Y) histogram.
inline JointCounts run_batch(const BasicModelParams& p, std::uint64_t trials, RngStream& rng) {
    p.validate();
    const CompositeNoise noise = basic_noise(p);
    const double signal = std::sqrt(p.eta) * p.alpha_x;
    JointCounts counts(2);
    for (std::uint64_t i = 0; i < trials; ++i) {
        const int s = rng.bernoulli(p.p_s1) ? 1 : 0;
        const double received = (s == 1 ? signal : -signal) + sample_noise(noise, rng);
        counts.add(s, decode_threshold(received, p.theta));
    }
    return counts;
}

// The four conditional probabilities P(y|s), rows indexed by s:
//   P(0|0) = F_N(theta + sqrt(eta) alpha_x),  P(0|1) = F_N(theta - sqrt(eta) alpha_x),
// and P(1|s) = 1 - P(0|s), with F_N the CDF of the composite noise.
inline std::array<std::array<double, 2>, 2> conditional_probs(const BasicModelParams& p) {
    p.validate();
    const CompositeNoise noise = basic_noise(p);
    const double signal = std::sqrt(p.eta) * p.alpha_x;
    const double p00 = noise_cdf(noise, p.theta + signal);
    const double p01 = noise_cdf(noise, p.theta - signal);
    return {{{p00, 1.0 - p00}, {p01, 1.0 - p01}}};
}

/// Exact channel MI of the model in bits, used as the Monte Carlo oracle.
inline double basic_analytic_mi(const BasicModelParams& p) {
    const auto cond = conditional_probs(p);
    return analytic_mi({{cond[0][0], cond[0][1]}, {cond[1][0], cond[1][1]}}, p.p_s1);
}

}  // namespace qsr
