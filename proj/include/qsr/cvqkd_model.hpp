#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsr/composite_noise.hpp"
#include "qsr/information.hpp"
#include "qsr/rng.hpp"

namespace qsr {

// Four-state key-distribution protocol with ternary threshold decoding on
// correct-basis data. The attacker amplifies with gain G (adding vacuum via
// the amplifier mode) and taps a fraction 1 - eta_E through a beamsplitter;
// the receiver measures with homodyne efficiency eta_B and maps the quadrature
// value to 1 (x >= theta), 0 (x <= -theta) or the inconclusive symbol.
struct CvqkdParams {
    double alpha = 1.1;  // coherent amplitude, > 0
    double theta = 1.6;  // threshold, > 0
    double r = 0.0;      // squeezing strength, >= 0
    double gain = 1.0;   // amplifier gain G, >= 1
    double eta_e = 1.0;  // beamsplitter transmittivity, (0, 1]
    double eta_b = 1.0;  // homodyne efficiency, (0, 1]
    ChannelLaw channel_noise = StableParams{};
    double p_s1 = 0.5;   // prior Pr{S = 1}

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("cvqkd model: alpha must be > 0");
        if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("cvqkd model: theta must be > 0");
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("cvqkd model: r must be >= 0");
        if (!(gain >= 1.0) || !std::isfinite(gain)) throw std::invalid_argument("cvqkd model: gain must be >= 1");
        if (!(eta_e > 0.0) || !(eta_e <= 1.0)) throw std::invalid_argument("cvqkd model: eta_e must lie in (0, 1]");
        if (!(eta_b > 0.0) || !(eta_b <= 1.0)) throw std::invalid_argument("cvqkd model: eta_b must lie in (0, 1]");
        if (!(p_s1 > 0.0) || !(p_s1 < 1.0)) throw std::invalid_argument("cvqkd model: prior must lie in (0, 1)");
        validate_channel(channel_noise);
    }

    bool subthreshold() const { return alpha < theta; }

    /// Transmission factor k = sqrt(eta_E * eta_B * G).
    double k() const { return std::sqrt(eta_e * eta_b * gain); }
};

enum class TernaryOutcome : int { zero = 0, one = 1, inconclusive = 2 };

/// Ternary decoding: 1 iff x >= theta, 0 iff x <= -theta, inconclusive otherwise.
inline TernaryOutcome decode_ternary(double received, double theta) {
    if (received >= theta) return TernaryOutcome::one;
    if (received <= -theta) return TernaryOutcome::zero;
    return TernaryOutcome::inconclusive;
}

struct CvqkdTrial {
    int s = 0;
    TernaryOutcome y = TernaryOutcome::inconclusive;
    double received = 0.0;
};

inline CompositeNoise cvqkd_noise(const CvqkdParams& p) {
    return cvqkd_noise(p.eta_e, p.eta_b, p.gain, p.r, p.channel_noise);
}

/// One correct-basis trial: received = k*(-1)^{s+1}*alpha + N.
inline CvqkdTrial run_cvqkd_trial(const CvqkdParams& p, RngStream& rng) {
    p.validate();
    const CompositeNoise noise = cvqkd_noise(p);
    const int s = rng.bernoulli(p.p_s1) ? 1 : 0;
    const double received = p.k() * (s == 1 ? p.alpha : -p.alpha) + sample_noise(noise, rng);
    return {s, decode_ternary(received, p.theta), received};
}

/// Monte Carlo batch over correct-basis trials, reduced to a 2x3 histogram.
inline JointCounts run_cvqkd_batch(const CvqkdParams& p, std::uint64_t trials, RngStream& rng) {
    p.validate();
    const CompositeNoise noise = cvqkd_noise(p);
    const double signal = p.k() * p.alpha;
    JointCounts counts(3);
    for (std::uint64_t i = 0; i < trials; ++i) {
        const int s = rng.bernoulli(p.p_s1) ? 1 : 0;
        const double received = (s == 1 ? signal : -signal) + sample_noise(noise, rng);
        counts.add(s, static_cast<int>(decode_ternary(received, p.theta)));
    }
    return counts;
}

// The six conditional probabilities P(y|s), rows indexed by s and columns by
// (0, 1, inconclusive):
//   P(0|0) = F_N(-theta + k alpha)      P(0|1) = F_N(-theta - k alpha)
//   P(1|0) = 1 - F_N(theta + k alpha)   P(1|1) = 1 - F_N(theta - k alpha)
// and P(eps|s) completes each row to 1. Tiny negative remainders from CDF
// rounding are clamped; anything past -1e-9 is an error.
inline std::array<std::array<double, 3>, 2> cvqkd_conditional_probs(const CvqkdParams& p) {
    p.validate();
    const CompositeNoise noise = cvqkd_noise(p);
    const double signal = p.k() * p.alpha;
    std::array<std::array<double, 3>, 2> probs{};
    for (int s = 0; s < 2; ++s) {
        const double shift = s == 1 ? -signal : signal;
        const double p0 = noise_cdf(noise, -p.theta + shift);
        const double p1 = 1.0 - noise_cdf(noise, p.theta + shift);
        const double peps = 1.0 - p0 - p1;
        if (peps < -1e-9) throw std::runtime_error("cvqkd model: inconsistent conditional probabilities");
        probs[static_cast<std::size_t>(s)] = {p0, p1, std::max(0.0, peps)};
    }
    return probs;
}

/// Exact channel MI over the 2x3 alphabet in bits.
inline double cvqkd_analytic_mi(const CvqkdParams& p) {
    const auto cond = cvqkd_conditional_probs(p);
    return analytic_mi({{cond[0][0], cond[0][1], cond[0][2]}, {cond[1][0], cond[1][1], cond[1][2]}}, p.p_s1);
}

// ---- sifting ---------------------------------------------------------------

enum class Quadrature { position, momentum };

// Raw protocol trial before sifting. States are indexed 0..3 as
// {|a>, |ia>, |-a>, |-ia>}; 0 and 2 encode on the position quadrature,
// 1 and 3 on momentum. S = 1 for |a> and |ia>, S = 0 otherwise.
struct RawCvqkdTrial {
    int state_index = 0;
    Quadrature bob_basis = Quadrature::position;
    double received = 0.0;
};

inline Quadrature encoding_quadrature(int state_index) {
    if (state_index < 0 || state_index > 3) throw std::invalid_argument("cvqkd model: state index must lie in 0..3");
    return state_index % 2 == 0 ? Quadrature::position : Quadrature::momentum;
}

inline int state_bit(int state_index) {
    if (state_index < 0 || state_index > 3) throw std::invalid_argument("cvqkd model: state index must lie in 0..3");
    return state_index <= 1 ? 1 : 0;
}

/// Keeps exactly the trials whose measurement basis matches the state's
/// encoding quadrature. Expected retention is 1/2 under uniform choices.
inline std::vector<RawCvqkdTrial> sift(const std::vector<RawCvqkdTrial>& raw) {
    std::vector<RawCvqkdTrial> kept;
    kept.reserve(raw.size() / 2 + 1);
    for (const auto& t : raw)
        if (encoding_quadrature(t.state_index) == t.bob_basis) kept.push_back(t);
    return kept;
}

// One raw trial with uniform state and basis choices. Matched-basis trials
// carry the standard received value; mismatched ones see no displacement in
// the measured quadrature (the encoding sits in the orthogonal one) and the
// anti-squeezed vacuum e^{+2r}/2 in place of the squeezed term.
inline RawCvqkdTrial run_raw_cvqkd_trial(const CvqkdParams& p, RngStream& rng) {
    p.validate();
    RawCvqkdTrial trial;
    trial.state_index = static_cast<int>(rng.next_u64() % 4);
    trial.bob_basis = (rng.next_u64() & 1) ? Quadrature::momentum : Quadrature::position;
    const bool matched = encoding_quadrature(trial.state_index) == trial.bob_basis;
    if (matched) {
        const CompositeNoise noise = cvqkd_noise(p);
        const double sign = state_bit(trial.state_index) == 1 ? 1.0 : -1.0;
        trial.received = p.k() * sign * p.alpha + sample_noise(noise, rng);
    } else {
        CvqkdParams anti = p;
        anti.r = 0.0;
        CompositeNoise noise = cvqkd_noise(anti);
        noise.gauss_var += p.eta_e * p.eta_b * p.gain * (std::exp(2.0 * p.r) - 1.0) / 2.0;
        trial.received = sample_noise(noise, rng);
    }
    return trial;
}

}  // namespace qsr
