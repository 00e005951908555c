#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>

#include "qsr/rng.hpp"
#include "qsr/stable_noise.hpp"

namespace qsr {

// Arbitrary finite-variance channel law, for exercising the "any finite
// variance" breadth of the theorems with e.g. uniform or shifted-exponential
// noise. The characteristic function is optional; without it the composite
// CDF and CF are unavailable (sampling still works).
struct CustomLaw {
    double mean = 0.0;
    double variance = 0.0;
    std::function<double(RngStream&)> sampler;
    std::function<std::complex<double>(double)> cf;

    void validate() const {
        if (!std::isfinite(mean) || !std::isfinite(variance) || variance < 0.0)
            throw std::invalid_argument("custom law: mean/variance must be finite, variance >= 0");
        if (!sampler) throw std::invalid_argument("custom law: sampler required");
    }
};

using ChannelLaw = std::variant<StableParams, CustomLaw>;

inline void validate_channel(const ChannelLaw& law) {
    std::visit([](const auto& l) { l.validate(); }, law);
}

/// Location parameter of the channel law (its mean when that exists).
inline double channel_location(const ChannelLaw& law) {
    if (const auto* sp = std::get_if<StableParams>(&law)) return sp->location;
    return std::get<CustomLaw>(law).mean;
}

/// Channel variance; nullopt for stable laws with alpha < 2.
inline std::optional<double> channel_variance(const ChannelLaw& law) {
    if (const auto* sp = std::get_if<StableParams>(&law)) {
        if (sp->is_degenerate()) return 0.0;
        if (sp->is_gaussian()) return 2.0 * sp->gamma;
        return std::nullopt;
    }
    return std::get<CustomLaw>(law).variance;
}

inline double sample_channel(const ChannelLaw& law, RngStream& rng) {
    if (const auto* sp = std::get_if<StableParams>(&law)) return sample_stable(*sp, rng);
    return std::get<CustomLaw>(law).sampler(rng);
}

inline std::complex<double> channel_cf(const ChannelLaw& law, double omega) {
    if (const auto* sp = std::get_if<StableParams>(&law)) return stable_cf(*sp, omega);
    const auto& custom = std::get<CustomLaw>(law);
    if (!custom.cf) throw std::invalid_argument("custom law: no characteristic function supplied");
    return custom.cf(omega);
}

/// Uniform law with the given mean and standard deviation.
inline CustomLaw uniform_channel_law(double mean, double stddev) {
    const double half_width = stddev * std::numbers::sqrt3;
    CustomLaw law;
    law.mean = mean;
    law.variance = stddev * stddev;
    law.sampler = [mean, half_width](RngStream& rng) { return mean + half_width * (2.0 * rng.uniform() - 1.0); };
    law.cf = [mean, half_width](double w) -> std::complex<double> {
        const double hw = half_width * w;
        const double sinc = std::abs(hw) < 1e-8 ? 1.0 - hw * hw / 6.0 : std::sin(hw) / hw;
        return std::polar(1.0, mean * w) * sinc;
    };
    return law;
}

/// Exponential law shifted to the given mean, with the given standard deviation.
inline CustomLaw shifted_exponential_law(double mean, double stddev) {
    CustomLaw law;
    law.mean = mean;
    law.variance = stddev * stddev;
    law.sampler = [mean, stddev](RngStream& rng) { return mean - stddev - stddev * std::log(rng.uniform_pos()); };
    law.cf = [mean, stddev](double w) -> std::complex<double> {
        return std::polar(1.0, (mean - stddev) * w) / std::complex<double>(1.0, -stddev * w);
    };
    return law;
}

// Law of the total noise N for either model: an aggregate zero-mean Gaussian
// part plus the channel noise scaled by the model's transmission factor
// (sqrt(eta) for the basic model, sqrt(eta_E*eta_B*G) for key distribution).
struct CompositeNoise {
    double gauss_var = 0.0;      // variance of the Gaussian part, >= 0
    double channel_scale = 1.0;  // multiplier on the channel noise, > 0
    ChannelLaw channel = StableParams{};

    void validate() const {
        if (!(gauss_var >= 0.0) || !std::isfinite(gauss_var))
            throw std::invalid_argument("composite noise: gauss_var must be finite and >= 0");
        if (!(channel_scale > 0.0) || !std::isfinite(channel_scale))
            throw std::invalid_argument("composite noise: channel_scale must be finite and > 0");
        validate_channel(channel);
    }

    /// mean(N) = scale * (location or mean of the channel law).
    double mean() const { return channel_scale * channel_location(channel); }

    /// var(N) = gauss_var + scale^2 * channel variance; nullopt when infinite.
    std::optional<double> variance() const {
        const auto cv = channel_variance(channel);
        if (!cv) return std::nullopt;
        return gauss_var + channel_scale * channel_scale * *cv;
    }
};

// Total noise of the basic model: sqrt(eta)*(X e^{-r} + nu) + sqrt(1-eta)*X_H
// with X, X_H vacuum (variance 1/2). Gaussian part eta*e^{-2r}/2 + (1-eta)/2,
// channel scale sqrt(eta).
inline CompositeNoise basic_noise(double eta, double r, ChannelLaw channel) {
    if (!(eta > 0.0) || !(eta <= 1.0)) throw std::invalid_argument("basic noise: eta must lie in (0, 1]");
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("basic noise: r must be finite and >= 0");
    validate_channel(channel);
    const double e2r = std::exp(-2.0 * r);
    return {eta * e2r / 2.0 + (1.0 - eta) / 2.0, std::sqrt(eta), std::move(channel)};
}

// Total noise of the key-distribution model under the amplifier-beamsplitter
// attack. Gaussian part (eta_B*(eta_E*G*e^{-2r} + eta_E*(G-1) + (1-eta_E)) +
// 1-eta_B)/2, channel scale sqrt(eta_E*eta_B*G).
inline CompositeNoise cvqkd_noise(double eta_e, double eta_b, double gain, double r, ChannelLaw channel) {
    if (!(eta_e > 0.0) || !(eta_e <= 1.0)) throw std::invalid_argument("cvqkd noise: eta_e must lie in (0, 1]");
    if (!(eta_b > 0.0) || !(eta_b <= 1.0)) throw std::invalid_argument("cvqkd noise: eta_b must lie in (0, 1]");
    if (!(gain >= 1.0) || !std::isfinite(gain)) throw std::invalid_argument("cvqkd noise: gain must be >= 1");
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("cvqkd noise: r must be finite and >= 0");
    validate_channel(channel);
    const double e2r = std::exp(-2.0 * r);
    const double gauss_var = (eta_b * (eta_e * gain * e2r + eta_e * (gain - 1.0) + (1.0 - eta_e)) + 1.0 - eta_b) / 2.0;
    return {gauss_var, std::sqrt(eta_e * eta_b * gain), std::move(channel)};
}

// One draw of N = Gaussian(0, gauss_var) + scale * channel, the two parts
// independent. A Gaussian or degenerate channel folds into the Gaussian part
// so only one normal variate is drawn; the law is unchanged.
inline double sample_noise(const CompositeNoise& noise, RngStream& rng) {
    if (const auto* sp = std::get_if<StableParams>(&noise.channel)) {
        if (sp->is_gaussian() || sp->is_degenerate()) {
            const double var = noise.gauss_var + noise.channel_scale * noise.channel_scale * 2.0 * sp->gamma;
            const double shift = noise.channel_scale * sp->location;
            return var > 0.0 ? shift + std::sqrt(var) * rng.gaussian() : shift;
        }
        return (noise.gauss_var > 0.0 ? std::sqrt(noise.gauss_var) * rng.gaussian() : 0.0) +
               noise.channel_scale * sample_stable(*sp, rng);
    }
    return (noise.gauss_var > 0.0 ? std::sqrt(noise.gauss_var) * rng.gaussian() : 0.0) +
           noise.channel_scale * std::get<CustomLaw>(noise.channel).sampler(rng);
}

/// CF of N: exp(-gauss_var*w^2/2) times the channel CF at scale*w.
inline std::complex<double> noise_cf(const CompositeNoise& noise, double omega) {
    noise.validate();
    return std::exp(-noise.gauss_var * omega * omega / 2.0) * channel_cf(noise.channel, noise.channel_scale * omega);
}

/// Signals that the CDF inversion quadrature failed to converge.
struct InversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct SimpsonState {
    const std::function<double(double)>& f;
    double worst_err = 0.0;
};

inline double adaptive_simpson(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= tol) {
        if (depth <= 0) st.worst_err = std::max(st.worst_err, std::abs(err));
        return left + right + err;
    }
    return adaptive_simpson(st, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(st, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, int panels, double tol) {
    SimpsonState st{f};
    double total = 0.0;
    const double width = (b - a) / panels;
    const double panel_tol = tol / panels;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        const double hi = i + 1 == panels ? b : lo + width;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fmid = f(mid);
        const double fhi = f(hi);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += adaptive_simpson(st, lo, hi, flo, fmid, fhi, whole, panel_tol, 24);
    }
    if (st.worst_err * panels > 10.0 * tol)
        throw InversionError("cdf inversion: quadrature did not converge");
    return total;
}

}  // namespace detail

// Pr{N <= x} for the composite law. Gaussian and degenerate channels use the
// closed form; anything else goes through Gil-Pelaez inversion of noise_cf,
//
//     F(x) = 1/2 - (1/pi) * Int_0^Inf Im[phi(w) e^{-iwx}] / w dw,
//
// truncated where |phi| < 1e-10. Absolute error <= 1e-6. Skewed stable
// channels with alpha <= 1 are not supported: the integrand is singular at
// the origin there.
inline double noise_cdf(const CompositeNoise& noise, double x) {
    noise.validate();
    if (!std::isfinite(x)) throw std::invalid_argument("noise_cdf: x must be finite");

    if (const auto* sp = std::get_if<StableParams>(&noise.channel)) {
        if (sp->is_gaussian() || sp->is_degenerate()) {
            const double var = noise.gauss_var +
                               (sp->is_gaussian() ? noise.channel_scale * noise.channel_scale * 2.0 * sp->gamma : 0.0);
            const double shift = noise.channel_scale * sp->location;
            if (var > 0.0) return gaussian_cdf((x - shift) / std::sqrt(var));
            return x >= shift ? 1.0 : 0.0;  // point mass
        }
        if (sp->beta != 0.0 && sp->alpha <= 1.0)
            throw std::invalid_argument("noise_cdf: skewed stable channel with alpha <= 1 unsupported");
    }

    const auto cf = [&noise](double w) { return noise_cf(noise, w); };

    // truncation point: |phi| decays monotonically for these laws
    double omega_max = 1.0;
    while (std::abs(cf(omega_max)) > 1e-10) {
        omega_max *= 2.0;
        if (omega_max > 1e9) throw InversionError("cdf inversion: characteristic function decays too slowly");
    }

    const double shift = noise.mean();
    const auto integrand = [&](double w) -> double {
        if (w == 0.0) return shift - x;
        const std::complex<double> val = cf(w) * std::polar(1.0, -w * x);
        return val.imag() / w;
    };

    // panel count follows the oscillation frequency |x - shift|
    const double osc = std::abs(x - shift) + 1.0;
    const int panels = static_cast<int>(std::min(200000.0, std::max(64.0, 4.0 * omega_max * osc / std::numbers::pi)));
    const double integral = detail::integrate(integrand, 0.0, omega_max, panels, 2e-7);
    const double result = 0.5 - integral / std::numbers::pi;
    return std::min(1.0, std::max(0.0, result));
}

}  // namespace qsr
