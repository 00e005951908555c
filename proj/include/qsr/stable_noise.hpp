#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "qsr/rng.hpp"

namespace qsr {

// Four-parameter alpha-stable law used as channel noise. Its characteristic
// function is
//
//     phi(w) = exp{ i*a*w - gamma*|w|^alpha * (1 + i*beta*sign(w)*tan(alpha*pi/2)) }
//
// with the skew term carried with a plus sign. alpha = 2 is Gaussian with
// mean a and variance 2*gamma (the beta term drops out), alpha = 1 with
// beta = 0 is Cauchy with location a and scale gamma. alpha = 1 with nonzero
// beta is rejected: tan(pi/2) makes the formula above undefined there.
// Sampling maps the plus-sign skew onto the Chambers-Mallows-Stuck sampler,
// whose usual convention carries a minus sign, by negating beta; for beta = 0
// the two conventions coincide.
struct StableParams {
    double alpha = 2.0;     // characteristic exponent, in (0, 2]
    double beta = 0.0;      // skewness, in [-1, 1]
    double gamma = 0.5;     // dispersion, >= 0
    double location = 0.0;  // location parameter a

    void validate() const {
        if (!(alpha > 0.0) || !(alpha <= 2.0)) throw std::invalid_argument("stable law: alpha must lie in (0, 2]");
        if (!(beta >= -1.0) || !(beta <= 1.0)) throw std::invalid_argument("stable law: beta must lie in [-1, 1]");
        if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("stable law: gamma must be finite and >= 0");
        if (!std::isfinite(location)) throw std::invalid_argument("stable law: location must be finite");
        if (alpha == 1.0 && beta != 0.0) throw std::invalid_argument("stable law: alpha = 1 requires beta = 0");
    }

    bool is_gaussian() const { return alpha == 2.0; }
    bool is_degenerate() const { return gamma == 0.0; }

    static StableParams gaussian_law(double mean, double variance) { return {2.0, 0.0, variance / 2.0, mean}; }
    static StableParams cauchy_law(double location, double scale) { return {1.0, 0.0, scale, location}; }
};

/// Characteristic function phi(omega) of the law above.
inline std::complex<double> stable_cf(const StableParams& p, double omega) {
    p.validate();
    if (omega == 0.0) return {1.0, 0.0};
    if (p.alpha == 2.0) return std::polar(std::exp(-p.gamma * omega * omega), p.location * omega);
    const double decay = p.gamma * std::pow(std::abs(omega), p.alpha);
    double phase = p.location * omega;
    if (p.beta != 0.0) {
        const double sign = omega > 0.0 ? 1.0 : -1.0;
        phase -= decay * p.beta * sign * std::tan(p.alpha * std::numbers::pi / 2.0);
    }
    return std::polar(std::exp(-decay), phase);
}

// One i.i.d. variate of the law above (Chambers-Mallows-Stuck transformation;
// exact, no rejection). Gaussian and Cauchy special cases short-circuit to
// their direct transforms, which realize the same laws.
inline double sample_stable(const StableParams& p, RngStream& rng) {
    p.validate();
    if (p.gamma == 0.0) return p.location;
    if (p.alpha == 2.0) return p.location + std::sqrt(2.0 * p.gamma) * rng.gaussian();
    if (p.alpha == 1.0) return p.location + p.gamma * std::tan(std::numbers::pi * (rng.uniform_pos() - 0.5));

    const double scale = std::pow(p.gamma, 1.0 / p.alpha);
    const double u = std::numbers::pi * (rng.uniform_pos() - 0.5);
    const double w = -std::log(rng.uniform_pos());
    double x;
    if (p.beta == 0.0) {
        x = std::sin(p.alpha * u) / std::pow(std::cos(u), 1.0 / p.alpha) *
            std::pow(std::cos((1.0 - p.alpha) * u) / w, (1.0 - p.alpha) / p.alpha);
    } else {
        // zeta = -beta_cms * tan(alpha*pi/2) with beta_cms = -beta, cf. the sign note above.
        const double zeta = p.beta * std::tan(p.alpha * std::numbers::pi / 2.0);
        const double xi = std::atan(-zeta) / p.alpha;
        const double v = p.alpha * (u + xi);
        x = std::pow(1.0 + zeta * zeta, 0.5 / p.alpha) * std::sin(v) /
            std::pow(std::cos(u), 1.0 / p.alpha) *
            std::pow(std::cos(u - v) / w, (1.0 - p.alpha) / p.alpha);
    }
    return p.location + scale * x;
}

namespace detail {

// Complementary error function by rational Chebyshev approximation
// (Cody-style three-interval scheme). Absolute error below 1e-15.
inline double erfc_rational(double x) {
    static constexpr double kErfA[5] = {3.16112374387056560e+00, 1.13864154151050156e+02,
                                        3.77485237685302021e+02, 3.20937758913846947e+03,
                                        1.85777706184603153e-01};
    static constexpr double kErfB[4] = {2.36012909523441209e+01, 2.44024637934444173e+02,
                                        1.28261652607737228e+03, 2.84423683343917062e+03};
    static constexpr double kErfcC[9] = {5.64188496988670089e-01, 8.88314979438837594e+00,
                                         6.61191906371416295e+01, 2.98635138197400131e+02,
                                         8.81952221241769090e+02, 1.71204761263407058e+03,
                                         2.05107837782607147e+03, 1.23033935479799725e+03,
                                         2.15311535474403846e-08};
    static constexpr double kErfcD[8] = {1.57449261107098347e+01, 1.17693950891312499e+02,
                                         5.37181101862009858e+02, 1.62138957456669019e+03,
                                         3.29079923573345963e+03, 4.36261909014324716e+03,
                                         3.43936767414372164e+03, 1.23033935480374942e+03};
    static constexpr double kErfcP[6] = {3.05326634961232344e-01, 3.60344899949804439e-01,
                                         1.25781726111229246e-01, 1.60837851487422766e-02,
                                         6.58749161529837803e-04, 1.63153871373020978e-02};
    static constexpr double kErfcQ[5] = {2.56852019228982242e+00, 1.87295284992346047e+00,
                                         5.27905102951428412e-01, 6.05183413124413191e-02,
                                         2.33520497626869185e-03};
    static constexpr double kInvSqrtPi = 5.6418958354775628695e-01;

    const double y = std::abs(x);
    if (y <= 0.46875) {
        const double z = y > 1.11e-16 ? y * y : 0.0;
        double num = kErfA[4] * z;
        double den = z;
        for (int i = 0; i < 3; ++i) {
            num = (num + kErfA[i]) * z;
            den = (den + kErfB[i]) * z;
        }
        return 1.0 - x * (num + kErfA[3]) / (den + kErfB[3]);
    }

    double result = 0.0;
    if (y <= 4.0) {
        double num = kErfcC[8] * y;
        double den = y;
        for (int i = 0; i < 7; ++i) {
            num = (num + kErfcC[i]) * y;
            den = (den + kErfcD[i]) * y;
        }
        result = (num + kErfcC[7]) / (den + kErfcD[7]);
    } else if (y < 28.0) {
        const double z = 1.0 / (y * y);
        double num = kErfcP[5] * z;
        double den = z;
        for (int i = 0; i < 4; ++i) {
            num = (num + kErfcP[i]) * z;
            den = (den + kErfcQ[i]) * z;
        }
        const double r = z * (num + kErfcP[4]) / (den + kErfcQ[4]);
        result = (kInvSqrtPi - r) / y;
    }
    if (result != 0.0) {
        // split exp(-y^2) to avoid the rounding of y*y at large y
        const double ysq = std::trunc(y * 16.0) / 16.0;
        const double del = (y - ysq) * (y + ysq);
        result *= std::exp(-ysq * ysq) * std::exp(-del);
    }
    return x < 0.0 ? 2.0 - result : result;
}

}  // namespace detail

/// Standard normal CDF, absolute error <= 1e-12.
inline double gaussian_cdf(double x) {
    if (std::isnan(x)) throw std::invalid_argument("gaussian_cdf: x must not be NaN");
    return 0.5 * detail::erfc_rational(-x / std::numbers::sqrt2);
}

}  // namespace qsr
