#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qsr/cvqkd_model.hpp"

namespace qsr {

/// Open interval of noise locations for which the noise benefit cannot occur.
struct ForbiddenInterval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return x > lo && x < hi; }
    bool near_endpoint(double x, double tol) const { return std::abs(x - lo) <= tol || std::abs(x - hi) <= tol; }
};

// Verdict of a forbidden-interval theorem for one noise location. The
// prediction holds open intervals exactly: a location within tolerance of an
// endpoint is a zero-measure case the theorems ignore, so boundary_flag marks
// the verdict unreliable rather than silently classifying it.
struct IntervalVerdict {
    std::vector<ForbiddenInterval> intervals;
    double location_tested = 0.0;
    bool sr_predicted = false;
    bool boundary_flag = false;
    bool hypothesis_ok = true;  // subthreshold hypothesis of the theorem

    static constexpr double kBoundaryTolerance = 1e-9;
};

/// Basic-model forbidden interval (theta - alpha_x, theta + alpha_x).
inline std::vector<ForbiddenInterval> basic_interval(double alpha_x, double theta) {
    if (!std::isfinite(alpha_x) || !std::isfinite(theta)) throw std::invalid_argument("interval: arguments must be finite");
    return {{theta - alpha_x, theta + alpha_x}};
}

/// Key-distribution forbidden set (-theta-alpha, -theta+alpha) u (theta-alpha, theta+alpha).
inline std::vector<ForbiddenInterval> cvqkd_interval(double alpha, double theta) {
    if (!std::isfinite(alpha) || !std::isfinite(theta)) throw std::invalid_argument("interval: arguments must be finite");
    return {{-theta - alpha, -theta + alpha}, {theta - alpha, theta + alpha}};
}

inline IntervalVerdict evaluate_interval(std::vector<ForbiddenInterval> intervals, double location, bool hypothesis_ok) {
    IntervalVerdict verdict;
    verdict.intervals = std::move(intervals);
    verdict.location_tested = location;
    verdict.hypothesis_ok = hypothesis_ok;
    verdict.sr_predicted = true;
    for (const auto& interval : verdict.intervals) {
        if (interval.contains(location)) verdict.sr_predicted = false;
        if (interval.near_endpoint(location, IntervalVerdict::kBoundaryTolerance)) verdict.boundary_flag = true;
    }
    return verdict;
}

inline IntervalVerdict basic_interval_verdict(double alpha_x, double theta, double location) {
    return evaluate_interval(basic_interval(alpha_x, theta), location, alpha_x < theta);
}

inline IntervalVerdict cvqkd_interval_verdict(double alpha, double theta, double location) {
    return evaluate_interval(cvqkd_interval(alpha, theta), location, alpha < theta);
}

// ---- constraints on k = sqrt(eta_E * eta_B * G) ----------------------------

// The key-distribution theorem's proof constrains the transmission factor k
// case by case; the theorem statement leaves them implicit, so they are
// surfaced here. With the forbidden set F = (-t-a, -t+a) u (t-a, t+a) and
// noise location m:
//
//   m < -t-a            (outside, below)    k > t/|m+a|
//   -t+a < m < t-a      (outside, middle)   k < min(t/|m+a|, t/|m-a|)
//   m > t+a             (outside, above)    k > t/(m-a)
//   m in (-t-a, -t+a)   (inside, negative)  t/|a-m| < k < t/|a+m|
//   m in (t-a, t+a)     (inside, positive)  t/(m+a) < k < t/|m-a|
enum class Theorem2Case {
    outside_below,
    outside_middle,
    outside_above,
    inside_negative,
    inside_positive,
    boundary,
};

struct KRange {
    double lo = 0.0;  // exclusive
    double hi = std::numeric_limits<double>::infinity();  // exclusive

    bool contains(double k) const { return k > lo && k < hi; }
    bool empty() const { return !(lo < hi); }
};

struct KConstraint {
    Theorem2Case case_id = Theorem2Case::boundary;
    std::vector<KRange> ranges;  // empty when no admissible k exists

    bool admits(double k) const {
        for (const auto& range : ranges)
            if (range.contains(k)) return true;
        return false;
    }
};

inline KConstraint theorem2_constraints(double alpha, double theta, double location) {
    if (!(alpha > 0.0) || !(theta > 0.0)) throw std::invalid_argument("theorem2 constraints: alpha and theta must be > 0");
    if (!(alpha < theta)) throw std::invalid_argument("theorem2 constraints: requires subthreshold alpha < theta");
    const double tol = IntervalVerdict::kBoundaryTolerance;
    const double inf = std::numeric_limits<double>::infinity();
    const double m = location;

    KConstraint constraint;
    for (double endpoint : {-theta - alpha, -theta + alpha, theta - alpha, theta + alpha}) {
        if (std::abs(m - endpoint) <= tol) return constraint;  // zero-measure case, no ranges
    }

    auto push = [&constraint](double lo, double hi) {
        if (lo < hi) constraint.ranges.push_back({lo, hi});
    };

    if (m < -theta - alpha) {
        constraint.case_id = Theorem2Case::outside_below;
        push(theta / std::abs(m + alpha), inf);
    } else if (m < -theta + alpha) {
        constraint.case_id = Theorem2Case::inside_negative;
        push(theta / std::abs(alpha - m), theta / std::abs(alpha + m));
    } else if (m < theta - alpha) {
        constraint.case_id = Theorem2Case::outside_middle;
        push(0.0, theta / std::max(std::abs(m + alpha), std::abs(m - alpha)));
    } else if (m < theta + alpha) {
        constraint.case_id = Theorem2Case::inside_positive;
        push(theta / (m + alpha), theta / std::abs(m - alpha));
    } else {
        constraint.case_id = Theorem2Case::outside_above;
        push(theta / (m - alpha), inf);
    }
    return constraint;
}

inline KConstraint theorem2_constraints(const CvqkdParams& params, double location) {
    params.validate();
    return theorem2_constraints(params.alpha, params.theta, location);
}

}  // namespace qsr
