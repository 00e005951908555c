#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "qsr/basic_model.hpp"
#include "qsr/cvqkd_model.hpp"
#include "qsr/forbidden_interval.hpp"
#include "qsr/information.hpp"

namespace qsr {

using ModelParams = std::variant<BasicModelParams, CvqkdParams>;

enum class NoiseAxisKind { sigma, gamma };  // sigma: channel stddev (alpha = 2 only); gamma: dispersion

struct Smoothing {
    enum class Kind { none, grid_kernel };
    Kind kind = Kind::none;
    double bandwidth = 1.0;  // in grid cells
};

// Grid specification for a Monte Carlo sweep over (noise level, squeezing).
// Every (cell, run) pair draws a fresh substream derived from the master seed
// by a counter, so results are byte-identical for any worker count.
struct SweepSpec {
    ModelParams params;
    NoiseAxisKind noise_axis_kind = NoiseAxisKind::sigma;
    std::vector<double> noise_values;
    std::vector<double> r_values;
    int trials_per_run = 10000;
    int runs = 100;
    std::uint64_t seed = 0;
    Smoothing smoothing;

    void validate() const {
        std::visit([](const auto& p) { p.validate(); }, params);
        auto check_grid = [](const std::vector<double>& grid, const char* name) {
            if (grid.empty()) throw std::invalid_argument(std::string("sweep: empty ") + name + " grid");
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
                    throw std::invalid_argument(std::string("sweep: ") + name + " grid values must be finite and >= 0");
                if (i > 0 && !(grid[i] > grid[i - 1]))
                    throw std::invalid_argument(std::string("sweep: ") + name + " grid must be strictly increasing");
            }
        };
        check_grid(noise_values, "noise");
        check_grid(r_values, "r");
        if (trials_per_run < 100) throw std::invalid_argument("sweep: trials_per_run must be >= 100");
        if (runs < 1) throw std::invalid_argument("sweep: runs must be >= 1");
        const auto* stable = std::get_if<StableParams>(channel_of(params));
        if (!stable) throw std::invalid_argument("sweep: noise axis requires a stable-family channel law");
        if (noise_axis_kind == NoiseAxisKind::sigma && !stable->is_gaussian())
            throw std::invalid_argument("sweep: sigma axis requires a Gaussian (alpha = 2) channel law");
        if (smoothing.kind == Smoothing::Kind::grid_kernel && !(smoothing.bandwidth > 0.0))
            throw std::invalid_argument("sweep: smoothing bandwidth must be > 0");
    }

    static const ChannelLaw* channel_of(const ModelParams& params) {
        if (const auto* basic = std::get_if<BasicModelParams>(&params)) return &basic->channel_noise;
        return &std::get<CvqkdParams>(params).channel_noise;
    }
};

struct SweepCell {
    double noise = 0.0;
    double r = 0.0;
    double mi_mean = 0.0;
    double mi_se = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // noise-major order
    std::size_t noise_count = 0;
    std::size_t r_count = 0;
    int runs = 0;
    int trials_per_run = 0;
    std::uint64_t seed = 0;

    const SweepCell& at(std::size_t noise_idx, std::size_t r_idx) const {
        return cells[noise_idx * r_count + r_idx];
    }

    /// MI profile along the noise axis at a fixed squeezing index.
    std::pair<std::vector<double>, std::vector<double>> noise_profile(std::size_t r_idx) const {
        std::vector<double> mi(noise_count), se(noise_count);
        for (std::size_t i = 0; i < noise_count; ++i) {
            mi[i] = at(i, r_idx).mi_mean;
            se[i] = at(i, r_idx).mi_se;
        }
        return {mi, se};
    }
};

namespace detail {

inline void set_noise_level(StableParams& law, NoiseAxisKind kind, double value) {
    law.gamma = kind == NoiseAxisKind::sigma ? value * value / 2.0 : value;
}

inline ModelParams params_for_cell(const SweepSpec& spec, double noise_value, double r_value) {
    ModelParams params = spec.params;
    if (auto* basic = std::get_if<BasicModelParams>(&params)) {
        basic->r = r_value;
        set_noise_level(std::get<StableParams>(basic->channel_noise), spec.noise_axis_kind, noise_value);
    } else {
        auto& qkd = std::get<CvqkdParams>(params);
        qkd.r = r_value;
        set_noise_level(std::get<StableParams>(qkd.channel_noise), spec.noise_axis_kind, noise_value);
    }
    return params;
}

inline JointCounts run_model_batch(const ModelParams& params, std::uint64_t trials, RngStream& rng) {
    if (const auto* basic = std::get_if<BasicModelParams>(&params)) return run_batch(*basic, trials, rng);
    return run_cvqkd_batch(std::get<CvqkdParams>(params), trials, rng);
}

// Gaussian kernel over grid indices; weights truncated at three bandwidths.
inline void smooth_grid(std::vector<SweepCell>& cells, std::size_t n_noise, std::size_t n_r, double bandwidth) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * bandwidth)));
    std::vector<SweepCell> smoothed = cells;
    for (std::size_t i = 0; i < n_noise; ++i) {
        for (std::size_t j = 0; j < n_r; ++j) {
            double weight_sum = 0.0, mi = 0.0, var = 0.0;
            for (int di = -radius; di <= radius; ++di) {
                const long ii = static_cast<long>(i) + di;
                if (ii < 0 || ii >= static_cast<long>(n_noise)) continue;
                for (int dj = -radius; dj <= radius; ++dj) {
                    const long jj = static_cast<long>(j) + dj;
                    if (jj < 0 || jj >= static_cast<long>(n_r)) continue;
                    const double w = std::exp(-(di * di + dj * dj) / (2.0 * bandwidth * bandwidth));
                    const auto& cell = cells[static_cast<std::size_t>(ii) * n_r + static_cast<std::size_t>(jj)];
                    weight_sum += w;
                    mi += w * cell.mi_mean;
                    var += w * w * cell.mi_se * cell.mi_se;
                }
            }
            auto& out = smoothed[i * n_r + j];
            out.mi_mean = mi / weight_sum;
            out.mi_se = std::sqrt(var) / weight_sum;
        }
    }
    cells = std::move(smoothed);
}

}  // namespace detail

// Runs the full sweep: per grid cell, `runs` independent batches of
// `trials_per_run` trials, plug-in MI per run, mean and standard error across
// runs. Cells and runs execute concurrently; every task writes its own slot,
// so the reduction is order-independent.
inline SweepResult run_sweep(const SweepSpec& spec, int parallelism = 0) {
    spec.validate();
    const std::size_t n_noise = spec.noise_values.size();
    const std::size_t n_r = spec.r_values.size();
    const std::size_t n_cells = n_noise * n_r;
    const std::size_t n_tasks = n_cells * static_cast<std::size_t>(spec.runs);

    std::vector<double> run_mi(n_tasks, 0.0);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&]() {
        for (std::size_t task; (task = next.fetch_add(1)) < n_tasks;) {
            try {
                const std::size_t cell = task / static_cast<std::size_t>(spec.runs);
                const ModelParams params = detail::params_for_cell(
                    spec, spec.noise_values[cell / n_r], spec.r_values[cell % n_r]);
                RngStream rng(spec.seed, task);
                run_mi[task] = estimate_mi(detail::run_model_batch(params, static_cast<std::uint64_t>(spec.trials_per_run), rng));
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    int workers = parallelism > 0 ? parallelism : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n_tasks)));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers) - 1);
    for (int i = 1; i < workers; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    SweepResult result;
    result.noise_count = n_noise;
    result.r_count = n_r;
    result.runs = spec.runs;
    result.trials_per_run = spec.trials_per_run;
    result.seed = spec.seed;
    result.cells.resize(n_cells);
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
        auto& out = result.cells[cell];
        out.noise = spec.noise_values[cell / n_r];
        out.r = spec.r_values[cell % n_r];
        double mean = 0.0;
        for (int k = 0; k < spec.runs; ++k) mean += run_mi[cell * static_cast<std::size_t>(spec.runs) + static_cast<std::size_t>(k)];
        mean /= spec.runs;
        double var = 0.0;
        for (int k = 0; k < spec.runs; ++k) {
            const double d = run_mi[cell * static_cast<std::size_t>(spec.runs) + static_cast<std::size_t>(k)] - mean;
            var += d * d;
        }
        out.mi_mean = mean;
        out.mi_se = spec.runs > 1 ? std::sqrt(var / (spec.runs - 1) / spec.runs) : 0.0;
    }
    if (spec.smoothing.kind == Smoothing::Kind::grid_kernel)
        detail::smooth_grid(result.cells, n_noise, n_r, spec.smoothing.bandwidth);
    return result;
}

// ---- SR signature ----------------------------------------------------------

// Nonmonotonicity report for an MI profile along the noise axis: the noise
// benefit registers when some interior point exceeds both endpoints by at
// least max(3 combined standard errors, min_excess).
struct SrReport {
    enum class Verdict { detected, not_detected, inconclusive };
    Verdict verdict = Verdict::not_detected;
    std::size_t peak_index = 0;
    double peak_mi = 0.0;
    double excess_front = 0.0;  // peak minus first point
    double excess_back = 0.0;   // peak minus last point

    bool detected() const { return verdict == Verdict::detected; }
};

inline SrReport detect_sr(std::span<const double> mi, std::span<const double> se, double min_excess = 0.01) {
    if (mi.size() != se.size()) throw std::invalid_argument("detect_sr: profile and SE lengths differ");
    if (mi.size() < 5) throw std::invalid_argument("detect_sr: need at least 5 profile points");

    SrReport report;
    report.peak_index = 1;
    for (std::size_t i = 1; i + 1 < mi.size(); ++i)
        if (mi[i] > mi[report.peak_index]) report.peak_index = i;
    report.peak_mi = mi[report.peak_index];
    report.excess_front = report.peak_mi - mi.front();
    report.excess_back = report.peak_mi - mi.back();

    auto combined = [&](std::size_t other) {
        return std::sqrt(se[report.peak_index] * se[report.peak_index] + se[other] * se[other]);
    };
    const double need_front = std::max(3.0 * combined(0), min_excess);
    const double need_back = std::max(3.0 * combined(mi.size() - 1), min_excess);
    if (report.excess_front >= need_front && report.excess_back >= need_back) {
        report.verdict = SrReport::Verdict::detected;
        return report;
    }

    // flat within noise -> too noisy to classify
    double lo = mi[0], hi = mi[0], se_max = se[0];
    for (std::size_t i = 1; i < mi.size(); ++i) {
        lo = std::min(lo, mi[i]);
        hi = std::max(hi, mi[i]);
        se_max = std::max(se_max, se[i]);
    }
    report.verdict = hi - lo <= 3.0 * se_max * std::numbers::sqrt2 ? SrReport::Verdict::inconclusive
                                                                   : SrReport::Verdict::not_detected;
    return report;
}

// ---- optimal-noise search ---------------------------------------------------

struct NoiseSearchResult {
    double noise_level = 0.0;
    double mi_estimate = 0.0;
    double tolerance = 0.0;
    bool sr_predicted = true;  // false: returned the lower bound with a warning
};

namespace detail {

inline double mc_mi_at(const ModelParams& base, NoiseAxisKind kind, double noise_value,
                       std::uint64_t trials, std::uint64_t seed) {
    ModelParams params = base;
    if (auto* basic = std::get_if<BasicModelParams>(&params))
        set_noise_level(std::get<StableParams>(basic->channel_noise), kind, noise_value);
    else
        set_noise_level(std::get<StableParams>(std::get<CvqkdParams>(params).channel_noise), kind, noise_value);
    RngStream rng(seed, 0);  // common random numbers across evaluations
    return estimate_mi(run_model_batch(params, trials, rng));
}

inline IntervalVerdict search_verdict(const ModelParams& params) {
    if (const auto* basic = std::get_if<BasicModelParams>(&params)) {
        return basic_interval_verdict(basic->alpha_x, basic->theta,
                                      channel_location(basic->channel_noise));
    }
    const auto& qkd = std::get<CvqkdParams>(params);
    return cvqkd_interval_verdict(qkd.alpha, qkd.theta, channel_location(qkd.channel_noise));
}

}  // namespace detail

// Coarse scan plus golden-section refinement of the Monte Carlo MI over the
// noise level. Evaluations share one substream (common random numbers), which
// makes the noisy objective a fixed function of the noise level and keeps the
// bracketing comparisons consistent. When the relevant theorem predicts no
// noise benefit the search returns the lower bound with a warning instead.
inline NoiseSearchResult find_optimal_noise(const ModelParams& params, NoiseAxisKind kind,
                                            double noise_lo, double noise_hi,
                                            std::uint64_t trial_budget, std::uint64_t seed) {
    std::visit([](const auto& p) { p.validate(); }, params);
    if (!(noise_lo > 0.0) || !(noise_hi > noise_lo)) throw std::invalid_argument("noise search: bounds must satisfy 0 < lo < hi");
    const auto* stable = std::get_if<StableParams>(SweepSpec::channel_of(params));
    if (!stable) throw std::invalid_argument("noise search: requires a stable-family channel law");
    if (kind == NoiseAxisKind::sigma && !stable->is_gaussian())
        throw std::invalid_argument("noise search: sigma axis requires a Gaussian channel law");

    constexpr int kCoarsePoints = 12;
    constexpr int kGoldenEvals = 16;
    const std::uint64_t per_eval = trial_budget / (kCoarsePoints + kGoldenEvals);
    if (per_eval < 2000) throw std::invalid_argument("noise search: trial budget too small for the grid");

    NoiseSearchResult result;
    result.tolerance = (noise_hi - noise_lo) * 0.01;

    const IntervalVerdict verdict = detail::search_verdict(params);
    if (!verdict.sr_predicted) {
        result.sr_predicted = false;
        result.noise_level = noise_lo;
        result.mi_estimate = detail::mc_mi_at(params, kind, noise_lo, per_eval, seed);
        return result;
    }

    auto objective = [&](double noise) { return detail::mc_mi_at(params, kind, noise, per_eval, seed); };

    double best_value = -1.0;
    int best_index = 0;
    std::vector<double> grid(kCoarsePoints);
    for (int i = 0; i < kCoarsePoints; ++i) {
        grid[static_cast<std::size_t>(i)] = noise_lo + (noise_hi - noise_lo) * i / (kCoarsePoints - 1);
        const double value = objective(grid[static_cast<std::size_t>(i)]);
        if (value > best_value) {
            best_value = value;
            best_index = i;
        }
    }

    double a = grid[static_cast<std::size_t>(std::max(0, best_index - 1))];
    double b = grid[static_cast<std::size_t>(std::min(kCoarsePoints - 1, best_index + 1))];
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    int evals = 2;
    while (b - a > result.tolerance && evals < kGoldenEvals) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = objective(x1);
        }
        ++evals;
    }
    result.noise_level = 0.5 * (a + b);
    result.mi_estimate = std::max(f1, f2);
    return result;
}

}  // namespace qsr
