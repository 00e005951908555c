// Command-line front end: forbidden-interval queries, Monte Carlo sweeps,
// single-batch simulation, theorem verification suites, and optimal-noise
// search. Machine-readable results go to stdout as JSON (one object per
// line); human-oriented summaries and errors go to stderr.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsr/experiment.hpp"
#include "qsr/experiment_io.hpp"
#include "qsr/forbidden_interval.hpp"
#include "qsr/verify.hpp"

namespace {

std::optional<std::uint64_t> env_seed() {
    const char* value = std::getenv("QSR_SEED");
    if (!value || !*value) return std::nullopt;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end == value || *end != '\0') {
        std::cerr << "warning: ignoring unparsable QSR_SEED\n";
        return std::nullopt;
    }
    return parsed;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (const auto env = env_seed()) return *env;
    return fallback;
}

std::string provenance_path(const std::string& output) {
    const std::string suffix = ".csv";
    if (output.size() > suffix.size() && output.compare(output.size() - suffix.size(), suffix.size(), suffix) == 0)
        return output.substr(0, output.size() - suffix.size()) + ".provenance.json";
    return output + ".provenance.json";
}

int run_interval(const std::string& model, std::optional<double> alpha_x, std::optional<double> alpha,
                 double theta, double location) {
    qsr::IntervalVerdict verdict;
    if (model == "basic") {
        if (!alpha_x) {
            std::cerr << "error: --model basic requires --alpha-x\n";
            return 1;
        }
        verdict = qsr::basic_interval_verdict(*alpha_x, theta, location);
    } else if (model == "cvqkd") {
        if (!alpha) {
            std::cerr << "error: --model cvqkd requires --alpha\n";
            return 1;
        }
        verdict = qsr::cvqkd_interval_verdict(*alpha, theta, location);
    } else {
        std::cerr << "error: --model must be 'basic' or 'cvqkd'\n";
        return 1;
    }
    std::cout << qsr::verdict_json(model, verdict).dump() << "\n";
    if (verdict.boundary_flag) return 3;
    return verdict.sr_predicted ? 0 : 2;
}

int run_sweep_command(const std::string& config_path, const std::string& output_path,
                      std::optional<std::uint64_t> seed_flag, int parallelism) {
    qsr::SweepSpec spec = qsr::load_sweep_spec(config_path);
    spec.seed = resolve_seed(seed_flag, spec.seed);

    const qsr::SweepResult result = qsr::run_sweep(spec, parallelism);
    qsr::write_file_atomic(output_path, qsr::sweep_csv(result));
    qsr::write_file_atomic(provenance_path(output_path), qsr::provenance_json(spec, result).dump(2) + "\n");

    const qsr::SweepCell* peak = &result.cells.front();
    for (const auto& cell : result.cells)
        if (cell.mi_mean > peak->mi_mean) peak = &cell;
    std::cout << "wrote " << output_path << " (" << result.cells.size() << " cells, " << result.runs
              << " runs x " << result.trials_per_run << " trials, seed " << result.seed << ")\n";
    std::cout << "peak MI " << peak->mi_mean << " bits at noise=" << peak->noise << ", r=" << peak->r << "\n";
    if (result.noise_count >= 5) {
        const auto [mi, se] = result.noise_profile(result.r_count - 1);
        const auto report = qsr::detect_sr(mi, se);
        const char* verdict = report.detected() ? "detected"
                              : report.verdict == qsr::SrReport::Verdict::inconclusive ? "inconclusive"
                                                                                       : "not detected";
        std::cout << "SR along the noise axis at r=" << result.cells[result.r_count - 1].r << ": " << verdict
                  << "\n";
    }
    return 0;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed_flag) {
    const nlohmann::json doc = qsr::load_json_file(config_path);
    const qsr::ModelParams params = qsr::parse_model_params(doc);
    const auto trials = static_cast<std::uint64_t>(qsr::io_detail::number_or(doc, "trials", 10000));
    if (trials == 0) throw qsr::ConfigError("config: 'trials' must be positive");
    std::uint64_t seed = 0;
    if (doc.contains("seed")) seed = doc["seed"].get<std::uint64_t>();
    seed = resolve_seed(seed_flag, seed);

    qsr::RngStream rng(seed);
    nlohmann::json out;
    qsr::JointCounts counts(2);
    if (const auto* basic = std::get_if<qsr::BasicModelParams>(&params)) {
        counts = qsr::run_batch(*basic, trials, rng);
        out["model"] = "basic";
        out["subthreshold"] = basic->subthreshold();
    } else {
        const auto& qkd = std::get<qsr::CvqkdParams>(params);
        counts = qsr::run_cvqkd_batch(qkd, trials, rng);
        out["model"] = "cvqkd";
        out["subthreshold"] = qkd.subthreshold();
    }
    out["trials"] = trials;
    out["seed"] = seed;
    nlohmann::json table = nlohmann::json::array();
    for (int s = 0; s < 2; ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (int y = 0; y < counts.n_outputs; ++y) row.push_back(counts.counts[s][y]);
        table.push_back(row);
    }
    out["counts"] = table;
    out["mi_estimate"] = qsr::estimate_mi(counts);
    try {
        if (const auto* basic = std::get_if<qsr::BasicModelParams>(&params)) {
            const auto probs = qsr::conditional_probs(*basic);
            out["conditional_probs"] = {{probs[0][0], probs[0][1]}, {probs[1][0], probs[1][1]}};
            out["mi_analytic"] = qsr::basic_analytic_mi(*basic);
        } else {
            const auto& qkd = std::get<qsr::CvqkdParams>(params);
            const auto probs = qsr::cvqkd_conditional_probs(qkd);
            out["conditional_probs"] = {{probs[0][0], probs[0][1], probs[0][2]},
                                        {probs[1][0], probs[1][1], probs[1][2]}};
            out["mi_analytic"] = qsr::cvqkd_analytic_mi(qkd);
        }
    } catch (const std::exception&) {
        out["mi_analytic"] = nullptr;  // no usable CDF for this channel law
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int run_verify(const std::string& suite, std::optional<std::uint64_t> seed_flag) {
    const auto names = qsr::verify_suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "error: unknown suite '" << suite << "'; available:";
        for (const auto& name : names) std::cerr << " " << name;
        std::cerr << "\n";
        return 1;
    }
    const std::uint64_t seed = resolve_seed(seed_flag, qsr::kDefaultVerifySeed);
    const qsr::VerifyReport report = qsr::run_verify_suite(suite, seed);
    std::cout << qsr::verify_report_json(report).dump() << "\n";
    if (!report.all_passed()) {
        const auto* failure = report.first_failure();
        std::cerr << "suite " << suite << " FAILED at case '" << failure->name << "': " << failure->details
                  << "\n";
        return 4;
    }
    return 0;
}

struct OptimizeOptions {
    std::string model = "basic";
    std::optional<double> alpha_x;
    std::optional<double> alpha;
    double theta = 0.0;
    double r = 0.0;
    double eta = 1.0;
    double gain = 1.0;
    double eta_e = 1.0;
    double eta_b = 1.0;
    double channel_alpha = 2.0;
    double channel_beta = 0.0;
    double location = 0.0;
    std::string noise_kind;
    double noise_min = 0.0;
    double noise_max = 0.0;
    std::uint64_t budget = 0;
};

int run_optimize(const OptimizeOptions& opt, std::optional<std::uint64_t> seed_flag) {
    const qsr::StableParams channel{opt.channel_alpha, opt.channel_beta, 0.0, opt.location};
    qsr::ModelParams params;
    if (opt.model == "basic") {
        if (!opt.alpha_x) {
            std::cerr << "error: --model basic requires --alpha-x\n";
            return 1;
        }
        qsr::BasicModelParams basic;
        basic.alpha_x = *opt.alpha_x;
        basic.theta = opt.theta;
        basic.r = opt.r;
        basic.eta = opt.eta;
        basic.channel_noise = channel;
        params = basic;
    } else if (opt.model == "cvqkd") {
        if (!opt.alpha) {
            std::cerr << "error: --model cvqkd requires --alpha\n";
            return 1;
        }
        qsr::CvqkdParams qkd;
        qkd.alpha = *opt.alpha;
        qkd.theta = opt.theta;
        qkd.r = opt.r;
        qkd.gain = opt.gain;
        qkd.eta_e = opt.eta_e;
        qkd.eta_b = opt.eta_b;
        qkd.channel_noise = channel;
        params = qkd;
    } else {
        std::cerr << "error: --model must be 'basic' or 'cvqkd'\n";
        return 1;
    }
    qsr::NoiseAxisKind kind;
    if (opt.noise_kind == "sigma" || (opt.noise_kind.empty() && opt.channel_alpha == 2.0))
        kind = qsr::NoiseAxisKind::sigma;
    else if (opt.noise_kind == "gamma" || opt.noise_kind.empty())
        kind = qsr::NoiseAxisKind::gamma;
    else {
        std::cerr << "error: --noise-kind must be 'sigma' or 'gamma'\n";
        return 1;
    }

    const std::uint64_t seed = resolve_seed(seed_flag, 0);
    const qsr::NoiseSearchResult result =
        qsr::find_optimal_noise(params, kind, opt.noise_min, opt.noise_max, opt.budget, seed);
    nlohmann::json out = {
        {"model", opt.model},
        {"noise_kind", kind == qsr::NoiseAxisKind::sigma ? "sigma" : "gamma"},
        {"noise_level", result.noise_level},
        {"mi_estimate", result.mi_estimate},
        {"tolerance", result.tolerance},
        {"sr_predicted", result.sr_predicted},
    };
    if (!result.sr_predicted)
        out["warning"] = "no noise benefit predicted for this location; returning the lower bound";
    std::cout << out.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic-resonance noise-benefit simulator for threshold quantum communication models"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_flag;

    auto* interval = app.add_subcommand("interval", "evaluate the forbidden-interval predicate");
    std::string interval_model;
    std::optional<double> interval_alpha_x, interval_alpha;
    double interval_theta = 0.0, interval_location = 0.0;
    interval->add_option("--model", interval_model, "basic or cvqkd")->required();
    interval->add_option("--alpha-x", interval_alpha_x, "signal amplitude (basic model)");
    interval->add_option("--alpha", interval_alpha, "coherent amplitude (cvqkd model)");
    interval->add_option("--theta", interval_theta, "decoding threshold")->required();
    interval->add_option("--location", interval_location, "noise mean or location to test")->required();

    auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep from a JSON config");
    std::string sweep_config, sweep_output;
    int parallelism = 0;
    sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
    sweep->add_option("--output", sweep_output, "output CSV path")->required();
    sweep->add_option("--seed", seed_flag, "seed override (wins over QSR_SEED and the config)");
    sweep->add_option("--parallelism", parallelism, "worker count (default: hardware)");

    auto* simulate = app.add_subcommand("simulate", "run one Monte Carlo batch from a JSON config");
    std::string simulate_config;
    simulate->add_option("--config", simulate_config, "model config JSON")->required();
    simulate->add_option("--seed", seed_flag, "seed override");

    auto* verify = app.add_subcommand("verify", "run a theorem verification suite");
    std::string verify_suite;
    verify->add_option("suite", verify_suite, "suite name")->required();
    verify->add_option("--seed", seed_flag, "seed override");

    auto* optimize = app.add_subcommand("optimize", "search for the MI-maximizing noise level");
    OptimizeOptions opt;
    optimize->add_option("--model", opt.model, "basic or cvqkd")->required();
    optimize->add_option("--alpha-x", opt.alpha_x, "signal amplitude (basic)");
    optimize->add_option("--alpha", opt.alpha, "coherent amplitude (cvqkd)");
    optimize->add_option("--theta", opt.theta, "decoding threshold")->required();
    optimize->add_option("--r", opt.r, "squeezing strength");
    optimize->add_option("--eta", opt.eta, "homodyne efficiency (basic)");
    optimize->add_option("--gain", opt.gain, "amplifier gain (cvqkd)");
    optimize->add_option("--eta-e", opt.eta_e, "beamsplitter transmittivity (cvqkd)");
    optimize->add_option("--eta-b", opt.eta_b, "homodyne efficiency (cvqkd)");
    optimize->add_option("--channel-alpha", opt.channel_alpha, "channel stable exponent (default 2)");
    optimize->add_option("--channel-beta", opt.channel_beta, "channel skewness (default 0)");
    optimize->add_option("--location", opt.location, "channel noise location");
    optimize->add_option("--noise-kind", opt.noise_kind, "sigma or gamma (default by exponent)");
    optimize->add_option("--noise-min", opt.noise_min, "lower noise bound")->required();
    optimize->add_option("--noise-max", opt.noise_max, "upper noise bound")->required();
    optimize->add_option("--budget", opt.budget, "total Monte Carlo trial budget")->required();
    optimize->add_option("--seed", seed_flag, "seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(interval))
            return run_interval(interval_model, interval_alpha_x, interval_alpha, interval_theta, interval_location);
        if (app.got_subcommand(sweep)) return run_sweep_command(sweep_config, sweep_output, seed_flag, parallelism);
        if (app.got_subcommand(simulate)) return run_simulate(simulate_config, seed_flag);
        if (app.got_subcommand(verify)) return run_verify(verify_suite, seed_flag);
        if (app.got_subcommand(optimize)) return run_optimize(opt, seed_flag);
    } catch (const qsr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 1;
}
