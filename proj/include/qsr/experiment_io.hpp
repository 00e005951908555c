#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qsr/experiment.hpp"
#include "qsr/forbidden_interval.hpp"
#include "qsr/verify.hpp"

namespace qsr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace io_detail {

inline double require_number(const nlohmann::json& obj, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number()) throw ConfigError("config: missing numeric field '" + key + "'");
    return obj[key].get<double>();
}

inline double number_or(const nlohmann::json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError("config: field '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline std::vector<double> parse_axis(const nlohmann::json& axis, const std::string& name) {
    if (axis.contains("values")) {
        if (!axis["values"].is_array() || axis["values"].empty())
            throw ConfigError("config: '" + name + ".values' must be a nonempty array");
        return axis["values"].get<std::vector<double>>();
    }
    const double lo = require_number(axis, "min");
    const double hi = require_number(axis, "max");
    if (!axis.contains("points") || !axis["points"].is_number_integer())
        throw ConfigError("config: '" + name + ".points' must be an integer");
    const int points = axis["points"].get<int>();
    if (points < 1) throw ConfigError("config: '" + name + ".points' must be >= 1");
    if (points == 1) {
        if (lo != hi) throw ConfigError("config: single-point axis '" + name + "' needs min == max");
        return {lo};
    }
    std::vector<double> values(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        values[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return values;
}

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

inline std::string format_double(double v, const char* fmt = "%.12g") {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), fmt, v);
    return buffer;
}

}  // namespace io_detail

inline StableParams parse_channel_noise(const nlohmann::json& obj) {
    if (!obj.is_object()) throw ConfigError("config: 'channel_noise' must be an object");
    StableParams law;
    law.alpha = io_detail::number_or(obj, "alpha", 2.0);
    law.beta = io_detail::number_or(obj, "beta", 0.0);
    law.gamma = io_detail::number_or(obj, "gamma", 0.0);
    law.location = io_detail::number_or(obj, "location", 0.0);
    try {
        law.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return law;
}

inline ModelParams parse_model_params(const nlohmann::json& doc) {
    if (!doc.contains("model") || !doc["model"].is_string()) throw ConfigError("config: missing 'model'");
    const std::string model = doc["model"].get<std::string>();
    if (!doc.contains("params") || !doc["params"].is_object()) throw ConfigError("config: missing 'params'");
    const auto& p = doc["params"];
    const StableParams channel =
        p.contains("channel_noise") ? parse_channel_noise(p["channel_noise"]) : StableParams{2.0, 0.0, 0.0, 0.0};

    if (model == "basic") {
        BasicModelParams params;
        params.alpha_x = io_detail::require_number(p, "alpha_x");
        params.theta = io_detail::require_number(p, "theta");
        params.r = io_detail::number_or(p, "r", 0.0);
        params.eta = io_detail::number_or(p, "eta", 1.0);
        params.p_s1 = io_detail::number_or(p, "p_s1", 0.5);
        params.channel_noise = channel;
        return params;
    }
    if (model == "cvqkd") {
        CvqkdParams params;
        params.alpha = io_detail::require_number(p, "alpha");
        params.theta = io_detail::require_number(p, "theta");
        params.r = io_detail::number_or(p, "r", 0.0);
        params.gain = io_detail::number_or(p, "gain", 1.0);
        params.eta_e = io_detail::number_or(p, "eta_e", 1.0);
        params.eta_b = io_detail::number_or(p, "eta_b", 1.0);
        params.p_s1 = io_detail::number_or(p, "p_s1", 0.5);
        params.channel_noise = channel;
        return params;
    }
    throw ConfigError("config: model must be 'basic' or 'cvqkd'");
}

inline SweepSpec parse_sweep_spec(const nlohmann::json& doc) {
    SweepSpec spec;
    spec.params = parse_model_params(doc);
    if (!doc.contains("sweep") || !doc["sweep"].is_object()) throw ConfigError("config: missing 'sweep'");
    const auto& sweep = doc["sweep"];

    if (!sweep.contains("noise_axis")) throw ConfigError("config: missing 'sweep.noise_axis'");
    const auto& noise_axis = sweep["noise_axis"];
    const std::string kind = noise_axis.contains("kind") ? noise_axis["kind"].get<std::string>() : "sigma";
    if (kind == "sigma")
        spec.noise_axis_kind = NoiseAxisKind::sigma;
    else if (kind == "gamma")
        spec.noise_axis_kind = NoiseAxisKind::gamma;
    else
        throw ConfigError("config: noise_axis.kind must be 'sigma' or 'gamma'");
    spec.noise_values = io_detail::parse_axis(noise_axis, "noise_axis");

    if (!sweep.contains("r_axis")) throw ConfigError("config: missing 'sweep.r_axis'");
    spec.r_values = io_detail::parse_axis(sweep["r_axis"], "r_axis");

    spec.trials_per_run = static_cast<int>(io_detail::require_number(sweep, "trials_per_run"));
    spec.runs = static_cast<int>(io_detail::require_number(sweep, "runs"));

    if (sweep.contains("smoothing")) {
        const auto& smoothing = sweep["smoothing"];
        const std::string skind = smoothing.contains("kind") ? smoothing["kind"].get<std::string>() : "none";
        if (skind == "none")
            spec.smoothing.kind = Smoothing::Kind::none;
        else if (skind == "grid-kernel")
            spec.smoothing.kind = Smoothing::Kind::grid_kernel;
        else
            throw ConfigError("config: smoothing.kind must be 'none' or 'grid-kernel'");
        spec.smoothing.bandwidth = io_detail::number_or(smoothing, "bandwidth", 1.0);
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ConfigError("config: 'seed' must be an integer");
        spec.seed = doc["seed"].get<std::uint64_t>();
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return spec;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return doc;
}

inline SweepSpec load_sweep_spec(const std::string& path) { return parse_sweep_spec(load_json_file(path)); }

// Canonical serialization of everything that determines the sweep output
// except the seed; hashed into the provenance record.
inline nlohmann::json sweep_spec_json(const SweepSpec& spec) {
    nlohmann::json doc;
    std::visit(
        [&doc](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            nlohmann::json params;
            if constexpr (std::is_same_v<T, BasicModelParams>) {
                doc["model"] = "basic";
                params["alpha_x"] = p.alpha_x;
                params["theta"] = p.theta;
                params["eta"] = p.eta;
            } else {
                doc["model"] = "cvqkd";
                params["alpha"] = p.alpha;
                params["theta"] = p.theta;
                params["gain"] = p.gain;
                params["eta_e"] = p.eta_e;
                params["eta_b"] = p.eta_b;
            }
            params["r"] = p.r;
            params["p_s1"] = p.p_s1;
            const auto& law = std::get<StableParams>(p.channel_noise);
            params["channel_noise"] = {{"alpha", law.alpha}, {"beta", law.beta}, {"gamma", law.gamma}, {"location", law.location}};
            doc["params"] = params;
        },
        spec.params);
    doc["noise_axis_kind"] = spec.noise_axis_kind == NoiseAxisKind::sigma ? "sigma" : "gamma";
    doc["noise_values"] = spec.noise_values;
    doc["r_values"] = spec.r_values;
    doc["trials_per_run"] = spec.trials_per_run;
    doc["runs"] = spec.runs;
    doc["smoothing"] = {{"kind", spec.smoothing.kind == Smoothing::Kind::none ? "none" : "grid-kernel"},
                        {"bandwidth", spec.smoothing.bandwidth}};
    return doc;
}

inline std::string sweep_spec_hash(const SweepSpec& spec) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx",
                  static_cast<unsigned long long>(io_detail::fnv1a(sweep_spec_json(spec).dump())));
    return buffer;
}

inline std::string sweep_csv(const SweepResult& result) {
    std::string out = "noise,r,mi_mean,mi_se,runs,trials\n";
    for (const auto& cell : result.cells) {
        out += io_detail::format_double(cell.noise);
        out += ',';
        out += io_detail::format_double(cell.r);
        out += ',';
        out += io_detail::format_double(cell.mi_mean);
        out += ',';
        out += io_detail::format_double(cell.mi_se);
        out += ',';
        out += std::to_string(result.runs);
        out += ',';
        out += std::to_string(result.trials_per_run);
        out += '\n';
    }
    return out;
}

inline nlohmann::json provenance_json(const SweepSpec& spec, const SweepResult& result) {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return {
        {"seed", result.seed},
        {"spec_hash", sweep_spec_hash(spec)},
        {"created_utc", stamp},
        {"spec", sweep_spec_json(spec)},
    };
}

/// Writes via a temp file and rename; no partial outputs are left behind.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << contents;
        if (!out.good()) {
            out.close();
            std::remove(tmp.c_str());
            throw std::runtime_error("failed writing " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("failed to move " + tmp + " into place");
    }
}

inline nlohmann::json verdict_json(const std::string& model, const IntervalVerdict& verdict) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& interval : verdict.intervals) intervals.push_back({interval.lo, interval.hi});
    return {
        {"model", model},
        {"intervals", intervals},
        {"location", verdict.location_tested},
        {"sr_predicted", verdict.sr_predicted},
        {"boundary", verdict.boundary_flag},
        {"subthreshold_ok", verdict.hypothesis_ok},
    };
}

inline nlohmann::json verify_report_json(const VerifyReport& report) {
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& c : report.cases) cases.push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
    return {
        {"suite", report.suite},
        {"seed", report.seed},
        {"passed", report.all_passed()},
        {"cases", cases},
    };
}

}  // namespace qsr
