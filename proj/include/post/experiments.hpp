#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "post/gates.hpp"
#include "post/kernel_approx.hpp"
#include "post/recurrence.hpp"
#include "post/spacing_mc.hpp"
#include "post/spectrum.hpp"
#include "post/taper.hpp"
#include "post/version.hpp"

namespace post::experiments {

using nlohmann::json;

// Validation failure; carries one message per violated field.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(std::vector<std::string> v)
        : std::invalid_argument(joined(v)), violations(std::move(v)) {}
    std::vector<std::string> violations;

  private:
    static std::string joined(const std::vector<std::string>& v) {
        std::string s = "invalid config:";
        for (const auto& m : v) {
            s += "\n  - ";
            s += m;
        }
        return s;
    }
};

struct IoError : std::runtime_error {
    IoError(const std::string& what, std::string path_)
        : std::runtime_error(what + ": " + path_), path(std::move(path_)) {}
    std::string path;
};

// A cell is an integer, a double, or text; std::monostate marks an absent
// value (rendered as an empty CSV field / JSON null).
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw std::logic_error("ResultTable: ragged row");
        }
        rows.push_back(std::move(row));
    }
};

struct RunMetadata {
    std::string experiment;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    json config;       // canonical echo of the input config
    json extra;        // experiment-specific summary values
    double walltime_s = 0.0;
};

struct RunResult {
    ResultTable table;
    RunMetadata meta;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_cell(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return "";
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
    return std::get<std::string>(cell);
}

inline json cell_to_json(const Cell& cell) {
    if (std::holds_alternative<std::monostate>(cell)) return nullptr;
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
    if (const auto* d = std::get_if<double>(&cell)) return *d;
    return std::get<std::string>(cell);
}

// Field-by-field config reader that collects every violation before failing.
class ConfigReader {
  public:
    ConfigReader(const json& obj, std::string scope) : obj_(obj), scope_(std::move(scope)) {
        if (!obj_.is_object()) {
            issues_.push_back(scope_ + ": expected a JSON object");
        }
    }

    bool has(const std::string& key) const { return obj_.is_object() && obj_.contains(key); }

    std::int64_t require_int(const std::string& key, std::int64_t lo, std::int64_t hi) {
        mark(key);
        if (!has(key)) {
            complain(key, "is required");
            return lo;
        }
        return read_int(key, lo, hi);
    }

    std::int64_t optional_int(const std::string& key, std::int64_t fallback,
                              std::int64_t lo, std::int64_t hi) {
        mark(key);
        if (!has(key)) return fallback;
        return read_int(key, lo, hi);
    }

    double require_double(const std::string& key, double lo, double hi,
                          bool open_lo = false, bool open_hi = false) {
        mark(key);
        if (!has(key)) {
            complain(key, "is required");
            return lo;
        }
        return read_double(key, lo, hi, open_lo, open_hi);
    }

    double optional_double(const std::string& key, double fallback, double lo, double hi,
                           bool open_lo = false, bool open_hi = false) {
        mark(key);
        if (!has(key)) return fallback;
        return read_double(key, lo, hi, open_lo, open_hi);
    }

    std::string require_choice(const std::string& key,
                               const std::vector<std::string>& choices) {
        mark(key);
        if (!has(key)) {
            complain(key, "is required");
            return choices.front();
        }
        return read_choice(key, choices);
    }

    std::string optional_choice(const std::string& key, const std::string& fallback,
                                const std::vector<std::string>& choices) {
        mark(key);
        if (!has(key)) return fallback;
        return read_choice(key, choices);
    }

    std::string optional_string(const std::string& key, const std::string& fallback) {
        mark(key);
        if (!has(key)) return fallback;
        if (!obj_[key].is_string()) {
            complain(key, "must be a string");
            return fallback;
        }
        return obj_[key].get<std::string>();
    }

    std::vector<std::int64_t> require_int_list(const std::string& key, std::int64_t lo,
                                               std::int64_t hi, bool ascending) {
        mark(key);
        std::vector<std::int64_t> out;
        if (!has(key)) {
            complain(key, "is required");
            return out;
        }
        const json& arr = obj_[key];
        if (!arr.is_array() || arr.empty()) {
            complain(key, "must be a non-empty array of integers");
            return out;
        }
        for (const auto& v : arr) {
            if (!v.is_number_integer() && !v.is_number_unsigned()) {
                complain(key, "must contain only integers");
                return {};
            }
            out.push_back(v.get<std::int64_t>());
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] < lo || out[i] > hi) {
                complain(key, "entries must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
                return {};
            }
            if (ascending && i > 0 && out[i] <= out[i - 1]) {
                complain(key, "entries must be strictly ascending");
                return {};
            }
        }
        return out;
    }

    std::vector<std::int64_t> optional_int_list(const std::string& key,
                                                std::vector<std::int64_t> fallback,
                                                std::int64_t lo, std::int64_t hi,
                                                bool ascending) {
        mark(key);
        if (!has(key)) return fallback;
        return require_int_list_marked(key, lo, hi, ascending);
    }

    void mark_known(const std::string& key) { mark(key); }

    void reject_unknown_keys() {
        if (!obj_.is_object()) return;
        for (const auto& item : obj_.items()) {
            if (!known_.count(item.key())) {
                complain(item.key(), "is not a recognized key");
            }
        }
    }

    const std::vector<std::string>& issues() const { return issues_; }
    void adopt_issues(const ConfigReader& other) {
        issues_.insert(issues_.end(), other.issues_.begin(), other.issues_.end());
    }
    void complain(const std::string& key, const std::string& what) {
        issues_.push_back(scope_.empty() ? key + " " + what : scope_ + "." + key + " " + what);
    }

  private:
    std::vector<std::int64_t> require_int_list_marked(const std::string& key, std::int64_t lo,
                                                      std::int64_t hi, bool ascending) {
        // same as require_int_list but the key is already marked present
        std::vector<std::int64_t> out;
        const json& arr = obj_[key];
        if (!arr.is_array() || arr.empty()) {
            complain(key, "must be a non-empty array of integers");
            return out;
        }
        for (const auto& v : arr) {
            if (!v.is_number_integer() && !v.is_number_unsigned()) {
                complain(key, "must contain only integers");
                return {};
            }
            out.push_back(v.get<std::int64_t>());
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] < lo || out[i] > hi) {
                complain(key, "entries must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "]");
                return {};
            }
            if (ascending && i > 0 && out[i] <= out[i - 1]) {
                complain(key, "entries must be strictly ascending");
                return {};
            }
        }
        return out;
    }

    std::int64_t read_int(const std::string& key, std::int64_t lo, std::int64_t hi) {
        const json& v = obj_[key];
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
            complain(key, "must be an integer");
            return lo;
        }
        const std::int64_t x = v.get<std::int64_t>();
        if (x < lo || x > hi) {
            complain(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return lo;
        }
        return x;
    }

    double read_double(const std::string& key, double lo, double hi, bool open_lo,
                       bool open_hi) {
        const json& v = obj_[key];
        if (!v.is_number()) {
            complain(key, "must be a number");
            return lo;
        }
        const double x = v.get<double>();
        const bool below = open_lo ? !(x > lo) : !(x >= lo);
        const bool above = open_hi ? !(x < hi) : !(x <= hi);
        if (below || above) {
            complain(key, "must lie in " + std::string(open_lo ? "(" : "[") +
                              format_double(lo) + ", " + format_double(hi) +
                              (open_hi ? ")" : "]"));
            return lo;
        }
        return x;
    }

    std::string read_choice(const std::string& key, const std::vector<std::string>& choices) {
        const json& v = obj_[key];
        if (!v.is_string()) {
            complain(key, "must be a string");
            return choices.front();
        }
        const std::string s = v.get<std::string>();
        for (const auto& c : choices) {
            if (s == c) return s;
        }
        std::string allowed;
        for (const auto& c : choices) {
            if (!allowed.empty()) allowed += "|";
            allowed += c;
        }
        complain(key, "must be one of " + allowed);
        return choices.front();
    }

    void mark(const std::string& key) { known_.insert(key); }

    const json& obj_;
    std::string scope_;
    std::set<std::string> known_;
    std::vector<std::string> issues_;
};

inline std::vector<std::size_t> to_sizes(const std::vector<std::int64_t>& v) {
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::size_t>(v[i]);
    return out;
}

inline std::vector<std::uint64_t> to_u64(const std::vector<std::int64_t>& v) {
    std::vector<std::uint64_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::uint64_t>(v[i]);
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "spectrum-report", "collapse",   "approx-rates", "scale-mismatch",
        "taper-check",     "gates-dump", "impulse",      "energy",
    };
    return names;
}

// Runs one experiment described by a config object:
//   { "experiment": ..., "params": {...}, "output": path, "format": "csv"|"json",
//     "seed": u64, "threads": n }
// Deterministic for a fixed (config, seed): rerunning yields byte-identical
// output apart from the wall-time metadata field.
inline RunResult run_experiment(const json& config, const Overrides& overrides = {}) {
    const auto start = std::chrono::steady_clock::now();

    detail::ConfigReader top(config, "");
    const std::string name = top.require_choice("experiment", experiment_names());
    const auto seed = static_cast<std::uint64_t>(
        top.optional_int("seed", 0, 0, std::numeric_limits<std::int64_t>::max()));
    const auto threads = static_cast<unsigned>(top.optional_int("threads", 1, 1, 4096));
    top.optional_string("output", "");
    top.optional_choice("format", "csv", {"csv", "json"});
    top.mark_known("params");
    const json params_json = config.is_object() && config.contains("params")
                                 ? config.at("params")
                                 : json::object();
    detail::ConfigReader params(params_json, "params");

    RunResult result;
    result.meta.experiment = name;
    result.meta.seed = overrides.seed.value_or(seed);
    result.meta.threads = overrides.threads.value_or(threads);
    result.meta.config = config;
    result.meta.extra = json::object();

    const std::uint64_t eff_seed = result.meta.seed;
    const unsigned eff_threads = result.meta.threads;

    auto finish_validation = [&]() {
        top.reject_unknown_keys();
        params.reject_unknown_keys();
        std::vector<std::string> issues = top.issues();
        issues.insert(issues.end(), params.issues().begin(), params.issues().end());
        if (!issues.empty()) throw ValidationError(std::move(issues));
    };

    if (name == "spectrum-report") {
        const auto n = static_cast<std::size_t>(params.require_int("N", 2, 1 << 20));
        const double T = params.require_double("T", 1.0, 1e18, true, false);
        finish_validation();

        const DecaySpectrum spectrum = post_map(geometric_init(n, T));
        const TaperVector taper = adaptive_taper(spectrum, T);
        const SpectrumStats stats = spectrum_stats(spectrum);
        result.table.columns = {"k", "p", "rate", "timescale", "alpha"};
        for (std::size_t k = 0; k < n; ++k) {
            result.table.add_row({static_cast<std::int64_t>(k + 1), spectrum.p[k],
                                  spectrum.rate(k), spectrum.timescale(k),
                                  taper.alpha[k]});
        }
        result.meta.extra["min_gap"] = *stats.min_gap;
        result.meta.extra["max_gap"] = *stats.max_gap;
        result.meta.extra["mean_gap"] = *stats.mean_gap;
        result.meta.extra["max_coherence"] = *stats.max_coherence;
    } else if (name == "collapse") {
        const auto n_list = detail::to_sizes(params.require_int_list("N_list", 2, 1 << 16, true));
        const auto trials =
            static_cast<std::size_t>(params.require_int("trials", 10000, 100000000));
        const double a = params.optional_double("a", 0.0, -1e9, 1e9);
        const double b = params.optional_double("b", 1.0, -1e9, 1e9);
        const std::string density_name =
            params.optional_choice("density", "uniform", {"uniform", "ramp"});
        if (!(b > a)) params.complain("b", "must exceed a");
        finish_validation();

        const SpacingDensity density = density_name == "uniform"
                                           ? SpacingDensity::uniform
                                           : SpacingDensity::linear_ramp;
        result.table.columns = {"N",      "mean_min_gap",       "closed_form",
                                "stderr", "mean_max_coherence", "mean_max_gap",
                                "ks_distance"};
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            const GapTrialResult r =
                min_gap_mc(n_list[i], trials, a, b, eff_seed + i, density, eff_threads);
            const double nm = static_cast<double>(n_list[i]);
            // Tight value for the uniform density; upper bound (floor m = 1/2
            // of the unit-interval ramp, rescaled) otherwise.
            const double closed =
                density == SpacingDensity::uniform
                    ? (b - a) / ((nm - 1.0) * (nm + 1.0))
                    : 2.0 * (b - a) / ((nm - 1.0) * (nm + 1.0));
            result.table.add_row(
                {static_cast<std::int64_t>(n_list[i]), r.mean_min_gap, closed,
                 r.stderr_min_gap,
                 r.mean_max_coherence ? Cell(*r.mean_max_coherence) : Cell(std::monostate{}),
                 r.mean_max_gap,
                 r.ks_distance ? Cell(*r.ks_distance) : Cell(std::monostate{})});
        }
    } else if (name == "approx-rates") {
        const std::string strategy_name =
            params.require_choice("strategy", {"random", "linear", "geometric"});
        const double beta = params.require_double("beta", 0.0, 1.0, true, true);
        const double T = params.require_double("T", 1.0, 1e18, true, false);
        const auto n_list = detail::to_sizes(params.require_int_list("N_list", 1, 512, true));
        std::vector<std::int64_t> default_seeds;
        for (std::int64_t s = 0; s < 8; ++s) default_seeds.push_back(s);
        const auto seeds = detail::to_u64(params.optional_int_list(
            "seeds", default_seeds, 0, std::numeric_limits<std::int64_t>::max(), false));
        const auto grid = static_cast<std::size_t>(
            params.optional_int("grid_size", 8192, 64, 1 << 20));
        if (!n_list.empty() && grid < 4 * n_list.back()) {
            params.complain("grid_size", "must be at least 4 * max(N_list)");
        }
        finish_validation();

        const NodeStrategy strategy = strategy_name == "random" ? NodeStrategy::random
                                      : strategy_name == "linear"
                                          ? NodeStrategy::linear
                                          : NodeStrategy::geometric;
        const RateExperiment e =
            rate_experiment(strategy, beta, T, n_list, seeds, grid, eff_threads);
        if (strategy == NodeStrategy::random) {
            result.table.columns = {"N", "sup_error_median", "sup_error_q1", "sup_error_q3"};
            for (const auto& p : e.points) {
                result.table.add_row({static_cast<std::int64_t>(p.n), p.sup_error, p.q1, p.q3});
            }
        } else {
            result.table.columns = {"N", "sup_error"};
            for (const auto& p : e.points) {
                result.table.add_row({static_cast<std::int64_t>(p.n), p.sup_error});
            }
        }
        if (e.fit_slope) {
            result.meta.extra["fit_slope"] = *e.fit_slope;
            result.meta.extra["fit_r2"] = *e.fit_r2;
        }
    } else if (name == "scale-mismatch") {
        const auto n = static_cast<std::size_t>(params.require_int("N", 1, 512));
        const double T = params.require_double("T", 1.0, 1e18, true, false);
        const double beta = params.require_double("beta", 0.0, 1.0, true, true);
        const auto t_list = params.require_int_list("t_list", 2, 1LL << 60, true);
        const auto grid = static_cast<std::size_t>(
            params.optional_int("grid_size", 8192, 64, 1 << 20));
        for (std::int64_t t : t_list) {
            if (static_cast<double>(t) > T) {
                params.complain("t_list", "entries must not exceed T");
                break;
            }
        }
        finish_validation();

        result.table.columns = {"t", "static_error", "adapted_error", "n_eff"};
        for (std::int64_t t : t_list) {
            const ScaleMismatchResult m =
                scale_mismatch_experiment(n, T, static_cast<double>(t), beta, grid);
            result.table.add_row({static_cast<std::int64_t>(t), m.static_error,
                                  m.adapted_error, m.n_eff});
        }
    } else if (name == "taper-check") {
        const auto n = static_cast<std::size_t>(params.require_int("N", 2, 1 << 16));
        const double t_ref = params.require_double("T_ref", 1.0, 1e18, true, false);
        const std::string source =
            params.optional_choice("spectrum", "geometric", {"geometric", "random"});
        finish_validation();

        DecaySpectrum spectrum = post_map(geometric_init(n, t_ref));
        if (source == "random") {
            CounterRng rng(eff_seed, 0);
            PostParams p;
            p.theta = -std::log(t_ref);
            for (std::size_t j = 0; j + 1 < n; ++j) {
                p.delta.push_back(rng.uniform(-3.0, 1.0));
            }
            spectrum = post_map(p);
        }
        const TaperVector linear = linear_taper(n);
        const TaperVector adaptive = adaptive_taper(spectrum, t_ref);
        const DecaySpectrum eff = effective_spectrum(spectrum, adaptive, t_ref);
        result.table.columns = {"k",     "p",     "alpha_linear", "alpha_adaptive",
                                "p_eff", "eff_gap"};
        for (std::size_t k = 0; k < n; ++k) {
            result.table.add_row({static_cast<std::int64_t>(k + 1), spectrum.p[k],
                                  linear.alpha[k], adaptive.alpha[k], eff.p[k],
                                  k + 1 < n ? Cell(eff.p[k + 1] - eff.p[k])
                                            : Cell(std::monostate{})});
        }
        result.meta.extra["clamped"] = adaptive.clamped;
    } else if (name == "gates-dump") {
        const std::string arch = params.require_choice(
            "architecture", {"generic", "mamba", "rwkv", "retnet"});
        const auto n = static_cast<std::size_t>(params.require_int("N", 2, 4096));
        const double t_train = params.require_double("T_train", 1.0, 1e18, true, false);
        const auto t0 = static_cast<std::uint64_t>(
            params.optional_int("t0", 0, 0, std::numeric_limits<std::int64_t>::max()));
        const auto length = static_cast<std::size_t>(params.require_int("L", 1, 1 << 22));
        const double delta_value =
            params.optional_double("delta_value", 1.0, 0.0, 1e6, true, false);
        const auto head_dim = static_cast<std::size_t>(params.optional_int(
            "head_dim", 0, 0, static_cast<std::int64_t>(n)));
        if (arch != "mamba" && params.has("delta_value")) {
            params.complain("delta_value", "only applies to the mamba architecture");
        }
        if (arch != "rwkv" && params.has("head_dim")) {
            params.complain("head_dim", "only applies to the rwkv architecture");
        }
        if (arch == "rwkv" && head_dim > 0 && n % head_dim != 0) {
            params.complain("head_dim", "must divide N");
        }
        finish_validation();

        GateSchedule schedule;
        if (arch == "generic") {
            schedule = generic_gates(geometric_init(n, t_train), t0, length, t_train);
        } else if (arch == "retnet") {
            schedule = retnet_gates(geometric_init(n, t_train), t0, length, t_train);
        } else if (arch == "mamba") {
            const auto delta = ModulationInput::constant(ModulationKind::mamba_delta,
                                                         length, n, delta_value);
            schedule = mamba_gates(geometric_init(n, t_train), delta, t0, length, t_train);
        } else {
            RwkvInit init = rwkv_init(n, t_train);
            if (head_dim > 0) init.zigzag = zigzag_bias(n, head_dim);
            const auto mod =
                ModulationInput::constant(ModulationKind::rwkv_additive, length, n, 0.0);
            schedule = rwkv_gates(init, mod, rwkv_taper(init, t_train), t0, length).schedule;
        }
        result.table.columns = {"l", "t"};
        for (std::size_t k = 0; k < n; ++k) {
            result.table.columns.push_back("w_" + std::to_string(k + 1));
        }
        for (std::size_t l = 0; l < length; ++l) {
            std::vector<Cell> row = {static_cast<std::int64_t>(l + 1),
                                     static_cast<std::int64_t>(t0 + l + 1)};
            for (std::size_t k = 0; k < n; ++k) row.emplace_back(schedule.w(l, k));
            result.table.add_row(std::move(row));
        }
    } else if (name == "impulse") {
        const auto n = static_cast<std::size_t>(params.require_int("N", 2, 4096));
        const double t_train = params.require_double("T_train", 1.0, 1e18, true, false);
        const auto channel = static_cast<std::size_t>(
            params.require_int("channel", 1, static_cast<std::int64_t>(n)));
        const auto t0 = static_cast<std::uint64_t>(
            params.optional_int("t0", 1, 1, std::numeric_limits<std::int64_t>::max()));
        const auto lags = detail::to_u64(params.require_int_list("lags", 0, 1LL << 40, true));
        finish_validation();

        const DecaySpectrum spectrum = post_map(geometric_init(n, t_train));
        const TaperVector taper = adaptive_taper(spectrum, t_train);
        const ImpulseRecord rec = impulse_response(spectrum, taper, channel - 1, t0, lags);
        result.table.columns = {"s", "t", "measured_log", "idealized_log",
                                "abs_log_mismatch"};
        for (std::size_t i = 0; i < lags.size(); ++i) {
            result.table.add_row({static_cast<std::int64_t>(lags[i]),
                                  static_cast<std::int64_t>(t0 + lags[i]),
                                  rec.measured_log[i], rec.idealized_log[i],
                                  std::abs(rec.measured_log[i] - rec.idealized_log[i])});
        }
        result.meta.extra["alpha"] = rec.alpha;
        result.meta.extra["base_rate"] = rec.base_rate;
    } else {  // energy
        const double alpha = params.require_double("alpha", 0.0, 1.0);
        const double ell = params.require_double("ell", 0.0, 1e9, true, false);
        const auto t_list = detail::to_u64(params.require_int_list("t_list", 1, 1LL << 40, true));
        const auto trials =
            static_cast<std::size_t>(params.require_int("trials", 1000, 100000000));
        finish_validation();

        const EnergyMc mc = energy_mc(alpha, ell, t_list, trials, eff_seed, eff_threads);
        result.table.columns = {"t", "energy_mc", "energy_closed", "stderr", "tau"};
        for (std::size_t i = 0; i < t_list.size(); ++i) {
            const double tau =
                1.0 / (ell * position_scale(static_cast<double>(t_list[i]), alpha));
            result.table.add_row({static_cast<std::int64_t>(t_list[i]), mc.mean_energy[i],
                                  mc.closed_form[i], mc.stderr_energy[i], tau});
        }
        result.meta.extra["small_tau_warning"] = mc.small_tau_warning;
    }

    result.meta.walltime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline std::string to_csv(const RunResult& result) {
    std::string out;
    out += "# post v";
    out += kVersion;
    out += "\n# experiment: " + result.meta.experiment;
    out += "\n# seed: " + std::to_string(result.meta.seed);
    out += "\n# threads: " + std::to_string(result.meta.threads);
    out += "\n# config: " + result.meta.config.dump();
    if (!result.meta.extra.empty()) {
        out += "\n# extra: " + result.meta.extra.dump();
    }
    out += "\n# walltime_s: " + detail::format_double(result.meta.walltime_s);
    out += "\n";
    for (std::size_t c = 0; c < result.table.columns.size(); ++c) {
        if (c) out += ",";
        out += result.table.columns[c];
    }
    out += "\n";
    for (const auto& row : result.table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += detail::format_cell(row[c]);
        }
        out += "\n";
    }
    return out;
}

inline std::string to_json_text(const RunResult& result) {
    json doc;
    doc["metadata"] = {{"tool", std::string("post v") + kVersion},
                       {"experiment", result.meta.experiment},
                       {"seed", result.meta.seed},
                       {"threads", result.meta.threads},
                       {"config", result.meta.config},
                       {"extra", result.meta.extra},
                       {"walltime_s", result.meta.walltime_s}};
    doc["columns"] = result.table.columns;
    json rows = json::array();
    for (const auto& row : result.table.rows) {
        json r = json::array();
        for (const auto& cell : row) r.push_back(detail::cell_to_json(cell));
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

// Writes via a temporary file and an atomic rename so failed runs never leave
// partial outputs behind.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
        if (!stream) throw IoError("cannot open output file", tmp.string());
        stream.write(content.data(), static_cast<std::streamsize>(content.size()));
        stream.flush();
        if (!stream) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("cannot write output file", tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("cannot move output into place", target.string());
    }
}

// Runs the experiment and writes its table; returns the path written.
inline std::string run_and_write(const json& config, const Overrides& overrides = {}) {
    const RunResult result = run_experiment(config, overrides);
    std::string output = "result.csv";
    std::string format = "csv";
    if (config.is_object()) {
        if (config.contains("output")) output = config.at("output").get<std::string>();
        if (config.contains("format")) format = config.at("format").get<std::string>();
    }
    std::filesystem::path path(output);
    if (overrides.out_dir && path.is_relative()) {
        path = std::filesystem::path(*overrides.out_dir) / path;
    }
    write_atomic(path.string(), format == "json" ? to_json_text(result) : to_csv(result));
    return path.string();
}

}  // namespace post::experiments
