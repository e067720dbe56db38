// Batch experiment runner.
//
//   post_cli run <config.json>     run one experiment, write its table
//   post_cli report <config.json>  run named acceptance checks, write a
//                                  consolidated JSON summary
//
// Options: --out-dir <path>, --threads <n>, --seed <u64> (override config).
// Environment: POST_OUT_DIR and POST_THREADS act as fallbacks when the flags
// are absent; nothing else is read from the environment.
//
// Exit codes: 0 success, 1 validation error, 2 acceptance failure in report
// mode, 3 I/O error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "post/acceptance.hpp"
#include "post/experiments.hpp"
#include "post/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAcceptance = 2;
constexpr int kExitIo = 3;

json load_config(const std::string& path) {
    std::ifstream stream(path);
    if (!stream) {
        throw post::experiments::IoError("cannot read config file", path);
    }
    json config;
    try {
        stream >> config;
    } catch (const json::parse_error& e) {
        throw post::experiments::ValidationError({std::string("config is not valid JSON: ") + e.what()});
    }
    return config;
}

int run_mode(const std::string& config_path, const post::experiments::Overrides& overrides) {
    const json config = load_config(config_path);
    const std::string written = post::experiments::run_and_write(config, overrides);
    std::printf("wrote %s\n", written.c_str());
    return kExitOk;
}

// Report config: { "experiments": [ { "criterion": <name>, "seed"?: u64 }... ] }.
// Each entry runs one named acceptance check; all results land in one JSON
// summary with pass/fail flags.  Failing members are recorded and the run
// continues.
int report_mode(const std::string& config_path, const post::experiments::Overrides& overrides) {
    const json config = load_config(config_path);

    std::vector<std::string> issues;
    if (!config.is_object()) {
        issues.push_back("report config must be a JSON object");
    } else {
        for (const auto& item : config.items()) {
            if (item.key() != "experiments" && item.key() != "output") {
                issues.push_back(item.key() + " is not a recognized key");
            }
        }
        if (!config.contains("experiments") || !config.at("experiments").is_array()) {
            issues.push_back("experiments must be an array");
        }
    }
    const auto known = post::acceptance::check_names();
    if (issues.empty()) {
        std::size_t index = 0;
        for (const auto& entry : config.at("experiments")) {
            const std::string scope = "experiments[" + std::to_string(index++) + "]";
            if (!entry.is_object() || !entry.contains("criterion") ||
                !entry.at("criterion").is_string()) {
                issues.push_back(scope + " must carry a criterion name");
                continue;
            }
            const std::string name = entry.at("criterion").get<std::string>();
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                issues.push_back(scope + ": unknown criterion " + name);
            }
            for (const auto& item : entry.items()) {
                if (item.key() != "criterion" && item.key() != "seed" &&
                    item.key() != "threads") {
                    issues.push_back(scope + "." + item.key() + " is not a recognized key");
                }
            }
        }
    }
    if (!issues.empty()) throw post::experiments::ValidationError(std::move(issues));

    json summary;
    summary["metadata"] = {{"tool", std::string("post v") + post::kVersion},
                           {"seed", overrides.seed.value_or(post::acceptance::kDefaultSeed)},
                           {"threads", overrides.threads.value_or(1)}};
    summary["checks"] = json::array();
    bool all_pass = true;
    for (const auto& entry : config.at("experiments")) {
        const std::string name = entry.at("criterion").get<std::string>();
        const std::uint64_t seed = entry.contains("seed")
                                       ? entry.at("seed").get<std::uint64_t>()
                                       : overrides.seed.value_or(post::acceptance::kDefaultSeed);
        const unsigned threads = entry.contains("threads")
                                     ? entry.at("threads").get<unsigned>()
                                     : overrides.threads.value_or(1);
        const post::acceptance::CheckResult r = post::acceptance::run_check(name, seed, threads);
        std::printf("[%s] %s  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.details.c_str());
        std::fflush(stdout);
        summary["checks"].push_back({{"criterion", r.name},
                                     {"pass", r.pass},
                                     {"details", r.details},
                                     {"walltime_s", r.walltime_s}});
        all_pass = all_pass && r.pass;
    }
    summary["all_pass"] = all_pass;

    std::string output = "report.json";
    if (config.is_object() && config.contains("output")) {
        output = config.at("output").get<std::string>();
    }
    std::filesystem::path path(output);
    if (overrides.out_dir && path.is_relative()) {
        path = std::filesystem::path(*overrides.out_dir) / path;
    }
    post::experiments::write_atomic(path.string(), summary.dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
    return all_pass ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"position-adaptive spectral tapering experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "experiment config (JSON)")->required();
        cmd->add_option("--out-dir", out_dir, "directory for relative output paths");
        cmd->add_option("--threads", threads, "worker thread count override");
        cmd->add_option("--seed", seed, "seed override");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "run one experiment");
    add_common(run_cmd);
    CLI::App* report_cmd = app.add_subcommand("report", "run acceptance checks");
    add_common(report_cmd);

    CLI11_PARSE(app, argc, argv);

    post::experiments::Overrides overrides;
    overrides.seed = seed;
    overrides.threads = threads;
    overrides.out_dir = out_dir;
    if (!overrides.out_dir) {
        if (const char* env = std::getenv("POST_OUT_DIR")) overrides.out_dir = env;
    }
    if (!overrides.threads) {
        if (const char* env = std::getenv("POST_THREADS")) {
            overrides.threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
        }
    }

    try {
        if (run_cmd->parsed()) return run_mode(config_path, overrides);
        return report_mode(config_path, overrides);
    } catch (const post::experiments::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitValidation;
    } catch (const post::experiments::IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
}
