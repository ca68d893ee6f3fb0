#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spiked/io.hpp"

namespace spiked {

// Exit statuses of the command-line tool.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;  // verification failed or hypothesis rejected
inline constexpr int exit_usage = 2;
inline constexpr int exit_error = 3;

struct RunConfig {
    std::string command;
    json model = json::object();  // N, M or gamma, spikes
    std::string family = "F";
    int k = 0;
    double from = -8.0;
    double to = 5.0;
    double step = 0.1;
    int nodes = default_law_nodes;
    std::optional<int> replicates;  // command default when unset
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::filesystem::path out = ".";
    bool force = false;
    std::filesystem::path cache_dir;  // empty: no law-table cache
    std::string suite;
    double alpha = 0.05;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    json inputs = json::object();  // input files referenced by hash

    int replicates_or(int fallback) const { return replicates.value_or(fallback); }
    std::uint64_t seed_or(std::uint64_t fallback) const { return seed.value_or(fallback); }

    // Fields that determine the outputs of `command`; jobs, paths and force are excluded.
    json canonical() const;
    std::string hash() const { return config_hash(canonical()); }

    // Keys mirror the long flag names with '-' replaced by '_'.
    static RunConfig from_json(const json& j);
    void validate() const;
};

struct CommandOutput {
    int status = exit_ok;
    std::vector<std::filesystem::path> files;
    bool cache_hit = false;
    json report = json::object();
};

CommandOutput cmd_tabulate_law(const RunConfig& config);
CommandOutput cmd_simulate(const RunConfig& config);
CommandOutput cmd_verify(const RunConfig& config);
CommandOutput cmd_hypothesis_test(const RunConfig& config);

int run_cli(int argc, const char* const* argv);

}  // namespace spiked
