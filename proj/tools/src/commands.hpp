#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace mkdv::cli {

enum class Subcommand { Solve, Illposed, Probe, Norms };

struct RunConfig {
    Subcommand subcommand = Subcommand::Solve;
    std::filesystem::path config;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
};

/// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;       ///< verdict FAIL or calibration exceeded
inline constexpr int kExitConfig = 2;     ///< missing or invalid configuration
inline constexpr int kExitRuntime = 3;    ///< numerical failure during the run

/// Runs one subcommand, reporting to stdout/stderr. Never throws.
int run(const RunConfig& rc);

int cmd_solve(const RunConfig& rc);
int cmd_illposed(const RunConfig& rc);
int cmd_probe(const RunConfig& rc);
int cmd_norms(const RunConfig& rc);

} // namespace mkdv::cli
