#include "commands.hpp"

#include <CLI11.hpp>

#include <map>

int main(int argc, char** argv) {
    using mkdv::cli::Subcommand;
    CLI::App app{"mkdvlab: complex mKdV experiments in modulation spaces"};
    app.require_subcommand(1);

    mkdv::cli::RunConfig rc;
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    unsigned jobs = 1;

    const std::map<std::string, std::pair<Subcommand, std::string>> commands = {
        {"solve", {Subcommand::Solve, "Evolve initial data and write the trajectory and invariants"}},
        {"illposed", {Subcommand::Illposed, "Run the soliton-pair sweep and write records and a verdict"}},
        {"probe", {Subcommand::Probe, "Evaluate estimate probes over the regression corpus"}},
        {"norms", {Subcommand::Norms, "Compute norms of the snapshots in a trajectory file"}},
    };
    std::map<CLI::App*, Subcommand> lookup;
    std::map<CLI::App*, CLI::Option*> seed_opts;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", config, "Flat key = value configuration file")->required();
        sub->add_option("--out", out, "Output directory")->capture_default_str();
        seed_opts[sub] = sub->add_option("--seed", seed, "Random seed; overrides the config key");
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
        lookup[sub] = entry.first;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mkdv::cli::kExitConfig;
    }

    for (const auto& [sub, kind] : lookup) {
        if (!sub->parsed()) continue;
        rc.subcommand = kind;
        if (seed_opts[sub]->count() > 0) rc.seed = seed;
    }
    rc.config = config;
    rc.out_dir = out;
    rc.jobs = jobs;
    return mkdv::cli::run(rc);
}
