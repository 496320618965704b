#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "ncauth/cli.hpp"
#include "ncauth/json_io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::int64_t seed = -1;
    bool seed_given = false;
    bool json_output = false;
    std::string out_path;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "scenario config file (JSON)");
    sub->add_option("--seed", flags.seed, "seed for all randomness in this run")
        ->each([&flags](const std::string&) { flags.seed_given = true; });
    sub->add_flag("--json", flags.json_output, "emit the report as JSON");
    sub->add_option("--out", flags.out_path, "write the report to this file");
}

ncauth::cli::ScenarioConfig load_scenario(const CommonFlags& flags, const std::string& experiment) {
    ncauth::cli::ScenarioConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = ncauth::cli::config_from_json(ncauth::json_io::load_file(flags.config_path));
    }
    cfg.experiment = experiment;
    if (flags.seed_given) {
        cfg.seed = static_cast<std::uint64_t>(flags.seed);
        cfg.seed_set = true;
    }
    if (flags.json_output) cfg.json_output = true;
    if (!flags.out_path.empty()) cfg.out_path = flags.out_path;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"authenticated network coding toolbox"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* keygen = app.add_subcommand("keygen", "generate a key bundle");
    add_common(keygen, flags);
    std::string out_dir, prefix;
    keygen->add_option("--out-dir", out_dir, "directory for the key files");
    keygen->add_option("--prefix", prefix, "file name prefix");

    auto* simulate = app.add_subcommand("simulate", "run one generation through a network");
    add_common(simulate, flags);
    std::string network_path;
    std::vector<std::string> corrupt_nodes;
    simulate->add_option("--network", network_path, "network description file (JSON)");
    simulate->add_option("--corrupt", corrupt_nodes, "corrupt these nodes' incoming buffers");

    auto* attack = app.add_subcommand("attack", "substitution attack experiment");
    add_common(attack, flags);

    auto* goodput = app.add_subcommand("goodput", "goodput tables for a topology");
    add_common(goodput, flags);
    std::string topology_path;
    bool no_simulate = false;
    goodput->add_option("--topology", topology_path, "topology description file (JSON)");
    goodput->add_flag("--no-simulate", no_simulate, "closed-form tables only");

    auto* filedist = app.add_subcommand("filedist", "parameter plan for a file size");
    add_common(filedist, flags);
    std::string size_text;
    bool payload = false;
    filedist->add_option("size", size_text, "file size in bytes (suffixes K/M/G/T, decimal)");
    filedist->add_flag("--payload", payload, "account 1480 payload bytes per packet");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        ncauth::cli::ScenarioConfig cfg;
        if (keygen->parsed()) {
            cfg = load_scenario(flags, "keygen");
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (!prefix.empty()) cfg.prefix = prefix;
        } else if (simulate->parsed()) {
            cfg = load_scenario(flags, "simulate");
            if (!network_path.empty()) cfg.network_path = network_path;
            if (!corrupt_nodes.empty()) cfg.corrupt_nodes = corrupt_nodes;
        } else if (attack->parsed()) {
            cfg = load_scenario(flags, "attack");
        } else if (goodput->parsed()) {
            cfg = load_scenario(flags, "goodput");
            if (!topology_path.empty()) cfg.topology_path = topology_path;
            if (no_simulate) cfg.goodput_simulate = false;
        } else {
            cfg = load_scenario(flags, "filedist");
            if (!size_text.empty()) cfg.file_size_bytes = ncauth::cli::parse_size(size_text);
        }
        return ncauth::cli::run_scenario(cfg, std::cout, std::cerr);
    } catch (const ncauth::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
