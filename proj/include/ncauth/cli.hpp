#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncauth/adversary.hpp"
#include "ncauth/authcode.hpp"
#include "ncauth/filedist.hpp"
#include "ncauth/gf.hpp"
#include "ncauth/goodput.hpp"
#include "ncauth/json_io.hpp"
#include "ncauth/netcode.hpp"
#include "ncauth/rng.hpp"

namespace ncauth::cli {

using json_io::json;

// exit code 2
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exit code 3
struct ExperimentFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    gf::FieldParams field{2, 1, 2, {}, {}, 0};
    authcode::SchemeParams scheme{2, 2, 2};
    std::string experiment;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool json_output = false;
    std::string out_path;

    // keygen
    std::string out_dir = ".";
    std::string prefix = "keys";

    // simulate
    std::string network_path;
    bool sim_verify = true;
    std::vector<std::string> corrupt_nodes;
    std::vector<std::uint64_t> message_labels;

    // attack
    std::uint32_t attack_K = 1;
    std::uint32_t attack_H = 1;
    std::uint32_t attack_n = 1;
    std::uint64_t attack_trials = 0;

    // goodput
    std::string topology_path;
    std::vector<std::uint32_t> r_c_values;
    bool goodput_simulate = true;

    // filedist
    std::uint64_t file_size_bytes = 0;
    bool payload_accounting = false;
};

inline ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig cfg;
    if (j.contains("field")) cfg.field = json_io::field_params_from_json(j.at("field"));
    if (j.contains("scheme")) cfg.scheme = json_io::scheme_params_from_json(j.at("scheme"));
    if (j.contains("experiment")) cfg.experiment = j.at("experiment").get<std::string>();
    if (j.contains("seed")) {
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_set = true;
    }
    if (j.contains("output")) cfg.json_output = j.at("output").get<std::string>() == "json";

    if (j.contains("keygen")) {
        const auto& k = j.at("keygen");
        cfg.out_dir = k.value("out_dir", cfg.out_dir);
        cfg.prefix = k.value("prefix", cfg.prefix);
    }
    if (j.contains("simulate")) {
        const auto& s = j.at("simulate");
        cfg.network_path = s.value("network", cfg.network_path);
        cfg.sim_verify = s.value("verify", cfg.sim_verify);
        cfg.corrupt_nodes = s.value("corrupt_nodes", cfg.corrupt_nodes);
        cfg.message_labels = s.value("messages", cfg.message_labels);
    }
    if (j.contains("network")) cfg.network_path = j.at("network").get<std::string>();
    if (j.contains("attack")) {
        const auto& a = j.at("attack");
        cfg.attack_K = a.value("K", cfg.attack_K);
        cfg.attack_H = a.value("H", cfg.attack_H);
        cfg.attack_n = a.value("n", cfg.attack_n);
        cfg.attack_trials = a.value("trials", cfg.attack_trials);
    }
    if (j.contains("goodput")) {
        const auto& g = j.at("goodput");
        cfg.topology_path = g.value("topology", cfg.topology_path);
        cfg.r_c_values = g.value("r_c", cfg.r_c_values);
        cfg.goodput_simulate = g.value("simulate", cfg.goodput_simulate);
    }
    if (j.contains("filedist")) {
        const auto& d = j.at("filedist");
        cfg.file_size_bytes = d.value("file_size_bytes", cfg.file_size_bytes);
        cfg.payload_accounting = d.value("payload_accounting", cfg.payload_accounting);
    }
    return cfg;
}

// Hard violations throw ConfigError; soft ones come back as warnings.
inline std::vector<std::string> validate_config(const ScenarioConfig& cfg,
                                                const gf::Field* f = nullptr,
                                                std::uint32_t n_hint = 0) {
    std::vector<std::string> warnings;
    if (cfg.experiment != "filedist" && !cfg.seed_set) {
        throw ConfigError("a seed is required (set \"seed\" in the config or pass --seed)");
    }
    if (f != nullptr && f->order() < cfg.scheme.V) {
        throw ConfigError("q^l must be at least V (got q^l=" + std::to_string(f->order()) +
                          ", V=" + std::to_string(cfg.scheme.V) + ")");
    }
    if (n_hint > 0 && cfg.scheme.M < n_hint) {
        warnings.push_back("key reuse bound M=" + std::to_string(cfg.scheme.M) +
                           " is below the generation size n=" + std::to_string(n_hint));
    }
    if (cfg.experiment == "attack" && cfg.attack_H > cfg.scheme.M) {
        warnings.push_back("adversary H=" + std::to_string(cfg.attack_H) +
                           " exceeds the key reuse bound M=" + std::to_string(cfg.scheme.M));
    }
    return warnings;
}

namespace detail {

inline std::string fr_str(const Fraction& fr) { return fr.str(); }

inline gf::Field build_field(const ScenarioConfig& cfg) {
    try {
        return gf::make_field(cfg.field);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("field construction failed: ") + e.what());
    }
}

}  // namespace detail

struct CommandResult {
    json report;
    std::string table;
};

inline CommandResult cmd_keygen(const ScenarioConfig& cfg) {
    gf::Field f = detail::build_field(cfg);
    validate_config(cfg, &f);
    authcode::KeyMaterial keys;
    try {
        keys = authcode::keygen(f, cfg.scheme, cfg.seed);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("keygen: ") + e.what());
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string base = (fs::path(cfg.out_dir) / cfg.prefix).string();
    std::vector<std::string> files;

    json src = json_io::source_key_to_json(f, keys.source);
    src["field"] = json_io::field_params_to_json(cfg.field);
    src["scheme"] = json_io::scheme_params_to_json(cfg.scheme);
    json_io::save_file(base + "_source_key.json", src);
    files.push_back(base + "_source_key.json");

    json pts = json_io::public_points_to_json(f, keys.points);
    pts["field"] = json_io::field_params_to_json(cfg.field);
    json_io::save_file(base + "_public_points.json", pts);
    files.push_back(base + "_public_points.json");

    for (const auto& vk : keys.verifiers) {
        json jv = json_io::verifier_key_to_json(f, vk);
        jv["field"] = json_io::field_params_to_json(cfg.field);
        const std::string path = base + "_verifier_key_" + std::to_string(vk.index) + ".json";
        json_io::save_file(path, jv);
        files.push_back(path);
    }

    CommandResult res;
    res.report = {{"experiment", "keygen"},
                  {"seed", cfg.seed},
                  {"scheme", json_io::scheme_params_to_json(cfg.scheme)},
                  {"polynomials", cfg.scheme.M + 1},
                  {"coefficients_per_polynomial", cfg.scheme.k},
                  {"files", files}};
    std::ostringstream t;
    t << "keygen: " << cfg.scheme.M + 1 << " polynomials x " << cfg.scheme.k
      << " coefficients, " << cfg.scheme.V << " verifier keys\n";
    for (const auto& p : files) t << "  wrote " << p << "\n";
    res.table = t.str();
    return res;
}

inline CommandResult cmd_simulate(const ScenarioConfig& cfg) {
    gf::Field f = detail::build_field(cfg);
    if (cfg.network_path.empty()) throw ConfigError("simulate: a network file is required");

    netcode::Network net;
    try {
        net = json_io::network_from_json(json_io::load_file(cfg.network_path));
        netcode::validate(net);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("simulate: ") + e.what());
    }

    const std::vector<std::string> warnings = validate_config(cfg, &f, net.n);

    Rng rng(cfg.seed);
    std::uint32_t verifying = 0;
    for (const auto& node : net.nodes) verifying += node.verifying ? 1 : 0;
    if (verifying > cfg.scheme.V) {
        throw ConfigError("simulate: network has " + std::to_string(verifying) +
                          " verifying nodes but the scheme only provides V=" +
                          std::to_string(cfg.scheme.V) + " verifier keys");
    }

    std::vector<gf::ExtElem> messages;
    if (!cfg.message_labels.empty()) {
        if (cfg.message_labels.size() != net.n) {
            throw ConfigError("simulate: expected " + std::to_string(net.n) + " messages");
        }
        for (auto v : cfg.message_labels) messages.push_back(f.from_label(v));
    } else {
        Rng mrng = rng.fork(2);
        for (std::uint32_t i = 0; i < net.n; ++i) {
            messages.push_back(f.from_label(mrng.next_below(f.order())));
        }
    }

    authcode::KeyMaterial keys = authcode::keygen(f, cfg.scheme, rng.fork(3).next_u64());

    netcode::PropagateOptions opts;
    opts.verify = cfg.sim_verify;
    opts.corrupt_nodes = cfg.corrupt_nodes;
    opts.corruption_seed = rng.fork(4).next_u64();
    netcode::SessionState st = netcode::propagate(f, net, messages, keys, opts);

    const bool decodable = netcode::check_decodability(f, net);
    json decode_report = json::object();
    bool all_decodes_match = true;
    for (const auto& node : net.nodes) {
        if (node.role != netcode::Role::destination) continue;
        auto got = netcode::decode(f, net, st, node.id);
        json entry;
        entry["success"] = got.has_value();
        if (got) {
            entry["decoded"] = json_io::labels_of(f, *got);
            entry["matches_source"] = (*got == st.messages);
            all_decodes_match = all_decodes_match && *got == st.messages;
        } else {
            all_decodes_match = false;
        }
        decode_report[node.id] = entry;
    }

    json log = json::array();
    for (const auto& entry : st.log) {
        log.push_back({{"node", entry.node},
                       {"edge", entry.edge},
                       {"accepted", entry.accepted},
                       {"zero_tracking", entry.zero_tracking}});
    }

    const std::uint64_t n = net.n, k = cfg.scheme.k, M = cfg.scheme.M, l = f.l();
    const std::uint64_t edges_verified = st.log.size();
    const bool counters_match =
        st.tag_ops.ext_frobenius == authcode::cost::tag_frobenius(n, M) &&
        st.tag_ops.ext_mults == authcode::cost::tag_mults(n, k, M) &&
        st.verify_ops.exponent_type_total() ==
            authcode::cost::verify_exponent_ops(k, M, edges_verified) &&
        st.verify_ops.ext_mults == authcode::cost::verify_mults(k, M, edges_verified);

    json counters = {
        {"tag", {{"frobenius", st.tag_ops.ext_frobenius}, {"mults", st.tag_ops.ext_mults}}},
        {"verify",
         {{"frobenius", st.verify_ops.ext_frobenius},
          {"exponentiations", st.verify_ops.ext_exponentiations},
          {"exponent_type_total", st.verify_ops.exponent_type_total()},
          {"mults", st.verify_ops.ext_mults},
          {"edges_verified", edges_verified}}},
        {"formulas",
         {{"tag_frobenius", authcode::cost::tag_frobenius(n, M)},
          {"tag_mults", authcode::cost::tag_mults(n, k, M)},
          {"verify_exponent_ops", authcode::cost::verify_exponent_ops(k, M, edges_verified)},
          {"verify_mults", authcode::cost::verify_mults(k, M, edges_verified)}}},
        {"formulas_times_l",
         {{"tag_frobenius", authcode::cost::tag_frobenius(n, M) * l},
          {"tag_mults", authcode::cost::tag_mults(n, k, M) * l},
          {"verify_exponent_ops", authcode::cost::verify_exponent_ops(k, M, edges_verified) * l},
          {"verify_mults", authcode::cost::verify_mults(k, M, edges_verified) * l}}},
        {"match", counters_match}};

    CommandResult res;
    res.report = {{"experiment", "simulate"},
                  {"seed", cfg.seed},
                  {"network", cfg.network_path},
                  {"field", json_io::field_params_to_json(cfg.field)},
                  {"scheme", json_io::scheme_params_to_json(cfg.scheme)},
                  {"messages", json_io::labels_of(f, st.messages)},
                  {"decodable", decodable},
                  {"warnings", warnings},
                  {"verify_log", log},
                  {"decode", decode_report},
                  {"counters", counters}};

    std::ostringstream t;
    t << "simulate: n=" << n << " k=" << k << " M=" << M << " over q^l=" << f.order() << "\n";
    for (const auto& w : warnings) t << "  warning: " << w << "\n";
    for (const auto& entry : st.log) {
        t << "  " << entry.node << " " << (entry.accepted ? "accepted" : "REJECTED") << " "
          << entry.edge << (entry.zero_tracking ? " (zero tracking)" : "") << "\n";
    }
    for (auto it = decode_report.begin(); it != decode_report.end(); ++it) {
        t << "  decode at " << it.key() << ": "
          << (it.value()["success"].get<bool>()
                  ? (it.value()["matches_source"].get<bool>() ? "matches source"
                                                              : "DIFFERS from source")
                  : "FAILED")
          << "\n";
    }
    t << "  tag ops: " << st.tag_ops.ext_frobenius << " frobenius, " << st.tag_ops.ext_mults
      << " mults; verify ops over " << edges_verified
      << " edges: " << st.verify_ops.exponent_type_total() << " exponent-type, "
      << st.verify_ops.ext_mults << " mults\n";
    t << "  counter formulas " << (counters_match ? "match" : "MISMATCH") << "\n";
    res.table = t.str();

    if (!counters_match) {
        throw ExperimentFailure("simulate: measured op counters do not match the formulas");
    }
    if (decodable && cfg.corrupt_nodes.empty() && !all_decodes_match) {
        throw ExperimentFailure("simulate: clean run failed to decode the source messages");
    }
    return res;
}

inline CommandResult cmd_attack(const ScenarioConfig& cfg) {
    gf::Field f = detail::build_field(cfg);
    validate_config(cfg, &f);
    adversary::ExperimentParams params;
    params.scheme = cfg.scheme;
    params.K = cfg.attack_K;
    params.H = cfg.attack_H;
    params.n = cfg.attack_n;
    params.trials = cfg.attack_trials;

    adversary::SubstitutionReport rep;
    try {
        rep = adversary::run_substitution_experiment(f, params, cfg.seed);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("attack: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ExperimentFailure(std::string("attack: ") + e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(std::string("attack: ") + e.what());
    }

    CommandResult res;
    res.report = {{"experiment", "attack"},
                  {"seed", cfg.seed},
                  {"field", json_io::field_params_to_json(cfg.field)},
                  {"scheme", json_io::scheme_params_to_json(cfg.scheme)},
                  {"K", params.K},
                  {"H", params.H},
                  {"n", params.n},
                  {"consistent_keys", rep.candidate_count},
                  {"candidate_dimension", rep.candidate_dimension},
                  {"substitution_success", json_io::fraction_to_json(rep.exact)},
                  {"trials", rep.trials},
                  {"successes", rep.successes},
                  {"empirical", rep.empirical()}};

    std::ostringstream t;
    t << "attack: K=" << params.K << " H=" << params.H << " against (k=" << cfg.scheme.k
      << ",V=" << cfg.scheme.V << ",M=" << cfg.scheme.M << ") over q^l=" << f.order() << "\n";
    t << "  consistent keys: " << rep.candidate_count << "\n";
    t << "  substitution success: " << rep.exact.str() << " (" << rep.exact.to_double() << ")\n";
    if (rep.trials) {
        t << "  sampled: " << rep.successes << "/" << rep.trials << " = " << rep.empirical()
          << "\n";
    }
    res.table = t.str();
    return res;
}

inline CommandResult cmd_goodput(const ScenarioConfig& cfg) {
    if (cfg.topology_path.empty()) throw ConfigError("goodput: a topology file is required");
    json jt;
    try {
        jt = json_io::load_file(cfg.topology_path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("goodput: ") + e.what());
    }

    CommandResult res;
    if (jt.value("reference_only", false)) {
        res.report = {{"experiment", "goodput"},
                      {"topology", cfg.topology_path},
                      {"reference_only", true},
                      {"reference", jt.value("reference", json::object())},
                      {"note", jt.value("note", "")}};
        std::ostringstream t;
        t << "goodput: " << cfg.topology_path << " carries reference data only\n"
          << jt.value("reference", json::object()).dump(2) << "\n";
        res.table = t.str();
        return res;
    }

    goodput::Topology topo;
    try {
        topo = json_io::topology_from_json(jt);
        netcode::validate(topo.net);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("goodput: ") + e.what());
    }

    std::vector<std::uint32_t> r_cs = cfg.r_c_values;
    if (r_cs.empty()) {
        for (std::uint32_t r = 1; r <= topo.intermediates.size(); ++r) r_cs.push_back(r);
    }

    goodput::SimConfig sim = goodput::default_sim_config(topo);
    std::optional<gf::Field> f;
    if (cfg.goodput_simulate) f.emplace(gf::make_field(sim.field));

    json rows = json::array();
    std::ostringstream t, csv;
    t << "goodput on " << cfg.topology_path << " (" << topo.net.edges.size() << " edges, "
      << topo.destinations.size() << " destinations)\n";
    t << "  r_c   min   max   avg   gain\n";
    csv << "r_c,min,max,avg,gain\n";
    for (std::uint32_t r : r_cs) {
        goodput::PlacementStats stats = goodput::average_over_placements(topo, r);
        Fraction g = goodput::gain(topo, r);
        json row = {{"r_c", r},
                    {"min", json_io::fraction_to_json(stats.min)},
                    {"max", json_io::fraction_to_json(stats.max)},
                    {"avg", json_io::fraction_to_json(stats.avg)},
                    {"gain", json_io::fraction_to_json(g)}};

        if (cfg.goodput_simulate) {
            Rng rng(cfg.seed + r);
            bool agree = true, scheme_on_clean = true;
            for (const auto& outcome : stats.outcomes) {
                auto off = goodput::simulate_goodput(*f, sim.scheme, topo, outcome.placement,
                                                     false, rng.next_u64());
                auto on = goodput::simulate_goodput(*f, sim.scheme, topo, outcome.placement,
                                                    true, rng.next_u64());
                agree = agree && off.corrupted_dest_edges == outcome.corrupted_dest_edges &&
                        off.goodput == outcome.goodput;
                scheme_on_clean = scheme_on_clean && on.goodput == Fraction(1);
            }
            row["simulated_matches_closed_form"] = agree;
            row["scheme_on_goodput_one"] = scheme_on_clean;
            if (!agree) {
                throw ExperimentFailure("goodput: simulated fractions diverge from closed form");
            }
            if (!scheme_on_clean) {
                throw ExperimentFailure("goodput: verification left corrupted traffic through");
            }
        }
        rows.push_back(row);
        t << "  " << std::setw(3) << r << "   " << stats.min.str() << "   " << stats.max.str()
          << "   " << stats.avg.str() << "   " << g.str() << "\n";
        csv << r << "," << stats.min.str() << "," << stats.max.str() << "," << stats.avg.str()
            << "," << g.str() << "\n";
    }

    res.report = {{"experiment", "goodput"},
                  {"seed", cfg.seed},
                  {"topology", cfg.topology_path},
                  {"simulated", cfg.goodput_simulate},
                  {"rows", rows},
                  {"csv", csv.str()}};
    if (jt.value("reconstruction_hypothesis", false)) {
        res.report["reconstruction_hypothesis"] = true;
        t << "  note: " << jt.value("note", "topology shape is a reconstruction hypothesis")
          << "\n";
    }
    res.table = t.str();
    return res;
}

inline CommandResult cmd_filedist(const ScenarioConfig& cfg) {
    if (cfg.file_size_bytes == 0) throw ConfigError("filedist: a file size is required");
    filedist::DistPlan plan;
    try {
        plan = filedist::plan_for_file(cfg.file_size_bytes, cfg.payload_accounting);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("filedist: ") + e.what());
    }
    CommandResult res;
    res.report = json_io::dist_plan_to_json(plan);
    res.report["experiment"] = "filedist";
    std::ostringstream t;
    t << "filedist: file of " << plan.file_size_bytes << " bytes\n"
      << "  N=" << plan.N << "  l=" << plan.l_bytes << " bytes (" << plan.l_bits << " bits)"
      << "  M=" << plan.M << " packets (bound " << plan.M_max << ")\n"
      << "  one key covers up to " << plan.max_file_bytes << " bytes at this N\n";
    res.table = t.str();
    return res;
}

// Dispatches, validates, and emits. Returns the process exit code.
inline int run_scenario(ScenarioConfig cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.experiment.empty()) throw ConfigError("no experiment selected");

        for (const auto& w : validate_config(cfg)) err << "warning: " << w << "\n";

        CommandResult res;
        if (cfg.experiment == "keygen") {
            res = cmd_keygen(cfg);
        } else if (cfg.experiment == "simulate") {
            res = cmd_simulate(cfg);
        } else if (cfg.experiment == "attack") {
            res = cmd_attack(cfg);
        } else if (cfg.experiment == "goodput") {
            res = cmd_goodput(cfg);
        } else if (cfg.experiment == "filedist") {
            res = cmd_filedist(cfg);
        } else {
            throw ConfigError("unknown experiment: " + cfg.experiment);
        }

        const std::string text = cfg.json_output ? res.report.dump(2) + "\n" : res.table;
        if (cfg.out_path.empty()) {
            out << text;
        } else {
            std::ofstream file(cfg.out_path, std::ios::trunc);
            if (!file) throw ConfigError("cannot write " + cfg.out_path);
            file << text;
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ExperimentFailure& e) {
        err << "experiment failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

// Sizes accept decimal suffixes K/M/G/T (powers of 1000) and a fractional
// mantissa as long as the result is a whole number of bytes: "1.8G" is fine.
inline std::uint64_t parse_size(const std::string& text) {
    if (text.empty()) throw ConfigError("empty file size");
    std::uint64_t scale = 1;
    std::string digits = text;
    switch (digits.back()) {
        case 'K': case 'k': scale = 1'000ULL; break;
        case 'M': case 'm': scale = 1'000'000ULL; break;
        case 'G': case 'g': scale = 1'000'000'000ULL; break;
        case 'T': case 't': scale = 1'000'000'000'000ULL; break;
        default: break;
    }
    if (scale != 1) digits.pop_back();

    std::uint64_t mantissa = 0;
    std::uint64_t frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (char c : digits) {
        if (c == '.') {
            if (seen_dot) throw ConfigError("bad file size: " + text);
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw ConfigError("bad file size: " + text);
        seen_digit = true;
        mantissa = mantissa * 10 + static_cast<std::uint64_t>(c - '0');
        if (seen_dot) ++frac_digits;
    }
    if (!seen_digit) throw ConfigError("bad file size: " + text);
    for (std::uint64_t i = 0; i < frac_digits; ++i) {
        if (scale % 10 != 0) throw ConfigError("file size is not a whole number of bytes: " + text);
        scale /= 10;
    }
    return mantissa * scale;
}

}  // namespace ncauth::cli
