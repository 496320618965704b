#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if __has_include(<json.hpp>)
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif

#include "ncauth/authcode.hpp"
#include "ncauth/filedist.hpp"
#include "ncauth/fraction.hpp"
#include "ncauth/gf.hpp"
#include "ncauth/goodput.hpp"
#include "ncauth/netcode.hpp"

namespace ncauth::json_io {

using nlohmann::json;

inline json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void save_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline std::string role_name(netcode::Role r) {
    switch (r) {
        case netcode::Role::source: return "source";
        case netcode::Role::destination: return "destination";
        default: return "intermediate";
    }
}

inline netcode::Role role_from_name(const std::string& s) {
    if (s == "source") return netcode::Role::source;
    if (s == "intermediate") return netcode::Role::intermediate;
    if (s == "destination") return netcode::Role::destination;
    throw std::runtime_error("unknown node role: " + s);
}

inline json network_to_json(const netcode::Network& net) {
    json nodes = json::array();
    for (const auto& node : net.nodes) {
        nodes.push_back({{"id", node.id},
                         {"role", role_name(node.role)},
                         {"verifying", node.verifying}});
    }
    json edges = json::array();
    for (const auto& edge : net.edges) {
        edges.push_back({{"id", edge.id},
                         {"from", edge.from},
                         {"to", edge.to},
                         {"coeffs", edge.coeffs}});
    }
    return {{"n", net.n}, {"nodes", nodes}, {"edges", edges}};
}

inline netcode::Network network_from_json(const json& j) {
    netcode::Network net;
    net.n = j.at("n").get<std::uint32_t>();
    for (const auto& jn : j.at("nodes")) {
        netcode::Node node;
        node.id = jn.at("id").get<std::string>();
        node.role = role_from_name(jn.at("role").get<std::string>());
        node.verifying = jn.value("verifying", false);
        net.nodes.push_back(std::move(node));
    }
    for (const auto& je : j.at("edges")) {
        netcode::Edge edge;
        edge.id = je.at("id").get<std::string>();
        edge.from = je.at("from").get<std::string>();
        edge.to = je.at("to").get<std::string>();
        edge.coeffs = je.value("coeffs", std::vector<gf::Sym>{});
        net.edges.push_back(std::move(edge));
    }
    return net;
}

inline json topology_to_json(const goodput::Topology& topo) {
    json j = network_to_json(topo.net);
    j["destinations"] = topo.destinations;
    j["intermediates"] = topo.intermediates;
    return j;
}

inline goodput::Topology topology_from_json(const json& j) {
    goodput::Topology topo;
    topo.net = network_from_json(j);
    topo.destinations = j.at("destinations").get<std::vector<std::string>>();
    topo.intermediates = j.at("intermediates").get<std::vector<std::string>>();
    goodput::validate(topo);
    return topo;
}

inline json field_params_to_json(const gf::FieldParams& fp) {
    json j = {{"p", fp.p}, {"e", fp.e}, {"l", fp.l}, {"seed", fp.seed}};
    if (!fp.base_modulus.empty()) j["base_modulus"] = fp.base_modulus;
    if (!fp.top_modulus.empty()) j["top_modulus"] = fp.top_modulus;
    return j;
}

inline gf::FieldParams field_params_from_json(const json& j) {
    gf::FieldParams fp;
    fp.p = j.value("p", std::uint64_t{2});
    fp.e = j.value("e", std::uint32_t{1});
    fp.l = j.value("l", std::uint32_t{1});
    fp.seed = j.value("seed", std::uint64_t{0});
    fp.base_modulus = j.value("base_modulus", std::vector<gf::Sym>{});
    fp.top_modulus = j.value("top_modulus", std::vector<gf::Sym>{});
    return fp;
}

inline json scheme_params_to_json(const authcode::SchemeParams& sp) {
    return {{"k", sp.k}, {"V", sp.V}, {"M", sp.M}};
}

inline authcode::SchemeParams scheme_params_from_json(const json& j) {
    authcode::SchemeParams sp;
    sp.k = j.at("k").get<std::uint32_t>();
    sp.V = j.at("V").get<std::uint32_t>();
    sp.M = j.at("M").get<std::uint32_t>();
    return sp;
}

inline std::vector<std::uint64_t> labels_of(const gf::Field& f,
                                            const std::vector<gf::ExtElem>& elems) {
    std::vector<std::uint64_t> out;
    out.reserve(elems.size());
    for (auto e : elems) out.push_back(f.to_label(e));
    return out;
}

inline std::vector<gf::ExtElem> elems_of(const gf::Field& f,
                                         const std::vector<std::uint64_t>& labels) {
    std::vector<gf::ExtElem> out;
    out.reserve(labels.size());
    for (auto v : labels) out.push_back(f.from_label(v));
    return out;
}

inline json source_key_to_json(const gf::Field& f, const authcode::SourceKey& key) {
    json polys = json::array();
    for (const auto& p : key.poly) polys.push_back(labels_of(f, p));
    return {{"type", "source_key"}, {"marker", "SECRET"}, {"polynomials", polys}};
}

inline authcode::SourceKey source_key_from_json(const gf::Field& f, const json& j) {
    if (j.at("type") != "source_key") throw std::runtime_error("not a source key file");
    authcode::SourceKey key;
    for (const auto& jp : j.at("polynomials")) {
        key.poly.push_back(elems_of(f, jp.get<std::vector<std::uint64_t>>()));
    }
    return key;
}

inline json public_points_to_json(const gf::Field& f, const authcode::PublicPoints& pts) {
    return {{"type", "public_points"}, {"x", labels_of(f, pts.x)}};
}

inline authcode::PublicPoints public_points_from_json(const gf::Field& f, const json& j) {
    if (j.at("type") != "public_points") throw std::runtime_error("not a public points file");
    authcode::PublicPoints pts;
    pts.x = elems_of(f, j.at("x").get<std::vector<std::uint64_t>>());
    return pts;
}

inline json verifier_key_to_json(const gf::Field& f, const authcode::VerifierKey& key) {
    return {{"type", "verifier_key"},
            {"marker", "SECRET"},
            {"index", key.index},
            {"point", f.to_label(key.point)},
            {"evals", labels_of(f, key.evals)}};
}

inline authcode::VerifierKey verifier_key_from_json(const gf::Field& f, const json& j) {
    if (j.at("type") != "verifier_key") throw std::runtime_error("not a verifier key file");
    authcode::VerifierKey key;
    key.index = j.at("index").get<std::uint32_t>();
    key.point = f.from_label(j.at("point").get<std::uint64_t>());
    key.evals = elems_of(f, j.at("evals").get<std::vector<std::uint64_t>>());
    return key;
}

inline json fraction_to_json(const Fraction& fr) {
    return {{"num", fr.num}, {"den", fr.den}, {"value", fr.to_double()}, {"text", fr.str()}};
}

inline json dist_plan_to_json(const filedist::DistPlan& plan) {
    return {{"file_size_bytes", plan.file_size_bytes},
            {"N", plan.N},
            {"l_bytes", plan.l_bytes},
            {"l_bits", plan.l_bits},
            {"M", plan.M},
            {"M_max", plan.M_max},
            {"max_file_bytes", plan.max_file_bytes},
            {"payload_accounting", plan.payload_accounting}};
}

}  // namespace ncauth::json_io
