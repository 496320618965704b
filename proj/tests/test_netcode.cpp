#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "ncauth/netcode.hpp"
#include "test_support.hpp"

using namespace ncauth;
using namespace ncauth::netcode;
using gf::ExtElem;
using gf::Field;
using gf::Sym;
using test_support::make_field_qle;
using test_support::random_decodable_network;

namespace {

// Seven-edge relay: S feeds R1 twice and R2 once; R1 relays one line to R2;
// the destination collects one line from R1 and two from R2. Coefficients
// route message j onto destination line j unchanged.
Network identity_relay() {
    Network net;
    net.n = 3;
    net.nodes = {{"S", Role::source, false},
                 {"R1", Role::intermediate, false},
                 {"R2", Role::intermediate, false},
                 {"D1", Role::destination, false}};
    net.edges = {{"e1", "S", "R1", {1, 0, 0}},  {"e2", "S", "R1", {0, 1, 0}},
                 {"e3", "S", "R2", {0, 0, 1}},  {"e4", "R1", "R2", {0, 1}},
                 {"e5", "R1", "D1", {1, 0}},    {"e6", "R2", "D1", {0, 1}},
                 {"e7", "R2", "D1", {1, 0}}};
    return net;
}

}  // namespace

TEST_CASE("global encoding vectors match the hand-expanded relay") {
    Field f = make_field_qle(5, 1, 2);
    Network net = identity_relay();
    auto g = compute_global_vectors(f, net);

    CHECK(g[0] == std::vector<Sym>{1, 0, 0});
    CHECK(g[1] == std::vector<Sym>{0, 1, 0});
    CHECK(g[2] == std::vector<Sym>{0, 0, 1});
    CHECK(g[3] == std::vector<Sym>{0, 1, 0});  // e4 = e2
    CHECK(g[4] == std::vector<Sym>{1, 0, 0});  // e5 = e1
    CHECK(g[5] == std::vector<Sym>{0, 1, 0});  // e6 = e4
    CHECK(g[6] == std::vector<Sym>{0, 0, 1});  // e7 = e3

    CHECK(check_decodability(f, net));
    auto G = transfer_matrix(f, net, "D1");
    CHECK(G.rows == 3);
    CHECK(G.cols == 3);
    CHECK(linalg::rank(f.base(), G) == 3);
}

TEST_CASE("propagated data fields equal the global-vector combination") {
    Rng rng(4711);
    for (int t = 0; t < 20; ++t) {
        Field f = make_field_qle(2, 1, 3, 50 + t);
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.next_below(2));
        Network net = random_decodable_network(f, n, rng);
        auto globals = compute_global_vectors(f, net);

        authcode::KeyMaterial keys = authcode::keygen(f, {2, 1, 2}, rng.next_u64());
        std::vector<ExtElem> msgs;
        for (std::uint32_t i = 0; i < n; ++i) msgs.push_back(f.from_label(rng.next_below(f.order())));
        SessionState st = propagate(f, net, msgs, keys);

        for (std::size_t e = 0; e < net.edges.size(); ++e) {
            ExtElem expect = f.zero();
            for (std::uint32_t j = 0; j < n; ++j) {
                expect = f.add(expect, f.mul_raw(f.embed_base(globals[e][j]), msgs[j]));
            }
            CHECK(authcode::data_ext(f, st.edge_packets[e]) == expect);
        }
    }
}

TEST_CASE("decode returns the source messages on clean runs") {
    Rng rng(99);
    for (int t = 0; t < 25; ++t) {
        Field f = make_field_qle(2, 1, 2, 300 + t);
        Network net = random_decodable_network(f, 2, rng);
        authcode::KeyMaterial keys = authcode::keygen(f, {1, 1, 1}, rng.next_u64());
        std::vector<ExtElem> msgs{f.from_label(rng.next_below(f.order())),
                                  f.from_label(rng.next_below(f.order()))};
        SessionState st = propagate(f, net, msgs, keys);
        for (const auto& node : net.nodes) {
            if (node.role != Role::destination) continue;
            auto got = decode(f, net, st, node.id);
            REQUIRE(got.has_value());
            CHECK(*got == msgs);
        }
    }
}

TEST_CASE("verifying relays accept honest traffic and log every edge") {
    Field f = make_field_qle(2, 1, 3);
    Network net = identity_relay();
    net.nodes[1].verifying = true;  // R1
    net.nodes[3].verifying = true;  // D1

    authcode::KeyMaterial keys = authcode::keygen(f, {2, 2, 2}, 10);
    std::vector<ExtElem> msgs{f.from_label(1), f.from_label(2), f.from_label(3)};
    PropagateOptions opts;
    opts.verify = true;
    SessionState st = propagate(f, net, msgs, keys, opts);

    REQUIRE(st.log.size() == 5);  // R1 checks e1,e2; D1 checks e5,e6,e7
    for (const auto& entry : st.log) {
        CHECK(entry.accepted);
        CHECK_FALSE(entry.zero_tracking);
    }
    CHECK(st.tag_ops.ext_mults == authcode::cost::tag_mults(3, 2, 2));
    CHECK(st.verify_ops.ext_mults == authcode::cost::verify_mults(2, 2, 5));
}

TEST_CASE("verifier keys are assigned by declaration order of verifying nodes") {
    Network net = identity_relay();
    net.nodes[2].verifying = true;  // R2
    net.nodes[3].verifying = true;  // D1
    Field f = make_field_qle(2, 1, 2);
    authcode::KeyMaterial keys = authcode::keygen(f, {1, 3, 1}, 2);
    auto assign = verifier_assignment(net, keys);
    REQUIRE(assign.size() == 2);
    CHECK(assign.at("R2") == 0);
    CHECK(assign.at("D1") == 1);

    net.nodes[0].verifying = true;  // S counts too if flagged
    net.nodes[1].verifying = true;
    CHECK_THROWS_AS(verifier_assignment(net, keys), std::invalid_argument);
}

TEST_CASE("corrupting a relay changes its downstream packets") {
    Field f = make_field_qle(2, 1, 3);
    Network net = identity_relay();
    authcode::KeyMaterial keys = authcode::keygen(f, {2, 1, 2}, 6);
    std::vector<ExtElem> msgs{f.from_label(3), f.from_label(5), f.from_label(6)};

    SessionState clean = propagate(f, net, msgs, keys);
    PropagateOptions opts;
    opts.corrupt_nodes = {"R2"};
    opts.corruption_seed = 9;
    SessionState dirty = propagate(f, net, msgs, keys, opts);

    // R2's buffered inputs e3, e4 are perturbed; its outputs e6 = buffer(e4)
    // and e7 = buffer(e3) must differ from the clean run, everything else not
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        const bool differs = !(dirty.edge_packets[e] == clean.edge_packets[e]);
        const bool expected = net.edges[e].id == "e6" || net.edges[e].id == "e7";
        CHECK(differs == expected);
        CHECK(dirty.edge_corrupted[e] == expected);
    }

    auto got = decode(f, net, dirty, "D1");
    CHECK((!got.has_value() || *got != msgs));

    CHECK_THROWS_AS(
        propagate(f, net, msgs, keys, PropagateOptions{false, {"nobody"}, 1}),
        std::invalid_argument);
}

TEST_CASE("a verifying node quarantines corrupted inputs") {
    Field f = make_field_qle(2, 1, 3);
    Network net = identity_relay();
    net.nodes[2].verifying = true;  // R2 checks what it receives
    // reuse bound 1 keeps the check linear in the data, so any shift is caught
    authcode::KeyMaterial keys = authcode::keygen(f, {2, 1, 1}, 6);
    REQUIRE_FALSE(f.is_zero(keys.verifiers[0].evals[1]));
    std::vector<ExtElem> msgs{f.from_label(3), f.from_label(5), f.from_label(6)};

    PropagateOptions opts;
    opts.verify = true;
    opts.corrupt_nodes = {"R2"};
    opts.corruption_seed = 9;
    SessionState st = propagate(f, net, msgs, keys, opts);

    REQUIRE(st.log.size() == 2);
    CHECK_FALSE(st.log[0].accepted);
    CHECK_FALSE(st.log[1].accepted);
    // rejected buffers are zeroed, so R2's outputs carry zero data
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
        if (net.edges[e].from != "R2") continue;
        CHECK(st.edge_packets[e].tracking == 0);
        CHECK_FALSE(st.edge_corrupted[e]);
    }
}

TEST_CASE("zero tracking weight is flagged but still verifies") {
    Field f = make_field_qle(2, 1, 2);
    Network net;
    net.n = 2;
    net.nodes = {{"S", Role::source, false},
                 {"R", Role::intermediate, false},
                 {"D", Role::destination, true}};
    net.edges = {{"e1", "S", "R", {1, 0}},
                 {"e2", "S", "R", {0, 1}},
                 {"e3", "R", "D", {1, 1}}};  // tracking 1+1 = 0 over GF(2)
    authcode::KeyMaterial keys = authcode::keygen(f, {2, 1, 2}, 20);
    std::vector<ExtElem> msgs{f.from_label(1), f.from_label(2)};
    PropagateOptions opts;
    opts.verify = true;
    SessionState st = propagate(f, net, msgs, keys, opts);
    REQUIRE(st.log.size() == 1);
    CHECK(st.log[0].accepted);
    CHECK(st.log[0].zero_tracking);
}

TEST_CASE("structural validation rejects malformed networks") {
    Field f = make_field_qle(2, 1, 2);
    Network good = identity_relay();
    CHECK_NOTHROW(validate(good));

    Network dup = good;
    dup.nodes.push_back({"R1", Role::intermediate, false});
    CHECK_THROWS_AS(validate(dup), std::invalid_argument);

    Network two_sources = good;
    two_sources.nodes[1].role = Role::source;
    CHECK_THROWS_AS(validate(two_sources), std::invalid_argument);

    Network dest_out = good;
    dest_out.edges.push_back({"e8", "D1", "R1", {1}});
    CHECK_THROWS_AS(validate(dest_out), std::invalid_argument);

    Network cycle = good;
    cycle.edges.push_back({"e8", "R2", "R1", {1, 1}});
    CHECK_THROWS_AS(validate(cycle), std::invalid_argument);

    Network bad_coeffs = good;
    bad_coeffs.edges[3].coeffs = {1};  // R1 has two in-edges
    CHECK_THROWS_AS(validate(bad_coeffs), std::invalid_argument);

    Network orphan = good;
    orphan.nodes.push_back({"X", Role::intermediate, false});
    orphan.edges.push_back({"e8", "X", "D1", {1}});
    CHECK_THROWS_AS(validate(orphan), std::invalid_argument);
}

TEST_CASE("decodability detects rank-deficient destinations") {
    Field f = make_field_qle(2, 1, 2);
    Network net = identity_relay();
    net.edges[4].coeffs = {0, 1};  // e5 now duplicates message 2's line
    CHECK_FALSE(check_decodability(f, net));
}
