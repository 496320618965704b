#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncauth/authcode.hpp"
#include "ncauth/gf.hpp"
#include "ncauth/linalg.hpp"
#include "ncauth/rng.hpp"

namespace ncauth::netcode {

using authcode::KeyMaterial;
using authcode::Packet;
using gf::ExtElem;
using gf::Field;
using gf::Sym;

enum class Role { source, intermediate, destination };

struct Node {
  std::string id;
  Role role = Role::intermediate;
  bool verifying = false;
};

// Directed unit-capacity edge. coeffs are the tail's local coefficients, one
// per in-edge of the tail in declaration order; for source out-edges they are
// the source's chosen global row (length n).
struct Edge {
  std::string id;
  std::string from;
  std::string to;
  std::vector<Sym> coeffs;
};

struct Network {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::uint32_t n = 1;  // number of source messages per generation
};

// Validated adjacency view. Node processing order is topological with ties
// broken on node id, so identical inputs give identical sessions everywhere.
struct NetIndex {
  std::size_t source = 0;
  std::vector<std::size_t> destinations;
  std::vector<std::vector<std::size_t>> in_edges;   // node -> edge indices, declaration order
  std::vector<std::vector<std::size_t>> out_edges;  // node -> edge indices, declaration order
  std::vector<std::size_t> topo_nodes;
};

inline NetIndex build_index(const Network& net) {
  NetIndex ix;
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    if (!by_id.emplace(net.nodes[i].id, i).second)
      throw std::invalid_argument("network: duplicate node id " + net.nodes[i].id);
  }
  ix.in_edges.assign(net.nodes.size(), {});
  ix.out_edges.assign(net.nodes.size(), {});
  std::set<std::string> edge_ids;
  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const Edge& edge = net.edges[e];
    if (!edge_ids.insert(edge.id).second)
      throw std::invalid_argument("network: duplicate edge id " + edge.id);
    const auto from = by_id.find(edge.from);
    const auto to = by_id.find(edge.to);
    if (from == by_id.end() || to == by_id.end())
      throw std::invalid_argument("network: edge " + edge.id + " references unknown node");
    ix.out_edges[from->second].push_back(e);
    ix.in_edges[to->second].push_back(e);
  }

  bool have_source = false;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const Node& node = net.nodes[i];
    if (node.role == Role::source) {
      if (have_source) throw std::invalid_argument("network: more than one source");
      have_source = true;
      ix.source = i;
      if (!ix.in_edges[i].empty()) throw std::invalid_argument("network: source has incoming edges");
    } else if (node.role == Role::destination) {
      ix.destinations.push_back(i);
      if (!ix.out_edges[i].empty())
        throw std::invalid_argument("network: destination " + node.id + " has outgoing edges");
    }
  }
  if (!have_source) throw std::invalid_argument("network: no source node");
  if (ix.destinations.empty()) throw std::invalid_argument("network: no destination node");

  for (std::size_t e = 0; e < net.edges.size(); ++e) {
    const std::size_t tail = by_id.at(net.edges[e].from);
    if (net.nodes[tail].role != Role::source && ix.in_edges[tail].empty())
      throw std::invalid_argument("network: node " + net.edges[e].from +
                                  " forwards without incoming edges");
    const std::size_t expect =
        net.nodes[tail].role == Role::source ? net.n : ix.in_edges[tail].size();
    if (net.edges[e].coeffs.size() != expect)
      throw std::invalid_argument("network: edge " + net.edges[e].id +
                                  " coefficient count does not match tail in-degree");
  }

  // Kahn with an id-ordered ready set; anything left over means a cycle.
  std::vector<std::size_t> indeg(net.nodes.size());
  for (std::size_t i = 0; i < net.nodes.size(); ++i) indeg[i] = ix.in_edges[i].size();
  std::set<std::pair<std::string, std::size_t>> ready;
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    if (indeg[i] == 0) ready.insert({net.nodes[i].id, i});
  while (!ready.empty()) {
    const auto [id, i] = *ready.begin();
    ready.erase(ready.begin());
    ix.topo_nodes.push_back(i);
    for (std::size_t e : ix.out_edges[i]) {
      const std::size_t head = by_id.at(net.edges[e].to);
      if (--indeg[head] == 0) ready.insert({net.nodes[head].id, head});
    }
  }
  if (ix.topo_nodes.size() != net.nodes.size())
    throw std::invalid_argument("network: graph has a cycle");
  return ix;
}

inline void validate(const Network& net) { (void)build_index(net); }

// Fresh uniform local coefficients; nonzero_only draws from F_q \ {0}.
inline void random_coeffs(const Field& f, Network& net, std::uint64_t seed, bool nonzero_only = false) {
  Rng rng(seed);
  for (auto& edge : net.edges)
    for (auto& c : edge.coeffs)
      c = nonzero_only ? static_cast<Sym>(1 + rng.next_below(f.q() - 1))
                       : static_cast<Sym>(rng.next_below(f.q()));
}

// Global encoding vector per edge, length n, from a topological sweep.
inline std::vector<std::vector<Sym>> compute_global_vectors(const Field& f, const Network& net) {
  const NetIndex ix = build_index(net);
  const auto& base = f.base();
  std::vector<std::vector<Sym>> g(net.edges.size());
  for (std::size_t node : ix.topo_nodes) {
    for (std::size_t e : ix.out_edges[node]) {
      const auto& coeffs = net.edges[e].coeffs;
      for (Sym c : coeffs)
        if (c >= f.q()) throw std::invalid_argument("network: coefficient out of field range");
      if (node == ix.source) {
        g[e] = coeffs;
      } else {
        g[e].assign(net.n, 0);
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
          const auto& gin = g[ix.in_edges[node][j]];
          for (std::uint32_t t = 0; t < net.n; ++t)
            g[e][t] = base.add(g[e][t], base.mul(coeffs[j], gin[t]));
        }
      }
    }
  }
  return g;
}

inline linalg::Mat<gf::BaseField> transfer_matrix(const Field& f, const Network& net,
                                                  const std::string& dest_id) {
  const NetIndex ix = build_index(net);
  const auto globals = compute_global_vectors(f, net);
  for (std::size_t d : ix.destinations) {
    if (net.nodes[d].id != dest_id) continue;
    linalg::Mat<gf::BaseField> G(f.base(), ix.in_edges[d].size(), net.n);
    for (std::size_t r = 0; r < ix.in_edges[d].size(); ++r)
      for (std::uint32_t c = 0; c < net.n; ++c) G.at(r, c) = globals[ix.in_edges[d][r]][c];
    return G;
  }
  throw std::invalid_argument("network: no destination named " + dest_id);
}

// Every destination's transfer matrix must reach rank n.
inline bool check_decodability(const Field& f, const Network& net) {
  const NetIndex ix = build_index(net);
  const auto globals = compute_global_vectors(f, net);
  for (std::size_t d : ix.destinations) {
    linalg::Mat<gf::BaseField> G(f.base(), ix.in_edges[d].size(), net.n);
    for (std::size_t r = 0; r < ix.in_edges[d].size(); ++r)
      for (std::uint32_t c = 0; c < net.n; ++c) G.at(r, c) = globals[ix.in_edges[d][r]][c];
    if (linalg::rank(f.base(), G) != net.n) return false;
  }
  return true;
}

// The i-th verifying node in declaration order holds verifier key i.
inline std::map<std::string, std::uint32_t> verifier_assignment(const Network& net,
                                                                const KeyMaterial& keys) {
  std::map<std::string, std::uint32_t> out;
  std::uint32_t next = 0;
  for (const auto& node : net.nodes) {
    if (!node.verifying) continue;
    if (next >= keys.verifiers.size())
      throw std::invalid_argument("network: more verifying nodes than verifier keys");
    out[node.id] = next++;
  }
  return out;
}

struct PropagateOptions {
  bool verify = false;
  // Nodes whose incoming buffers get corrupted before processing (the
  // adversary tampers with what these nodes received).
  std::vector<std::string> corrupt_nodes;
  std::uint64_t corruption_seed = 1;
};

struct VerifyLogEntry {
  std::string node;
  std::string edge;
  bool accepted = false;
  bool zero_tracking = false;
};

struct SessionState {
  std::vector<Packet> edge_packets;   // by edge index
  std::vector<bool> edge_corrupted;   // taint closure bookkeeping, by edge index
  std::vector<VerifyLogEntry> log;
  std::vector<ExtElem> messages;
  OpCounters tag_ops;
  OpCounters verify_ops;
};

// Runs one generation through the network: tag at the source, combine at
// every node, optionally verify at nodes with the verifying flag (the i-th
// verifying node in declaration order uses verifier key i). Corruption is
// injected into the listed nodes' incoming buffers; a verifying node drops
// (zeroes) any incoming packet that fails its check before combining.
inline SessionState propagate(const Field& f, const Network& net,
                              const std::vector<ExtElem>& messages, const KeyMaterial& keys,
                              const PropagateOptions& opts = {}) {
  if (messages.size() != net.n)
    throw std::invalid_argument("propagate: need exactly n source messages");
  const NetIndex ix = build_index(net);

  const auto verifier_of = verifier_assignment(net, keys);

  SessionState st;
  st.messages = messages;
  st.edge_corrupted.assign(net.edges.size(), false);

  std::vector<Packet> source_packets;
  source_packets.reserve(net.n);
  for (const auto& s : messages) {
    const auto tag = authcode::tag_message(f, keys.source, s, &st.tag_ops);
    source_packets.push_back(authcode::make_packet(f, s, tag));
  }
  const Packet zero_packet{0, std::vector<Sym>(f.l(), 0),
                           std::vector<Sym>(std::size_t{keys.source.k()} * f.l(), 0)};
  st.edge_packets.assign(net.edges.size(), zero_packet);

  std::set<std::string> corrupt(opts.corrupt_nodes.begin(), opts.corrupt_nodes.end());
  for (const auto& id : opts.corrupt_nodes) {
    const bool known = std::any_of(net.nodes.begin(), net.nodes.end(),
                                   [&](const Node& n) { return n.id == id; });
    if (!known) throw std::invalid_argument("propagate: unknown corrupt node " + id);
  }
  Rng corrupt_rng(opts.corruption_seed);

  for (std::size_t node : ix.topo_nodes) {
    if (node == ix.source) {
      for (std::size_t e : ix.out_edges[node])
        st.edge_packets[e] = authcode::combine(f, net.edges[e].coeffs, source_packets);
      continue;
    }
    const auto& ins = ix.in_edges[node];
    std::vector<Packet> buffer;
    std::vector<bool> tainted;
    buffer.reserve(ins.size());
    for (std::size_t e : ins) {
      buffer.push_back(st.edge_packets[e]);
      tainted.push_back(st.edge_corrupted[e]);
    }

    if (corrupt.contains(net.nodes[node].id)) {
      // Perturb each buffered packet's data field on the coordinate indexed
      // by its edge, so distinct injections can never cancel downstream.
      for (std::size_t j = 0; j < ins.size(); ++j) {
        const std::size_t coord = ins[j] % f.l();
        const Sym delta = static_cast<Sym>(1 + corrupt_rng.next_below(f.q() - 1));
        buffer[j].data[coord] = f.base().add(buffer[j].data[coord], delta);
        tainted[j] = true;
      }
    }

    if (opts.verify && net.nodes[node].verifying) {
      const auto& vkey = keys.verifiers[verifier_of.at(net.nodes[node].id)];
      for (std::size_t j = 0; j < ins.size(); ++j) {
        const auto res = authcode::verify_edge(f, vkey, buffer[j], &st.verify_ops);
        st.log.push_back({net.nodes[node].id, net.edges[ins[j]].id, res.accepted, res.zero_tracking});
        if (!res.accepted) {
          buffer[j] = zero_packet;
          tainted[j] = false;
        }
      }
    }

    for (std::size_t e : ix.out_edges[node]) {
      st.edge_packets[e] = authcode::combine(f, net.edges[e].coeffs, buffer);
      bool taint = false;
      for (std::size_t j = 0; j < ins.size(); ++j)
        if (net.edges[e].coeffs[j] != 0 && tainted[j]) taint = true;
      st.edge_corrupted[e] = taint;
    }
  }
  return st;
}

// Static-coefficient decode: solves G_D X = Y over F_q, where Y rows are the
// received data fields on the destination's in-edges. Returns nullopt when
// the transfer matrix is rank-deficient or the system is inconsistent.
inline std::optional<std::vector<ExtElem>> decode(const Field& f, const Network& net,
                                                  const SessionState& st,
                                                  const std::string& dest_id) {
  const NetIndex ix = build_index(net);
  const auto globals = compute_global_vectors(f, net);
  for (std::size_t d : ix.destinations) {
    if (net.nodes[d].id != dest_id) continue;
    const auto& ins = ix.in_edges[d];
    linalg::Mat<gf::BaseField> G(f.base(), ins.size(), net.n);
    linalg::Mat<gf::BaseField> Y(f.base(), ins.size(), f.l());
    for (std::size_t r = 0; r < ins.size(); ++r) {
      for (std::uint32_t c = 0; c < net.n; ++c) G.at(r, c) = globals[ins[r]][c];
      for (std::uint32_t c = 0; c < f.l(); ++c) Y.at(r, c) = st.edge_packets[ins[r]].data[c];
    }
    if (linalg::rank(f.base(), G) != net.n) return std::nullopt;
    const auto X = linalg::solve(f.base(), G, Y);
    if (!X) return std::nullopt;
    std::vector<ExtElem> out;
    out.reserve(net.n);
    for (std::uint32_t i = 0; i < net.n; ++i) {
      std::vector<Sym> symbols(f.l());
      for (std::uint32_t c = 0; c < f.l(); ++c) symbols[c] = X->at(i, c);
      out.push_back(f.msg_to_ext(symbols));
    }
    return out;
  }
  throw std::invalid_argument("network: no destination named " + dest_id);
}

}  // namespace ncauth::netcode
