#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncauth/authcode.hpp"
#include "ncauth/fraction.hpp"
#include "ncauth/gf.hpp"
#include "ncauth/netcode.hpp"

namespace ncauth::goodput {

using gf::Field;

// Network plus the explicit receiver sets used for placement enumeration.
// The sets must agree with the node roles.
struct Topology {
  netcode::Network net;
  std::vector<std::string> destinations;
  std::vector<std::string> intermediates;
};

inline void validate(const Topology& topo) {
  netcode::validate(topo.net);
  std::set<std::string> dests(topo.destinations.begin(), topo.destinations.end());
  std::set<std::string> inters(topo.intermediates.begin(), topo.intermediates.end());
  std::size_t dest_count = 0, inter_count = 0;
  for (const auto& node : topo.net.nodes) {
    if (node.role == netcode::Role::destination) {
      ++dest_count;
      if (!dests.contains(node.id))
        throw std::invalid_argument("topology: destination set misses " + node.id);
    } else if (node.role == netcode::Role::intermediate) {
      ++inter_count;
      if (!inters.contains(node.id))
        throw std::invalid_argument("topology: intermediate set misses " + node.id);
    }
  }
  if (dest_count != dests.size() || inter_count != inters.size())
    throw std::invalid_argument("topology: receiver sets disagree with node roles");
}

// Full-propagation corruption closure: every out-edge of a placed node is
// corrupted (the node combines corrupted incoming buffers), and any node with
// a corrupted in-edge corrupts all of its out-edges.
struct PlacementOutcome {
  std::vector<std::string> placement;
  std::set<std::string> corrupted_dest_edges;
  std::size_t dest_edge_count = 0;
  Fraction goodput;                          // 1 - corrupted/total over all destinations
  std::map<std::string, Fraction> per_destination;
};

inline PlacementOutcome corrupted_dest_edges(const Topology& topo,
                                             const std::vector<std::string>& placement) {
  validate(topo);
  const auto& net = topo.net;
  const netcode::NetIndex ix = netcode::build_index(net);
  std::set<std::string> placed(placement.begin(), placement.end());
  for (const auto& id : placement) {
    const bool ok = std::any_of(topo.intermediates.begin(), topo.intermediates.end(),
                                [&](const std::string& r) { return r == id; });
    if (!ok) throw std::invalid_argument("topology: placement node " + id + " is not intermediate");
  }

  std::vector<bool> tainted(net.edges.size(), false);
  for (std::size_t node : ix.topo_nodes) {
    bool node_corrupt = placed.contains(net.nodes[node].id);
    for (std::size_t e : ix.in_edges[node]) node_corrupt = node_corrupt || tainted[e];
    if (!node_corrupt) continue;
    for (std::size_t e : ix.out_edges[node]) tainted[e] = true;
  }

  PlacementOutcome out;
  out.placement = placement;
  for (std::size_t d : ix.destinations) {
    std::size_t corrupted = 0;
    for (std::size_t e : ix.in_edges[d]) {
      ++out.dest_edge_count;
      if (tainted[e]) {
        ++corrupted;
        out.corrupted_dest_edges.insert(net.edges[e].id);
      }
    }
    out.per_destination[net.nodes[d].id] =
        Fraction(1) - Fraction(static_cast<std::int64_t>(corrupted),
                               static_cast<std::int64_t>(ix.in_edges[d].size()));
  }
  out.goodput = Fraction(1) - Fraction(static_cast<std::int64_t>(out.corrupted_dest_edges.size()),
                                       static_cast<std::int64_t>(out.dest_edge_count));
  return out;
}

// Exact statistics over all C(r, r_c) placements, intermediates taken in id
// order so runs are reproducible byte for byte.
struct PlacementStats {
  std::uint32_t r_c = 0;
  Fraction min, max, avg;
  std::vector<PlacementOutcome> outcomes;
};

inline PlacementStats average_over_placements(const Topology& topo, std::uint32_t r_c) {
  validate(topo);
  std::vector<std::string> pool = topo.intermediates;
  std::sort(pool.begin(), pool.end());
  if (r_c == 0 || r_c > pool.size())
    throw std::invalid_argument("goodput: r_c must be in 1..r");

  PlacementStats stats;
  stats.r_c = r_c;
  std::vector<std::size_t> pick(r_c);
  for (std::uint32_t i = 0; i < r_c; ++i) pick[i] = i;
  bool first = true;
  Fraction sum(0);
  while (true) {
    std::vector<std::string> placement;
    for (auto i : pick) placement.push_back(pool[i]);
    auto outcome = corrupted_dest_edges(topo, placement);
    if (first || outcome.goodput < stats.min) stats.min = outcome.goodput;
    if (first || stats.max < outcome.goodput) stats.max = outcome.goodput;
    first = false;
    sum = sum + outcome.goodput;
    stats.outcomes.push_back(std::move(outcome));

    // next combination
    std::size_t i = r_c;
    while (i-- > 0) {
      if (pick[i] + (r_c - i) < pool.size()) {
        ++pick[i];
        for (std::size_t j = i + 1; j < r_c; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) {
        stats.avg = sum / Fraction(static_cast<std::int64_t>(stats.outcomes.size()));
        return stats;
      }
    }
  }
}

// With the scheme on, corrupted packets are discarded where they enter, so
// goodput stays at the full rate: the gain of running verification is
// 1 - average unverified goodput.
inline Fraction gain(const Topology& topo, std::uint32_t r_c) {
  return Fraction(1) - average_over_placements(topo, r_c).avg;
}

// --- Packet-level cross-validation ------------------------------------------

// Field and scheme sized for exact simulator/analytic agreement: q = 2 with
// one data coordinate per edge (so distinct injections never cancel at a
// merge), and enough verifier keys for every intermediate and destination.
struct SimConfig {
  gf::FieldParams field;
  authcode::SchemeParams scheme;
};

inline SimConfig default_sim_config(const Topology& topo) {
  SimConfig cfg;
  cfg.field.p = 2;
  cfg.field.e = 1;
  const std::size_t edges = topo.net.edges.size();
  cfg.field.l = static_cast<std::uint32_t>(std::clamp<std::size_t>(edges, 2, 16));
  cfg.scheme.k = 2;
  cfg.scheme.M = 2;
  std::uint32_t candidates = 0;
  for (const auto& node : topo.net.nodes)
    if (node.role != netcode::Role::source) ++candidates;
  cfg.scheme.V = std::max<std::uint32_t>(candidates, 1);
  return cfg;
}

struct SimulatedGoodput {
  Fraction goodput;
  std::set<std::string> corrupted_dest_edges;  // measured, not the closure
  std::size_t dest_edge_count = 0;
  std::uint64_t destination_rejections = 0;
  bool scheme_on = false;
};

// Runs the real pipeline: keygen, tag, combine, optionally verify. Scheme
// off, an edge counts as corrupted when its packet differs from the honest
// run's packet; scheme on, delivery is judged by the destinations' own
// verification outcomes. Local coefficients are redrawn nonzero so that
// corruption can never be annihilated by a zero coefficient, matching the
// full-propagation closure on split-free topologies.
//
// A verifier misses a data shift only when the shift lands on its single
// blind point, a 1/q^l event per check. What is measured here is the
// filter-at-first-verifying-hop behaviour, so scheme-on sessions where a
// placed node accepts one of its perturbed buffers are redrawn with fresh
// keys; the miss probability itself is the substitution census's job.
inline SimulatedGoodput simulate_goodput(const Field& f, const authcode::SchemeParams& scheme,
                                         const Topology& topo,
                                         const std::vector<std::string>& placement, bool scheme_on,
                                         std::uint64_t seed) {
  validate(topo);
  Rng rng(seed);
  netcode::Network net = topo.net;
  netcode::random_coeffs(f, net, rng.next_u64(), /*nonzero_only=*/true);
  for (auto& node : net.nodes)
    node.verifying = scheme_on && node.role != netcode::Role::source;

  std::vector<gf::ExtElem> messages;
  for (std::uint32_t i = 0; i < net.n; ++i) messages.push_back(f.from_label(rng.next_below(f.order())));

  const std::set<std::string> placed_set(placement.begin(), placement.end());
  netcode::SessionState honest, run;
  for (int attempt = 0;; ++attempt) {
    const auto keys = authcode::keygen(f, scheme, rng.next_u64());
    netcode::PropagateOptions honest_opts;
    honest_opts.verify = scheme_on;
    honest = netcode::propagate(f, net, messages, keys, honest_opts);

    netcode::PropagateOptions opts = honest_opts;
    opts.corrupt_nodes = placement;
    opts.corruption_seed = rng.next_u64();
    run = netcode::propagate(f, net, messages, keys, opts);

    if (!scheme_on) break;
    const bool missed = std::any_of(run.log.begin(), run.log.end(), [&](const auto& entry) {
      return entry.accepted && placed_set.contains(entry.node);
    });
    if (!missed) break;
    if (attempt >= 64)
      throw std::runtime_error("simulate: corruption repeatedly evaded verification");
  }

  const netcode::NetIndex ix = netcode::build_index(net);
  SimulatedGoodput out;
  out.scheme_on = scheme_on;
  for (std::size_t d : ix.destinations) {
    for (std::size_t e : ix.in_edges[d]) {
      ++out.dest_edge_count;
      if (!scheme_on && !(run.edge_packets[e] == honest.edge_packets[e]))
        out.corrupted_dest_edges.insert(net.edges[e].id);
    }
  }
  if (scheme_on) {
    for (const auto& entry : run.log) {
      const bool at_destination =
          std::any_of(topo.destinations.begin(), topo.destinations.end(),
                      [&](const std::string& id) { return id == entry.node; });
      if (at_destination && !entry.accepted) {
        ++out.destination_rejections;
        out.corrupted_dest_edges.insert(entry.edge);
      }
    }
  }
  out.goodput =
      Fraction(1) - Fraction(static_cast<std::int64_t>(out.corrupted_dest_edges.size()),
                             static_cast<std::int64_t>(out.dest_edge_count));
  return out;
}

}  // namespace ncauth::goodput
