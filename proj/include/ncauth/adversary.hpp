#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncauth/authcode.hpp"
#include "ncauth/fraction.hpp"
#include "ncauth/gf.hpp"
#include "ncauth/linalg.hpp"
#include "ncauth/netcode.hpp"
#include "ncauth/rng.hpp"

namespace ncauth::adversary {

using authcode::Packet;
using authcode::VerifierKey;
using gf::ExtElem;
using gf::Field;
using EMat = linalg::Mat<Field>;
using EPoly = gf::Poly<Field>;

inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t{1} << 24;

// Enumeration budget: NCAUTH_MAX_ENUM overrides the built-in 2^24 cap.
inline std::uint64_t enum_cap_from_env() {
  if (const char* env = std::getenv("NCAUTH_MAX_ENUM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw std::invalid_argument("NCAUTH_MAX_ENUM must be a positive integer");
  }
  return kDefaultEnumCap;
}

// Everything a coalition of K verifiers extracts from one observed session:
//   Xmat (K x k)        Vandermonde rows (1, x_i, ..., x_i^(k-1))
//   Pmat (K x (M+1))    their key evaluations
//   Gmat ((M+1) x H)    per observed edge: [sum g, d, d^q, ..., d^(q^(M-1))]
//   Cmat (k x H)        observed combined tag coefficients
// Row m of a Gmat column is computable from the packet alone because network
// coefficients live in F_q and are fixed by Frobenius:
// sum(g s)^(q^m) = sum(g s^(q^m)).
struct CoalitionView {
  std::uint32_t k = 1;
  std::uint32_t M = 1;
  std::vector<std::uint32_t> members;
  EMat Xmat, Pmat, Gmat, Cmat;

  std::uint32_t K() const { return static_cast<std::uint32_t>(Xmat.rows); }
  std::uint32_t H() const { return static_cast<std::uint32_t>(Gmat.cols); }
};

inline CoalitionView view_from_packets(const Field& f, std::uint32_t k, std::uint32_t M,
                                       const std::vector<VerifierKey>& member_keys,
                                       const std::vector<Packet>& observed) {
  CoalitionView v;
  v.k = k;
  v.M = M;
  const std::uint32_t K = static_cast<std::uint32_t>(member_keys.size());
  const std::uint32_t H = static_cast<std::uint32_t>(observed.size());

  v.Xmat = EMat(f, K, k);
  v.Pmat = EMat(f, K, M + 1);
  for (std::uint32_t i = 0; i < K; ++i) {
    v.members.push_back(member_keys[i].index);
    ExtElem xp = f.one();
    for (std::uint32_t j = 0; j < k; ++j) {
      v.Xmat.at(i, j) = xp;
      xp = f.mul_raw(xp, member_keys[i].point);
    }
    if (member_keys[i].evals.size() != M + 1)
      throw std::invalid_argument("coalition: verifier key has wrong eval count");
    for (std::uint32_t m = 0; m <= M; ++m) v.Pmat.at(i, m) = member_keys[i].evals[m];
  }

  v.Gmat = EMat(f, M + 1, H);
  v.Cmat = EMat(f, k, H);
  for (std::uint32_t h = 0; h < H; ++h) {
    const Packet& pkt = observed[h];
    if (authcode::tag_coeff_count(f, pkt) != k)
      throw std::invalid_argument("coalition: packet tag does not match k");
    v.Gmat.at(0, h) = f.embed_base(pkt.tracking);
    ExtElem chain = authcode::data_ext(f, pkt);
    for (std::uint32_t m = 1; m <= M; ++m) {
      v.Gmat.at(m, h) = chain;
      if (m < M) chain = f.frobenius(chain);
    }
    for (std::uint32_t j = 0; j < k; ++j) v.Cmat.at(j, h) = authcode::tag_coeff(f, pkt, j);
  }
  return v;
}

// Coalition = the given verifying nodes; observed edges = their in-edges in
// declaration order.
inline CoalitionView collect_view(const Field& f, const netcode::Network& net,
                                  const netcode::SessionState& st,
                                  const std::vector<std::string>& member_node_ids,
                                  const authcode::KeyMaterial& keys) {
  const auto assignment = netcode::verifier_assignment(net, keys);
  const netcode::NetIndex ix = netcode::build_index(net);
  std::vector<VerifierKey> member_keys;
  std::vector<Packet> observed;
  for (const auto& id : member_node_ids) {
    const auto it = assignment.find(id);
    if (it == assignment.end())
      throw std::invalid_argument("coalition: node " + id + " holds no verifier key");
    member_keys.push_back(keys.verifiers[it->second]);
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
      if (net.nodes[i].id != id) continue;
      for (std::size_t e : ix.in_edges[i]) observed.push_back(st.edge_packets[e]);
    }
  }
  return view_from_packets(f, keys.source.k(), keys.source.M(), member_keys, observed);
}

inline EMat key_as_matrix(const Field& f, const authcode::SourceKey& key) {
  EMat A(f, key.k(), key.M() + 1);
  for (std::uint32_t m = 0; m <= key.M(); ++m)
    for (std::uint32_t j = 0; j < key.k(); ++j) A.at(j, m) = key.poly[m][j];
  return A;
}

inline bool is_consistent(const Field& f, const CoalitionView& v, const EMat& A) {
  const EMat AG = linalg::matmul(f, A, v.Gmat);
  if (AG != v.Cmat) return false;
  const EMat XA = linalg::matmul(f, v.Xmat, A);
  return XA == v.Pmat;
}

enum class EnumMode { brute_force, linear_algebra };

// Consistent-key solution set: affine space particular + span(basis), with
// the explicit list filled in whenever its size fits the cap.
struct KeyCandidateSet {
  bool consistent = false;
  EMat particular;
  std::vector<EMat> basis;
  std::vector<EMat> all;
  bool enumerated = false;

  std::uint64_t dimension() const { return basis.size(); }
};

inline std::uint64_t pow_capped(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (v > cap / base) return cap + 1;
    v *= base;
  }
  return v;
}

inline std::uint64_t candidate_count_capped(const Field& f, const KeyCandidateSet& s,
                                            std::uint64_t cap) {
  if (!s.consistent) return 0;
  return pow_capped(f.order(), s.dimension(), cap);
}

namespace detail {

inline EMat unvec(const Field& f, const std::vector<ExtElem>& u, std::uint32_t k, std::uint32_t M) {
  EMat A(f, k, M + 1);
  for (std::uint32_t j = 0; j < k; ++j)
    for (std::uint32_t m = 0; m <= M; ++m) A.at(j, m) = u[std::size_t{j} * (M + 1) + m];
  return A;
}

}  // namespace detail

// Solves the stacked linear system A Gmat = Cmat, Xmat A = Pmat for the
// k(M+1) entries of A over F_{q^l}. Brute force walks every label assignment
// instead; both modes agree on the solution set.
inline KeyCandidateSet enumerate_consistent_keys(const Field& f, const CoalitionView& v,
                                                 EnumMode mode, std::uint64_t cap = 0) {
  if (cap == 0) cap = enum_cap_from_env();
  const std::uint32_t k = v.k, M = v.M;
  const std::uint32_t unknowns = k * (M + 1);
  KeyCandidateSet out;

  if (mode == EnumMode::brute_force) {
    const std::uint64_t total = pow_capped(f.order(), unknowns, cap);
    if (total > cap)
      throw std::invalid_argument("enumerate: (q^l)^(k(M+1)) exceeds the enumeration cap");
    for (std::uint64_t label = 0; label < total; ++label) {
      std::vector<ExtElem> u(unknowns);
      std::uint64_t rest = label;
      for (auto& e : u) {
        e = f.from_label(rest % f.order());
        rest /= f.order();
      }
      EMat A = detail::unvec(f, u, k, M);
      if (is_consistent(f, v, A)) out.all.push_back(std::move(A));
    }
    out.enumerated = true;
    out.consistent = !out.all.empty();
    if (out.consistent) out.particular = out.all.front();
    return out;
  }

  const std::size_t eq_count = std::size_t{k} * v.H() + std::size_t{v.K()} * (M + 1);
  EMat sys(f, eq_count, unknowns);
  EMat rhs(f, eq_count, 1);
  std::size_t row = 0;
  for (std::uint32_t j = 0; j < k; ++j)
    for (std::uint32_t h = 0; h < v.H(); ++h, ++row) {
      for (std::uint32_t m = 0; m <= M; ++m)
        sys.at(row, std::size_t{j} * (M + 1) + m) = v.Gmat.at(m, h);
      rhs.at(row, 0) = v.Cmat.at(j, h);
    }
  for (std::uint32_t i = 0; i < v.K(); ++i)
    for (std::uint32_t m = 0; m <= M; ++m, ++row) {
      for (std::uint32_t j = 0; j < k; ++j)
        sys.at(row, std::size_t{j} * (M + 1) + m) = v.Xmat.at(i, j);
      rhs.at(row, 0) = v.Pmat.at(i, m);
    }

  const auto solution = linalg::solve(f, sys, rhs);
  if (!solution) return out;
  out.consistent = true;
  std::vector<ExtElem> u(unknowns);
  for (std::uint32_t i = 0; i < unknowns; ++i) u[i] = solution->at(i, 0);
  out.particular = detail::unvec(f, u, k, M);
  for (const auto& kv : linalg::kernel_basis(f, sys)) out.basis.push_back(detail::unvec(f, kv, k, M));

  const std::uint64_t count = candidate_count_capped(f, out, cap);
  if (count <= cap) {
    out.all.reserve(count);
    for (std::uint64_t label = 0; label < count; ++label) {
      EMat A = out.particular;
      std::uint64_t rest = label;
      for (const auto& B : out.basis) {
        const ExtElem r = f.from_label(rest % f.order());
        rest /= f.order();
        for (std::size_t i = 0; i < A.a.size(); ++i) A.a[i] = f.add(A.a[i], f.mul_raw(r, B.a[i]));
      }
      out.all.push_back(std::move(A));
    }
    out.enumerated = true;
  }
  return out;
}

// --- The three structure lemmas --------------------------------------------

// Rank-one annihilator: A = a (x) b with a(x) = prod(x - alpha_i),
// b(y) = prod(y - beta_j) as coefficient vectors. Vandermonde rows built on
// the alphas kill A from the left, on the betas from the right.
inline EMat lemma1_outer(const Field& f, const std::vector<ExtElem>& alphas,
                         const std::vector<ExtElem>& betas) {
  const EPoly a = gf::poly_from_roots(f, alphas);
  const EPoly b = gf::poly_from_roots(f, betas);
  EMat A(f, a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t m = 0; m < b.size(); ++m) A.at(j, m) = f.mul_raw(a[j], b[m]);
  return A;
}

struct SparseCofactor {
  EPoly c;  // cofactor, degree q^(M-1) - H
  EPoly b;  // d * c, supported only on exponents {0, q^0, ..., q^(M-1)}
  std::vector<ExtElem> support;  // b_0 and the M coefficients at y^(q^j)
};

// Lemma: for H <= M roots there is a cofactor c such that b = c * prod(y -
// gamma_i) has nonzero coefficients only at exponents {0} u {q^j}. Solved as
// the kernel of the banded convolution system with the M+1 free rows removed.
inline SparseCofactor lemma2_sparse_cofactor(const Field& f, const std::vector<ExtElem>& gammas,
                                             std::uint32_t M) {
  const std::uint32_t H = static_cast<std::uint32_t>(gammas.size());
  if (H > M) throw std::invalid_argument("lemma2: needs H <= M");
  std::uint64_t target_deg = 1;
  for (std::uint32_t i = 0; i + 1 < M; ++i) {
    target_deg *= f.q();
    if (target_deg > 4096) throw std::invalid_argument("lemma2: q^(M-1) too large to expand");
  }

  std::set<std::uint64_t> support_exponents{0};
  std::uint64_t e = 1;
  for (std::uint32_t j = 0; j < M; ++j) {
    support_exponents.insert(e);
    e *= f.q();
  }

  const EPoly d = gf::poly_from_roots(f, gammas);
  const std::uint64_t c_len = target_deg - H + 1;
  std::vector<std::uint64_t> constrained;
  for (std::uint64_t i = 0; i <= target_deg; ++i)
    if (!support_exponents.contains(i)) constrained.push_back(i);

  EMat D(f, constrained.size(), c_len);
  for (std::size_t r = 0; r < constrained.size(); ++r) {
    const std::uint64_t i = constrained[r];
    for (std::uint64_t t = 0; t < c_len; ++t) {
      if (i < t || i - t >= d.size()) continue;
      D.at(r, t) = d[i - t];
    }
  }
  const auto kernel = linalg::kernel_basis(f, D);
  if (kernel.empty()) throw std::logic_error("lemma2: kernel unexpectedly trivial");

  SparseCofactor out;
  out.c = gf::poly_trim(f, kernel.front());
  out.b = gf::poly_mul(f, d, out.c);
  out.b.resize(target_deg + 1, f.zero());
  out.support.push_back(out.b[0]);
  e = 1;
  for (std::uint32_t j = 0; j < M; ++j) {
    out.support.push_back(out.b[e]);
    e *= f.q();
  }
  return out;
}

struct Lemma3Family {
  EMat generator;                // nonzero A with A Gmat = 0 and Xmat A = 0
  EPoly a;                       // left annihilator polynomial
  std::vector<ExtElem> gammas;   // per observed edge, after the S fixup
  std::vector<ExtElem> support;  // sparse coefficients of b
};

// Homogeneous solution family {r * generator : r in F_{q^l}} built per the
// reduction: scale each Gmat column by its tracking sum (zero columns first
// absorb the lowest-index nonzero column), take the resulting gamma ratios as
// roots of a sparse b, and pair with a(x) vanishing on the coalition points,
// padded with zero roots up to degree k-1 when K < k-1.
inline Lemma3Family lemma3_family(const Field& f, const CoalitionView& v) {
  if (v.K() + 1 > v.k) throw std::invalid_argument("lemma3: needs K <= k-1");
  if (v.H() > v.M) throw std::invalid_argument("lemma3: needs H <= M");

  std::optional<std::uint32_t> donor;
  for (std::uint32_t h = 0; h < v.H(); ++h) {
    if (!f.is_zero(v.Gmat.at(0, h))) {
      donor = h;
      break;
    }
  }
  if (!donor) throw std::invalid_argument("lemma3: every observed edge has zero tracking sum");

  Lemma3Family out;
  for (std::uint32_t h = 0; h < v.H(); ++h) {
    ExtElem tau = v.Gmat.at(0, h);
    ExtElem w = v.Gmat.at(1, h);
    if (f.is_zero(tau)) {
      tau = f.add(tau, v.Gmat.at(0, *donor));
      w = f.add(w, v.Gmat.at(1, *donor));
    }
    out.gammas.push_back(f.mul_raw(w, f.inv(tau)));
  }

  const auto cofactor = lemma2_sparse_cofactor(f, out.gammas, v.M);
  out.support = cofactor.support;

  std::vector<ExtElem> roots;
  for (std::uint32_t i = 0; i < v.K(); ++i) roots.push_back(v.Xmat.at(i, 1));
  while (roots.size() + 1 < v.k) roots.push_back(f.zero());
  out.a = gf::poly_from_roots(f, roots);

  out.generator = EMat(f, v.k, v.M + 1);
  for (std::uint32_t j = 0; j < v.k; ++j)
    for (std::uint32_t m = 0; m <= v.M; ++m)
      out.generator.at(j, m) = f.mul_raw(out.a[j], out.support[m]);
  return out;
}

// --- Substitution experiments -----------------------------------------------

// Tag for a fake message derived from a candidate key matrix.
inline authcode::Tag forge_tag(const Field& f, const EMat& A, ExtElem s) {
  authcode::SourceKey key;
  key.poly.assign(A.cols, std::vector<ExtElem>(A.rows));
  for (std::size_t m = 0; m < A.cols; ++m)
    for (std::size_t j = 0; j < A.rows; ++j) key.poly[m][j] = A.at(j, m);
  return authcode::tag_message(f, key, s);
}

// First field element that differs from every observed data field and every
// observed ratio data/tracking. Messages equal to such a ratio are
// replay-equivalent to scaling an observed packet: every consistent key tags
// them identically, so they probe nothing.
inline ExtElem choose_forgery_message(const Field& f, const CoalitionView& v) {
  std::set<std::uint64_t> excluded;
  for (std::uint32_t h = 0; h < v.H(); ++h) {
    excluded.insert(v.Gmat.at(1, h).v);
    if (!f.is_zero(v.Gmat.at(0, h)))
      excluded.insert(f.mul_raw(v.Gmat.at(1, h), f.inv(v.Gmat.at(0, h))).v);
  }
  for (std::uint64_t label = 0; label < f.order(); ++label)
    if (!excluded.contains(label)) return f.from_label(label);
  throw std::logic_error("substitution: no unobserved message available");
}

struct ExperimentParams {
  authcode::SchemeParams scheme;
  std::uint32_t K = 1;       // verifier keys the coalition holds
  std::uint32_t H = 1;       // observed combined packets
  std::uint32_t n = 1;       // source messages per observed session
  std::uint64_t trials = 0;  // sampled trials; 0 = exact census only
  std::uint64_t enum_cap = 0;
};

struct SubstitutionReport {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  Fraction exact;  // accepting candidates over all consistent candidates
  std::uint64_t candidate_count = 0;
  std::uint64_t candidate_dimension = 0;
  double empirical() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

// One observed session for the coalition: n tagged messages combined along H
// random nonzero-weight rows, the first K verifier keys as members, verifier
// K as the forgery target.
struct ObservedSession {
  authcode::KeyMaterial keys;
  CoalitionView view;
  VerifierKey target;
};

inline ObservedSession make_observed_session(const Field& f, const authcode::SchemeParams& scheme,
                                             std::uint32_t K, std::uint32_t H, std::uint32_t n,
                                             Rng& rng) {
  if (K + 1 > scheme.V)
    throw std::invalid_argument("substitution: needs V >= K+1 (coalition plus target)");
  ObservedSession s;
  s.keys = authcode::keygen(f, scheme, rng.next_u64());

  std::vector<ExtElem> messages;
  std::set<std::uint64_t> used;
  while (messages.size() < n) {
    const std::uint64_t label = rng.next_below(f.order());
    if (used.insert(label).second) messages.push_back(f.from_label(label));
  }
  std::vector<Packet> source_packets;
  for (const auto& m : messages)
    source_packets.push_back(authcode::make_packet(f, m, authcode::tag_message(f, s.keys.source, m)));

  std::vector<Packet> observed;
  for (std::uint32_t h = 0; h < H; ++h) {
    std::vector<gf::Sym> row(n);
    bool nonzero = false;
    while (!nonzero) {
      for (auto& c : row) {
        c = static_cast<gf::Sym>(rng.next_below(f.q()));
        nonzero = nonzero || c != 0;
      }
    }
    observed.push_back(authcode::combine(f, row, source_packets));
  }

  std::vector<VerifierKey> member_keys(s.keys.verifiers.begin(), s.keys.verifiers.begin() + K);
  s.view = view_from_packets(f, scheme.k, scheme.M, member_keys, observed);
  s.target = s.keys.verifiers[K];
  return s;
}

inline bool forgery_accepted(const Field& f, const EMat& A, ExtElem fake, const VerifierKey& target) {
  Packet pkt;
  pkt.tracking = 1;
  pkt.data = f.ext_to_msg(fake);
  for (const auto& c : forge_tag(f, A, fake).coeff) {
    const auto symbols = f.ext_to_msg(c);
    pkt.tag.insert(pkt.tag.end(), symbols.begin(), symbols.end());
  }
  return authcode::verify_edge(f, target, pkt).accepted;
}

// Census over the full candidate set (exact success probability) plus, when
// trials > 0, uniform sampling of a candidate per trial.
inline SubstitutionReport run_substitution_experiment(const Field& f, const ExperimentParams& p,
                                                      std::uint64_t seed) {
  Rng rng(seed);
  SubstitutionReport rep;
  ObservedSession session = make_observed_session(f, p.scheme, p.K, p.H, p.n, rng);
  const auto candidates =
      enumerate_consistent_keys(f, session.view, EnumMode::linear_algebra, p.enum_cap);
  if (!candidates.consistent || !candidates.enumerated)
    throw std::runtime_error("substitution: candidate set not enumerable under the cap");
  if (!is_consistent(f, session.view, key_as_matrix(f, session.keys.source)))
    throw std::logic_error("substitution: true key fell outside the consistent set");

  const ExtElem fake = choose_forgery_message(f, session.view);
  std::uint64_t accepting = 0;
  for (const auto& A : candidates.all)
    if (forgery_accepted(f, A, fake, session.target)) ++accepting;
  rep.candidate_count = candidates.all.size();
  rep.candidate_dimension = candidates.dimension();
  rep.exact = Fraction(static_cast<std::int64_t>(accepting),
                       static_cast<std::int64_t>(candidates.all.size()));

  rep.trials = p.trials;
  for (std::uint64_t t = 0; t < p.trials; ++t) {
    const auto& A = candidates.all[rng.next_below(candidates.all.size())];
    if (forgery_accepted(f, A, fake, session.target)) ++rep.successes;
  }
  return rep;
}

}  // namespace ncauth::adversary
