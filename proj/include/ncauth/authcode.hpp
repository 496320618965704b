#pragma once

#include <bit>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "ncauth/gf.hpp"
#include "ncauth/rng.hpp"

namespace ncauth::authcode {

using gf::ExtElem;
using gf::Field;
using gf::Sym;

// (k, V, M): tag polynomials have degree k-1 in x, V verifiers hold point
// evaluations, and coalitions of up to M observed combinations stay
// information-theoretically blind (success bound 1/q^l).
struct SchemeParams {
  std::uint32_t k = 1;
  std::uint32_t V = 1;
  std::uint32_t M = 1;
};

// Source key: M+1 polynomials P_0..P_M of degree <= k-1 over F_{q^l};
// poly[m][j] is the coefficient of x^j in P_m.
struct SourceKey {
  std::vector<std::vector<ExtElem>> poly;

  std::uint32_t k() const { return poly.empty() ? 0 : static_cast<std::uint32_t>(poly[0].size()); }
  std::uint32_t M() const { return static_cast<std::uint32_t>(poly.size()) - 1; }
};

struct PublicPoints {
  std::vector<ExtElem> x;
};

// Verifier i keeps only the evaluations (P_0(x_i), ..., P_M(x_i)).
struct VerifierKey {
  std::uint32_t index = 0;
  ExtElem point;
  std::vector<ExtElem> evals;

  std::uint32_t M() const { return static_cast<std::uint32_t>(evals.size()) - 1; }
};

struct KeyMaterial {
  SourceKey source;
  PublicPoints points;
  std::vector<VerifierKey> verifiers;
};

// Coefficients of the tag polynomial A_s(x), low degree first.
struct Tag {
  std::vector<ExtElem> coeff;
};

// In-network representation: 1 tracking symbol, l data symbols, k*l tag
// symbols, all in F_q. Linear combining acts symbol-wise.
struct Packet {
  Sym tracking = 0;
  std::vector<Sym> data;
  std::vector<Sym> tag;

  friend bool operator==(const Packet&, const Packet&) = default;
};

struct VerifyResult {
  bool accepted = false;
  // Set when the combined tracking weight sum(g_j) is zero: the packet can
  // still verify (it is a valid combination) but carries no usable data.
  bool zero_tracking = false;
};

inline void validate_params(const Field& f, const SchemeParams& p) {
  if (p.k < 1 || p.M < 1 || p.V < 1)
    throw std::invalid_argument("scheme: k, V, M must all be at least 1");
  if (p.V > f.order())
    throw std::invalid_argument("scheme: V exceeds q^l, not enough distinct public points");
}

// Draws the source polynomials uniformly and picks V distinct public points
// in a seed-derived order. Points are nonzero except in the V = q^l corner,
// where 0 must be admitted to reach V distinct points at all.
inline KeyMaterial keygen(const Field& f, const SchemeParams& p, std::uint64_t seed) {
  validate_params(f, p);
  Rng rng(seed);
  KeyMaterial km;
  km.source.poly.assign(p.M + 1, std::vector<ExtElem>(p.k));
  for (auto& row : km.source.poly)
    for (auto& c : row) c = f.from_label(rng.next_below(f.order()));

  const std::uint64_t pool = f.order() - 1;
  std::set<std::uint64_t> seen;
  km.points.x.reserve(p.V);
  while (km.points.x.size() < p.V && seen.size() < pool) {
    const std::uint64_t label = 1 + rng.next_below(pool);
    if (seen.insert(label).second) km.points.x.push_back(f.from_label(label));
  }
  if (km.points.x.size() < p.V) km.points.x.push_back(f.zero());

  km.verifiers.reserve(p.V);
  for (std::uint32_t i = 0; i < p.V; ++i) {
    VerifierKey vk;
    vk.index = i;
    vk.point = km.points.x[i];
    vk.evals.reserve(p.M + 1);
    for (std::uint32_t m = 0; m <= p.M; ++m)
      vk.evals.push_back(gf::poly_eval(f, km.source.poly[m], vk.point));
    km.verifiers.push_back(std::move(vk));
  }
  return km;
}

// A_s(x) = P_0(x) + sum_{m=1..M} s^(q^(m-1)) P_m(x). Costs exactly M-1
// Frobenius steps and k*M ext-mults per message.
inline Tag tag_message(const Field& f, const SourceKey& key, ExtElem s, OpCounters* ctr = nullptr) {
  const std::uint32_t k = key.k(), M = key.M();
  Tag t;
  t.coeff = key.poly[0];
  ExtElem chain = s;
  for (std::uint32_t m = 1; m <= M; ++m) {
    if (m > 1) chain = f.frobenius(chain, ctr);
    for (std::uint32_t j = 0; j < k; ++j)
      t.coeff[j] = f.add(t.coeff[j], f.mul(key.poly[m][j], chain, ctr));
  }
  return t;
}

inline Packet make_packet(const Field& f, ExtElem s, const Tag& tag) {
  Packet pkt;
  pkt.tracking = 1;
  pkt.data = f.ext_to_msg(s);
  pkt.tag.reserve(tag.coeff.size() * f.l());
  for (const auto& c : tag.coeff) {
    const auto symbols = f.ext_to_msg(c);
    pkt.tag.insert(pkt.tag.end(), symbols.begin(), symbols.end());
  }
  return pkt;
}

inline ExtElem data_ext(const Field& f, const Packet& pkt) {
  return f.msg_to_ext(pkt.data);
}

inline std::uint32_t tag_coeff_count(const Field& f, const Packet& pkt) {
  if (pkt.tag.size() % f.l() != 0)
    throw std::invalid_argument("packet: tag length is not a multiple of l");
  return static_cast<std::uint32_t>(pkt.tag.size() / f.l());
}

inline ExtElem tag_coeff(const Field& f, const Packet& pkt, std::uint32_t j) {
  return f.msg_to_ext(std::span<const Sym>(pkt.tag).subspan(std::size_t{j} * f.l(), f.l()));
}

// Symbol-wise F_q combination; the basis isomorphism makes this equal to the
// coefficient-wise F_q-scalar combination of the packets' field elements.
inline Packet combine(const Field& f, std::span<const Sym> coeffs, std::span<const Packet> pkts) {
  if (coeffs.size() != pkts.size() || pkts.empty())
    throw std::invalid_argument("combine: need one coefficient per packet");
  const auto& base = f.base();
  Packet out;
  out.data.assign(pkts[0].data.size(), 0);
  out.tag.assign(pkts[0].tag.size(), 0);
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    const Packet& p = pkts[i];
    if (p.data.size() != out.data.size() || p.tag.size() != out.tag.size())
      throw std::invalid_argument("combine: packet layouts differ");
    const Sym g = coeffs[i];
    out.tracking = base.add(out.tracking, base.mul(g, p.tracking));
    for (std::size_t s = 0; s < out.data.size(); ++s)
      out.data[s] = base.add(out.data[s], base.mul(g, p.data[s]));
    for (std::size_t s = 0; s < out.tag.size(); ++s)
      out.tag[s] = base.add(out.tag[s], base.mul(g, p.tag[s]));
  }
  return out;
}

// Checks the received tag polynomial against the key evaluations:
//   P_0(x_i) * sum(g) + sum_{m=1..M} P_m(x_i) * d^(q^(m-1))  ==  sum_j t_j x_i^j
// where d is the received data field as an extension element. Costs
// (M+1)+(k-1) ext-mults, M-1 Frobenius steps, and k-2 power steps (none for
// k < 2).
inline VerifyResult verify_edge(const Field& f, const VerifierKey& key, const Packet& pkt,
                                OpCounters* ctr = nullptr) {
  const std::uint32_t M = key.M();
  const std::uint32_t k = tag_coeff_count(f, pkt);

  ExtElem lhs = f.mul(key.evals[0], f.embed_base(pkt.tracking), ctr);
  ExtElem chain = data_ext(f, pkt);
  for (std::uint32_t m = 1; m <= M; ++m) {
    if (m > 1) chain = f.frobenius(chain, ctr);
    lhs = f.add(lhs, f.mul(key.evals[m], chain, ctr));
  }

  ExtElem rhs = tag_coeff(f, pkt, 0);
  if (k >= 2) {
    ExtElem xp = key.point;
    rhs = f.add(rhs, f.mul(tag_coeff(f, pkt, 1), xp, ctr));
    for (std::uint32_t j = 2; j < k; ++j) {
      xp = f.mul_raw(xp, key.point);
      if (ctr) ++ctr->ext_exponentiations;
      rhs = f.add(rhs, f.mul(tag_coeff(f, pkt, j), xp, ctr));
    }
  }
  return {lhs == rhs, pkt.tracking == 0};
}

// Cost formulas in our F_{q^l} counting convention; multiply by l for the
// per-F_q-operation comparison column. The k-2 power-step term clamps to 0
// for k < 2 (the closed form assumes k >= 2).
namespace cost {

inline std::uint64_t tag_frobenius(std::uint64_t n, std::uint64_t M) { return n * (M - 1); }
inline std::uint64_t tag_mults(std::uint64_t n, std::uint64_t k, std::uint64_t M) { return n * k * M; }
inline std::uint64_t verify_exponent_ops(std::uint64_t k, std::uint64_t M, std::uint64_t edges) {
  return edges * ((M - 1) + (k >= 2 ? k - 2 : 0));
}
inline std::uint64_t verify_mults(std::uint64_t k, std::uint64_t M, std::uint64_t edges) {
  return edges * ((M + 1) + (k - 1));
}

// Storage and wire figures in F_q symbols.
inline std::uint64_t source_key_symbols(std::uint64_t k, std::uint64_t M, std::uint64_t l) {
  return (M + 1) * l * k;
}
inline std::uint64_t verifier_key_symbols(std::uint64_t M, std::uint64_t l) { return (M + 1) * l; }
inline std::uint64_t tag_symbols(std::uint64_t k, std::uint64_t l) { return k * l; }
inline std::uint64_t packet_overhead_symbols(std::uint64_t k, std::uint64_t l) { return k * l + 1; }

}  // namespace cost

// --- Wire format ------------------------------------------------------------
//
// Every F_q symbol is written as ceil(log2 q) bits, most significant bit
// first, in packet order (tracking, data, tag); the final byte is zero-padded.

namespace detail {

struct BitWriter {
  std::vector<std::uint8_t> bytes;
  std::uint32_t bit = 0;

  void put(std::uint64_t value, std::uint32_t width) {
    for (std::uint32_t i = width; i-- > 0;) {
      if (bit == 0) bytes.push_back(0);
      if ((value >> i) & 1) bytes.back() |= static_cast<std::uint8_t>(1u << (7 - bit));
      bit = (bit + 1) % 8;
    }
  }
};

struct BitReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  std::uint64_t get(std::uint32_t width) {
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i < width; ++i, ++pos) {
      if (pos / 8 >= bytes.size()) throw std::invalid_argument("packet: truncated wire data");
      v = (v << 1) | ((bytes[pos / 8] >> (7 - pos % 8)) & 1);
    }
    return v;
  }
};

}  // namespace detail

inline std::uint32_t symbol_bits(const Field& f) {
  return static_cast<std::uint32_t>(std::bit_width(f.q() - 1));
}

inline std::vector<std::uint8_t> serialize_packet(const Field& f, const Packet& pkt) {
  const std::uint32_t w = symbol_bits(f);
  detail::BitWriter out;
  out.put(pkt.tracking, w);
  for (Sym s : pkt.data) out.put(s, w);
  for (Sym s : pkt.tag) out.put(s, w);
  return std::move(out.bytes);
}

inline Packet parse_packet(const Field& f, std::uint32_t k, std::span<const std::uint8_t> bytes) {
  const std::uint32_t w = symbol_bits(f);
  const std::size_t symbols = 1 + f.l() + std::size_t{k} * f.l();
  const std::size_t expect = (symbols * w + 7) / 8;
  if (bytes.size() != expect) throw std::invalid_argument("packet: wrong wire length");
  detail::BitReader in{bytes};
  auto read_sym = [&]() {
    const std::uint64_t v = in.get(w);
    if (v >= f.q()) throw std::invalid_argument("packet: symbol out of range");
    return static_cast<Sym>(v);
  };
  Packet pkt;
  pkt.tracking = read_sym();
  pkt.data.resize(f.l());
  for (auto& s : pkt.data) s = read_sym();
  pkt.tag.resize(std::size_t{k} * f.l());
  for (auto& s : pkt.tag) s = read_sym();
  while (in.pos % 8 != 0) {
    if (in.get(1) != 0) throw std::invalid_argument("packet: nonzero padding bits");
  }
  return pkt;
}

}  // namespace ncauth::authcode
