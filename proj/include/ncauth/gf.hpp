#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncauth/rng.hpp"

namespace ncauth {

// Operation counters for the cost model. Callers own one per measurement
// scope and pass it to the instrumented entry points; contexts stay immutable
// and shareable. Convention: ext_mults counts multiplications in the top
// extension field, ext_frobenius counts q-power chain steps s -> s^q, and
// ext_exponentiations counts generic power computations (each successive
// power step x^j -> x^(j+1) during verification counts as one; squarings
// inside pow() are part of that single operation, not extra ext_mults).
struct OpCounters {
  std::uint64_t ext_mults = 0;
  std::uint64_t ext_frobenius = 0;
  std::uint64_t ext_exponentiations = 0;

  void reset() { *this = OpCounters{}; }
  std::uint64_t exponent_type_total() const { return ext_frobenius + ext_exponentiations; }
};

namespace gf {

// Label of a GF(q) element: the e GF(p) coefficients in positional base-p
// encoding, low degree first. Labels run 0..q-1.
using Sym = std::uint32_t;

// Label of a GF(q^l) element: the l GF(q) coefficients in positional base-q
// encoding. The parameter ceiling q^l <= 2^32 keeps every label in range.
struct ExtElem {
  std::uint64_t v = 0;
  friend constexpr bool operator==(const ExtElem&, const ExtElem&) = default;
  friend constexpr auto operator<=>(const ExtElem&, const ExtElem&) = default;
};

inline constexpr std::uint64_t kOrderCeiling = std::uint64_t{1} << 32;
inline constexpr std::uint32_t kMaxTowerDegree = 32;
inline constexpr std::uint64_t kTableCap = std::uint64_t{1} << 16;

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// GF(p). Serves as digit arithmetic for the tower levels above it.
class PrimeField {
public:
  using Elem = Sym;

  explicit PrimeField(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) throw std::invalid_argument("field: p is not prime: " + std::to_string(p));
    if (p > kOrderCeiling) throw std::invalid_argument("field: p exceeds the 2^32 order ceiling");
  }

  std::uint64_t order() const { return p_; }
  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  Elem from_label(std::uint64_t v) const { return static_cast<Elem>(v % p_); }
  std::uint64_t to_label(Elem a) const { return a; }

  Elem add(Elem a, Elem b) const { return static_cast<Elem>((std::uint64_t{a} + b) % p_); }
  Elem neg(Elem a) const { return a == 0 ? 0 : static_cast<Elem>(p_ - a); }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem mul(Elem a, Elem b) const { return static_cast<Elem>((std::uint64_t{a} * b) % p_); }

  Elem pow(Elem a, std::uint64_t n) const {
    Elem r = 1;
    while (n) {
      if (n & 1) r = mul(r, a);
      a = mul(a, a);
      n >>= 1;
    }
    return r;
  }

  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("field: inverse of zero");
    return pow(a, p_ - 2);
  }

private:
  std::uint64_t p_;
};

// --- Polynomial utilities over any field context ---------------------------
//
// Polynomials are coefficient vectors, low degree first. The zero polynomial
// is the empty vector. These are shared by modulus validation, the tag
// construction, and the coalition algebra.

template <class F>
using Poly = std::vector<typename F::Elem>;

template <class F>
Poly<F> poly_trim(const F& f, Poly<F> p) {
  while (!p.empty() && f.is_zero(p.back())) p.pop_back();
  return p;
}

template <class Elem>
int poly_deg(const std::vector<Elem>& p) {
  return static_cast<int>(p.size()) - 1;
}

template <class F>
Poly<F> poly_add(const F& f, const Poly<F>& a, const Poly<F>& b) {
  Poly<F> r(std::max(a.size(), b.size()), f.zero());
  for (std::size_t i = 0; i < r.size(); ++i) {
    typename F::Elem x = i < a.size() ? a[i] : f.zero();
    typename F::Elem y = i < b.size() ? b[i] : f.zero();
    r[i] = f.add(x, y);
  }
  return poly_trim(f, std::move(r));
}

template <class F>
Poly<F> poly_scale(const F& f, const Poly<F>& a, typename F::Elem c) {
  Poly<F> r(a.size(), f.zero());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f.mul(a[i], c);
  return poly_trim(f, std::move(r));
}

template <class F>
Poly<F> poly_mul(const F& f, const Poly<F>& a, const Poly<F>& b) {
  if (a.empty() || b.empty()) return {};
  Poly<F> r(a.size() + b.size() - 1, f.zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
  return poly_trim(f, std::move(r));
}

// Remainder of a by b; b need not be monic. Each pass cancels the current
// leading coefficient, so the loop strictly shrinks a.
template <class F>
Poly<F> poly_mod(const F& f, Poly<F> a, const Poly<F>& b) {
  if (b.empty()) throw std::domain_error("poly: division by zero polynomial");
  const auto lead_inv = f.inv(b.back());
  a = poly_trim(f, std::move(a));
  while (a.size() >= b.size()) {
    const auto c = f.mul(a.back(), lead_inv);
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i)
      a[shift + i] = f.sub(a[shift + i], f.mul(c, b[i]));
    a = poly_trim(f, std::move(a));
  }
  return a;
}

template <class F>
typename F::Elem poly_eval(const F& f, const Poly<F>& p, typename F::Elem x) {
  typename F::Elem acc = f.zero();
  for (std::size_t i = p.size(); i-- > 0;) acc = f.add(f.mul(acc, x), p[i]);
  return acc;
}

// Monic product (x - r_0)(x - r_1)...
template <class F>
Poly<F> poly_from_roots(const F& f, const std::vector<typename F::Elem>& roots) {
  Poly<F> p{f.one()};
  for (const auto& r : roots) p = poly_mul(f, p, Poly<F>{f.neg(r), f.one()});
  return p;
}

// Trial division by every monic divisor of degree <= deg/2. The order
// ceiling keeps the candidate count at or below 2^16, so reproducibility
// costs nothing here.
template <class F>
bool poly_irreducible(const F& f, const Poly<F>& p) {
  const int d = poly_deg(p);
  if (d < 1) return false;
  if (f.is_zero(p.back())) return false;
  const std::uint64_t q = f.order();
  for (int t = 1; 2 * t <= d; ++t) {
    std::uint64_t count = 1;
    for (int i = 0; i < t; ++i) count *= q;
    for (std::uint64_t label = 0; label < count; ++label) {
      Poly<F> div(static_cast<std::size_t>(t) + 1, f.zero());
      std::uint64_t rest = label;
      for (int i = 0; i < t; ++i) {
        div[static_cast<std::size_t>(i)] = f.from_label(rest % q);
        rest /= q;
      }
      div[static_cast<std::size_t>(t)] = f.one();
      if (poly_mod(f, p, div).empty()) return false;
    }
  }
  return true;
}

// First irreducible monic polynomial of the given degree, scanning labels of
// the non-leading coefficient block from a seed-derived start. Deterministic
// for a given (field, degree, seed).
template <class F>
Poly<F> find_irreducible(const F& f, std::uint32_t degree, std::uint64_t seed) {
  if (degree == 0) throw std::invalid_argument("field: modulus degree must be positive");
  const std::uint64_t q = f.order();
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < degree; ++i) count *= q;
  Rng rng(seed);
  const std::uint64_t start = rng.next_below(count);
  for (std::uint64_t off = 0; off < count; ++off) {
    const std::uint64_t label = (start + off) % count;
    Poly<F> cand(degree + 1, f.zero());
    std::uint64_t rest = label;
    for (std::uint32_t i = 0; i < degree; ++i) {
      cand[i] = f.from_label(rest % q);
      rest /= q;
    }
    cand[degree] = f.one();
    if (poly_irreducible(f, cand)) return cand;
  }
  throw std::logic_error("field: no irreducible polynomial found");
}

// GF(q) with q = p^e, polynomial basis modulo an irreducible monic modulus
// over GF(p). Elements are labels (base-p digit packing). Multiplication goes
// through log/exp tables once q fits the table cap, schoolbook otherwise.
class BaseField {
public:
  using Elem = Sym;

  BaseField(std::uint64_t p, std::uint32_t e, std::vector<Sym> modulus)
      : prime_(p), e_(e), modulus_(std::move(modulus)) {
    if (e_ == 0 || e_ > kMaxTowerDegree)
      throw std::invalid_argument("field: extension degree e out of range");
    q_ = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      q_ *= p;
      if (q_ > kOrderCeiling) throw std::invalid_argument("field: q = p^e exceeds the 2^32 ceiling");
    }
    if (modulus_.size() != static_cast<std::size_t>(e_) + 1)
      throw std::invalid_argument("field: base modulus must have degree e");
    for (Sym c : modulus_)
      if (c >= p) throw std::invalid_argument("field: base modulus coefficient out of range");
    if (modulus_.back() != 1) throw std::invalid_argument("field: base modulus must be monic");
    std::vector<PrimeField::Elem> m(modulus_.begin(), modulus_.end());
    if (!poly_irreducible(prime_, m))
      throw std::invalid_argument("field: base modulus is reducible");
    if (q_ <= kTableCap && e_ > 1) build_tables();
  }

  std::uint64_t p() const { return prime_.order(); }
  std::uint32_t e() const { return e_; }
  std::uint64_t order() const { return q_; }
  const std::vector<Sym>& modulus() const { return modulus_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  Elem from_label(std::uint64_t v) const {
    if (v >= q_) throw std::out_of_range("field: base label out of range");
    return static_cast<Elem>(v);
  }
  std::uint64_t to_label(Elem a) const { return a; }

  Elem add(Elem a, Elem b) const {
    if (prime_.order() == 2) return a ^ b;
    Elem r = 0;
    std::uint64_t scale = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      const auto da = static_cast<Sym>((a / scale) % prime_.order());
      const auto db = static_cast<Sym>((b / scale) % prime_.order());
      r += static_cast<Elem>(prime_.add(da, db) * scale);
      scale *= prime_.order();
    }
    return r;
  }

  Elem neg(Elem a) const {
    if (prime_.order() == 2) return a;
    Elem r = 0;
    std::uint64_t scale = 1;
    for (std::uint32_t i = 0; i < e_; ++i) {
      const auto da = static_cast<Sym>((a / scale) % prime_.order());
      r += static_cast<Elem>(prime_.neg(da) * scale);
      scale *= prime_.order();
    }
    return r;
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (e_ == 1) return prime_.mul(a, b);
    if (!log_.empty()) {
      if (a == 0 || b == 0) return 0;
      return exp_[log_[a] + log_[b]];
    }
    return mul_schoolbook(a, b);
  }

  Elem pow(Elem a, std::uint64_t n) const {
    Elem r = 1;
    while (n) {
      if (n & 1) r = mul(r, a);
      a = mul(a, a);
      n >>= 1;
    }
    return r;
  }

  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("field: inverse of zero");
    if (e_ == 1) return prime_.inv(a);
    if (!log_.empty()) return exp_[q_ - 1 - log_[a]];
    return pow(a, q_ - 2);
  }

private:
  void decode(Elem a, std::array<Sym, kMaxTowerDegree>& out) const {
    const std::uint64_t p = prime_.order();
    for (std::uint32_t i = 0; i < e_; ++i) {
      out[i] = static_cast<Sym>(a % p);
      a = static_cast<Elem>(a / p);
    }
  }

  Elem encode(const std::array<Sym, kMaxTowerDegree>& digits) const {
    std::uint64_t v = 0;
    const std::uint64_t p = prime_.order();
    for (std::uint32_t i = e_; i-- > 0;) v = v * p + digits[i];
    return static_cast<Elem>(v);
  }

  Elem mul_schoolbook(Elem a, Elem b) const {
    std::array<Sym, kMaxTowerDegree> da{}, db{};
    decode(a, da);
    decode(b, db);
    std::array<Sym, 2 * kMaxTowerDegree> conv{};
    for (std::uint32_t i = 0; i < e_; ++i) {
      if (da[i] == 0) continue;
      for (std::uint32_t j = 0; j < e_; ++j)
        conv[i + j] = prime_.add(conv[i + j], prime_.mul(da[i], db[j]));
    }
    for (std::uint32_t i = 2 * e_ - 2; i + 1 > e_; --i) {
      const Sym c = conv[i];
      if (c == 0) continue;
      conv[i] = 0;
      for (std::uint32_t j = 0; j < e_; ++j)
        conv[i - e_ + j] = prime_.sub(conv[i - e_ + j], prime_.mul(c, modulus_[j]));
    }
    std::array<Sym, kMaxTowerDegree> digits{};
    for (std::uint32_t i = 0; i < e_; ++i) digits[i] = conv[i];
    return encode(digits);
  }

  void build_tables() {
    const Elem g = find_generator();
    exp_.assign(2 * (q_ - 1), 0);
    log_.assign(q_, 0);
    Elem acc = 1;
    for (std::uint64_t i = 0; i < q_ - 1; ++i) {
      exp_[i] = acc;
      exp_[i + (q_ - 1)] = acc;
      log_[acc] = static_cast<Sym>(i);
      acc = mul_schoolbook(acc, g);
    }
  }

  Elem find_generator() const {
    std::vector<std::uint64_t> prime_factors;
    std::uint64_t m = q_ - 1;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
      if (m % d == 0) {
        prime_factors.push_back(d);
        while (m % d == 0) m /= d;
      }
    }
    if (m > 1) prime_factors.push_back(m);
    for (Elem cand = 1; cand < q_; ++cand) {
      bool ok = true;
      for (std::uint64_t f : prime_factors) {
        Elem r = 1, base = cand;
        std::uint64_t n = (q_ - 1) / f;
        while (n) {
          if (n & 1) r = mul_schoolbook(r, base);
          base = mul_schoolbook(base, base);
          n >>= 1;
        }
        if (r == 1) {
          ok = false;
          break;
        }
      }
      if (ok) return cand;
    }
    throw std::logic_error("field: no multiplicative generator found");
  }

  PrimeField prime_;
  std::uint32_t e_;
  std::uint64_t q_ = 0;
  std::vector<Sym> modulus_;
  std::vector<Sym> exp_, log_;
};

// GF(q^l) on top of GF(q), polynomial basis modulo an irreducible monic
// modulus over GF(q). This is the field the scheme's polynomials, tags, and
// coalition algebra live in; messages are its elements via the basis
// isomorphism F_q^l ~ F_{q^l}.
class Field {
public:
  using Elem = ExtElem;

  Field(BaseField base, std::uint32_t l, std::vector<Sym> top_modulus)
      : base_(std::move(base)), l_(l), modulus_(std::move(top_modulus)) {
    if (l_ == 0 || l_ > kMaxTowerDegree)
      throw std::invalid_argument("field: extension degree l out of range");
    order_ = 1;
    for (std::uint32_t i = 0; i < l_; ++i) {
      order_ *= base_.order();
      if (order_ > kOrderCeiling)
        throw std::invalid_argument("field: q^l exceeds the 2^32 ceiling");
    }
    if (modulus_.size() != static_cast<std::size_t>(l_) + 1)
      throw std::invalid_argument("field: top modulus must have degree l");
    for (Sym c : modulus_)
      if (c >= base_.order()) throw std::invalid_argument("field: top modulus coefficient out of range");
    if (modulus_.back() != 1) throw std::invalid_argument("field: top modulus must be monic");
    if (l_ > 1) {
      std::vector<BaseField::Elem> m(modulus_.begin(), modulus_.end());
      if (!poly_irreducible(base_, m))
        throw std::invalid_argument("field: top modulus is reducible");
    }
    if (order_ <= kTableCap && l_ > 1) build_tables();
  }

  const BaseField& base() const { return base_; }
  std::uint64_t q() const { return base_.order(); }
  std::uint32_t l() const { return l_; }
  std::uint64_t order() const { return order_; }
  const std::vector<Sym>& modulus() const { return modulus_; }

  Elem zero() const { return {}; }
  Elem one() const { return {1}; }
  bool is_zero(Elem a) const { return a.v == 0; }
  Elem from_label(std::uint64_t v) const {
    if (v >= order_) throw std::out_of_range("field: label out of range");
    return {v};
  }
  std::uint64_t to_label(Elem a) const { return a.v; }

  Elem embed_base(Sym s) const {
    if (s >= base_.order()) throw std::out_of_range("field: base symbol out of range");
    return {s};
  }

  // F_q^l -> F_{q^l} along the polynomial basis; inverse below.
  Elem msg_to_ext(std::span<const Sym> symbols) const {
    if (symbols.size() != l_) throw std::invalid_argument("field: message must have l symbols");
    std::uint64_t v = 0;
    for (std::uint32_t i = l_; i-- > 0;) {
      if (symbols[i] >= base_.order()) throw std::out_of_range("field: message symbol out of range");
      v = v * base_.order() + symbols[i];
    }
    return {v};
  }

  std::vector<Sym> ext_to_msg(Elem a) const {
    std::vector<Sym> out(l_);
    std::uint64_t v = a.v;
    for (std::uint32_t i = 0; i < l_; ++i) {
      out[i] = static_cast<Sym>(v % base_.order());
      v /= base_.order();
    }
    return out;
  }

  Elem add(Elem a, Elem b) const {
    if (base_.p() == 2) return {a.v ^ b.v};
    std::uint64_t r = 0, scale = 1;
    for (std::uint32_t i = 0; i < l_; ++i) {
      const auto da = static_cast<Sym>((a.v / scale) % q());
      const auto db = static_cast<Sym>((b.v / scale) % q());
      r += std::uint64_t{base_.add(da, db)} * scale;
      scale *= q();
    }
    return {r};
  }

  Elem neg(Elem a) const {
    if (base_.p() == 2) return a;
    std::uint64_t r = 0, scale = 1;
    for (std::uint32_t i = 0; i < l_; ++i) {
      const auto da = static_cast<Sym>((a.v / scale) % q());
      r += std::uint64_t{base_.neg(da)} * scale;
      scale *= q();
    }
    return {r};
  }

  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b, OpCounters* ctr = nullptr) const {
    if (ctr) ++ctr->ext_mults;
    return mul_raw(a, b);
  }

  // One Frobenius chain step a -> a^q.
  Elem frobenius(Elem a, OpCounters* ctr = nullptr) const {
    if (ctr) ++ctr->ext_frobenius;
    if (!frob_.empty()) return {frob_[a.v]};
    return pow_raw(a, q());
  }

  Elem pow(Elem a, std::uint64_t n, OpCounters* ctr = nullptr) const {
    if (ctr) ++ctr->ext_exponentiations;
    return pow_raw(a, n);
  }

  Elem inv(Elem a) const {
    if (a.v == 0) throw std::domain_error("field: inverse of zero");
    if (!log_.empty()) return {exp_[order_ - 1 - log_[a.v]]};
    return pow_raw(a, order_ - 2);
  }

  // Uncounted multiply for call sites that charge the work to a different
  // counter category (successive power steps during verification).
  Elem mul_raw(Elem a, Elem b) const {
    if (l_ == 1) return {base_.mul(static_cast<Sym>(a.v), static_cast<Sym>(b.v))};
    if (!log_.empty()) {
      if (a.v == 0 || b.v == 0) return {};
      return {exp_[log_[a.v] + log_[b.v]]};
    }
    return mul_schoolbook(a, b);
  }

private:
  Elem pow_raw(Elem a, std::uint64_t n) const {
    Elem r{1};
    while (n) {
      if (n & 1) r = mul_raw(r, a);
      a = mul_raw(a, a);
      n >>= 1;
    }
    return r;
  }

  void decode(Elem a, std::array<Sym, kMaxTowerDegree>& out) const {
    std::uint64_t v = a.v;
    for (std::uint32_t i = 0; i < l_; ++i) {
      out[i] = static_cast<Sym>(v % q());
      v /= q();
    }
  }

  Elem encode(const std::array<Sym, kMaxTowerDegree>& digits) const {
    std::uint64_t v = 0;
    for (std::uint32_t i = l_; i-- > 0;) v = v * q() + digits[i];
    return {v};
  }

  Elem mul_schoolbook(Elem a, Elem b) const {
    std::array<Sym, kMaxTowerDegree> da{}, db{};
    decode(a, da);
    decode(b, db);
    std::array<Sym, 2 * kMaxTowerDegree> conv{};
    for (std::uint32_t i = 0; i < l_; ++i) {
      if (da[i] == 0) continue;
      for (std::uint32_t j = 0; j < l_; ++j)
        conv[i + j] = base_.add(conv[i + j], base_.mul(da[i], db[j]));
    }
    for (std::uint32_t i = 2 * l_ - 2; i + 1 > l_; --i) {
      const Sym c = conv[i];
      if (c == 0) continue;
      conv[i] = 0;
      for (std::uint32_t j = 0; j < l_; ++j)
        conv[i - l_ + j] = base_.sub(conv[i - l_ + j], base_.mul(c, modulus_[j]));
    }
    std::array<Sym, kMaxTowerDegree> digits{};
    for (std::uint32_t i = 0; i < l_; ++i) digits[i] = conv[i];
    return encode(digits);
  }

  void build_tables() {
    const Elem g = find_generator();
    exp_.assign(2 * (order_ - 1), 0);
    log_.assign(order_, 0);
    Elem acc{1};
    for (std::uint64_t i = 0; i < order_ - 1; ++i) {
      exp_[i] = static_cast<std::uint32_t>(acc.v);
      exp_[i + (order_ - 1)] = static_cast<std::uint32_t>(acc.v);
      log_[acc.v] = static_cast<std::uint32_t>(i);
      acc = mul_schoolbook(acc, g);
    }
    frob_.assign(order_, 0);
    for (std::uint64_t v = 0; v < order_; ++v)
      frob_[v] = static_cast<std::uint32_t>(pow_schoolbook({v}, q()).v);
  }

  Elem pow_schoolbook(Elem a, std::uint64_t n) const {
    Elem r{1};
    while (n) {
      if (n & 1) r = mul_schoolbook(r, a);
      a = mul_schoolbook(a, a);
      n >>= 1;
    }
    return r;
  }

  Elem find_generator() const {
    std::vector<std::uint64_t> prime_factors;
    std::uint64_t m = order_ - 1;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
      if (m % d == 0) {
        prime_factors.push_back(d);
        while (m % d == 0) m /= d;
      }
    }
    if (m > 1) prime_factors.push_back(m);
    for (std::uint64_t cand = 1; cand < order_; ++cand) {
      bool ok = true;
      for (std::uint64_t f : prime_factors) {
        if (pow_schoolbook({cand}, (order_ - 1) / f).v == 1) {
          ok = false;
          break;
        }
      }
      if (ok) return {cand};
    }
    throw std::logic_error("field: no multiplicative generator found");
  }

  BaseField base_;
  std::uint32_t l_;
  std::uint64_t order_ = 0;
  std::vector<Sym> modulus_;
  std::vector<std::uint32_t> exp_, log_, frob_;
};

// Tower description as it appears in config files. Moduli are coefficient
// arrays, low degree first; empty moduli are searched deterministically from
// the seed.
struct FieldParams {
  std::uint64_t p = 2;
  std::uint32_t e = 1;
  std::uint32_t l = 1;
  std::vector<Sym> base_modulus;
  std::vector<Sym> top_modulus;
  std::uint64_t seed = 0;
};

inline Field make_field(FieldParams params) {
  PrimeField prime(params.p);
  std::uint64_t order = 1;
  for (std::uint64_t i = 0; i < std::uint64_t{params.e} * params.l; ++i) {
    order *= params.p;
    if (order > kOrderCeiling) throw std::invalid_argument("field: q^l exceeds the 2^32 ceiling");
  }
  if (params.base_modulus.empty()) {
    auto m = find_irreducible(prime, params.e, params.seed);
    params.base_modulus.assign(m.begin(), m.end());
  }
  BaseField base(params.p, params.e, params.base_modulus);
  if (params.top_modulus.empty()) {
    auto m = find_irreducible(base, params.l, params.seed + 1);
    params.top_modulus.assign(m.begin(), m.end());
  }
  return Field(std::move(base), params.l, params.top_modulus);
}

}  // namespace gf
}  // namespace ncauth
