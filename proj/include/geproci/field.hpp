#pragma once

// Finite fields F_p, extensions F_q = F_p[t]/(m) and towers F_q ⊂ F_{q^m}.
//
// Every field in a tower is a node that knows its base field and the monic
// modulus defining it over that base. Elements are packed into a single
// 64-bit word: an element sum_i c_i t^i with c_i in the base field is stored as
// sum_i c_i * |base|^i. Because all sizes are powers of p, the packed word is
// also the base-p digit vector of the element, and elements of a subfield in
// the tower keep their packed value when embedded. Numeric order of packed
// words is the canonical enumeration order used for every "smallest" choice.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "geproci/error.hpp"

namespace geproci {

namespace detail {

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline std::uint64_t checked_pow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (r > (std::uint64_t{1} << 62) / base)
      throw Error(ErrorKind::TooLarge, "field size exceeds 2^62");
    r *= base;
  }
  return r;
}

}  // namespace detail

/// A prime modulus, checked by trial division.
struct PrimeField {
  std::uint32_t p;

  explicit PrimeField(std::uint64_t modulus) : p(static_cast<std::uint32_t>(modulus)) {
    if (modulus > (1u << 20) || !detail::is_prime_u64(modulus))
      throw Error(ErrorKind::NonPrimeModulus, std::to_string(modulus) + " is not a supported prime");
  }
};

class FiniteField;
using FieldPtr = std::shared_ptr<const FiniteField>;

/// One node of a field tower. Immutable after construction.
class FiniteField : public std::enable_shared_from_this<FiniteField> {
 public:
  using Element = std::uint64_t;

  FieldPtr ptr() const { return shared_from_this(); }

  static FieldPtr prime(std::uint32_t p) {
    PrimeField pf(p);
    auto f = std::shared_ptr<FiniteField>(new FiniteField());
    f->p_ = pf.p;
    f->size_ = pf.p;
    f->degree_ = 1;
    f->abs_degree_ = 1;
    return f;
  }

  /// Extension of `base` by the smallest monic irreducible polynomial of the
  /// given degree (canonical enumeration of lower coefficients). Degree 1
  /// returns `base` itself.
  static FieldPtr extension(const FieldPtr& base, unsigned degree) {
    if (degree == 0) throw Error(ErrorKind::InvalidArgument, "extension degree must be >= 1");
    if (degree == 1) return base;
    detail::checked_pow(base->size(), degree);
    std::vector<Element> mod(degree + 1, 0);
    mod[degree] = 1;
    const std::uint64_t q = base->size();
    // enumerate lower coefficients as little-endian base-q counters
    for (;;) {
      if (mod[0] != 0 && base->poly_irreducible(mod)) return build(base, mod, true);
      unsigned i = 0;
      while (i < degree) {
        if (++mod[i] < q) break;
        mod[i] = 0;
        ++i;
      }
      if (i == degree) break;
    }
    throw Error(ErrorKind::ReducibleModulus, "no irreducible polynomial found");
  }

  /// Extension by an explicit modulus (low-to-high coefficients over `base`).
  /// The modulus is made monic; reducible moduli are rejected.
  static FieldPtr extension(const FieldPtr& base, std::vector<Element> modulus) {
    while (!modulus.empty() && modulus.back() == 0) modulus.pop_back();
    if (modulus.size() < 2) throw Error(ErrorKind::ReducibleModulus, "modulus has degree < 1");
    for (auto c : modulus)
      if (c >= base->size()) throw Error(ErrorKind::InvalidArgument, "modulus coefficient out of range");
    const Element lc_inv = base->inv(modulus.back());
    for (auto& c : modulus) c = base->mul(c, lc_inv);
    if (modulus.size() == 2) return base;  // linear: no new layer
    if (!base->poly_irreducible(modulus))
      throw Error(ErrorKind::ReducibleModulus, "modulus is reducible over the base field");
    return build(base, std::move(modulus), false);
  }

  std::uint32_t characteristic() const { return p_; }
  std::uint64_t size() const { return size_; }
  unsigned degree() const { return degree_; }
  unsigned absolute_degree() const { return abs_degree_; }
  bool is_prime_field() const { return !base_; }
  const FieldPtr& base() const { return base_; }
  const std::vector<Element>& modulus() const { return modulus_; }

  /// Sizes of the fields in this tower, from F_p up to this field.
  std::vector<std::uint64_t> tower_sizes() const {
    std::vector<std::uint64_t> out;
    for (const FiniteField* f = this; f; f = f->base_.get()) out.push_back(f->size_);
    std::reverse(out.begin(), out.end());
    return out;
  }

  Element zero() const { return 0; }
  Element one() const { return 1; }
  bool is_zero(Element a) const { return a == 0; }
  bool eq(Element a, Element b) const { return a == b; }

  Element from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += p_;
    return static_cast<Element>(r);
  }

  Element add(Element a, Element b) const {
    if (p_ == 2) return a ^ b;
    if (!base_) {
      Element s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    Element out = 0, scale = 1;
    while (a | b) {
      Element s = a % p_ + b % p_;
      if (s >= p_) s -= p_;
      out += s * scale;
      a /= p_;
      b /= p_;
      scale *= p_;
    }
    return out;
  }

  Element neg(Element a) const {
    if (p_ == 2) return a;
    if (!base_) return a == 0 ? 0 : p_ - a;
    Element out = 0, scale = 1;
    while (a) {
      Element d = a % p_;
      out += (d == 0 ? 0 : p_ - d) * scale;
      a /= p_;
      scale *= p_;
    }
    return out;
  }

  Element sub(Element a, Element b) const { return add(a, neg(b)); }

  Element mul(Element a, Element b) const {
    if (a == 0 || b == 0) return 0;
    if (!base_) return (a * b) % p_;
    if (!exp_.empty()) {
      std::uint64_t e = std::uint64_t{log_[a]} + log_[b];
      if (e >= size_ - 1) e -= size_ - 1;
      return exp_[e];
    }
    return mul_poly(a, b);
  }

  Element inv(Element a) const {
    if (a == 0) throw Error(ErrorKind::InvalidArgument, "inverse of zero");
    if (!base_) return pow(a, p_ - 2);
    if (!exp_.empty()) return exp_[(size_ - 1 - log_[a]) % (size_ - 1)];
    return pow(a, size_ - 2);
  }

  Element div(Element a, Element b) const { return mul(a, inv(b)); }

  Element pow(Element a, std::uint64_t e) const {
    Element r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// True when q = p^k with k dividing the absolute degree.
  bool has_subfield(std::uint64_t q) const {
    unsigned k = 0;
    std::uint64_t s = 1;
    while (s < q) {
      s *= p_;
      ++k;
    }
    return s == q && k >= 1 && abs_degree_ % k == 0;
  }

  /// x^q for q the size of a subfield.
  Element frobenius(Element x, std::uint64_t q) const {
    if (!has_subfield(q))
      throw Error(ErrorKind::NotASubfield, std::to_string(q) + " is not a subfield size of F_" + std::to_string(size_));
    return pow(x, q);
  }

  /// Coefficients over the base field, low to high, length degree().
  std::vector<Element> coefficients(Element x) const {
    std::vector<Element> out(degree_, 0);
    if (!base_) {
      out[0] = x;
      return out;
    }
    for (unsigned i = 0; i < degree_; ++i) {
      out[i] = x % base_size_;
      x /= base_size_;
    }
    return out;
  }

  Element from_coefficients(std::span<const Element> c) const {
    if (!base_) return c.empty() ? 0 : c[0] % p_;
    Element out = 0, scale = 1;
    for (unsigned i = 0; i < degree_ && i < c.size(); ++i) {
      out += (c[i] % base_size_) * scale;
      scale *= base_size_;
    }
    return out;
  }

  Element random(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(0, size_ - 1);
    return dist(rng);
  }

  /// Integers for prime fields, bracketed base coefficients otherwise.
  std::string to_string(Element x) const {
    if (!base_) return std::to_string(x);
    std::string s = "[";
    auto c = coefficients(x);
    for (unsigned i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += base_->to_string(c[i]);
    }
    return s + "]";
  }

  /// Field spec string `p=..;mod=..;ext=..` (see parse_field_spec).
  std::string spec() const {
    std::vector<const FiniteField*> chain;
    for (const FiniteField* f = this; f; f = f->base_.get()) chain.push_back(f);
    std::reverse(chain.begin(), chain.end());
    std::string s = "p=" + std::to_string(p_);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const FiniteField* f = chain[i];
      if (i == 1) {
        s += ";mod=";
        for (std::size_t j = 0; j < f->modulus_.size(); ++j) s += (j ? "," : "") + std::to_string(f->modulus_[j]);
      } else if (f->canonical_modulus_) {
        s += ";ext=" + std::to_string(f->degree_);
      } else {
        s += ";extmod=";
        for (std::size_t j = 0; j < f->modulus_.size(); ++j) s += (j ? "," : "") + std::to_string(f->modulus_[j]);
      }
    }
    return s;
  }

  // ---- univariate polynomials over this field (low-to-high, trimmed) ----

  using Poly = std::vector<Element>;

  void poly_trim(Poly& a) const {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }

  Poly poly_mul(const Poly& a, const Poly& b) const {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = add(r[i + j], mul(a[i], b[j]));
    }
    poly_trim(r);
    return r;
  }

  /// Remainder of a modulo m (m nonzero).
  Poly poly_rem(Poly a, const Poly& m) const {
    poly_trim(a);
    const std::size_t dm = m.size() - 1;
    const Element lc_inv = inv(m.back());
    while (a.size() >= m.size()) {
      const Element c = mul(a.back(), lc_inv);
      const std::size_t shift = a.size() - 1 - dm;
      for (std::size_t j = 0; j <= dm; ++j) a[shift + j] = sub(a[shift + j], mul(c, m[j]));
      poly_trim(a);
    }
    return a;
  }

  Poly poly_gcd(Poly a, Poly b) const {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
      Poly r = poly_rem(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    if (!a.empty()) {
      const Element li = inv(a.back());
      for (auto& c : a) c = mul(c, li);
    }
    return a;
  }

  Poly poly_powmod(Poly base, std::uint64_t e, const Poly& m) const {
    Poly r{1};
    base = poly_rem(std::move(base), m);
    while (e) {
      if (e & 1) r = poly_rem(poly_mul(r, base), m);
      base = poly_rem(poly_mul(base, base), m);
      e >>= 1;
    }
    return r;
  }

  Element poly_eval(const Poly& a, Element x) const {
    Element r = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = add(mul(r, x), *it);
    return r;
  }

  /// Irreducibility over this field: root test for degree <= 3 on small
  /// fields, otherwise gcd(x^(q^i) - x, f) = 1 for i <= deg/2.
  bool poly_irreducible(const Poly& f_in) const {
    Poly f = f_in;
    poly_trim(f);
    if (f.size() < 2) return false;
    const std::size_t n = f.size() - 1;
    if (n == 1) return true;
    if (n <= 3 && size_ <= (1u << 16)) {
      for (Element x = 0; x < size_; ++x)
        if (poly_eval(f, x) == 0) return false;
      return true;
    }
    Poly h{0, 1};
    for (std::size_t i = 1; i <= n / 2; ++i) {
      h = poly_powmod(h, size_, f);
      Poly d = h;
      d.resize(std::max<std::size_t>(d.size(), 2), 0);
      d[1] = sub(d[1], 1);
      poly_trim(d);
      if (d.empty()) return false;
      if (poly_gcd(d, f).size() > 1) return false;
    }
    return true;
  }

 private:
  FiniteField() = default;

  static FieldPtr build(const FieldPtr& base, std::vector<Element> modulus, bool canonical) {
    auto f = std::shared_ptr<FiniteField>(new FiniteField());
    f->p_ = base->p_;
    f->base_ = base;
    f->base_size_ = base->size_;
    f->degree_ = static_cast<unsigned>(modulus.size() - 1);
    f->abs_degree_ = base->abs_degree_ * f->degree_;
    f->size_ = detail::checked_pow(base->size_, f->degree_);
    f->modulus_ = std::move(modulus);
    f->canonical_modulus_ = canonical;
    if (f->size_ <= (1u << 16)) f->build_tables();
    return f;
  }

  Element mul_poly(Element a, Element b) const {
    const unsigned d = degree_;
    Element ca[64], cb[64], prod[128];
    for (unsigned i = 0; i < d; ++i) {
      ca[i] = a % base_size_;
      a /= base_size_;
      cb[i] = b % base_size_;
      b /= base_size_;
    }
    std::fill(prod, prod + 2 * d - 1, 0);
    const FiniteField& B = *base_;
    for (unsigned i = 0; i < d; ++i) {
      if (ca[i] == 0) continue;
      for (unsigned j = 0; j < d; ++j)
        if (cb[j]) prod[i + j] = B.add(prod[i + j], B.mul(ca[i], cb[j]));
    }
    for (unsigned i = 2 * d - 2; i >= d; --i) {
      const Element c = prod[i];
      if (c == 0) continue;
      const unsigned shift = i - d;
      for (unsigned j = 0; j < d; ++j)
        if (modulus_[j]) prod[shift + j] = B.sub(prod[shift + j], B.mul(c, modulus_[j]));
    }
    Element out = 0, scale = 1;
    for (unsigned i = 0; i < d; ++i) {
      out += prod[i] * scale;
      scale *= base_size_;
    }
    return out;
  }

  void build_tables() {
    const std::uint64_t order = size_ - 1;
    const auto factors = detail::prime_factors(order);
    Element g = 2;
    for (; g < size_; ++g) {
      bool primitive = true;
      for (auto r : factors) {
        if (pow_slow(g, order / r) == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) break;
    }
    std::vector<std::uint32_t> ex(order), lg(size_, 0);
    Element x = 1;
    for (std::uint64_t i = 0; i < order; ++i) {
      ex[i] = static_cast<std::uint32_t>(x);
      lg[x] = static_cast<std::uint32_t>(i);
      x = mul_poly(x, g);
    }
    exp_ = std::move(ex);
    log_ = std::move(lg);
  }

  Element pow_slow(Element a, std::uint64_t e) const {
    Element r = 1;
    while (e) {
      if (e & 1) r = mul_poly(r, a);
      a = mul_poly(a, a);
      e >>= 1;
    }
    return r;
  }

  std::uint32_t p_ = 2;
  std::uint64_t size_ = 2;
  std::uint64_t base_size_ = 1;
  unsigned degree_ = 1;
  unsigned abs_degree_ = 1;
  FieldPtr base_;
  std::vector<Element> modulus_;
  bool canonical_modulus_ = true;
  std::vector<std::uint32_t> exp_, log_;
};

/// One requested tower layer: a degree (smallest irreducible) or an explicit
/// modulus over the layer below.
using LayerSpec = std::variant<unsigned, std::vector<FiniteField::Element>>;

inline FieldPtr make_field(std::uint64_t p, const std::vector<LayerSpec>& layers) {
  PrimeField pf(p);
  FieldPtr f = FiniteField::prime(pf.p);
  for (const auto& layer : layers) {
    if (std::holds_alternative<unsigned>(layer))
      f = FiniteField::extension(f, std::get<unsigned>(layer));
    else
      f = FiniteField::extension(f, std::get<std::vector<FiniteField::Element>>(layer));
  }
  return f;
}

/// F_q for a prime power q, built as a single extension of F_p by the
/// smallest irreducible polynomial.
inline FieldPtr field_of_order(std::uint64_t q) {
  if (q < 2) throw Error(ErrorKind::NonPrimeModulus, "field order must be a prime power");
  const auto f = detail::prime_factors(q);
  if (f.size() != 1) throw Error(ErrorKind::NonPrimeModulus, std::to_string(q) + " is not a prime power");
  unsigned e = 0;
  for (std::uint64_t t = q; t > 1; t /= f[0]) ++e;
  if (e == 1) return make_field(f[0], {});
  return make_field(f[0], {LayerSpec{e}});
}

/// Parses `p=<int>[;mod=<c0,c1,..>][;ext=<degree>]...`; `extmod=<..>` gives an
/// explicit modulus for a layer above the first. A bare integer q means F_q.
inline FieldPtr parse_field_spec(const std::string& spec) {
  // a bare number is the field of that order
  if (!spec.empty() && std::all_of(spec.begin(), spec.end(), [](unsigned char c) { return std::isdigit(c); })) {
    try {
      return field_of_order(std::stoull(spec));
    } catch (const std::out_of_range&) {
      throw Error(ErrorKind::ParseError, "field order out of range");
    }
  }
  std::optional<std::uint64_t> p;
  std::vector<LayerSpec> layers;
  auto parse_list = [&](const std::string& s) {
    std::vector<FiniteField::Element> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(std::stoull(tok));
      } catch (...) {
        throw Error(ErrorKind::ParseError, "bad coefficient '" + tok + "' in field spec");
      }
    }
    return out;
  };
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ';')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "bad field spec item '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      if (key == "p") {
        p = std::stoull(val);
      } else if (key == "mod" || key == "extmod") {
        layers.emplace_back(parse_list(val));
      } else if (key == "ext") {
        layers.emplace_back(static_cast<unsigned>(std::stoul(val)));
      } else {
        throw Error(ErrorKind::ParseError, "unknown field spec key '" + key + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (...) {
      throw Error(ErrorKind::ParseError, "bad value in field spec item '" + item + "'");
    }
  }
  if (!p) throw Error(ErrorKind::ParseError, "field spec lacks p=");
  return make_field(*p, layers);
}

/// Smallest r (canonical order) with x^2 - r irreducible; q odd.
inline FiniteField::Element find_nonsquare(const FiniteField& f) {
  if (f.characteristic() == 2) throw Error(ErrorKind::WrongCharacteristic, "find_nonsquare needs odd characteristic");
  const std::uint64_t half = (f.size() - 1) / 2;
  for (FiniteField::Element r = 1; r < f.size(); ++r)
    if (f.pow(r, half) != 1) return r;
  throw Error(ErrorKind::WrongCharacteristic, "no nonsquare found");
}

/// Absolute trace F_q -> F_p.
inline FiniteField::Element absolute_trace(const FiniteField& f, FiniteField::Element x) {
  FiniteField::Element t = 0, y = x;
  for (unsigned i = 0; i < f.absolute_degree(); ++i) {
    t = f.add(t, y);
    y = f.pow(y, f.characteristic());
  }
  return t;
}

/// Smallest r with x^2 + x + r irreducible; q even (equivalently trace(r) = 1).
inline FiniteField::Element find_artin_schreier_r(const FiniteField& f) {
  if (f.characteristic() != 2)
    throw Error(ErrorKind::WrongCharacteristic, "find_artin_schreier_r needs characteristic 2");
  for (FiniteField::Element r = 1; r < f.size(); ++r)
    if (absolute_trace(f, r) == 1) return r;
  throw Error(ErrorKind::WrongCharacteristic, "no Artin-Schreier constant found");
}

/// Value-semantic element bound to its field; convenient for callers and
/// tests. Algorithms work on raw `FiniteField::Element` with the field as an
/// explicit context.
class FieldElement {
 public:
  using Raw = FiniteField::Element;

  FieldElement() = default;
  FieldElement(FieldPtr field, Raw v) : field_(std::move(field)), v_(v) {}

  static FieldElement from_int(const FieldPtr& f, long long v) { return {f, f->from_int(v)}; }

  const FieldPtr& field() const { return field_; }
  Raw raw() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  std::vector<Raw> coefficients() const { return field_->coefficients(v_); }
  std::string to_string() const { return field_->to_string(v_); }

  FieldElement inverse() const { return {field_, field_->inv(v_)}; }
  FieldElement pow(std::uint64_t e) const { return {field_, field_->pow(v_, e)}; }
  FieldElement frobenius(std::uint64_t q) const { return {field_, field_->frobenius(v_, q)}; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    return {a.field_, a.field_->add(a.v_, b.v_)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    return {a.field_, a.field_->sub(a.v_, b.v_)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    return {a.field_, a.field_->mul(a.v_, b.v_)};
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    return {a.field_, a.field_->div(a.v_, b.v_)};
  }
  FieldElement operator-() const { return {field_, field_->neg(v_)}; }
  friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.v_ == b.v_; }

 private:
  FieldPtr field_;
  Raw v_ = 0;
};

/// x^q for a value-semantic element.
inline FieldElement frobenius(const FieldElement& x, std::uint64_t q) { return x.frobenius(q); }

}  // namespace geproci
