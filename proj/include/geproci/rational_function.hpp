#pragma once

// The rational function field F_q(a,b,c[,d]) used for generic points, with
// multivariate gcd over F_q.

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "geproci/field.hpp"
#include "geproci/polynomial.hpp"

namespace geproci {

/// Multivariate gcd over a finite field (up to four variables).
///
/// Primitive polynomial remainder sequences in a main variable with recursive
/// contents. Before running the PRS a specialization test evaluates all other
/// variables at random points of a large extension; when the univariate images
/// keep their degrees and are coprime, the main variable cannot occur in the
/// gcd. That test only ever proves coprimality, so results are exact.
class PolyGcd {
 public:
  using P = Polynomial<FiniteField>;
  using E = FiniteField::Element;

  explicit PolyGcd(FieldPtr base, unsigned nvars)
      : base_(std::move(base)), ops_(*base_), nvars_(nvars), rng_(0x5eed'9c3du) {
    unsigned m = 1;
    std::uint64_t s = base_->size();
    while (s < (std::uint64_t{1} << 24)) {
      s *= base_->size();
      ++m;
    }
    big_ = FiniteField::extension(base_, m);
  }

  const PolyOps<FiniteField>& ops() const { return ops_; }
  const FieldPtr& specialization_field() const { return big_; }

  /// Monic gcd (leading graded-lex coefficient 1).
  P gcd(const P& a, const P& b) {
    if (a.is_zero()) return ops_.monic(b);
    if (b.is_zero()) return ops_.monic(a);
    if (a.is_constant() || b.is_constant()) return ops_.constant(1);
    // pull out monomial contents
    Monomial ma = monomial_content(a), mb = monomial_content(b);
    Monomial mg = monomial_gcd(ma, mb);
    P a1 = ma.key ? strip_monomial(a, ma) : a;
    P b1 = mb.key ? strip_monomial(b, mb) : b;
    P g = gcd_stripped(a1, b1);
    if (mg.key) g = ops_.mul_term(g, mg, 1);
    return g;
  }

 private:
  static Monomial monomial_content(const P& a) {
    Monomial g = a.terms[0].m;
    for (const auto& t : a.terms) {
      g = monomial_gcd(g, t.m);
      if (g.key == 0) break;
    }
    return g;
  }

  static P strip_monomial(const P& a, Monomial m) {
    P r = a;
    for (auto& t : r.terms) t.m = m.cofactor_in(t.m);
    return r;
  }

  unsigned var_mask(const P& a) const {
    unsigned mask = 0;
    for (const auto& t : a.terms)
      for (unsigned i = 0; i < nvars_; ++i)
        if (t.m.exponent(i)) mask |= 1u << i;
    return mask;
  }

  P gcd_stripped(const P& a, const P& b) {
    if (a.is_constant() || b.is_constant()) return ops_.constant(1);
    const unsigned common = var_mask(a) & var_mask(b);
    if (common == 0) return ops_.constant(1);
    if (ops_.eq(ops_.monic(a), ops_.monic(b))) return ops_.monic(a);
    unsigned candidates = common;
    for (unsigned v = 0; v < nvars_; ++v)
      if ((common >> v & 1) && specialization_excludes(a, b, v)) candidates &= ~(1u << v);
    if (candidates == 0) return ops_.constant(1);
    // main variable: the candidate of smallest combined degree
    unsigned v = 0, best = ~0u;
    for (unsigned i = 0; i < nvars_; ++i) {
      if (!(candidates >> i & 1)) continue;
      unsigned d = a.degree_in(i) + b.degree_in(i);
      if (d < best) {
        best = d;
        v = i;
      }
    }
    const unsigned mask_a = var_mask(a), mask_b = var_mask(b);
    if (mask_a == (1u << v) && mask_b == (1u << v)) return univariate_gcd(a, b, v);
    P ca = content(a, v), cb = content(b, v);
    P c = gcd(ca, cb);
    P pa = ops_.div_exact(a, ca), pb = ops_.div_exact(b, cb);
    P g = prs(pa, pb, v);
    return ops_.monic(ops_.mul(c, g));
  }

  bool specialization_excludes(const P& a, const P& b, unsigned v) {
    const FiniteField& L = *big_;
    std::vector<E> vals(nvars_);
    for (auto& x : vals) x = L.random(rng_);
    auto image = [&](const P& f) {
      std::vector<E> u(f.degree_in(v) + 1, 0);
      for (const auto& t : f.terms) {
        E c = t.c;
        for (unsigned i = 0; i < nvars_; ++i)
          if (i != v && t.m.exponent(i)) c = L.mul(c, L.pow(vals[i], t.m.exponent(i)));
        u[t.m.exponent(v)] = L.add(u[t.m.exponent(v)], c);
      }
      return u;
    };
    auto ua = image(a), ub = image(b);
    if (ua.back() == 0 || ub.back() == 0) return false;
    return L.poly_gcd(ua, ub).size() == 1;
  }

  P univariate_gcd(const P& a, const P& b, unsigned v) const {
    auto dense = [&](const P& f) {
      std::vector<E> u(f.degree_in(v) + 1, 0);
      for (const auto& t : f.terms) u[t.m.exponent(v)] = t.c;
      return u;
    };
    auto g = base_->poly_gcd(dense(a), dense(b));
    P r;
    for (std::size_t k = g.size(); k-- > 0;)
      if (g[k]) r.terms.push_back({Monomial::variable(v, static_cast<unsigned>(k)), g[k]});
    return r;
  }

  /// Coefficients of f as a polynomial in variable v: result[k] multiplies v^k.
  std::vector<P> coefficients_in(const P& f, unsigned v) const {
    std::vector<P> out(f.degree_in(v) + 1);
    for (const auto& t : f.terms) {
      unsigned e = t.m.exponent(v);
      out[e].terms.push_back({Monomial{t.m.key - Monomial::variable(v, e).key}, t.c});
    }
    return out;  // each stays sorted: removing a fixed power of v preserves grlex order within a slice
  }

  P content(const P& f, unsigned v) {
    auto cs = coefficients_in(f, v);
    std::sort(cs.begin(), cs.end(), [](const P& x, const P& y) { return x.size() < y.size(); });
    P g;
    for (const auto& c : cs) {
      if (c.is_zero()) continue;
      g = gcd(g, c);
      if (g.is_constant()) return ops_.constant(1);
    }
    return g;
  }

  P lc_in(const P& f, unsigned v, unsigned deg) const {
    P r;
    for (const auto& t : f.terms)
      if (t.m.exponent(v) == deg) r.terms.push_back({Monomial{t.m.key - Monomial::variable(v, deg).key}, t.c});
    return r;
  }

  P prs(P a, P b, unsigned v) {
    if (a.degree_in(v) < b.degree_in(v)) std::swap(a, b);
    for (;;) {
      P r = pseudo_rem(a, b, v);
      if (r.is_zero()) return ops_.monic(b);
      if (r.degree_in(v) == 0) return ops_.constant(1);
      P c = content(r, v);
      r = ops_.div_exact(r, c);
      a = std::move(b);
      b = std::move(r);
    }
  }

  /// A nonzero multiple of the pseudo-remainder of a by b in variable v.
  P pseudo_rem(P a, const P& b, unsigned v) const {
    const unsigned db = b.degree_in(v);
    const P lb = lc_in(b, v, db);
    unsigned da = a.degree_in(v);
    while (!a.is_zero() && da >= db) {
      P la = lc_in(a, v, da);
      P shifted = ops_.mul_term(b, Monomial::variable(v, da - db), 1);
      a = ops_.sub(ops_.mul(lb, a), ops_.mul(la, shifted));
      if (a.total_degree() > kMaxPrsDegree) throw Error(ErrorKind::TooLarge, "gcd remainder degree overflow");
      da = a.is_zero() ? 0 : a.degree_in(v);
    }
    return a;
  }

  static constexpr unsigned kMaxPrsDegree = 1024;

  FieldPtr base_;
  PolyOps<FiniteField> ops_;
  unsigned nvars_;
  FieldPtr big_;
  std::mt19937_64 rng_;
};

/// F_q(v_0, ..., v_{n-1}) with reduced fractions and monic denominators
/// (graded-lex leading coefficient 1), so equality is syntactic.
class RationalFunctionField {
 public:
  using Poly = Polynomial<FiniteField>;
  struct Element {
    Poly num;
    Poly den;
  };

  RationalFunctionField(FieldPtr base, unsigned nvars, std::vector<std::string> names = {})
      : base_(std::move(base)), nvars_(nvars), gcd_(std::make_shared<PolyGcd>(base_, nvars)) {
    if (nvars == 0 || nvars > Monomial::kMaxVars)
      throw Error(ErrorKind::InvalidArgument, "rational function field needs 1..4 variables");
    if (names.empty()) {
      static const char* defaults[] = {"a", "b", "c", "d"};
      for (unsigned i = 0; i < nvars; ++i) names.emplace_back(defaults[i]);
    }
    names_ = std::move(names);
  }

  const FieldPtr& base() const { return base_; }
  unsigned nvars() const { return nvars_; }
  const std::vector<std::string>& names() const { return names_; }
  std::uint32_t characteristic() const { return base_->characteristic(); }
  const PolyOps<FiniteField>& poly_ops() const { return gcd_->ops(); }
  PolyGcd& gcd_engine() const { return *gcd_; }

  Element zero() const { return {Poly{}, one_poly()}; }
  Element one() const { return {one_poly(), one_poly()}; }
  Element from_int(long long v) const { return constant(base_->from_int(v)); }
  Element constant(FiniteField::Element c) const { return {ops().constant(c), one_poly()}; }
  Element variable(unsigned i) const { return {ops().variable(i), one_poly()}; }
  Element from_poly(Poly p) const { return {std::move(p), one_poly()}; }

  /// num/den with reduction; den must be nonzero.
  Element fraction(const Poly& num, const Poly& den) const {
    if (den.is_zero()) throw Error(ErrorKind::InvalidArgument, "zero denominator");
    if (num.is_zero()) return zero();
    Poly g = gcd_->gcd(num, den);
    Element r{ops().div_exact(num, g), ops().div_exact(den, g)};
    return normalized(std::move(r));
  }

  bool is_zero(const Element& x) const { return x.num.is_zero(); }
  bool eq(const Element& x, const Element& y) const {
    return ops().eq(x.num, y.num) && ops().eq(x.den, y.den);
  }
  bool is_polynomial(const Element& x) const { return x.den.is_constant(); }

  Element add(const Element& x, const Element& y) const { return add_sub(x, y, false); }
  Element sub(const Element& x, const Element& y) const { return add_sub(x, y, true); }
  Element neg(Element x) const {
    x.num = ops().neg(std::move(x.num));
    return x;
  }

  Element mul(const Element& x, const Element& y) const {
    if (is_zero(x) || is_zero(y)) return zero();
    const auto& o = ops();
    if (x.den.is_constant() && y.den.is_constant()) return {o.mul(x.num, y.num), one_poly()};
    Poly g1 = gcd_->gcd(x.num, y.den), g2 = gcd_->gcd(y.num, x.den);
    Poly n = o.mul(o.div_exact(x.num, g1), o.div_exact(y.num, g2));
    Poly d = o.mul(o.div_exact(x.den, g2), o.div_exact(y.den, g1));
    return normalized({std::move(n), std::move(d)});
  }

  Element inv(const Element& x) const {
    if (is_zero(x)) throw Error(ErrorKind::InvalidArgument, "inverse of zero rational function");
    return normalized({x.den, x.num});
  }

  Element div(const Element& x, const Element& y) const { return mul(x, inv(y)); }

  /// Multiply by a polynomial without a gcd when the denominator is 1.
  Element mul_poly(const Element& x, const Poly& p) const { return mul(x, from_poly(p)); }

  /// Value at a point of an extension of the base field (denominator must
  /// not vanish there).
  FiniteField::Element specialize(const Element& x, const FiniteField& L,
                                  std::span<const FiniteField::Element> vals) const {
    auto ev = [&](const Poly& p) {
      FiniteField::Element r = 0;
      for (const auto& t : p.terms) {
        FiniteField::Element c = t.c;
        for (unsigned i = 0; i < nvars_; ++i)
          if (t.m.exponent(i)) c = L.mul(c, L.pow(vals[i], t.m.exponent(i)));
        r = L.add(r, c);
      }
      return r;
    };
    FiniteField::Element d = ev(x.den);
    if (d == 0) throw Error(ErrorKind::InvalidArgument, "denominator vanishes at specialization");
    return L.div(ev(x.num), d);
  }

  std::string to_string(const Element& x) const {
    auto cs = [&](FiniteField::Element c) { return base_->to_string(c); };
    std::string n = format_polynomial(x.num, std::span<const std::string>(names_), cs);
    if (x.den.is_constant()) return x.num.size() > 1 ? "(" + n + ")" : n;
    return "(" + n + ")/(" + format_polynomial(x.den, std::span<const std::string>(names_), cs) + ")";
  }

 private:
  const PolyOps<FiniteField>& ops() const { return gcd_->ops(); }
  Poly one_poly() const { return ops().constant(1); }

  Element normalized(Element r) const {
    const auto lc = r.den.terms.at(0).c;
    if (lc != 1) {
      const auto li = base_->inv(lc);
      r.num = ops().scale(std::move(r.num), li);
      r.den = ops().scale(std::move(r.den), li);
    }
    return r;
  }

  Element add_sub(const Element& x, const Element& y, bool subtract) const {
    const auto& o = ops();
    if (is_zero(y)) return x;
    if (is_zero(x)) return subtract ? neg(y) : y;
    if (o.eq(x.den, y.den)) {
      Poly n = subtract ? o.sub(x.num, y.num) : o.add(x.num, y.num);
      if (x.den.is_constant()) return {std::move(n), x.den};
      return fraction(n, x.den);
    }
    Poly g = gcd_->gcd(x.den, y.den);
    Poly xd = o.div_exact(x.den, g), yd = o.div_exact(y.den, g);
    Poly n1 = o.mul(x.num, yd), n2 = o.mul(y.num, xd);
    Poly n = subtract ? o.sub(n1, n2) : o.add(n1, n2);
    if (n.is_zero()) return zero();
    Poly d = o.mul(x.den, yd);
    if (g.is_constant()) return normalized({std::move(n), std::move(d)});
    Poly h = gcd_->gcd(n, g);
    if (!h.is_constant()) {
      n = o.div_exact(n, h);
      d = o.div_exact(d, h);
    }
    return normalized({std::move(n), std::move(d)});
  }

  FieldPtr base_;
  unsigned nvars_;
  std::vector<std::string> names_;
  std::shared_ptr<PolyGcd> gcd_;
};

}  // namespace geproci
