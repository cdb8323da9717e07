#pragma once

// Sparse multivariate polynomials in up to four variables over a pluggable
// coefficient field. A coefficient field is any type providing
//   Element, zero(), one(), add, sub, neg, mul, inv, is_zero, eq
// (FiniteField and RationalFunctionField both qualify).

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "geproci/error.hpp"

namespace geproci {

/// Exponent vector for up to four variables, 12 bits per exponent, with the
/// total degree stored above them. Comparing keys as integers gives graded
/// lexicographic order with variable 0 > variable 1 > variable 2 > variable 3.
struct Monomial {
  static constexpr unsigned kMaxVars = 4;
  static constexpr unsigned kBits = 12;
  static constexpr std::uint64_t kMask = (1u << kBits) - 1;
  static constexpr unsigned kMaxDegree = (1u << kBits) - 1;

  std::uint64_t key = 0;

  static unsigned shift(unsigned i) { return kBits * (kMaxVars - 1 - i); }

  static Monomial from_exponents(std::span<const unsigned> e) {
    if (e.size() > kMaxVars) throw Error(ErrorKind::DimensionMismatch, "at most four variables");
    Monomial m;
    unsigned deg = 0;
    for (unsigned i = 0; i < e.size(); ++i) {
      deg += e[i];
      m.key |= std::uint64_t{e[i]} << shift(i);
    }
    if (deg > kMaxDegree) throw Error(ErrorKind::TooLarge, "monomial degree overflow");
    m.key |= std::uint64_t{deg} << (kBits * kMaxVars);
    return m;
  }

  static Monomial variable(unsigned i, unsigned power = 1) {
    std::array<unsigned, kMaxVars> e{};
    e[i] = power;
    return from_exponents(e);
  }

  unsigned exponent(unsigned i) const { return static_cast<unsigned>((key >> shift(i)) & kMask); }
  unsigned degree() const { return static_cast<unsigned>(key >> (kBits * kMaxVars)); }

  std::array<unsigned, kMaxVars> exponents() const {
    std::array<unsigned, kMaxVars> e{};
    for (unsigned i = 0; i < kMaxVars; ++i) e[i] = exponent(i);
    return e;
  }

  friend Monomial operator*(Monomial a, Monomial b) {
    if (a.degree() + b.degree() > kMaxDegree) throw Error(ErrorKind::TooLarge, "monomial degree overflow");
    return Monomial{a.key + b.key};
  }

  bool divides(Monomial o) const {
    for (unsigned i = 0; i < kMaxVars; ++i)
      if (exponent(i) > o.exponent(i)) return false;
    return true;
  }

  /// o / this, assuming divides(o).
  Monomial cofactor_in(Monomial o) const { return Monomial{o.key - key}; }

  friend auto operator<=>(Monomial a, Monomial b) = default;
};

inline Monomial monomial_gcd(Monomial a, Monomial b) {
  std::array<unsigned, Monomial::kMaxVars> e{};
  for (unsigned i = 0; i < Monomial::kMaxVars; ++i) e[i] = std::min(a.exponent(i), b.exponent(i));
  return Monomial::from_exponents(e);
}

/// Monomials of degree d in n variables, in descending graded-lex order
/// (x^d first).
inline std::vector<Monomial> monomials_of_degree(unsigned nvars, unsigned d) {
  std::vector<Monomial> out;
  std::array<unsigned, Monomial::kMaxVars> e{};
  auto rec = [&](auto&& self, unsigned var, unsigned left) -> void {
    if (var + 1 == nvars) {
      e[var] = left;
      out.push_back(Monomial::from_exponents(std::span<const unsigned>(e.data(), nvars)));
      return;
    }
    for (unsigned k = left + 1; k-- > 0;) {
      e[var] = k;
      self(self, var + 1, left - k);
    }
  };
  if (nvars == 0) return out;
  rec(rec, 0, d);
  return out;
}

template <class Field>
struct Polynomial {
  using Element = typename Field::Element;
  struct Term {
    Monomial m;
    Element c;
  };
  // strictly descending monomials, no zero coefficients
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
  const Term& leading() const { return terms.front(); }
  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& t : terms) d = std::max(d, t.m.degree());
    return d;
  }
  unsigned degree_in(unsigned var) const {
    unsigned d = 0;
    for (const auto& t : terms) d = std::max(d, t.m.exponent(var));
    return d;
  }
  bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].m.key == 0); }
};

/// Arithmetic on Polynomial<Field>, with the coefficient field as context.
template <class Field>
class PolyOps {
 public:
  using P = Polynomial<Field>;
  using E = typename Field::Element;
  using Term = typename P::Term;

  explicit PolyOps(const Field& k) : k_(&k) {}
  const Field& field() const { return *k_; }

  P constant(const E& c) const {
    P r;
    if (!k_->is_zero(c)) r.terms.push_back({Monomial{}, c});
    return r;
  }
  P term(Monomial m, const E& c) const {
    P r;
    if (!k_->is_zero(c)) r.terms.push_back({m, c});
    return r;
  }
  P variable(unsigned i) const { return term(Monomial::variable(i), k_->one()); }

  bool eq(const P& a, const P& b) const {
    if (a.terms.size() != b.terms.size()) return false;
    for (std::size_t i = 0; i < a.terms.size(); ++i)
      if (a.terms[i].m != b.terms[i].m || !k_->eq(a.terms[i].c, b.terms[i].c)) return false;
    return true;
  }

  P add(const P& a, const P& b) const { return combine(a, b, false); }
  P sub(const P& a, const P& b) const { return combine(a, b, true); }

  P neg(P a) const {
    for (auto& t : a.terms) t.c = k_->neg(t.c);
    return a;
  }

  P scale(P a, const E& c) const {
    if (k_->is_zero(c)) return {};
    for (auto& t : a.terms) t.c = k_->mul(t.c, c);
    return a;
  }

  P mul_term(const P& a, Monomial m, const E& c) const {
    P r;
    if (k_->is_zero(c)) return r;
    r.terms.reserve(a.terms.size());
    for (const auto& t : a.terms) {
      E v = k_->mul(t.c, c);
      if (!k_->is_zero(v)) r.terms.push_back({t.m * m, std::move(v)});
    }
    return r;
  }

  P mul(const P& a, const P& b) const {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.terms.size() == 1) return mul_term(b, a.terms[0].m, a.terms[0].c);
    if (b.terms.size() == 1) return mul_term(a, b.terms[0].m, b.terms[0].c);
    if constexpr (std::is_integral_v<E>) {
      if (auto r = mul_dense(a, b)) return std::move(*r);
    }
    std::vector<Term> prod;
    prod.reserve(a.terms.size() * b.terms.size());
    for (const auto& s : a.terms)
      for (const auto& t : b.terms) prod.push_back({s.m * t.m, k_->mul(s.c, t.c)});
    std::sort(prod.begin(), prod.end(), [](const Term& x, const Term& y) { return x.m > y.m; });
    P r;
    r.terms = std::move(prod);
    normalize_sorted(r);
    return r;
  }

  P pow(const P& a, unsigned e) const {
    P r = constant(k_->one());
    P b = a;
    while (e) {
      if (e & 1) r = mul(r, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return r;
  }

  /// Exact quotient a / b; throws if b does not divide a.
  P div_exact(const P& a, const P& b) const {
    if (b.is_zero()) throw Error(ErrorKind::InvalidArgument, "division by zero polynomial");
    if (b.terms.size() == 1) {
      const auto& lt = b.terms[0];
      E ci = k_->inv(lt.c);
      P q;
      q.terms.reserve(a.terms.size());
      for (const auto& t : a.terms) {
        if (!lt.m.divides(t.m)) throw Error(ErrorKind::InvalidArgument, "inexact polynomial division");
        q.terms.push_back({lt.m.cofactor_in(t.m), k_->mul(t.c, ci)});
      }
      return q;
    }
    if constexpr (std::is_integral_v<E>) {
      if (auto q = div_dense(a, b)) return std::move(*q);
    }
    const auto& lt = b.terms[0];
    const E lci = k_->inv(lt.c);
    std::map<Monomial, E, std::greater<>> r;
    for (const auto& t : a.terms) r.emplace(t.m, t.c);
    P q;
    while (!r.empty()) {
      const auto top = r.begin();
      if (!lt.m.divides(top->first)) throw Error(ErrorKind::InvalidArgument, "inexact polynomial division");
      const Monomial m = lt.m.cofactor_in(top->first);
      const E c = k_->mul(top->second, lci);
      r.erase(top);
      for (std::size_t j = 1; j < b.terms.size(); ++j) {
        const Monomial bm = b.terms[j].m * m;
        const E v = k_->mul(b.terms[j].c, c);
        auto [it, fresh] = r.try_emplace(bm, k_->neg(v));
        if (!fresh) {
          it->second = k_->sub(it->second, v);
          if (k_->is_zero(it->second)) r.erase(it);
        }
      }
      q.terms.push_back({m, c});
    }
    return q;
  }

  /// Division with remainder by a single divisor (graded-lex leading terms);
  /// returns {quotient, remainder}.
  std::pair<P, P> div_rem(const P& a, const P& b) const {
    P q, r, rest = a;
    const auto& lt = b.terms.at(0);
    const E lci = k_->inv(lt.c);
    while (!rest.is_zero()) {
      const auto& t = rest.terms[0];
      if (lt.m.divides(t.m)) {
        Monomial m = lt.m.cofactor_in(t.m);
        E c = k_->mul(t.c, lci);
        q.terms.push_back({m, c});
        rest = sub_mul_term(rest, b, m, c);
      } else {
        r.terms.push_back(t);
        rest.terms.erase(rest.terms.begin());
      }
    }
    return {q, r};
  }

  /// a - c*m*b
  P sub_mul_term(const P& a, const P& b, Monomial m, const E& c) const {
    P r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
      if (j == b.terms.size()) {
        r.terms.push_back(a.terms[i++]);
        continue;
      }
      Monomial bm = b.terms[j].m * m;
      if (i == a.terms.size() || bm > a.terms[i].m) {
        r.terms.push_back({bm, k_->neg(k_->mul(b.terms[j].c, c))});
        ++j;
      } else if (a.terms[i].m > bm) {
        r.terms.push_back(a.terms[i++]);
      } else {
        E v = k_->sub(a.terms[i].c, k_->mul(b.terms[j].c, c));
        if (!k_->is_zero(v)) r.terms.push_back({bm, std::move(v)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  /// Evaluate at a point with coordinates in the coefficient field.
  E eval(const P& a, std::span<const E> pt) const {
    E r = k_->zero();
    std::array<std::vector<E>, Monomial::kMaxVars> powers;
    for (const auto& t : a.terms) {
      E v = t.c;
      for (unsigned i = 0; i < pt.size() && i < Monomial::kMaxVars; ++i) {
        unsigned e = t.m.exponent(i);
        if (e == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(k_->one());
        while (pw.size() <= e) pw.push_back(k_->mul(pw.back(), pt[i]));
        v = k_->mul(v, pw[e]);
      }
      r = k_->add(r, v);
    }
    return r;
  }

  /// Formal partial derivative with respect to variable i.
  P derivative(const P& a, unsigned i) const {
    P r;
    for (const auto& t : a.terms) {
      unsigned e = t.m.exponent(i);
      if (e == 0) continue;
      E c = k_->mul(t.c, k_->from_int(e));
      if (k_->is_zero(c)) continue;
      r.terms.push_back({Monomial{t.m.key - Monomial::variable(i).key}, c});
    }
    normalize_unsorted(r);
    return r;
  }

  /// Substitute polynomials for the variables: a(subs[0], subs[1], ...).
  template <class TargetOps>
  auto compose(const P& a, std::span<const typename TargetOps::P> subs, const TargetOps& target,
               auto&& coeff_map) const -> typename TargetOps::P {
    using TP = typename TargetOps::P;
    std::array<std::vector<TP>, Monomial::kMaxVars> powers;
    TP r;
    for (const auto& t : a.terms) {
      TP v = target.constant(coeff_map(t.c));
      for (unsigned i = 0; i < subs.size(); ++i) {
        unsigned e = t.m.exponent(i);
        if (e == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(target.constant(target.field().one()));
        while (pw.size() <= e) pw.push_back(target.mul(pw.back(), subs[i]));
        v = target.mul(v, pw[e]);
      }
      r = target.add(r, v);
    }
    return r;
  }

  void normalize_unsorted(P& r) const {
    std::sort(r.terms.begin(), r.terms.end(), [](const Term& x, const Term& y) { return x.m > y.m; });
    normalize_sorted(r);
  }

  void normalize_sorted(P& r) const {
    std::vector<Term> out;
    out.reserve(r.terms.size());
    std::size_t i = 0;
    while (i < r.terms.size()) {
      Term acc = std::move(r.terms[i++]);
      while (i < r.terms.size() && r.terms[i].m == acc.m) acc.c = k_->add(acc.c, r.terms[i++].c);
      if (!k_->is_zero(acc.c)) out.push_back(std::move(acc));
    }
    r.terms = std::move(out);
  }

  /// Divide by the leading coefficient.
  P monic(P a) const {
    if (a.is_zero()) return a;
    E li = k_->inv(a.terms[0].c);
    for (auto& t : a.terms) t.c = k_->mul(t.c, li);
    return a;
  }

 private:
  /// Exact division in the dense exponent box of a, visiting monomials in
  /// descending graded-lex order degree by degree.
  std::optional<P> div_dense(const P& a, const P& b) const {
    if (a.is_zero()) return P{};
    constexpr unsigned V = Monomial::kMaxVars;
    std::array<std::size_t, V> ext{}, stride{};
    std::size_t cells = 1;
    const std::size_t limit = std::min<std::size_t>(std::size_t{1} << 22, 8 * a.terms.size() + 64);
    for (unsigned i = 0; i < V; ++i) {
      ext[i] = std::size_t{a.degree_in(i)} + 1;
      stride[i] = cells;
      cells *= ext[i];
      if (cells > limit) return std::nullopt;
    }
    auto inexact = [] { return Error(ErrorKind::InvalidArgument, "inexact polynomial division"); };
    std::vector<E> acc(cells, k_->zero());
    for (const auto& t : a.terms) {
      std::size_t k = 0;
      for (unsigned i = 0; i < V; ++i) k += t.m.exponent(i) * stride[i];
      acc[k] = t.c;
    }
    const auto& lt = b.terms[0];
    const E lci = k_->inv(lt.c);
    std::vector<std::array<unsigned, V>> be(b.terms.size());
    for (std::size_t j = 0; j < b.terms.size(); ++j) be[j] = b.terms[j].m.exponents();
    const unsigned top = a.terms.front().m.degree(), bottom = a.terms.back().m.degree();
    P q;
    std::array<unsigned, V> e{};
    // visit exponents of total degree D with e0 descending, then e1, ...
    auto visit = [&](auto&& self, unsigned i, unsigned left, std::size_t k) -> void {
      if (i + 1 == V) {
        if (left >= ext[i]) return;
        e[i] = left;
        k += left * stride[i];
        if (k_->is_zero(acc[k])) return;
        const Monomial m = Monomial::from_exponents(std::span<const unsigned>(e));
        if (!lt.m.divides(m)) throw inexact();
        const Monomial qm = lt.m.cofactor_in(m);
        const E c = k_->mul(acc[k], lci);
        const auto qe = qm.exponents();
        acc[k] = k_->zero();
        for (std::size_t j = 1; j < b.terms.size(); ++j) {
          std::size_t kk = 0;
          for (unsigned t = 0; t < V; ++t) {
            const std::size_t x = std::size_t{qe[t]} + be[j][t];
            if (x >= ext[t]) throw inexact();
            kk += x * stride[t];
          }
          acc[kk] = k_->sub(acc[kk], k_->mul(b.terms[j].c, c));
        }
        q.terms.push_back({qm, c});
        return;
      }
      for (unsigned x = static_cast<unsigned>(std::min<std::size_t>(left, ext[i] - 1)) + 1; x-- > 0;) {
        e[i] = x;
        self(self, i + 1, left - x, k + x * stride[i]);
      }
    };
    for (unsigned D = top + 1; D-- > bottom;) visit(visit, 0, D, 0);
    for (const auto& c : acc)
      if (!k_->is_zero(c)) throw inexact();
    return q;
  }

  /// Product accumulated in a dense exponent box, when the box is not much
  /// larger than the number of term products.
  std::optional<P> mul_dense(const P& a, const P& b) const {
    std::array<std::size_t, Monomial::kMaxVars> ext{}, stride{};
    std::size_t cells = 1;
    const std::size_t limit = std::min<std::size_t>(std::size_t{1} << 22, 4 * a.terms.size() * b.terms.size() + 64);
    for (unsigned i = 0; i < Monomial::kMaxVars; ++i) {
      ext[i] = std::size_t{a.degree_in(i)} + b.degree_in(i) + 1;
      stride[i] = cells;
      cells *= ext[i];
      if (cells > limit) return std::nullopt;
    }
    auto index = [&](Monomial m) {
      std::size_t k = 0;
      for (unsigned i = 0; i < Monomial::kMaxVars; ++i) k += m.exponent(i) * stride[i];
      return k;
    };
    std::vector<E> acc(cells, k_->zero());
    std::vector<std::size_t> bi(b.terms.size());
    for (std::size_t j = 0; j < b.terms.size(); ++j) bi[j] = index(b.terms[j].m);
    for (const auto& s : a.terms) {
      const std::size_t base = index(s.m);
      for (std::size_t j = 0; j < b.terms.size(); ++j) {
        auto& c = acc[base + bi[j]];
        c = k_->add(c, k_->mul(s.c, b.terms[j].c));
      }
    }
    P r;
    std::array<unsigned, Monomial::kMaxVars> e{};
    for (std::size_t k = 0; k < cells; ++k) {
      if (k_->is_zero(acc[k])) continue;
      std::size_t x = k;
      for (unsigned i = 0; i < Monomial::kMaxVars; ++i) {
        e[i] = static_cast<unsigned>(x % ext[i]);
        x /= ext[i];
      }
      r.terms.push_back({Monomial::from_exponents(std::span<const unsigned>(e)), acc[k]});
    }
    std::sort(r.terms.begin(), r.terms.end(), [](const Term& x, const Term& y) { return x.m > y.m; });
    return r;
  }

  P combine(const P& a, const P& b, bool subtract) const {
    P r;
    r.terms.reserve(a.terms.size() + b.terms.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
      if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].m > b.terms[j].m)) {
        r.terms.push_back(a.terms[i++]);
      } else if (i == a.terms.size() || b.terms[j].m > a.terms[i].m) {
        r.terms.push_back({b.terms[j].m, subtract ? k_->neg(b.terms[j].c) : b.terms[j].c});
        ++j;
      } else {
        E v = subtract ? k_->sub(a.terms[i].c, b.terms[j].c) : k_->add(a.terms[i].c, b.terms[j].c);
        if (!k_->is_zero(v)) r.terms.push_back({a.terms[i].m, std::move(v)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  const Field* k_;
};

/// Canonical text form: `<coeff> x^i y^j ...` terms joined by ` + `, in
/// descending graded-lex order. `coeff_str` renders coefficients.
template <class Field, class CoeffStr>
std::string format_polynomial(const Polynomial<Field>& f, std::span<const std::string> names, CoeffStr&& coeff_str) {
  if (f.is_zero()) return "0";
  std::string s;
  for (std::size_t k = 0; k < f.terms.size(); ++k) {
    if (k) s += " + ";
    s += coeff_str(f.terms[k].c);
    for (unsigned i = 0; i < names.size(); ++i) {
      unsigned e = f.terms[k].m.exponent(i);
      if (e == 0) continue;
      s += " " + names[i];
      if (e > 1) s += "^" + std::to_string(e);
    }
  }
  return s;
}

}  // namespace geproci
