#pragma once

// Homogeneous forms, condition matrices, kernels, Hilbert function values and
// resultant-based coprimality certificates.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geproci/error.hpp"
#include "geproci/field.hpp"
#include "geproci/linalg.hpp"
#include "geproci/polynomial.hpp"
#include "geproci/projective.hpp"
#include "geproci/rational_function.hpp"

namespace geproci {

inline const std::vector<std::string>& default_variable_names(unsigned nvars) {
  static const std::vector<std::string> three{"x", "y", "z"}, four{"x", "y", "z", "w"};
  return nvars == 4 ? four : three;
}

/// C(n, k) as an exact 64-bit integer (throws TooLarge on overflow).
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > ~std::uint64_t{0}) throw Error(ErrorKind::TooLarge, "binomial coefficient overflow");
  }
  return static_cast<std::uint64_t>(r);
}

/// C(n, k) mod p by Lucas' theorem.
inline std::uint64_t binomial_mod(std::uint64_t n, std::uint64_t k, std::uint64_t p) {
  std::uint64_t r = 1;
  while (n || k) {
    std::uint64_t ni = n % p, ki = k % p;
    if (ki > ni) return 0;
    r = r * (binomial(ni, ki) % p) % p;
    n /= p;
    k /= p;
  }
  return r;
}

template <class Field>
struct HomogeneousForm {
  unsigned nvars = 3;
  unsigned degree = 1;
  Polynomial<Field> poly;

  bool is_zero() const { return poly.is_zero(); }
};

/// Wraps a polynomial as a form, checking that every term has degree d.
template <class Field>
HomogeneousForm<Field> make_form(unsigned nvars, unsigned d, Polynomial<Field> p) {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "forms of degree 0 are not supported");
  if (nvars < 1 || nvars > Monomial::kMaxVars) throw Error(ErrorKind::DimensionMismatch, "1..4 variables");
  for (const auto& t : p.terms) {
    if (t.m.degree() != d) throw Error(ErrorKind::InvalidArgument, "polynomial is not homogeneous of degree " + std::to_string(d));
    for (unsigned i = nvars; i < Monomial::kMaxVars; ++i)
      if (t.m.exponent(i)) throw Error(ErrorKind::DimensionMismatch, "term uses an undeclared variable");
  }
  return {nvars, d, std::move(p)};
}

template <class Field>
std::string form_to_string(const Field& K, const HomogeneousForm<Field>& f) {
  const auto& names = default_variable_names(f.nvars);
  return format_polynomial(f.poly, std::span<const std::string>(names.data(), f.nvars),
                           [&](const typename Field::Element& c) { return K.to_string(c); });
}

template <class Field>
typename Field::Element evaluate(const Field& K, const HomogeneousForm<Field>& f,
                                 std::span<const typename Field::Element> pt) {
  if (pt.size() != f.nvars) throw Error(ErrorKind::DimensionMismatch, "point has wrong number of coordinates");
  return PolyOps<Field>(K).eval(f.poly, pt);
}

namespace detail {

template <class Field>
bool vectors_dependent(const Field& K, std::span<const typename Field::Element> u,
                       std::span<const typename Field::Element> v) {
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j)
      if (!K.is_zero(K.sub(K.mul(u[i], v[j]), K.mul(u[j], v[i])))) return false;
  return true;
}

}  // namespace detail

/// Sum_i v_i * (d f / d x_i)(point), with formal partial derivatives.
template <class Field>
typename Field::Element directional_derivative(const Field& K, const HomogeneousForm<Field>& f,
                                               std::span<const typename Field::Element> pt,
                                               std::span<const typename Field::Element> dir) {
  if (pt.size() != f.nvars || dir.size() != f.nvars)
    throw Error(ErrorKind::DimensionMismatch, "point or direction has wrong number of coordinates");
  if (detail::vectors_dependent(K, pt, dir))
    throw Error(ErrorKind::DependentDirection, "direction does not determine a line through the point");
  PolyOps<Field> ops(K);
  auto r = K.zero();
  for (unsigned i = 0; i < f.nvars; ++i) {
    if (K.is_zero(dir[i])) continue;
    r = K.add(r, K.mul(dir[i], ops.eval(ops.derivative(f.poly, i), pt)));
  }
  return r;
}

/// One linear condition on forms: vanishing at `point`, or (when `direction`
/// is set) vanishing of the derivative at `point` towards `direction`.
template <class Field>
struct Condition {
  std::vector<typename Field::Element> point;
  std::vector<typename Field::Element> direction;

  bool is_derivative() const { return !direction.empty(); }
};

/// Rows are conditions; columns are the degree-d monomials in descending
/// graded-lex order.
template <class Field>
struct EvaluationMatrix {
  unsigned nvars = 3;
  unsigned degree = 1;
  std::vector<Monomial> columns;
  std::vector<Row<Field>> rows;
};

namespace detail {

template <class Field>
std::vector<std::vector<typename Field::Element>> power_table(const Field& K,
                                                              std::span<const typename Field::Element> pt,
                                                              unsigned d) {
  std::vector<std::vector<typename Field::Element>> pw(pt.size());
  for (std::size_t i = 0; i < pt.size(); ++i) {
    pw[i].push_back(K.one());
    for (unsigned e = 1; e <= d; ++e) pw[i].push_back(K.mul(pw[i].back(), pt[i]));
  }
  return pw;
}

}  // namespace detail

template <class Field>
EvaluationMatrix<Field> evaluation_matrix(const Field& K, const std::vector<Condition<Field>>& conds, unsigned nvars,
                                          unsigned d) {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "degree must be at least 1");
  EvaluationMatrix<Field> M{nvars, d, monomials_of_degree(nvars, d), {}};
  for (const auto& c : conds) {
    if (c.point.size() != nvars) throw Error(ErrorKind::DimensionMismatch, "condition point has wrong size");
    auto pw = detail::power_table(K, std::span<const typename Field::Element>(c.point), d);
    Row<Field> row;
    row.reserve(M.columns.size());
    if (!c.is_derivative()) {
      for (auto m : M.columns) {
        auto v = K.one();
        for (unsigned i = 0; i < nvars; ++i)
          if (m.exponent(i)) v = K.mul(v, pw[i][m.exponent(i)]);
        row.push_back(std::move(v));
      }
    } else {
      if (c.direction.size() != nvars) throw Error(ErrorKind::DimensionMismatch, "direction has wrong size");
      if (detail::vectors_dependent(K, std::span<const typename Field::Element>(c.point),
                                    std::span<const typename Field::Element>(c.direction)))
        throw Error(ErrorKind::DependentDirection, "direction does not determine a line through the point");
      for (auto m : M.columns) {
        auto v = K.zero();
        for (unsigned i = 0; i < nvars; ++i) {
          const unsigned e = m.exponent(i);
          if (e == 0 || K.is_zero(c.direction[i])) continue;
          auto t = K.mul(c.direction[i], K.from_int(e));
          if (K.is_zero(t)) continue;
          for (unsigned j = 0; j < nvars; ++j) {
            unsigned ej = m.exponent(j) - (j == i ? 1 : 0);
            if (ej) t = K.mul(t, pw[j][ej]);
          }
          v = K.add(v, t);
        }
        row.push_back(std::move(v));
      }
    }
    M.rows.push_back(std::move(row));
  }
  return M;
}

template <class Field>
struct KernelBasis {
  unsigned nvars = 3;
  unsigned degree = 1;
  std::size_t rank = 0;  // rank of the condition matrix
  std::vector<HomogeneousForm<Field>> forms;

  std::size_t dimension() const { return forms.size(); }
};

/// Exact nullspace of a condition matrix. Elimination runs with columns in
/// ascending monomial order, so each basis form has its own free monomial as
/// leading term (coefficient one) and no other free monomial: the reduced
/// echelon basis for descending graded-lex order, listed by leading monomial.
template <class Field>
KernelBasis<Field> kernel_of_conditions(const Field& K, const EvaluationMatrix<Field>& M,
                                        std::size_t term_budget = 0) {
  const std::size_t n = M.columns.size();
  std::vector<Row<Field>> rows;
  rows.reserve(M.rows.size());
  for (const auto& r : M.rows) rows.emplace_back(r.rbegin(), r.rend());
  auto R = rref(K, std::move(rows), n, term_budget);
  auto null = nullspace(K, R);
  KernelBasis<Field> out{M.nvars, M.degree, R.rank(), {}};
  for (auto it = null.rbegin(); it != null.rend(); ++it) {
    Polynomial<Field> p;
    for (std::size_t j = n; j-- > 0;)
      if (!K.is_zero((*it)[j])) p.terms.push_back({M.columns[n - 1 - j], (*it)[j]});
    out.forms.push_back({M.nvars, M.degree, std::move(p)});
  }
  return out;
}

/// Re-evaluates every basis form against every condition.
template <class Field>
bool kernel_is_sound(const Field& K, const std::vector<Condition<Field>>& conds, const KernelBasis<Field>& B) {
  for (const auto& f : B.forms) {
    if (f.is_zero()) return false;
    for (const auto& c : conds) {
      auto pt = std::span<const typename Field::Element>(c.point);
      auto v = c.is_derivative()
                   ? directional_derivative(K, f, pt, std::span<const typename Field::Element>(c.direction))
                   : evaluate(K, f, pt);
      if (!K.is_zero(v)) return false;
    }
  }
  return true;
}

/// Value conditions for a list of points.
template <class Field>
std::vector<Condition<Field>> point_conditions(const std::vector<std::vector<typename Field::Element>>& pts) {
  std::vector<Condition<Field>> out;
  for (const auto& p : pts) out.push_back({p, {}});
  return out;
}

/// dim [I]_d = C(d+n, n) - rank, where the conditions cut out I in P^n.
template <class Field>
std::size_t hilbert_value(const Field& K, const std::vector<Condition<Field>>& conds, unsigned nvars, unsigned d) {
  auto M = evaluation_matrix(K, conds, nvars, d);
  std::vector<Row<Field>> rows = M.rows;
  const std::size_t r = rank(K, std::move(rows), M.columns.size());
  return M.columns.size() - r;
}

/// Conditions for a form of degree d in four variables to lie in I(P)^d:
/// after the translation x_i -> x_i + (p_i/p_3) w, every monomial involving
/// w must vanish. One row per such monomial, C(d+2, 3) rows in all.
template <class Field>
std::vector<Row<Field>> vertex_conditions(const Field& K, std::span<const typename Field::Element> P, unsigned d) {
  if (P.size() != 4) throw Error(ErrorKind::DimensionMismatch, "vertex must be a point of P^3");
  if (K.is_zero(P[3])) throw Error(ErrorKind::InvalidArgument, "vertex must have nonzero last coordinate");
  const std::uint64_t p = K.characteristic();
  const auto inv3 = K.inv(P[3]);
  std::vector<typename Field::Element> t(3);
  for (unsigned i = 0; i < 3; ++i) t[i] = K.mul(P[i], inv3);
  auto pw = detail::power_table(K, std::span<const typename Field::Element>(t), d);
  const auto cols = monomials_of_degree(4, d);
  std::vector<Row<Field>> rows;
  for (auto target : cols) {
    const unsigned j = target.exponent(3);
    if (j == 0) continue;
    Row<Field> row;
    row.reserve(cols.size());
    for (auto m : cols) {
      // coefficient of target in prod_i (x_i + t_i w)^{e_i} * w^{e_3}
      bool ok = m.exponent(3) <= j;
      std::uint64_t coeff = 1;
      auto v = K.one();
      for (unsigned i = 0; i < 3 && ok; ++i) {
        const unsigned e = m.exponent(i), k = target.exponent(i);
        if (k > e) {
          ok = false;
          break;
        }
        coeff = coeff * binomial_mod(e, k, p) % p;
        if (e > k) v = K.mul(v, pw[i][e - k]);
      }
      if (!ok || coeff == 0) {
        row.push_back(K.zero());
        continue;
      }
      row.push_back(K.mul(v, K.from_int(static_cast<long long>(coeff))));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Coprimality of plane forms

/// Evidence that two plane forms are coprime (or share a factor). The
/// resultant with respect to `variable` (after the substitution described by
/// `transform`) is a binary form of degree alpha*beta in the other two
/// variables; it is evaluated at alpha*beta+1 points (u, 1).
struct CoprimeWitness {
  bool coprime = false;
  unsigned transform = 0;    // 0..2: eliminate x, y, z; 3..10: shear number transform-2
  std::string variable;      // eliminated variable
  std::string substitution;  // shear used, empty for the coordinate directions
  std::string field;         // spec of the field the resultant lives in
  std::string eval_point;    // u where the resultant is nonzero
  std::string resultant;     // its value there
  std::string specialization;  // generic coefficients specialized to these values
  std::uint64_t points_tested = 0;
};

namespace detail {

using UPoly = std::vector<Elem>;

/// Resultant of two univariate polynomials (low-to-high, trimmed).
inline Elem univariate_resultant(const FiniteField& L, UPoly a, UPoly b) {
  L.poly_trim(a);
  L.poly_trim(b);
  if (a.empty() || b.empty()) return 0;
  Elem res = 1;
  for (;;) {
    const std::size_t da = a.size() - 1, db = b.size() - 1;
    if (db == 0) return L.mul(res, L.pow(b[0], da));
    if (da == 0) return L.mul(res, L.pow(a[0], db));
    if (da < db) {
      if ((da * db) % 2 == 1) res = L.neg(res);
      std::swap(a, b);
      continue;
    }
    // Res(a, b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r) with r = a mod b
    UPoly r = L.poly_rem(a, b);
    if (r.empty()) return 0;
    const std::size_t dr = r.size() - 1;
    if ((da * db) % 2 == 1) res = L.neg(res);
    res = L.mul(res, L.pow(b.back(), da - dr));
    a = std::move(b);
    b = std::move(r);
  }
}

/// Smallest extension of F with at least 2^20 elements.
inline FieldPtr certificate_field(const FieldPtr& F) {
  unsigned m = 1;
  std::uint64_t s = F->size();
  while (s < (std::uint64_t{1} << 20)) {
    s *= F->size();
    ++m;
  }
  return FiniteField::extension(F, m);
}

inline std::uint64_t shear_seed(unsigned k) { return 0x9e3779b97f4a7c15ull * (k + 1); }

}  // namespace detail

/// Coprimality of plane forms over a finite field by resultants. Works over
/// an extension L of F with at least 2^20 elements so that shears and
/// evaluation points are plentiful. Tries elimination of x, y, z, then up to
/// eight shears x -> x, y -> y + s x, z -> z + t x (eliminating x). The
/// resultant of two forms with full-degree leading terms in the eliminated
/// variable vanishes identically iff they share a factor.
inline CoprimeWitness coprime_certificate(const FieldPtr& F, const HomogeneousForm<FiniteField>& f,
                                          const HomogeneousForm<FiniteField>& g) {
  if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::ZeroInput, "coprimality of a zero form");
  if (f.nvars != 3 || g.nvars != 3) throw Error(ErrorKind::DimensionMismatch, "coprimality works on plane forms");
  FieldPtr L = detail::certificate_field(F);
  PolyOps<FiniteField> ops(*L);
  const unsigned alpha = f.degree, beta = g.degree;
  const std::uint64_t npts = std::uint64_t{alpha} * beta + 1;
  static const char* names[] = {"x", "y", "z"};

  for (unsigned t = 0; t < 11; ++t) {
    Polynomial<FiniteField> ft = f.poly, gt = g.poly;
    unsigned v = 0;
    std::string subst;
    if (t < 3) {
      v = t;
    } else {
      std::mt19937_64 rng(detail::shear_seed(t - 3));
      Elem s = L->random(rng), u = L->random(rng);
      std::vector<Polynomial<FiniteField>> subs{ops.variable(0), ops.add(ops.variable(1), ops.term(Monomial::variable(0), s)),
                                                ops.add(ops.variable(2), ops.term(Monomial::variable(0), u))};
      auto id = [](Elem c) { return c; };
      ft = ops.compose(f.poly, std::span<const Polynomial<FiniteField>>(subs), ops, id);
      gt = ops.compose(g.poly, std::span<const Polynomial<FiniteField>>(subs), ops, id);
      subst = "y -> y + " + L->to_string(s) + " x, z -> z + " + L->to_string(u) + " x";
    }
    if (ft.degree_in(v) != alpha || gt.degree_in(v) != beta) continue;
    // the first remaining variable takes the value u, the second is one
    const unsigned o1 = v == 0 ? 1 : 0;
    auto slice = [&](const Polynomial<FiniteField>& p, unsigned deg, Elem uval) {
      detail::UPoly out(deg + 1, 0);
      for (const auto& term : p.terms) {
        auto& slot = out[term.m.exponent(v)];
        slot = L->add(slot, L->mul(term.c, L->pow(uval, term.m.exponent(o1))));
      }
      return out;
    };
    CoprimeWitness w;
    w.transform = t;
    w.variable = names[v];
    w.substitution = subst;
    w.field = L->spec();
    for (std::uint64_t i = 0; i < npts; ++i) {
      const Elem uval = i;  // distinct elements of L
      Elem r = detail::univariate_resultant(*L, slice(ft, alpha, uval), slice(gt, beta, uval));
      ++w.points_tested;
      if (r != 0) {
        w.coprime = true;
        w.eval_point = L->to_string(uval);
        w.resultant = L->to_string(r);
        return w;
      }
    }
    w.coprime = false;
    return w;
  }
  throw Error(ErrorKind::LimitExceeded, "no elimination order with full-degree leading terms");
}

/// Coprimality over F_q(a,b,c): both forms have their coefficients
/// specialized at a point of a large extension where no denominator
/// vanishes. If the images are coprime of the same degrees, so are the
/// originals (a common factor would specialize to a common factor of the
/// same positive degree). A failed specialization is inconclusive and is
/// retried; `coprime == false` then only means "not certified".
inline CoprimeWitness coprime_certificate(const RationalFunctionField& K, const HomogeneousForm<RationalFunctionField>& f,
                                          const HomogeneousForm<RationalFunctionField>& g, std::uint64_t seed = 1,
                                          unsigned attempts = 3) {
  if (f.is_zero() || g.is_zero()) throw Error(ErrorKind::ZeroInput, "coprimality of a zero form");
  FieldPtr L = K.gcd_engine().specialization_field();
  std::mt19937_64 rng(seed);
  CoprimeWitness last;
  for (unsigned a = 0; a < attempts; ++a) {
    std::vector<Elem> vals(K.nvars());
    for (auto& v : vals) v = L->random(rng);
    auto spec = [&](const HomogeneousForm<RationalFunctionField>& h) -> std::optional<HomogeneousForm<FiniteField>> {
      Polynomial<FiniteField> p;
      for (const auto& t : h.poly.terms) {
        Elem c;
        try {
          c = K.specialize(t.c, *L, vals);
        } catch (const Error&) {
          return std::nullopt;
        }
        if (c) p.terms.push_back({t.m, c});
      }
      if (p.is_zero()) return std::nullopt;
      return HomogeneousForm<FiniteField>{h.nvars, h.degree, std::move(p)};
    };
    auto fs = spec(f), gs = spec(g);
    if (!fs || !gs) continue;
    last = coprime_certificate(L, *fs, *gs);
    std::string s;
    for (unsigned i = 0; i < vals.size(); ++i) s += (i ? ", " : "") + K.names()[i] + "=" + L->to_string(vals[i]);
    last.specialization = s;
    if (last.coprime) return last;
  }
  last.coprime = false;
  return last;
}

}  // namespace geproci
