#pragma once

// Exact row reduction over a coefficient field. Over finite fields this is
// plain Gauss-Jordan; over rational function fields rows are kept as
// polynomial vectors and reduced fraction-free, and fractions only appear in
// the final normalization.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "geproci/field.hpp"
#include "geproci/rational_function.hpp"

namespace geproci {

template <class Field>
using Row = std::vector<typename Field::Element>;

template <class Field>
struct RrefResult {
  std::vector<Row<Field>> rows;  // rank rows, pivot entries equal to one
  std::vector<std::size_t> pivots;
  std::size_t cols = 0;

  std::size_t rank() const { return pivots.size(); }
  std::size_t nullity() const { return cols - pivots.size(); }
};

namespace detail {

template <class Field>
std::size_t element_cost(const Field&, const typename Field::Element&) {
  return 0;
}

inline std::size_t element_cost(const RationalFunctionField&, const RationalFunctionField::Element& e) {
  return e.num.size() + e.den.size();
}

template <class Field>
RrefResult<Field> rref_gauss_jordan(const Field& K, std::vector<Row<Field>> m, std::size_t cols) {
  RrefResult<Field> res;
  res.cols = cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t best = m.size();
    std::size_t best_cost = ~std::size_t{0};
    for (std::size_t i = r; i < m.size(); ++i) {
      if (K.is_zero(m[i][c])) continue;
      std::size_t cost = element_cost(K, m[i][c]);
      if (best == m.size() || cost < best_cost) {
        best = i;
        best_cost = cost;
        if (cost == 0) break;
      }
    }
    if (best == m.size()) continue;
    std::swap(m[r], m[best]);
    const auto pinv = K.inv(m[r][c]);
    for (std::size_t j = c; j < cols; ++j)
      if (!K.is_zero(m[r][j])) m[r][j] = K.mul(m[r][j], pinv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || K.is_zero(m[i][c])) continue;
      const auto f = m[i][c];
      for (std::size_t j = c; j < cols; ++j)
        if (!K.is_zero(m[r][j])) m[i][j] = K.sub(m[i][j], K.mul(f, m[r][j]));
    }
    res.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  res.rows = std::move(m);
  return res;
}

using RationalRows = std::vector<std::vector<RationalFunctionField::Poly>>;

inline void remove_content(const RationalFunctionField& K, std::vector<RationalFunctionField::Poly>& row) {
  std::vector<std::size_t> nz;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (!row[j].is_zero()) nz.push_back(j);
  if (nz.empty()) return;
  std::sort(nz.begin(), nz.end(), [&](std::size_t x, std::size_t y) { return row[x].size() < row[y].size(); });
  auto g = row[nz[0]];
  for (std::size_t k = 1; k < nz.size() && !g.is_constant(); ++k) g = K.gcd_engine().gcd(g, row[nz[k]]);
  if (g.is_constant()) return;
  for (auto j : nz) row[j] = K.poly_ops().div_exact(row[j], g);
}

/// Rows over F_q[v]: each row scaled by the lcm of its denominators and
/// divided by the gcd of its entries; zero rows dropped.
inline RationalRows polynomial_rows(const RationalFunctionField& K, std::vector<Row<RationalFunctionField>> m,
                                    std::size_t cols) {
  using Poly = RationalFunctionField::Poly;
  const auto& ops = K.poly_ops();
  PolyGcd& gcd = K.gcd_engine();
  RationalRows rows;
  rows.reserve(m.size());
  for (auto& row : m) {
    Poly l = ops.constant(1);
    for (const auto& e : row) {
      if (K.is_zero(e) || e.den.is_constant()) continue;
      Poly g = gcd.gcd(l, e.den);
      l = ops.mul(l, ops.div_exact(e.den, g));
    }
    std::vector<Poly> pr(cols);
    bool nonzero = false;
    for (std::size_t j = 0; j < cols; ++j) {
      if (K.is_zero(row[j])) continue;
      pr[j] = ops.mul(row[j].num, ops.div_exact(l, row[j].den));
      nonzero = true;
    }
    if (nonzero) rows.push_back(std::move(pr));
  }
  for (auto& row : rows) remove_content(K, row);
  return rows;
}

inline void check_budget(const std::vector<RationalFunctionField::Poly>& row, std::size_t term_budget) {
  if (!term_budget) return;
  for (const auto& e : row)
    if (e.size() > term_budget)
      throw Error(ErrorKind::LimitExceeded, "elimination entry exceeds " + std::to_string(term_budget) + " terms");
}

/// Row with a nonzero entry in column c and the fewest terms overall.
inline std::size_t cheapest_pivot(const RationalRows& rows, std::size_t from, std::size_t c) {
  std::size_t best = rows.size(), best_cost = ~std::size_t{0};
  for (std::size_t i = from; i < rows.size(); ++i) {
    if (rows[i][c].is_zero()) continue;
    std::size_t cost = 0;
    for (const auto& e : rows[i]) cost += e.size();
    if (cost < best_cost) {
      best = i;
      best_cost = cost;
    }
  }
  return best;
}

/// Fraction-free Gauss-Jordan (Bareiss): after k pivots every entry is a
/// minor of order k or k+1, so dividing by the previous pivot is exact and
/// entry degrees stay bounded by the minor sizes. On return the first
/// rank rows all carry the last pivot on their pivot column.
inline std::vector<std::size_t> bareiss_jordan(const RationalFunctionField& K, RationalRows& rows, std::size_t cols,
                                               std::size_t term_budget) {
  using Poly = RationalFunctionField::Poly;
  const auto& ops = K.poly_ops();
  std::vector<std::size_t> pivots;
  Poly prev = ops.constant(1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    const std::size_t best = cheapest_pivot(rows, r, c);
    if (best == rows.size()) continue;
    std::swap(rows[r], rows[best]);
    const Poly piv = rows[r][c];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      const Poly f = rows[i][c];
      for (std::size_t j = 0; j < cols; ++j) {
        if (j == c) {
          rows[i][j] = Poly{};
          continue;
        }
        const bool has_i = !rows[i][j].is_zero(), has_r = !f.is_zero() && !rows[r][j].is_zero();
        if (!has_i && !has_r) continue;
        Poly v = has_i ? ops.mul(piv, rows[i][j]) : Poly{};
        if (has_r) v = ops.sub(v, ops.mul(f, rows[r][j]));
        rows[i][j] = ops.div_exact(v, prev);
      }
      check_budget(rows[i], term_budget);
    }
    prev = piv;
    pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  return pivots;
}

/// Indices of rows that stay independent at a pseudo-random point of a large
/// extension of F_q; such rows are independent over F_q(v) as well.
inline std::vector<std::size_t> independent_at_a_point(const RationalFunctionField& K, const RationalRows& rows,
                                                       std::size_t cols) {
  const FiniteField& L = *K.gcd_engine().specialization_field();
  const PolyOps<FiniteField> lops(L);  // F_q coefficients are elements of L as they stand
  std::mt19937_64 rng(0x5eed'1eadu);
  std::vector<FiniteField::Element> pt(K.nvars());
  for (auto& x : pt) x = L.random(rng);
  std::vector<std::vector<FiniteField::Element>> basis;
  std::vector<std::size_t> lead, keep;
  for (std::size_t i = 0; i < rows.size() && basis.size() < cols; ++i) {
    std::vector<FiniteField::Element> v(cols);
    for (std::size_t j = 0; j < cols; ++j) v[j] = lops.eval(rows[i][j], std::span<const FiniteField::Element>(pt));
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const auto f = v[lead[b]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) v[j] = L.sub(v[j], L.mul(f, basis[b][j]));
    }
    std::size_t c = 0;
    while (c < cols && v[c] == 0) ++c;
    if (c == cols) continue;
    const auto inv = L.inv(v[c]);
    for (auto& x : v) x = L.mul(x, inv);
    basis.push_back(std::move(v));
    lead.push_back(c);
    keep.push_back(i);
  }
  return keep;
}

inline RrefResult<RationalFunctionField> rref_rational(const RationalFunctionField& K,
                                                       std::vector<Row<RationalFunctionField>> m,
                                                       std::size_t cols, std::size_t term_budget) {
  auto rows = polynomial_rows(K, std::move(m), cols);
  RrefResult<RationalFunctionField> res;
  res.cols = cols;
  res.pivots = bareiss_jordan(K, rows, cols, term_budget);
  const std::size_t r = res.pivots.size();
  res.rows.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    const auto& piv = rows[i][res.pivots[i]];
    res.rows[i].assign(cols, K.zero());
    for (std::size_t j = 0; j < cols; ++j) {
      if (rows[i][j].is_zero()) continue;
      res.rows[i][j] = (j == res.pivots[i]) ? K.one() : K.fraction(rows[i][j], piv);
    }
  }
  return res;
}

}  // namespace detail

/// Reduced row echelon form; pivot columns are the first independent columns.
/// Over rational function fields a nonzero `term_budget` caps the size of
/// intermediate polynomial entries (LimitExceeded when crossed).
template <class Field>
RrefResult<Field> rref(const Field& K, std::vector<Row<Field>> m, std::size_t cols, std::size_t term_budget = 0) {
  for (auto& row : m)
    if (row.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged matrix");
  if constexpr (std::is_same_v<Field, RationalFunctionField>) {
    try {
      return detail::rref_rational(K, std::move(m), cols, term_budget);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TooLarge || !term_budget) throw;
      throw Error(ErrorKind::LimitExceeded, "elimination degree overflow");
    }
  }
  else
    return detail::rref_gauss_jordan(K, std::move(m), cols);
}

template <class Field>
std::size_t rank(const Field& K, std::vector<Row<Field>> m, std::size_t cols) {
  return rref(K, std::move(m), cols).rank();
}

/// Nullspace basis from an RREF: one vector per free column, with a one in
/// that column and zeros in the other free columns.
template <class Field>
std::vector<Row<Field>> nullspace(const Field& K, const RrefResult<Field>& r) {
  std::vector<bool> is_pivot(r.cols, false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<Row<Field>> out;
  for (std::size_t j = 0; j < r.cols; ++j) {
    if (is_pivot[j]) continue;
    Row<Field> v(r.cols, K.zero());
    v[j] = K.one();
    for (std::size_t k = 0; k < r.rows.size(); ++k)
      if (!K.is_zero(r.rows[k][j])) v[r.pivots[k]] = K.neg(r.rows[k][j]);
    out.push_back(std::move(v));
  }
  return out;
}

/// Nullspace over F_q(v) with polynomial entries: for each free column j the
/// vector with the common pivot d in column j and -R[k][j] in pivot column
/// k, where R is the fraction-free echelon form, divided by its content.
inline std::vector<Row<RationalFunctionField>> nullspace_fraction_free(const RationalFunctionField& K,
                                                                      std::vector<Row<RationalFunctionField>> m,
                                                                      std::size_t cols, std::size_t term_budget = 0) {
  for (auto& row : m)
    if (row.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged matrix");
  const auto& ops = K.poly_ops();
  using Poly = RationalFunctionField::Poly;
  // eliminate on the rows independent at a point; the kernel found is the
  // full kernel once it also annihilates the remaining rows
  auto solve = [&](const detail::RationalRows& all, bool select) -> std::optional<std::vector<std::vector<Poly>>> {
    detail::RationalRows rows;
    std::vector<bool> used(all.size(), !select);
    if (select) {
      for (auto i : detail::independent_at_a_point(K, all, cols)) {
        rows.push_back(all[i]);
        used[i] = true;
      }
    } else {
      rows = all;
    }
    const auto pivots = detail::bareiss_jordan(K, rows, cols, term_budget);
    const auto d = pivots.empty() ? ops.constant(1) : rows[pivots.size() - 1][pivots.back()];
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Poly>> out;
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_pivot[j]) continue;
      std::vector<Poly> w(cols);
      w[j] = d;
      for (std::size_t k = 0; k < pivots.size(); ++k) w[pivots[k]] = ops.neg(rows[k][j]);
      detail::remove_content(K, w);
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (used[i]) continue;
        Poly s;
        for (std::size_t k = 0; k < cols; ++k)
          if (!w[k].is_zero() && !all[i][k].is_zero()) s = ops.add(s, ops.mul(all[i][k], w[k]));
        if (!s.is_zero()) return std::nullopt;
      }
      out.push_back(std::move(w));
    }
    return out;
  };
  std::optional<std::vector<std::vector<Poly>>> ws;
  try {
    const auto all = detail::polynomial_rows(K, std::move(m), cols);
    ws = solve(all, true);
    if (!ws) ws = solve(all, false);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TooLarge || !term_budget) throw;
    throw Error(ErrorKind::LimitExceeded, "elimination degree overflow");
  }
  std::vector<Row<RationalFunctionField>> out;
  for (auto& w : *ws) {
    Row<RationalFunctionField> v(cols, K.zero());
    for (std::size_t k = 0; k < cols; ++k)
      if (!w[k].is_zero()) v[k] = K.from_poly(std::move(w[k]));
    out.push_back(std::move(v));
  }
  return out;
}

/// Determinant by elimination.
template <class Field>
typename Field::Element determinant(const Field& K, std::vector<Row<Field>> m) {
  const std::size_t n = m.size();
  auto det = K.one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && K.is_zero(m[p][c])) ++p;
    if (p == n) return K.zero();
    if (p != c) {
      std::swap(m[p], m[c]);
      det = K.neg(det);
    }
    det = K.mul(det, m[c][c]);
    const auto pinv = K.inv(m[c][c]);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (K.is_zero(m[i][c])) continue;
      const auto f = K.mul(m[i][c], pinv);
      for (std::size_t j = c; j < n; ++j) m[i][j] = K.sub(m[i][j], K.mul(f, m[c][j]));
    }
  }
  return det;
}

}  // namespace geproci
