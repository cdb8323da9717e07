#pragma once

// Points, lines and point sets of P^n over a finite field.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geproci/error.hpp"
#include "geproci/field.hpp"
#include "geproci/linalg.hpp"

namespace geproci {

using Elem = FiniteField::Element;
using Coords = std::vector<Elem>;

/// A point of P^n with first nonzero coordinate equal to one. Ordering is
/// lexicographic on coordinates with elements in canonical order.
struct ProjectivePoint {
  Coords x;

  std::size_t size() const { return x.size(); }
  Elem operator[](std::size_t i) const { return x[i]; }
  friend auto operator<=>(const ProjectivePoint&, const ProjectivePoint&) = default;
};

inline ProjectivePoint normalize_point(const FiniteField& F, Coords c) {
  auto it = std::find_if(c.begin(), c.end(), [](Elem e) { return e != 0; });
  if (it == c.end()) throw Error(ErrorKind::ZeroInput, "zero vector is not a projective point");
  if (*it != 1) {
    const Elem s = F.inv(*it);
    for (auto& e : c) e = F.mul(e, s);
  }
  return {std::move(c)};
}

inline std::string point_to_string(const FiniteField& F, const ProjectivePoint& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += F.to_string(p[i]);
  }
  return s + ")";
}

/// Number of points of P^n(F_q).
inline std::uint64_t projective_space_size(std::uint64_t q, unsigned n) {
  std::uint64_t s = 0, pw = 1;
  for (unsigned i = 0; i <= n; ++i) {
    s += pw;
    if (i < n) pw = detail::checked_pow(q, i + 1);
  }
  return s;
}

/// Position of a normalized point in the canonical enumeration.
inline std::uint64_t point_index(const FiniteField& F, const ProjectivePoint& p) {
  const std::uint64_t q = F.size();
  const std::size_t n = p.size() - 1;
  std::size_t k = 0;
  while (p[k] == 0) ++k;
  std::uint64_t idx = 0;
  // blocks with more leading zeros come first
  std::uint64_t pw = 1;
  for (std::size_t kk = n; kk > k; --kk) {
    idx += pw;
    pw *= q;
  }
  std::uint64_t v = 0;
  for (std::size_t i = k + 1; i <= n; ++i) v = v * q + p[i];
  return idx + v;
}

/// A finite set of points in canonical order without duplicates.
struct PointSet {
  FieldPtr field;
  unsigned dim = 3;
  std::vector<ProjectivePoint> points;

  std::size_t size() const { return points.size(); }
  bool contains(const ProjectivePoint& p) const { return std::binary_search(points.begin(), points.end(), p); }
};

/// Sorts and removes duplicates; checks coordinate counts.
inline PointSet make_point_set(FieldPtr F, unsigned dim, std::vector<ProjectivePoint> pts) {
  for (auto& p : pts) {
    if (p.size() != dim + 1) throw Error(ErrorKind::DimensionMismatch, "point has wrong number of coordinates");
    p = normalize_point(*F, p.x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return {std::move(F), dim, std::move(pts)};
}

inline PointSet enumerate_projective_space(const FieldPtr& F, unsigned n, std::uint64_t cap = 10'000'000) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 1");
  const std::uint64_t q = F->size();
  const std::uint64_t total = projective_space_size(q, n);
  if (total > cap) throw Error(ErrorKind::TooLarge, "P^" + std::to_string(n) + " has too many points");
  PointSet out{F, n, {}};
  out.points.reserve(total);
  for (std::size_t k = n + 1; k-- > 0;) {
    // points (0,..,0,1,*,..,*) with the one in position k
    const std::size_t free = n - k;
    Coords c(n + 1, 0);
    c[k] = 1;
    std::uint64_t count = detail::checked_pow(q, static_cast<unsigned>(free));
    for (std::uint64_t v = 0; v < count; ++v) {
      std::uint64_t t = v;
      for (std::size_t i = n; i > k; --i) {
        c[i] = t % q;
        t /= q;
      }
      out.points.push_back({c});
    }
  }
  return out;
}

/// Rank of a list of coordinate vectors.
inline std::size_t coords_rank(const FiniteField& F, const std::vector<Coords>& rows) {
  if (rows.empty()) return 0;
  return rank(F, rows, rows[0].size());
}

/// Line of P^3 stored as its 2x4 reduced row echelon basis.
struct ProjectiveLine3 {
  std::array<Elem, 8> m{};

  Coords row(unsigned i) const { return Coords(m.begin() + 4 * i, m.begin() + 4 * i + 4); }
  friend auto operator<=>(const ProjectiveLine3&, const ProjectiveLine3&) = default;
};

inline ProjectiveLine3 line_from_rows(const FiniteField& F, const Coords& u, const Coords& v) {
  if (u.size() != 4 || v.size() != 4) throw Error(ErrorKind::DimensionMismatch, "lines live in P^3");
  auto r = rref(F, std::vector<Coords>{u, v}, 4);
  if (r.rank() < 2) throw Error(ErrorKind::EqualPoints, "points do not span a line");
  ProjectiveLine3 l;
  for (unsigned i = 0; i < 2; ++i)
    for (unsigned j = 0; j < 4; ++j) l.m[4 * i + j] = r.rows[i][j];
  return l;
}

inline ProjectiveLine3 line_through(const FiniteField& F, const ProjectivePoint& p, const ProjectivePoint& q) {
  return line_from_rows(F, p.x, q.x);
}

/// The q+1 points of a line, canonical order.
inline std::vector<ProjectivePoint> line_points(const FiniteField& F, const ProjectiveLine3& l) {
  std::vector<ProjectivePoint> out;
  const Coords a = l.row(0), b = l.row(1);
  out.push_back({a});
  for (Elem t = 0; t < F.size(); ++t) {
    Coords c(4);
    for (unsigned j = 0; j < 4; ++j) c[j] = F.add(F.mul(t, a[j]), b[j]);
    out.push_back(normalize_point(F, c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool line_contains(const FiniteField& F, const ProjectiveLine3& l, const ProjectivePoint& p) {
  return coords_rank(F, {l.row(0), l.row(1), p.x}) == 2;
}

inline bool lines_skew(const FiniteField& F, const ProjectiveLine3& a, const ProjectiveLine3& b) {
  return coords_rank(F, {a.row(0), a.row(1), b.row(0), b.row(1)}) == 4;
}

/// Plücker coordinates p01,p02,p03,p12,p13,p23 of a line (reporting only).
inline std::array<Elem, 6> plucker(const FiniteField& F, const ProjectiveLine3& l) {
  std::array<Elem, 6> out{};
  unsigned k = 0;
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = i + 1; j < 4; ++j)
      out[k++] = F.sub(F.mul(l.m[i], l.m[4 + j]), F.mul(l.m[j], l.m[4 + i]));
  return out;
}

inline std::string line_to_string(const FiniteField& F, const ProjectiveLine3& l) {
  std::string s;
  for (unsigned i = 0; i < 2; ++i) {
    if (i) s += " | ";
    for (unsigned j = 0; j < 4; ++j) {
      if (j) s += ",";
      s += F.to_string(l.m[4 * i + j]);
    }
  }
  return s;
}

/// Every line of PG(3,q), in canonical order, by enumerating RREF shapes.
inline std::vector<ProjectiveLine3> all_lines(const FiniteField& F) {
  const std::uint64_t q = F.size();
  if (q > 64) throw Error(ErrorKind::TooLarge, "line enumeration is limited to q <= 64");
  std::vector<ProjectiveLine3> out;
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = i + 1; j < 4; ++j) {
      // free positions: row 0 at columns > i except j; row 1 at columns > j
      std::vector<unsigned> slots;
      for (unsigned c = i + 1; c < 4; ++c)
        if (c != j) slots.push_back(c);
      for (unsigned c = j + 1; c < 4; ++c) slots.push_back(4 + c);
      const std::uint64_t count = detail::checked_pow(q, static_cast<unsigned>(slots.size()));
      for (std::uint64_t v = 0; v < count; ++v) {
        ProjectiveLine3 l;
        l.m[i] = 1;
        l.m[4 + j] = 1;
        std::uint64_t t = v;
        for (std::size_t s = slots.size(); s-- > 0;) {
          l.m[slots[s]] = t % q;
          t /= q;
        }
        out.push_back(l);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of lines of PG(3,q).
inline std::uint64_t line_count(std::uint64_t q) { return (q * q + 1) * (q * q + q + 1); }

struct CollinearSubset {
  ProjectiveLine3 line;
  std::vector<ProjectivePoint> points;
};

/// Lines containing at least k points of Z (k >= 2), each reported once, in
/// canonical line order.
inline std::vector<CollinearSubset> collinear_subsets(const PointSet& Z, std::size_t k) {
  const FiniteField& F = *Z.field;
  if (Z.dim != 3) throw Error(ErrorKind::DimensionMismatch, "collinearity scan works in P^3");
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "threshold must be at least 2");
  std::map<ProjectiveLine3, std::vector<std::size_t>> lines;
  for (std::size_t i = 0; i < Z.size(); ++i)
    for (std::size_t j = i + 1; j < Z.size(); ++j) {
      auto l = line_through(F, Z.points[i], Z.points[j]);
      auto& v = lines[l];
      if (v.empty() || v.front() == i) {
        if (v.empty()) v.push_back(i);
        v.push_back(j);
      }
    }
  std::vector<CollinearSubset> out;
  for (auto& [l, idx] : lines) {
    if (idx.size() < k) continue;
    CollinearSubset cs{l, {}};
    for (auto i : idx) cs.points.push_back(Z.points[i]);
    out.push_back(std::move(cs));
  }
  return out;
}

inline bool is_coplanar(const PointSet& Z) {
  std::vector<Coords> rows;
  for (const auto& p : Z.points) rows.push_back(p.x);
  return coords_rank(*Z.field, rows) <= Z.dim;
}

/// Z1 \ Z2.
inline PointSet set_difference(const PointSet& a, const PointSet& b) {
  PointSet out{a.field, a.dim, {}};
  std::set_difference(a.points.begin(), a.points.end(), b.points.begin(), b.points.end(),
                      std::back_inserter(out.points));
  return out;
}

}  // namespace geproci
