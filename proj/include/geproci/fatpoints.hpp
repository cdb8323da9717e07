#pragma once

// Schemes with infinitely-near points in characteristic 2: the three
// examples of nine, six and nine points, their normalized plane models,
// strange-conic tangents and line covers counted with multiplicity.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geproci/geproci.hpp"

namespace geproci {

namespace detail {

inline ProjectivePoint pt(std::initializer_list<Elem> c) { return {Coords(c)}; }

}  // namespace detail

/// e1..e4 doubled towards (1,1,1,1), plus (1,1,1,1).
inline FatPointScheme example7_scheme(const FieldPtr& F) {
  using detail::pt;
  const auto u = pt({1, 1, 1, 1});
  return make_scheme(F, 3, {u},
                     {{pt({1, 0, 0, 0}), u}, {pt({0, 1, 0, 0}), u}, {pt({0, 0, 1, 0}), u}, {pt({0, 0, 0, 1}), u}});
}

/// e1, e2, e3 doubled towards e4.
inline FatPointScheme example8_scheme(const FieldPtr& F) {
  using detail::pt;
  const auto e4 = pt({0, 0, 0, 1});
  return make_scheme(F, 3, {}, {{pt({1, 0, 0, 0}), e4}, {pt({0, 1, 0, 0}), e4}, {pt({0, 0, 1, 0}), e4}});
}

/// (1,0,0,0), (1,1,0,0), (0,1,0,0), (0,0,1,0) doubled towards e4, plus e4.
inline FatPointScheme example9_scheme(const FieldPtr& F) {
  using detail::pt;
  const auto e4 = pt({0, 0, 0, 1});
  return make_scheme(F, 3, {e4},
                     {{pt({1, 0, 0, 0}), e4}, {pt({1, 1, 0, 0}), e4}, {pt({0, 1, 0, 0}), e4}, {pt({0, 0, 1, 0}), e4}});
}

// ---------------------------------------------------------------------------
// Plane normalization

template <class Field>
using Matrix3 = std::array<std::array<typename Field::Element, 3>, 3>;

template <class Field>
std::vector<typename Field::Element> apply(const Field& K, const Matrix3<Field>& M,
                                           const std::vector<typename Field::Element>& v) {
  std::vector<typename Field::Element> out(3, K.zero());
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned j = 0; j < 3; ++j) out[i] = K.add(out[i], K.mul(M[i][j], v[j]));
  return out;
}

/// The linear map sending p1, p2, p3 to the coordinate points and p4 to
/// (1,1,1). Throws CollisionDetected if three of the points are collinear.
template <class Field>
Matrix3<Field> frame_normalization(const Field& K, const std::array<std::vector<typename Field::Element>, 4>& p) {
  // columns p1, p2, p3; solve p4 = l1 p1 + l2 p2 + l3 p3 by Cramer
  auto det3 = [&](const std::vector<typename Field::Element>& a, const std::vector<typename Field::Element>& b,
                  const std::vector<typename Field::Element>& c) {
    auto t0 = K.mul(a[0], K.sub(K.mul(b[1], c[2]), K.mul(b[2], c[1])));
    auto t1 = K.mul(b[0], K.sub(K.mul(a[1], c[2]), K.mul(a[2], c[1])));
    auto t2 = K.mul(c[0], K.sub(K.mul(a[1], b[2]), K.mul(a[2], b[1])));
    return K.add(K.sub(t0, t1), t2);
  };
  const auto D = det3(p[0], p[1], p[2]);
  if (K.is_zero(D)) throw Error(ErrorKind::CollisionDetected, "frame points are collinear");
  std::array<typename Field::Element, 3> lam{det3(p[3], p[1], p[2]), det3(p[0], p[3], p[2]), det3(p[0], p[1], p[3])};
  for (auto& l : lam) {
    if (K.is_zero(l)) throw Error(ErrorKind::CollisionDetected, "frame points are collinear");
    l = K.div(l, D);
  }
  // A has columns l_i p_i and sends e_i to l_i p_i, (1,1,1) to p4
  Matrix3<Field> A;
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned j = 0; j < 3; ++j) A[i][j] = K.mul(lam[j], p[j][i]);
  // inverse by the adjugate
  const auto dA = K.mul(K.mul(lam[0], lam[1]), K.mul(lam[2], D));
  Matrix3<Field> inv;
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned j = 0; j < 3; ++j) {
      const unsigned r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = K.div(K.sub(K.mul(A[r0][c0], A[r1][c1]), K.mul(A[r0][c1], A[r1][c0])), dA);
    }
  return inv;
}

template <class Field>
std::vector<typename Field::Element> normalize_plane_point(const Field& K, std::vector<typename Field::Element> v) {
  for (const auto& e : v)
    if (!K.is_zero(e)) {
      const auto s = K.inv(e);
      for (auto& x : v) x = K.mul(x, s);
      return v;
    }
  throw Error(ErrorKind::ZeroInput, "zero vector is not a projective point");
}

/// Applies M to every point and direction, normalizing coordinates.
template <class Field>
ProjectedScheme<Field> transform_scheme(const Field& K, const ProjectedScheme<Field>& S, const Matrix3<Field>& M,
                                        const std::string& label) {
  ProjectedScheme<Field> out;
  out.transform = label;
  for (const auto& p : S.points) {
    ImagePoint<Field> ip{normalize_plane_point(K, apply(K, M, p.coords)), {}};
    if (p.doubled()) ip.direction = normalize_plane_point(K, apply(K, M, p.direction));
    out.points.push_back(std::move(ip));
  }
  return out;
}

template <class Field>
std::vector<typename Field::Element> plane(const Field& K, std::initializer_list<long long> c) {
  std::vector<typename Field::Element> v;
  for (auto x : c) v.push_back(K.from_int(x));
  return v;
}

/// Line through two plane points as a linear form (coefficients u x v).
template <class Field>
HomogeneousForm<Field> line_form(const Field& K, const std::vector<typename Field::Element>& u,
                                 const std::vector<typename Field::Element>& v) {
  PolyOps<Field> ops(K);
  Polynomial<Field> lin;
  for (unsigned i = 0; i < 3; ++i) {
    const unsigned j = (i + 1) % 3, k = (i + 2) % 3;
    lin = ops.add(lin, ops.term(Monomial::variable(i), K.sub(K.mul(u[j], v[k]), K.mul(u[k], v[j]))));
  }
  if (lin.is_zero()) throw Error(ErrorKind::EqualPoints, "points do not span a line");
  return {3, 1, std::move(lin)};
}

template <class Field>
HomogeneousForm<Field> product(const Field& K, const HomogeneousForm<Field>& f, const HomogeneousForm<Field>& g) {
  return {f.nvars, f.degree + g.degree, PolyOps<Field>(K).mul(f.poly, g.poly)};
}

/// Plane form from (coefficient, exponents) pairs.
template <class Field>
HomogeneousForm<Field> plane_form(const Field& K, unsigned d,
                                  std::initializer_list<std::pair<typename Field::Element, std::array<unsigned, 3>>> t) {
  PolyOps<Field> ops(K);
  Polynomial<Field> p;
  for (const auto& [c, e] : t) p = ops.add(p, ops.term(Monomial::from_exponents(std::span<const unsigned>(e)), c));
  return make_form(3, d, std::move(p));
}

// ---------------------------------------------------------------------------
// Example 7: nine points, two cubics through a strange conic

/// {(0,0,1)x2, (0,1,0)x2, (1,0,0)x2, (a,b,c)x2, (1,1,1)} with every tangent
/// towards (1,1,1).
template <class Field>
ProjectedScheme<Field> example7_model(const Field& K, const typename Field::Element& a,
                                      const typename Field::Element& b, const typename Field::Element& c) {
  const auto u = plane(K, {1, 1, 1});
  ProjectedScheme<Field> S;
  S.points.push_back({plane(K, {1, 0, 0}), u});
  S.points.push_back({plane(K, {0, 1, 0}), u});
  S.points.push_back({plane(K, {0, 0, 1}), u});
  S.points.push_back({{a, b, c}, u});
  S.points.push_back({u, {}});
  return S;
}

struct Example7Image {
  ProjectedScheme<RFF> image;       // projection from the generic point
  ProjectedScheme<RFF> normalized;  // after the frame change
  std::array<RFF::Element, 3> params;  // image of (0,0,0,1) after the change
};

/// Projects the scheme from (a,b,c,1), then sends the images of e1, e2, e3
/// and (1,1,1,1) to the standard frame.
inline Example7Image example7_normalized(const RFF& K, const FatPointScheme& S, const GeneralPoint<RFF>& P) {
  Example7Image out;
  out.image = project(K, S, P);
  auto img = [&](std::initializer_list<Elem> q) {
    return project_coords(K, P.coords, embed_coords(K, Coords(q)));
  };
  const auto M = frame_normalization(K, {img({1, 0, 0, 0}), img({0, 1, 0, 0}), img({0, 0, 1, 0}), img({1, 1, 1, 1})});
  std::string label = "diag(";
  for (unsigned i = 0; i < 3; ++i) label += (i ? ", " : "") + K.to_string(M[i][i]);
  out.normalized = transform_scheme(K, out.image, M, label + ")");
  const auto e4 = normalize_plane_point(K, apply(K, M, img({0, 0, 0, 1})));
  out.params = {e4[0], e4[1], e4[2]};
  return out;
}

/// C1 u L1 and C2 u L2 with C1 = xy+xz+yz, L1 through (a,b,c) and (1,1,1),
/// L2 through (1,0,0) and (1,1,1). C2 is the conic through (0,0,1), (0,1,0)
/// and (a,b,c) tangent towards (1,1,1) at each:
/// (ab+ac+bc)x^2 + a^2(xy+xz+yz).
template <class Field>
std::pair<HomogeneousForm<Field>, HomogeneousForm<Field>> example7_cubics(const Field& K,
                                                                           const typename Field::Element& a,
                                                                           const typename Field::Element& b,
                                                                           const typename Field::Element& c) {
  const auto one = K.one();
  auto C1 = plane_form(K, 2, {{one, {1, 1, 0}}, {one, {1, 0, 1}}, {one, {0, 1, 1}}});
  const auto a2 = K.mul(a, a);
  const auto s = K.add(K.add(K.mul(a, b), K.mul(a, c)), K.mul(b, c));
  auto C2 = plane_form(K, 2, {{s, {2, 0, 0}}, {a2, {1, 1, 0}}, {a2, {1, 0, 1}}, {a2, {0, 1, 1}}});
  auto L1 = line_form(K, {a, b, c}, plane(K, {1, 1, 1}));
  auto L2 = line_form(K, plane(K, {1, 0, 0}), plane(K, {1, 1, 1}));
  return {product(K, C1, L1), product(K, C2, L2)};
}

/// The second conic as printed, cxy+bxz+ayz+(a+b+c)y^2.
template <class Field>
HomogeneousForm<Field> example7_printed_conic(const Field& K, const typename Field::Element& a,
                                              const typename Field::Element& b, const typename Field::Element& c) {
  return plane_form(K, 2, {{c, {1, 1, 0}}, {b, {1, 0, 1}}, {a, {0, 1, 1}}, {K.add(K.add(a, b), c), {0, 2, 0}}});
}

// ---------------------------------------------------------------------------
// Example 8: six points, a conic and three lines

/// {(1,0,0)x2, (0,1,0)x2, (0,0,1)x2} with tangents towards (1,1,1).
template <class Field>
ProjectedScheme<Field> example8_model(const Field& K) {
  const auto u = plane(K, {1, 1, 1});
  ProjectedScheme<Field> S;
  S.points.push_back({plane(K, {1, 0, 0}), u});
  S.points.push_back({plane(K, {0, 1, 0}), u});
  S.points.push_back({plane(K, {0, 0, 1}), u});
  return S;
}

/// A = xy+xz+yz and B = (x+y)(x+z)(y+z).
template <class Field>
std::pair<HomogeneousForm<Field>, HomogeneousForm<Field>> example8_forms(const Field& K) {
  const auto one = K.one();
  auto A = plane_form(K, 2, {{one, {1, 1, 0}}, {one, {1, 0, 1}}, {one, {0, 1, 1}}});
  auto xy = plane_form(K, 1, {{one, {1, 0, 0}}, {one, {0, 1, 0}}});
  auto xz = plane_form(K, 1, {{one, {1, 0, 0}}, {one, {0, 0, 1}}});
  auto yz = plane_form(K, 1, {{one, {0, 1, 0}}, {one, {0, 0, 1}}});
  return {A, product(K, product(K, xy, xz), yz)};
}

/// The quadric c d xy + b d xz + a d yz + a b w^2 in x, y, z, w over
/// F_2(a,b,c) with d = 1, as printed.
inline HomogeneousForm<RFF> example8_printed_quadric(const RFF& K) {
  PolyOps<RFF> ops(K);
  const auto a = K.variable(0), b = K.variable(1), c = K.variable(2);
  Polynomial<RFF> p;
  auto add = [&](RFF::Element coef, std::array<unsigned, 4> e) {
    p = ops.add(p, ops.term(Monomial::from_exponents(std::span<const unsigned>(e)), coef));
  };
  add(c, {1, 1, 0, 0});
  add(b, {1, 0, 1, 0});
  add(a, {0, 1, 1, 0});
  add(K.mul(a, b), {0, 0, 0, 2});
  return make_form(4, 2, std::move(p));
}

/// d^2 (c xy + b xz + a yz) + abc w^2 with d = 1: the quadric through the
/// scheme singular at (a,b,c,1).
inline HomogeneousForm<RFF> example8_cone(const RFF& K) {
  PolyOps<RFF> ops(K);
  const auto a = K.variable(0), b = K.variable(1), c = K.variable(2);
  Polynomial<RFF> p;
  auto add = [&](RFF::Element coef, std::array<unsigned, 4> e) {
    p = ops.add(p, ops.term(Monomial::from_exponents(std::span<const unsigned>(e)), coef));
  };
  add(c, {1, 1, 0, 0});
  add(b, {1, 0, 1, 0});
  add(a, {0, 1, 1, 0});
  add(K.mul(K.mul(a, b), c), {0, 0, 0, 2});
  return make_form(4, 2, std::move(p));
}

// ---------------------------------------------------------------------------
// Example 9: nine points on (y^2+xz)(x+az) and y^2(x+z)

/// {(1,0,0)x2, (a,0,1)x2, (0,0,1)x2, (1,1,1)x2, (0,1,0)} with tangents
/// towards (0,1,0). Throws CollisionDetected when a = 0.
template <class Field>
ProjectedScheme<Field> example9_model(const Field& K, const typename Field::Element& a) {
  if (K.is_zero(a)) throw Error(ErrorKind::CollisionDetected, "(a,0,1) coincides with (0,0,1) when a = 0");
  const auto v = plane(K, {0, 1, 0});
  ProjectedScheme<Field> S;
  S.points.push_back({plane(K, {1, 0, 0}), v});
  S.points.push_back({{a, K.zero(), K.one()}, v});
  S.points.push_back({plane(K, {0, 0, 1}), v});
  S.points.push_back({plane(K, {1, 1, 1}), v});
  S.points.push_back({v, {}});
  return S;
}

template <class Field>
std::pair<HomogeneousForm<Field>, HomogeneousForm<Field>> example9_forms(const Field& K,
                                                                          const typename Field::Element& a) {
  const auto one = K.one();
  auto q = plane_form(K, 2, {{one, {0, 2, 0}}, {one, {1, 0, 1}}});
  auto l = plane_form(K, 1, {{one, {1, 0, 0}}, {a, {0, 0, 1}}});
  auto y2 = plane_form(K, 2, {{one, {0, 2, 0}}});
  auto m = plane_form(K, 1, {{one, {1, 0, 0}}, {one, {0, 0, 1}}});
  return {product(K, q, l), product(K, y2, m)};
}

/// A certificate from explicitly given forms: both vanish on S, and the
/// coprimality witness decides the rest.
template <class Field>
GeprociCertificate<Field> certify_given(const Field& K, const ProjectedScheme<Field>& S, const HomogeneousForm<Field>& f,
                                        const HomogeneousForm<Field>& g, std::uint64_t seed = 1) {
  if (S.length() != std::size_t{f.degree} * g.degree)
    throw Error(ErrorKind::LengthMismatch, "scheme length is not the product of the degrees");
  const auto conds = conditions_of(S);
  if (!vanishes_on(K, f, conds)) throw Error(ErrorKind::NoCurveOfDegree, "given form of degree " + std::to_string(f.degree) + " misses the scheme");
  if (!vanishes_on(K, g, conds)) throw Error(ErrorKind::NoCurveOfDegree, "given form of degree " + std::to_string(g.degree) + " misses the scheme");
  GeprociCertificate<Field> c;
  c.alpha = f.degree;
  c.beta = g.degree;
  c.f = f;
  c.g = g;
  c.f_source = c.g_source = FormSource::Given;
  c.length = S.length();
  c.pairs_tried = 1;
  c.witness = certify_coprime(K, f, g, seed);
  return c;
}

// ---------------------------------------------------------------------------
// Strange conics

/// Each doubled point of S lies on the conic, its declared direction is
/// tangent there, and the tangent line passes through `focus`.
template <class Field>
bool concurrent_tangents_check(const Field& K, const HomogeneousForm<Field>& conic, const ProjectedScheme<Field>& S,
                               const std::vector<typename Field::Element>& focus) {
  using Sp = std::span<const typename Field::Element>;
  for (const auto& p : S.points) {
    if (!p.doubled()) continue;
    if (!K.is_zero(evaluate(K, conic, Sp(p.coords)))) return false;
    if (!K.is_zero(directional_derivative(K, conic, Sp(p.coords), Sp(p.direction)))) return false;
    const auto& a = p.coords;
    const auto& b = p.direction;
    const auto& c = focus;
    auto det = K.add(K.sub(K.mul(a[0], K.sub(K.mul(b[1], c[2]), K.mul(b[2], c[1]))),
                           K.mul(b[0], K.sub(K.mul(a[1], c[2]), K.mul(a[2], c[1])))),
                     K.mul(c[0], K.sub(K.mul(a[1], b[2]), K.mul(a[2], b[1]))));
    if (!K.is_zero(det)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Line covers with multiplicity

struct SchemeCover {
  std::vector<ProjectiveLine3> lines;
  bool pairwise_skew = false;
};

struct SchemeClassification {
  bool degenerate = false;  // the scheme lies in a plane
  std::optional<SchemeCover> cover_alpha;  // alpha lines, beta each
  std::optional<SchemeCover> cover_beta;   // beta lines, alpha each
  bool half_grid_cover = false;
  bool nontrivial = false;
};

/// Partitions of the scheme into `count` lines each containing `per_line`
/// of its length: a simple point counts once, a doubled point twice, and a
/// doubled point may only lie on a cover line that is its declared line.
inline std::optional<SchemeCover> scheme_line_cover(const FatPointScheme& S, std::size_t count, std::size_t per_line) {
  if (count * per_line != S.length() || per_line < 2) return std::nullopt;
  const auto& K = *S.field;
  struct Item {
    ProjectivePoint p;
    std::optional<ProjectivePoint> toward;
  };
  std::vector<Item> items;
  for (const auto& p : S.simple) items.push_back({p, std::nullopt});
  for (const auto& d : S.doubled) items.push_back({d.support, d.toward});
  // candidate lines: through two supports, or a declared line
  std::map<ProjectiveLine3, std::vector<std::size_t>> lines;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].toward) lines[line_through(K, items[i].p, *items[i].toward)];
    for (std::size_t j = i + 1; j < items.size(); ++j) lines[line_through(K, items[i].p, items[j].p)];
  }
  std::vector<ProjectiveLine3> cand;
  std::vector<std::vector<std::size_t>> members;
  for (auto& [l, v] : lines) {
    std::size_t weight = 0;
    bool ok = true;
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!line_contains(K, l, items[i].p)) continue;
      if (items[i].toward) {
        if (!line_contains(K, l, *items[i].toward)) {
          ok = false;
          break;
        }
        weight += 2;
      } else {
        weight += 1;
      }
      on.push_back(i);
    }
    if (ok && weight == per_line) {
      cand.push_back(l);
      members.push_back(std::move(on));
    }
  }
  std::vector<char> used(items.size(), 0);
  std::vector<std::size_t> chosen;
  std::optional<SchemeCover> found;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (found) return;
    if (chosen.size() == count) {
      for (auto u : used)
        if (!u) return;
      SchemeCover c;
      for (auto k : chosen) c.lines.push_back(cand[k]);
      c.pairwise_skew = true;
      for (std::size_t a = 0; a < c.lines.size(); ++a)
        for (std::size_t b = a + 1; b < c.lines.size(); ++b)
          c.pairwise_skew = c.pairwise_skew && lines_skew(K, c.lines[a], c.lines[b]);
      found = std::move(c);
      return;
    }
    for (std::size_t k = from; k < cand.size(); ++k) {
      bool free = true;
      for (auto i : members[k]) free = free && !used[i];
      if (!free) continue;
      for (auto i : members[k]) used[i] = 1;
      chosen.push_back(k);
      self(self, k + 1);
      chosen.pop_back();
      for (auto i : members[k]) used[i] = 0;
      if (found) return;
    }
  };
  rec(rec, 0);
  return found;
}

inline SchemeClassification classify_scheme(const FatPointScheme& S, unsigned alpha, unsigned beta) {
  SchemeClassification c;
  const auto& F = *S.field;
  c.degenerate = hilbert_value(F, scheme_condition_list(F, S), S.dim + 1, 1) > 0;
  c.cover_alpha = scheme_line_cover(S, alpha, beta);
  c.cover_beta = scheme_line_cover(S, beta, alpha);
  c.half_grid_cover = c.cover_alpha.has_value() != c.cover_beta.has_value();
  c.nontrivial = !c.degenerate && !(c.cover_alpha && c.cover_beta);
  return c;
}

}  // namespace geproci
