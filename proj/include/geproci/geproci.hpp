#pragma once

// Projection from a general point, plane-curve interpolation, complete
// intersection certificates, the Frobenius cone, unexpected cones and the
// combinatorial classification of geproci sets.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geproci/error.hpp"
#include "geproci/field.hpp"
#include "geproci/forms.hpp"
#include "geproci/linalg.hpp"
#include "geproci/projective.hpp"
#include "geproci/rational_function.hpp"

namespace geproci {

using RFF = RationalFunctionField;

// ---------------------------------------------------------------------------
// Coefficient fields

/// Elements of F_q inside a working field: extensions keep packed values,
/// the function field takes constants.
inline Elem embed(const FiniteField&, Elem e) { return e; }
inline RFF::Element embed(const RFF& K, Elem e) { return K.constant(e); }

template <class Field>
std::vector<typename Field::Element> embed_coords(const Field& K, const Coords& c) {
  std::vector<typename Field::Element> out;
  out.reserve(c.size());
  for (auto e : c) out.push_back(embed(K, e));
  return out;
}

inline CoprimeWitness certify_coprime(const FiniteField& K, const HomogeneousForm<FiniteField>& f,
                                      const HomogeneousForm<FiniteField>& g, std::uint64_t) {
  return coprime_certificate(K.ptr(), f, g);
}
inline CoprimeWitness certify_coprime(const RFF& K, const HomogeneousForm<RFF>& f, const HomogeneousForm<RFF>& g,
                                      std::uint64_t seed) {
  return coprime_certificate(K, f, g, seed);
}

template <class Field>
typename Field::Element power(const Field& K, typename Field::Element x, std::uint64_t e) {
  auto r = K.one();
  while (e) {
    if (e & 1) r = K.mul(r, x);
    e >>= 1;
    if (e) x = K.mul(x, x);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Schemes

/// A point together with the infinitely-near point along the line towards
/// `toward`.
struct DoubledPoint {
  ProjectivePoint support;
  ProjectivePoint toward;
  friend auto operator<=>(const DoubledPoint&, const DoubledPoint&) = default;
};

/// Simple points plus doubled points; length #simple + 2 #doubled.
struct FatPointScheme {
  FieldPtr field;
  unsigned dim = 3;
  std::vector<ProjectivePoint> simple;
  std::vector<DoubledPoint> doubled;

  std::size_t length() const { return simple.size() + 2 * doubled.size(); }
  bool reduced() const { return doubled.empty(); }
};

inline FatPointScheme make_scheme(FieldPtr F, unsigned dim, std::vector<ProjectivePoint> simple,
                                  std::vector<DoubledPoint> doubled) {
  const auto& K = *F;
  for (auto& p : simple) {
    if (p.size() != dim + 1) throw Error(ErrorKind::DimensionMismatch, "point has wrong number of coordinates");
    p = normalize_point(K, p.x);
  }
  for (auto& d : doubled) {
    if (d.support.size() != dim + 1 || d.toward.size() != dim + 1)
      throw Error(ErrorKind::DimensionMismatch, "point has wrong number of coordinates");
    d.support = normalize_point(K, d.support.x);
    d.toward = normalize_point(K, d.toward.x);
    if (d.support == d.toward) throw Error(ErrorKind::EqualPoints, "doubled point needs a direction distinct from its support");
  }
  std::sort(simple.begin(), simple.end());
  simple.erase(std::unique(simple.begin(), simple.end()), simple.end());
  std::sort(doubled.begin(), doubled.end());
  std::vector<ProjectivePoint> supports;
  for (const auto& d : doubled) supports.push_back(d.support);
  for (std::size_t i = 1; i < supports.size(); ++i)
    if (supports[i] == supports[i - 1]) throw Error(ErrorKind::InvalidArgument, "support doubled twice");
  for (const auto& p : simple)
    if (std::binary_search(supports.begin(), supports.end(), p))
      throw Error(ErrorKind::InvalidArgument, "point listed as simple and doubled");
  return {std::move(F), dim, std::move(simple), std::move(doubled)};
}

inline FatPointScheme scheme_of(const PointSet& Z) { return {Z.field, Z.dim, Z.points, {}}; }

/// Value conditions at every support and derivative conditions along each
/// doubled point's line, over a working field containing F_q.
template <class Field>
std::vector<Condition<Field>> scheme_condition_list(const Field& K, const FatPointScheme& S) {
  std::vector<Condition<Field>> out;
  for (const auto& p : S.simple) out.push_back({embed_coords(K, p.x), {}});
  for (const auto& d : S.doubled) {
    out.push_back({embed_coords(K, d.support.x), {}});
    out.push_back({embed_coords(K, d.support.x), embed_coords(K, d.toward.x)});
  }
  return out;
}

/// One row per simple point, two per doubled point, degree-d monomials of
/// P^dim as columns.
template <class Field>
EvaluationMatrix<Field> scheme_conditions(const Field& K, const FatPointScheme& S, unsigned d) {
  return evaluation_matrix(K, scheme_condition_list(K, S), S.dim + 1, d);
}

/// dim [I(S)]_d over the field of definition.
inline std::size_t hilbert_value(const FatPointScheme& S, unsigned d) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "degree must be at least 1");
  return hilbert_value(*S.field, scheme_condition_list(*S.field, S), S.dim + 1, d);
}

inline std::size_t hilbert_value(const PointSet& Z, unsigned d) { return hilbert_value(scheme_of(Z), d); }

// ---------------------------------------------------------------------------
// General points and projection

enum class Mode { Generic, Random };

inline std::string mode_name(Mode m) { return m == Mode::Generic ? "generic" : "random"; }

/// (a,b,c,1): independent variables of F_q(a,b,c) in generic mode, or a
/// seeded sample of F_{q^m} in random mode.
template <class Field>
struct GeneralPoint {
  Mode mode = Mode::Generic;
  std::vector<typename Field::Element> coords;
  std::uint64_t seed = 0;
  unsigned m = 0;  // extension degree in random mode
};

/// F_q(a,b,c) for the generic point of P^3 over F_q.
inline RFF generic_field(const FieldPtr& F) { return RFF(F, 3, {"a", "b", "c"}); }

inline GeneralPoint<RFF> generic_point(const RFF& K) {
  return {Mode::Generic, {K.variable(0), K.variable(1), K.variable(2), K.one()}, 0, 0};
}

/// A point (a,b,c,1) of P^3(L) not defined over F_q.
inline GeneralPoint<FiniteField> random_point(const FiniteField& L, std::uint64_t q, std::mt19937_64& rng,
                                              std::uint64_t seed, unsigned m) {
  for (;;) {
    std::vector<Elem> c{L.random(rng), L.random(rng), L.random(rng), 1};
    if (c[0] >= q || c[1] >= q || c[2] >= q) return {Mode::Random, std::move(c), seed, m};
  }
}

/// A plane point, optionally doubled along the line towards `direction`.
template <class Field>
struct ImagePoint {
  std::vector<typename Field::Element> coords;
  std::vector<typename Field::Element> direction;

  bool doubled() const { return !direction.empty(); }
};

template <class Field>
struct ProjectedScheme {
  std::vector<ImagePoint<Field>> points;
  std::string transform;  // description of any normalization applied

  std::size_t length() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.doubled() ? 2 : 1;
    return n;
  }
};

template <class Field>
std::vector<Condition<Field>> conditions_of(const ProjectedScheme<Field>& S) {
  std::vector<Condition<Field>> out;
  for (const auto& p : S.points) {
    out.push_back({p.coords, {}});
    if (p.doubled()) out.push_back({p.coords, p.direction});
  }
  return out;
}

/// Q -> (q0 - a q3, q1 - b q3, q2 - c q3) for P = (a,b,c,1), the projection
/// to the plane w = 0.
template <class Field>
std::vector<typename Field::Element> project_coords(const Field& K, const std::vector<typename Field::Element>& P,
                                                    const std::vector<typename Field::Element>& Q) {
  std::vector<typename Field::Element> out(3);
  for (unsigned i = 0; i < 3; ++i) out[i] = K.sub(Q[i], K.mul(P[i], Q[3]));
  return out;
}

/// Images in the plane w = 0 of every point and tangent direction of S.
/// Throws CollisionDetected when two supports meet or a tangent line passes
/// through P, which means P was not general for S.
template <class Field>
ProjectedScheme<Field> project(const Field& K, const FatPointScheme& S, const GeneralPoint<Field>& P) {
  if (S.dim != 3) throw Error(ErrorKind::DimensionMismatch, "projection works from P^3");
  if (P.coords.size() != 4 || !K.eq(P.coords[3], K.one()))
    throw Error(ErrorKind::InvalidArgument, "general point must have the form (a,b,c,1)");
  ProjectedScheme<Field> out;
  for (const auto& p : S.simple) out.points.push_back({project_coords(K, P.coords, embed_coords(K, p.x)), {}});
  for (const auto& d : S.doubled) {
    ImagePoint<Field> ip{project_coords(K, P.coords, embed_coords(K, d.support.x)),
                         project_coords(K, P.coords, embed_coords(K, d.toward.x))};
    if (detail::vectors_dependent(K, std::span<const typename Field::Element>(ip.coords),
                                  std::span<const typename Field::Element>(ip.direction)))
      throw Error(ErrorKind::CollisionDetected, "tangent line passes through the centre of projection");
    out.points.push_back(std::move(ip));
  }
  for (std::size_t i = 0; i < out.points.size(); ++i)
    for (std::size_t j = i + 1; j < out.points.size(); ++j)
      if (detail::vectors_dependent(K, std::span<const typename Field::Element>(out.points[i].coords),
                                    std::span<const typename Field::Element>(out.points[j].coords)))
        throw Error(ErrorKind::CollisionDetected, "two points have the same image");
  return out;
}

/// Kernel of all point and tangent conditions of S in degree d.
template <class Field>
KernelBasis<Field> interpolate_curve(const Field& K, const ProjectedScheme<Field>& S, unsigned d,
                                     std::size_t term_budget = 0) {
  return kernel_of_conditions(K, evaluation_matrix(K, conditions_of(S), 3, d), term_budget);
}

/// Whether f satisfies every condition of the scheme.
template <class Field>
bool vanishes_on(const Field& K, const HomogeneousForm<Field>& f, const std::vector<Condition<Field>>& conds) {
  for (const auto& c : conds) {
    auto pt = std::span<const typename Field::Element>(c.point);
    auto v = c.is_derivative() ? directional_derivative(K, f, pt, std::span<const typename Field::Element>(c.direction))
                               : evaluate(K, f, pt);
    if (!K.is_zero(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Complete intersection certificates

enum class FormSource { Kernel, LineCover, FrobeniusCone, ConeKernel, Given };

inline std::string source_name(FormSource s) {
  switch (s) {
    case FormSource::Kernel: return "kernel";
    case FormSource::LineCover: return "line-cover";
    case FormSource::FrobeniusCone: return "frobenius-cone";
    case FormSource::ConeKernel: return "cone-kernel";
    case FormSource::Given: return "given";
  }
  return "?";
}

template <class Field>
struct CandidateForms {
  std::vector<HomogeneousForm<Field>> forms;
  FormSource source = FormSource::Kernel;
  std::optional<std::size_t> kernel_dim;  // unset when elimination was abandoned
};

template <class Field>
struct GeprociCertificate {
  unsigned alpha = 0, beta = 0;
  HomogeneousForm<Field> f, g;
  FormSource f_source = FormSource::Kernel, g_source = FormSource::Kernel;
  std::optional<std::size_t> f_kernel_dim, g_kernel_dim;
  CoprimeWitness witness;
  std::size_t length = 0;
  std::size_t pairs_tried = 0;
};

template <class Field>
struct CertifyOptions {
  std::size_t term_budget = 300;  // function-field elimination only
  std::size_t max_pairs = 64;
  std::uint64_t seed = 1;
  /// Forms of the given degree known to vanish on the scheme, used when
  /// elimination is abandoned.
  std::function<CandidateForms<Field>(unsigned)> fallback;
};

namespace detail {

template <class Field>
CandidateForms<Field> candidates(const Field& K, const ProjectedScheme<Field>& S, unsigned d,
                                 const CertifyOptions<Field>& opt) {
  CandidateForms<Field> c;
  try {
    auto B = interpolate_curve(K, S, d, opt.term_budget);
    c.kernel_dim = B.dimension();
    c.forms = std::move(B.forms);
    if (c.forms.empty()) throw Error(ErrorKind::NoCurveOfDegree, "no curve of degree " + std::to_string(d));
    return c;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::LimitExceeded || !opt.fallback) throw;
    c = opt.fallback(d);
    if (c.forms.empty()) throw;
    return c;
  }
}

/// Basis forms, then f_0 + c f_i for i >= 1 and c over the nonzero prime
/// field elements.
template <class Field>
std::vector<HomogeneousForm<Field>> with_combinations(const Field& K, const std::vector<HomogeneousForm<Field>>& B,
                                                      std::size_t cap) {
  std::vector<HomogeneousForm<Field>> out = B;
  PolyOps<Field> ops(K);
  const std::uint32_t p = K.characteristic();
  for (std::size_t i = 1; i < B.size() && out.size() < cap; ++i)
    for (std::uint32_t c = 1; c < p && out.size() < cap; ++c)
      out.push_back({B[0].nvars, B[0].degree, ops.add(B[0].poly, ops.scale(B[i].poly, K.from_int(c)))});
  return out;
}

}  // namespace detail

/// Forms f of degree alpha and g of degree beta vanishing on S with a
/// coprimality witness. Since S has length alpha*beta and lies in V(f,g),
/// Bezout makes S equal to the complete intersection.
template <class Field>
GeprociCertificate<Field> certify_complete_intersection(const Field& K, const ProjectedScheme<Field>& S, unsigned alpha,
                                                        unsigned beta, const CertifyOptions<Field>& opt = {}) {
  if (alpha == 0 || beta == 0) throw Error(ErrorKind::InvalidArgument, "degrees must be positive");
  if (S.length() != std::size_t{alpha} * beta)
    throw Error(ErrorKind::LengthMismatch, "scheme length " + std::to_string(S.length()) + " is not " +
                                               std::to_string(alpha) + "*" + std::to_string(beta));
  auto A = detail::candidates(K, S, alpha, opt);
  auto B = alpha == beta ? A : detail::candidates(K, S, beta, opt);
  GeprociCertificate<Field> cert;
  cert.alpha = alpha;
  cert.beta = beta;
  cert.length = S.length();
  cert.f_source = A.source;
  cert.g_source = B.source;
  cert.f_kernel_dim = A.kernel_dim;
  cert.g_kernel_dim = B.kernel_dim;

  // basis pairs first, then pairs involving combinations
  const auto fa = detail::with_combinations(K, A.forms, 8), gb = detail::with_combinations(K, B.forms, 8);
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t i = 0; i < A.forms.size(); ++i)
    for (std::size_t j = 0; j < B.forms.size(); ++j) order.emplace_back(i, j);
  for (std::size_t i = 0; i < fa.size(); ++i)
    for (std::size_t j = 0; j < gb.size(); ++j)
      if (i >= A.forms.size() || j >= B.forms.size()) order.emplace_back(i, j);
  for (const auto& [i, j] : order) {
    if (cert.pairs_tried >= opt.max_pairs) break;
    if (alpha == beta && i == j) continue;
    ++cert.pairs_tried;
    auto w = certify_coprime(K, fa[i], gb[j], opt.seed);
    if (w.coprime) {
      cert.f = fa[i];
      cert.g = gb[j];
      cert.witness = std::move(w);
      return cert;
    }
  }
  throw Error(ErrorKind::AllPairsShareComponent,
              "no coprime pair among " + std::to_string(cert.pairs_tried) + " candidate pairs");
}

/// Independent re-check: both forms vanish on every condition, have the
/// declared degrees, the lengths multiply out, and coprimality re-verifies.
template <class Field>
bool verify_certificate(const Field& K, const ProjectedScheme<Field>& S, const GeprociCertificate<Field>& c) {
  if (c.f.degree != c.alpha || c.g.degree != c.beta) return false;
  if (c.f.is_zero() || c.g.is_zero()) return false;
  if (S.length() != std::size_t{c.alpha} * c.beta || c.length != S.length()) return false;
  const auto conds = conditions_of(S);
  if (!vanishes_on(K, c.f, conds) || !vanishes_on(K, c.g, conds)) return false;
  return certify_coprime(K, c.f, c.g, 1).coprime;
}

// ---------------------------------------------------------------------------
// Line covers and classification

/// Sets of `count` pairwise-skew lines, each containing exactly `per_line`
/// points of Z, that partition Z. At most `limit` covers are returned.
inline std::vector<std::vector<ProjectiveLine3>> skew_line_covers(const PointSet& Z, std::size_t count,
                                                                  std::size_t per_line, std::size_t limit = 1) {
  std::vector<std::vector<ProjectiveLine3>> out;
  if (count * per_line != Z.size() || per_line < 2 || limit == 0) return out;
  const auto& K = *Z.field;
  std::vector<CollinearSubset> cand;
  for (auto& cs : collinear_subsets(Z, per_line))
    if (cs.points.size() == per_line) cand.push_back(std::move(cs));
  // point -> candidate lines
  std::vector<std::vector<std::size_t>> at(Z.size());
  std::vector<std::vector<std::size_t>> members(cand.size());
  for (std::size_t l = 0; l < cand.size(); ++l)
    for (const auto& p : cand[l].points) {
      const auto i = static_cast<std::size_t>(std::lower_bound(Z.points.begin(), Z.points.end(), p) - Z.points.begin());
      at[i].push_back(l);
      members[l].push_back(i);
    }
  std::vector<char> covered(Z.size(), 0);
  std::vector<std::size_t> chosen;
  auto usable = [&](std::size_t l) {
    for (auto i : members[l])
      if (covered[i]) return false;
    for (auto c : chosen)
      if (!lines_skew(K, cand[c].line, cand[l].line)) return false;
    return true;
  };
  auto rec = [&](auto&& self) -> void {
    if (out.size() >= limit) return;
    std::size_t best = Z.size(), best_n = ~std::size_t{0};
    for (std::size_t i = 0; i < Z.size(); ++i) {
      if (covered[i]) continue;
      std::size_t n = 0;
      for (auto l : at[i]) n += usable(l);
      if (n < best_n) {
        best_n = n;
        best = i;
      }
    }
    if (best == Z.size()) {
      std::vector<ProjectiveLine3> lines;
      for (auto c : chosen) lines.push_back(cand[c].line);
      std::sort(lines.begin(), lines.end());
      out.push_back(std::move(lines));
      return;
    }
    if (best_n == 0) return;
    for (auto l : at[best]) {
      if (!usable(l)) continue;
      for (auto i : members[l]) covered[i] = 1;
      chosen.push_back(l);
      self(self);
      chosen.pop_back();
      for (auto i : members[l]) covered[i] = 0;
      if (out.size() >= limit) return;
    }
  };
  rec(rec);
  return out;
}

struct Classification {
  bool degenerate = false;  // Z lies in a plane
  bool grid = false;
  bool half_grid_cover = false;  // a skew cover exists on some side but no grid
  bool nontrivial = false;       // neither degenerate nor a grid
  std::optional<std::vector<ProjectiveLine3>> cover_alpha;  // alpha lines of beta points
  std::optional<std::vector<ProjectiveLine3>> cover_beta;   // beta lines of alpha points
  std::size_t collinear_alpha = 0;  // lines with at least alpha points of Z
  std::size_t collinear_beta = 0;   // lines with at least beta points of Z
};

/// Combinatorial type of Z with respect to the degrees {alpha, beta}. Both
/// orientations of the cover are searched and reported.
inline Classification classify(const PointSet& Z, unsigned alpha, unsigned beta, std::size_t grid_cover_limit = 512) {
  if (Z.dim != 3) throw Error(ErrorKind::DimensionMismatch, "classification works in P^3");
  Classification c;
  c.degenerate = is_coplanar(Z);
  if (alpha >= 2) c.collinear_alpha = collinear_subsets(Z, alpha).size();
  if (beta >= 2) c.collinear_beta = collinear_subsets(Z, beta).size();
  auto A = skew_line_covers(Z, alpha, beta, 1);
  auto B = skew_line_covers(Z, beta, alpha, 1);
  if (!A.empty()) c.cover_alpha = A.front();
  if (!B.empty()) c.cover_beta = B.front();
  if (!A.empty() && !B.empty()) {
    const auto& K = *Z.field;
    auto all_a = skew_line_covers(Z, alpha, beta, grid_cover_limit);
    auto all_b = skew_line_covers(Z, beta, alpha, grid_cover_limit);
    for (const auto& ca : all_a) {
      for (const auto& cb : all_b) {
        bool ok = true;
        for (const auto& la : ca) {
          for (const auto& lb : cb)
            if (lines_skew(K, la, lb)) {
              ok = false;
              break;
            }
          if (!ok) break;
        }
        if (ok) {
          c.grid = true;
          c.cover_alpha = ca;
          c.cover_beta = cb;
          break;
        }
      }
      if (c.grid) break;
    }
  }
  c.half_grid_cover = (c.cover_alpha || c.cover_beta) && !c.grid;
  c.nontrivial = !c.degenerate && !c.grid;
  return c;
}

// ---------------------------------------------------------------------------
// Frobenius cone

/// det of the rows P, P^q, X, X^q with X = (x,y,z,w), expanded by Laplace
/// along the first two rows. A form of degree q+1 in four variables.
template <class Field>
HomogeneousForm<Field> frobenius_cone(const Field& K, const std::vector<typename Field::Element>& P, std::uint64_t q) {
  if (P.size() != 4) throw Error(ErrorKind::DimensionMismatch, "vertex must be a point of P^3");
  PolyOps<Field> ops(K);
  std::vector<typename Field::Element> Pq;
  for (const auto& e : P) Pq.push_back(power(K, e, q));
  const auto qd = static_cast<unsigned>(q);
  auto xq = [&](unsigned i) { return ops.term(Monomial::variable(i, qd), K.one()); };
  Polynomial<Field> F;
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = i + 1; j < 4; ++j) {
      // complement columns k < l
      std::vector<unsigned> rest;
      for (unsigned t = 0; t < 4; ++t)
        if (t != i && t != j) rest.push_back(t);
      const unsigned k = rest[0], l = rest[1];
      auto top = K.sub(K.mul(P[i], Pq[j]), K.mul(P[j], Pq[i]));
      if (K.is_zero(top)) continue;
      auto bottom = ops.sub(ops.mul(ops.variable(k), xq(l)), ops.mul(ops.variable(l), xq(k)));
      // sign (-1)^{(1+2)+(i+1)+(j+1)}
      const bool negative = (i + j + 1) % 2 == 1;
      auto term = ops.scale(bottom, negative ? K.neg(top) : top);
      F = ops.add(F, term);
    }
  return {4, qd + 1, std::move(F)};
}

/// Laplace expansion of the same determinant along rows one and three:
/// F = sum of +-(p_i x_j - p_j x_i)(p_k x_l - p_l x_k)^q. Each summand lies in
/// I(P)^(q+1), since every linear factor vanishes at P. Returns whether the
/// regrouped sum equals F and every factor vanishes at P.
template <class Field>
bool frobenius_grouping_identity(const Field& K, const std::vector<typename Field::Element>& P, std::uint64_t q,
                                 const HomogeneousForm<Field>& F) {
  PolyOps<Field> ops(K);
  const auto qd = static_cast<unsigned>(q);
  auto minor = [&](unsigned i, unsigned j) {
    return ops.sub(ops.scale(ops.variable(j), P[i]), ops.scale(ops.variable(i), P[j]));
  };
  Polynomial<Field> G;
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = i + 1; j < 4; ++j) {
      std::vector<unsigned> rest;
      for (unsigned t = 0; t < 4; ++t)
        if (t != i && t != j) rest.push_back(t);
      const unsigned k = rest[0], l = rest[1];
      auto a = minor(i, j), b = minor(k, l);
      for (auto* lin : {&a, &b}) {
        auto v = ops.eval(*lin, std::span<const typename Field::Element>(P));
        if (!K.is_zero(v)) return false;
      }
      // rows {1,3} against columns {i,j}; the complementary rows {2,4} give
      // (p_k^q x_l^q - p_l^q x_k^q) = (p_k x_l - p_l x_k)^q
      auto term = ops.mul(a, ops.pow(b, qd));
      // sign (-1)^{(1+3)+(i+1)+(j+1)}
      if ((i + j) % 2 == 1) term = ops.neg(term);
      G = ops.add(G, term);
    }
  return ops.eq(G, F.poly);
}

struct TransversalityReport {
  std::size_t lines_checked = 0;
  std::vector<std::string> vanishing;       // restriction identically zero
  std::vector<std::string> wrong_pattern;   // not proportional to s t^q - s^q t
  bool clean() const { return vanishing.empty() && wrong_pattern.empty(); }
};

/// Restricts F to every line of PG(3,q) through x = s u + t v. The restriction
/// must be a nonzero multiple of s t^q - s^q t, the binary form vanishing
/// exactly at the q+1 rational points of the line.
template <class Field>
TransversalityReport cone_line_transversality(const Field& K, const HomogeneousForm<Field>& F, const FiniteField& Fq) {
  TransversalityReport rep;
  PolyOps<Field> ops(K);
  const auto q = static_cast<unsigned>(Fq.size());
  const Monomial st_q = Monomial::variable(0) * Monomial::variable(1, q);
  const Monomial sq_t = Monomial::variable(0, q) * Monomial::variable(1);
  for (const auto& line : all_lines(Fq)) {
    ++rep.lines_checked;
    const auto u = line.row(0), v = line.row(1);
    std::vector<Polynomial<Field>> subs;
    for (unsigned i = 0; i < 4; ++i)
      subs.push_back(ops.add(ops.term(Monomial::variable(0), embed(K, u[i])), ops.term(Monomial::variable(1), embed(K, v[i]))));
    auto R = ops.compose(F.poly, std::span<const Polynomial<Field>>(subs), ops, [](const auto& c) { return c; });
    if (R.is_zero()) {
      rep.vanishing.push_back(line_to_string(Fq, line));
      continue;
    }
    const bool ok = R.terms.size() == 2 &&
                    ((R.terms[0].m == sq_t && R.terms[1].m == st_q) || (R.terms[0].m == st_q && R.terms[1].m == sq_t)) &&
                    K.is_zero(K.add(R.terms[0].c, R.terms[1].c));
    if (!ok) rep.wrong_pattern.push_back(line_to_string(Fq, line));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Unexpected cones

struct UnexpectedCone {
  std::size_t lhs = 0;      // dim [I(Z) cap I(P)^d]_d
  long long rhs = 0;        // max(0, dim [I(Z)]_d - C(d+2,3))
  std::size_t hilbert = 0;  // dim [I(Z)]_d
  bool unexpected = false;
};

/// lhs from the stacked conditions: vanishing on Z and the C(d+2,3) vertex
/// conditions at P, in degree d in four variables.
template <class Field>
UnexpectedCone unexpected_cone_dim(const Field& K, const PointSet& Z, unsigned d, const GeneralPoint<Field>& P,
                                   std::size_t term_budget = 0) {
  if (Z.dim != 3) throw Error(ErrorKind::DimensionMismatch, "cones live in P^3");
  UnexpectedCone r;
  const auto& F = *Z.field;
  r.hilbert = hilbert_value(F, scheme_condition_list(F, scheme_of(Z)), 4, d);
  auto M = evaluation_matrix(K, scheme_condition_list(K, scheme_of(Z)), 4, d);
  auto V = vertex_conditions(K, std::span<const typename Field::Element>(P.coords), d);
  for (auto& row : V) M.rows.push_back(std::move(row));
  r.lhs = kernel_of_conditions(K, M, term_budget).dimension();
  const long long naive = static_cast<long long>(r.hilbert) - static_cast<long long>(binomial(d + 2, 3));
  r.rhs = std::max(0LL, naive);
  r.unexpected = static_cast<long long>(r.lhs) > r.rhs;
  return r;
}

/// Same lhs through the projection: cones with vertex P are the forms
/// h(x - a w, y - b w, z - c w), so lhs is the dimension of plane forms of
/// degree d through the projected points.
template <class Field>
std::size_t cone_dim_by_projection(const Field& K, const PointSet& Z, unsigned d, const GeneralPoint<Field>& P,
                                   std::size_t term_budget = 0) {
  std::vector<Condition<Field>> conds;
  for (const auto& p : Z.points) conds.push_back({project_coords(K, P.coords, embed_coords(K, p.x)), {}});
  return kernel_of_conditions(K, evaluation_matrix(K, conds, 3, d), term_budget).dimension();
}

/// Plane forms of degree d through the projection of S from P, found as
/// cones with vertex P over a basis B_1..B_h of I(S)_d computed over F_q.
/// A combination sum l_j B_j is a cone iff its derivative along P vanishes
/// when d < p, and iff it satisfies the vertex conditions otherwise. The
/// section of a cone by w = 0 is the plane form through the image.
template <class Field>
KernelBasis<Field> cone_sections(const Field& K, const FatPointScheme& S, const GeneralPoint<Field>& P, unsigned d,
                                 std::size_t term_budget = 0) {
  if (S.dim != 3) throw Error(ErrorKind::DimensionMismatch, "cones live in P^3");
  const auto& F = *S.field;
  const auto base = kernel_of_conditions(F, evaluation_matrix(F, scheme_condition_list(F, S), 4, d));
  const std::size_t h = base.dimension();
  KernelBasis<Field> out{3, d, binomial(d + 2, 2), {}};
  if (h == 0) return out;

  std::vector<Row<Field>> rows;
  if (d < F.characteristic()) {
    std::map<Monomial, Row<Field>> by_monomial;
    for (std::size_t j = 0; j < h; ++j)
      for (const auto& t : base.forms[j].poly.terms)
        for (unsigned i = 0; i < 4; ++i) {
          const unsigned e = t.m.exponent(i);
          if (e == 0) continue;
          auto ex = t.m.exponents();
          --ex[i];
          auto& row = by_monomial.try_emplace(Monomial::from_exponents(std::span<const unsigned>(ex.data(), 4)),
                                              Row<Field>(h, K.zero()))
                          .first->second;
          const auto c = K.mul(P.coords[i], embed(K, F.mul(t.c, F.from_int(e))));
          row[j] = K.add(row[j], c);
        }
    for (auto& [m, row] : by_monomial) rows.push_back(std::move(row));
  } else {
    const auto cols = monomials_of_degree(4, d);
    std::map<Monomial, std::size_t> index;
    for (std::size_t k = 0; k < cols.size(); ++k) index[cols[k]] = k;
    for (const auto& V : vertex_conditions(K, std::span<const typename Field::Element>(P.coords), d)) {
      Row<Field> row(h, K.zero());
      for (std::size_t j = 0; j < h; ++j)
        for (const auto& t : base.forms[j].poly.terms) row[j] = K.add(row[j], K.mul(V[index.at(t.m)], embed(K, t.c)));
      rows.push_back(std::move(row));
    }
  }

  std::vector<Row<Field>> null;
  if constexpr (std::is_same_v<Field, RFF>)
    null = nullspace_fraction_free(K, std::move(rows), h, term_budget);
  else
    null = nullspace(K, rref(K, std::move(rows), h));
  PolyOps<Field> ops(K);
  for (const auto& l : null) {
    Polynomial<Field> cone;
    for (std::size_t j = 0; j < h; ++j)
      if (!K.is_zero(l[j])) {
        Polynomial<Field> bj;
        for (const auto& t : base.forms[j].poly.terms) bj.terms.push_back({t.m, embed(K, t.c)});
        cone = ops.add(cone, ops.scale(bj, l[j]));
      }
    Polynomial<Field> section;
    for (const auto& t : cone.terms)
      if (t.m.exponent(3) == 0) {
        const std::array<unsigned, 3> e{t.m.exponent(0), t.m.exponent(1), t.m.exponent(2)};
        section = ops.add(section, ops.term(Monomial::from_exponents(std::span<const unsigned>(e)), t.c));
      }
    out.forms.push_back({3, d, std::move(section)});
  }
  out.rank -= out.forms.size();
  return out;
}

struct Inequality {
  long long lhs = 0, rhs = 0;
  bool holds = false;
};

/// C(q^2-q+2, 2) > C(q^2+4, 3) - (q^2+1)(q+1) - C(q^2+3, 3).
inline Inequality unexpectedness_inequality(std::uint64_t q) {
  if (q < 2) throw Error(ErrorKind::InvalidArgument, "q must be at least 2");
  const std::uint64_t q2 = q * q;
  Inequality r;
  r.lhs = static_cast<long long>(binomial(q2 - q + 2, 2));
  r.rhs = static_cast<long long>(binomial(q2 + 4, 3)) - static_cast<long long>((q2 + 1) * (q + 1)) -
          static_cast<long long>(binomial(q2 + 3, 3));
  r.holds = r.lhs > r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Status { Geproci, NotGeproci, Inconclusive };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Geproci: return "geproci";
    case Status::NotGeproci: return "not geproci";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

/// Field-independent rendering of a certificate.
struct CertificateSummary {
  unsigned alpha = 0, beta = 0;
  std::string field;  // working field
  std::string point;  // centre of projection
  std::string f, g;
  std::string f_source, g_source;
  std::optional<std::size_t> f_kernel_dim, g_kernel_dim;
  CoprimeWitness witness;
  std::size_t length = 0;
  std::size_t pairs_tried = 0;
  bool reverified = false;
};

struct GeprociVerdict {
  Status status = Status::Inconclusive;
  bool probabilistic = false;
  Mode mode = Mode::Generic;
  unsigned alpha = 0, beta = 0;
  std::size_t length = 0;
  std::string reason;  // error kind for negative or inconclusive verdicts
  std::optional<unsigned> missing_degree;
  std::vector<CertificateSummary> certificates;  // one per successful trial
  std::optional<Classification> classification;
  std::uint64_t seed = 0;
  unsigned trials = 0;
  unsigned resamples = 0;
  unsigned m = 0;                 // random mode extension degree
  double degree_bound = 0;        // total degree of identity-tested polynomials
  double failure_bound = 0;       // trials * degree_bound / q^m
};

struct CheckOptions {
  Mode mode = Mode::Generic;
  unsigned trials = 3;
  std::uint64_t seed = 1;
  std::size_t term_budget = 300;
  bool classify = true;
  bool reverify = true;
};

template <class Field>
CertificateSummary summarize(const Field& K, const GeneralPoint<Field>& P, const GeprociCertificate<Field>& c,
                             const std::string& field_name) {
  CertificateSummary s;
  s.alpha = c.alpha;
  s.beta = c.beta;
  s.field = field_name;
  std::string pt = "(";
  for (std::size_t i = 0; i < P.coords.size(); ++i) pt += (i ? "," : "") + K.to_string(P.coords[i]);
  s.point = pt + ")";
  s.f = form_to_string(K, c.f);
  s.g = form_to_string(K, c.g);
  s.f_source = source_name(c.f_source);
  s.g_source = source_name(c.g_source);
  s.f_kernel_dim = c.f_kernel_dim;
  s.g_kernel_dim = c.g_kernel_dim;
  s.witness = c.witness;
  s.length = c.length;
  s.pairs_tried = c.pairs_tried;
  return s;
}

namespace detail {

/// Product of the projected lines of a skew cover of Z by `degree` lines.
template <class Field>
std::vector<HomogeneousForm<Field>> cover_product(const Field& K, const FatPointScheme& S, const GeneralPoint<Field>& P,
                                                  unsigned degree) {
  std::vector<HomogeneousForm<Field>> out;
  if (!S.reduced() || degree == 0 || S.length() % degree) return out;
  PointSet Z{S.field, S.dim, S.simple};
  auto covers = skew_line_covers(Z, degree, S.length() / degree, 1);
  if (covers.empty()) return out;
  PolyOps<Field> ops(K);
  Polynomial<Field> prod = ops.constant(K.one());
  for (const auto& line : covers.front()) {
    auto u = project_coords(K, P.coords, embed_coords(K, line.row(0)));
    auto v = project_coords(K, P.coords, embed_coords(K, line.row(1)));
    // the plane line through u and v has coefficients u x v
    Polynomial<Field> lin;
    for (unsigned i = 0; i < 3; ++i) {
      const unsigned j = (i + 1) % 3, k = (i + 2) % 3;
      lin = ops.add(lin, ops.term(Monomial::variable(i), K.sub(K.mul(u[j], v[k]), K.mul(u[k], v[j]))));
    }
    prod = ops.mul(prod, lin);
  }
  out.push_back({3, degree, std::move(prod)});
  return out;
}

/// Forms through the projection of S when elimination in the plane is
/// abandoned: a skew line cover, the Frobenius cone in degree q+1, and the
/// cone kernel over a basis of I(S)_d.
template <class Field>
CandidateForms<Field> fallback_forms(const Field& K, const FatPointScheme& S, const GeneralPoint<Field>& P,
                                     const ProjectedScheme<Field>& img, unsigned d, std::size_t term_budget) {
  CandidateForms<Field> c;
  c.forms = cover_product(K, S, P, d);
  c.source = FormSource::LineCover;
  if (!c.forms.empty()) return c;
  const std::uint64_t q = S.field->size();
  if (d == q + 1) {
    const auto cone = frobenius_cone(K, P.coords, q);
    Polynomial<Field> section;
    PolyOps<Field> ops(K);
    for (const auto& t : cone.poly.terms)
      if (t.m.exponent(3) == 0) {
        const std::array<unsigned, 3> e{t.m.exponent(0), t.m.exponent(1), t.m.exponent(2)};
        section = ops.add(section, ops.term(Monomial::from_exponents(std::span<const unsigned>(e)), t.c));
      }
    HomogeneousForm<Field> g{3, d, std::move(section)};
    if (!g.is_zero() && vanishes_on(K, g, conditions_of(img))) {
      c.forms = {std::move(g)};
      c.source = FormSource::FrobeniusCone;
      return c;
    }
  }
  auto B = cone_sections(K, S, P, d, term_budget);
  if (B.forms.empty()) throw Error(ErrorKind::NoCurveOfDegree, "no curve of degree " + std::to_string(d));
  c.forms = std::move(B.forms);
  c.source = FormSource::ConeKernel;
  c.kernel_dim = c.forms.size();
  return c;
}

}  // namespace detail

/// Total degree in the coordinates of P of the polynomials whose
/// nonvanishing the random mode relies on: the rank minors of both
/// condition matrices, the pairwise collision minors and the resultant.
inline double random_degree_bound(std::size_t length, unsigned alpha, unsigned beta) {
  const double ra = std::min<double>(length, binomial(alpha + 2, 2));
  const double rb = std::min<double>(length, binomial(beta + 2, 2));
  const double kernels = ra * alpha + rb * beta;
  const double collisions = static_cast<double>(length) * (length - 1);
  const double resultant = static_cast<double>(alpha) * beta * kernels;
  return kernels + collisions + resultant;
}

/// Smallest m with q^m >= 2^31 and q^m > 10^6 D.
inline unsigned random_extension_degree(std::uint64_t q, double D) {
  unsigned m = 1;
  long double s = static_cast<long double>(q);
  while (s < 2147483648.0L || s <= 1e6L * D) {
    s *= q;
    ++m;
  }
  return m;
}

/// Whether the projection of S from a general point is a complete
/// intersection of curves of degrees alpha and beta.
inline GeprociVerdict scheme_geproci_check(const FatPointScheme& S, unsigned alpha, unsigned beta,
                                           const CheckOptions& opt = {}) {
  if (S.length() != std::size_t{alpha} * beta)
    throw Error(ErrorKind::LengthMismatch, "scheme length " + std::to_string(S.length()) + " is not " +
                                               std::to_string(alpha) + "*" + std::to_string(beta));
  GeprociVerdict v;
  v.mode = opt.mode;
  v.alpha = alpha;
  v.beta = beta;
  v.length = S.length();
  v.seed = opt.seed;
  if (opt.classify && S.reduced()) v.classification = classify(PointSet{S.field, S.dim, S.simple}, alpha, beta);

  auto fail = [&](const Error& e, std::optional<unsigned> deg) {
    v.reason = e.what();
    v.missing_degree = deg;
  };
  auto missing_of = [](const Error& e) -> std::optional<unsigned> {
    const std::string w = e.what();
    const auto pos = w.rfind(' ');
    if (e.kind() == ErrorKind::NoCurveOfDegree && pos != std::string::npos) return std::stoul(w.substr(pos + 1));
    return std::nullopt;
  };

  if (opt.mode == Mode::Generic) {
    const RFF K = generic_field(S.field);
    const auto P = generic_point(K);
    v.trials = 1;
    try {
      auto img = project(K, S, P);
      CertifyOptions<RFF> co;
      co.term_budget = opt.term_budget;
      co.seed = opt.seed;
      co.fallback = [&](unsigned d) { return detail::fallback_forms(K, S, P, img, d, 20 * opt.term_budget); };
      auto cert = certify_complete_intersection(K, img, alpha, beta, co);
      auto sum = summarize(K, P, cert, S.field->spec() + "(a,b,c)");
      if (opt.reverify) sum.reverified = verify_certificate(K, img, cert);
      v.certificates.push_back(std::move(sum));
      v.status = Status::Geproci;
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::NoCurveOfDegree:
          v.status = Status::NotGeproci;
          fail(e, missing_of(e));
          break;
        case ErrorKind::AllPairsShareComponent:
        case ErrorKind::LimitExceeded:
          v.status = Status::Inconclusive;
          fail(e, std::nullopt);
          break;
        default:
          throw;
      }
    }
    return v;
  }

  // random mode
  const std::uint64_t q = S.field->size();
  v.probabilistic = true;
  v.degree_bound = random_degree_bound(S.length(), alpha, beta);
  v.m = random_extension_degree(q, v.degree_bound);
  const FieldPtr L = FiniteField::extension(S.field, v.m);
  unsigned ok = 0, no_curve = 0;
  std::optional<unsigned> missing;
  for (unsigned t = 0; t < opt.trials; ++t) {
    std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ull + t);
    for (unsigned attempt = 0;; ++attempt) {
      if (attempt == 64) throw Error(ErrorKind::CollisionDetected, "could not sample a general point");
      auto P = random_point(*L, q, rng, opt.seed, v.m);
      ProjectedScheme<FiniteField> img;
      try {
        img = project(*L, S, P);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::CollisionDetected) throw;
        ++v.resamples;
        continue;
      }
      try {
        CertifyOptions<FiniteField> co;
        co.seed = opt.seed + t;
        auto cert = certify_complete_intersection(*L, img, alpha, beta, co);
        auto sum = summarize(*L, P, cert, L->spec());
        if (opt.reverify) sum.reverified = verify_certificate(*L, img, cert);
        v.certificates.push_back(std::move(sum));
        ++ok;
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::NoCurveOfDegree) {
          ++no_curve;
          missing = missing_of(e);
        } else if (e.kind() != ErrorKind::AllPairsShareComponent) {
          throw;
        }
        fail(e, missing);
      }
      break;
    }
  }
  v.trials = opt.trials;
  v.failure_bound = opt.trials * v.degree_bound / std::pow(static_cast<double>(q), static_cast<double>(v.m));
  if (ok == opt.trials) {
    v.status = Status::Geproci;
    v.reason.clear();
  } else if (no_curve > 0) {
    // a specialization can only enlarge the kernel, so an empty kernel at
    // one point means no curve for a general point either
    v.status = Status::NotGeproci;
    v.probabilistic = false;
  } else {
    v.status = Status::Inconclusive;
  }
  return v;
}

inline GeprociVerdict geproci_check(const PointSet& Z, unsigned alpha, unsigned beta, const CheckOptions& opt = {}) {
  if (Z.size() != std::size_t{alpha} * beta)
    throw Error(ErrorKind::LengthMismatch, std::to_string(Z.size()) + " points, not " + std::to_string(alpha) + "*" +
                                               std::to_string(beta));
  return scheme_geproci_check(scheme_of(Z), alpha, beta, opt);
}

// ---------------------------------------------------------------------------
// Residual sets

struct ResidualReport {
  bool shared_generator = false;
  std::string shared_form;  // the degree-beta form common to both projections
  std::string partner_form; // degree-gamma form completing Z'
  std::size_t residual_size = 0;
  GeprociVerdict residual;
};

/// Z {alpha,beta}-geproci and Z' in Z {gamma,beta}-geproci sharing a degree
/// beta generator: checks the shared generator on the generic projection and
/// then checks Z \ Z' for {alpha-gamma, beta}.
inline ResidualReport residual_check(const PointSet& Z, const PointSet& Zp, unsigned alpha, unsigned gamma,
                                     unsigned beta, const CheckOptions& opt = {}) {
  for (const auto& p : Zp.points)
    if (!Z.contains(p)) throw Error(ErrorKind::InvalidArgument, "Z' is not a subset of Z");
  if (gamma > alpha) throw Error(ErrorKind::InvalidArgument, "gamma exceeds alpha");
  ResidualReport rep;
  const PointSet Zpp = set_difference(Z, Zp);
  rep.residual_size = Zpp.size();
  if (Zp.size() != std::size_t{gamma} * beta) throw Error(ErrorKind::LengthMismatch, "|Z'| is not gamma*beta");
  if (Z.size() != std::size_t{alpha} * beta) throw Error(ErrorKind::LengthMismatch, "|Z| is not alpha*beta");

  // a degree-beta form through the projection of Z that cuts out the
  // projection of Z' together with a degree-gamma form
  const RFF K = generic_field(Z.field);
  const auto P = generic_point(K);
  const auto S = scheme_of(Z), Sp = scheme_of(Zp);
  auto img = project(K, S, P);
  auto imgp = project(K, Sp, P);
  CertifyOptions<RFF> co;
  co.term_budget = opt.term_budget;
  co.seed = opt.seed;
  std::vector<HomogeneousForm<RFF>> shared;
  try {
    shared = interpolate_curve(K, img, beta, opt.term_budget).forms;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::LimitExceeded) throw;
    shared = detail::cover_product(K, S, P, beta);
  }
  std::vector<HomogeneousForm<RFF>> partners;
  try {
    partners = interpolate_curve(K, imgp, gamma, opt.term_budget).forms;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::LimitExceeded) throw;
    partners = detail::cover_product(K, Sp, P, gamma);
  }
  std::size_t tried = 0;
  for (const auto& g : shared) {
    for (const auto& h : partners) {
      if (++tried > 64) break;
      if (certify_coprime(K, h, g, opt.seed).coprime) {
        rep.shared_generator = true;
        rep.shared_form = form_to_string(K, g);
        rep.partner_form = form_to_string(K, h);
        break;
      }
    }
    if (rep.shared_generator || tried > 64) break;
  }
  if (!rep.shared_generator) throw Error(ErrorKind::SharedGeneratorMissing, "no degree-" + std::to_string(beta) + " generator shared by the projections");
  if (Zpp.size() == 0) {
    rep.residual.status = Status::Geproci;
    rep.residual.reason = "empty residual";
    return rep;
  }
  rep.residual = geproci_check(Zpp, alpha - gamma, beta, opt);
  return rep;
}

}  // namespace geproci
