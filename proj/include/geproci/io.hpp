#pragma once

// Text formats for point sets, spreads and fat-point schemes, and JSON
// rendering of reports (schema 1).

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "geproci/error.hpp"
#include "geproci/field.hpp"
#include "geproci/geproci.hpp"
#include "geproci/projective.hpp"
#include "geproci/spreads.hpp"

namespace geproci {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

/// Splits on `sep` outside brackets.
inline std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

/// An integer (packed value) or a bracketed coefficient list over the
/// layer below, as printed by FiniteField::to_string.
inline Elem parse_element(const FiniteField& F, const std::string& tok) {
  const std::string t = trim(tok);
  if (t.empty()) throw Error(ErrorKind::ParseError, "empty coordinate");
  if (t.front() == '[') {
    if (t.back() != ']' || !F.base()) throw Error(ErrorKind::ParseError, "bad coefficient tuple '" + t + "'");
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const char ch = t[i];
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (std::isspace(static_cast<unsigned char>(ch)) && depth == 0) {
        if (!cur.empty()) parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    if (!cur.empty()) parts.push_back(cur);
    if (parts.size() != F.degree()) throw Error(ErrorKind::ParseError, "tuple '" + t + "' has the wrong length");
    std::vector<Elem> c;
    for (const auto& p : parts) c.push_back(parse_element(*F.base(), p));
    return F.from_coefficients(c);
  }
  for (char ch : t)
    if (!std::isdigit(static_cast<unsigned char>(ch))) throw Error(ErrorKind::ParseError, "bad coordinate '" + t + "'");
  const auto v = std::stoull(t);
  if (v >= F.size()) throw Error(ErrorKind::ParseError, "coordinate '" + t + "' out of range");
  return v;
}

inline ProjectivePoint parse_point(const FiniteField& F, const std::string& s, unsigned dim) {
  auto parts = split_top(s, ',');
  if (parts.size() != dim + 1) throw Error(ErrorKind::ParseError, "expected " + std::to_string(dim + 1) + " coordinates in '" + s + "'");
  Coords c;
  for (const auto& p : parts) c.push_back(parse_element(F, p));
  return normalize_point(F, c);
}

inline std::string format_point(const FiniteField& F, const ProjectivePoint& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + F.to_string(p[i]);
  return s;
}

/// Reads `field: <spec>` and optionally `; dim: <n>` from a header line.
inline std::pair<FieldPtr, unsigned> parse_header(const std::string& line, bool need_dim) {
  const std::string t = trim(line);
  if (t.rfind("field:", 0) != 0) throw Error(ErrorKind::ParseError, "header must start with 'field:'");
  std::string rest = t.substr(6);
  unsigned dim = 3;
  const auto pos = rest.rfind("dim:");
  if (pos != std::string::npos) {
    const std::string d = trim(rest.substr(pos + 4));
    try {
      dim = static_cast<unsigned>(std::stoul(d));
    } catch (...) {
      throw Error(ErrorKind::ParseError, "bad dimension '" + d + "'");
    }
    rest = rest.substr(0, pos);
    const auto semi = rest.rfind(';');
    if (semi == std::string::npos) throw Error(ErrorKind::ParseError, "missing ';' before dim");
    rest = rest.substr(0, semi);
  } else if (need_dim) {
    throw Error(ErrorKind::ParseError, "header lacks 'dim:'");
  }
  return {parse_field_spec(trim(rest)), dim};
}

/// Non-empty lines with `#` comments removed.
inline std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  return in;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Point sets

inline PointSet parse_point_set(std::istream& in) {
  auto lines = detail::content_lines(in);
  if (lines.empty()) throw Error(ErrorKind::ParseError, "empty point-set file");
  auto [F, dim] = detail::parse_header(lines[0], true);
  std::vector<ProjectivePoint> pts;
  for (std::size_t i = 1; i < lines.size(); ++i) pts.push_back(detail::parse_point(*F, lines[i], dim));
  const std::size_t n = pts.size();
  auto Z = make_point_set(F, dim, std::move(pts));
  if (Z.size() != n) throw Error(ErrorKind::ParseError, "point-set file repeats a point");
  return Z;
}

inline PointSet read_point_set(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_point_set(in);
}

inline std::string format_point_set(const PointSet& Z) {
  std::string s = "field: " + Z.field->spec() + "; dim: " + std::to_string(Z.dim) + "\n";
  for (const auto& p : Z.points) s += detail::format_point(*Z.field, p) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Spreads

inline PartialSpread parse_spread(std::istream& in) {
  auto lines = detail::content_lines(in);
  if (lines.empty()) throw Error(ErrorKind::ParseError, "empty spread file");
  auto [F, dim] = detail::parse_header(lines[0], false);
  if (dim != 3) throw Error(ErrorKind::DimensionMismatch, "spreads live in P^3");
  PartialSpread S{F, {}, false};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto rows = detail::split_top(lines[i], '|');
    if (rows.size() != 2) throw Error(ErrorKind::ParseError, "spread line needs two rows separated by '|'");
    auto u = detail::parse_point(*F, rows[0], 3), v = detail::parse_point(*F, rows[1], 3);
    S.lines.push_back(line_through(*F, u, v));
  }
  std::sort(S.lines.begin(), S.lines.end());
  if (std::adjacent_find(S.lines.begin(), S.lines.end()) != S.lines.end())
    throw Error(ErrorKind::ParseError, "spread file repeats a line");
  return S;
}

inline PartialSpread read_spread(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_spread(in);
}

inline std::string format_spread(const PartialSpread& S) {
  std::string s = "field: " + S.field->spec() + "\n";
  for (const auto& l : S.lines) s += line_to_string(*S.field, l) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Schemes

inline FatPointScheme parse_scheme(std::istream& in) {
  auto lines = detail::content_lines(in);
  if (lines.empty()) throw Error(ErrorKind::ParseError, "empty scheme file");
  auto [F, dim] = detail::parse_header(lines[0], true);
  std::vector<ProjectivePoint> simple;
  std::vector<DoubledPoint> doubled;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& l = lines[i];
    if (l.rfind("simple:", 0) == 0) {
      simple.push_back(detail::parse_point(*F, l.substr(7), dim));
    } else if (l.rfind("double:", 0) == 0) {
      auto parts = detail::split_top(l.substr(7), '|');
      if (parts.size() != 2 || parts[1].rfind("toward:", 0) != 0)
        throw Error(ErrorKind::ParseError, "expected 'double: <point> | toward: <point>'");
      doubled.push_back({detail::parse_point(*F, parts[0], dim), detail::parse_point(*F, parts[1].substr(7), dim)});
    } else {
      throw Error(ErrorKind::ParseError, "unknown scheme line '" + l + "'");
    }
  }
  return make_scheme(F, dim, std::move(simple), std::move(doubled));
}

inline FatPointScheme read_scheme(const std::string& path) {
  auto in = detail::open_input(path);
  return parse_scheme(in);
}

inline std::string format_scheme(const FatPointScheme& S) {
  std::string s = "field: " + S.field->spec() + "; dim: " + std::to_string(S.dim) + "\n";
  for (const auto& p : S.simple) s += "simple: " + detail::format_point(*S.field, p) + "\n";
  for (const auto& d : S.doubled)
    s += "double: " + detail::format_point(*S.field, d.support) + " | toward: " + detail::format_point(*S.field, d.toward) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// JSON

inline json to_json(const CoprimeWitness& w) {
  return {{"coprime", w.coprime},
          {"resultant_nonzero", w.coprime},
          {"variable", w.variable},
          {"substitution", w.substitution},
          {"field", w.field},
          {"eval_point", w.eval_point},
          {"resultant", w.resultant},
          {"specialization", w.specialization},
          {"points_tested", w.points_tested}};
}

inline json to_json(const CertificateSummary& c) {
  json j{{"degrees", {c.alpha, c.beta}},
         {"field", c.field},
         {"point", c.point},
         {"forms", {{"f", c.f}, {"g", c.g}}},
         {"sources", {c.f_source, c.g_source}},
         {"coprimality", to_json(c.witness)},
         {"length", c.length},
         {"pairs_tried", c.pairs_tried},
         {"reverified", c.reverified}};
  j["kernel_dims"] = {c.f_kernel_dim ? json(*c.f_kernel_dim) : json(nullptr),
                      c.g_kernel_dim ? json(*c.g_kernel_dim) : json(nullptr)};
  return j;
}

inline json lines_json(const FiniteField& F, const std::vector<ProjectiveLine3>& lines) {
  json a = json::array();
  for (const auto& l : lines) a.push_back(line_to_string(F, l));
  return a;
}

inline json to_json(const FiniteField& F, const Classification& c) {
  json j{{"degenerate", c.degenerate},
         {"grid", c.grid},
         {"half_grid_cover", c.half_grid_cover},
         {"nontrivial", c.nontrivial},
         {"collinear_alpha", c.collinear_alpha},
         {"collinear_beta", c.collinear_beta}};
  j["cover_alpha"] = c.cover_alpha ? lines_json(F, *c.cover_alpha) : json(nullptr);
  j["cover_beta"] = c.cover_beta ? lines_json(F, *c.cover_beta) : json(nullptr);
  return j;
}

inline json to_json(const FiniteField& F, const GeprociVerdict& v) {
  json j{{"verdict", status_name(v.status)},
         {"probabilistic", v.probabilistic},
         {"mode", mode_name(v.mode)},
         {"degrees", {v.alpha, v.beta}},
         {"length", v.length},
         {"seed", v.seed},
         {"trials", v.trials},
         {"resamples", v.resamples},
         {"m", v.m},
         {"projection_plane", "w=0"}};
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.missing_degree) j["missing_degree"] = *v.missing_degree;
  if (v.mode == Mode::Random) {
    j["degree_bound"] = v.degree_bound;
    j["failure_bound"] = v.failure_bound;
  }
  json certs = json::array();
  for (const auto& c : v.certificates) certs.push_back(to_json(c));
  j["certificates"] = certs;
  if (v.classification) j["flags"] = to_json(F, *v.classification);
  return j;
}

inline json to_json(const PartialSpread& S) {
  return {{"field", S.field->spec()},
          {"size", S.size()},
          {"deficiency", S.deficiency()},
          {"maximal", S.maximal},
          {"lines", lines_json(*S.field, S.lines)}};
}

inline json to_json(const PointSet& Z) {
  json pts = json::array();
  for (const auto& p : Z.points) pts.push_back(point_to_string(*Z.field, p));
  return {{"field", Z.field->spec()}, {"dim", Z.dim}, {"size", Z.size()}, {"points", pts}};
}

}  // namespace geproci
