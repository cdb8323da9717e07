#pragma once

// End-to-end runs of the worked examples, each returning a JSON result and
// a short text summary.

#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "geproci/fatpoints.hpp"
#include "geproci/io.hpp"
#include "geproci/spreads.hpp"

namespace geproci::tools {

struct Outcome {
  json result;
  std::string text;
  bool ok = true;  // the run matched the expected values
};

struct ReproduceOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned trials = 3;
  std::uint64_t node_budget = 100'000'000;
  std::string fixtures = "fixtures";
};

namespace detail {

inline std::string yes(bool b) { return b ? "yes" : "no"; }

/// Lines meeting Z in exactly k points.
inline std::size_t exact_collinear(const PointSet& Z, std::size_t k) {
  std::size_t n = 0;
  for (const auto& s : collinear_subsets(Z, k))
    if (s.points.size() == k) ++n;
  return n;
}

inline Outcome check_set(const std::string& name, const PointSet& Z, unsigned alpha, unsigned beta, Mode mode,
                         const ReproduceOptions& o) {
  CheckOptions co;
  co.mode = mode;
  co.seed = o.seed;
  co.trials = o.trials;
  auto v = geproci_check(Z, alpha, beta, co);
  Outcome out;
  out.result = to_json(*Z.field, v);
  out.ok = v.status == Status::Geproci;
  std::ostringstream s;
  s << name << ": " << Z.size() << " points, " << status_name(v.status) << " (" << alpha << "," << beta << ") in "
    << mode_name(v.mode) << " mode";
  if (!v.reason.empty()) s << " [" << v.reason << "]";
  s << "\n";
  out.text = s.str();
  return out;
}

}  // namespace detail

inline Outcome regular_spreads(const ReproduceOptions&) {
  Outcome out;
  out.result = json::array();
  for (std::uint64_t q : {2, 3, 4, 5}) {
    auto S = build_regular_spread(field_of_order(q));
    auto r = verify_spread(S);
    out.ok = out.ok && r.clean() && r.full;
    out.result.push_back({{"q", q}, {"lines", S.size()}, {"clean", r.clean()}, {"full", r.full}});
    out.text += "q=" + std::to_string(q) + ": " + std::to_string(S.size()) + " lines, partition " + detail::yes(r.clean()) + "\n";
  }
  return out;
}

inline Outcome theorem1(std::uint64_t q, const ReproduceOptions& o) {
  auto Z = enumerate_projective_space(field_of_order(q), 3);
  const auto a = static_cast<unsigned>(q + 1), b = static_cast<unsigned>(q * q + 1);
  Outcome out = detail::check_set("P^3(F_" + std::to_string(q) + ")", Z, a, b, Mode::Generic, o);
  auto r = detail::check_set("P^3(F_" + std::to_string(q) + ")", Z, a, b, Mode::Random, o);
  out.ok = out.ok && r.ok && Z.size() == std::size_t{a} * b;
  out.result = {{"generic", out.result}, {"random", r.result}};
  out.text += r.text;
  return out;
}

inline Outcome frobenius(const ReproduceOptions&) {
  Outcome out;
  out.result = json::array();
  for (std::uint64_t q : {2, 3, 4}) {
    auto Fq = field_of_order(q);
    RFF K = generic_field(Fq);
    auto P = generic_point(K);
    auto F = frobenius_cone(K, P.coords, q);
    bool vanish = true;
    for (const auto& p : enumerate_projective_space(Fq, 3).points)
      vanish = vanish && K.is_zero(evaluate(K, F, std::span<const RFF::Element>(embed_coords(K, p.x))));
    const bool grouping = frobenius_grouping_identity(K, P.coords, q, F);
    auto t = cone_line_transversality(K, F, *Fq);
    const bool ok = vanish && grouping && t.clean() && F.degree == q + 1;
    out.ok = out.ok && ok;
    out.result.push_back({{"q", q},
                          {"degree", F.degree},
                          {"vanishes_on_rational_points", vanish},
                          {"grouping_identity", grouping},
                          {"lines_checked", t.lines_checked},
                          {"violations", t.vanishing.size() + t.wrong_pattern.size()}});
    out.text += "q=" + std::to_string(q) + ": degree " + std::to_string(F.degree) + ", vanishes " + detail::yes(vanish) +
                ", grouping " + detail::yes(grouping) + ", " + std::to_string(t.lines_checked) + " lines, " +
                std::to_string(t.vanishing.size() + t.wrong_pattern.size()) + " violations\n";
  }
  return out;
}

inline Outcome lemma2(const ReproduceOptions&) {
  Outcome out;
  out.result = json::array();
  const std::pair<unsigned, std::uint64_t> cases[] = {{1, 2}, {1, 3}, {1, 5}, {2, 2}, {2, 3}, {3, 2}, {3, 3}};
  for (auto [n, q] : cases) {
    auto Z = enumerate_projective_space(field_of_order(q), n);
    const auto h = hilbert_value(Z, static_cast<unsigned>(q + 1));
    const auto expect = binomial(n + 1, 2);
    out.ok = out.ok && h == expect;
    out.result.push_back({{"n", n}, {"q", q}, {"dim", h}, {"expected", expect}});
    out.text += "n=" + std::to_string(n) + " q=" + std::to_string(q) + ": dim [I(Z)]_" + std::to_string(q + 1) + " = " +
                std::to_string(h) + "\n";
  }
  return out;
}

inline Outcome unexpected_q2(const ReproduceOptions&) {
  Outcome out;
  auto Z = enumerate_projective_space(field_of_order(2), 3);
  RFF K = generic_field(Z.field);
  auto P = generic_point(K);
  out.result = json::array();
  for (unsigned d : {3u, 5u}) {
    auto u = unexpected_cone_dim(K, Z, d, P);
    out.result.push_back({{"degree", d}, {"hilbert", u.hilbert}, {"lhs", u.lhs}, {"rhs", u.rhs}, {"unexpected", u.unexpected}});
    out.text += "d=" + std::to_string(d) + ": dim [I(Z)]_d = " + std::to_string(u.hilbert) + ", cones " +
                std::to_string(u.lhs) + ", expected " + std::to_string(u.rhs) + ", unexpected " + detail::yes(u.unexpected) + "\n";
    if (d == 5) out.ok = out.ok && u.hilbert == 41 && u.lhs == 7 && u.rhs == 6 && u.unexpected;
    if (d == 3) out.ok = out.ok && u.hilbert == 6 && u.lhs >= 1 && u.rhs == 0;
  }
  return out;
}

inline Outcome inequality(const ReproduceOptions&) {
  Outcome out;
  out.result = json::array();
  for (std::uint64_t q : {2, 3, 4, 5, 7, 8, 9}) {
    auto r = unexpectedness_inequality(q);
    out.ok = out.ok && r.holds == (q != 2);
    out.result.push_back({{"q", q}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}});
    out.text += "q=" + std::to_string(q) + ": " + std::to_string(r.lhs) + (r.holds ? " > " : " <= ") + std::to_string(r.rhs) + "\n";
  }
  return out;
}

inline Outcome mps_q3(const ReproduceOptions& o) {
  auto F3 = field_of_order(3);
  LineTable T(F3);
  SearchOptions so;
  so.sizes = {7, 8, 9};
  so.mode = SearchMode::Exhaustive;
  so.node_budget = o.node_budget;
  so.threads = o.threads;
  auto res = search_maximal_partial_spreads(T, so);
  std::map<std::size_t, std::size_t> by_size;
  std::map<std::string, std::size_t> prints;
  for (const auto& s : res.spreads) {
    ++by_size[s.size()];
    ++prints[spread_fingerprint(T, s)];
  }
  Outcome out;
  json counts = json::object();
  for (auto [k, v] : by_size) counts[std::to_string(k)] = v;
  out.result["search"] = {{"nodes", res.nodes}, {"truncated", res.truncated}, {"counts", counts}, {"fingerprints", prints}};
  out.text = "search: " + std::to_string(res.nodes) + " nodes" + (res.truncated ? " (truncated)" : "") + "\n";
  for (auto [k, v] : by_size) out.text += "  maximal partial spreads of size " + std::to_string(k) + ": " + std::to_string(v) + "\n";
  out.text += "  fingerprints: " + std::to_string(prints.size()) + "\n";
  if (res.spreads.empty()) {
    out.ok = false;
    return out;
  }
  out.ok = by_size.count(8) == 0 && by_size.count(9) == 0 && prints.size() == 1 && by_size.count(7);
  const auto& S = res.spreads.front();
  auto Z = complement_points(S);
  auto chk = detail::check_set("complement", Z, 3, 4, Mode::Generic, o);
  auto cl = classify(Z, 3, 4);
  const auto triples = detail::exact_collinear(Z, 3);
  out.result["witness"] = to_json(S);
  out.result["complement"] = to_json(Z);
  out.result["verdict"] = chk.result;
  out.result["flags"] = to_json(*F3, cl);
  out.result["three_point_lines"] = triples;
  out.text += chk.text;
  out.text += "  coplanar " + detail::yes(cl.degenerate) + ", grid " + detail::yes(cl.grid) + ", skew cover by 4 lines " +
              detail::yes(cl.cover_beta.has_value()) + ", three-point lines " + std::to_string(triples) + "\n";
  out.ok = out.ok && chk.ok && Z.size() == 12 && !cl.degenerate && !cl.grid && cl.cover_beta && triples == 16;
  return out;
}

inline Outcome ex4_line_q2(const ReproduceOptions& o) {
  auto F2 = field_of_order(2);
  auto P3 = enumerate_projective_space(F2, 3);
  const auto L = line_from_rows(*F2, {1, 0, 0, 0}, {0, 1, 0, 0});
  auto Z = set_difference(P3, make_point_set(F2, 3, line_points(*F2, L)));
  auto out = detail::check_set("P^3(F_2) minus a line", Z, 3, 4, Mode::Generic, o);
  auto cl = classify(Z, 3, 4);
  const auto triples = detail::exact_collinear(Z, 3);
  out.result = {{"verdict", out.result}, {"flags", to_json(*F2, cl)}, {"three_point_lines", triples}};
  out.text += "  half grid " + detail::yes(cl.half_grid_cover && cl.nontrivial) + ", three-point lines " + std::to_string(triples) + "\n";
  out.ok = out.ok && Z.size() == 12 && cl.half_grid_cover && cl.nontrivial && triples == 16;
  return out;
}

inline Outcome ex_40pt_q7(const ReproduceOptions& o) {
  auto Z = read_point_set(o.fixtures + "/pg3_f7_40pt.txt");
  Outcome out;
  out.result["verdicts"] = json::array();
  for (std::uint64_t s = 0; s < 3; ++s) {
    ReproduceOptions os = o;
    os.seed = o.seed + s;
    auto r = detail::check_set("seed " + std::to_string(os.seed), Z, 5, 8, Mode::Random, os);
    out.ok = out.ok && r.ok;
    out.result["verdicts"].push_back(r.result);
    out.text += r.text;
  }
  LineTable T(Z.field);
  auto comp = set_difference(enumerate_projective_space(Z.field, 3), Z);
  auto cover = partition_into_lines(comp, T);
  const bool maximal = cover && is_maximal(T, *cover);
  const auto eight = collinear_subsets(Z, 8).size();
  const auto h4 = hilbert_value(Z, 4);
  out.result["complement_size"] = comp.size();
  out.result["complement_lines"] = cover ? json(cover->size()) : json(nullptr);
  out.result["complement_maximal"] = maximal;
  out.result["eight_point_lines"] = eight;
  out.result["hilbert_4"] = h4;
  out.text += "complement " + std::to_string(comp.size()) + " points, " +
              (cover ? std::to_string(cover->size()) + " skew lines" : std::string("no line partition")) +
              ", maximal " + detail::yes(maximal) + "\n";
  out.text += "lines with 8 points: " + std::to_string(eight) + ", dim [I(Z)]_4 = " + std::to_string(h4) + "\n";
  out.ok = out.ok && comp.size() == 360 && cover && cover->size() == 45 && maximal && eight == 0 && h4 == 5;
  return out;
}

inline Outcome fatpoint(int ex, const ReproduceOptions& o) {
  auto F2 = field_of_order(2);
  auto S = ex == 7 ? example7_scheme(F2) : ex == 8 ? example8_scheme(F2) : example9_scheme(F2);
  const unsigned a = ex == 8 ? 2 : 3, b = 3;
  Outcome out;
  for (Mode m : {Mode::Generic, Mode::Random}) {
    CheckOptions co;
    co.mode = m;
    co.seed = o.seed;
    co.trials = o.trials;
    co.classify = false;
    auto v = scheme_geproci_check(S, a, b, co);
    out.result[mode_name(m)] = to_json(*F2, v);
    out.ok = out.ok && v.status == Status::Geproci;
    out.text += "example " + std::to_string(ex) + ": length " + std::to_string(S.length()) + ", " +
                status_name(v.status) + " (" + std::to_string(a) + "," + std::to_string(b) + ") in " + mode_name(m) + " mode\n";
  }
  auto cl = classify_scheme(S, a, b);
  out.result["coplanar"] = cl.degenerate;
  out.result["cover_alpha"] = cl.cover_alpha.has_value();
  out.result["cover_beta"] = cl.cover_beta.has_value();
  if (ex == 7) {
    const auto h3 = hilbert_value(S, 3);
    out.result["hilbert_3"] = h3;
    out.text += "  dim [I(Z)]_3 = " + std::to_string(h3) + "\n";
    out.ok = out.ok && h3 == 11;
  }
  if (ex == 8) {
    RFF K = generic_field(F2);
    const auto conds = scheme_condition_list(K, S);
    const bool printed = vanishes_on(K, example8_printed_quadric(K), conds);
    auto [A, B] = example8_forms(*F2);
    const auto focus = plane(*F2, {1, 1, 1});
    const bool t2 = concurrent_tangents_check(*F2, A, example8_model(*F2), focus);
    auto F3 = field_of_order(3);
    auto [A3, B3] = example8_forms(*F3);
    const bool t3 = concurrent_tangents_check(*F3, A3, example8_model(*F3), plane(*F3, {1, 1, 1}));
    out.result["printed_quadric_in_kernel"] = printed;
    out.result["tangents_concurrent_f2"] = t2;
    out.result["tangents_concurrent_f3"] = t3;
    out.text += "  printed quadric vanishes on the scheme " + detail::yes(printed) + "\n";
    out.text += "  tangents to xy+xz+yz concurrent at (1,1,1): F_2 " + detail::yes(t2) + ", F_3 " + detail::yes(t3) + "\n";
    out.ok = out.ok && printed && t2 && !t3;
  }
  return out;
}

using Target = std::function<Outcome(const ReproduceOptions&)>;

inline const std::map<std::string, Target>& targets() {
  static const std::map<std::string, Target> t{
      {"regular-spreads", regular_spreads},
      {"thm1-q2", [](const ReproduceOptions& o) { return theorem1(2, o); }},
      {"thm1-q3", [](const ReproduceOptions& o) { return theorem1(3, o); }},
      {"frobenius-cone", frobenius},
      {"lemma2", lemma2},
      {"unexpected-q2", unexpected_q2},
      {"inequality", inequality},
      {"mps-q3", mps_q3},
      {"ex4-line-q2", ex4_line_q2},
      {"ex-40pt-q7", ex_40pt_q7},
      {"fatpoint-ex7", [](const ReproduceOptions& o) { return fatpoint(7, o); }},
      {"fatpoint-ex8", [](const ReproduceOptions& o) { return fatpoint(8, o); }},
      {"fatpoint-ex9", [](const ReproduceOptions& o) { return fatpoint(9, o); }},
  };
  return t;
}

}  // namespace geproci::tools
