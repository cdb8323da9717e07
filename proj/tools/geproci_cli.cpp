// geproci: command-line front end.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "reproduce.hpp"

using namespace geproci;

namespace {

struct Run {
  json report;
  std::string text;
  int status = 0;
};

std::pair<unsigned, unsigned> parse_degrees(const std::string& s) {
  auto parts = geproci::detail::split_top(s, ',');
  if (parts.size() != 2) throw Error(ErrorKind::ParseError, "degrees must look like 'a,b'");
  unsigned a = 0, b = 0;
  try {
    a = static_cast<unsigned>(std::stoul(parts[0]));
    b = static_cast<unsigned>(std::stoul(parts[1]));
  } catch (...) {
    throw Error(ErrorKind::ParseError, "bad degrees '" + s + "'");
  }
  if (a < 1 || b < 1) throw Error(ErrorKind::InvalidArgument, "degrees must be positive");
  if (a > b) std::swap(a, b);
  return {a, b};
}

Mode pick_mode(const std::string& m, std::uint64_t q) {
  if (m == "generic") return Mode::Generic;
  if (m == "random") return Mode::Random;
  return q <= 3 ? Mode::Generic : Mode::Random;
}

SearchMode search_mode(const std::string& m) {
  if (m == "first") return SearchMode::First;
  if (m == "sample") return SearchMode::Sample;
  return SearchMode::Exhaustive;
}

std::string verdict_text(const GeprociVerdict& v) {
  std::ostringstream s;
  s << status_name(v.status) << " (" << v.alpha << "," << v.beta << "), length " << v.length << ", " << mode_name(v.mode)
    << " mode";
  if (v.mode == Mode::Random) s << ", m=" << v.m << ", failure bound " << v.failure_bound;
  if (!v.reason.empty()) s << ", " << v.reason;
  s << "\n";
  if (v.classification) {
    const auto& c = *v.classification;
    s << "coplanar " << (c.degenerate ? "yes" : "no") << ", grid " << (c.grid ? "yes" : "no") << ", skew cover by "
      << v.alpha << " lines " << (c.cover_alpha ? "yes" : "no") << ", by " << v.beta << " lines "
      << (c.cover_beta ? "yes" : "no") << "\n";
  }
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geproci sets, spreads and unexpected cones over finite fields"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, field_spec = "2", points_path, scheme_path, spread_path, degrees, mode = "auto", save_path;
  std::string search = "exhaustive";
  unsigned dim = 3, threads = 1, trials = 3, degree = 0;
  std::uint64_t seed = 1, node_budget = 100'000'000, q_arg = 0, max_results = 0;
  std::vector<std::size_t> sizes;
  std::string example_id, fixtures = "fixtures";

  app.add_option("--out", out_path, "Write the JSON report here");
  app.add_option("--threads", threads, "Cap on worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed");

  auto* field_info = app.add_subcommand("field-info", "Describe a finite field");
  field_info->add_option("--field", field_spec, "Field: q, or p=..;mod=..;ext=..")->required();

  auto* enumerate = app.add_subcommand("enumerate", "List the points of P^n over a field");
  enumerate->add_option("--field", field_spec)->required();
  enumerate->add_option("--dim", dim)->check(CLI::Range(1u, 6u));
  enumerate->add_option("--save", save_path, "Also write a point-set file");

  auto* spread = app.add_subcommand("spread", "Spreads and maximal partial spreads of P^3");
  spread->require_subcommand(1);
  auto* sp_build = spread->add_subcommand("build", "The regular spread");
  sp_build->add_option("--field", field_spec)->required();
  sp_build->add_option("--save", save_path, "Also write a spread file");
  auto* sp_search = spread->add_subcommand("search", "Search for maximal partial spreads");
  sp_search->add_option("--field", field_spec)->required();
  sp_search->add_option("--size", sizes, "Target sizes")->required();
  sp_search->add_option("--mode", search, "first, exhaustive or sample")
      ->check(CLI::IsMember({"first", "exhaustive", "sample"}));
  sp_search->add_option("--node-budget", node_budget);
  sp_search->add_option("--max-results", max_results);
  sp_search->add_option("--save", save_path, "Write the first spread found");
  auto* sp_verify = spread->add_subcommand("verify", "Check a spread file");
  sp_verify->add_option("spread", spread_path)->required();

  auto* complement = app.add_subcommand("complement", "Points not covered by a partial spread");
  complement->add_option("spread", spread_path)->required();
  complement->add_option("--save", save_path, "Also write a point-set file");

  auto* geproci = app.add_subcommand("geproci", "Geproci verdicts for point sets");
  geproci->require_subcommand(1);
  auto* g_check = geproci->add_subcommand("check", "Decide whether a point set is (a,b)-geproci");
  g_check->add_option("--points", points_path)->required();
  g_check->add_option("--degrees", degrees)->required();
  g_check->add_option("--mode", mode)->check(CLI::IsMember({"auto", "generic", "random"}));
  g_check->add_option("--trials", trials)->check(CLI::PositiveNumber);
  auto* g_classify = geproci->add_subcommand("classify", "Grid, half grid or nontrivial");
  g_classify->add_option("--points", points_path)->required();
  g_classify->add_option("--degrees", degrees)->required();

  auto* cones = app.add_subcommand("cones", "Cones with vertex at a general point");
  cones->require_subcommand(1);
  auto* c_frob = cones->add_subcommand("frobenius", "The Frobenius cone over F_q");
  c_frob->add_option("--field", field_spec)->required();
  auto* c_dim = cones->add_subcommand("dim", "dim [I(Z) cap I(P)^d]_d against the expected value");
  c_dim->add_option("--points", points_path)->required();
  c_dim->add_option("--degree", degree)->required()->check(CLI::PositiveNumber);
  c_dim->add_option("--mode", mode, "generic, random, or auto (generic, random when elimination overflows)")
      ->check(CLI::IsMember({"auto", "generic", "random"}));
  auto* c_ineq = cones->add_subcommand("inequality", "The unexpectedness inequality");
  c_ineq->add_option("--q", q_arg)->required()->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 20));

  auto* hilbert = app.add_subcommand("hilbert", "dim [I(Z)]_d");
  hilbert->add_option("--points", points_path);
  hilbert->add_option("--scheme", scheme_path);
  hilbert->add_option("--degree", degree)->required()->check(CLI::PositiveNumber);

  auto* scheme = app.add_subcommand("scheme", "Fat-point schemes");
  scheme->require_subcommand(1);
  auto* s_check = scheme->add_subcommand("check", "Decide whether a scheme is (a,b)-geproci");
  s_check->add_option("--scheme", scheme_path)->required();
  s_check->add_option("--degrees", degrees)->required();
  s_check->add_option("--mode", mode)->check(CLI::IsMember({"auto", "generic", "random"}));
  s_check->add_option("--trials", trials)->check(CLI::PositiveNumber);

  auto* reproduce = app.add_subcommand("reproduce", "Run a worked example end to end");
  std::vector<std::string> ids;
  for (const auto& [k, v] : tools::targets()) ids.push_back(k);
  reproduce->add_option("example", example_id)->required()->check(CLI::IsMember(ids));
  reproduce->add_option("--fixtures", fixtures, "Fixture directory");
  reproduce->add_option("--trials", trials)->check(CLI::PositiveNumber);
  reproduce->add_option("--node-budget", node_budget);

  CLI11_PARSE(app, argc, argv);

  std::string echo;
  for (int i = 0; i < argc; ++i) echo += (i ? " " : "") + std::string(argv[i]);

  Run run;
  run.report = {{"schema", kSchemaVersion}, {"command", echo}, {"seed", seed}, {"anomalies", json::array()}};
  const auto t0 = std::chrono::steady_clock::now();

  try {
    if (field_info->parsed()) {
      auto F = parse_field_spec(field_spec);
      std::string mod;
      for (auto c : F->modulus()) mod += (mod.empty() ? "" : ",") + std::to_string(c);
      run.report["field"] = F->spec();
      run.report["result"] = {{"order", F->size()},
                              {"characteristic", F->characteristic()},
                              {"degree", F->degree()},
                              {"absolute_degree", F->absolute_degree()},
                              {"modulus", mod}};
      run.text = "F_" + std::to_string(F->size()) + ", characteristic " + std::to_string(F->characteristic()) +
                 ", degree " + std::to_string(F->absolute_degree()) + " over the prime field, spec " + F->spec() + "\n";
    } else if (enumerate->parsed()) {
      auto Z = enumerate_projective_space(parse_field_spec(field_spec), dim);
      run.report["field"] = Z.field->spec();
      run.report["result"] = to_json(Z);
      run.text = format_point_set(Z);
      if (!save_path.empty()) std::ofstream(save_path) << format_point_set(Z);
    } else if (sp_build->parsed()) {
      auto S = build_regular_spread(parse_field_spec(field_spec));
      auto r = verify_spread(S);
      run.report["field"] = S.field->spec();
      run.report["result"] = to_json(S);
      run.report["result"]["partition"] = r.clean() && r.full;
      run.text = format_spread(S);
      if (!save_path.empty()) std::ofstream(save_path) << format_spread(S);
    } else if (sp_search->parsed()) {
      auto F = parse_field_spec(field_spec);
      LineTable T(F);
      SearchOptions so;
      so.sizes = sizes;
      so.mode = search_mode(search);
      so.node_budget = node_budget;
      so.seed = seed;
      so.threads = threads;
      so.max_results = max_results;
      auto res = search_maximal_partial_spreads(T, so);
      std::map<std::size_t, std::size_t> counts;
      std::map<std::string, std::size_t> prints;
      json found = json::array();
      for (const auto& s : res.spreads) {
        ++counts[s.size()];
        ++prints[spread_fingerprint(T, s)];
        if (found.size() < 100) found.push_back(to_json(s));
      }
      json cj = json::object();
      for (auto [k, v] : counts) cj[std::to_string(k)] = v;
      run.report["field"] = F->spec();
      run.report["result"] = {{"nodes", res.nodes}, {"truncated", res.truncated}, {"counts", cj},
                              {"fingerprints", prints}, {"spreads", found}};
      run.report["anomalies"] = res.anomalies;
      std::ostringstream s;
      s << res.spreads.size() << " maximal partial spreads, " << res.nodes << " nodes"
        << (res.truncated ? ", truncated by the node budget" : "") << "\n";
      for (auto [k, v] : counts) s << "  size " << k << ": " << v << "\n";
      for (const auto& [fp, n] : prints) s << "  " << n << " x " << fp << "\n";
      run.text = s.str();
      if (!save_path.empty() && !res.spreads.empty()) std::ofstream(save_path) << format_spread(res.spreads.front());
    } else if (sp_verify->parsed()) {
      auto S = read_spread(spread_path);
      LineTable T(S.field);
      S.maximal = is_maximal(T, S.lines);
      auto r = verify_spread(S);
      run.report["field"] = S.field->spec();
      run.report["result"] = to_json(S);
      run.report["result"]["meeting_pairs"] = r.meeting_pairs.size();
      run.report["result"]["full"] = r.full;
      run.report["result"]["clean"] = r.clean();
      run.text = std::to_string(S.size()) + " lines, pairwise skew " + (r.meeting_pairs.empty() ? "yes" : "no") +
                 ", full spread " + (r.full && r.clean() ? "yes" : "no") + ", maximal " + (S.maximal ? "yes" : "no") +
                 ", deficiency " + std::to_string(S.deficiency()) + "\n";
    } else if (complement->parsed()) {
      auto S = read_spread(spread_path);
      auto Z = complement_points(S);
      run.report["field"] = S.field->spec();
      run.report["result"] = to_json(Z);
      run.text = format_point_set(Z);
      if (!save_path.empty()) std::ofstream(save_path) << format_point_set(Z);
    } else if (g_check->parsed() || s_check->parsed()) {
      auto [a, b] = parse_degrees(degrees);
      auto S = g_check->parsed() ? scheme_of(read_point_set(points_path)) : read_scheme(scheme_path);
      CheckOptions co;
      co.mode = pick_mode(mode, S.field->size());
      co.seed = seed;
      co.trials = trials;
      co.classify = S.reduced();
      auto v = scheme_geproci_check(S, a, b, co);
      run.report["field"] = S.field->spec();
      run.report["mode"] = mode_name(v.mode);
      run.report["result"] = to_json(*S.field, v);
      run.text = verdict_text(v);
      if (!S.reduced()) {
        auto cl = classify_scheme(S, a, b);
        run.report["result"]["flags"] = {{"degenerate", cl.degenerate},
                                         {"cover_alpha", cl.cover_alpha.has_value()},
                                         {"cover_beta", cl.cover_beta.has_value()}};
      }
    } else if (g_classify->parsed()) {
      auto [a, b] = parse_degrees(degrees);
      auto Z = read_point_set(points_path);
      auto c = classify(Z, a, b);
      run.report["field"] = Z.field->spec();
      run.report["result"] = to_json(*Z.field, c);
      std::ostringstream s;
      s << "coplanar " << (c.degenerate ? "yes" : "no") << ", grid " << (c.grid ? "yes" : "no") << ", half grid cover "
        << (c.half_grid_cover ? "yes" : "no") << ", nontrivial " << (c.nontrivial ? "yes" : "no") << "\n"
        << "lines with >= " << a << " points: " << c.collinear_alpha << ", with >= " << b << " points: " << c.collinear_beta
        << "\n";
      run.text = s.str();
    } else if (c_frob->parsed()) {
      auto Fq = parse_field_spec(field_spec);
      const auto q = Fq->size();
      RFF K = generic_field(Fq);
      auto P = generic_point(K);
      auto F = frobenius_cone(K, P.coords, q);
      const bool grouping = frobenius_grouping_identity(K, P.coords, q, F);
      auto t = cone_line_transversality(K, F, *Fq);
      run.report["field"] = Fq->spec();
      run.report["result"] = {{"degree", F.degree},
                              {"form", form_to_string(K, F)},
                              {"grouping_identity", grouping},
                              {"lines_checked", t.lines_checked},
                              {"vanishing_lines", t.vanishing},
                              {"wrong_pattern_lines", t.wrong_pattern}};
      run.text = "degree " + std::to_string(F.degree) + ", in I(P)^" + std::to_string(q + 1) + " " +
                 (grouping ? "yes" : "no") + ", " + std::to_string(t.lines_checked) + " lines, " +
                 std::to_string(t.vanishing.size() + t.wrong_pattern.size()) + " violations\n";
    } else if (c_dim->parsed()) {
      auto Z = read_point_set(points_path);
      std::optional<UnexpectedCone> u;
      std::string used = "generic";
      if (mode != "random") {
        RFF K = generic_field(Z.field);
        try {
          u = unexpected_cone_dim(K, Z, degree, generic_point(K), 300);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::LimitExceeded || mode == "generic") throw;
          run.report["anomalies"].push_back(std::string("generic elimination overflowed: ") + e.what());
        }
      }
      if (!u) {
        // a point over a large extension; the kernel can only grow under
        // specialization, so lhs is an upper bound that is sharp with high
        // probability
        used = "random";
        const unsigned m = random_extension_degree(Z.field->size(), 1.0);
        const FieldPtr L = FiniteField::extension(Z.field, m);
        std::mt19937_64 rng(seed);
        u = unexpected_cone_dim(*L, Z, degree, random_point(*L, Z.field->size(), rng, seed, m));
        run.report["m"] = m;
      }
      run.report["field"] = Z.field->spec();
      run.report["mode"] = used;
      run.report["result"] = {{"degree", degree}, {"hilbert", u->hilbert}, {"lhs", u->lhs}, {"rhs", u->rhs}, {"unexpected", u->unexpected}};
      run.text = "dim [I(Z)]_" + std::to_string(degree) + " = " + std::to_string(u->hilbert) + ", cones " +
                 std::to_string(u->lhs) + ", expected " + std::to_string(u->rhs) + ", unexpected " +
                 (u->unexpected ? "yes" : "no") + " (" + used + " vertex)\n";
    } else if (c_ineq->parsed()) {
      auto r = unexpectedness_inequality(q_arg);
      run.report["result"] = {{"q", q_arg}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
      run.text = std::to_string(r.lhs) + (r.holds ? " > " : " <= ") + std::to_string(r.rhs) + "\n";
    } else if (hilbert->parsed()) {
      if (points_path.empty() == scheme_path.empty()) throw Error(ErrorKind::InvalidArgument, "give exactly one of --points and --scheme");
      auto S = points_path.empty() ? read_scheme(scheme_path) : scheme_of(read_point_set(points_path));
      const auto h = hilbert_value(S, degree);
      run.report["field"] = S.field->spec();
      run.report["result"] = {{"degree", degree}, {"dim", h}, {"length", S.length()}};
      run.text = "dim [I(Z)]_" + std::to_string(degree) + " = " + std::to_string(h) + "\n";
    } else if (reproduce->parsed()) {
      tools::ReproduceOptions ro;
      ro.seed = seed;
      ro.threads = threads;
      ro.trials = trials;
      ro.node_budget = node_budget;
      ro.fixtures = fixtures;
      auto o = tools::targets().at(example_id)(ro);
      run.report["example"] = example_id;
      run.report["result"] = o.result;
      run.report["matches_expected"] = o.ok;
      run.text = o.text + (o.ok ? "matches the expected values\n" : "DOES NOT match the expected values\n");
    }
  } catch (const Error& e) {
    run.report["error"] = {{"kind", std::string(error_name(e.kind()))}, {"message", e.what()}};
    run.text = std::string("error: ") + e.what() + "\n";
    run.status = 2;
  } catch (const std::exception& e) {
    run.report["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    run.text = std::string("error: ") + e.what() + "\n";
    run.status = 3;
  }

  run.report["timing_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  (run.status ? std::cerr : std::cout) << run.text;
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 3;
    }
    out << run.report.dump(2) << "\n";
  }
  return run.status;
}
