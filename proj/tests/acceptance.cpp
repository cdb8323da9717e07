// Runs each acceptance criterion once and prints one PASS/FAIL line for it.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "geproci/io.hpp"
#include "geproci/spreads.hpp"
#include "oracles.hpp"
#include "reproduce.hpp"

using namespace geproci;

namespace {

using Form = HomogeneousForm<FiniteField>;

struct Result {
  bool ok;
  std::string note;
};

tools::ReproduceOptions options() {
  tools::ReproduceOptions o;
  o.fixtures = GEPROCI_FIXTURES;
  return o;
}

/// The target's own expected-value check; its summary goes to the note.
Result target(const std::string& id) {
  auto out = tools::targets().at(id)(options());
  auto note = out.text;
  std::replace(note.begin(), note.end(), '\n', ';');
  return {out.ok, note};
}

GeprociVerdict check(const PointSet& Z, unsigned a, unsigned b, Mode m, std::uint64_t seed = 1) {
  CheckOptions o;
  o.mode = m;
  o.seed = seed;
  o.classify = false;
  return geproci_check(Z, a, b, o);
}

Result theorem1() {
  std::string note;
  bool ok = true;
  for (std::uint64_t q : {2, 3}) {
    auto Z = enumerate_projective_space(field_of_order(q), 3);
    const auto a = static_cast<unsigned>(q + 1), b = static_cast<unsigned>(q * q + 1);
    auto g = check(Z, a, b, Mode::Generic);
    bool degrees = !g.certificates.empty();
    for (const auto& c : g.certificates) degrees = degrees && c.alpha == a && c.beta == b && c.reverified && c.witness.coprime;
    bool agree = true;
    for (std::uint64_t s = 1; s <= 3; ++s) agree = agree && check(Z, a, b, Mode::Random, s).status == Status::Geproci;
    ok = ok && g.status == Status::Geproci && degrees && agree && Z.size() == std::size_t{a} * b;
    note += "q=" + std::to_string(q) + " length " + std::to_string(Z.size()) + " generic " + status_name(g.status) +
            " random seeds 1-3 " + (agree ? "agree" : "disagree") + "; ";
  }
  return {ok, note};
}

Coords apply(const FiniteField& F, const std::vector<Coords>& M, const Coords& x) {
  Coords y(4, 0);
  for (unsigned i = 0; i < 4; ++i)
    for (unsigned j = 0; j < 4; ++j) y[i] = F.add(y[i], F.mul(M[i][j], x[j]));
  return y;
}

std::vector<Coords> random_gl4(const FiniteField& F, std::mt19937_64& rng) {
  for (;;) {
    std::vector<Coords> M(4, Coords(4));
    for (auto& r : M)
      for (auto& e : r) e = F.random(rng);
    if (rank(F, std::vector<Row<FiniteField>>(M.begin(), M.end()), 4) == 4) return M;
  }
}

PointSet transform(const PointSet& Z, const std::vector<Coords>& M) {
  std::vector<ProjectivePoint> pts;
  for (const auto& p : Z.points) pts.push_back(normalize_point(*Z.field, apply(*Z.field, M, p.x)));
  return make_point_set(Z.field, Z.dim, pts);
}

Form random_form(const FiniteField& K, unsigned d, std::mt19937_64& rng) {
  Polynomial<FiniteField> p;
  for (auto m : monomials_of_degree(3, d)) {
    const auto c = K.random(rng);
    if (c) p.terms.push_back({m, c});
  }
  if (p.terms.empty()) p.terms.push_back({Monomial::variable(0, d), 1});
  return {3, d, std::move(p)};
}

/// Brute force: some monic-leading form of degree at most min(deg f, deg g)
/// divides both.
bool share_factor_by_search(const FiniteField& K, const Form& f, const Form& g) {
  PolyOps<FiniteField> ops(K);
  const std::uint64_t q = K.size();
  for (unsigned e = 1; e <= std::min(f.degree, g.degree); ++e) {
    const auto mons = monomials_of_degree(3, e);
    std::vector<std::uint64_t> c(mons.size());
    for (std::uint64_t code = 1; code < oracle::ipow(q, static_cast<unsigned>(mons.size())); ++code) {
      std::uint64_t x = code;
      for (auto& ci : c) {
        ci = x % q;
        x /= q;
      }
      if (*std::find_if(c.begin(), c.end(), [](auto v) { return v != 0; }) != 1) continue;
      Polynomial<FiniteField> h;
      for (std::size_t i = 0; i < mons.size(); ++i)
        if (c[i]) h.terms.push_back({mons[i], c[i]});
      std::sort(h.terms.begin(), h.terms.end(), [](const auto& a, const auto& b) { return b.m < a.m; });
      if (ops.div_rem(f.poly, h).second.is_zero() && ops.div_rem(g.poly, h).second.is_zero()) return true;
    }
  }
  return false;
}

bool field_axioms(std::string& note) {
  const char* towers[] = {"p=2", "p=7", "p=2;mod=1,1,1", "p=3;mod=1,0,1", "p=2;mod=1,1,1;ext=2", "p=2;ext=31", "p=5;ext=2;ext=3"};
  for (const char* spec : towers) {
    auto F = parse_field_spec(spec);
    std::mt19937_64 rng(42);
    const auto p = F->characteristic();
    for (int i = 0; i < 1000; ++i) {
      const auto a = F->random(rng), b = F->random(rng), c = F->random(rng);
      const bool ok = F->mul(a, F->add(b, c)) == F->add(F->mul(a, b), F->mul(a, c)) &&
                      F->mul(F->mul(a, b), c) == F->mul(a, F->mul(b, c)) && F->add(a, F->neg(a)) == 0 &&
                      (a == 0 || F->mul(a, F->inv(a)) == 1) &&
                      F->frobenius(F->add(a, b), p) == F->add(F->frobenius(a, p), F->frobenius(b, p)) &&
                      F->frobenius(F->mul(a, b), p) == F->mul(F->frobenius(a, p), F->frobenius(b, p));
      if (!ok) {
        note += std::string("field axioms fail in ") + spec + "; ";
        return false;
      }
    }
  }
  note += "field axioms 1000 cases x 7 towers; ";
  return true;
}

bool kernel_soundness(std::string& note) {
  std::mt19937_64 rng(99);
  for (std::uint64_t p : {2, 3, 5}) {
    auto F = field_of_order(p);
    auto all = oracle::projective_points(p, 3);
    for (int t = 0; t < 10; ++t) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<std::vector<std::uint64_t>> pts(all.begin(), all.begin() + std::min<std::size_t>(3 + rng() % 14, all.size()));
      const unsigned d = 1 + rng() % 4;
      auto conds = point_conditions<FiniteField>(pts);
      auto B = kernel_of_conditions(*F, evaluation_matrix(*F, conds, 4, d));
      if (!kernel_is_sound(*F, conds, B) || B.dimension() != oracle::hilbert_mod_p(pts, 4, d, p)) {
        note += "kernel check fails; ";
        return false;
      }
    }
  }
  note += "30 kernels sound; ";
  return true;
}

bool coprimality_oracle(std::string& note) {
  std::mt19937_64 rng(2024);
  std::size_t n = 0;
  for (std::uint64_t q : {2, 3}) {
    auto F = field_of_order(q);
    PolyOps<FiniteField> ops(*F);
    for (int i = 0; i < 30; ++i) {
      const unsigned df = 1 + rng() % 3, dg = 1 + rng() % 2;
      Form f = random_form(*F, df, rng), g = random_form(*F, dg, rng);
      if (i % 3 == 0) {
        auto h = random_form(*F, 1, rng);
        f = {3, df + 1, ops.mul(f.poly, h.poly)};
        g = {3, dg + 1, ops.mul(g.poly, h.poly)};
      }
      if (coprime_certificate(F, f, g).coprime == share_factor_by_search(*F, f, g)) {
        note += "coprimality disagrees with factor search; ";
        return false;
      }
      ++n;
    }
  }
  note += std::to_string(n) + " coprimality instances agree; ";
  return n >= 50;
}

struct FixtureCase {
  std::string name;
  PointSet Z;
  unsigned a, b;
};

std::vector<FixtureCase> fixtures() {
  auto F2 = field_of_order(2);
  auto P3 = enumerate_projective_space(F2, 3);
  const auto L = line_from_rows(*F2, {1, 0, 0, 0}, {0, 1, 0, 0});
  const std::string dir = GEPROCI_FIXTURES;
  return {{"P3(F2)", P3, 3, 5},
          {"P3(F2) minus a line", set_difference(P3, make_point_set(F2, 3, line_points(*F2, L))), 3, 4},
          {"D4 complement", complement_points(read_spread(dir + "/pg3_f3_mps7.txt")), 3, 4},
          {"40 points", read_point_set(dir + "/pg3_f7_40pt.txt"), 5, 8}};
}

bool invariance_and_agreement(std::string& note) {
  bool ok = true;
  std::mt19937_64 rng(100);
  for (const auto& [name, Z, a, b] : fixtures()) {
    const Mode m = Z.field->size() <= 3 ? Mode::Generic : Mode::Random;
    const auto base = check(Z, a, b, m).status;
    for (int t = 0; t < 5; ++t) ok = ok && check(transform(Z, random_gl4(*Z.field, rng)), a, b, m, 1 + t).status == base;
    const auto g = check(Z, a, b, Mode::Generic).status;
    for (std::uint64_t s = 1; s <= 3; ++s) ok = ok && check(Z, a, b, Mode::Random, s).status == g;
    ok = ok && base == Status::Geproci;
    note += name + " " + status_name(g) + "; ";
  }
  return ok;
}

Result properties() {
  std::string note;
  bool ok = field_axioms(note);
  ok = kernel_soundness(note) && ok;
  ok = coprimality_oracle(note) && ok;
  ok = invariance_and_agreement(note) && ok;
  return {ok, note};
}

}  // namespace

int main() {
  const std::pair<int, std::function<Result()>> criteria[] = {
      {1, [] { return target("regular-spreads"); }},
      {2, theorem1},
      {3, [] { return target("frobenius-cone"); }},
      {4, [] { return target("lemma2"); }},
      {5, [] { return target("unexpected-q2"); }},
      {6, [] { return target("inequality"); }},
      {7, [] { return target("mps-q3"); }},
      {8, [] { return target("ex4-line-q2"); }},
      {9, [] { return target("ex-40pt-q7"); }},
      {10, [] {
         Result r{true, ""};
         for (const char* id : {"fatpoint-ex7", "fatpoint-ex8", "fatpoint-ex9"}) {
           auto t = target(id);
           r.ok = r.ok && t.ok;
           r.note += t.note;
         }
         return r;
       }},
      {11, properties},
  };
  int failures = 0;
  for (const auto& [n, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.1f s) %s\n", n, r.ok ? "PASS" : "FAIL", s, r.note.c_str());
    std::fflush(stdout);
    failures += !r.ok;
  }
  return failures;
}
