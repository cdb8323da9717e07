#pragma once

// Spreads and partial spreads of PG(3,q): the regular spread, verification,
// backtracking search for maximal partial spreads, complements and
// partitions of point sets into lines.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <cmath>
#include <vector>

#include "geproci/error.hpp"
#include "geproci/field.hpp"
#include "geproci/projective.hpp"

namespace geproci {

struct PartialSpread {
  FieldPtr field;
  std::vector<ProjectiveLine3> lines;  // canonical order
  bool maximal = false;                // set only after a scan over all lines

  std::size_t size() const { return lines.size(); }
  std::size_t deficiency() const {
    const std::uint64_t q = field->size();
    return static_cast<std::size_t>(q * q + 1 - lines.size());
  }
};

/// Dense bitset sized at runtime.
class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  void set(std::size_t i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return w_[i >> 6] >> (i & 63) & 1; }
  std::size_t size() const { return n_; }
  bool none() const {
    for (auto x : w_)
      if (x) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w_) c += static_cast<std::size_t>(__builtin_popcountll(x));
    return c;
  }
  bool intersects(const Bits& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & o.w_[i]) return true;
    return false;
  }
  Bits& operator&=(const Bits& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  /// Index of the first set bit at or after i, or size().
  std::size_t next(std::size_t i) const {
    if (i >= n_) return n_;
    std::size_t k = i >> 6;
    std::uint64_t x = w_[k] & (~std::uint64_t{0} << (i & 63));
    for (;;) {
      if (x) return std::min(n_, (k << 6) + static_cast<std::size_t>(__builtin_ctzll(x)));
      if (++k == w_.size()) return n_;
      x = w_[k];
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// All lines of PG(3,q) with their point indices and the skewness relation.
struct LineTable {
  FieldPtr field;
  PointSet space;
  std::vector<ProjectiveLine3> lines;
  std::vector<std::vector<std::uint32_t>> points_of;  // per line, point indices
  std::vector<std::vector<std::uint32_t>> lines_at;   // per point, line indices
  std::vector<Bits> point_bits;                       // per line
  std::vector<Bits> skew;                             // per line, over lines

  explicit LineTable(FieldPtr F) : field(F), space(enumerate_projective_space(F, 3)), lines(all_lines(*F)) {
    const auto& K = *field;
    points_of.resize(lines.size());
    lines_at.resize(space.size());
    point_bits.assign(lines.size(), Bits(space.size()));
    for (std::size_t l = 0; l < lines.size(); ++l) {
      for (const auto& p : line_points(K, lines[l])) {
        auto i = static_cast<std::uint32_t>(point_index(K, p));
        points_of[l].push_back(i);
        lines_at[i].push_back(static_cast<std::uint32_t>(l));
        point_bits[l].set(i);
      }
    }
    // two lines over F_q meet iff they share an F_q-point
    skew.assign(lines.size(), Bits(lines.size()));
    for (std::size_t a = 0; a < lines.size(); ++a)
      for (std::size_t b = a + 1; b < lines.size(); ++b)
        if (!point_bits[a].intersects(point_bits[b])) {
          skew[a].set(b);
          skew[b].set(a);
        }
  }

  std::size_t index_of(const ProjectiveLine3& l) const {
    auto it = std::lower_bound(lines.begin(), lines.end(), l);
    if (it == lines.end() || *it != l) throw Error(ErrorKind::InvalidArgument, "not a line of this space");
    return static_cast<std::size_t>(it - lines.begin());
  }
};

/// Lines through (1,0,a,b) and (0,1,rb,a) for odd q, or (1,0,a,b) and
/// (0,1,br,a+b) for even q, together with L(inf).
inline PartialSpread build_regular_spread(const FieldPtr& F) {
  const auto& K = *F;
  PartialSpread S{F, {}, false};
  const bool even = K.characteristic() == 2;
  const Elem r = even ? find_artin_schreier_r(K) : find_nonsquare(K);
  for (Elem a = 0; a < K.size(); ++a)
    for (Elem b = 0; b < K.size(); ++b) {
      Coords u{1, 0, a, b};
      Coords v = even ? Coords{0, 1, K.mul(b, r), K.add(a, b)} : Coords{0, 1, K.mul(r, b), a};
      S.lines.push_back(line_from_rows(K, u, v));
    }
  S.lines.push_back(line_from_rows(K, {0, 0, 1, 0}, {0, 0, 0, 1}));
  std::sort(S.lines.begin(), S.lines.end());
  S.maximal = true;  // q^2+1 pairwise skew lines cover all points; checked by verify_spread
  return S;
}

struct SpreadReport {
  std::vector<std::pair<std::size_t, std::size_t>> meeting_pairs;
  std::vector<ProjectivePoint> uncovered;        // only for full spreads
  std::vector<ProjectivePoint> multiply_covered;
  bool full = false;  // q^2+1 lines

  bool clean() const { return meeting_pairs.empty() && uncovered.empty() && multiply_covered.empty(); }
};

inline SpreadReport verify_spread(const PartialSpread& S) {
  const auto& K = *S.field;
  SpreadReport rep;
  const std::uint64_t q = K.size();
  rep.full = S.lines.size() == q * q + 1;
  for (std::size_t i = 0; i < S.lines.size(); ++i)
    for (std::size_t j = i + 1; j < S.lines.size(); ++j)
      if (!lines_skew(K, S.lines[i], S.lines[j])) rep.meeting_pairs.emplace_back(i, j);
  std::map<ProjectivePoint, unsigned> cover;
  for (const auto& l : S.lines)
    for (const auto& p : line_points(K, l)) ++cover[p];
  for (const auto& [p, c] : cover)
    if (c > 1) rep.multiply_covered.push_back(p);
  if (rep.full) {
    for (const auto& p : enumerate_projective_space(S.field, 3).points)
      if (!cover.count(p)) rep.uncovered.push_back(p);
  }
  return rep;
}

/// True when no line of PG(3,q) is skew to every member.
inline bool is_maximal(const LineTable& T, const std::vector<ProjectiveLine3>& lines) {
  Bits avail(T.lines.size());
  for (std::size_t i = 0; i < T.lines.size(); ++i) avail.set(i);
  for (const auto& l : lines) {
    const auto i = T.index_of(l);
    avail &= T.skew[i];
  }
  return avail.none();
}

inline PointSet covered_points(const PartialSpread& S) {
  std::vector<ProjectivePoint> pts;
  for (const auto& l : S.lines)
    for (auto& p : line_points(*S.field, l)) pts.push_back(std::move(p));
  return make_point_set(S.field, 3, std::move(pts));
}

/// P^3(F_q) minus the points on the spread lines.
inline PointSet complement_points(const PartialSpread& S) {
  return set_difference(enumerate_projective_space(S.field, 3), covered_points(S));
}

/// Invariant of a partial spread under collineations: the multiset of
/// |L cap Z| over all lines L (Z the complement), and the multiset of
/// per-point profiles of those counts over the lines through each point of Z.
inline std::string spread_fingerprint(const LineTable& T, const PartialSpread& S) {
  const auto Z = complement_points(S);
  std::vector<char> inZ(T.space.size(), 0);
  for (const auto& p : Z.points) inZ[point_index(*T.field, p)] = 1;
  std::vector<unsigned> t(T.lines.size(), 0);
  for (std::size_t l = 0; l < T.lines.size(); ++l)
    for (auto i : T.points_of[l]) t[l] += inZ[i];
  std::map<unsigned, std::size_t> line_hist;
  for (auto v : t) ++line_hist[v];
  std::map<std::vector<unsigned>, std::size_t> point_hist;
  for (std::size_t i = 0; i < T.space.size(); ++i) {
    if (!inZ[i]) continue;
    std::vector<unsigned> prof;
    for (auto l : T.lines_at[i]) prof.push_back(t[l]);
    std::sort(prof.begin(), prof.end());
    ++point_hist[prof];
  }
  std::string s = "lines:";
  for (auto [v, c] : line_hist) s += " " + std::to_string(v) + "x" + std::to_string(c);
  s += "; points:";
  for (const auto& [prof, c] : point_hist) {
    s += " [";
    std::map<unsigned, unsigned> h;
    for (auto v : prof) ++h[v];
    bool first = true;
    for (auto [v, k] : h) {
      s += (first ? "" : " ") + std::to_string(v) + "x" + std::to_string(k);
      first = false;
    }
    s += "]x" + std::to_string(c);
  }
  return s;
}

enum class SearchMode { First, Exhaustive, Sample };

struct SearchOptions {
  std::vector<std::size_t> sizes;  // target sizes of maximal partial spreads
  SearchMode mode = SearchMode::Exhaustive;
  std::uint64_t node_budget = 100'000'000;
  std::uint64_t seed = 0;  // sample mode
  std::size_t max_results = 0;  // 0 = unlimited
  unsigned threads = 1;
};

struct SearchResult {
  std::vector<PartialSpread> spreads;
  bool truncated = false;
  std::uint64_t nodes = 0;
  std::vector<std::string> anomalies;  // deficiency outside the Mesner-Glynn window
};

namespace detail {

struct Found {
  std::uint64_t ordinal;  // node count within the branch when found
  std::vector<std::uint32_t> lines;
};

/// Depth-first search over increasing line indices, so each set is produced
/// once, from its sorted index sequence.
class SpreadSearch {
 public:
  SpreadSearch(const LineTable& T, const SearchOptions& opt) : T_(T), opt_(opt) {
    lo_ = *std::min_element(opt.sizes.begin(), opt.sizes.end());
    hi_ = *std::max_element(opt.sizes.begin(), opt.sizes.end());
    full_ = static_cast<std::size_t>(T.field->size() * T.field->size() + 1);
  }

  /// Explores the subtree whose smallest line is `first`.
  std::vector<Found> branch(std::uint32_t first, std::uint64_t budget, std::uint64_t& nodes, bool& truncated) {
    std::vector<Found> out;
    nodes_ = 0;
    budget_ = budget;
    truncated_ = false;
    path_.assign(1, first);
    out_ = &out;
    Bits avail(T_.lines.size());
    for (std::size_t i = 0; i < T_.lines.size(); ++i) avail.set(i);
    avail &= T_.skew[first];
    dfs(avail, first);
    nodes = nodes_;
    truncated = truncated_;
    return out;
  }

 private:
  bool stop() const {
    return truncated_ || (opt_.mode == SearchMode::First && !out_->empty());
  }

  void dfs(const Bits& avail, std::uint32_t last) {
    if (stop()) return;
    if (++nodes_ > budget_) {
      truncated_ = true;
      return;
    }
    const std::size_t size = path_.size();
    if (avail.none()) {
      if (size < full_ && std::find(opt_.sizes.begin(), opt_.sizes.end(), size) != opt_.sizes.end())
        out_->push_back({nodes_, path_});
      return;
    }
    if (size >= hi_) return;  // any completion is larger than every target
    // lines after `last` still available
    std::size_t ahead = 0;
    for (std::size_t i = avail.next(last + 1); i < avail.size(); i = avail.next(i + 1)) ++ahead;
    if (size + ahead < lo_) return;
    for (std::size_t i = avail.next(last + 1); i < avail.size(); i = avail.next(i + 1)) {
      Bits next = avail;
      next &= T_.skew[i];
      path_.push_back(static_cast<std::uint32_t>(i));
      dfs(next, static_cast<std::uint32_t>(i));
      path_.pop_back();
      if (stop()) return;
    }
  }

  const LineTable& T_;
  const SearchOptions& opt_;
  std::size_t lo_ = 0, hi_ = 0, full_ = 0;
  std::uint64_t nodes_ = 0, budget_ = 0;
  bool truncated_ = false;
  std::vector<std::uint32_t> path_;
  std::vector<Found>* out_ = nullptr;
};

}  // namespace detail

/// Maximal partial spreads with sizes in `opt.sizes`. Exhaustive and first
/// modes walk line sets in increasing index order, emitting a set only from
/// its own sorted sequence (duplicates up to reordering never appear; no
/// reduction up to projective equivalence is attempted). Sample mode builds
/// random maximal sets by seeded random line choices. Results are sorted and
/// independent of the thread count.
inline SearchResult search_maximal_partial_spreads(const LineTable& T, const SearchOptions& opt) {
  if (opt.sizes.empty()) throw Error(ErrorKind::InvalidArgument, "no target sizes given");
  SearchResult res;
  const std::uint64_t q = T.field->size();
  auto make = [&](const std::vector<std::uint32_t>& idx) {
    PartialSpread S{T.field, {}, false};
    for (auto i : idx) S.lines.push_back(T.lines[i]);
    std::sort(S.lines.begin(), S.lines.end());
    S.maximal = is_maximal(T, S.lines);
    return S;
  };

  if (opt.mode == SearchMode::Sample) {
    std::mt19937_64 rng(opt.seed);
    std::set<std::vector<std::uint32_t>> seen;
    while (res.nodes < opt.node_budget) {
      Bits avail(T.lines.size());
      for (std::size_t i = 0; i < T.lines.size(); ++i) avail.set(i);
      std::vector<std::uint32_t> chosen;
      while (!avail.none() && res.nodes < opt.node_budget) {
        ++res.nodes;
        std::vector<std::uint32_t> cand;
        for (std::size_t i = avail.next(0); i < avail.size(); i = avail.next(i + 1))
          cand.push_back(static_cast<std::uint32_t>(i));
        std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
        const auto l = cand[pick(rng)];
        chosen.push_back(l);
        avail &= T.skew[l];
      }
      if (!avail.none()) break;
      std::sort(chosen.begin(), chosen.end());
      if (chosen.size() < q * q + 1 &&
          std::find(opt.sizes.begin(), opt.sizes.end(), chosen.size()) != opt.sizes.end() &&
          seen.insert(chosen).second) {
        res.spreads.push_back(make(chosen));
        if (opt.max_results && res.spreads.size() >= opt.max_results) break;
      }
    }
    res.truncated = res.nodes >= opt.node_budget;
  } else {
    // top-level branches are independent; each runs with the full budget
    // and the sequential budget is applied afterwards in branch order
    const std::size_t nb = T.lines.size();
    std::vector<std::vector<detail::Found>> found(nb);
    std::vector<std::uint64_t> nodes(nb, 0);
    std::vector<char> trunc(nb, 0);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> done_first{false};
    auto worker = [&]() {
      detail::SpreadSearch s(T, opt);
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nb) return;
        if (opt.mode == SearchMode::First && done_first.load()) return;
        std::uint64_t n = 0;
        bool t = false;
        found[b] = s.branch(static_cast<std::uint32_t>(b), opt.node_budget, n, t);
        nodes[b] = n;
        trunc[b] = t;
        if (opt.threads <= 1) {
          // sequential: stop once the budget or first result is reached
          std::uint64_t total = 0;
          bool any = false;
          for (std::size_t k = 0; k <= b; ++k) {
            total += nodes[k];
            any = any || !found[k].empty();
          }
          if (total > opt.node_budget || (opt.mode == SearchMode::First && any)) {
            next.store(nb);
            return;
          }
        } else if (opt.mode == SearchMode::First && !found[b].empty()) {
          done_first.store(true);
        }
      }
    };
    const unsigned nt = std::max(1u, opt.threads);
    if (nt == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    std::uint64_t used = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      const std::uint64_t remaining = opt.node_budget - used;
      if (remaining == 0) {
        res.truncated = true;
        break;
      }
      bool stop = false;
      for (auto& f : found[b]) {
        if (f.ordinal > remaining) break;
        res.spreads.push_back(make(f.lines));
        if (opt.mode == SearchMode::First) {
          stop = true;
          break;
        }
      }
      if (stop) {
        used += nodes[b];
        break;
      }
      if (nodes[b] >= remaining && (trunc[b] || nodes[b] > remaining)) {
        used = opt.node_budget;
        res.truncated = true;
        break;
      }
      used += nodes[b];
    }
    res.nodes = used;
    if (opt.max_results && res.spreads.size() > opt.max_results) res.spreads.resize(opt.max_results);
  }
  std::sort(res.spreads.begin(), res.spreads.end(),
            [](const PartialSpread& a, const PartialSpread& b) { return a.lines < b.lines; });
  const double lo = std::sqrt(static_cast<double>(q)) + 1;
  const std::uint64_t hi = (q - 1) * (q - 1);
  for (const auto& S : res.spreads) {
    const auto d = S.deficiency();
    if (d < lo || d > hi)
      res.anomalies.push_back("deficiency " + std::to_string(d) + " outside [sqrt(q)+1, (q-1)^2]");
  }
  return res;
}

/// Exact cover of Z by full lines (q+1 points each), or nothing.
inline std::optional<std::vector<ProjectiveLine3>> partition_into_lines(const PointSet& Z, const LineTable& T) {
  const auto& K = *T.field;
  std::vector<char> inZ(T.space.size(), 0);
  for (const auto& p : Z.points) inZ[point_index(K, p)] = 1;
  std::vector<std::uint32_t> cand;
  for (std::size_t l = 0; l < T.lines.size(); ++l) {
    bool all = true;
    for (auto i : T.points_of[l]) all = all && inZ[i];
    if (all) cand.push_back(static_cast<std::uint32_t>(l));
  }
  if (Z.size() % (K.size() + 1)) return std::nullopt;
  std::vector<char> covered(T.space.size(), 0);
  std::vector<std::uint32_t> chosen;
  std::size_t left = Z.size();
  auto rec = [&](auto&& self) -> bool {
    if (left == 0) return true;
    // the uncovered point with the fewest usable lines
    std::size_t best_pt = 0, best_n = ~std::size_t{0};
    for (std::size_t i = 0; i < T.space.size(); ++i) {
      if (!inZ[i] || covered[i]) continue;
      std::size_t n = 0;
      for (auto l : T.lines_at[i]) {
        if (!std::binary_search(cand.begin(), cand.end(), l)) continue;
        bool free = true;
        for (auto j : T.points_of[l]) free = free && !covered[j];
        n += free;
      }
      if (n < best_n) {
        best_n = n;
        best_pt = i;
      }
      if (n == 0) return false;
    }
    for (auto l : T.lines_at[best_pt]) {
      if (!std::binary_search(cand.begin(), cand.end(), l)) continue;
      bool free = true;
      for (auto j : T.points_of[l]) free = free && !covered[j];
      if (!free) continue;
      for (auto j : T.points_of[l]) covered[j] = 1;
      left -= T.points_of[l].size();
      chosen.push_back(l);
      if (self(self)) return true;
      chosen.pop_back();
      left += T.points_of[l].size();
      for (auto j : T.points_of[l]) covered[j] = 0;
    }
    return false;
  };
  if (!rec(rec)) return std::nullopt;
  std::vector<ProjectiveLine3> out;
  for (auto l : chosen) out.push_back(T.lines[l]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace geproci
