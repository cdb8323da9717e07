#pragma once

// Independent reference computations for the test suites. Nothing here
// calls into the library's arithmetic beyond reading field parameters.

#include <algorithm>
#include <bitset>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using u64 = std::uint64_t;

/// Prime field arithmetic by the definition.
struct Zp {
  u64 p;
  u64 add(u64 a, u64 b) const { return (a + b) % p; }
  u64 sub(u64 a, u64 b) const { return (a + p - b) % p; }
  u64 mul(u64 a, u64 b) const { return a * b % p; }
  u64 pow(u64 a, u64 e) const {
    u64 r = 1;
    for (; e; e >>= 1, a = mul(a, a))
      if (e & 1) r = mul(r, a);
    return r;
  }
  u64 inv(u64 a) const { return pow(a, p - 2); }
};

/// F_p[t]/(mod) with elements as coefficient vectors, schoolbook product.
struct PolyField {
  Zp z;
  std::vector<u64> mod;  // monic, low to high

  unsigned k() const { return static_cast<unsigned>(mod.size() - 1); }

  std::vector<u64> mul(const std::vector<u64>& a, const std::vector<u64>& b) const {
    std::vector<u64> r(2 * k(), 0);
    for (unsigned i = 0; i < k(); ++i)
      for (unsigned j = 0; j < k(); ++j) r[i + j] = z.add(r[i + j], z.mul(a[i], b[j]));
    for (unsigned d = 2 * k() - 1; d >= k(); --d) {
      const u64 c = r[d];
      if (!c) continue;
      for (unsigned i = 0; i <= k(); ++i) r[d - k() + i] = z.sub(r[d - k() + i], z.mul(c, mod[i]));
    }
    r.resize(k());
    return r;
  }
  std::vector<u64> add(const std::vector<u64>& a, const std::vector<u64>& b) const {
    std::vector<u64> r(k());
    for (unsigned i = 0; i < k(); ++i) r[i] = z.add(a[i], b[i]);
    return r;
  }
};

/// Rank of a matrix over Z/p by plain Gaussian elimination.
inline std::size_t rank_mod_p(std::vector<std::vector<u64>> m, u64 p) {
  Zp z{p};
  std::size_t r = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][c] % p == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    const u64 iv = z.inv(m[r][c] % p);
    for (auto& x : m[r]) x = z.mul(x % p, iv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] % p == 0) continue;
      const u64 f = m[i][c] % p;
      for (std::size_t j = 0; j < cols; ++j) m[i][j] = z.sub(m[i][j] % p, z.mul(f, m[r][j]));
    }
    ++r;
  }
  return r;
}

inline u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

/// Binomial coefficients from Pascal's triangle.
inline u64 choose(unsigned n, unsigned k) {
  std::vector<std::vector<u64>> t(n + 1);
  for (unsigned i = 0; i <= n; ++i) {
    t[i].assign(i + 1, 1);
    for (unsigned j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
  }
  return k > n ? 0 : t[n][k];
}

/// All points of P^n(F_p), first nonzero coordinate 1.
inline std::vector<std::vector<u64>> projective_points(u64 p, unsigned n) {
  std::vector<std::vector<u64>> out;
  std::vector<u64> v(n + 1, 0);
  for (u64 code = 1; code < ipow(p, n + 1); ++code) {
    u64 c = code;
    for (unsigned i = 0; i <= n; ++i) {
      v[n - i] = c % p;
      c /= p;
    }
    auto it = std::find_if(v.begin(), v.end(), [](u64 x) { return x != 0; });
    if (*it == 1) out.push_back(v);
  }
  return out;
}

/// Number of degree-d monomials vanishing conditions a prime-field point set
/// imposes, counted by evaluating every monomial at every point.
inline std::size_t hilbert_mod_p(const std::vector<std::vector<u64>>& pts, unsigned nvars, unsigned d, u64 p) {
  std::vector<std::vector<unsigned>> mons;
  std::vector<unsigned> e(nvars, 0);
  std::function<void(unsigned, unsigned)> gen = [&](unsigned i, unsigned left) {
    if (i + 1 == nvars) {
      e[i] = left;
      mons.push_back(e);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      e[i] = a;
      gen(i + 1, left - a);
    }
  };
  gen(0, d);
  Zp z{p};
  std::vector<std::vector<u64>> m;
  for (const auto& pt : pts) {
    std::vector<u64> row;
    for (const auto& mon : mons) {
      u64 v = 1;
      for (unsigned i = 0; i < nvars; ++i) v = z.mul(v, z.pow(pt[i], mon[i]));
      row.push_back(v);
    }
    m.push_back(row);
  }
  return mons.size() - rank_mod_p(m, p);
}

/// Same count for simple and doubled points: a doubled point (p, v) adds
/// the row of directional derivatives sum_i v_i * dm/dx_i (p).
inline std::size_t hilbert_fat_mod_p(const std::vector<std::vector<u64>>& simple,
                                     const std::vector<std::pair<std::vector<u64>, std::vector<u64>>>& doubled,
                                     unsigned nvars, unsigned d, u64 p) {
  std::vector<std::vector<unsigned>> mons;
  std::vector<unsigned> e(nvars, 0);
  std::function<void(unsigned, unsigned)> gen = [&](unsigned i, unsigned left) {
    if (i + 1 == nvars) {
      e[i] = left;
      mons.push_back(e);
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      e[i] = a;
      gen(i + 1, left - a);
    }
  };
  gen(0, d);
  Zp z{p};
  auto value = [&](const std::vector<u64>& pt, const std::vector<unsigned>& mon) {
    u64 v = 1;
    for (unsigned i = 0; i < nvars; ++i) v = z.mul(v, z.pow(pt[i], mon[i]));
    return v;
  };
  std::vector<std::vector<u64>> m;
  auto add_point = [&](const std::vector<u64>& pt) {
    std::vector<u64> row;
    for (const auto& mon : mons) row.push_back(value(pt, mon));
    m.push_back(row);
  };
  for (const auto& pt : simple) add_point(pt);
  for (const auto& [pt, dir] : doubled) {
    add_point(pt);
    std::vector<u64> row;
    for (const auto& mon : mons) {
      u64 s = 0;
      for (unsigned i = 0; i < nvars; ++i) {
        if (mon[i] == 0 || dir[i] == 0) continue;
        auto lower = mon;
        --lower[i];
        s = z.add(s, z.mul(z.mul(dir[i], mon[i] % p), value(pt, lower)));
      }
      row.push_back(s);
    }
    m.push_back(row);
  }
  return mons.size() - rank_mod_p(m, p);
}

/// Maximal cliques of a graph on at most 256 vertices, counted by size
/// (Bron-Kerbosch with pivoting).
inline std::map<std::size_t, std::size_t> maximal_clique_sizes(const std::vector<std::bitset<256>>& adj, std::size_t n) {
  std::map<std::size_t, std::size_t> out;
  std::function<void(std::size_t, std::bitset<256>, std::bitset<256>)> bk = [&](std::size_t r, std::bitset<256> P,
                                                                               std::bitset<256> X) {
    if (P.none()) {
      if (X.none()) ++out[r];
      return;
    }
    std::size_t pivot = 0, best = 0;
    const auto PX = P | X;
    for (std::size_t u = 0; u < n; ++u) {
      if (!PX[u]) continue;
      const auto c = (P & adj[u]).count();
      if (c >= best) {
        best = c;
        pivot = u;
      }
    }
    const auto cand = P & ~adj[pivot];
    for (std::size_t v = 0; v < n; ++v) {
      if (!cand[v]) continue;
      bk(r + 1, P & adj[v], X & adj[v]);
      P.reset(v);
      X.set(v);
    }
  };
  std::bitset<256> all;
  for (std::size_t i = 0; i < n; ++i) all.set(i);
  bk(0, all, {});
  return out;
}

}  // namespace oracle
