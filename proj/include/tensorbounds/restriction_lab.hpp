#pragma once

// Finite-N re-enactment of the restriction argument behind the subrank lower
// bound: type-class restriction of a tensor power, a modular hash filter built
// from an average-free set, and greedy elimination of colliding points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tensorbounds/entropy.hpp"
#include "tensorbounds/errors.hpp"
#include "tensorbounds/linalg.hpp"
#include "tensorbounds/parallel.hpp"
#include "tensorbounds/tensor.hpp"
#include "tensorbounds/tightness.hpp"

namespace tb {

// ---------------------------------------------------------------------------
// Average-free sets

/// True iff a_1 + ... + a_k = k*y with all a_i, y in s forces a_i = y.
/// Counts multisets of size k by sum; any target k*y reached by more than the
/// constant multiset is a violation.
inline bool is_average_free(std::size_t k, const std::vector<std::int64_t>& s) {
  detail::require(k >= 1, "k must be >= 1");
  if (s.empty() || k == 1) return true;
  std::vector<std::int64_t> v = s;
  std::sort(v.begin(), v.end());
  detail::require(std::adjacent_find(v.begin(), v.end()) == v.end(), "set has repeated elements");
  const std::int64_t lo = v.front();
  for (auto& x : v) x -= lo;  // translation does not change the property
  const std::size_t max_sum = static_cast<std::size_t>(v.back()) * k;
  // ways[c][sum], saturated at 2.
  std::vector<std::vector<std::uint8_t>> ways(k + 1, std::vector<std::uint8_t>(max_sum + 1, 0));
  ways[0][0] = 1;
  for (auto e : v)
    for (std::size_t c = 1; c <= k; ++c)
      for (std::size_t sum = static_cast<std::size_t>(e); sum <= max_sum; ++sum) {
        const auto add = ways[c - 1][sum - static_cast<std::size_t>(e)];
        if (add) ways[c][sum] = static_cast<std::uint8_t>(std::min(2, ways[c][sum] + add));
      }
  for (auto y : v)
    if (ways[k][static_cast<std::size_t>(y) * k] > 1) return false;
  return true;
}

struct AverageFreeSet {
  std::size_t k = 2;
  std::int64_t n = 1;
  std::vector<std::int64_t> elements;  // increasing, within [1, n]
};

enum class AverageFreeMode { Exhaustive, Greedy };

inline constexpr std::int64_t kMaxExhaustiveN = 30;

inline AverageFreeSet average_free_set(std::size_t k, std::int64_t n, AverageFreeMode mode) {
  detail::require(k >= 2, "k must be >= 2");
  detail::require(n >= 1, "N must be >= 1");
  AverageFreeSet out{k, n, {}};
  if (mode == AverageFreeMode::Greedy) {
    for (std::int64_t x = 1; x <= n; ++x) {
      out.elements.push_back(x);
      if (!is_average_free(k, out.elements)) out.elements.pop_back();
    }
    return out;
  }
  if (n > kMaxExhaustiveN) throw BudgetExceeded("exhaustive average-free search limited to N <= 30");
  // Branch and bound over inclusion of 1..n; any subset of an average-free set is average-free.
  std::vector<std::int64_t> cur;
  std::function<void(std::int64_t)> dfs = [&](std::int64_t x) {
    if (cur.size() > out.elements.size()) out.elements = cur;
    if (x > n || cur.size() + static_cast<std::size_t>(n - x + 1) <= out.elements.size()) return;
    cur.push_back(x);
    if (is_average_free(k, cur)) dfs(x + 1);
    cur.pop_back();
    dfs(x + 1);
  };
  dfs(1);
  return out;
}

// ---------------------------------------------------------------------------
// Power supports

/// An element of the N-th power support: words[leg][copy] is the leg symbol in that copy.
using PowerPoint = std::vector<std::vector<Index>>;

/// Multinomial N! / prod counts!.
inline Integer multinomial(const std::vector<std::uint64_t>& counts) {
  Integer out = 1;
  std::uint64_t total = 0;
  for (auto c : counts) {
    Integer b;
    total += c;
    mpz_bin_uiui(b.get_mpz_t(), total, c);
    out *= b;
  }
  return out;
}

/// Per-leg counts N * P_i(symbol); throws unless every entry is integral.
inline std::vector<std::vector<std::uint64_t>> marginal_types(const MarginalFamily& m, std::size_t n) {
  std::vector<std::vector<std::uint64_t>> out;
  for (const auto& leg : m) {
    std::vector<std::uint64_t> c;
    for (double p : leg) {
      const double v = p * static_cast<double>(n);
      const double r = std::round(v);
      if (std::abs(v - r) > 1e-9) throw InvalidArgument("marginal type is not integral at this N");
      c.push_back(static_cast<std::uint64_t>(r));
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct TypeRestriction {
  std::vector<PowerPoint> points;     // in lexicographic order of the copy sequence
  std::vector<Integer> leg_class_sizes;  // |T^N_{P_i}| per leg
};

/// Elements of the N-th power whose leg words have the given symbol counts
/// (types[leg][symbol], each summing to N). With `joint` set, the sequence of
/// base points must additionally have joint counts joint[point].
inline TypeRestriction type_class_restrict(const SparseTensor& t, std::size_t n,
                                           const std::vector<std::vector<std::uint64_t>>& types,
                                           const std::optional<std::vector<std::uint64_t>>& joint = std::nullopt) {
  const std::size_t k = t.arity();
  detail::require(n >= 1, "N must be >= 1");
  detail::require(types.size() == k, "types have wrong number of legs");
  TypeRestriction out;
  for (std::size_t l = 0; l < k; ++l) {
    detail::require(types[l].size() == t.dims()[l], "type size does not match leg dimension");
    std::uint64_t s = 0;
    for (auto c : types[l]) s += c;
    detail::require(s == n, "leg type counts must sum to N");
    out.leg_class_sizes.push_back(multinomial(types[l]));
  }
  if (joint) {
    detail::require(joint->size() == t.size(), "joint type does not match support size");
    std::uint64_t s = 0;
    for (auto c : *joint) s += c;
    detail::require(s == n, "joint type counts must sum to N");
  }
  std::vector<std::vector<std::uint64_t>> used(k);
  for (std::size_t l = 0; l < k; ++l) used[l].assign(t.dims()[l], 0);
  std::vector<std::uint64_t> jused(t.size(), 0);
  std::vector<std::size_t> seq;
  std::function<void()> rec = [&] {
    if (seq.size() == n) {
      if (out.points.size() >= kMaxSupport) throw BudgetExceeded("restricted power support too large");
      PowerPoint p(k, std::vector<Index>(n));
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < k; ++l) p[l][j] = t.point(seq[j])[l];
      out.points.push_back(std::move(p));
      return;
    }
    for (std::size_t x = 0; x < t.size(); ++x) {
      const auto& pt = t.point(x);
      bool ok = !joint || jused[x] < (*joint)[x];
      for (std::size_t l = 0; l < k && ok; ++l) ok = used[l][pt[l]] < types[l][pt[l]];
      if (!ok) continue;
      for (std::size_t l = 0; l < k; ++l) ++used[l][pt[l]];
      ++jused[x];
      seq.push_back(x);
      rec();
      seq.pop_back();
      --jused[x];
      for (std::size_t l = 0; l < k; ++l) --used[l][pt[l]];
    }
  };
  rec();
  return out;
}

/// The whole N-th power support, in lexicographic order of the copy sequence.
inline std::vector<PowerPoint> power_points(const SparseTensor& t, std::size_t n) {
  double est = std::pow(static_cast<double>(t.size()), static_cast<double>(n));
  if (est > static_cast<double>(kMaxSupport)) throw BudgetExceeded("power support too large");
  std::vector<PowerPoint> out;
  std::vector<std::size_t> seq(n, 0);
  if (t.empty()) return out;
  while (true) {
    PowerPoint p(t.arity(), std::vector<Index>(n));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < t.arity(); ++l) p[l][j] = t.point(seq[j])[l];
    out.push_back(std::move(p));
    std::size_t j = n;
    while (j-- > 0) {
      if (++seq[j] < t.size()) break;
      seq[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

/// Leg-wise mixed-radix encoding of a power point, first copy most significant;
/// matches the leg indices of tensor_power.
inline Point encode_power_point(const PowerPoint& p, const std::vector<Index>& base_dims) {
  Point out(p.size(), 0);
  for (std::size_t l = 0; l < p.size(); ++l)
    for (auto s : p[l]) out[l] = detail::checked_mul(out[l], base_dims[l], "power point") + s;
  return out;
}

// ---------------------------------------------------------------------------
// Modular hashing

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  for (; e; e >>= 1, a = mulmod(a, a, m))
    if (e & 1) r = mulmod(r, a, m);
  return r;
}

/// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s && comp; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) comp = false;
    }
    if (comp) return false;
  }
  return true;
}

/// Smallest prime >= floor.
inline std::uint64_t next_prime(std::uint64_t floor) {
  std::uint64_t n = std::max<std::uint64_t>(floor, 2);
  while (!is_prime(n)) ++n;
  return n;
}

struct HashConfig {
  std::uint64_t modulus = 0;
  std::vector<std::int64_t> b;   // the accepted hash values
  std::vector<std::uint64_t> u;  // k - 1 offsets
  std::vector<std::uint64_t> v;  // N per-copy randomizers
};

inline std::uint64_t reduce(std::int64_t x, std::uint64_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((x % mm) + mm) % mm);
}

/// Hash values b_1..b_k of a power point under labeling a:
/// b_i = u_i + sum_j a_i(I_ij) v_j for i < k, and
/// b_k = (k-1)^{-1} (sum_i u_i - sum_j a_k(I_kj) v_j), all mod M.
inline std::vector<std::uint64_t> hash_values(const PowerPoint& p, const Labeling& a, const HashConfig& cfg) {
  const std::size_t k = p.size();
  const std::uint64_t m = cfg.modulus;
  std::vector<std::uint64_t> out(k);
  std::uint64_t usum = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    std::uint64_t h = cfg.u[i] % m;
    usum = (usum + cfg.u[i]) % m;
    for (std::size_t j = 0; j < p[i].size(); ++j) h = (h + mulmod(reduce(a[i][p[i][j]], m), cfg.v[j] % m, m)) % m;
    out[i] = h;
  }
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < p[k - 1].size(); ++j) s = (s + mulmod(reduce(a[k - 1][p[k - 1][j]], m), cfg.v[j] % m, m)) % m;
  const std::uint64_t inv = powmod((k - 1) % m, m - 2, m);
  out[k - 1] = mulmod((usum + m - s) % m, inv, m);
  return out;
}

inline void validate_hash_config(const HashConfig& cfg, std::size_t k, std::size_t n) {
  detail::require(k >= 2, "hashing needs arity >= 2");
  if (!is_prime(cfg.modulus)) throw InvalidArgument("modulus " + std::to_string(cfg.modulus) + " is not prime");
  if ((k - 1) % cfg.modulus == 0) throw InvalidArgument("k - 1 is not invertible modulo M");
  detail::require(cfg.u.size() == k - 1, "need k - 1 offsets");
  detail::require(cfg.v.size() == n, "need one randomizer per copy");
  for (auto x : cfg.b) {
    detail::require(x >= 0, "hash values must be nonnegative");
    if (static_cast<unsigned __int128>(x) * (k - 1) >= cfg.modulus)
      throw InvalidArgument("max(B) must be below M / (k - 1)");
  }
  if (k >= 3) detail::require(is_average_free(k - 1, cfg.b), "B must be (k-1)-average-free");
}

/// Keeps the points whose k hash values all lie in B. Survivors are checked to
/// have equal hash values on every leg.
inline std::vector<PowerPoint> hash_filter(const std::vector<PowerPoint>& psi, const Labeling& a, const HashConfig& cfg) {
  std::vector<PowerPoint> out;
  if (psi.empty()) return out;
  const std::size_t k = psi.front().size();
  validate_hash_config(cfg, k, psi.front().front().size());
  std::vector<bool> in_b(cfg.modulus, false);
  for (auto x : cfg.b) in_b[static_cast<std::size_t>(x)] = true;
  for (const auto& p : psi) {
    const auto h = hash_values(p, a, cfg);
    bool keep = true;
    for (auto x : h) keep = keep && in_b[x];
    if (!keep) continue;
    for (auto x : h)
      if (x != h.front()) throw Error("hash filter survivor with unequal hash values; labeling is not tight");
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collision elimination

struct DiagonalResult {
  std::vector<std::size_t> selected;  // indices into the input, in input order
  std::size_t x = 0;                  // number of input points
  std::size_t y = 0;                  // unordered pairs agreeing in some coordinate
};

/// One point per connected component of the collision graph (points adjacent
/// when they agree in some coordinate), the first in the given order.
inline DiagonalResult greedy_diagonal(const std::vector<Point>& pts) {
  DiagonalResult out;
  out.x = pts.size();
  if (pts.empty()) return out;
  const std::size_t k = pts.front().size();
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::vector<std::map<Index, std::vector<std::size_t>>> buckets(k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    detail::require(pts[i].size() == k, "points have different arity");
    for (std::size_t l = 0; l < k; ++l) buckets[l][pts[i][l]].push_back(i);
  }
  for (const auto& legs : buckets)
    for (const auto& [v, members] : legs)
      for (std::size_t j = 1; j < members.size(); ++j) {
        const auto a = find(members[0]), b = find(members[j]);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<bool> taken(pts.size(), false);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto r = find(i);
    if (!taken[r]) {
      taken[r] = true;
      out.selected.push_back(i);
    }
  }
  std::vector<std::size_t> mark(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t l = 0; l < k; ++l)
      for (auto j : buckets[l][pts[i][l]])
        if (j > i && mark[j] != i) {
          mark[j] = i;
          ++out.y;
        }
  if (out.selected.size() + out.y < out.x) throw Error("diagonal smaller than |points| - |collisions|");
  return out;
}

inline std::vector<Point> encode_all(const std::vector<PowerPoint>& psi, const std::vector<Index>& base_dims) {
  std::vector<Point> out;
  out.reserve(psi.size());
  for (const auto& p : psi) out.push_back(encode_power_point(p, base_dims));
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end experiment

struct ExperimentOptions {
  bool restrict_types = true;
  bool hash = true;
  std::optional<std::uint64_t> modulus;  // default: smallest prime >= max(k, 2)
  std::size_t workers = 1;
};

struct TrialReport {
  std::size_t trial = 0;
  std::uint64_t modulus = 0;
  std::size_t b_size = 0;
  std::size_t survivors = 0;   // X
  std::size_t collisions = 0;  // Y
  std::size_t diagonal = 0;
  double rate = 0;
};

struct ExperimentReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t psi_size = 0;
  double best_rate = 0;
  std::size_t best_size = 0;
  std::optional<double> target_bound;
  std::vector<TrialReport> per_trial;
};

inline double diagonal_rate(std::size_t size, std::size_t n) {
  return std::log2(static_cast<double>(std::max<std::size_t>(size, 1))) / static_cast<double>(n);
}

/// Per trial: sample u, v (seeded from seed and the trial index), hash-filter
/// the type-restricted power support, then take the greedy diagonal.
inline ExperimentReport run_cw_experiment(const SparseTensor& t, std::size_t n, std::size_t trials, std::uint64_t seed,
                                          const ExperimentOptions& opt = {}) {
  detail::require(n >= 1 && trials >= 1, "need N >= 1 and at least one trial");
  const std::size_t k = t.arity();
  const Labeling a = require_labeling(t, seed);
  std::vector<PowerPoint> psi;
  if (opt.restrict_types) {
    const auto m = marginals(t, uniform_distribution(t.size()));
    psi = type_class_restrict(t, n, marginal_types(m, n)).points;
  } else {
    psi = power_points(t, n);
  }
  ExperimentReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.psi_size = psi.size();
  rep.per_trial.resize(trials);
  const std::uint64_t modulus = opt.modulus.value_or(next_prime(std::max<std::uint64_t>(k, 2)));
  std::vector<std::int64_t> b;
  if (opt.hash) {
    const auto top = static_cast<std::int64_t>((modulus - 1) / (k - 1));
    // Greedy (k-1)-average-free set inside [0, top].
    const auto af = average_free_set(std::max<std::size_t>(k - 1, 2), top + 1, AverageFreeMode::Greedy);
    for (auto x : af.elements) b.push_back(x - 1);
  }
  parallel_for(trials, opt.workers, [&](std::size_t tr) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(tr), static_cast<std::uint32_t>(tr >> 32)};
    std::mt19937_64 rng(sq);
    TrialReport r;
    r.trial = tr;
    std::vector<PowerPoint> kept;
    if (opt.hash) {
      std::uniform_int_distribution<std::uint64_t> unif(0, modulus - 1);
      HashConfig cfg{modulus, b, {}, {}};
      for (std::size_t i = 0; i + 1 < k; ++i) cfg.u.push_back(unif(rng));
      for (std::size_t j = 0; j < n; ++j) cfg.v.push_back(unif(rng));
      kept = hash_filter(psi, a, cfg);
      r.modulus = modulus;
      r.b_size = b.size();
    } else {
      kept = psi;
    }
    const auto enc = encode_all(kept, t.dims());
    const auto d = greedy_diagonal(enc);
    for (std::size_t i = 0; i < d.selected.size(); ++i)
      for (std::size_t j = i + 1; j < d.selected.size(); ++j)
        for (std::size_t l = 0; l < k; ++l)
          if (enc[d.selected[i]][l] == enc[d.selected[j]][l]) throw Error("diagonal points collide");
    r.survivors = d.x;
    r.collisions = d.y;
    r.diagonal = d.selected.size();
    r.rate = diagonal_rate(r.diagonal, n);
    rep.per_trial[tr] = r;
  });
  for (const auto& r : rep.per_trial)
    if (r.diagonal > rep.best_size) rep.best_size = r.diagonal;
  rep.best_rate = diagonal_rate(rep.best_size, n);
  return rep;
}

}  // namespace tb
