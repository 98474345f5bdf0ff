#pragma once

// Reference implementations used only by the tests. Each one recomputes a library
// result from first principles by exhaustive search, without sharing code paths.

#include <algorithm>
#include <bit>
#include <tuple>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "phicert/admissibility.hpp"
#include "phicert/lattice.hpp"
#include "phicert/local_symbols.hpp"
#include "phicert/rational.hpp"

namespace oracle {

using phicert::Rat;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }
  bool coin() { return uniform(0, 1) == 1; }
  Rat rat(std::int64_t max_abs_num, std::int64_t max_den) {
    return Rat(static_cast<long>(uniform(-max_abs_num, max_abs_num)), static_cast<long>(uniform(1, max_den)));
  }
  Rat nonzero_rat(std::int64_t max_abs_num, std::int64_t max_den) {
    Rat r;
    do r = rat(max_abs_num, max_den);
    while (r.is_zero());
    return r;
  }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))]; }
  std::vector<std::int64_t> sorted_row(int n, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> r(n);
    for (auto& x : r) x = uniform(lo, hi);
    std::sort(r.begin(), r.end());
    return r;
  }
  phicert::SignedPerm signed_perm(phicert::WeylType type, int n) {
    std::vector<int> img(n);
    std::iota(img.begin(), img.end(), 1);
    std::shuffle(img.begin(), img.end(), gen_);
    int flips = 0;
    for (auto& x : img)
      if (coin()) {
        x = -x;
        ++flips;
      }
    if (type == phicert::WeylType::D && flips % 2 == 1) img[0] = -img[0];
    return phicert::SignedPerm(type, img);
  }
  std::mt19937_64& engine() { return gen_; }

private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Hilbert symbol by solving z^2 = a x^2 + b y^2.

inline std::int64_t ipow(std::int64_t b, int k) {
  std::int64_t r = 1;
  while (k-- > 0) r *= b;
  return r;
}

// Integer in the square class of q with p-adic valuation 0 or 1.
inline mpz_class square_free_part_at(const Rat& q, std::int64_t p) {
  mpz_class v = q.num() * q.den();
  const mpz_class pp = p * p;
  while (v % pp == 0) v /= pp;
  return v;
}

class HilbertOracle {
public:
  int operator()(const Rat& a, const Rat& b, std::int64_t p) {
    if (p == 0) return (a.sign() < 0 && b.sign() < 0) ? -1 : 1;
    const int K = p == 2 ? 5 : 3;
    const std::int64_t M = ipow(p, K);
    const auto& tab = tables(p, M);
    const std::int64_t A = canonical(square_free_part_at(a, p), M, tab);
    const std::int64_t B = canonical(square_free_part_at(b, p), M, tab);
    const auto key = std::make_tuple(p, A, B);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const int r = solve(A, B, p, M, tab) ? 1 : -1;
    memo_[key] = r;
    return r;
  }

private:
  struct Tables {
    std::vector<char> any_square, unit_square;
    std::vector<std::int64_t> unit_squares;
  };

  const Tables& tables(std::int64_t p, std::int64_t M) {
    auto [it, fresh] = tables_.try_emplace(p);
    if (fresh) {
      Tables& t = it->second;
      t.any_square.assign(M, 0);
      t.unit_square.assign(M, 0);
      for (std::int64_t z = 0; z < M; ++z) {
        const std::int64_t s = z * z % M;
        t.any_square[s] = 1;
        if (z % p != 0) t.unit_square[s] = 1;
      }
      for (std::int64_t s = 0; s < M; ++s)
        if (t.unit_square[s]) t.unit_squares.push_back(s);
    }
    return it->second;
  }

  // Smallest representative of {a * s mod M : s a unit square}; scaling a by a unit
  // square is the substitution x -> x / u and does not change solvability.
  static std::int64_t canonical(const mpz_class& a, std::int64_t M, const Tables& t) {
    mpz_class r = a % M;
    if (r < 0) r += M;
    const std::int64_t base = r.get_si();
    std::int64_t best = M;
    for (auto s : t.unit_squares) best = std::min(best, base * s % M);
    return best;
  }

  static bool solve(std::int64_t A, std::int64_t B, std::int64_t p, std::int64_t M, const Tables& t) {
    for (std::int64_t x = 0; x < M; ++x) {
      const std::int64_t ax = A * (x * x % M) % M;
      for (std::int64_t y = 0; y < M; ++y) {
        const std::int64_t v = (ax + B * (y * y % M)) % M;
        const bool primitive_xy = x % p != 0 || y % p != 0;
        if (primitive_xy ? t.any_square[v] : t.unit_square[v]) return true;
      }
    }
    return false;
  }

  std::map<std::int64_t, Tables> tables_;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, int> memo_;
};

// ---------------------------------------------------------------------------
// Newton above Hodge over all subsets: every subset's slope sum dominates the smallest
// possible Hodge contribution of that size, with equality for the full set.

inline bool newton_above_hodge_all_subsets(const phicert::PhiModuleDatum& d) {
  const int n = d.rank();
  std::vector<std::vector<std::int64_t>> rows = d.weights();
  for (auto& r : rows) std::sort(r.begin(), r.end());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    Rat newton;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) newton += d.slopes()[i];
    std::int64_t least = 0;
    for (const auto& r : rows)
      for (int x = 0; x < size; ++x) least += r[x];
    const Rat hodge = Rat(static_cast<long>(least), static_cast<long>(d.e()));
    if (newton < hodge) return false;
    if (size == n && newton != hodge) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Candidate enumeration over all subsets and all tuples of permutations.

inline bool prefixes_dominate(const phicert::PhiModuleDatum& d, const std::vector<int>& part,
                              const std::vector<std::vector<int>>& theta) {
  Rat newton, hodge;
  for (int i : part) {
    newton += d.slopes()[i - 1];
    for (int s = 0; s < d.embeddings(); ++s)
      hodge += Rat(static_cast<long>(d.weights()[s][theta[s][i - 1] - 1]), static_cast<long>(d.e()));
    if (newton < hodge) return false;
  }
  return newton == hodge;
}

inline std::set<std::pair<std::vector<int>, std::vector<std::vector<int>>>> all_candidates(
    const phicert::PhiModuleDatum& d) {
  const int n = d.rank();
  const int E = d.embeddings();
  std::vector<std::vector<int>> perms;
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 1);
  do perms.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));

  std::set<std::pair<std::vector<int>, std::vector<std::vector<int>>>> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> in, rest;
    for (int i = 0; i < n; ++i) ((mask & (1u << i)) ? in : rest).push_back(i + 1);
    std::vector<std::size_t> idx(E, 0);
    while (true) {
      std::vector<std::vector<int>> theta;
      for (int s = 0; s < E; ++s) theta.push_back(perms[idx[s]]);
      if (prefixes_dominate(d, in, theta) && prefixes_dominate(d, rest, theta)) {
        // Only the image sets matter; record theta in its canonical order-preserving form.
        std::vector<std::vector<int>> canon;
        for (const auto& th : theta) {
          std::vector<int> img_in, img_rest;
          for (int i : in) img_in.push_back(th[i - 1]);
          for (int i : rest) img_rest.push_back(th[i - 1]);
          std::sort(img_in.begin(), img_in.end());
          std::sort(img_rest.begin(), img_rest.end());
          std::vector<int> c(n);
          for (std::size_t x = 0; x < in.size(); ++x) c[in[x] - 1] = img_in[x];
          for (std::size_t x = 0; x < rest.size(); ++x) c[rest[x] - 1] = img_rest[x];
          canon.push_back(std::move(c));
        }
        out.insert({in, canon});
      }
      int pos = E - 1;
      while (pos >= 0 && idx[pos] + 1 == perms.size()) idx[pos--] = 0;
      if (pos < 0) break;
      ++idx[pos];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Congruence pinning by listing every pair.

inline bool pairs_pinned(std::int64_t t_bound, std::int64_t modulus) {
  for (std::int64_t t = -t_bound; t <= t_bound; ++t)
    for (std::int64_t u = -t_bound; u <= t_bound; ++u)
      if (t != u && (t - u) % modulus == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Squarefree integers that are not squares in Q_p.

inline std::vector<std::int64_t> nonsplit_discriminants(std::int64_t p, std::int64_t limit) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = -limit; d <= limit; ++d) {
    if (d == 0 || d == 1 || !phicert::is_squarefree(d)) continue;
    // A squarefree d is a p-adic square iff it is a unit square modulo p^3 (p^5 for p = 2).
    const std::int64_t M = ipow(p, p == 2 ? 5 : 3);
    mpz_class r = d % M;
    if (r < 0) r += M;
    bool square = false;
    if (d % p != 0)
      for (std::int64_t z = 1; z < M && !square; ++z)
        if (z % p != 0 && (z * z - r.get_si()) % M == 0) square = true;
    if (!square) out.push_back(d);
  }
  return out;
}

}  // namespace oracle
