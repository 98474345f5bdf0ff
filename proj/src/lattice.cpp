#include "phicert/lattice.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "phicert/errors.hpp"

namespace phicert {

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

LocalDatum::LocalDatum(std::int64_t p, int e, int f) : p_(p), e_(e), f_(f) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime, got " + std::to_string(p));
  if (e < 1 || f < 1) throw std::invalid_argument("e and f must be at least 1");
}

mpz_class LocalDatum::residue_cardinality() const {
  mpz_class q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(f_));
  return q;
}

WeightTable::WeightTable(int rank, std::vector<std::vector<std::int64_t>> rows)
    : rank_(rank), rows_(std::move(rows)) {
  if (rank < 0) throw std::invalid_argument("negative rank");
  for (const auto& r : rows_) {
    if (static_cast<int>(r.size()) != rank) throw std::invalid_argument("weight row has wrong length");
    for (int i = 0; i + 1 < rank; ++i)
      if (r[i] < r[i + 1]) throw std::invalid_argument("weights are not dominant");
    if (rank > 0 && r.back() < 0) throw std::invalid_argument("weights are not dominant");
  }
}

std::int64_t WeightTable::at(int sigma, int i) const {
  if (i == 0) return 0;
  if (i < 0) return -at(sigma, -i);
  if (i > rank_) throw std::out_of_range("weight index out of range");
  return rows_.at(sigma)[i - 1];
}

std::int64_t WeightTable::column_sum(int i) const {
  std::int64_t s = 0;
  for (int sigma = 0; sigma < embeddings(); ++sigma) s += at(sigma, i);
  return s;
}

std::vector<std::int64_t> WeightTable::flat() const {
  std::vector<std::int64_t> out;
  for (const auto& r : rows_) out.insert(out.end(), r.begin(), r.end());
  return out;
}

bool satisfies(const LinearForm& form, const WeightTable& w) {
  const auto y = w.flat();
  if (form.coefficients.size() != y.size()) throw std::invalid_argument("form length mismatch");
  mpz_class acc = 0;
  for (std::size_t c = 0; c < y.size(); ++c)
    acc += mpz_class(static_cast<long>(form.coefficients[c])) * static_cast<long>(y[c]);
  return Rat(acc) > form.bound;
}

namespace {

using i128 = __int128;

// Depth-first search in gap coordinates g[sigma][j] = k[sigma][j] - k[sigma][j+1]
// (g[sigma][n] = k[sigma][n]), where dominance becomes g >= 0 and the coordinate sum is
// sum_j j * g[sigma][j].
class ConeSearch {
public:
  ConeSearch(std::span<const LinearForm> forms, int rank, int embeddings)
      : n_(rank), E_(embeddings), V_(rank * embeddings) {
    const std::size_t coords = static_cast<std::size_t>(V_);
    lo_.assign(V_, 0);
    hi_.assign(V_, std::numeric_limits<std::int64_t>::max());
    weight_.resize(V_);
    for (int v = 0; v < V_; ++v) weight_[v] = v % n_ + 1;
    for (const auto& form : forms) {
      if (form.coefficients.size() != coords)
        throw std::invalid_argument("form has " + std::to_string(form.coefficients.size()) +
                                    " coefficients, expected " + std::to_string(coords));
      std::vector<std::int64_t> b(V_, 0);
      for (int s = 0; s < E_; ++s) {
        std::int64_t acc = 0;
        for (int j = 0; j < n_; ++j) {
          acc += form.coefficients[s * n_ + j];
          b[s * n_ + j] = acc;
        }
      }
      const std::int64_t threshold = to_int64(form.bound.floor()) + 1;
      int nonzero = 0, last = -1;
      for (int v = 0; v < V_; ++v)
        if (b[v] != 0) { ++nonzero; last = v; }
      if (nonzero == 0) {
        if (threshold > 0) infeasible_ = true;
        continue;
      }
      if (nonzero == 1) {
        const std::int64_t c = b[last];
        if (c > 0) {
          lo_[last] = std::max(lo_[last], ceil_div(threshold, c));
        } else {
          hi_[last] = std::min(hi_[last], floor_div(threshold, c));
        }
        continue;
      }
      b_.push_back(std::move(b));
      threshold_.push_back(threshold);
    }
    for (int v = 0; v < V_; ++v)
      if (lo_[v] > hi_[v]) infeasible_ = true;

    for (int s = E_ - 1; s >= 0; --s)
      for (int j = n_ - 1; j >= 0; --j) order_.push_back(s * n_ + j);

    const std::size_t F = b_.size();
    std::vector<bool> used(V_, false);
    for (std::size_t f = 0; f < F; ++f) {
      bool ok = true;
      for (int v = 0; v < V_ && ok; ++v) ok = b_[f][v] >= 0 && !(b_[f][v] > 0 && used[v]);
      if (!ok) continue;
      for (int v = 0; v < V_; ++v)
        if (b_[f][v] > 0) used[v] = true;
      disjoint_.push_back(f);
    }
    min_cost_.assign(V_ + 1, 0);
    base_.assign(F, std::vector<i128>(V_ + 1, 0));
    best_num_.assign(F, std::vector<std::int64_t>(V_ + 1, 0));
    best_den_.assign(F, std::vector<std::int64_t>(V_ + 1, 0));
    for (int pos = V_ - 1; pos >= 0; --pos) {
      const int v = order_[pos];
      min_cost_[pos] = min_cost_[pos + 1] + static_cast<i128>(weight_[v]) * lo_[v];
      for (std::size_t f = 0; f < F; ++f) {
        base_[f][pos] = base_[f][pos + 1] + static_cast<i128>(b_[f][v]) * lo_[v];
        const std::int64_t num = b_[f][v], den = weight_[v];
        const bool better = best_den_[f][pos + 1] == 0 ||
                            static_cast<i128>(num) * best_den_[f][pos + 1] >
                                static_cast<i128>(best_num_[f][pos + 1]) * den;
        best_num_[f][pos] = better ? num : best_num_[f][pos + 1];
        best_den_[f][pos] = better ? den : best_den_[f][pos + 1];
      }
    }
  }

  std::optional<WeightTable> run(std::int64_t radius) {
    if (infeasible_ || V_ == 0) {
      if (!infeasible_ && V_ == 0) return WeightTable(n_, std::vector<std::vector<std::int64_t>>(E_));
      return std::nullopt;
    }
    if (min_cost_[0] > radius) return std::nullopt;
    value_.assign(V_, 0);
    partial_.assign(b_.size(), 0);
    for (std::int64_t s = static_cast<std::int64_t>(min_cost_[0]); s <= radius; ++s) {
      if (dfs(0, s)) return to_table();
    }
    return std::nullopt;
  }

private:
  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }
  static std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

  bool bound_ok(int pos, i128 remaining) const {
    const i128 slack = remaining - min_cost_[pos];
    if (slack < 0) return false;
    for (std::size_t f = 0; f < b_.size(); ++f) {
      const i128 need = static_cast<i128>(threshold_[f]) - partial_[f] - base_[f][pos];
      // Largest reachable value of the form when the slack is spent optimally.
      if (static_cast<i128>(best_num_[f][pos]) * slack < need * best_den_[f][pos]) return false;
    }
    // Forms with disjoint nonnegative supports draw on separate coordinates, so the
    // slack has to cover the sum of their individual costs.
    i128 joint = 0;
    for (std::size_t f : disjoint_) {
      const i128 need = static_cast<i128>(threshold_[f]) - partial_[f] - base_[f][pos];
      if (need <= 0) continue;
      const i128 num = need * best_den_[f][pos], den = best_num_[f][pos];
      joint += (num + den - 1) / den;
      if (joint > slack) return false;
    }
    return true;
  }

  bool dfs(int pos, i128 remaining) {
    if (!bound_ok(pos, remaining)) return false;
    const int v = order_[pos];
    if (pos == V_ - 1) {
      if (remaining % weight_[v] != 0) return false;
      const i128 g = remaining / weight_[v];
      if (g < lo_[v] || g > hi_[v]) return false;
      for (std::size_t f = 0; f < b_.size(); ++f)
        if (partial_[f] + static_cast<i128>(b_[f][v]) * g < threshold_[f]) return false;
      value_[v] = static_cast<std::int64_t>(g);
      return true;
    }
    i128 top = (remaining - min_cost_[pos + 1]) / weight_[v];
    if (top > hi_[v]) top = hi_[v];
    for (i128 g = top; g >= lo_[v]; --g) {
      for (std::size_t f = 0; f < b_.size(); ++f) partial_[f] += static_cast<i128>(b_[f][v]) * g;
      value_[v] = static_cast<std::int64_t>(g);
      const bool found = dfs(pos + 1, remaining - g * weight_[v]);
      for (std::size_t f = 0; f < b_.size(); ++f) partial_[f] -= static_cast<i128>(b_[f][v]) * g;
      if (found) return true;
    }
    return false;
  }

  WeightTable to_table() const {
    std::vector<std::vector<std::int64_t>> rows(E_, std::vector<std::int64_t>(n_));
    for (int s = 0; s < E_; ++s) {
      std::int64_t acc = 0;
      for (int j = n_ - 1; j >= 0; --j) {
        acc += value_[s * n_ + j];
        rows[s][j] = acc;
      }
    }
    return WeightTable(n_, std::move(rows));
  }

  int n_, E_, V_;
  bool infeasible_ = false;
  std::vector<std::int64_t> lo_, hi_;
  std::vector<int> weight_;
  std::vector<int> order_;
  std::vector<std::vector<std::int64_t>> b_;
  std::vector<std::int64_t> threshold_;
  std::vector<std::size_t> disjoint_;
  std::vector<i128> min_cost_;
  std::vector<std::vector<i128>> base_;
  std::vector<std::vector<std::int64_t>> best_num_, best_den_;
  std::vector<std::int64_t> value_;
  std::vector<i128> partial_;
};

}  // namespace

WeightTable cone_find(std::span<const LinearForm> forms, int rank, int embeddings, std::int64_t radius) {
  if (rank < 0 || embeddings < 1) throw std::invalid_argument("bad cone dimensions");
  ConeSearch search(forms, rank, embeddings);
  auto found = search.run(radius);
  if (!found) throw EmptyCone("no dominant integral point within radius " + std::to_string(radius));
  return *found;
}

bool very_regular(const WeightTable& weights, const Rat& bound) {
  for (int s = 0; s < weights.embeddings(); ++s) {
    for (int i = 1; i <= weights.rank(); ++i) {
      const std::int64_t gap = weights.at(s, i) - (i < weights.rank() ? weights.at(s, i + 1) : 0);
      if (Rat(gap) < bound) return false;
    }
  }
  return true;
}

bool very_regular(std::span<const WeightTable> weights, const Rat& bound) {
  return std::all_of(weights.begin(), weights.end(),
                     [&](const WeightTable& w) { return very_regular(w, bound); });
}

std::string to_string(WeylType t) { return t == WeylType::C ? "C" : "D"; }

SignedPerm::SignedPerm(WeylType type, std::vector<int> images) : type_(type), images_(std::move(images)) {
  const int n = rank();
  std::vector<bool> seen(n + 1, false);
  int flips = 0;
  for (int v : images_) {
    const int a = v < 0 ? -v : v;
    if (a < 1 || a > n || seen[a]) throw std::invalid_argument("not a signed permutation");
    seen[a] = true;
    if (v < 0) ++flips;
  }
  if (type_ == WeylType::D && flips % 2 != 0)
    throw std::invalid_argument("odd number of sign changes is not in type D");
}

SignedPerm SignedPerm::identity(WeylType type, int n) {
  std::vector<int> im(n);
  std::iota(im.begin(), im.end(), 1);
  return SignedPerm(type, std::move(im));
}

int SignedPerm::operator()(int i) const {
  if (i == 0) return 0;
  if (i < 0) return -(*this)(-i);
  return images_.at(i - 1);
}

SignedPerm SignedPerm::inverse() const {
  std::vector<int> im(images_.size());
  for (int i = 1; i <= rank(); ++i) {
    const int w = images_[i - 1];
    if (w > 0) im[w - 1] = i;
    else im[-w - 1] = -i;
  }
  return SignedPerm(type_, std::move(im));
}

SignedPerm operator*(const SignedPerm& a, const SignedPerm& b) {
  if (a.rank() != b.rank() || a.type() != b.type()) throw std::invalid_argument("incompatible Weyl elements");
  std::vector<int> im(a.rank());
  for (int i = 1; i <= a.rank(); ++i) im[i - 1] = a(b(i));
  return SignedPerm(a.type(), std::move(im));
}

std::string SignedPerm::str() const {
  std::ostringstream os;
  os << to_string(type_) << "{";
  for (int i = 1; i <= rank(); ++i) os << (i > 1 ? ", " : "") << i << "->" << images_[i - 1];
  os << "}";
  return os.str();
}

std::vector<SignedPerm> weyl_elements(WeylType type, int n) {
  if (n < 1) throw std::invalid_argument("rank must be at least 1");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<SignedPerm> out;
  do {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      if (type == WeylType::D && std::popcount(mask) % 2 != 0) continue;
      std::vector<int> im(perm);
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) im[i] = -im[i];
      out.emplace_back(type, std::move(im));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::optional<SignedPerm> minus_identity(WeylType type, int n) {
  if (n < 1) throw std::invalid_argument("rank must be at least 1");
  if (type == WeylType::D && n % 2 != 0) return std::nullopt;
  std::vector<int> im(n);
  for (int i = 0; i < n; ++i) im[i] = -(i + 1);
  return SignedPerm(type, std::move(im));
}

SignedPerm shift_cycle(int n, WeylType type) {
  if (n < 1) throw std::invalid_argument("rank must be at least 1");
  std::vector<int> im(n);
  im[0] = n;
  for (int j = 2; j <= n; ++j) im[j - 1] = j - 1;
  return SignedPerm(type, std::move(im));
}

}  // namespace phicert
