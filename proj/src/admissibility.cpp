#include "phicert/admissibility.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "phicert/errors.hpp"

namespace phicert {

PhiModuleDatum::PhiModuleDatum(int e, int f, std::vector<Rat> slopes, std::vector<std::vector<std::int64_t>> weights)
    : e_(e), f_(f), slopes_(std::move(slopes)), weights_(std::move(weights)) {
  if (e < 1 || f < 1) throw std::invalid_argument("e and f must be at least 1");
  if (static_cast<int>(weights_.size()) != e * f)
    throw std::invalid_argument("expected " + std::to_string(e * f) + " weight rows, got " +
                                std::to_string(weights_.size()));
  for (const auto& row : weights_) {
    if (row.size() != slopes_.size()) throw std::invalid_argument("weight row length differs from rank");
    if (!std::is_sorted(row.begin(), row.end())) throw std::invalid_argument("weight rows must be ascending");
  }
  auto sorted = slopes_;
  std::sort(sorted.begin(), sorted.end());
  distinct_ = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

PhiModuleDatum PhiModuleDatum::with_flag(int e, int f, std::vector<Rat> slopes,
                                         std::vector<std::vector<std::int64_t>> weights, bool distinct) {
  PhiModuleDatum d(e, f, std::move(slopes), std::move(weights));
  d.distinct_ = distinct;
  return d;
}

Rat PhiModuleDatum::hodge_value(int i) const {
  std::int64_t s = 0;
  for (const auto& row : weights_) s += row.at(i - 1);
  return Rat(static_cast<long>(s), static_cast<long>(e_));
}

std::string to_string(AlignmentKind k) {
  switch (k) {
    case AlignmentKind::Certified: return "Certified";
    case AlignmentKind::HypothesisFailed: return "HypothesisFailed";
    case AlignmentKind::CounterExample: return "CounterExample";
  }
  return "?";
}

Rat newton_number(const PhiModuleDatum& datum, std::span<const int> subset) {
  Rat s;
  for (int i : subset) s += datum.slopes().at(i - 1);
  return s;
}

Rat hodge_number(const PhiModuleDatum& datum, std::span<const int> subset,
                 const std::vector<std::vector<int>>& theta) {
  if (static_cast<int>(theta.size()) != datum.embeddings()) throw std::invalid_argument("theta needs one row per embedding");
  std::int64_t s = 0;
  for (int sigma = 0; sigma < datum.embeddings(); ++sigma)
    for (int i : subset) s += datum.weights()[sigma].at(theta[sigma].at(i - 1) - 1);
  return Rat(s) / Rat(datum.e());
}

bool newton_above_hodge(const PhiModuleDatum& datum) {
  auto sorted = datum.slopes();
  std::sort(sorted.begin(), sorted.end());
  Rat newton, hodge;
  for (int i = 1; i <= datum.rank(); ++i) {
    newton += sorted[i - 1];
    hodge += datum.hodge_value(i);
    if (newton < hodge) return false;
  }
  return newton == hodge;
}

namespace {

std::vector<int> complement_of(std::span<const int> subset, int n) {
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (!std::binary_search(subset.begin(), subset.end(), i)) out.push_back(i);
  return out;
}

bool valid_theta(const SubmoduleCandidate& c, int n, int embeddings) {
  if (static_cast<int>(c.theta.size()) != embeddings) return false;
  const auto comp = complement_of(c.subset, n);
  for (const auto& th : c.theta) {
    if (static_cast<int>(th.size()) != n) return false;
    auto image = th;
    std::sort(image.begin(), image.end());
    for (int i = 0; i < n; ++i)
      if (image[i] != i + 1) return false;
    for (std::size_t x = 1; x < c.subset.size(); ++x)
      if (th[c.subset[x] - 1] <= th[c.subset[x - 1] - 1]) return false;
    for (std::size_t x = 1; x < comp.size(); ++x)
      if (th[comp[x] - 1] <= th[comp[x - 1] - 1]) return false;
  }
  return true;
}

bool prefix_conditions(const PhiModuleDatum& d, std::span<const int> part, const std::vector<std::vector<int>>& theta) {
  Rat newton, hodge;
  for (int i : part) {
    newton += d.slopes()[i - 1];
    std::int64_t w = 0;
    for (int s = 0; s < d.embeddings(); ++s) w += d.weights()[s][theta[s][i - 1] - 1];
    hodge += Rat(w) / Rat(d.e());
    if (newton < hodge) return false;
  }
  return newton == hodge;
}

// Integer image of a datum: slopes scaled by D = e * lcm(denominators), weights by D / e.
struct Scaled {
  int n = 0, E = 0;
  std::vector<std::int64_t> slope;
  std::vector<std::vector<std::int64_t>> kappa;
};

bool checked_mul(std::int64_t a, std::int64_t b, std::int64_t& out) { return !__builtin_mul_overflow(a, b, &out); }

// Machine-integer version of scale; false when some intermediate does not fit.
bool scale_small(const PhiModuleDatum& d, Scaled& out) {
  std::int64_t l = 1;
  for (const auto& s : d.slopes()) {
    if (!s.num().fits_slong_p() || !s.den().fits_slong_p()) return false;
    const std::int64_t den = s.den().get_si();
    if (!checked_mul(l / std::gcd(l, den), den, l)) return false;
  }
  std::int64_t big_d;
  if (!checked_mul(l, d.e(), big_d)) return false;
  out.n = d.rank();
  out.E = d.embeddings();
  out.slope.clear();
  out.kappa.clear();
  for (const auto& s : d.slopes()) {
    std::int64_t v;
    if (!checked_mul(s.num().get_si(), big_d / s.den().get_si(), v)) return false;
    out.slope.push_back(v);
  }
  for (const auto& row : d.weights()) {
    std::vector<std::int64_t> r;
    r.reserve(row.size());
    for (auto k : row) {
      std::int64_t v;
      if (!checked_mul(l, k, v)) return false;
      r.push_back(v);
    }
    out.kappa.push_back(std::move(r));
  }
  return true;
}

Scaled scale(const PhiModuleDatum& d) {
  if (Scaled fast; scale_small(d, fast)) return fast;
  mpz_class l = 1;
  for (const auto& s : d.slopes()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.den().get_mpz_t());
  Scaled out;
  out.n = d.rank();
  out.E = d.embeddings();
  const mpz_class big_d = l * d.e();
  for (const auto& s : d.slopes()) out.slope.push_back(to_int64(s.num() * (big_d / s.den())));
  for (const auto& row : d.weights()) {
    std::vector<std::int64_t> r;
    for (auto k : row) r.push_back(to_int64(l * static_cast<long>(k)));
    out.kappa.push_back(std::move(r));
  }
  return out;
}

std::vector<unsigned> masks_of_size(int n, int a) {
  std::vector<unsigned> out;
  std::vector<int> idx(a);
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == a) {
      unsigned m = 0;
      for (int i : idx) m |= 1u << i;
      out.push_back(m);
      return;
    }
    for (int i = start; i <= n - (a - pos); ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return out;
}

std::vector<int> mask_elements(unsigned m, int n, bool inside) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (static_cast<bool>(m & (1u << i)) == inside) out.push_back(i);
  return out;
}

constexpr int kMaxRank = 20;

struct Option {
  unsigned mask = 0;
  std::array<std::int64_t, kMaxRank> p{};  // prefix sums over the image of the subset
  std::array<std::int64_t, kMaxRank> q{};  // prefix sums over the image of the complement
};

// Prefix-sum vectors for every image set of every embedding, grouped by size.
struct Prepared {
  Scaled sc;
  const std::vector<std::vector<unsigned>>* masks = nullptr;  // (*masks)[a], lexicographic
  std::vector<std::vector<std::vector<Option>>> options;    // options[sigma][a]
};

const std::vector<std::vector<unsigned>>& masks_by_size(int n) {
  thread_local std::map<int, std::vector<std::vector<unsigned>>> cache;
  auto [it, fresh] = cache.try_emplace(n);
  if (fresh) {
    it->second.resize(n + 1);
    for (int a = 0; a <= n; ++a) it->second[a] = masks_of_size(n, a);
  }
  return it->second;
}

Prepared prepare(Scaled sc) {
  Prepared pr{std::move(sc), {}, {}};
  const int n = pr.sc.n;
  pr.masks = &masks_by_size(n);
  pr.options.assign(pr.sc.E, std::vector<std::vector<Option>>(n + 1));
  for (int s = 0; s < pr.sc.E; ++s) {
    for (int a = 1; a < n; ++a) {
      auto& opts = pr.options[s][a];
      opts.reserve((*pr.masks)[a].size());
      for (unsigned m : (*pr.masks)[a]) {
        Option& o = opts.emplace_back();
        o.mask = m;
        std::int64_t in_acc = 0, out_acc = 0;
        int x = 0, y = 0;
        for (int i = 0; i < n; ++i) {
          if (m & (1u << i)) o.p[x++] = in_acc += pr.sc.kappa[s][i];
          else o.q[y++] = out_acc += pr.sc.kappa[s][i];
        }
      }
    }
  }
  return pr;
}

// Enumerates, for one subset I, all per-embedding image sets satisfying the prefix system.
class SubsetSearch {
public:
  SubsetSearch(const Scaled& sc, unsigned subset_mask, const std::vector<int>& order,
               const std::vector<const std::vector<Option>*>& options)
      : sc_(sc), order_(order), options_(options) {
    const int n = sc.n;
    a_ = std::popcount(subset_mask);
    b_ = n - a_;
    const auto in = mask_elements(subset_mask, n, true);
    const auto out = mask_elements(subset_mask, n, false);
    std::int64_t acc = 0;
    for (int x = 0; x < a_; ++x) slope_p_[x] = acc += sc.slope[in[x]];
    acc = 0;
    for (int x = 0; x < b_; ++x) slope_q_[x] = acc += sc.slope[out[x]];
    const int E = sc.E;
    for (int r = 0; r < kMax; ++r) rest_min_p_[E][r] = rest_min_q_[E][r] = 0;
    rest_max_p_[E] = rest_max_q_[E] = 0;
    for (int t = E - 1; t >= 0; --t) {
      const auto& row = sc.kappa[order[t]];
      std::int64_t run = 0;
      for (int r = 0; r < n; ++r) {
        run += row[r];
        if (r < a_) rest_min_p_[t][r] = rest_min_p_[t + 1][r] + run;
        if (r < b_) rest_min_q_[t][r] = rest_min_q_[t + 1][r] + run;
      }
      std::int64_t top_a = 0, top_b = 0;
      for (int r = 0; r < a_; ++r) top_a += row[n - 1 - r];
      for (int r = 0; r < b_; ++r) top_b += row[n - 1 - r];
      rest_max_p_[t] = rest_max_p_[t + 1] + top_a;
      rest_max_q_[t] = rest_max_q_[t + 1] + top_b;
    }
  }

  static constexpr int kMax = kMaxRank;

  template <class Visit>
  bool run(Visit&& visit) {
    std::int64_t p[kMax] = {}, q[kMax] = {};
    chosen_.assign(sc_.E, 0);
    return dfs(0, p, q, visit);
  }

private:
  bool feasible(int t, const std::int64_t* p, const std::int64_t* q) const {
    for (int r = 0; r < a_; ++r)
      if (p[r] + rest_min_p_[t][r] > slope_p_[r]) return false;
    for (int r = 0; r < b_; ++r)
      if (q[r] + rest_min_q_[t][r] > slope_q_[r]) return false;
    if (p[a_ - 1] + rest_max_p_[t] < slope_p_[a_ - 1]) return false;
    if (q[b_ - 1] + rest_max_q_[t] < slope_q_[b_ - 1]) return false;
    return true;
  }

  template <class Visit>
  bool dfs(int t, std::int64_t* p, std::int64_t* q, Visit& visit) {
    if (!feasible(t, p, q)) return false;
    if (t == sc_.E) {
      if (p[a_ - 1] != slope_p_[a_ - 1] || q[b_ - 1] != slope_q_[b_ - 1]) return false;
      return visit(chosen_);
    }
    const int sigma = order_[t];
    for (const auto& opt : *options_[t]) {
      for (int r = 0; r < a_; ++r) p[r] += opt.p[r];
      for (int r = 0; r < b_; ++r) q[r] += opt.q[r];
      chosen_[sigma] = opt.mask;
      const bool stop = dfs(t + 1, p, q, visit);
      for (int r = 0; r < a_; ++r) p[r] -= opt.p[r];
      for (int r = 0; r < b_; ++r) q[r] -= opt.q[r];
      if (stop) return true;
    }
    return false;
  }

  const Scaled& sc_;
  const std::vector<int>& order_;
  const std::vector<const std::vector<Option>*>& options_;
  int a_ = 0, b_ = 0;
  // Only the leading a_ / b_ entries of each row are initialized and read.
  std::int64_t slope_p_[kMax], slope_q_[kMax];
  std::int64_t rest_min_p_[kMax + 1][kMax], rest_min_q_[kMax + 1][kMax];
  std::int64_t rest_max_p_[kMax + 1], rest_max_q_[kMax + 1];
  std::vector<unsigned> chosen_;
};

SubmoduleCandidate make_candidate(int n, unsigned subset_mask, const std::vector<unsigned>& images) {
  SubmoduleCandidate c;
  for (int i : mask_elements(subset_mask, n, true)) c.subset.push_back(i + 1);
  const auto in = mask_elements(subset_mask, n, true);
  const auto out = mask_elements(subset_mask, n, false);
  for (unsigned m : images) {
    std::vector<int> th(n);
    const auto img_in = mask_elements(m, n, true);
    const auto img_out = mask_elements(m, n, false);
    for (std::size_t x = 0; x < in.size(); ++x) th[in[x]] = img_in[x] + 1;
    for (std::size_t x = 0; x < out.size(); ++x) th[out[x]] = img_out[x] + 1;
    c.theta.push_back(std::move(th));
  }
  return c;
}

void check_rank(const PhiModuleDatum& d) {
  if (d.rank() > kMaxRank || d.embeddings() > kMaxRank)
    throw std::invalid_argument("datum too large for exhaustive enumeration");
}

bool total_balanced(const Scaled& sc) {
  std::int64_t s = 0, k = 0;
  for (auto v : sc.slope) s += v;
  for (const auto& row : sc.kappa)
    for (auto v : row) k += v;
  return s == k;
}

// Keeps the first mask for each distinct pair of prefix vectors.
void dedupe(std::vector<Option>& opts) {
  std::size_t kept = 0;
  for (std::size_t k = 0; k < opts.size(); ++k) {
    const bool seen = std::any_of(opts.begin(), opts.begin() + kept,
                                  [&](const Option& x) { return x.p == opts[k].p && x.q == opts[k].q; });
    if (!seen) opts[kept++] = opts[k];
  }
  opts.resize(kept);
}

}  // namespace

bool is_candidate(const PhiModuleDatum& datum, const SubmoduleCandidate& c) {
  const int n = datum.rank();
  if (c.subset.empty() || static_cast<int>(c.subset.size()) >= n) return false;
  if (!std::is_sorted(c.subset.begin(), c.subset.end())) return false;
  if (!valid_theta(c, n, datum.embeddings())) return false;
  const auto comp = complement_of(c.subset, n);
  return prefix_conditions(datum, c.subset, c.theta) && prefix_conditions(datum, comp, c.theta);
}

bool aligned_at(const PhiModuleDatum& datum, const SubmoduleCandidate& c, int tau) {
  const auto& row = datum.weights().at(tau - 1);
  const auto& th = c.theta.at(tau - 1);
  for (int i = 1; i <= datum.rank(); ++i)
    if (row[th[i - 1] - 1] != row[i - 1]) return false;
  return true;
}

std::vector<SubmoduleCandidate> enumerate_candidates(const PhiModuleDatum& datum) {
  check_rank(datum);
  std::vector<SubmoduleCandidate> out;
  Scaled sc = scale(datum);
  if (sc.n < 2 || !total_balanced(sc)) return out;
  const Prepared pr = prepare(std::move(sc));
  const int n = pr.sc.n;
  std::vector<int> order(pr.sc.E);
  for (int s = 0; s < pr.sc.E; ++s) order[s] = s;
  for (int a = 1; a < n; ++a) {
    std::vector<const std::vector<Option>*> options;
    for (int s = 0; s < pr.sc.E; ++s) options.push_back(&pr.options[s][a]);
    for (unsigned imask : (*pr.masks)[a]) {
      SubsetSearch search(pr.sc, imask, order, options);
      search.run([&](const std::vector<unsigned>& images) {
        out.push_back(make_candidate(n, imask, images));
        return false;
      });
    }
  }
  return out;
}

std::vector<SubmoduleCandidate> admissible_candidates(const PhiModuleDatum& datum) {
  if (!datum.distinct()) throw NotDistinct("slopes are not pairwise distinct");
  return enumerate_candidates(datum);
}

std::optional<SubmoduleCandidate> find_misaligned(const PhiModuleDatum& datum, int tau) {
  check_rank(datum);
  if (tau < 1 || tau > datum.embeddings()) throw std::out_of_range("embedding index out of range");
  Scaled sc = scale(datum);
  if (sc.n < 2 || !total_balanced(sc)) return std::nullopt;
  const Prepared pr = prepare(std::move(sc));
  const int n = pr.sc.n;
  const int t0 = tau - 1;
  std::vector<int> order{t0};
  for (int s = 0; s < pr.sc.E; ++s)
    if (s != t0) order.push_back(s);

  for (int a = 1; a < n; ++a) {
    std::vector<std::vector<Option>> reduced(pr.sc.E);
    for (int t = 1; t < pr.sc.E; ++t) {
      reduced[t] = pr.options[order[t]][a];
      dedupe(reduced[t]);
    }
    std::vector<const std::vector<Option>*> options(pr.sc.E);
    for (int t = 1; t < pr.sc.E; ++t) options[t] = &reduced[t];
    const auto& own_options = pr.options[t0][a];
    std::vector<Option> tau_opts;
    for (std::size_t k = 0; k < (*pr.masks)[a].size(); ++k) {
      const unsigned imask = (*pr.masks)[a][k];
      const auto& own = own_options[k];
      tau_opts.clear();
      for (const auto& o : own_options)
        if (o.p != own.p) tau_opts.push_back(o);
      dedupe(tau_opts);
      if (tau_opts.empty()) continue;
      options[0] = &tau_opts;
      SubsetSearch search(pr.sc, imask, order, options);
      std::optional<SubmoduleCandidate> hit;
      search.run([&](const std::vector<unsigned>& images) {
        hit = make_candidate(n, imask, images);
        return true;
      });
      if (hit) return hit;
    }
  }
  return std::nullopt;
}

Rat alignment_bound(const PhiModuleDatum& datum, int tau) {
  if (tau < 1 || tau > datum.embeddings()) throw std::out_of_range("embedding index out of range");
  const auto& row = datum.weights()[tau - 1];
  const int n = datum.rank();
  if (n < 2) return Rat(0);
  std::int64_t gap = row[1] - row[0];
  for (int j = 1; j + 1 < n; ++j) gap = std::min(gap, row[j + 1] - row[j]);
  return Rat(gap) / Rat(static_cast<long>(datum.e()) * n);
}

AlignmentResult alignment_check(const PhiModuleDatum& datum, int tau, const Rat& band_factor) {
  if (!datum.distinct()) throw NotDistinct("slopes are not pairwise distinct");
  AlignmentResult res{AlignmentKind::Certified, alignment_bound(datum, tau) * band_factor, Rat(0), Rat(0), std::nullopt};
  for (int i = 1; i <= datum.rank(); ++i) res.max_deviation = std::max(res.max_deviation, datum.deviation(i).abs());
  res.margin = res.bound - res.max_deviation;
  if (res.margin.sign() < 0) {
    res.kind = AlignmentKind::HypothesisFailed;
    return res;
  }
  res.witness = find_misaligned(datum, tau);
  if (res.witness) res.kind = AlignmentKind::CounterExample;
  return res;
}

}  // namespace phicert
