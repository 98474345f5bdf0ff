#include "phicert/scan.hpp"

#include <algorithm>
#include <thread>
#include <tuple>

#include "phicert/errors.hpp"

namespace phicert {

ScanCounts& ScanCounts::operator+=(const ScanCounts& o) {
  data += o.data;
  certified += o.certified;
  hypothesis_failed += o.hypothesis_failed;
  counterexamples += o.counterexamples;
  skipped_not_distinct += o.skipped_not_distinct;
  return *this;
}

namespace {

using Row = std::vector<std::int64_t>;

std::vector<Row> sorted_rows(int n, std::int64_t lo, std::int64_t hi, bool reduce) {
  std::vector<Row> out;
  if (hi < lo) return out;
  Row cur(n);
  auto rec = [&](auto&& self, int pos, std::int64_t from) -> void {
    if (pos == n) {
      out.push_back(cur);
      return;
    }
    const std::int64_t to = (reduce && pos == 0) ? lo : hi;
    for (std::int64_t v = from; v <= to; ++v) {
      cur[pos] = v;
      self(self, pos + 1, v);
    }
  };
  rec(rec, 0, lo);
  return out;
}

std::int64_t deviation_radius(const Row& tau_row, const Rat& factor) {
  const int n = static_cast<int>(tau_row.size());
  if (n < 2) return 0;
  std::int64_t gap = tau_row[1] - tau_row[0];
  for (int j = 1; j + 1 < n; ++j) gap = std::min(gap, tau_row[j + 1] - tau_row[j]);
  // |d / e| <= factor * gap / (e n)  <=>  |d| <= factor * gap / n
  return to_int64((factor * Rat(gap) / Rat(n)).floor());
}

// Calls visit(indices) for index tuples of length len over [0, count): nondecreasing
// sequences when `multiset`, all tuples otherwise. Stops early when visit returns false.
template <class Visit>
void for_each_tuple(int len, std::size_t count, bool multiset, Visit&& visit) {
  std::vector<std::size_t> idx(len, 0);
  if (len == 0) {
    visit(idx);
    return;
  }
  if (count == 0) return;
  while (true) {
    if (!visit(idx)) return;
    int pos = len - 1;
    while (pos >= 0 && idx[pos] + 1 == count) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int k = pos + 1; k < len; ++k) idx[k] = multiset ? idx[pos] : 0;
  }
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

struct Slice {
  int e, f, n;
};

std::vector<Slice> slices_of(const ScanConfig& cfg) {
  std::vector<Slice> out;
  for (auto [e, f] : cfg.shapes)
    for (int n = cfg.min_rank; n <= cfg.max_rank; ++n) out.push_back({e, f, n});
  return out;
}

using Key = std::tuple<std::size_t, std::size_t, std::uint64_t, std::uint64_t>;

struct ShardResult {
  std::vector<ScanCounts> per_slice;
  std::vector<std::pair<Key, PinnedCase>> pinned;
  bool stopped = false;
};

void run_shard(const ScanConfig& cfg, const std::vector<Slice>& slices, int shard, int shards, ShardResult& out) {
  out.per_slice.assign(slices.size(), {});
  for (std::size_t si = 0; si < slices.size(); ++si) {
    const auto [e, f, n] = slices[si];
    const int E = e * f;
    const auto rows = sorted_rows(n, cfg.weight_min, cfg.weight_max, cfg.reduce);
    auto& counts = out.per_slice[si];
    for (std::size_t t = 0; t < rows.size() && !out.stopped; ++t) {
      if (static_cast<int>(t % shards) != shard) continue;
      const std::int64_t radius = deviation_radius(rows[t], cfg.band_factor);
      std::uint64_t other_index = 0;
      for_each_tuple(E - 1, rows.size(), cfg.reduce, [&](const std::vector<std::size_t>& others) {
        std::vector<Row> weights{rows[t]};
        for (auto o : others) weights.push_back(rows[o]);
        Row hodge(n, 0);
        for (const auto& w : weights)
          for (int i = 0; i < n; ++i) hodge[i] += w[i];
        std::uint64_t dev_index = 0;
        for_each_tuple(n, static_cast<std::size_t>(2 * radius + 1), false, [&](const std::vector<std::size_t>& d) {
          ++counts.data;
          Row numer(n);
          for (int i = 0; i < n; ++i) numer[i] = hodge[i] + static_cast<std::int64_t>(d[i]) - radius;
          Row sorted = numer;
          std::sort(sorted.begin(), sorted.end());
          if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            ++counts.skipped_not_distinct;
            ++dev_index;
            return true;
          }
          std::vector<Rat> slopes;
          for (auto v : numer) slopes.push_back(Rat(static_cast<long>(v), static_cast<long>(e)));
          const PhiModuleDatum datum(e, f, std::move(slopes), weights);
          const AlignmentResult res = alignment_check(datum, 1, cfg.band_factor);
          switch (res.kind) {
            case AlignmentKind::Certified: ++counts.certified; break;
            case AlignmentKind::HypothesisFailed: ++counts.hypothesis_failed; break;
            case AlignmentKind::CounterExample:
              ++counts.counterexamples;
              if (out.pinned.size() < cfg.max_pinned)
                out.pinned.emplace_back(Key{si, t, other_index, dev_index},
                                        PinnedCase{e, f, datum.slopes(), datum.weights(), 1, res.margin, *res.witness});
              if (cfg.stop_when_pinned && out.pinned.size() >= cfg.max_pinned) out.stopped = true;
              break;
          }
          ++dev_index;
          return !out.stopped;
        });
        ++other_index;
        return !out.stopped;
      });
    }
  }
}

}  // namespace

std::uint64_t scan_grid_size(const ScanConfig& cfg) {
  std::uint64_t total = 0;
  for (const auto& [e, f, n] : slices_of(cfg)) {
    const int E = e * f;
    const auto rows = sorted_rows(n, cfg.weight_min, cfg.weight_max, cfg.reduce);
    const std::uint64_t r = rows.size();
    const std::uint64_t others =
        cfg.reduce ? binomial(r + E - 2, static_cast<std::uint64_t>(E - 1)) : [&] {
          std::uint64_t p = 1;
          for (int i = 0; i < E - 1; ++i) p = saturating_mul(p, r);
          return p;
        }();
    for (const auto& row : rows) {
      std::uint64_t devs = 1;
      const std::uint64_t width = static_cast<std::uint64_t>(2 * deviation_radius(row, cfg.band_factor) + 1);
      for (int i = 0; i < n; ++i) devs = saturating_mul(devs, width);
      const std::uint64_t add = saturating_mul(devs, others);
      total = (UINT64_MAX - total < add) ? UINT64_MAX : total + add;
    }
  }
  return total;
}

ScanSummary keylemma_scan(const ScanConfig& cfg) {
  if (cfg.min_rank < 1 || cfg.band_factor.sign() <= 0 || cfg.workers < 1)
    throw std::invalid_argument("invalid scan configuration");
  for (auto [e, f] : cfg.shapes)
    if (e < 1 || f < 1) throw std::invalid_argument("invalid (e, f) shape");
  const std::uint64_t size = scan_grid_size(cfg);
  if (size > cfg.cap)
    throw GridTooLarge("grid has up to " + std::to_string(size) + " data, cap is " + std::to_string(cfg.cap));

  const auto slices = slices_of(cfg);
  std::vector<ShardResult> results(cfg.workers);
  if (cfg.workers == 1) {
    run_shard(cfg, slices, 0, 1, results[0]);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers; ++w)
      threads.emplace_back([&, w] { run_shard(cfg, slices, w, cfg.workers, results[w]); });
    for (auto& th : threads) th.join();
  }

  ScanSummary summary;
  std::vector<std::pair<Key, PinnedCase>> pinned;
  for (std::size_t si = 0; si < slices.size(); ++si) {
    ScanSlice slice{slices[si].e, slices[si].f, slices[si].n, {}};
    for (const auto& r : results) slice.counts += r.per_slice[si];
    summary.totals += slice.counts;
    summary.slices.push_back(slice);
  }
  for (auto& r : results) {
    summary.truncated = summary.truncated || r.stopped;
    for (auto& p : r.pinned) pinned.push_back(std::move(p));
  }
  std::sort(pinned.begin(), pinned.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < pinned.size() && i < cfg.max_pinned; ++i) summary.pinned.push_back(pinned[i].second);
  return summary;
}

}  // namespace phicert
