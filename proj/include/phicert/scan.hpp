#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phicert/admissibility.hpp"

namespace phicert {

struct ScanConfig {
  int min_rank = 1;
  int max_rank = 4;
  std::int64_t weight_min = -3;
  std::int64_t weight_max = 3;
  std::vector<std::pair<int, int>> shapes{{1, 1}, {1, 2}, {2, 1}, {2, 2}};  // (e, f)
  Rat band_factor = Rat(1);
  // Only visit one representative per orbit of row translations and of permutations
  // of the rows other than tau; the verdict is constant on these orbits.
  bool reduce = true;
  std::uint64_t cap = 50'000'000;
  int workers = 1;
  std::size_t max_pinned = 5;
  // Stop as soon as max_pinned counterexamples are known; counts are then partial.
  bool stop_when_pinned = false;
};

struct PinnedCase {
  int e, f;
  std::vector<Rat> slopes;
  std::vector<std::vector<std::int64_t>> weights;
  int tau;
  Rat margin;
  SubmoduleCandidate witness;
};

struct ScanCounts {
  std::uint64_t data = 0;
  std::uint64_t certified = 0;
  std::uint64_t hypothesis_failed = 0;
  std::uint64_t counterexamples = 0;
  std::uint64_t skipped_not_distinct = 0;

  ScanCounts& operator+=(const ScanCounts& o);
};

struct ScanSlice {
  int e, f, rank;
  ScanCounts counts;
};

struct ScanSummary {
  ScanCounts totals;
  std::vector<ScanSlice> slices;
  std::vector<PinnedCase> pinned;  // first counterexamples in enumeration order
  bool truncated = false;
};

// Upper bound on the number of data the scan visits.
std::uint64_t scan_grid_size(const ScanConfig& cfg);

// Throws GridTooLarge when scan_grid_size exceeds cfg.cap.
ScanSummary keylemma_scan(const ScanConfig& cfg);

}  // namespace phicert
