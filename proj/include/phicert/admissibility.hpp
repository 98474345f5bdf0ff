#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phicert/rational.hpp"

namespace phicert {

// Rank-N slope vector together with ascending Hodge-Tate weights per embedding.
// Indices into slopes and weight rows are 1-based in every public function below.
class PhiModuleDatum {
public:
  PhiModuleDatum(int e, int f, std::vector<Rat> slopes, std::vector<std::vector<std::int64_t>> weights);
  // Same, but with the distinctness flag set by the caller rather than computed.
  static PhiModuleDatum with_flag(int e, int f, std::vector<Rat> slopes,
                                  std::vector<std::vector<std::int64_t>> weights, bool distinct);

  int rank() const { return static_cast<int>(slopes_.size()); }
  int e() const { return e_; }
  int f() const { return f_; }
  int embeddings() const { return e_ * f_; }
  bool distinct() const { return distinct_; }
  const std::vector<Rat>& slopes() const { return slopes_; }
  const std::vector<std::vector<std::int64_t>>& weights() const { return weights_; }

  // (1/e) * sum over embeddings of kappa[sigma][i].
  Rat hodge_value(int i) const;
  Rat deviation(int i) const { return slopes_.at(i - 1) - hodge_value(i); }

private:
  PhiModuleDatum() = default;
  int e_ = 1, f_ = 1;
  std::vector<Rat> slopes_;
  std::vector<std::vector<std::int64_t>> weights_;
  bool distinct_ = false;
};

struct SubmoduleCandidate {
  std::vector<int> subset;               // ascending, 1-based
  std::vector<std::vector<int>> theta;   // theta[sigma][i-1] = image of i, 1-based

  friend bool operator==(const SubmoduleCandidate&, const SubmoduleCandidate&) = default;
};

Rat newton_number(const PhiModuleDatum& datum, std::span<const int> subset);
Rat hodge_number(const PhiModuleDatum& datum, std::span<const int> subset,
                 const std::vector<std::vector<int>>& theta);
bool newton_above_hodge(const PhiModuleDatum& datum);

// Checks the candidate conditions directly in rational arithmetic.
bool is_candidate(const PhiModuleDatum& datum, const SubmoduleCandidate& c);

// True when theta[tau] carries the tau-weights of the subset onto themselves.
bool aligned_at(const PhiModuleDatum& datum, const SubmoduleCandidate& c, int tau);

std::vector<SubmoduleCandidate> admissible_candidates(const PhiModuleDatum& datum);
// The same enumeration without the distinct-slope precondition.
std::vector<SubmoduleCandidate> enumerate_candidates(const PhiModuleDatum& datum);
// First candidate (in enumeration order) that is misaligned at tau; no hypothesis is imposed.
std::optional<SubmoduleCandidate> find_misaligned(const PhiModuleDatum& datum, int tau);

enum class AlignmentKind { Certified, HypothesisFailed, CounterExample };
std::string to_string(AlignmentKind k);

struct AlignmentResult {
  AlignmentKind kind;
  Rat bound;          // band half-width actually used
  Rat max_deviation;
  Rat margin;         // bound - max_deviation
  std::optional<SubmoduleCandidate> witness;
};

// Band half-width min_j(kappa[tau][j+1]-kappa[tau][j]) / (e N), zero when N = 1.
Rat alignment_bound(const PhiModuleDatum& datum, int tau);

AlignmentResult alignment_check(const PhiModuleDatum& datum, int tau, const Rat& band_factor = Rat(1));

}  // namespace phicert
