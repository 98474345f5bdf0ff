#pragma once

#include <span>
#include <string>
#include <vector>

#include "phicert/admissibility.hpp"
#include "phicert/errors.hpp"
#include "phicert/lattice.hpp"
#include "phicert/satake.hpp"

namespace phicert {

// Normalized slopes nu at positive indices; nu(-j) = -nu(j) and, for schema C, nu(0) = 0.
struct NormalizedSlopes {
  Schema schema;
  std::vector<Rat> positive;

  int rank() const { return static_cast<int>(positive.size()); }
  Rat at(int m) const;
  std::vector<int> indices() const;  // ascending
};

enum class Verdict { Irreducible, ArtinPlusIrreducible, Failed };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SplittingResult {
  std::vector<std::vector<int>> survivors;  // canonical representatives, sorted
  Verdict verdict;
};

SplittingResult certify_splittings(const NormalizedSlopes& nu);

struct PlaceInput {
  LocalDatum local;
  RefinedSlopes seed;
};

struct ReplayOptions {
  std::int64_t radius = kDefaultConeRadius;
  ExponentConvention convention = ExponentConvention::Invariant;
  bool skip_step1 = false;
};

struct PlaceCertificate {
  LocalDatum local;
  RefinedSlopes seed;
  WeightTable k1;
  RefinedSlopes x1_prime;
  WeightTable k2;
  RefinedSlopes x2_prime;
  WeightTable k3;
  Rat step1_margin;
  std::vector<Rat> step2_margins;        // j = -(r-1) .. -1
  std::vector<Rat> step3_margins;        // one per embedding
  std::vector<Rat> hypothesis_margins;   // one per embedding
  std::vector<AlignmentKind> alignment;  // one per embedding
  std::vector<std::vector<int>> survivors;
  Verdict verdict;
  std::string reason;
};

struct Certificate {
  Schema schema;
  int rank;
  ExponentConvention convention;
  bool step1_skipped;
  std::vector<PlaceCertificate> places;
  Verdict verdict;
  std::string reason;
};

struct VerdictFailed : Error {
  explicit VerdictFailed(Certificate c) : Error("verdict failed: " + c.reason), certificate(std::move(c)) {}
  Certificate certificate;
};

Certificate replay_symplectic(int n, std::span<const PlaceInput> places, const ReplayOptions& options = {});
// rank 2n slopes per place.
Certificate replay_orthogonal(int n, std::span<const PlaceInput> places, const ReplayOptions& options = {});

// The phi-module datum the alignment lemma is applied to at the final point.
PhiModuleDatum final_datum(Schema schema, const LocalDatum& local, const WeightTable& k3,
                           const RefinedSlopes& x3);

struct VerificationReport {
  bool consistent = true;
  std::vector<std::string> problems;
  Verdict verdict = Verdict::Failed;
  bool accepted() const { return consistent && verdict != Verdict::Failed; }
};

VerificationReport verify_certificate(const Certificate& cert);

}  // namespace phicert
