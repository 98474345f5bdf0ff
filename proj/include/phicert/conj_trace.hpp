#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phicert {

// Archimedean parameter: an optional central sign-character summand eps^e plus
// two-dimensional induced pieces indexed by r.
struct ArchParam {
  int e = 0;
  std::vector<std::int64_t> r;
  bool central = true;

  int dim() const { return 2 * static_cast<int>(r.size()) + (central ? 1 : 0); }
  bool well_formed() const;  // r strictly increasing and nonnegative, e in {0,1}
};

bool in_A_Sp(const ArchParam& param);
bool nonregular_orthogonal_ok(const ArchParam& param);

struct TraceDet {
  std::int64_t trace;
  int det;
  friend bool operator==(const TraceDet&, const TraceDet&) = default;
};
TraceDet conj_trace_det(const ArchParam& param, int n);

std::vector<std::int64_t> so2k_highest_weight(const ArchParam& param, int k);

// Integers t, t' with |t|, |t'| <= t_bound and t = t' mod p^N must coincide exactly when
// p^N > 2 t_bound; returns the target in that case.
std::optional<std::int64_t> congruence_pin(std::int64_t t_bound, std::int64_t p, int N, std::int64_t target);

std::pair<std::int64_t, std::int64_t> resolve_component_traces(int n, std::int64_t total, int dim0);

struct NormalizationShift {
  std::int64_t q_L;
  std::string label;  // odd-n, even-n-covered, even-n-trivial, even-n-open
};
NormalizationShift normalization_shift(int n, std::int64_t q, int eta_inf_sign);

}  // namespace phicert
