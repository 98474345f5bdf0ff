#include "phicert/conj_trace.hpp"

#include <stdexcept>

#include "phicert/errors.hpp"
#include "phicert/lattice.hpp"

namespace phicert {

bool ArchParam::well_formed() const {
  if (e != 0 && e != 1) return false;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0) return false;
    if (i > 0 && r[i] <= r[i - 1]) return false;
  }
  return true;
}

bool in_A_Sp(const ArchParam& param) {
  if (!param.central) throw std::invalid_argument("the symplectic family uses odd-dimensional parameters");
  if (param.r.empty()) return true;
  if (param.r.front() < 2) return false;
  for (std::size_t i = 1; i < param.r.size(); ++i)
    if (param.r[i] < param.r[i - 1] + 2) return false;
  return true;
}

bool nonregular_orthogonal_ok(const ArchParam& param) {
  if (param.central) throw std::invalid_argument("the orthogonal family uses even-dimensional parameters");
  for (std::size_t i = 0; i < param.r.size(); ++i) {
    if (param.r[i] < 0) return false;
    if (i > 0 && param.r[i] <= param.r[i - 1]) return false;
  }
  return true;
}

TraceDet conj_trace_det(const ArchParam& param, int n) {
  const int expected = param.central ? 2 * n + 1 : 2 * n;
  if (n < 0 || param.dim() != expected)
    throw DimensionMismatch("parameter of dimension " + std::to_string(param.dim()) +
                            " does not match n = " + std::to_string(n));
  // Eigenvalues of the recipe matrix: (-1)^e on the central line, and +1, -1 on each
  // antidiagonal 2x2 block.
  std::vector<int> eigen;
  if (param.central) eigen.push_back(param.e % 2 == 0 ? 1 : -1);
  for (int i = 0; i < n; ++i) {
    eigen.push_back(1);
    eigen.push_back(-1);
  }
  TraceDet out{0, 1};
  for (int v : eigen) {
    out.trace += v;
    out.det *= v;
  }
  return out;
}

std::vector<std::int64_t> so2k_highest_weight(const ArchParam& param, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  std::vector<std::int64_t> desc(param.r.rbegin(), param.r.rend());
  if (static_cast<int>(desc.size()) == k - 1) desc.push_back(0);
  if (static_cast<int>(desc.size()) != k)
    throw DimensionMismatch("expected " + std::to_string(k - 1) + " or " + std::to_string(k) + " entries");
  std::vector<std::int64_t> out(k);
  for (int i = 1; i <= k; ++i) {
    out[i - 1] = desc[i - 1] - (k - i);
    if (out[i - 1] < 0) throw BadGap("coordinate " + std::to_string(i) + " is negative");
  }
  return out;
}

std::optional<std::int64_t> congruence_pin(std::int64_t t_bound, std::int64_t p, int N, std::int64_t target) {
  if (t_bound < 0 || N < 0 || !is_prime(p)) throw std::invalid_argument("bad pinning parameters");
  if (target > t_bound || target < -t_bound) throw std::invalid_argument("target lies outside the trace bound");
  // p^N only needs to be compared with 2 t_bound, so stop multiplying once it exceeds it.
  std::int64_t modulus = 1;
  for (int i = 0; i < N && modulus <= 2 * t_bound; ++i) modulus *= p;
  if (modulus > 2 * t_bound) return target;
  return std::nullopt;
}

std::pair<std::int64_t, std::int64_t> resolve_component_traces(int n, std::int64_t total, int dim0) {
  if (n < 0 || dim0 < 1 || dim0 % 2 == 0) throw std::invalid_argument("need n >= 0 and odd dim0");
  const int det_parity = n % 2;
  std::vector<std::pair<std::int64_t, std::int64_t>> found;
  // An involution with m eigenvalues -1 has trace dim - 2m and determinant (-1)^m.
  for (int m = 0; m <= 2 * n; ++m) {
    if (m % 2 != det_parity) continue;
    const std::int64_t t_pi = 2 * n - 2 * m;
    for (int m0 = 0; m0 <= dim0; ++m0) {
      if (m0 % 2 != det_parity) continue;
      const std::int64_t t_pi0 = dim0 - 2 * m0;
      if ((t_pi0 == 1 || t_pi0 == -1) && t_pi + t_pi0 == total) found.emplace_back(t_pi, t_pi0);
    }
  }
  if (found.size() != 1)
    throw Inconsistent("total " + std::to_string(total) + " admits " + std::to_string(found.size()) +
                       " trace splittings");
  return found.front();
}

NormalizationShift normalization_shift(int n, std::int64_t q, int eta_inf_sign) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (eta_inf_sign != 1 && eta_inf_sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const std::int64_t q_l = q + (n - 1);
  if (n % 2 != 0) return {q_l, "odd-n"};
  const int parity_sign = (q_l % 2 == 0) ? 1 : -1;  // (-1)^{q_L}
  if (eta_inf_sign == -parity_sign) return {q_l, "even-n-trivial"};
  return {q_l, q_l % 2 == 0 ? "even-n-covered" : "even-n-open"};
}

}  // namespace phicert
