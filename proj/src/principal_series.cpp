#include "phicert/principal_series.hpp"

#include <stdexcept>

#include "phicert/errors.hpp"

namespace phicert {

UnramChar::UnramChar(Rat v, std::int64_t q_) : value(std::move(v)), q(q_) {
  if (value.is_zero()) throw std::invalid_argument("character value must be nonzero");
  if (q < 2) throw std::invalid_argument("residue cardinality must be at least 2");
}

namespace {

std::int64_t common_q(std::span<const UnramChar> chars) {
  if (chars.empty()) return 0;
  for (const auto& c : chars)
    if (c.q != chars.front().q) throw MixedResidue("characters have different residue cardinalities");
  return chars.front().q;
}

bool is_power_of_q(const Rat& x, const Rat& q) { return x == q || x == q.inverse(); }

}  // namespace

bool sp_irreducible(std::span<const UnramChar> chars) {
  const Rat q(common_q(chars));
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const Rat& a = chars[i].value;
    if (a == Rat(-1)) return false;
    if (is_power_of_q(a, q)) return false;
    for (std::size_t j = i + 1; j < chars.size(); ++j) {
      const Rat& b = chars[j].value;
      if (is_power_of_q(a / b, q) || is_power_of_q(a * b, q)) return false;
    }
  }
  return true;
}

bool so_irreducible_sufficient(std::span<const UnramChar> chars) {
  const Rat q(common_q(chars));
  auto forbidden = [&](const Rat& x) { return x == Rat(1) || is_power_of_q(x, q); };
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const Rat& a = chars[i].value;
    if (a * a == Rat(1)) return false;
    for (std::size_t j = i + 1; j < chars.size(); ++j) {
      const Rat& b = chars[j].value;
      if (forbidden(a * b) || forbidden(a / b)) return false;
    }
  }
  return true;
}

CharTuple act(const SignedPerm& w, const CharTuple& values) {
  if (w.rank() != static_cast<int>(values.size())) throw std::invalid_argument("rank mismatch");
  const SignedPerm inv = w.inverse();
  CharTuple out(values.size());
  for (int i = 1; i <= w.rank(); ++i) {
    const int src = inv(i);
    out[i - 1] = src > 0 ? values[src - 1] : values[-src - 1].inverse();
  }
  return out;
}

std::set<CharTuple> refinement_orbit(std::span<const UnramChar> chars, WeylType group) {
  CharTuple values;
  for (const auto& c : chars) values.push_back(c.value);
  std::set<CharTuple> orbit;
  if (values.empty()) {
    orbit.insert(values);
    return orbit;
  }
  for (const auto& w : weyl_elements(group, static_cast<int>(values.size()))) orbit.insert(act(w, values));
  return orbit;
}

bool completely_refinable(std::span<const UnramChar> chars, WeylType group) {
  return group == WeylType::C ? sp_irreducible(chars) : so_irreducible_sufficient(chars);
}

}  // namespace phicert
