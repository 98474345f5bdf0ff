#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "phicert/lattice.hpp"
#include "phicert/rational.hpp"

namespace phicert {

// Unramified character, recorded by its value at a uniformizer and the residue cardinality.
struct UnramChar {
  UnramChar(Rat value, std::int64_t q);
  Rat value;
  std::int64_t q;
};

bool sp_irreducible(std::span<const UnramChar> chars);
// Sufficient condition only; false means irreducibility is not guaranteed.
bool so_irreducible_sufficient(std::span<const UnramChar> chars);

using CharTuple = std::vector<Rat>;
std::set<CharTuple> refinement_orbit(std::span<const UnramChar> chars, WeylType group);
bool completely_refinable(std::span<const UnramChar> chars, WeylType group);

// The tuple obtained by letting w act: value'_i = value_{w^{-1}(i)}, negative indices inverting.
CharTuple act(const SignedPerm& w, const CharTuple& values);

}  // namespace phicert
