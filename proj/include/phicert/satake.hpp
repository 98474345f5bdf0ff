#pragma once

#include <span>
#include <vector>

#include "phicert/lattice.hpp"
#include "phicert/rational.hpp"

namespace phicert {

enum class Schema { C, D };
std::string to_string(Schema s);

// Valuations of the refinement functions phi_1..phi_n at one place, extended by
// phi_{-i} = -phi_i and phi_0 = 0.
class RefinedSlopes {
public:
  RefinedSlopes() = default;
  explicit RefinedSlopes(std::vector<Rat> values) : values_(std::move(values)) {}

  int rank() const { return static_cast<int>(values_.size()); }
  Rat at(int i) const;
  const std::vector<Rat>& values() const { return values_; }

  friend bool operator==(const RefinedSlopes&, const RefinedSlopes&) = default;

private:
  std::vector<Rat> values_;
};

// Exponent convention for refinement changes by sign-changing Weyl elements.
enum class ExponentConvention { Invariant, PaperSign };

// The shift constant c in q^{c-i}: n+1 for type C at rank n, r for type D at rank r.
int rho_shift(Schema schema, int rank);

// Valuations Y_1..Y_r of the Satake parameters (positive indices only).
std::vector<Rat> satake_valuations(const LocalDatum& local, const WeightTable& weights,
                                   const RefinedSlopes& phi, Schema schema);

std::vector<Rat> frobenius_slopes(const LocalDatum& local, const WeightTable& weights,
                                  const RefinedSlopes& phi, Schema schema);

std::vector<std::vector<std::int64_t>> hodge_tate_weights(const LocalDatum& local, const WeightTable& weights,
                                                          Schema schema);

RefinedSlopes change_refinement(const SignedPerm& w, const LocalDatum& local, const WeightTable& weights,
                                const RefinedSlopes& phi,
                                ExponentConvention convention = ExponentConvention::Invariant);

struct SimpleRootDatum {
  std::int64_t n_alpha;
  Rat eta_valuation;
};

bool classicality_general(std::span<const std::vector<SimpleRootDatum>> groups, std::span<const Rat> mu);

struct ClassicalityPlace {
  LocalDatum local;
  WeightTable weights;
  std::vector<Rat> mu;
};

bool classicality_sp(std::span<const ClassicalityPlace> places);

// The root data the symplectic criterion is built from, one group per (place, index).
std::vector<std::vector<SimpleRootDatum>> symplectic_root_groups(const ClassicalityPlace& place);

}  // namespace phicert
