#include "phicert/satake.hpp"

#include <algorithm>
#include <stdexcept>

namespace phicert {

std::string to_string(Schema s) { return s == Schema::C ? "C" : "D"; }

Rat RefinedSlopes::at(int i) const {
  if (i == 0) return Rat(0);
  if (i < 0) return -at(-i);
  if (i > rank()) throw std::out_of_range("refinement index out of range");
  return values_[i - 1];
}

int rho_shift(Schema schema, int rank) { return schema == Schema::C ? rank + 1 : rank; }

namespace {

void check_shapes(const LocalDatum& local, const WeightTable& weights, const RefinedSlopes& phi) {
  if (weights.embeddings() != local.embeddings())
    throw std::invalid_argument("weight table has " + std::to_string(weights.embeddings()) +
                                " embeddings, place has " + std::to_string(local.embeddings()));
  if (weights.rank() != phi.rank()) throw std::invalid_argument("weights and slopes differ in rank");
}

Rat averaged_weight(const LocalDatum& local, const WeightTable& weights, int i) {
  return Rat(weights.column_sum(i)) / Rat(local.e());
}

}  // namespace

std::vector<Rat> satake_valuations(const LocalDatum& local, const WeightTable& weights,
                                   const RefinedSlopes& phi, Schema schema) {
  check_shapes(local, weights, phi);
  const int r = weights.rank();
  const int c = rho_shift(schema, r);
  std::vector<Rat> y;
  y.reserve(r);
  for (int i = 1; i <= r; ++i)
    y.push_back(Rat((c - i) * local.f()) + phi.at(r + 1 - i) + averaged_weight(local, weights, i));
  return y;
}

std::vector<Rat> frobenius_slopes(const LocalDatum& local, const WeightTable& weights,
                                  const RefinedSlopes& phi, Schema schema) {
  std::vector<Rat> out;
  for (const Rat& y : satake_valuations(local, weights, phi, schema)) {
    out.push_back(y);
    out.push_back(-y);
  }
  if (schema == Schema::C) out.emplace_back(0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::int64_t>> hodge_tate_weights(const LocalDatum& local, const WeightTable& weights,
                                                          Schema schema) {
  if (weights.embeddings() != local.embeddings()) throw std::invalid_argument("embedding count mismatch");
  const int r = weights.rank();
  const int c = rho_shift(schema, r);
  std::vector<std::vector<std::int64_t>> out;
  for (int s = 0; s < weights.embeddings(); ++s) {
    std::vector<std::int64_t> row;
    for (int i = 1; i <= r; ++i) {
      const std::int64_t h = weights.at(s, i) + c - i;
      row.push_back(h);
      row.push_back(-h);
    }
    if (schema == Schema::C) row.push_back(0);
    std::sort(row.begin(), row.end());
    out.push_back(std::move(row));
  }
  return out;
}

RefinedSlopes change_refinement(const SignedPerm& w, const LocalDatum& local, const WeightTable& weights,
                                const RefinedSlopes& phi, ExponentConvention convention) {
  check_shapes(local, weights, phi);
  const int r = weights.rank();
  if (w.rank() != r) throw std::invalid_argument("Weyl element rank differs from weight rank");
  const Schema schema = w.type() == WeylType::C ? Schema::C : Schema::D;
  const int c = rho_shift(schema, r);
  const int sign_flip = convention == ExponentConvention::Invariant ? 1 : -1;

  std::vector<Rat> next(r);
  for (int i = 1; i <= r; ++i) {
    const int wi = w(i);
    const int s = wi > 0 ? 1 : -1;
    const int m = wi > 0 ? wi : -wi;
    const long exponent = static_cast<long>(i) - wi + static_cast<long>(sign_flip) * c * (s - 1);
    next[r - i] = Rat(s) * phi.at(r + 1 - m) + Rat(exponent * local.f()) +
                  averaged_weight(local, weights, wi) - averaged_weight(local, weights, i);
  }
  return RefinedSlopes(std::move(next));
}

bool classicality_general(std::span<const std::vector<SimpleRootDatum>> groups, std::span<const Rat> mu) {
  if (groups.size() != mu.size()) throw std::invalid_argument("one slope per root group is required");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (const auto& alpha : groups[i]) {
      const Rat bound = -Rat(1 + alpha.n_alpha) * alpha.eta_valuation;
      if (!(mu[i] < bound)) return false;
    }
  }
  return true;
}

std::vector<std::vector<SimpleRootDatum>> symplectic_root_groups(const ClassicalityPlace& place) {
  const int n = place.weights.rank();
  if (place.weights.embeddings() != place.local.embeddings())
    throw std::invalid_argument("embedding count mismatch");
  const Rat inv_e = place.local.uniformizer_valuation();
  std::vector<std::vector<SimpleRootDatum>> groups(n);
  for (int i = 1; i <= n; ++i) {
    for (int s = 0; s < place.weights.embeddings(); ++s) {
      if (i < n)
        groups[i - 1].push_back({place.weights.at(s, i) - place.weights.at(s, i + 1), -inv_e});
      else
        groups[i - 1].push_back({place.weights.at(s, n), Rat(-2) * inv_e});
    }
  }
  return groups;
}

bool classicality_sp(std::span<const ClassicalityPlace> places) {
  for (const auto& place : places) {
    const int n = place.weights.rank();
    if (static_cast<int>(place.mu.size()) != n) throw std::invalid_argument("one slope per index is required");
    if (place.weights.embeddings() != place.local.embeddings())
      throw std::invalid_argument("embedding count mismatch");
    for (int i = 1; i <= n; ++i) {
      std::int64_t least = 0;
      for (int s = 0; s < place.weights.embeddings(); ++s) {
        const std::int64_t v = i < n ? 1 + place.weights.at(s, i) - place.weights.at(s, i + 1)
                                     : 2 + 2 * place.weights.at(s, n);
        least = s == 0 ? v : std::min(least, v);
      }
      if (!(place.mu[i - 1] < Rat(least) / Rat(place.local.e()))) return false;
    }
  }
  return true;
}

}  // namespace phicert
