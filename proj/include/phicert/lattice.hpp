#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phicert/rational.hpp"

namespace phicert {

bool is_prime(std::int64_t p);

// Shape of a p-adic place: residue characteristic, ramification and residue degree.
class LocalDatum {
public:
  LocalDatum(std::int64_t p, int e, int f);

  std::int64_t p() const { return p_; }
  int e() const { return e_; }
  int f() const { return f_; }
  int embeddings() const { return e_ * f_; }

  Rat q_valuation() const { return Rat(f_); }
  Rat uniformizer_valuation() const { return Rat(1L, static_cast<long>(e_)); }
  mpz_class residue_cardinality() const;

  friend bool operator==(const LocalDatum&, const LocalDatum&) = default;

private:
  std::int64_t p_;
  int e_;
  int f_;
};

// Dominant integral weights k[sigma][i] at one place. Embeddings are indexed 0..E-1,
// weight indices run over 1..n and the accessor extends them to -n..n.
class WeightTable {
public:
  WeightTable() = default;
  WeightTable(int rank, std::vector<std::vector<std::int64_t>> rows);

  int rank() const { return rank_; }
  int embeddings() const { return static_cast<int>(rows_.size()); }
  std::int64_t at(int sigma, int i) const;
  const std::vector<std::int64_t>& row(int sigma) const { return rows_.at(sigma); }
  const std::vector<std::vector<std::int64_t>>& rows() const { return rows_; }

  // Sum over embeddings of k[sigma][i], extended to negative indices.
  std::int64_t column_sum(int i) const;
  // Flattened coordinates, embedding-major.
  std::vector<std::int64_t> flat() const;

  friend bool operator==(const WeightTable&, const WeightTable&) = default;

private:
  int rank_ = 0;
  std::vector<std::vector<std::int64_t>> rows_;
};

// Strict constraint  sum_c coefficients[c] * y[c] > bound  on flattened weight coordinates.
struct LinearForm {
  std::vector<std::int64_t> coefficients;
  Rat bound;
};

inline constexpr std::int64_t kDefaultConeRadius = 1'000'000;

// Smallest dominant integral point strictly inside every form. Candidates are ordered by
// coordinate sum; ties go to the larger last coordinate, then the next-to-last, and so on.
WeightTable cone_find(std::span<const LinearForm> forms, int rank, int embeddings,
                      std::int64_t radius = kDefaultConeRadius);

bool satisfies(const LinearForm& form, const WeightTable& w);

bool very_regular(const WeightTable& weights, const Rat& bound);
bool very_regular(std::span<const WeightTable> weights, const Rat& bound);

enum class WeylType { C, D };
std::string to_string(WeylType t);

class SignedPerm {
public:
  // images[i-1] = w(i) for i = 1..n.
  SignedPerm(WeylType type, std::vector<int> images);
  static SignedPerm identity(WeylType type, int n);

  WeylType type() const { return type_; }
  int rank() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const;
  const std::vector<int>& images() const { return images_; }

  SignedPerm inverse() const;
  // (a * b)(i) = a(b(i)).
  friend SignedPerm operator*(const SignedPerm& a, const SignedPerm& b);
  friend bool operator==(const SignedPerm&, const SignedPerm&) = default;
  friend auto operator<=>(const SignedPerm& a, const SignedPerm& b) { return a.images_ <=> b.images_; }

  std::string str() const;

private:
  WeylType type_;
  std::vector<int> images_;
};

std::vector<SignedPerm> weyl_elements(WeylType type, int n);
std::optional<SignedPerm> minus_identity(WeylType type, int n);
SignedPerm shift_cycle(int n, WeylType type = WeylType::C);

}  // namespace phicert
