#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phicert/rational.hpp"

namespace phicert {

class Place {
public:
  static Place infinity() { return Place(); }
  static Place finite(std::int64_t p);

  bool is_infinite() const { return !prime_; }
  std::int64_t prime() const { return prime_.value(); }
  std::string str() const { return prime_ ? std::to_string(*prime_) : "inf"; }

private:
  Place() = default;
  std::optional<std::int64_t> prime_;
};

// p-adic valuation of a nonzero rational.
long valuation(const Rat& x, std::int64_t p);
bool is_squarefree(std::int64_t d);
bool is_padic_square(std::int64_t d, std::int64_t p);  // d squarefree

int hilbert(const Rat& a, const Rat& b, const Place& place);
bool product_formula(const Rat& a, const Rat& b);
int sign_char(std::int64_t d, const Rat& u, std::int64_t p);

// a + b sqrt(d) in Q(sqrt d), d squarefree and different from 1.
class QuadExtElem {
public:
  QuadExtElem(std::int64_t d, Rat a, Rat b);
  static QuadExtElem rational(std::int64_t d, Rat a) { return QuadExtElem(d, std::move(a), Rat(0)); }

  std::int64_t d() const { return d_; }
  const Rat& a() const { return a_; }
  const Rat& b() const { return b_; }
  bool is_rational() const { return b_.is_zero(); }
  bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

  QuadExtElem conj() const { return QuadExtElem(d_, a_, -b_); }
  Rat norm() const { return a_ * a_ - Rat(d_) * b_ * b_; }
  Rat trace() const { return Rat(2) * a_; }
  QuadExtElem inverse() const;

  QuadExtElem& operator+=(const QuadExtElem& o);
  QuadExtElem& operator-=(const QuadExtElem& o);
  QuadExtElem& operator*=(const QuadExtElem& o);
  QuadExtElem& operator/=(const QuadExtElem& o) { return *this *= o.inverse(); }
  friend QuadExtElem operator+(QuadExtElem x, const QuadExtElem& y) { return x += y; }
  friend QuadExtElem operator-(QuadExtElem x, const QuadExtElem& y) { return x -= y; }
  friend QuadExtElem operator*(QuadExtElem x, const QuadExtElem& y) { return x *= y; }
  friend QuadExtElem operator/(QuadExtElem x, const QuadExtElem& y) { return x /= y; }
  QuadExtElem operator-() const { return QuadExtElem(d_, -a_, -b_); }
  friend bool operator==(const QuadExtElem&, const QuadExtElem&) = default;

  std::string str() const;

private:
  void same_field(const QuadExtElem& o) const;
  std::int64_t d_;
  Rat a_, b_;
};

struct WaldInstance {
  std::int64_t p;
  int m;
  std::vector<Rat> split;            // x_{j,1} for the split indices
  std::vector<QuadExtElem> fields;   // x_i for the field indices
};

struct WaldFactor {
  std::int64_t d;
  QuadExtElem c;        // C_i
  QuadExtElem c0;       // C_{i,0}
  Rat ratio;            // C_i / C_{i,0}
  QuadExtElem beta;     // ratio = (-1)^{|split|} N(beta)
  bool decomposition_holds;
  int norm_sign;        // sign character at N(beta), always +1
  int sign;             // sign character at the ratio
};

struct WaldResult {
  int sign;
  std::vector<WaldFactor> factors;
};

// Throws Degenerate when the instance violates regularity.
void validate(const WaldInstance& inst);
WaldResult waldspurger_sign_product(const WaldInstance& inst);

}  // namespace phicert
