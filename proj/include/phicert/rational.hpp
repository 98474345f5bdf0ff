#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace phicert {

// Exact rational in lowest terms with a positive denominator.
class Rat {
public:
  Rat() = default;
  Rat(long n) : v_(n) {}
  Rat(int n) : v_(static_cast<long>(n)) {}
  Rat(long long n) : v_(static_cast<long>(n)) {}
  Rat(long n, long d);
  explicit Rat(const mpz_class& n) : v_(n) {}
  Rat(const mpz_class& n, const mpz_class& d);
  explicit Rat(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Accepts "n/d" or "n"; throws std::invalid_argument on malformed input.
  static Rat parse(std::string_view text);

  // Always "num/den", including integers ("3/1").
  std::string str() const;

  mpz_class num() const { return v_.get_num(); }
  mpz_class den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_integer() const { return v_.get_den() == 1; }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  Rat abs() const;
  Rat inverse() const;
  mpz_class floor() const;
  mpz_class ceil() const;

  // Checked narrowing; throws std::overflow_error when out of range or non-integral.
  std::int64_t to_int64() const;

  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }
  Rat operator-() const { return Rat(mpq_class(-v_)); }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    const int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r);

private:
  mpq_class v_;
};

Rat pow(const Rat& base, long exponent);
std::int64_t to_int64(const mpz_class& z);

}  // namespace phicert
