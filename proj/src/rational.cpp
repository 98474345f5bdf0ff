#include "phicert/rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace phicert {

Rat::Rat(long n, long d) : v_(n, d) {
  if (d == 0) throw std::domain_error("zero denominator");
  v_.canonicalize();
}

Rat::Rat(const mpz_class& n, const mpz_class& d) : v_(n, d) {
  if (d == 0) throw std::domain_error("zero denominator");
  v_.canonicalize();
}

Rat Rat::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s) {
    if (s.empty()) throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9')
        throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return mpz_class(digits, 10);
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  mpz_class n = parse_int(text.substr(0, slash));
  mpz_class d = parse_int(text.substr(slash + 1));
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rat(n, d);
}

std::string Rat::str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

Rat Rat::abs() const { return sign() < 0 ? -*this : *this; }

Rat Rat::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  return Rat(mpq_class(1) / v_);
}

mpz_class Rat::floor() const {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return q;
}

mpz_class Rat::ceil() const {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
  return q;
}

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer exceeds 64 bits: " + z.get_str());
  return static_cast<std::int64_t>(z.get_si());
}

std::int64_t Rat::to_int64() const {
  if (!is_integer()) throw std::overflow_error("not an integer: " + str());
  return phicert::to_int64(v_.get_num());
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  v_ /= o.v_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

Rat pow(const Rat& base, long exponent) {
  if (exponent < 0) return pow(base.inverse(), -exponent);
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.raw().get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(d.get_mpz_t(), base.raw().get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Rat(n, d);
}

}  // namespace phicert
