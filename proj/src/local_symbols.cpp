#include "phicert/local_symbols.hpp"

#include <set>
#include <stdexcept>

#include "phicert/errors.hpp"
#include "phicert/lattice.hpp"

namespace phicert {

Place Place::finite(std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("place must be a prime, got " + std::to_string(p));
  Place out;
  out.prime_ = p;
  return out;
}

namespace {

long valuation_z(mpz_class n, std::int64_t p) {
  long v = 0;
  const mpz_class pp = static_cast<long>(p);
  while (n != 0 && mpz_divisible_p(n.get_mpz_t(), pp.get_mpz_t())) {
    n /= pp;
    ++v;
  }
  return v;
}

// Unit part of x at p as a residue: num * den modulo `mod` (p must not divide either).
long unit_residue(const Rat& x, std::int64_t p, long mod) {
  mpz_class n = x.num(), d = x.den();
  const mpz_class pp = static_cast<long>(p);
  while (mpz_divisible_p(n.get_mpz_t(), pp.get_mpz_t())) n /= pp;
  while (mpz_divisible_p(d.get_mpz_t(), pp.get_mpz_t())) d /= pp;
  mpz_class r = (n * d) % mod;
  if (r < 0) r += mod;
  return r.get_si();
}

int legendre_unit(const Rat& unit_part_source, std::int64_t p) {
  const long r = unit_residue(unit_part_source, p, static_cast<long>(p));
  mpz_class a = r, pp = static_cast<long>(p);
  return mpz_legendre(a.get_mpz_t(), pp.get_mpz_t());
}

std::vector<std::int64_t> prime_divisors(mpz_class n) {
  std::vector<std::int64_t> out;
  if (n < 0) n = -n;
  for (long d = 2; mpz_class(d) * d <= n; ++d) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) {
      out.push_back(d);
      while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(d))) n /= d;
    }
  }
  if (n > 1) out.push_back(to_int64(n));
  return out;
}

}  // namespace

long valuation(const Rat& x, std::int64_t p) {
  if (x.is_zero()) throw ZeroArgument("valuation of zero");
  return valuation_z(x.num(), p) - valuation_z(x.den(), p);
}

bool is_squarefree(std::int64_t d) {
  if (d == 0) return false;
  const std::int64_t a = d < 0 ? -d : d;
  for (std::int64_t k = 2; k * k <= a; ++k)
    if (a % (k * k) == 0) return false;
  return true;
}

bool is_padic_square(std::int64_t d, std::int64_t p) {
  if (!is_squarefree(d)) throw std::invalid_argument("expected a squarefree integer");
  if (d % p == 0) return false;
  if (p == 2) return ((d % 8) + 8) % 8 == 1;
  return legendre_unit(Rat(d), p) == 1;
}

int hilbert(const Rat& a, const Rat& b, const Place& place) {
  if (a.is_zero() || b.is_zero()) throw ZeroArgument("Hilbert symbol of zero");
  if (place.is_infinite()) return (a.sign() < 0 && b.sign() < 0) ? -1 : 1;
  const std::int64_t p = place.prime();
  const long alpha = valuation(a, p), beta = valuation(b, p);
  if (p != 2) {
    int s = 1;
    if ((alpha * beta) % 2 != 0 && ((p - 1) / 2) % 2 != 0) s = -s;
    if (beta % 2 != 0) s *= legendre_unit(a, p);
    if (alpha % 2 != 0) s *= legendre_unit(b, p);
    return s;
  }
  const long u = unit_residue(a, 2, 8), v = unit_residue(b, 2, 8);
  auto eps = [](long w) { return (w % 4 == 3) ? 1 : 0; };
  auto omega = [](long w) { return (w == 3 || w == 5) ? 1 : 0; };
  const long e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
  return (e % 2 == 0) ? 1 : -1;
}

bool product_formula(const Rat& a, const Rat& b) {
  if (a.is_zero() || b.is_zero()) throw ZeroArgument("Hilbert symbol of zero");
  std::set<std::int64_t> primes{2};
  for (const mpz_class& n : {a.num(), a.den(), b.num(), b.den()})
    for (auto p : prime_divisors(n)) primes.insert(p);
  int prod = hilbert(a, b, Place::infinity());
  for (auto p : primes) prod *= hilbert(a, b, Place::finite(p));
  return prod == 1;
}

int sign_char(std::int64_t d, const Rat& u, std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("p must be prime");
  if (u.is_zero()) throw ZeroArgument("sign character at zero");
  if (d == 1 || !is_squarefree(d)) throw std::invalid_argument("d must be squarefree and different from 1");
  if (is_padic_square(d, p)) throw SplitExtension(std::to_string(d) + " is a square in Q_" + std::to_string(p));
  return hilbert(Rat(d), u, Place::finite(p));
}

QuadExtElem::QuadExtElem(std::int64_t d, Rat a, Rat b) : d_(d), a_(std::move(a)), b_(std::move(b)) {
  if (d == 1 || !is_squarefree(d)) throw std::invalid_argument("d must be squarefree and different from 1");
}

void QuadExtElem::same_field(const QuadExtElem& o) const {
  if (o.d_ != d_) throw std::invalid_argument("elements of different quadratic fields");
}

QuadExtElem QuadExtElem::inverse() const {
  const Rat n = norm();
  if (n.is_zero()) throw std::domain_error("inverse of zero");
  return QuadExtElem(d_, a_ / n, -b_ / n);
}

QuadExtElem& QuadExtElem::operator+=(const QuadExtElem& o) {
  same_field(o);
  a_ += o.a_;
  b_ += o.b_;
  return *this;
}

QuadExtElem& QuadExtElem::operator-=(const QuadExtElem& o) {
  same_field(o);
  a_ -= o.a_;
  b_ -= o.b_;
  return *this;
}

QuadExtElem& QuadExtElem::operator*=(const QuadExtElem& o) {
  same_field(o);
  const Rat a = a_ * o.a_ + Rat(d_) * b_ * o.b_;
  const Rat b = a_ * o.b_ + b_ * o.a_;
  a_ = a;
  b_ = b;
  return *this;
}

std::string QuadExtElem::str() const { return a_.str() + " + " + b_.str() + "*sqrt(" + std::to_string(d_) + ")"; }

namespace {

using Poly = std::vector<Rat>;  // coefficients, lowest degree first

Poly multiply(const Poly& f, const Poly& g) {
  Poly h(f.size() + g.size() - 1);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) h[i + j] += f[i] * g[j];
  return h;
}

Poly derivative(const Poly& f) {
  Poly g;
  for (std::size_t i = 1; i < f.size(); ++i) g.push_back(Rat(static_cast<long>(i)) * f[i]);
  if (g.empty()) g.emplace_back(0);
  return g;
}

Rat eval(const Poly& f, const Rat& t) {
  Rat acc;
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * t + *it;
  return acc;
}

QuadExtElem eval(const Poly& f, const QuadExtElem& t) {
  QuadExtElem acc = QuadExtElem::rational(t.d(), Rat(0));
  for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * t + QuadExtElem::rational(t.d(), *it);
  return acc;
}

QuadExtElem power(const QuadExtElem& x, long k) {
  if (k < 0) return power(x.inverse(), -k);
  QuadExtElem acc = QuadExtElem::rational(x.d(), Rat(1));
  for (long i = 0; i < k; ++i) acc *= x;
  return acc;
}

QuadExtElem y_of(const QuadExtElem& x) { return -(x / x.conj()); }

// (T - y)(T - conj y) for a field index, (T + x)(T + 1/x) for a split index.
Poly field_factor(const QuadExtElem& y) { return {y.norm(), -y.trace(), Rat(1)}; }
Poly split_factor(const Rat& x) { return {Rat(1), x + x.inverse(), Rat(1)}; }

}  // namespace

void validate(const WaldInstance& inst) {
  if (inst.p == 2 || !is_prime(inst.p)) throw Degenerate("p must be an odd prime");
  if (inst.m < 1 || static_cast<std::size_t>(inst.m) != inst.split.size() + inst.fields.size())
    throw Degenerate("degrees do not add up to 2m");
  std::set<Rat> split_roots;
  for (const auto& x : inst.split) {
    if (x.is_zero()) throw Degenerate("zero split value");
    for (const Rat& y : {-x, -x.inverse()}) {
      if (y == Rat(-1)) throw Degenerate("split root equals -1");
      if (!split_roots.insert(y).second) throw Degenerate("split roots are not distinct");
    }
  }
  int disc_sign = 1;
  for (std::size_t i = 0; i < inst.fields.size(); ++i) {
    const auto& x = inst.fields[i];
    if (is_padic_square(x.d(), inst.p)) throw Degenerate("Q_p(sqrt d) is split for d = " + std::to_string(x.d()));
    if (x.a().is_zero() || x.b().is_zero()) throw Degenerate("field root is +1 or -1");
    const QuadExtElem y = y_of(x);
    for (std::size_t k = 0; k < i; ++k) {
      const auto& z = inst.fields[k];
      if (z.d() != x.d()) continue;
      const QuadExtElem w = y_of(z);
      if (w == y || w == y.conj()) throw Degenerate("field roots are not distinct");
    }
    disc_sign *= hilbert(Rat(x.d()), Rat(-1), Place::finite(inst.p));
  }
  if (disc_sign != 1) throw Degenerate("discriminant character is nontrivial at -1");
}

WaldResult waldspurger_sign_product(const WaldInstance& inst) {
  validate(inst);
  const long m = inst.m;
  const long m0 = static_cast<long>(inst.fields.size());

  Poly p0{Rat(1)};
  for (const auto& x : inst.fields) p0 = multiply(p0, field_factor(y_of(x)));
  Poly p_all = p0;
  for (const auto& x : inst.split) p_all = multiply(p_all, split_factor(x));
  const Poly dp_all = derivative(p_all), dp0 = derivative(p0);
  const Rat at_minus_one = eval(p_all, Rat(-1)), at_minus_one0 = eval(p0, Rat(-1));

  WaldResult out{1, {}};
  for (const auto& x : inst.fields) {
    const std::int64_t d = x.d();
    const QuadExtElem y = y_of(x);
    const QuadExtElem one = QuadExtElem::rational(d, Rat(1));
    const QuadExtElem c = x.inverse() * eval(dp_all, y) * QuadExtElem::rational(d, at_minus_one) *
                          power(y, 1 - m) * (one + y);
    const QuadExtElem c0 = x.inverse() * eval(dp0, y) * QuadExtElem::rational(d, at_minus_one0) *
                           power(y, 1 - m0) * (one + y);
    if (c.is_zero() || c0.is_zero()) throw Degenerate("vanishing transfer factor");
    const QuadExtElem q = c / c0;
    if (!q.is_rational()) throw Degenerate("ratio C_i / C_i0 is not in the base field");

    QuadExtElem beta = one;
    for (const auto& s : inst.split)
      beta *= (y + QuadExtElem::rational(d, s)) * QuadExtElem::rational(d, s.inverse() - Rat(1));
    const Rat parity = (inst.split.size() % 2 == 0) ? Rat(1) : Rat(-1);

    WaldFactor factor{d, c, c0, q.a(), beta, q.a() == parity * beta.norm(),
                      sign_char(d, beta.norm(), inst.p), sign_char(d, q.a(), inst.p)};
    out.sign *= factor.sign;
    out.factors.push_back(std::move(factor));
  }
  return out;
}

}  // namespace phicert
