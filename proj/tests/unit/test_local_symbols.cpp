#include <doctest.h>

#include "oracles.hpp"
#include "phicert/errors.hpp"
#include "phicert/local_symbols.hpp"

using namespace phicert;

TEST_CASE("valuations and squarefree tests") {
  CHECK(valuation(Rat(18), 3) == 2);
  CHECK(valuation(Rat(5, 12), 2) == -2);
  CHECK_THROWS(valuation(Rat(0), 2));
  CHECK(is_squarefree(-6));
  CHECK_FALSE(is_squarefree(12));
  CHECK(is_padic_square(-1, 5));
  CHECK_FALSE(is_padic_square(-1, 3));
  CHECK(is_padic_square(-7, 2));
  CHECK_FALSE(is_padic_square(3, 2));
}

TEST_CASE("hilbert symbols on reference inputs") {
  CHECK(hilbert(Rat(-1), Rat(-1), Place::finite(2)) == -1);
  CHECK(hilbert(Rat(-1), Rat(-1), Place::infinity()) == -1);
  for (std::int64_t p : {2, 3, 5, 7, 11}) CHECK(hilbert(Rat(1), Rat(17), Place::finite(p)) == 1);
  CHECK(hilbert(Rat(2), Rat(3), Place::finite(3)) == -1);
  CHECK(product_formula(Rat(-1), Rat(-1)));
  CHECK(product_formula(Rat(2), Rat(3)));
  CHECK(product_formula(Rat(1), Rat(17)));
  CHECK_THROWS_AS(hilbert(Rat(0), Rat(3), Place::finite(3)), ZeroArgument);
}

TEST_CASE("hilbert symbols match the solvability oracle on rationals") {
  oracle::HilbertOracle solve;
  oracle::Rng rng(61);
  for (int k = 0; k < 1500; ++k) {
    const Rat a = rng.nonzero_rat(40, 30), b = rng.nonzero_rat(40, 30);
    const std::int64_t p = rng.pick(std::vector<std::int64_t>{0, 2, 3, 5, 7, 11});
    const Place v = p == 0 ? Place::infinity() : Place::finite(p);
    CHECK(hilbert(a, b, v) == solve(a, b, p));
  }
}

TEST_CASE("sign character") {
  CHECK(sign_char(-1, Rat(-1), 3) == 1);
  CHECK(sign_char(3, Rat(3), 3) == oracle::HilbertOracle()(Rat(3), Rat(3), 3));
  oracle::Rng rng(62);
  for (int k = 0; k < 200; ++k) {
    const std::int64_t p = rng.pick(std::vector<std::int64_t>{3, 5, 7});
    const auto d = rng.pick(oracle::nonsplit_discriminants(p, 20));
    const Rat u = rng.nonzero_rat(12, 6);
    CHECK(sign_char(d, u * u, p) == 1);
    // Norms from Q_p(sqrt d) are exactly the classes with trivial character.
    const Rat a = rng.rat(12, 6), b = rng.nonzero_rat(12, 6);
    CHECK(sign_char(d, QuadExtElem(d, a, b).norm(), p) == 1);
  }
  CHECK_THROWS_AS(sign_char(-1, Rat(2), 5), SplitExtension);
  CHECK_THROWS_AS(sign_char(2, Rat(0), 5), ZeroArgument);
}

TEST_CASE("quadratic field arithmetic") {
  const QuadExtElem x(2, Rat(1), Rat(1)), y(2, Rat(3, 2), Rat(-1));
  CHECK(x * x == QuadExtElem(2, Rat(3), Rat(2)));
  CHECK(x.norm() == Rat(-1));
  CHECK((x * y).norm() == x.norm() * y.norm());
  CHECK(x * x.inverse() == QuadExtElem::rational(2, Rat(1)));
  CHECK((x / y) * y == x);
  CHECK(x.conj().trace() == Rat(2));
  CHECK_THROWS(QuadExtElem(4, Rat(1), Rat(1)));
  CHECK_THROWS(x + QuadExtElem(3, Rat(1), Rat(1)));
  CHECK_THROWS(QuadExtElem(2, Rat(0), Rat(0)).inverse());
}

TEST_CASE("waldspurger sign product on reference instances") {
  const WaldInstance only_fields{3, 1, {}, {QuadExtElem(-1, Rat(1), Rat(2))}};
  const WaldResult r0 = waldspurger_sign_product(only_fields);
  CHECK(r0.sign == 1);
  REQUIRE(r0.factors.size() == 1);
  CHECK(r0.factors[0].ratio == Rat(1));

  const WaldInstance five{5, 2, {Rat(2)}, {QuadExtElem(2, Rat(1), Rat(1))}};
  const WaldResult r1 = waldspurger_sign_product(five);
  CHECK(r1.sign == 1);
  CHECK(r1.factors[0].decomposition_holds);

  const WaldInstance three{3, 3, {Rat(2), Rat(5)}, {QuadExtElem(-1, Rat(1), Rat(2))}};
  const WaldResult r2 = waldspurger_sign_product(three);
  CHECK(r2.sign == 1);
  CHECK(r2.factors[0].decomposition_holds);
  CHECK(r2.factors[0].norm_sign == 1);
}

TEST_CASE("degenerate instances are rejected") {
  CHECK_THROWS_AS(validate({2, 1, {}, {QuadExtElem(3, Rat(1), Rat(1))}}), Degenerate);
  CHECK_THROWS_AS(validate({5, 2, {Rat(2)}, {}}), Degenerate);
  CHECK_THROWS_AS(validate({5, 2, {Rat(1), Rat(3)}, {}}), Degenerate);
  CHECK_THROWS_AS(validate({5, 2, {Rat(2), Rat(1, 2)}, {}}), Degenerate);
  CHECK_THROWS_AS(validate({5, 1, {}, {QuadExtElem(-1, Rat(1), Rat(1))}}), Degenerate);
  CHECK_THROWS_AS(validate({3, 1, {}, {QuadExtElem(-1, Rat(0), Rat(1))}}), Degenerate);
}
