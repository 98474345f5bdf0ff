#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "phicert/json_io.hpp"
#include "phicert/replay.hpp"

using namespace phicert;

namespace {

std::vector<Rat> rats(std::initializer_list<long> xs) {
  std::vector<Rat> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

// Exhaustive splitting check: a proper subset survives when its prefix walk and the walk of
// its complement both stay nonnegative and end at zero. Each unordered pair is reported once,
// through the smaller member (ties broken lexicographically).
std::vector<std::vector<int>> brute_survivors(const NormalizedSlopes& nu) {
  const auto idx = nu.indices();
  const int m = static_cast<int>(idx.size());
  auto walk = [&](const std::vector<int>& part) {
    Rat acc;
    for (int i : part) {
      acc += nu.at(i);
      if (acc.sign() < 0) return false;
    }
    return acc.is_zero();
  };
  auto smaller = [](const std::vector<int>& x, const std::vector<int>& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  };
  std::set<std::vector<int>> found;
  for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
    std::vector<int> in, rest;
    for (int b = 0; b < m; ++b) ((mask >> b) & 1u ? in : rest).push_back(idx[b]);
    if (walk(in) && walk(rest)) found.insert(smaller(rest, in) ? rest : in);
  }
  std::vector<std::vector<int>> out(found.begin(), found.end());
  std::sort(out.begin(), out.end(), smaller);
  return out;
}

}  // namespace

TEST_CASE("splitting certification on reference inputs") {
  const auto c = certify_splittings({Schema::C, {Rat(-3)}});
  CHECK(c.verdict == Verdict::ArtinPlusIrreducible);
  CHECK(c.survivors == std::vector<std::vector<int>>{{0}});

  const auto d = certify_splittings({Schema::D, {Rat(1), Rat(-3)}});
  CHECK(d.verdict == Verdict::Irreducible);
  CHECK(d.survivors.empty());

  const auto bad = certify_splittings({Schema::D, {Rat(1), Rat(-1)}});
  CHECK(bad.verdict == Verdict::Failed);
  CHECK(bad.survivors == std::vector<std::vector<int>>{{-2, -1}});
}

TEST_CASE("verdict names round-trip") {
  for (Verdict v : {Verdict::Irreducible, Verdict::ArtinPlusIrreducible, Verdict::Failed})
    CHECK(verdict_from_string(to_string(v)) == v);
  CHECK_THROWS(verdict_from_string("maybe"));
}

TEST_CASE("symplectic replay reproduces the worked certificate") {
  const std::vector<PlaceInput> in{{LocalDatum(3, 1, 1), RefinedSlopes(rats({0, 0}))}};
  const Certificate c = replay_symplectic(2, in);
  const auto& pc = c.places.front();
  CHECK(pc.k1 == WeightTable(2, {{6, 4}}));
  CHECK(pc.x1_prime == RefinedSlopes(rats({-10, -16})));
  CHECK(pc.k2.at(0, 1) - pc.k2.at(0, 2) >= 16);
  CHECK(pc.x2_prime == RefinedSlopes(rats({1, -27})));
  CHECK(pc.survivors == std::vector<std::vector<int>>{{0}});
  CHECK(c.verdict == Verdict::ArtinPlusIrreducible);
  CHECK(verify_certificate(c).accepted());
}

TEST_CASE("replay end-to-end cases") {
  const std::vector<PlaceInput> sp3{{LocalDatum(5, 1, 2), RefinedSlopes(rats({0, 0, 0}))}};
  CHECK(replay_symplectic(3, sp3).verdict == Verdict::ArtinPlusIrreducible);

  const std::vector<PlaceInput> so1{{LocalDatum(3, 1, 1), RefinedSlopes(rats({0, 0}))}};
  CHECK(replay_orthogonal(1, so1).verdict == Verdict::Irreducible);

  const std::vector<PlaceInput> so2{{LocalDatum(3, 1, 1), RefinedSlopes({Rat(1, 2), Rat(0), Rat(-1, 2), Rat(0)})}};
  const Certificate c = replay_orthogonal(2, so2);
  CHECK(c.verdict == Verdict::Irreducible);
  CHECK(verify_certificate(c).accepted());

  const std::vector<PlaceInput> two_places{{LocalDatum(2, 2, 1), RefinedSlopes({Rat(1, 3), Rat(-2)})},
                                           {LocalDatum(7, 1, 1), RefinedSlopes(rats({5, 1}))}};
  const Certificate multi = replay_symplectic(2, two_places);
  CHECK(multi.places.size() == 2);
  CHECK(multi.verdict == Verdict::ArtinPlusIrreducible);
  CHECK(verify_certificate(multi).accepted());
}

TEST_CASE("forced failures") {
  const std::vector<PlaceInput> sp{{LocalDatum(3, 1, 1), RefinedSlopes(rats({2, -1}))}};
  ReplayOptions tight;
  tight.radius = 0;
  try {
    replay_symplectic(2, sp, tight);
    FAIL("expected a step failure");
  } catch (const StepFailed& e) {
    CHECK(e.step == 1);
    CHECK(e.place == 0);
  }

  ReplayOptions skip;
  skip.skip_step1 = true;
  const std::vector<PlaceInput> so{{LocalDatum(3, 1, 1), RefinedSlopes(rats({-40, -40}))}};
  CHECK(replay_orthogonal(1, so).verdict == Verdict::Irreducible);
  CHECK_THROWS_AS(replay_orthogonal(1, so, skip), VerdictFailed);

  CHECK_THROWS(replay_symplectic(2, std::vector<PlaceInput>{{LocalDatum(3, 1, 1), RefinedSlopes(rats({0}))}}));
  CHECK_THROWS(replay_symplectic(2, std::vector<PlaceInput>{}));
}

TEST_CASE("surviving splittings agree with exhaustive enumeration") {
  oracle::Rng rng(71);
  for (int k = 0; k < 600; ++k) {
    const Schema s = rng.coin() ? Schema::C : Schema::D;
    const int r = static_cast<int>(rng.uniform(1, 3)) * (s == Schema::D ? 2 : 1);
    NormalizedSlopes nu{s, {}};
    for (int i = 0; i < r; ++i) nu.positive.push_back(rng.rat(4, 2));
    CHECK(certify_splittings(nu).survivors == brute_survivors(nu));
  }
}

TEST_CASE("random replays certify and survive verification; tampering is caught") {
  oracle::Rng rng(72);
  for (int k = 0; k < 60; ++k) {
    const bool sp = rng.coin();
    const int n = static_cast<int>(rng.uniform(sp ? 2 : 1, sp ? 3 : 2));
    const int rank = sp ? n : 2 * n;
    std::vector<Rat> seed;
    for (int i = 0; i < rank; ++i) seed.push_back(rng.rat(6, 3));
    const auto shape = rng.pick(std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}});
    const std::vector<PlaceInput> in{{LocalDatum(rng.pick(std::vector<std::int64_t>{2, 3, 5}),
                                                 shape.first, shape.second),
                                      RefinedSlopes(seed)}};
    const Certificate c = sp ? replay_symplectic(n, in) : replay_orthogonal(n, in);
    CHECK(c.verdict != Verdict::Failed);
    CHECK(verify_certificate(c).accepted());

    Certificate forged = c;
    auto vals = forged.places[0].x2_prime.values();
    vals[0] += Rat(1);
    forged.places[0].x2_prime = RefinedSlopes(vals);
    CHECK_FALSE(verify_certificate(forged).accepted());

    Certificate relabeled = c;
    relabeled.verdict = c.verdict == Verdict::Irreducible ? Verdict::ArtinPlusIrreducible : Verdict::Irreducible;
    CHECK_FALSE(verify_certificate(relabeled).accepted());
  }
}
