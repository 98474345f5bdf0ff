#include "phicert/replay.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace phicert {

Rat NormalizedSlopes::at(int m) const {
  if (m == 0) {
    if (schema == Schema::D) throw std::out_of_range("index 0 is absent in schema D");
    return Rat(0);
  }
  if (m < 0) return -at(-m);
  return positive.at(m - 1);
}

std::vector<int> NormalizedSlopes::indices() const {
  std::vector<int> out;
  for (int m = -rank(); m <= rank(); ++m)
    if (m != 0 || schema == Schema::C) out.push_back(m);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Irreducible: return "Irreducible";
    case Verdict::ArtinPlusIrreducible: return "ArtinPlusIrreducible";
    case Verdict::Failed: return "Failed";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "Irreducible") return Verdict::Irreducible;
  if (s == "ArtinPlusIrreducible") return Verdict::ArtinPlusIrreducible;
  if (s == "Failed") return Verdict::Failed;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

SplittingResult certify_splittings(const NormalizedSlopes& nu) {
  const auto idx = nu.indices();
  const int size = static_cast<int>(idx.size());
  if (size > 30) throw std::invalid_argument("index set too large");
  std::vector<Rat> value;
  for (int m : idx) value.push_back(nu.at(m));

  auto walk_ok = [&](std::uint32_t mask) {
    Rat acc;
    for (int b = 0; b < size; ++b) {
      if (!(mask & (1u << b))) continue;
      acc += value[b];
      if (acc.sign() < 0) return false;
    }
    return acc.is_zero();
  };
  auto members = [&](std::uint32_t mask) {
    std::vector<int> out;
    for (int b = 0; b < size; ++b)
      if (mask & (1u << b)) out.push_back(idx[b]);
    return out;
  };

  const std::uint32_t full = size == 32 ? ~0u : ((1u << size) - 1);
  SplittingResult res{{}, Verdict::Failed};
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    const std::uint32_t comp = full & ~mask;
    // Visit each unordered pair {I, complement} once, through its canonical member.
    const int a = std::popcount(mask), b = std::popcount(comp);
    if (a > b) continue;
    if (a == b && members(comp) < members(mask)) continue;
    if (walk_ok(mask) && walk_ok(comp)) res.survivors.push_back(members(mask));
  }
  std::sort(res.survivors.begin(), res.survivors.end(), [](const auto& x, const auto& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  if (res.survivors.empty()) {
    res.verdict = Verdict::Irreducible;
  } else if (nu.schema == Schema::C && res.survivors.size() == 1 && res.survivors[0] == std::vector<int>{0}) {
    res.verdict = Verdict::ArtinPlusIrreducible;
  }
  return res;
}

namespace {

struct Pipeline {
  Schema schema;
  int r;
  WeylType type() const { return schema == Schema::C ? WeylType::C : WeylType::D; }
  int module_rank() const { return schema == Schema::C ? 2 * r + 1 : 2 * r; }
  std::int64_t step1_constant() const {
    return schema == Schema::C ? 3LL * r * (r + 1) : 3LL * r * r + r;
  }
  SignedPerm first_move() const {
    auto w = minus_identity(type(), r);
    if (!w) throw std::invalid_argument("-Id is not in the Weyl group of type D at odd rank");
    return *w;
  }
  SignedPerm second_move() const { return shift_cycle(r, type()); }
  Verdict expected() const { return schema == Schema::C ? Verdict::ArtinPlusIrreducible : Verdict::Irreducible; }
};

Rat sum_of(const RefinedSlopes& s) {
  Rat acc;
  for (const auto& v : s.values()) acc += v;
  return acc;
}

Rat step1_margin(const Pipeline& pl, const LocalDatum& local, const WeightTable& k1, const RefinedSlopes& x1) {
  std::int64_t total = 0;
  for (const auto& row : k1.rows())
    for (auto k : row) total += k;
  const Rat lhs = Rat(2 * total) / Rat(local.e());
  const Rat rhs = -sum_of(x1) + Rat(pl.step1_constant() * local.f());
  return lhs - rhs;
}

std::vector<Rat> step2_margins(const Pipeline& pl, const LocalDatum& local, const WeightTable& k2,
                               const RefinedSlopes& x2) {
  std::vector<Rat> out;
  for (int j = -(pl.r - 1); j <= -1; ++j) {
    const std::int64_t gap = k2.column_sum(pl.r + j) - k2.column_sum(pl.r + j + 1);
    const Rat lhs = Rat(gap) / Rat(local.e());
    const Rat rhs = -x2.at(-j + 1) - Rat(local.f());
    out.push_back(lhs - rhs);
  }
  return out;
}

Rat largest_abs(const RefinedSlopes& x) {
  Rat m(0);
  for (const auto& v : x.values()) m = std::max(m, v.abs());
  return m;
}

std::int64_t min_gap(const WeightTable& k, int sigma) {
  std::int64_t g = k.at(sigma, k.rank());
  for (int i = 1; i < k.rank(); ++i) g = std::min(g, k.at(sigma, i) - k.at(sigma, i + 1));
  return g;
}

std::vector<Rat> step3_margins(const Pipeline& pl, const LocalDatum& local, const WeightTable& k3,
                               const RefinedSlopes& x3) {
  std::vector<Rat> out;
  const Rat m = largest_abs(x3);
  for (int s = 0; s < k3.embeddings(); ++s)
    out.push_back(Rat(min_gap(k3, s)) / Rat(static_cast<long>(local.e()) * pl.module_rank()) - m);
  return out;
}

// Strict bound b with (integer form > b) equivalent to (form >= x).
Rat at_least(const Rat& x) { return Rat(mpz_class(x.ceil() - 1)); }

std::vector<LinearForm> regularity_forms(int r, int embeddings) {
  std::vector<LinearForm> forms;
  for (int s = 0; s < embeddings; ++s) {
    for (int i = 1; i <= r; ++i) {
      std::vector<std::int64_t> c(static_cast<std::size_t>(r) * embeddings, 0);
      c[s * r + i - 1] = 1;
      if (i < r) c[s * r + i] = -1;
      forms.push_back({std::move(c), Rat(0)});
    }
  }
  return forms;
}

WeightTable find_or_fail(const std::vector<LinearForm>& forms, int r, int embeddings, std::int64_t radius, int step,
                         std::size_t place) {
  try {
    return cone_find(forms, r, embeddings, radius);
  } catch (const EmptyCone& e) {
    throw StepFailed(step, place, e.what());
  }
}

struct Evaluation {
  Rat step1;
  std::vector<Rat> step2, step3, hypothesis;
  std::vector<AlignmentKind> alignment;
  SplittingResult split;
  Verdict verdict;
  std::string reason;
};

Evaluation evaluate(const Pipeline& pl, const LocalDatum& local, const RefinedSlopes& seed, const WeightTable& k1,
                    const RefinedSlopes& x1p, const WeightTable& k2, const RefinedSlopes& x2p,
                    const WeightTable& k3) {
  Evaluation ev;
  ev.step1 = step1_margin(pl, local, k1, seed);
  ev.step2 = step2_margins(pl, local, k2, x1p);
  ev.step3 = step3_margins(pl, local, k3, x2p);

  const NormalizedSlopes nu{pl.schema, x2p.values()};
  ev.split = certify_splittings(nu);
  ev.verdict = pl.expected();

  const PhiModuleDatum datum = final_datum(pl.schema, local, k3, x2p);
  for (int tau = 1; tau <= local.embeddings(); ++tau) {
    ev.hypothesis.push_back(alignment_bound(datum, tau) - largest_abs(x2p));
    if (!datum.distinct()) {
      ev.alignment.push_back(AlignmentKind::HypothesisFailed);
      continue;
    }
    ev.alignment.push_back(alignment_check(datum, tau).kind);
  }

  auto fail = [&](std::string why) {
    if (ev.verdict != Verdict::Failed) {
      ev.verdict = Verdict::Failed;
      ev.reason = std::move(why);
    }
  };
  if (!datum.distinct()) fail("final slopes are not pairwise distinct");
  for (std::size_t t = 0; t < ev.alignment.size(); ++t)
    if (ev.alignment[t] != AlignmentKind::Certified)
      fail("alignment at embedding " + std::to_string(t + 1) + ": " + to_string(ev.alignment[t]));
  const int r = pl.r;
  for (int i = 1; i < r; ++i)
    if (nu.at(i).sign() <= 0) fail("nu(" + std::to_string(i) + ") is not positive");
  if (nu.at(r).sign() >= 0) fail("nu(" + std::to_string(r) + ") is not negative");
  if (sum_of(x2p).sign() >= 0) fail("sum of nu over positive indices is not negative");
  if (ev.split.verdict != pl.expected())
    fail("splitting certification returned " + to_string(ev.split.verdict) + " with " +
         std::to_string(ev.split.survivors.size()) + " survivor(s)");
  return ev;
}

Certificate run(const Pipeline& pl, std::span<const PlaceInput> places, const ReplayOptions& opt) {
  if (places.empty()) throw std::invalid_argument("at least one place is required");
  const SignedPerm w1 = pl.first_move(), w2 = pl.second_move();
  const int r = pl.r;
  Certificate cert{pl.schema, r, opt.convention, opt.skip_step1, {}, pl.expected(), ""};

  for (std::size_t v = 0; v < places.size(); ++v) {
    const auto& local = places[v].local;
    const auto& seed = places[v].seed;
    if (seed.rank() != r)
      throw std::invalid_argument("seed at place " + std::to_string(v) + " has rank " + std::to_string(seed.rank()) +
                                  ", expected " + std::to_string(r));
    const int E = local.embeddings();
    const Rat e(local.e());

    auto forms = regularity_forms(r, E);
    if (!opt.skip_step1) {
      const Rat rhs = -sum_of(seed) + Rat(pl.step1_constant() * local.f());
      forms.push_back({std::vector<std::int64_t>(static_cast<std::size_t>(r) * E, 1), at_least(e * (rhs + 1) / 2)});
    }
    const WeightTable k1 = find_or_fail(forms, r, E, opt.radius, 1, v);
    const RefinedSlopes x1p = change_refinement(w1, local, k1, seed, opt.convention);

    forms = regularity_forms(r, E);
    for (int j = -(r - 1); j <= -1; ++j) {
      std::vector<std::int64_t> c(static_cast<std::size_t>(r) * E, 0);
      for (int s = 0; s < E; ++s) {
        c[s * r + (r + j) - 1] = 1;
        c[s * r + (r + j)] = -1;
      }
      const Rat rhs = -x1p.at(-j + 1) - Rat(local.f());
      forms.push_back({std::move(c), at_least(e * (rhs + 1))});
    }
    const WeightTable k2 = find_or_fail(forms, r, E, opt.radius, 2, v);
    const RefinedSlopes x2p = change_refinement(w2, local, k2, x1p, opt.convention);

    forms = regularity_forms(r, E);
    const Rat need = e * Rat(pl.module_rank()) * (largest_abs(x2p) + 1);
    for (auto& f : forms) f.bound = std::max(f.bound, at_least(need));
    const WeightTable k3 = find_or_fail(forms, r, E, opt.radius, 3, v);

    Evaluation ev = evaluate(pl, local, seed, k1, x1p, k2, x2p, k3);
    PlaceCertificate pc{local, seed, k1, x1p, k2, x2p, k3, ev.step1, ev.step2, ev.step3, ev.hypothesis,
                        ev.alignment, ev.split.survivors, ev.verdict, ev.reason};
    if (pc.verdict == Verdict::Failed && cert.verdict != Verdict::Failed) {
      cert.verdict = Verdict::Failed;
      cert.reason = "place " + std::to_string(v) + ": " + pc.reason;
    }
    cert.places.push_back(std::move(pc));
  }
  if (cert.verdict == Verdict::Failed) throw VerdictFailed(cert);
  return cert;
}

}  // namespace

PhiModuleDatum final_datum(Schema schema, const LocalDatum& local, const WeightTable& k3, const RefinedSlopes& x3) {
  auto kappa = hodge_tate_weights(local, k3, schema);
  const NormalizedSlopes nu{schema, x3.values()};
  const auto idx = nu.indices();
  std::vector<Rat> slopes;
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    std::int64_t s = 0;
    for (const auto& row : kappa) s += row[pos];
    slopes.push_back(Rat(s) / Rat(local.e()) + nu.at(idx[pos]));
  }
  return PhiModuleDatum(local.e(), local.f(), std::move(slopes), std::move(kappa));
}

Certificate replay_symplectic(int n, std::span<const PlaceInput> places, const ReplayOptions& options) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  return run(Pipeline{Schema::C, n}, places, options);
}

Certificate replay_orthogonal(int n, std::span<const PlaceInput> places, const ReplayOptions& options) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  return run(Pipeline{Schema::D, 2 * n}, places, options);
}

VerificationReport verify_certificate(const Certificate& cert) {
  VerificationReport rep;
  auto problem = [&](std::string s) {
    rep.consistent = false;
    rep.problems.push_back(std::move(s));
  };
  const Pipeline pl{cert.schema, cert.rank};
  if (cert.schema == Schema::D && cert.rank % 2 != 0) {
    problem("type D certificate with odd rank");
    return rep;
  }
  if (cert.places.empty()) problem("certificate has no places");

  Verdict overall = pl.expected();
  for (std::size_t v = 0; v < cert.places.size(); ++v) {
    const auto& pc = cert.places[v];
    const std::string at = "place " + std::to_string(v) + ": ";
    const auto& local = pc.local;
    try {
      for (const WeightTable* k : {&pc.k1, &pc.k2, &pc.k3}) {
        if (k->rank() != cert.rank || k->embeddings() != local.embeddings()) {
          problem(at + "weight table has the wrong shape");
          throw std::runtime_error("shape");
        }
        if (!very_regular(*k, Rat(1))) problem(at + "weights are not strictly regular");
      }
      if (pc.seed.rank() != cert.rank) {
        problem(at + "seed has the wrong rank");
        continue;
      }
      const auto x1p = change_refinement(pl.first_move(), local, pc.k1, pc.seed, cert.convention);
      if (!(x1p == pc.x1_prime)) problem(at + "slopes after the first move do not match");
      const auto x2p = change_refinement(pl.second_move(), local, pc.k2, pc.x1_prime, cert.convention);
      if (!(x2p == pc.x2_prime)) problem(at + "slopes after the second move do not match");

      const Evaluation ev = evaluate(pl, local, pc.seed, pc.k1, pc.x1_prime, pc.k2, pc.x2_prime, pc.k3);
      if (!(ev.step1 == pc.step1_margin)) problem(at + "step 1 margin does not match");
      if (!cert.step1_skipped && ev.step1.sign() <= 0) problem(at + "step 1 inequality fails");
      if (ev.step2 != pc.step2_margins) problem(at + "step 2 margins do not match");
      for (const auto& m : ev.step2)
        if (m.sign() <= 0) problem(at + "step 2 inequality fails");
      if (ev.step3 != pc.step3_margins) problem(at + "step 3 margins do not match");
      for (const auto& m : ev.step3)
        if (m.sign() <= 0) problem(at + "step 3 inequality fails");
      if (ev.hypothesis != pc.hypothesis_margins) problem(at + "hypothesis margins do not match");
      if (ev.alignment != pc.alignment) problem(at + "alignment results do not match");
      if (ev.split.survivors != pc.survivors) problem(at + "surviving splittings do not match");
      if (ev.verdict != pc.verdict) problem(at + "place verdict does not match");
      if (ev.verdict == Verdict::Failed) overall = Verdict::Failed;
    } catch (const std::exception& e) {
      if (std::string(e.what()) != "shape") problem(at + e.what());
      overall = Verdict::Failed;
    }
  }
  if (overall != cert.verdict) problem("overall verdict does not match");
  rep.verdict = overall;
  return rep;
}

}  // namespace phicert
