#include "phicert/json_io.hpp"

namespace phicert {

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing field");
  return *it;
}

std::int64_t int_from_json(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::vector<Rat> rats_from_json(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<Rat> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rat_from_json(j[i], path + "/" + std::to_string(i)));
  return out;
}

json rats_to_json(const std::vector<Rat>& v) {
  json a = json::array();
  for (const auto& r : v) a.push_back(to_json(r));
  return a;
}

template <class T, class F>
T wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
}

}  // namespace

json to_json(const Rat& r) { return r.str(); }

Rat rat_from_json(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (!j.is_string()) throw SchemaError(path, "expected a rational string \"num/den\"");
  return wrap<Rat>(path, [&] { return Rat::parse(j.get<std::string>()); });
}

json to_json(const WeightTable& w) { return w.rows(); }

WeightTable weights_from_json(const json& j, int rank, int embeddings, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != embeddings)
    throw SchemaError(path, "expected " + std::to_string(embeddings) + " weight rows");
  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t s = 0; s < j.size(); ++s) {
    const std::string p = path + "/" + std::to_string(s);
    if (!j[s].is_array() || static_cast<int>(j[s].size()) != rank)
      throw SchemaError(p, "expected " + std::to_string(rank) + " weights");
    std::vector<std::int64_t> row;
    for (std::size_t i = 0; i < j[s].size(); ++i) row.push_back(int_from_json(j[s][i], p + "/" + std::to_string(i)));
    rows.push_back(std::move(row));
  }
  return wrap<WeightTable>(path, [&] { return WeightTable(rank, std::move(rows)); });
}

json to_json(const RefinedSlopes& s) { return rats_to_json(s.values()); }

RefinedSlopes slopes_from_json(const json& j, const std::string& path) {
  return RefinedSlopes(rats_from_json(j, path));
}

json to_json(const SubmoduleCandidate& c) { return json{{"subset", c.subset}, {"theta", c.theta}}; }

SubmoduleCandidate candidate_from_json(const json& j, const std::string& path) {
  SubmoduleCandidate c;
  const auto& subset = field(j, "subset", path);
  const auto& theta = field(j, "theta", path);
  if (!subset.is_array()) throw SchemaError(path + "/subset", "expected an array");
  for (std::size_t i = 0; i < subset.size(); ++i)
    c.subset.push_back(static_cast<int>(int_from_json(subset[i], path + "/subset/" + std::to_string(i))));
  if (!theta.is_array()) throw SchemaError(path + "/theta", "expected an array");
  for (std::size_t s = 0; s < theta.size(); ++s) {
    const std::string p = path + "/theta/" + std::to_string(s);
    if (!theta[s].is_array()) throw SchemaError(p, "expected an array");
    std::vector<int> row;
    for (std::size_t i = 0; i < theta[s].size(); ++i)
      row.push_back(static_cast<int>(int_from_json(theta[s][i], p + "/" + std::to_string(i))));
    c.theta.push_back(std::move(row));
  }
  return c;
}

json to_json(const PinnedCase& c) {
  return json{{"e", c.e},         {"f", c.f},           {"slopes", rats_to_json(c.slopes)},
              {"weights", c.weights}, {"tau", c.tau},     {"margin", to_json(c.margin)},
              {"witness", to_json(c.witness)}};
}

PinnedCase pinned_from_json(const json& j, const std::string& path) {
  PinnedCase c{};
  c.e = static_cast<int>(int_from_json(field(j, "e", path), path + "/e"));
  c.f = static_cast<int>(int_from_json(field(j, "f", path), path + "/f"));
  c.slopes = rats_from_json(field(j, "slopes", path), path + "/slopes");
  const auto& w = field(j, "weights", path);
  if (!w.is_array()) throw SchemaError(path + "/weights", "expected an array");
  for (std::size_t s = 0; s < w.size(); ++s) {
    const std::string p = path + "/weights/" + std::to_string(s);
    if (!w[s].is_array()) throw SchemaError(p, "expected an array");
    std::vector<std::int64_t> row;
    for (std::size_t i = 0; i < w[s].size(); ++i) row.push_back(int_from_json(w[s][i], p + "/" + std::to_string(i)));
    c.weights.push_back(std::move(row));
  }
  c.tau = static_cast<int>(int_from_json(field(j, "tau", path), path + "/tau"));
  c.margin = rat_from_json(field(j, "margin", path), path + "/margin");
  c.witness = candidate_from_json(field(j, "witness", path), path + "/witness");
  return c;
}

namespace {

json counts_to_json(const ScanCounts& c) {
  return json{{"data", c.data},
              {"certified", c.certified},
              {"hypothesis_failed", c.hypothesis_failed},
              {"counterexamples", c.counterexamples},
              {"skipped_not_distinct", c.skipped_not_distinct}};
}

}  // namespace

json to_json(const ScanSummary& s) {
  json slices = json::array();
  for (const auto& sl : s.slices)
    slices.push_back(json{{"e", sl.e}, {"f", sl.f}, {"rank", sl.rank}, {"counts", counts_to_json(sl.counts)}});
  json pinned = json::array();
  for (const auto& p : s.pinned) pinned.push_back(to_json(p));
  return json{{"totals", counts_to_json(s.totals)}, {"slices", slices}, {"pinned", pinned}, {"truncated", s.truncated}};
}

json to_json(const Certificate& c) {
  json places = json::array();
  for (const auto& pc : c.places) {
    json align = json::array();
    for (auto k : pc.alignment) align.push_back(to_string(k));
    places.push_back(json{
        {"local", {{"p", pc.local.p()}, {"e", pc.local.e()}, {"f", pc.local.f()}}},
        {"seed", to_json(pc.seed)},
        {"k1", to_json(pc.k1)},
        {"x1_prime", to_json(pc.x1_prime)},
        {"k2", to_json(pc.k2)},
        {"x2_prime", to_json(pc.x2_prime)},
        {"k3", to_json(pc.k3)},
        {"step1_margin", to_json(pc.step1_margin)},
        {"step2_margins", rats_to_json(pc.step2_margins)},
        {"step3_margins", rats_to_json(pc.step3_margins)},
        {"hypothesis_margins", rats_to_json(pc.hypothesis_margins)},
        {"alignment", align},
        {"survivors", pc.survivors},
        {"verdict", to_string(pc.verdict)},
        {"reason", pc.reason},
    });
  }
  return json{
      {"schema", to_string(c.schema)},
      {"rank", c.rank},
      {"convention", c.convention == ExponentConvention::Invariant ? "invariant" : "paper-sign"},
      {"step1_skipped", c.step1_skipped},
      {"places", places},
      {"verdict", to_string(c.verdict)},
      {"reason", c.reason},
  };
}

Certificate certificate_from_json(const json& j, const std::string& path) {
  Certificate c{};
  const auto& schema = field(j, "schema", path);
  if (schema != "C" && schema != "D") throw SchemaError(path + "/schema", "expected \"C\" or \"D\"");
  c.schema = schema == "C" ? Schema::C : Schema::D;
  c.rank = static_cast<int>(int_from_json(field(j, "rank", path), path + "/rank"));
  if (c.rank < 1) throw SchemaError(path + "/rank", "must be positive");
  const auto& conv = field(j, "convention", path);
  if (conv != "invariant" && conv != "paper-sign")
    throw SchemaError(path + "/convention", "expected \"invariant\" or \"paper-sign\"");
  c.convention = conv == "invariant" ? ExponentConvention::Invariant : ExponentConvention::PaperSign;
  const auto& skipped = field(j, "step1_skipped", path);
  if (!skipped.is_boolean()) throw SchemaError(path + "/step1_skipped", "expected a boolean");
  c.step1_skipped = skipped.get<bool>();
  c.verdict = wrap<Verdict>(path + "/verdict", [&] {
    return verdict_from_string(field(j, "verdict", path).get<std::string>());
  });
  const auto& reason = field(j, "reason", path);
  if (!reason.is_string()) throw SchemaError(path + "/reason", "expected a string");
  c.reason = reason.get<std::string>();

  const auto& places = field(j, "places", path);
  if (!places.is_array()) throw SchemaError(path + "/places", "expected an array");
  for (std::size_t v = 0; v < places.size(); ++v) {
    const std::string pp = path + "/places/" + std::to_string(v);
    const auto& pj = places[v];
    const auto& lj = field(pj, "local", pp);
    const LocalDatum local = wrap<LocalDatum>(pp + "/local", [&] {
      return LocalDatum(int_from_json(field(lj, "p", pp + "/local"), pp + "/local/p"),
                        static_cast<int>(int_from_json(field(lj, "e", pp + "/local"), pp + "/local/e")),
                        static_cast<int>(int_from_json(field(lj, "f", pp + "/local"), pp + "/local/f")));
    });
    const int E = local.embeddings();
    auto weights = [&](const char* key) {
      return weights_from_json(field(pj, key, pp), c.rank, E, pp + "/" + key);
    };
    auto slopes = [&](const char* key) { return slopes_from_json(field(pj, key, pp), pp + "/" + key); };
    auto rats = [&](const char* key) { return rats_from_json(field(pj, key, pp), pp + "/" + key); };

    std::vector<AlignmentKind> align;
    const auto& aj = field(pj, "alignment", pp);
    if (!aj.is_array()) throw SchemaError(pp + "/alignment", "expected an array");
    for (std::size_t t = 0; t < aj.size(); ++t) {
      const std::string s = aj[t].is_string() ? aj[t].get<std::string>() : "";
      if (s == "Certified") align.push_back(AlignmentKind::Certified);
      else if (s == "HypothesisFailed") align.push_back(AlignmentKind::HypothesisFailed);
      else if (s == "CounterExample") align.push_back(AlignmentKind::CounterExample);
      else throw SchemaError(pp + "/alignment/" + std::to_string(t), "unknown alignment result");
    }
    const auto& sj = field(pj, "survivors", pp);
    std::vector<std::vector<int>> survivors;
    if (!sj.is_array()) throw SchemaError(pp + "/survivors", "expected an array");
    for (std::size_t s = 0; s < sj.size(); ++s) {
      if (!sj[s].is_array()) throw SchemaError(pp + "/survivors/" + std::to_string(s), "expected an array");
      std::vector<int> set;
      for (std::size_t i = 0; i < sj[s].size(); ++i)
        set.push_back(static_cast<int>(int_from_json(sj[s][i], pp + "/survivors/" + std::to_string(s) + "/" + std::to_string(i))));
      survivors.push_back(std::move(set));
    }
    const auto& rj = field(pj, "reason", pp);
    if (!rj.is_string()) throw SchemaError(pp + "/reason", "expected a string");

    c.places.push_back(PlaceCertificate{
        local, slopes("seed"), weights("k1"), slopes("x1_prime"), weights("k2"), slopes("x2_prime"), weights("k3"),
        rat_from_json(field(pj, "step1_margin", pp), pp + "/step1_margin"), rats("step2_margins"),
        rats("step3_margins"), rats("hypothesis_margins"), std::move(align), std::move(survivors),
        wrap<Verdict>(pp + "/verdict", [&] { return verdict_from_string(field(pj, "verdict", pp).get<std::string>()); }),
        rj.get<std::string>()});
  }
  return c;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace phicert
