#include "phicert/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "phicert/admissibility.hpp"
#include "phicert/local_symbols.hpp"
#include "phicert/principal_series.hpp"
#include "phicert/replay.hpp"
#include "phicert/satake.hpp"
#include "phicert/scan.hpp"

namespace phicert::cli {

namespace {

// Read-only view of a JSON object that reports every problem with its path; close()
// rejects fields that were never asked about.
class Fields {
public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "/" : path_, "expected an object");
  }
  Fields(const Fields&) = delete;

  void close() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw SchemaError(at(it.key()), "unknown field");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& req(const std::string& key) {
    if (!has(key)) throw SchemaError(at(key), "missing field");
    return j_.at(key);
  }

  std::int64_t integer(const std::string& key) { return as_integer(req(key), at(key)); }
  std::int64_t integer(const std::string& key, std::int64_t fallback) { return has(key) ? integer(key) : fallback; }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(at(key), "expected a boolean");
    return v.get<bool>();
  }
  std::string string(const std::string& key) {
    const json& v = req(key);
    if (!v.is_string()) throw SchemaError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }
  Rat rat(const std::string& key) { return rat_from_json(req(key), at(key)); }
  std::vector<Rat> rats(const std::string& key) { return as_rats(req(key), at(key)); }
  std::vector<std::vector<std::int64_t>> matrix(const std::string& key) { return as_matrix(req(key), at(key)); }
  const json& array(const std::string& key) {
    const json& v = req(key);
    if (!v.is_array()) throw SchemaError(at(key), "expected an array");
    return v;
  }

  static std::int64_t as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<std::int64_t>();
  }
  static std::vector<Rat> as_rats(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of rationals");
    std::vector<Rat> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(rat_from_json(v[i], path + "/" + std::to_string(i)));
    return out;
  }
  static std::vector<std::vector<std::int64_t>> as_matrix(const json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of integer arrays");
    std::vector<std::vector<std::int64_t>> out;
    for (std::size_t s = 0; s < v.size(); ++s) {
      const std::string p = path + "/" + std::to_string(s);
      if (!v[s].is_array()) throw SchemaError(p, "expected an array of integers");
      std::vector<std::int64_t> row;
      for (std::size_t i = 0; i < v[s].size(); ++i) row.push_back(as_integer(v[s][i], p + "/" + std::to_string(i)));
      out.push_back(std::move(row));
    }
    return out;
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

int narrow(std::int64_t v, const std::string& path, std::int64_t lo, std::int64_t hi) {
  if (v < lo || v > hi)
    throw SchemaError(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

LocalDatum local_from(Fields& f) {
  const auto p = f.integer("p");
  const int e = narrow(f.integer("e"), f.at("e"), 1, 64);
  const int fd = narrow(f.integer("f"), f.at("f"), 1, 64);
  if (!is_prime(p)) throw SchemaError(f.at("p"), "must be a prime");
  return LocalDatum(p, e, fd);
}

struct Result {
  int exit_code = kOk;
  json body;
};

// ---------------------------------------------------------------------------

Result replay(const json& params, const JobOptions& opt, bool symplectic) {
  Fields f(params, "/params");
  const int n = narrow(f.integer("n"), f.at("n"), 1, 16);
  const int rank = symplectic ? n : 2 * n;
  const int runs = narrow(f.integer("runs", 1), f.at("runs"), 1, 100000);
  ReplayOptions ro;
  ro.radius = f.integer("radius", kDefaultConeRadius);
  if (ro.radius < 0) throw SchemaError(f.at("radius"), "must be nonnegative");
  ro.skip_step1 = f.boolean("skip_step1", false);
  ro.convention = opt.paper_sign ? ExponentConvention::PaperSign : ExponentConvention::Invariant;

  struct PlaceSpec {
    LocalDatum local;
    std::optional<std::vector<Rat>> slopes;
  };
  std::vector<PlaceSpec> specs;
  const json& places = f.array("places");
  if (places.empty()) throw SchemaError(f.at("places"), "at least one place is required");
  for (std::size_t v = 0; v < places.size(); ++v) {
    Fields pf(places[v], f.at("places") + "/" + std::to_string(v));
    PlaceSpec spec{local_from(pf), std::nullopt};
    if (pf.has("slopes")) {
      spec.slopes = pf.rats("slopes");
      if (static_cast<int>(spec.slopes->size()) != rank)
        throw SchemaError(pf.at("slopes"), "expected " + std::to_string(rank) + " slopes");
    }
    pf.close();
    specs.push_back(std::move(spec));
  }
  f.close();

  std::mt19937_64 gen(opt.seed);
  std::uniform_int_distribution<long> num(-8, 8), den(1, 4);
  json certs = json::array();
  Result res;
  for (int k = 0; k < runs; ++k) {
    std::vector<PlaceInput> inputs;
    for (const auto& s : specs) {
      std::vector<Rat> slopes;
      if (s.slopes) slopes = *s.slopes;
      else
        for (int i = 0; i < rank; ++i) {
          const long a = num(gen);
          slopes.emplace_back(a, den(gen));
        }
      inputs.push_back({s.local, RefinedSlopes(std::move(slopes))});
    }
    try {
      const Certificate c = symplectic ? replay_symplectic(n, inputs, ro) : replay_orthogonal(n, inputs, ro);
      certs.push_back(to_json(c));
    } catch (const VerdictFailed& e) {
      certs.push_back(to_json(e.certificate));
      res.exit_code = kVerdictFailure;
    } catch (const StepFailed& e) {
      json slopes = json::array();
      for (const auto& in : inputs) slopes.push_back(to_json(in.seed));
      certs.push_back(json{{"failure", {{"step", e.step}, {"place", e.place}, {"message", e.what()}}}, {"seeds", slopes}});
      res.exit_code = kVerdictFailure;
    }
  }
  res.body = json{{"certificates", certs}};
  return res;
}

Result keylemma(const json& params, const JobOptions& opt) {
  Fields f(params, "/params");
  ScanConfig cfg;
  cfg.min_rank = narrow(f.integer("min_rank", cfg.min_rank), f.at("min_rank"), 1, 20);
  cfg.max_rank = narrow(f.integer("max_rank", cfg.max_rank), f.at("max_rank"), 0, 20);
  cfg.weight_min = f.integer("weight_min", cfg.weight_min);
  cfg.weight_max = f.integer("weight_max", cfg.weight_max);
  if (cfg.weight_min < -1000000 || cfg.weight_max > 1000000)
    throw SchemaError(f.at("weight_min"), "weights must lie in [-1000000, 1000000]");
  if (f.has("shapes")) {
    cfg.shapes.clear();
    const json& shapes = f.array("shapes");
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const std::string p = f.at("shapes") + "/" + std::to_string(i);
      if (!shapes[i].is_array() || shapes[i].size() != 2) throw SchemaError(p, "expected [e, f]");
      cfg.shapes.emplace_back(narrow(Fields::as_integer(shapes[i][0], p + "/0"), p + "/0", 1, 8),
                              narrow(Fields::as_integer(shapes[i][1], p + "/1"), p + "/1", 1, 8));
    }
  }
  if (f.has("band_factor")) {
    cfg.band_factor = f.rat("band_factor");
    if (cfg.band_factor.sign() <= 0) throw SchemaError(f.at("band_factor"), "must be positive");
  }
  cfg.reduce = f.boolean("reduce", cfg.reduce);
  const auto cap = f.integer("cap", static_cast<std::int64_t>(cfg.cap));
  if (cap < 0) throw SchemaError(f.at("cap"), "must be nonnegative");
  cfg.cap = static_cast<std::uint64_t>(cap);
  cfg.max_pinned = static_cast<std::size_t>(narrow(f.integer("max_pinned", 5), f.at("max_pinned"), 0, 1000));
  cfg.stop_when_pinned = f.boolean("stop_when_pinned", false);
  const std::string expect = f.string("expect", "certified");
  if (expect != "certified" && expect != "counterexample")
    throw SchemaError(f.at("expect"), "expected \"certified\" or \"counterexample\"");
  cfg.workers = opt.workers;
  f.close();

  const ScanSummary s = keylemma_scan(cfg);
  const bool found = s.totals.counterexamples > 0;
  return {(expect == "certified") == found ? kVerdictFailure : kOk, to_json(s)};
}

json alignment_json(int tau, const AlignmentResult& r) {
  json j{{"tau", tau},
         {"kind", to_string(r.kind)},
         {"bound", to_json(r.bound)},
         {"max_deviation", to_json(r.max_deviation)},
         {"margin", to_json(r.margin)}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

Result admissible(const json& params) {
  Fields f(params, "/params");
  const int e = narrow(f.integer("e"), f.at("e"), 1, 20);
  const int fd = narrow(f.integer("f"), f.at("f"), 1, 20);
  auto slopes = f.rats("slopes");
  auto weights = f.matrix("weights");
  const Rat band = f.has("band_factor") ? f.rat("band_factor") : Rat(1);
  if (band.sign() <= 0) throw SchemaError(f.at("band_factor"), "must be positive");
  f.close();
  const PhiModuleDatum datum = [&] {
    try {
      return PhiModuleDatum(e, fd, std::move(slopes), std::move(weights));
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(f.at("weights"), ex.what());
    }
  }();
  json cands = json::array();
  for (const auto& c : admissible_candidates(datum)) cands.push_back(to_json(c));
  json align = json::array();
  Result res;
  for (int tau = 1; tau <= datum.embeddings(); ++tau) {
    const AlignmentResult r = alignment_check(datum, tau, band);
    if (r.kind == AlignmentKind::CounterExample) res.exit_code = kVerdictFailure;
    align.push_back(alignment_json(tau, r));
  }
  res.body = json{{"newton_above_hodge", newton_above_hodge(datum)}, {"candidates", cands}, {"alignment", align}};
  return res;
}

Result classicality(const json& params) {
  Fields f(params, "/params");
  const json& places = f.array("places");
  std::vector<ClassicalityPlace> data;
  for (std::size_t v = 0; v < places.size(); ++v) {
    const std::string path = f.at("places") + "/" + std::to_string(v);
    Fields pf(places[v], path);
    const LocalDatum local = local_from(pf);
    auto rows = pf.matrix("weights");
    auto mu = pf.rats("mu");
    pf.close();
    const int n = static_cast<int>(mu.size());
    if (static_cast<int>(rows.size()) != local.embeddings())
      throw SchemaError(pf.at("weights"), "expected " + std::to_string(local.embeddings()) + " rows");
    try {
      data.push_back({local, WeightTable(n, std::move(rows)), std::move(mu)});
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(pf.at("weights"), ex.what());
    }
  }
  f.close();
  return {kOk, json{{"classical", classicality_sp(data)}}};
}

Result ps_irreducible(const json& params) {
  Fields f(params, "/params");
  const std::string group = f.string("group");
  if (group != "C" && group != "D") throw SchemaError(f.at("group"), "expected \"C\" or \"D\"");
  const auto q = f.integer("q");
  if (q < 2) throw SchemaError(f.at("q"), "must be at least 2");
  const auto values = f.rats("values");
  if (values.empty() || values.size() > 8) throw SchemaError(f.at("values"), "expected 1 to 8 values");
  std::vector<UnramChar> chars;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_zero()) throw SchemaError(f.at("values") + "/" + std::to_string(i), "must be nonzero");
    chars.emplace_back(values[i], q);
  }
  f.close();
  const WeylType type = group == "C" ? WeylType::C : WeylType::D;
  const bool irreducible = type == WeylType::C ? sp_irreducible(chars) : so_irreducible_sufficient(chars);
  return {kOk, json{{"irreducible", irreducible},
                    {"sufficient_only", type == WeylType::D},
                    {"completely_refinable", completely_refinable(chars, type)},
                    {"orbit_size", refinement_orbit(chars, type).size()}}};
}

std::vector<std::int64_t> prime_divisors(const mpz_class& x) {
  std::vector<std::int64_t> out;
  mpz_class m = abs(x);
  if (m > mpz_class("1000000000000")) throw std::invalid_argument("argument too large to factor by trial division");
  for (std::int64_t d = 2; mpz_class(d) * d <= m; ++d) {
    if (m % d == 0) {
      out.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) out.push_back(m.get_si());
  return out;
}

Result hilbert_cmd(const json& params) {
  Fields f(params, "/params");
  const Rat a = f.rat("a"), b = f.rat("b");
  if (a.is_zero()) throw SchemaError(f.at("a"), "must be nonzero");
  if (b.is_zero()) throw SchemaError(f.at("b"), "must be nonzero");
  std::vector<Place> places;
  const bool all = !f.has("places");
  if (all) {
    std::set<std::int64_t> primes{2};
    for (const mpz_class& z : {a.num(), a.den(), b.num(), b.den()})
      for (auto p : prime_divisors(z)) primes.insert(p);
    places.push_back(Place::infinity());
    for (auto p : primes) places.push_back(Place::finite(p));
  } else {
    const json& pl = f.array("places");
    for (std::size_t i = 0; i < pl.size(); ++i) {
      const std::string path = f.at("places") + "/" + std::to_string(i);
      if (pl[i].is_string() && pl[i] == "inf") places.push_back(Place::infinity());
      else if (pl[i].is_number_integer() && is_prime(pl[i].get<std::int64_t>()))
        places.push_back(Place::finite(pl[i].get<std::int64_t>()));
      else throw SchemaError(path, "expected \"inf\" or a prime");
    }
  }
  f.close();
  json symbols = json::array();
  int product = 1;
  for (const auto& v : places) {
    const int s = hilbert(a, b, v);
    product *= s;
    symbols.push_back(json{{"place", v.str()}, {"value", s}});
  }
  json body{{"symbols", symbols}};
  Result res;
  if (all) {
    body["product"] = product;
    if (product != 1) res.exit_code = kVerdictFailure;
  }
  res.body = body;
  return res;
}

json quad_json(const QuadExtElem& x) { return json{{"d", x.d()}, {"a", to_json(x.a())}, {"b", to_json(x.b())}}; }

Result wald_sign(const json& params) {
  Fields f(params, "/params");
  WaldInstance inst;
  inst.p = f.integer("p");
  inst.m = narrow(f.integer("m"), f.at("m"), 1, 32);
  inst.split = f.rats("split");
  const json& fields = f.array("fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string path = f.at("fields") + "/" + std::to_string(i);
    Fields ff(fields[i], path);
    const auto d = ff.integer("d");
    const Rat a = ff.rat("a"), b = ff.rat("b");
    ff.close();
    try {
      inst.fields.emplace_back(d, a, b);
    } catch (const std::invalid_argument& ex) {
      throw SchemaError(ff.at("d"), ex.what());
    }
  }
  f.close();
  const WaldResult r = waldspurger_sign_product(inst);
  json factors = json::array();
  bool decomposed = true;
  for (const auto& x : r.factors) {
    decomposed = decomposed && x.decomposition_holds;
    factors.push_back(json{{"d", x.d},
                           {"c", quad_json(x.c)},
                           {"c0", quad_json(x.c0)},
                           {"ratio", to_json(x.ratio)},
                           {"beta", quad_json(x.beta)},
                           {"decomposition_holds", x.decomposition_holds},
                           {"norm_sign", x.norm_sign},
                           {"sign", x.sign}});
  }
  return {r.sign == 1 && decomposed ? kOk : kVerdictFailure, json{{"sign", r.sign}, {"factors", factors}}};
}

Result verify(const json& params) {
  Fields f(params, "/params");
  const Certificate c = certificate_from_json(f.req("certificate"), f.at("certificate"));
  f.close();
  const VerificationReport rep = verify_certificate(c);
  return {rep.accepted() ? kOk : kVerdictFailure, json{{"consistent", rep.consistent},
                                                       {"problems", rep.problems},
                                                       {"verdict", to_string(rep.verdict)},
                                                       {"accepted", rep.accepted()}}};
}

json error_body(const std::string& path, const std::string& message) {
  return json{{"error", {{"path", path}, {"message", message}}}};
}

}  // namespace

JobOutcome run_job(const json& job, const JobOptions& options) {
  std::string command;
  json report{{"command", nullptr}};
  auto finish = [&](int code, json body) {
    for (auto& [k, v] : body.items()) report[k] = v;
    report["exit_code"] = code;
    return JobOutcome{code, report};
  };
  try {
    Fields top(job, "");
    command = top.string("command");
    report["command"] = command;
    const json params = top.has("params") ? top.req("params") : json::object();
    if (top.has("out") && !top.req("out").is_string()) throw SchemaError("/out", "expected a string");
    top.close();
    static const std::map<std::string, std::function<Result(const json&, const JobOptions&)>> handlers{
        {"replay-sp", [](const json& p, const JobOptions& o) { return replay(p, o, true); }},
        {"replay-so", [](const json& p, const JobOptions& o) { return replay(p, o, false); }},
        {"keylemma-scan", keylemma},
        {"admissible", [](const json& p, const JobOptions&) { return admissible(p); }},
        {"classicality", [](const json& p, const JobOptions&) { return classicality(p); }},
        {"ps-irreducible", [](const json& p, const JobOptions&) { return ps_irreducible(p); }},
        {"hilbert", [](const json& p, const JobOptions&) { return hilbert_cmd(p); }},
        {"wald-sign", [](const json& p, const JobOptions&) { return wald_sign(p); }},
        {"verify-cert", [](const json& p, const JobOptions&) { return verify(p); }},
    };
    const auto it = handlers.find(command);
    if (it == handlers.end()) throw SchemaError("/command", "unknown command \"" + command + "\"");
    Result r = it->second(params, options);
    return finish(r.exit_code, json{{"result", r.body}});
  } catch (const SchemaError& e) {
    return finish(kInputError, error_body(e.path, e.what()));
  } catch (const StepFailed& e) {
    return finish(kVerdictFailure, error_body("/params", e.what()));
  } catch (const Inconsistent& e) {
    return finish(kVerdictFailure, error_body("/params", e.what()));
  } catch (const std::exception& e) {
    return finish(kInputError, error_body("/params", e.what()));
  }
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move report into place at " + path + ": " + ec.message());
  }
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact certification jobs for refinement and admissibility combinatorics"};
  std::string job_path, out_path;
  JobOptions opt;
  app.add_option("--job", job_path, "Job description (JSON)")->required();
  app.add_option("--out", out_path, "Report destination; overrides the job's \"out\" field");
  app.add_option("--workers", opt.workers, "Worker threads for scans")->check(CLI::Range(1, 1024));
  app.add_option("--seed", opt.seed, "Seed for randomized inputs");
  app.add_flag("--paper-sign", opt.paper_sign, "Use the sign-flipped refinement exponent convention");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kInputError;
  }

  json job;
  {
    std::ifstream in(job_path);
    if (!in) {
      err << "cannot read job file " << job_path << "\n";
      return kInputError;
    }
    try {
      job = json::parse(in);
    } catch (const json::parse_error& e) {
      err << job_path << ": invalid JSON: " << e.what() << "\n";
      return kInputError;
    }
  }
  const JobOutcome outcome = run_job(job, opt);
  if (out_path.empty() && job.is_object() && job.contains("out") && job["out"].is_string())
    out_path = job["out"].get<std::string>();
  const std::string text = canonical_dump(outcome.report);
  if (outcome.exit_code == kInputError && outcome.report.contains("error"))
    err << "input error at " << outcome.report["error"]["path"].get<std::string>() << ": "
        << outcome.report["error"]["message"].get<std::string>() << "\n";
  try {
    if (out_path.empty()) out << text;
    else write_atomically(out_path, text);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kInputError;
  }
  return outcome.exit_code;
}

}  // namespace phicert::cli
