#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phicert/cli.hpp"
#include "phicert/json_io.hpp"
#include "phicert/replay.hpp"

using namespace phicert;
using phicert::cli::JobOptions;
using phicert::cli::run_job;

namespace {

Certificate worked() {
  const std::vector<PlaceInput> in{{LocalDatum(3, 1, 1), RefinedSlopes({Rat(0), Rat(0)})}};
  return replay_symplectic(2, in);
}

json job(const std::string& command, json params) { return json{{"command", command}, {"params", params}}; }

}  // namespace

TEST_CASE("rationals serialize as strings") {
  CHECK(to_json(Rat(-3, 6)) == json("-1/2"));
  CHECK(rat_from_json(json("4/2"), "/x") == Rat(2));
  CHECK(rat_from_json(json(5), "/x") == Rat(5));
  CHECK_THROWS_AS(rat_from_json(json("1/0"), "/x"), SchemaError);
  CHECK_THROWS_AS(rat_from_json(json(0.5), "/x"), SchemaError);
}

TEST_CASE("certificates round-trip through json") {
  const Certificate c = worked();
  const json j = to_json(c);
  const Certificate back = certificate_from_json(j);
  CHECK(canonical_dump(to_json(back)) == canonical_dump(j));
  CHECK(verify_certificate(back).accepted());
  json broken = j;
  broken["places"][0]["k1"] = "oops";
  CHECK_THROWS_AS(certificate_from_json(broken), SchemaError);
}

TEST_CASE("canonical dumps are sorted and newline terminated") {
  const std::string s = canonical_dump(json{{"b", 1}, {"a", 2}});
  CHECK(s == "{\n  \"a\": 2,\n  \"b\": 1\n}\n");
}

TEST_CASE("replay jobs") {
  const auto out = run_job(job("replay-sp", {{"n", 2}, {"places", {{{"p", 3}, {"e", 1}, {"f", 1}, {"slopes", {"0", "0"}}}}}}), {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["result"]["certificates"][0]["verdict"] == "ArtinPlusIrreducible");

  const auto random = run_job(job("replay-so", {{"n", 2}, {"runs", 5}, {"places", {{{"p", 5}, {"e", 1}, {"f", 2}}}}}),
                              JobOptions{1, 99, false});
  CHECK(random.exit_code == 0);
  CHECK(random.report["result"]["certificates"].size() == 5);
  const auto again = run_job(job("replay-so", {{"n", 2}, {"runs", 5}, {"places", {{{"p", 5}, {"e", 1}, {"f", 2}}}}}),
                             JobOptions{1, 99, false});
  CHECK(canonical_dump(random.report) == canonical_dump(again.report));

  const auto tight = run_job(job("replay-sp", {{"n", 2}, {"radius", 0}, {"places", {{{"p", 3}, {"e", 1}, {"f", 1}, {"slopes", {"2", "-1"}}}}}}), {});
  CHECK(tight.exit_code == 2);

  const auto skipped = run_job(job("replay-so", {{"n", 1}, {"skip_step1", true}, {"places", {{{"p", 3}, {"e", 1}, {"f", 1}, {"slopes", {"-40", "-40"}}}}}}), {});
  CHECK(skipped.exit_code == 2);
  CHECK(skipped.report["result"]["certificates"][0]["verdict"] == "Failed");
}

TEST_CASE("verify-cert accepts genuine certificates and rejects tampered ones") {
  json cert = to_json(worked());
  CHECK(run_job(job("verify-cert", {{"certificate", cert}}), {}).exit_code == 0);
  cert["places"][0]["x2_prime"][0] = "2/1";
  const auto out = run_job(job("verify-cert", {{"certificate", cert}}), {});
  CHECK(out.exit_code == 2);
  CHECK(out.report["result"]["accepted"] == false);
}

TEST_CASE("input errors carry a path and exit code 1") {
  const auto zero = run_job(job("hilbert", {{"a", "0"}, {"b", "3"}}), {});
  CHECK(zero.exit_code == 1);
  CHECK(zero.report["error"]["path"] == "/params/a");

  const auto unknown = run_job(job("hilbert", {{"a", "2"}, {"b", "3"}, {"bogus", 1}}), {});
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.report["error"]["path"] == "/params/bogus");

  const auto cmd = run_job(job("frobnicate", json::object()), {});
  CHECK(cmd.exit_code == 1);
  CHECK(cmd.report["error"]["path"] == "/command");

  const auto nonprime = run_job(job("replay-sp", {{"n", 2}, {"places", {{{"p", 4}, {"e", 1}, {"f", 1}}}}}), {});
  CHECK(nonprime.exit_code == 1);
  CHECK(nonprime.report["error"]["path"] == "/params/places/0/p");

  const auto notobj = run_job(json::array(), {});
  CHECK(notobj.exit_code == 1);
}

TEST_CASE("small commands") {
  const auto h = run_job(job("hilbert", {{"a", "-1"}, {"b", "-1"}}), {});
  CHECK(h.exit_code == 0);
  CHECK(h.report["result"]["product"] == 1);
  const auto hp = run_job(job("hilbert", {{"a", "2"}, {"b", "3"}, {"places", {3, "inf"}}}), {});
  CHECK(hp.report["result"]["symbols"][0]["value"] == -1);

  const auto ps = run_job(job("ps-irreducible", {{"group", "D"}, {"q", 3}, {"values", {"2", "3"}}}), {});
  CHECK(ps.report["result"]["orbit_size"] == 4);
  CHECK(ps.report["result"]["sufficient_only"] == true);

  const auto cl = run_job(job("classicality", {{"places", {{{"p", 3}, {"e", 1}, {"f", 1}, {"weights", {{5}}}, {"mu", {"11"}}}}}}), {});
  CHECK(cl.report["result"]["classical"] == true);

  const auto ad = run_job(job("admissible", {{"e", 1}, {"f", 1}, {"slopes", {"-2", "0", "2"}}, {"weights", {{-2, 0, 2}}}}), {});
  CHECK(ad.exit_code == 0);
  CHECK(ad.report["result"]["alignment"][0]["kind"] == "Certified");

  const auto w = run_job(job("wald-sign", {{"p", 5}, {"m", 2}, {"split", {"2"}}, {"fields", {{{"d", 2}, {"a", "1"}, {"b", "1"}}}}}), {});
  CHECK(w.exit_code == 0);
  CHECK(w.report["result"]["sign"] == 1);
}

TEST_CASE("scan jobs") {
  const json empty{{"min_rank", 3}, {"max_rank", 2}};
  const auto e = run_job(job("keylemma-scan", empty), {});
  CHECK(e.exit_code == 0);
  CHECK(e.report["result"]["totals"]["data"] == 0);

  const json small{{"max_rank", 2}, {"weight_min", -1}, {"weight_max", 1}, {"band_factor", "2"}, {"expect", "counterexample"}};
  const auto one = run_job(job("keylemma-scan", small), JobOptions{1, 0, false});
  const auto three = run_job(job("keylemma-scan", small), JobOptions{3, 0, false});
  CHECK(one.exit_code == 0);
  CHECK(canonical_dump(one.report) == canonical_dump(three.report));

  const auto capped = run_job(job("keylemma-scan", {{"cap", 10}}), {});
  CHECK(capped.exit_code == 1);
}

TEST_CASE("command-line entry point writes reports atomically") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "phicert_cli_test";
  fs::create_directories(dir);
  const fs::path job_file = dir / "job.json", report = dir / "report.json";
  {
    std::ofstream(job_file) << job("hilbert", {{"a", "2"}, {"b", "3"}}).dump();
  }
  const std::string jp = job_file.string(), rp = report.string();
  std::vector<std::string> args{"phicert", "--job", jp, "--out", rp};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  CHECK(cli::main(static_cast<int>(argv.size()), argv.data(), out, err) == 0);
  std::ifstream in(report);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(json::parse(text.str())["result"]["product"] == 1);
  for (const auto& entry : fs::directory_iterator(dir))
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);

  std::vector<std::string> missing{"phicert", "--job", (dir / "absent.json").string()};
  std::vector<char*> argv2;
  for (auto& a : missing) argv2.push_back(a.data());
  CHECK(cli::main(static_cast<int>(argv2.size()), argv2.data(), out, err) == 1);
  fs::remove_all(dir);
}
