#include "commands.hpp"
#include "hvcg/parser.hpp"
#include "support/corpus.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace hvcg;
using namespace hvcg::cli;

namespace {

RunConfig config(const char* command, std::vector<std::string> names) {
  RunConfig c;
  c.command = command;
  for (const auto& n : names) c.files.push_back(corpus::path(n));
  return c;
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p.string();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("verify the corpus") {
  CommandResult r = run_command(config("verify", {"bouncing_ball.hyb", "tank_dinv.hyb", "thermostat.hyb"}));
  CHECK(r.exit_code == kProved);
  CHECK(r.report["schema"] == kReportSchema);
  CHECK(r.report["command"] == "verify");
  REQUIRE(r.report["files"].size() == 3);
  for (const auto& f : r.report["files"]) {
    CHECK(f["exit"] == 0);
    CHECK(f["summary"]["total"] == f["summary"]["proved"]);
    for (const auto& vc : f["vcs"]) {
      CHECK(vc["status"] == "proved");
      CHECK(vc.contains("origin"));
      CHECK(vc.contains("time_binder"));
      CHECK(vc["counterexample"].is_null());
    }
  }
  CHECK(r.report["files"][2]["summary"]["total"] == 7);
}

TEST_CASE("mutants exit 1 with counterexamples") {
  CommandResult r = run_command(config("verify", {"thermostat_mutant.hyb"}));
  CHECK(r.exit_code == kUnproved);
  bool found = false;
  for (const auto& vc : r.report["files"][0]["vcs"]) {
    if (vc["status"] != "falsified") continue;
    found = true;
    CHECK(vc["counterexample"].contains("vars"));
    CHECK(vc["counterexample"].contains("params"));
  }
  CHECK(found);
  // the worst file decides the exit code
  CHECK(run_command(config("verify", {"bouncing_ball.hyb", "tank_mutant.hyb"})).exit_code == kUnproved);
}

TEST_CASE("reports are deterministic") {
  RunConfig a = config("verify", {"thermostat.hyb", "tank_dinv.hyb", "thermostat_mutant.hyb"});
  RunConfig b = a;
  b.jobs = 4;
  std::string first = run_command(a).report.dump(2);
  CHECK(run_command(a).report.dump(2) == first);
  CHECK(run_command(b).report.dump(2) == first);
}

TEST_CASE("refine and vcs commands") {
  CommandResult r = run_command(config("refine", {"tank_refine.hyb"}));
  CHECK(r.exit_code == kProved);
  const auto& f = r.report["files"][0];
  CHECK(f["replay"] == "reached target");
  CHECK(f["steps"] == 14);
  CHECK(f["final_term"] == print_program(corpus::model("tank_refine.hyb").refine->target));

  RunConfig weak = config("refine", {"thermostat_refine.hyb", "thermostat_weak_midpoint.ref"});
  CHECK(run_command(weak).exit_code == kUnproved);

  CommandResult v = run_command(config("vcs", {"bouncing_ball.hyb"}));
  CHECK(v.exit_code == kProved);
  REQUIRE(v.report["files"][0]["vcs"].size() == 3);
  CHECK(v.report["files"][0]["vcs"][0]["status"] == "pending");
}

TEST_CASE("simulate") {
  RunConfig c = config("simulate", {"tank_dinv.hyb"});
  c.runs = 200;
  CommandResult ok = run_command(c);
  CHECK(ok.exit_code == kProved);
  CHECK(ok.report["files"][0]["simulation"]["violations"] == 0);
  RunConfig m = config("simulate", {"tank_mutant.hyb"});
  m.runs = 200;
  CHECK(run_command(m).exit_code == kUnproved);
}

TEST_CASE("malformed input exits 2") {
  RunConfig bad_param = config("verify", {"thermostat.hyb"});
  bad_param.params["a"] = "-1";
  CHECK(run_command(bad_param).exit_code == kMalformed);
  RunConfig unknown = config("verify", {"thermostat.hyb"});
  unknown.params["nope"] = "1";
  CHECK(run_command(unknown).exit_code == kMalformed);
  RunConfig bounds = config("verify", {"thermostat.hyb"});
  bounds.bounds["T"] = {"3", "1"};
  CHECK(run_command(bounds).exit_code == kMalformed);
  CHECK(run_command(config("verify", {"missing.hyb"})).exit_code == kMalformed);

  RunConfig syntax;
  syntax.command = "verify";
  syntax.files = {temp_file("hvcg_bad.hyb", "var x : real\nhoare { x = 0 } x := { x = 1 }\n")};
  CommandResult s = run_command(syntax);
  CHECK(s.exit_code == kMalformed);
  CHECK(s.report["files"][0].contains("error"));

  RunConfig annot;
  annot.command = "verify";
  annot.files = {temp_file("hvcg_noinv.hyb", "var x : real\nhoare { x = 0 } (x := x + 1)* { x >= 0 }\n")};
  CHECK(run_command(annot).exit_code == kMalformed);
}

TEST_CASE("tolerant post-state check") {
  Scope s{{"x"}, {"h"}};
  Pred p = parse_pred("x <= h & x = 1", s);
  CHECK(holds_with_tolerance(p, {{"x", 1 + 1e-12}}, {{"h", 1}}, 1e-9));
  CHECK_FALSE(holds_with_tolerance(p, {{"x", 1 + 1e-6}}, {{"h", 1}}, 1e-9));
  CHECK(holds_with_tolerance(parse_pred("!(x > h)", s), {{"x", 1 + 1e-12}}, {{"h", 1}}, 1e-9));
  CHECK(holds_with_tolerance(parse_pred("x < h | x > 2", s), {{"x", 1}}, {{"h", 1}}, 1e-9));
}

}
