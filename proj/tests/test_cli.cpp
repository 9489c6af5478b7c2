// End-to-end tests of the installed binary: spawn it with real files and
// arguments, check exit codes and stdout bytes. FOCKOP_BIN is injected by the
// build so the tests always exercise the freshly built executable.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "support/oracles.hpp"

namespace ts = testsupport;

namespace {

struct CliResult {
  bool exited = false;
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + FOCKOP_BIN + "\" " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  CliResult res;
  if (pipe == nullptr) return res;
  std::array<char, 4096> chunk{};
  size_t got = 0;
  while ((got = std::fread(chunk.data(), 1, chunk.size(), pipe)) > 0)
    res.out.append(chunk.data(), got);
  const int status = ::pclose(pipe);
  res.exited = WIFEXITED(status);
  if (res.exited) res.code = WEXITSTATUS(status);
  return res;
}

std::string quoted(const std::string& path) { return "\"" + path + "\""; }

const char* kIdentity2 = R"({
  "dim": 2,
  "A": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
  "b": [[0.0, 0.0], [0.0, 0.0]]
})";

const char* kHalfScalar = R"({
  "dim": 1,
  "A": [[[0.5, 0.0]]],
  "b": [[0.5, 0.0]]
})";

const char* kUnboundedBoundary = R"({
  "dim": 2,
  "A": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
  "b": [[1.0, 0.0], [0.0, 0.0]]
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify: exit codes and JSON output") {
  const std::string ok = ts::write_temp("cli_id.json", kIdentity2);
  const CliResult r = run_cli("classify " + quoted(ok));
  REQUIRE(r.exited);
  CHECK(r.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["classification"]["bounded"] == true);
  CHECK(doc["classification"]["unitary"] == true);
  CHECK(doc["command"] == "classify");

  const std::string bad = ts::write_temp("cli_bad.json", "{nope");
  const CliResult rb = run_cli("classify " + quoted(bad));
  REQUIRE(rb.exited);
  CHECK(rb.code == 2);
  CHECK(rb.out.empty());

  const CliResult rn = run_cli("classify /nonexistent/missing.json");
  REQUIRE(rn.exited);
  CHECK(rn.code == 2);
}

TEST_CASE("classify: unbounded verdicts are completed runs, not errors") {
  const std::string ub = ts::write_temp("cli_ub.json", kUnboundedBoundary);
  const CliResult r = run_cli("classify " + quoted(ub));
  REQUIRE(r.exited);
  CHECK(r.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(r.out);
  CHECK(doc["classification"]["bounded"] == false);
}

TEST_CASE("validate: force gate on unbounded symbols") {
  const std::string ub = ts::write_temp("cli_vub.json", kUnboundedBoundary);
  const CliResult refused = run_cli("validate " + quoted(ub));
  REQUIRE(refused.exited);
  CHECK(refused.code == 2);

  const CliResult forced =
      run_cli("validate " + quoted(ub) + " --force --degree 5");
  REQUIRE(forced.exited);
  CHECK(forced.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(forced.out);
  CHECK(doc["oracle"]["degree"] == 5);
  CHECK_FALSE(doc["oracle"].contains("psd_bisection"));

  const std::string ok = ts::write_temp("cli_vok.json", kHalfScalar);
  const CliResult pass = run_cli("validate " + quoted(ok) + " --degree 8");
  REQUIRE(pass.exited);
  CHECK(pass.code == 0);
  const nlohmann::json vdoc = nlohmann::json::parse(pass.out);
  CHECK(vdoc["oracle"]["pass"] == true);
}

TEST_CASE("diag: presets and inline models") {
  const CliResult ce = run_cli("diag paper-counterexample --horizon 50");
  REQUIRE(ce.exited);
  CHECK(ce.code == 0);
  const nlohmann::json doc = nlohmann::json::parse(ce.out);
  CHECK(doc["series"]["verdict"] == "diverging");
  CHECK(doc["norm_verdict"] == "unbounded");

  const CliResult cc = run_cli("diag constant --a 0.5 --horizon 100");
  REQUIRE(cc.exited);
  CHECK(cc.code == 0);
  CHECK(nlohmann::json::parse(cc.out)["norm_verdict"] == "bounded");

  const CliResult cx = run_cli("diag constant --a 0.3:0.4 --horizon 50");
  REQUIRE(cx.exited);
  CHECK(cx.code == 0);

  const CliResult ci =
      run_cli("diag --alpha-list 0.5,0.25,0.125 --horizon 3");
  REQUIRE(ci.exited);
  CHECK(ci.code == 0);
  CHECK(nlohmann::json::parse(ci.out)["model"]["preset"] == "inline");

  const CliResult cb = run_cli(
      "diag --alpha-list 0.5,0.5 --b-list 0.1,0.2 --horizon 2");
  REQUIRE(cb.exited);
  CHECK(cb.code == 0);
}

TEST_CASE("argument errors exit with code 2") {
  for (const char* args : {
           "",                                         // missing subcommand
           "frobnicate",                               // unknown subcommand
           "classify",                                 // missing problem file
           "classify a.json --bogus",                  // unknown flag
           "classify a.json --output yaml",            // bad enum
           "validate a.json --degree 0",               // below range
           "validate a.json --degree 100",             // above range
           "validate a.json --samples 31",             // beyond the plan cap
           "validate a.json --radius -1",              // not positive
           "diag mystery-preset",                      // unknown preset
           "diag constant --a banana",                 // bad complex token
           "diag constant --horizon 0",                // horizon below range
           "diag --alpha-list 0.5,banana --horizon 2", // bad list entry
           "diag --b-list 0.1 --horizon 1",            // b without alpha
       }) {
    const CliResult r = run_cli(args);
    REQUIRE(r.exited);
    CHECK_MESSAGE(r.code == 2, "args: " << args);
  }
}

TEST_CASE("help and version are success paths") {
  for (const char* args : {"--help", "classify --help", "validate --help",
                           "diag --help", "--version"}) {
    const CliResult r = run_cli(args);
    REQUIRE(r.exited);
    CHECK_MESSAGE(r.code == 0, "args: " << args);
    CHECK_FALSE(r.out.empty());
  }
  CHECK(run_cli("--version").out.find("0.1.0") != std::string::npos);
}

TEST_CASE("determinism: identical invocations produce identical bytes") {
  const std::string ok = ts::write_temp("cli_det.json", kHalfScalar);
  const std::string c1 = run_cli("classify " + quoted(ok)).out;
  const std::string c2 = run_cli("classify " + quoted(ok)).out;
  CHECK(c1 == c2);
  CHECK_FALSE(c1.empty());

  const std::string v1 = run_cli("validate " + quoted(ok) + " --degree 8").out;
  const std::string v2 = run_cli("validate " + quoted(ok) + " --degree 8").out;
  CHECK(v1 == v2);

  const std::string d1 = run_cli("diag paper-counterexample --horizon 40").out;
  const std::string d2 = run_cli("diag paper-counterexample --horizon 40").out;
  CHECK(d1 == d2);

  // A different seed changes the sampled plan, and only the sampled parts.
  const std::string v3 =
      run_cli("validate " + quoted(ok) + " --degree 8 --seed 777").out;
  CHECK(v3 != v1);
  CHECK(nlohmann::json::parse(v3)["oracle"]["pass"] == true);
}

TEST_CASE("text output mirrors the JSON values") {
  const std::string ok = ts::write_temp("cli_txt.json", kIdentity2);
  const CliResult r = run_cli("classify " + quoted(ok) + " --output text");
  REQUIRE(r.exited);
  CHECK(r.code == 0);
  CHECK(r.out.find("classification.bounded = true") != std::string::npos);
  CHECK(r.out.find("norm.value = 1.0") != std::string::npos);
  CHECK(r.out.find('{') == std::string::npos);
}

TEST_CASE("fuzz: malformed problem files never crash the binary") {
  const std::vector<std::string> corpus = {
      "",
      "{",
      "null",
      "[]",
      "42",
      "\"hello\"",
      "{}",
      "{\"dim\": 1e9, \"A\": [], \"b\": []}",
      "{\"dim\": true, \"A\": [], \"b\": []}",
      "{\"dim\": null, \"A\": null, \"b\": null}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]], \"options\": []}",
      "{\"dim\": 1, \"A\": [[[\"x\",0]]], \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": [[[0.5,0,1]]], \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": [[0.5]], \"b\": [[0,0]]}",
      "{\"dim\": 2, \"A\": [[[1,0],[0,0]],[[0,0],[1,0]]], \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": {\"0\": [[1,0]]}, \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": [[[[1],0]]], \"b\": [[0,0]]}",
      "{\"dim\": 2, \"A\": [[[1,0]],[[0,0]]], \"b\": [[0,0],[0,0]]}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": 0.5}",
      "{\"d\\u00eem\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": [[[1e999,0]]], \"b\": [[0,0]]}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]]}extra",
      "\xef\xbb\xbfjunk",
      "\xff\xfe\x00\x01",
      "{\"dim\": 1, \"A\": [[[nan,0]]], \"b\": [[0,0]]}",
      "{\"dim\": -1, \"A\": [], \"b\": []}",
      "{\"dim\": \"2\", \"A\": [], \"b\": []}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]],"
      " \"options\": {\"rank_tol\": \"small\"}}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]],"
      " \"options\": {\"rank_tol\": -1.0}}",
      "{\"dim\": 1, \"A\": [[[0.5,0]]], \"b\": [[0,0]],"
      " \"options\": {\"psd_tol\": 0.0}}",
  };

  int idx = 0;
  for (const std::string& content : corpus) {
    const std::string path =
        ts::write_temp("fuzz_" + std::to_string(idx++) + ".json", content);
    for (const std::string sub : {"classify ", "validate "}) {
      const CliResult r = run_cli(sub + quoted(path));
      REQUIRE_MESSAGE(r.exited, "corpus entry " << idx);
      CHECK_MESSAGE(r.code == 2, "corpus entry " << idx << " via " << sub
                                                 << "-> exit " << r.code);
      CHECK(r.out.empty());  // errors go to stderr, never the report stream
    }
  }

  // Harmless-but-odd inputs that must still succeed.
  const std::string reordered = ts::write_temp("fuzz_ok1.json",
      R"({"options": {"rank_tol": 1e-12}, "b": [[0,0]], "A": [[[0.5,0]]], "dim": 1})");
  CHECK(run_cli("classify " + quoted(reordered)).code == 0);

  const std::string extreme = ts::write_temp("fuzz_ok2.json",
      R"({"dim": 1, "A": [[[1e308, 0]]], "b": [[0,0]]})");
  const CliResult ext = run_cli("classify " + quoted(extreme));
  CHECK(ext.code == 0);
  CHECK(nlohmann::json::parse(ext.out)["classification"]["bounded"] == false);
}

}  // TEST_SUITE
