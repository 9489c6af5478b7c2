#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fockop/affine.hpp"
#include "fockop/diag_model.hpp"
#include "fockop/linalg.hpp"

namespace fockop::report {

using ordered_json = nlohmann::ordered_json;

// Options shared by the subcommands; defaults match the CLI defaults.
struct CliOptions {
  std::optional<double> rank_tol;
  std::optional<double> psd_tol;
  std::optional<double> boundary_tol;
  int degree = 0;  // 0 = choose by dimension
  int samples = 12;
  double radius = 2.0;
  std::uint64_t seed = 12345;
  bool force = false;
};

// Model selection for the diag subcommand.
struct DiagSpec {
  std::string preset;  // "paper-counterexample" | "constant" | "geometric" | "" (inline)
  Complex a{0.5, 0.0};                // constant preset parameter
  double r = 0.5;                     // geometric preset parameter
  std::vector<Complex> alpha_list;    // inline model
  std::vector<Complex> b_list;        // inline model; empty = b_m = 1/m
  int horizon = 1000;
};

struct ParsedProblem {
  AffineMap phi;
  Tolerances tol;
};

// Strict problem-file reader: {"dim": n, "A": [[[re,im],...],...],
// "b": [[re,im],...], "options": {tolerance overrides}}. Unknown keys and
// malformed entries raise InputError with a position diagnostic. CLI
// tolerance flags override file options.
ParsedProblem load_problem(const std::string& path, const CliOptions& cli);

struct RunResult {
  ordered_json report;
  int exit_code = 0;  // 0 ok; 3 when the validate oracle summary fails
};

RunResult run_classify(const std::string& path, const CliOptions& cli);
RunResult run_validate(const std::string& path, const CliOptions& cli);
RunResult run_diag(const DiagSpec& spec, const CliOptions& cli);

// Default validation degree for a given dimension (basis stays dense-SVD
// friendly): n=1 -> 16, n=2 -> 10, n=3 -> 6, n=4 -> 4, else 3.
int default_degree(int n);

DiagonalModel build_model(const DiagSpec& spec);

// Canonical serializations. to_json_string is dump(2) plus trailing newline;
// to_text is a line-oriented mirror of the same tree (identical values,
// rendered through the same number formatter).
std::string to_json_string(const ordered_json& report);
std::string to_text(const ordered_json& report);

}  // namespace fockop::report
