// Command-line front end: classify / validate / diag subcommands over JSON
// problem files, with JSON or text reports on stdout. Exit codes: 0 for any
// completed verdict (bounded or not), 2 for invalid input, 3 for an internal
// cross-check failure.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fockop/errors.hpp"
#include "fockop/report.hpp"
#include "fockop/version.hpp"

namespace {

using fockop::Complex;
using fockop::report::CliOptions;
using fockop::report::DiagSpec;
using fockop::report::RunResult;

Complex parse_complex_token(const std::string& tok) {
  const auto fail = [&tok]() -> Complex {
    throw fockop::InputError("cannot parse complex entry \"" + tok +
                             "\" (use re or re:im)");
  };
  try {
    const size_t colon = tok.find(':');
    size_t pos = 0;
    if (colon == std::string::npos) {
      const double re = std::stod(tok, &pos);
      if (pos != tok.size()) return fail();
      return Complex(re, 0.0);
    }
    const std::string re_part = tok.substr(0, colon);
    const std::string im_part = tok.substr(colon + 1);
    const double re = std::stod(re_part, &pos);
    if (pos != re_part.size()) return fail();
    const double im = std::stod(im_part, &pos);
    if (pos != im_part.size()) return fail();
    return Complex(re, im);
  } catch (const fockop::InputError&) {
    throw;
  } catch (const std::exception&) {
    return fail();
  }
}

std::vector<Complex> parse_complex_list(const std::vector<std::string>& tokens) {
  std::vector<Complex> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) out.push_back(parse_complex_token(tok));
  return out;
}

void add_tolerance_flags(CLI::App* sub, CliOptions& opt) {
  sub->add_option("--tol-rank", opt.rank_tol,
                  "rank cutoff for pseudoinverse and kernel detection");
  sub->add_option("--tol-psd", opt.psd_tol,
                  "relative eigenvalue floor for PSD verdicts");
  sub->add_option("--tol-boundary", opt.boundary_tol,
                  "band around norm 1 treated as exactly 1");
}

void add_output_flags(CLI::App* sub, CliOptions& opt, std::string& output) {
  sub->add_option("--seed", opt.seed, "seed for sample plans (echoed in the report)");
  sub->add_option("--output", output, "report format")
      ->check(CLI::IsMember({"json", "text"}));
}

int emit(const RunResult& rr, const std::string& output) {
  if (output == "text")
    std::cout << fockop::report::to_text(rr.report);
  else
    std::cout << fockop::report::to_json_string(rr.report);
  return rr.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(fockop::kToolName) +
               " - composition-operator analysis on the Gaussian "
               "reproducing-kernel space"};
  app.set_version_flag("--version", std::string(fockop::kToolVersion));
  app.require_subcommand(1);

  CliOptions classify_opt, validate_opt, diag_opt;
  std::string classify_output = "json", validate_output = "json",
              diag_output = "json";
  std::string classify_path, validate_path;

  CLI::App* classify = app.add_subcommand(
      "classify", "boundedness, norm, and structure of an affine symbol");
  classify->add_option("problem", classify_path, "problem file (JSON)")
      ->required();
  add_tolerance_flags(classify, classify_opt);
  add_output_flags(classify, classify_opt, classify_output);

  CLI::App* validate = app.add_subcommand(
      "validate", "classify plus truncation and PSD-sampling oracles");
  validate->add_option("problem", validate_path, "problem file (JSON)")
      ->required();
  add_tolerance_flags(validate, validate_opt);
  add_output_flags(validate, validate_opt, validate_output);
  validate->add_option("--degree", validate_opt.degree,
                       "truncation degree (default: by dimension)")
      ->check(CLI::Range(1, 64));
  validate->add_option("--samples", validate_opt.samples,
                       "random plan points beyond the structured ones")
      ->check(CLI::Range(0, 30));
  validate->add_option("--radius", validate_opt.radius, "sample radius")
      ->check(CLI::PositiveNumber);
  validate->add_flag("--force", validate_opt.force,
                     "run the truncation oracle even when the symbol is unbounded");

  DiagSpec diag_spec;
  std::vector<std::string> alpha_tokens, b_tokens;
  std::string a_token = "0.5";
  CLI::App* diag = app.add_subcommand(
      "diag", "series criterion and norm for diagonal symbols");
  diag->add_option("preset", diag_spec.preset,
                   "model preset: paper-counterexample | constant | geometric");
  diag->add_option("--a", a_token, "constant preset parameter (re or re:im)");
  diag->add_option("--r", diag_spec.r, "geometric preset ratio");
  diag->add_option("--alpha-list", alpha_tokens,
                   "inline alpha entries, comma separated (re or re:im)")
      ->delimiter(',');
  diag->add_option("--b-list", b_tokens,
                   "inline b entries, comma separated (default 1/m)")
      ->delimiter(',');
  diag->add_option("--horizon", diag_spec.horizon, "evaluation horizon")
      ->check(CLI::Range(1, 10000000));
  add_output_flags(diag, diag_opt, diag_output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (classify->parsed())
      return emit(fockop::report::run_classify(classify_path, classify_opt),
                  classify_output);
    if (validate->parsed())
      return emit(fockop::report::run_validate(validate_path, validate_opt),
                  validate_output);
    diag_spec.a = parse_complex_token(a_token);
    diag_spec.alpha_list = parse_complex_list(alpha_tokens);
    diag_spec.b_list = parse_complex_list(b_tokens);
    return emit(fockop::report::run_diag(diag_spec, diag_opt), diag_output);
  } catch (const fockop::CrossCheckError& e) {
    std::cerr << "cross-check failure: " << e.what() << "\n";
    return 3;
  } catch (const fockop::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (...) {
    std::cerr << "internal error\n";
    return 3;
  }
}
