#include "fockop/report.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fockop/errors.hpp"
#include "fockop/fock_basis.hpp"
#include "fockop/kernel.hpp"
#include "fockop/version.hpp"

namespace fockop::report {

namespace {

using nlohmann::json;

constexpr double kNormAgreementTol = 1e-8;  // closed form vs quadratic route
constexpr double kBisectTol = 1e-9;
constexpr double kBisectAgreementTol = 1e-6;  // plan bound vs closed form
constexpr double kMonotoneSlack = 1e-12;      // truncation never decreases
constexpr double kDivergenceThreshold = 1e6;

ordered_json complex_pair(const Complex& c) {
  return ordered_json::array({c.real(), c.imag()});
}

ordered_json vector_json(const ComplexVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_pair(v(i)));
  return out;
}

Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError(where + ": expected a [re, im] pair of numbers");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

double parse_tolerance(const json& j, const std::string& where) {
  if (!j.is_number())
    throw InputError(where + ": expected a number");
  return j.get<double>();
}

ordered_json tool_section() {
  return ordered_json{{"name", kToolName}, {"version", kToolVersion}};
}

ordered_json tolerances_json(const Tolerances& t) {
  return ordered_json{{"rank_tol", t.rank_tol},
                      {"psd_tol", t.psd_tol},
                      {"boundary_tol", t.boundary_tol}};
}

ordered_json base_report(const std::string& command, const CliOptions& cli) {
  ordered_json rep;
  rep["tool"] = tool_section();
  rep["command"] = command;
  rep["seed"] = cli.seed;
  return rep;
}

// Classification flags plus the norm/membership evidence, shared by the
// classify and validate reports.
void append_certificate(ordered_json& rep, const AffineMap& phi,
                        const Tolerances& tol) {
  const NormCertificate cert = composition_norm(phi, tol);
  const StructureReport st = classify_structure(phi, tol);

  rep["classification"] = ordered_json{
      {"bounded", cert.bounded},       {"boundary", cert.boundary},
      {"linear_norm", cert.a_norm},    {"compact", st.compact},
      {"normal", st.normal},           {"isometric", st.isometric},
      {"coisometric", st.coisometric}, {"unitary", st.unitary}};

  if (cert.norm) {
    rep["norm"] = ordered_json{{"value", *cert.norm},
                               {"cms_value", *cert.cms_norm},
                               {"agreement_tol", kNormAgreementTol}};
  }
  if (cert.v) rep["v"] = vector_json(*cert.v);
  if (cert.w0) rep["w0"] = vector_json(*cert.w0);
  if (cert.membership_residual) {
    rep["membership"] = ordered_json{{"member", cert.bounded},
                                     {"residual", *cert.membership_residual},
                                     {"kernel_projection", *cert.kernel_projection},
                                     {"tol", cert.membership_tol}};
  }
}

ordered_json model_section(const DiagSpec& spec) {
  ordered_json m;
  m["preset"] = spec.preset.empty() ? "inline" : spec.preset;
  if (spec.preset == "constant") m["a"] = complex_pair(spec.a);
  if (spec.preset == "geometric") m["r"] = spec.r;
  if (spec.preset.empty()) {
    ordered_json alphas = ordered_json::array();
    for (const Complex& a : spec.alpha_list) alphas.push_back(complex_pair(a));
    m["alpha"] = std::move(alphas);
    if (spec.b_list.empty()) {
      m["b"] = "1/m";
    } else {
      ordered_json bs = ordered_json::array();
      for (const Complex& b : spec.b_list) bs.push_back(complex_pair(b));
      m["b"] = std::move(bs);
    }
  }
  m["horizon"] = spec.horizon;
  return m;
}

std::vector<int> checkpoint_indices(int N) {
  std::vector<int> out;
  for (int m = 1; m <= 10 && m <= N; ++m) out.push_back(m);
  for (int m : {20, 50, 100, 200, 500, 1000})
    if (m <= N) out.push_back(m);
  if (out.empty() || out.back() != N) out.push_back(N);
  return out;
}

void walk_text(const ordered_json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (const auto& item : j.items())
      walk_text(item.value(), path.empty() ? item.key() : path + "." + item.key(),
                out);
    return;
  }
  out += path;
  out += " = ";
  out += j.dump();
  out += "\n";
}

}  // namespace

int default_degree(int n) {
  switch (n) {
    case 1: return 16;
    case 2: return 10;
    case 3: return 6;
    case 4: return 4;
    default: return 3;
  }
}

ParsedProblem load_problem(const std::string& path, const CliOptions& cli) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof())
    throw InputError("cannot read problem file: " + path);

  json doc;
  try {
    // Whole-buffer parse: trailing bytes after the document are an error.
    doc = json::parse(buf.str());
  } catch (const json::exception& e) {
    // parse_error for malformed text, out_of_range for number overflow.
    throw InputError("problem file " + path + ": " + e.what());
  }

  if (!doc.is_object())
    throw InputError("problem file: top level must be an object");
  for (const auto& item : doc.items()) {
    const std::string& k = item.key();
    if (k != "dim" && k != "A" && k != "b" && k != "options")
      throw InputError("problem file: unknown key \"" + k + "\"");
  }
  for (const char* k : {"dim", "A", "b"})
    if (!doc.contains(k))
      throw InputError(std::string("problem file: missing key \"") + k + "\"");

  const json& jdim = doc["dim"];
  if (!jdim.is_number_integer() || jdim.get<std::int64_t>() < 1)
    throw InputError("dim: expected a positive integer");
  const std::int64_t n64 = jdim.get<std::int64_t>();

  const json& ja = doc["A"];
  if (!ja.is_array() || static_cast<std::int64_t>(ja.size()) != n64)
    throw InputError("A: expected " + std::to_string(n64) + " rows");
  const json& jb = doc["b"];
  if (!jb.is_array() || static_cast<std::int64_t>(jb.size()) != n64)
    throw InputError("b: expected " + std::to_string(n64) + " entries");
  const int n = static_cast<int>(n64);

  ComplexMatrix A(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = ja[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw InputError("A[" + std::to_string(i) + "]: expected " +
                       std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j)
      A(i, j) = parse_complex(row[static_cast<size_t>(j)],
                              "A[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  ComplexVector b(n);
  for (int i = 0; i < n; ++i)
    b(i) = parse_complex(jb[static_cast<size_t>(i)], "b[" + std::to_string(i) + "]");

  Tolerances t = Tolerances::for_dim(n);
  if (doc.contains("options")) {
    const json& opt = doc["options"];
    if (!opt.is_object()) throw InputError("options: expected an object");
    for (const auto& item : opt.items()) {
      const std::string& k = item.key();
      if (k == "rank_tol")
        t.rank_tol = parse_tolerance(item.value(), "options.rank_tol");
      else if (k == "psd_tol")
        t.psd_tol = parse_tolerance(item.value(), "options.psd_tol");
      else if (k == "boundary_tol")
        t.boundary_tol = parse_tolerance(item.value(), "options.boundary_tol");
      else
        throw InputError("options: unknown key \"" + k + "\"");
    }
  }
  if (cli.rank_tol) t.rank_tol = *cli.rank_tol;
  if (cli.psd_tol) t.psd_tol = *cli.psd_tol;
  if (cli.boundary_tol) t.boundary_tol = *cli.boundary_tol;
  t.validate();

  return ParsedProblem{AffineMap(std::move(A), std::move(b)), t};
}

RunResult run_classify(const std::string& path, const CliOptions& cli) {
  const ParsedProblem p = load_problem(path, cli);
  ordered_json rep = base_report("classify", cli);
  rep["input"] =
      ordered_json{{"path", path}, {"dim", static_cast<int>(p.phi.dim())}};
  rep["tolerances"] = tolerances_json(p.tol);
  append_certificate(rep, p.phi, p.tol);
  return RunResult{std::move(rep), 0};
}

RunResult run_validate(const std::string& path, const CliOptions& cli) {
  const ParsedProblem p = load_problem(path, cli);
  const NormCertificate cert = composition_norm(p.phi, p.tol);
  if (!cert.bounded && !cli.force) {
    std::ostringstream os;
    os << "validate: the symbol is not bounded ";
    if (cert.membership_residual) {
      os << "(defect-range membership fails: residual " << *cert.membership_residual
         << " above tolerance " << cert.membership_tol << ")";
    } else {
      os << "(linear part has norm " << cert.a_norm << " > 1)";
    }
    os << "; pass --force to run the truncation oracle anyway";
    throw InputError(os.str());
  }

  ordered_json rep = base_report("validate", cli);
  rep["input"] =
      ordered_json{{"path", path}, {"dim", static_cast<int>(p.phi.dim())}};
  rep["tolerances"] = tolerances_json(p.tol);
  append_certificate(rep, p.phi, p.tol);

  const int d = cli.degree > 0 ? cli.degree : default_degree(static_cast<int>(p.phi.dim()));
  std::vector<double> tnorm;
  tnorm.reserve(static_cast<size_t>(d));
  bool monotone = true;
  for (int k = 1; k <= d; ++k) {
    tnorm.push_back(truncated_norm(p.phi, k));
    if (k > 1 && tnorm.back() < tnorm[tnorm.size() - 2] * (1.0 - kMonotoneSlack))
      monotone = false;
  }

  ordered_json oracle;
  oracle["degree"] = d;
  oracle["truncated_norms"] = tnorm;
  oracle["monotone"] = monotone;
  oracle["monotone_tol"] = kMonotoneSlack;
  bool pass = monotone;

  if (cert.bounded) {
    const double norm = *cert.norm;
    bool bounded_by = true;
    for (double tn : tnorm)
      if (tn > norm * (1.0 + kNormAgreementTol)) bounded_by = false;
    oracle["bounded_by_norm"] = bounded_by;
    oracle["norm_bound_tol"] = kNormAgreementTol;

    const SamplePlan plan =
        make_structured_plan(p.phi, cli.samples, cli.seed, cli.radius, p.tol);
    const double lb = norm_lower_bound(p.phi, plan, kBisectTol);
    const double rel = std::abs(lb - norm) / norm;
    const bool agrees = rel <= kBisectAgreementTol;
    oracle["psd_bisection"] =
        ordered_json{{"lower_bound", lb},
                     {"bisect_tol", kBisectTol},
                     {"relative_gap", rel},
                     {"agreement_tol", kBisectAgreementTol},
                     {"agrees", agrees}};

    const PsdVerdict at =
        psd_certify(p.phi, norm * (1.0 + kNormAgreementTol), plan, p.tol);
    oracle["psd_at_norm"] = ordered_json{{"margin", kNormAgreementTol},
                                         {"psd", at.psd},
                                         {"min_eig", at.min_eig},
                                         {"threshold", at.threshold}};
    oracle["plan"] = ordered_json{{"points", plan.points.size()},
                                  {"seed", plan.seed},
                                  {"radius", plan.radius}};
    pass = pass && bounded_by && agrees && at.psd;
  }

  oracle["pass"] = pass;
  rep["oracle"] = std::move(oracle);
  return RunResult{std::move(rep), pass ? 0 : 3};
}

DiagonalModel build_model(const DiagSpec& spec) {
  if (spec.preset == "paper-counterexample") return counterexample_model();
  if (spec.preset == "constant") return constant_model(spec.a);
  if (spec.preset == "geometric") return geometric_model(spec.r);
  if (!spec.preset.empty())
    throw InputError("diag: unknown preset \"" + spec.preset +
                     "\" (known: paper-counterexample, constant, geometric)");

  if (spec.alpha_list.empty())
    throw InputError("diag: provide a preset or --alpha-list");
  if (static_cast<int>(spec.alpha_list.size()) < spec.horizon)
    throw InputError("diag: alpha list has " +
                     std::to_string(spec.alpha_list.size()) +
                     " entries but the horizon is " + std::to_string(spec.horizon));
  if (!spec.b_list.empty() &&
      static_cast<int>(spec.b_list.size()) < spec.horizon)
    throw InputError("diag: b list has " + std::to_string(spec.b_list.size()) +
                     " entries but the horizon is " + std::to_string(spec.horizon));

  DiagonalModel model;
  auto alphas = std::make_shared<const std::vector<Complex>>(spec.alpha_list);
  model.alpha = [alphas](int m) {
    if (m < 1 || static_cast<size_t>(m) > alphas->size())
      throw InputError("diag: alpha index " + std::to_string(m) +
                       " outside the provided list");
    return (*alphas)[static_cast<size_t>(m - 1)];
  };
  if (spec.b_list.empty()) {
    model.bcoef = [](int m) { return Complex(1.0 / static_cast<double>(m), 0.0); };
  } else {
    auto bs = std::make_shared<const std::vector<Complex>>(spec.b_list);
    model.bcoef = [bs](int m) {
      if (m < 1 || static_cast<size_t>(m) > bs->size())
        throw InputError("diag: b index " + std::to_string(m) +
                         " outside the provided list");
      return (*bs)[static_cast<size_t>(m - 1)];
    };
  }
  return model;
}

RunResult run_diag(const DiagSpec& spec, const CliOptions& cli) {
  if (spec.horizon < 1) throw InputError("diag: horizon must be >= 1");
  if (spec.horizon > 10000000)
    throw InputError("diag: horizon larger than 1e7 is not supported");
  const DiagonalModel model = build_model(spec);
  const SeriesResult series = series_criterion(model, spec.horizon, kDivergenceThreshold);

  ordered_json rep = base_report("diag", cli);
  rep["model"] = model_section(spec);

  ordered_json js;
  js["verdict"] = to_string(series.verdict);
  js["partial_sum"] = series.final_sum;
  js["divergence_threshold"] = kDivergenceThreshold;
  js["growth_exponent"] = series.growth_exponent;
  if (series.verdict == SeriesVerdict::converging) {
    js["tail"] = ordered_json{{"max_ratio", series.tail_ratio},
                              {"decay_exponent", series.decay_exponent},
                              {"bound", series.tail_bound}};
  }
  js["diagnostic"] = series.diagnostic;
  // An infinite term cuts the partial-sum record short; checkpoints only
  // cover what was actually accumulated.
  const int recorded = static_cast<int>(series.partial_sums.size());
  ordered_json checkpoints = ordered_json::array();
  for (int m : checkpoint_indices(recorded))
    checkpoints.push_back(ordered_json::array(
        {m, series.partial_sums[static_cast<size_t>(m - 1)]}));
  js["partial_sum_checkpoints"] = std::move(checkpoints);
  rep["series"] = std::move(js);

  ordered_json gaps = ordered_json::array();
  std::string gaps_omitted;
  for (int m = 1; m <= std::min(spec.horizon, 50); ++m) {
    try {
      const GapResult g = counterexample_gap(model, m);
      gaps.push_back(ordered_json::array({m, g.t_m, g.gap}));
    } catch (const InputError& e) {
      gaps_omitted = e.what();
      break;
    }
  }
  if (gaps_omitted.empty())
    rep["gaps"] = std::move(gaps);
  else
    rep["gaps_omitted"] = gaps_omitted;

  const DiagNormResult dn = diag_norm(model, spec.horizon);
  switch (dn.verdict) {
    case SeriesVerdict::converging: rep["norm_verdict"] = "bounded"; break;
    case SeriesVerdict::diverging: rep["norm_verdict"] = "unbounded"; break;
    case SeriesVerdict::inconclusive: rep["norm_verdict"] = "inconclusive"; break;
  }
  if (dn.norm) {
    rep["norm"] = ordered_json{{"value", *dn.norm},
                               {"series_sum", dn.series_sum},
                               {"b_norm_sq", dn.b_norm_sq},
                               {"tail_bound", dn.tail_bound}};
  } else if (!dn.diagnostic.empty()) {
    rep["norm_refused"] = dn.diagnostic;
  }
  return RunResult{std::move(rep), 0};
}

std::string to_json_string(const ordered_json& report) {
  return report.dump(2) + "\n";
}

std::string to_text(const ordered_json& report) {
  std::string out;
  walk_text(report, "", out);
  return out;
}

}  // namespace fockop::report
