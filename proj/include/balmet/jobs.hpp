#ifndef BALMET_JOBS_HPP
#define BALMET_JOBS_HPP

#include <algorithm>
#include <limits>
#include <optional>
#include <regex>
#include <variant>

#include "balmet/serialize.hpp"

namespace balmet {

// Smallest polar size whose exactness class covers every monomial pair a
// basis of these degrees can produce, floored at the stock default.
inline int default_polar_size(const std::vector<int>& degrees) {
  int mx = 0;
  for (int k : degrees) mx = std::max(mx, k);
  return std::max(16, 2 * mx + 2);
}

inline QuadratureScheme scheme_for(int n_polar, int n_azimuthal,
                                   const std::vector<int>& degrees) {
  const int d = default_polar_size(degrees);
  return build_quadrature(n_polar > 0 ? n_polar : d, n_azimuthal > 0 ? n_azimuthal : d);
}

// Balance a random basis of the given degrees and hand back the result as a
// map; used by the balanced(...) map specification.
inline Basis balanced_basis_for(const std::vector<int>& degrees, unsigned seed) {
  const QuadratureScheme scheme = scheme_for(0, 0, degrees);
  const BalanceReport rep = balance_iterate(random_basis(BundleSpec(degrees), seed), scheme);
  if (!rep.converged)
    throw precondition_error("balanced(...): iteration did not converge for these degrees");
  return rep.final_basis;
}

// Map specifications accepted on the command line and in job files:
//   eq8                        built-in fixture
//   ftilde                     built-in fixture
//   eq8-rotated(seed N)        eq8 conjugated by a seeded random unitary
//   balanced(k1,..,km;seed N)  balanced basis of those degrees, random start
//   <path>                     grassmap/1 or basis/1 document
inline GrassMap resolve_map(const std::string& spec) {
  if (spec == "eq8") return eq8_map();
  if (spec == "ftilde") return ftilde_map();
  static const std::regex rotated(R"(^eq8-rotated\(\s*seed\s+(\d+)\s*\)$)");
  static const std::regex balanced(R"(^balanced\(\s*(\d+(?:\s*,\s*\d+)*)\s*;\s*seed\s+(\d+)\s*\)$)");
  std::smatch m;
  if (std::regex_match(spec, m, rotated)) {
    const unsigned seed = static_cast<unsigned>(std::stoul(m[1]));
    return rotated_map(eq8_map(), random_unitary(4, seed));
  }
  if (std::regex_match(spec, m, balanced)) {
    std::vector<int> degrees;
    const std::string list = m[1];
    static const std::regex num(R"(\d+)");
    for (auto it = std::sregex_iterator(list.begin(), list.end(), num);
         it != std::sregex_iterator(); ++it)
      degrees.push_back(std::stoi(it->str()));
    const unsigned seed = static_cast<unsigned>(std::stoul(m[2]));
    return GrassMap::from_basis(balanced_basis_for(degrees, seed));
  }
  const json doc = load_json(spec);
  if (doc.is_object() && doc.value("schema", "") == "basis/1")
    return GrassMap::from_basis(basis_from_json(doc));
  return grassmap_from_json(doc);
}

// Basis sources for balance starts and verify subjects:
//   random     seeded random coefficients (the default start)
//   monomial   identity coefficients
//   eq8        built-in fixture, degrees must be absent or 1,1
//   <path>     basis/1 document
inline Basis resolve_basis(const std::string& source, const std::vector<int>& degrees,
                           unsigned seed) {
  if (source == "eq8") {
    if (!degrees.empty() && degrees != std::vector<int>{1, 1})
      throw precondition_error("basis source eq8 has degrees 1,1");
    return eq8_basis();
  }
  if (source == "monomial" || source == "random") {
    if (degrees.empty())
      throw precondition_error("basis source " + source + " needs --degrees");
    BundleSpec spec(degrees);
    return source == "monomial" ? monomial_basis(spec) : random_basis(spec, seed);
  }
  return basis_from_json(load_json(source));
}

struct BalanceJob {
  std::vector<int> degrees;
  std::vector<unsigned> seeds{0};
  std::string start{"random"};
  bool compare_metrics{false};
  int n_polar{0};  // 0 picks the size covering the degrees
  int n_azimuthal{0};
  double tolerance{1e-10};
  int max_iterations{500};
};

struct BalanceOutcome {
  std::vector<unsigned> seeds;
  std::vector<BalanceReport> reports;
  bool all_converged{false};
  std::optional<double> metric_agreement;
};

// Fixed affine probe set inside the unit disk of the standard chart; used
// whenever two pullback metrics are compared pointwise.
inline std::vector<cplx> metric_probe_points(int count = 20) {
  std::vector<cplx> out;
  const auto pts = halton_points(4 * count, 7);
  for (const auto& x : pts) {
    if (!x.in_z0_chart()) continue;
    out.push_back(x.affine());
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

inline BalanceOutcome run_balance(const BalanceJob& job) {
  if (job.start == "random" && job.degrees.empty())
    throw precondition_error("balance: --degrees is required for random starts");
  if (job.start != "random" && job.seeds.size() > 1)
    throw precondition_error("balance: multiple seeds only make sense for random starts");

  BalanceOutcome out;
  out.seeds = job.seeds;
  out.all_converged = true;
  for (const unsigned seed : job.seeds) {
    const Basis start = resolve_basis(job.start, job.degrees, seed);
    const QuadratureScheme scheme =
        scheme_for(job.n_polar, job.n_azimuthal, start.spec().degrees);
    BalanceReport rep = balance_iterate(start, scheme, job.tolerance, job.max_iterations);
    out.all_converged = out.all_converged && rep.converged;
    out.reports.push_back(std::move(rep));
  }

  if (job.compare_metrics && out.reports.size() >= 2) {
    const auto probes = metric_probe_points();
    double worst = 0.0;
    for (size_t i = 0; i < out.reports.size(); ++i)
      for (size_t j = i + 1; j < out.reports.size(); ++j)
        for (const cplx& z : probes) {
          const MatrixXcd hi = pullback_metric(out.reports[i].final_basis, z);
          const MatrixXcd hj = pullback_metric(out.reports[j].final_basis, z);
          worst = std::max(worst, (hi - hj).norm());
        }
    out.metric_agreement = worst;
  }
  return out;
}

inline json balance_outcome_to_json(const BalanceOutcome& out) {
  if (out.reports.size() == 1 && !out.metric_agreement)
    return balance_report_to_json(out.reports[0]);
  json reports = json::array();
  for (const auto& r : out.reports) reports.push_back(balance_report_to_json(r));
  json j{{"schema", "balance_multi/1"},
         {"seeds", out.seeds},
         {"all_converged", out.all_converged},
         {"reports", std::move(reports)}};
  if (out.metric_agreement) j["metric_agreement"] = *out.metric_agreement;
  return j;
}

struct VerifyJob {
  std::string subject;      // map specification; empty when degrees+basis are used
  std::vector<int> degrees;
  std::string basis_source; // used with degrees
  unsigned seed{0};
  std::optional<double> lambda;
  int n_polar{0};
  int n_azimuthal{0};
  int sample_size{40};
};

struct VerifyCheck {
  std::string name;
  double value{0.0};
  double threshold{0.0};
  bool pass{false};
};

struct VerifyReport {
  std::string subject;
  int n_polar{0};
  int n_azimuthal{0};
  double lambda{0.0};
  bool lambda_estimated{false};
  std::vector<VerifyCheck> checks;
  bool all_pass{false};
};

inline VerifyReport run_verify(const VerifyJob& job) {
  GrassMap map = [&] {
    if (!job.subject.empty()) return resolve_map(job.subject);
    if (job.basis_source.empty())
      throw precondition_error("verify: give a map subject or --degrees with --basis");
    return GrassMap::from_basis(resolve_basis(job.basis_source, job.degrees, job.seed));
  }();

  const std::vector<int> degree_hint =
      map.has_basis() ? map.basis().spec().degrees : std::vector<int>{};
  const QuadratureScheme scheme = scheme_for(job.n_polar, job.n_azimuthal, degree_hint);

  VerifyReport rep;
  rep.subject = job.subject.empty() ? job.basis_source : job.subject;
  rep.n_polar = scheme.n_polar;
  rep.n_azimuthal = scheme.n_azimuthal;

  const auto sample = fibonacci_points(job.sample_size);
  std::vector<cplx> affine;
  for (const auto& x : sample)
    if (x.in_z0_chart()) affine.push_back(x.affine());

  // Pointwise section rank across the sample.
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& x : sample) {
    Eigen::JacobiSVD<MatrixXcd> svd(map.evaluate(x));
    const auto& sv = svd.singularValues();
    min_ratio = std::min(min_ratio, sv(sv.size() - 1) / sv(0));
  }
  rep.checks.push_back({"section_rank", min_ratio, 1e-10, min_ratio > 1e-10});

  // Gram distance from the balanced value and moment map components.
  const GramMatrix g = gram(map, scheme);
  const MomentMapData mm = moment_map(map, scheme, sample);
  rep.checks.push_back({"gram_residual", g.residual(), 1e-8, g.residual() <= 1e-8});
  rep.checks.push_back(
      {"gram_trace_error", std::abs(g.entries.trace().real() - map.rank()), 1e-10,
       std::abs(g.entries.trace().real() - map.rank()) <= 1e-10});
  rep.checks.push_back({"reproducing_defect", mm.reproducing_defect, 1e-10,
                        mm.reproducing_defect <= 1e-10});
  const double traceless = mm.traceless_part.norm();
  rep.checks.push_back({"moment_traceless", traceless, 1e-8, traceless <= 1e-8});

  // Largest antiholomorphic component of the differential on the sample.
  double defect = 0.0;
  for (const auto& x : sample) defect = std::max(defect, holomorphy_defect(map, x));
  rep.checks.push_back({"holomorphy_defect", defect, 1e-6, defect <= 1e-6});

  // Pullback two-form against a multiple of the reference form.  The
  // multiplier is taken from the flag or estimated as the median pointwise
  // ratio.
  const FormField form =
      map.has_basis() ? pullback_form_holo(map.basis()) : pullback_form_projector(map);
  std::vector<double> ratios;
  for (const cplx& z : affine) {
    const double fs1 = 1.0 / std::pow(1.0 + std::norm(z), 2.0);
    ratios.push_back(form(z) / fs1);
  }
  double lam;
  if (job.lambda) {
    lam = *job.lambda;
    rep.lambda_estimated = false;
  } else {
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    lam = sorted[sorted.size() / 2];
    rep.lambda_estimated = true;
  }
  rep.lambda = lam;
  double kahler_dev = 0.0;
  for (size_t i = 0; i < affine.size(); ++i)
    kahler_dev = std::max(kahler_dev, std::abs(ratios[i] / lam - 1.0));
  rep.checks.push_back({"kahler_deviation", kahler_dev, 1e-4, kahler_dev <= 1e-4});

  rep.all_pass = true;
  for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

inline json verify_report_to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back(json{{"name", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"pass", c.pass}});
  return json{{"schema", "verify_report/1"},
              {"subject", r.subject},
              {"quadrature", {{"n_polar", r.n_polar}, {"n_azimuthal", r.n_azimuthal}}},
              {"lambda", r.lambda},
              {"lambda_estimated", r.lambda_estimated},
              {"checks", std::move(checks)},
              {"all_pass", r.all_pass}};
}

struct CompareJob {
  std::string a;
  std::string b;
  int sample_size{30};
  int validation_size{50};
  double gap_threshold{1e-5};
  double residual_threshold{1e-6};
  bool expect_equivalent{false};
};

inline EquivalenceVerdict run_compare(const CompareJob& job) {
  return decide_equivalence(resolve_map(job.a), resolve_map(job.b), job.sample_size,
                            job.validation_size, job.gap_threshold, job.residual_threshold);
}

struct SuiteJob {
  int n_polar{16};
  int n_azimuthal{16};
  std::optional<std::string> ftilde_override;  // grassmap/1 document
};

struct JobConfig {
  std::variant<BalanceJob, VerifyJob, CompareJob, SuiteJob> job;
  std::optional<std::string> output;
};

namespace detail {

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw parse_error(std::string("job field ") + key + " has the wrong type");
  }
}

}  // namespace detail

// job/1 documents mirror the command line flags; see the top-level README
// for the field tables.
inline JobConfig job_from_json(const json& j) {
  require_schema(j, "job/1");
  const std::string task = detail::field_or<std::string>(j, "task", "");
  JobConfig cfg;
  cfg.output = j.contains("output")
                   ? std::optional<std::string>(j.at("output").get<std::string>())
                   : std::nullopt;
  if (task == "balance") {
    BalanceJob job;
    job.degrees = detail::field_or(j, "degrees", job.degrees);
    job.seeds = detail::field_or(j, "seeds", job.seeds);
    job.start = detail::field_or(j, "start", job.start);
    job.compare_metrics = detail::field_or(j, "compare_metrics", job.compare_metrics);
    job.n_polar = detail::field_or(j, "n_polar", job.n_polar);
    job.n_azimuthal = detail::field_or(j, "n_azimuthal", job.n_azimuthal);
    job.tolerance = detail::field_or(j, "tolerance", job.tolerance);
    job.max_iterations = detail::field_or(j, "max_iterations", job.max_iterations);
    cfg.job = std::move(job);
  } else if (task == "verify") {
    VerifyJob job;
    job.subject = detail::field_or(j, "subject", job.subject);
    job.degrees = detail::field_or(j, "degrees", job.degrees);
    job.basis_source = detail::field_or(j, "basis", job.basis_source);
    job.seed = detail::field_or(j, "seed", job.seed);
    if (j.contains("lambda")) job.lambda = j.at("lambda").get<double>();
    job.n_polar = detail::field_or(j, "n_polar", job.n_polar);
    job.n_azimuthal = detail::field_or(j, "n_azimuthal", job.n_azimuthal);
    job.sample_size = detail::field_or(j, "sample_size", job.sample_size);
    cfg.job = std::move(job);
  } else if (task == "compare") {
    CompareJob job;
    job.a = detail::field_or<std::string>(j, "a", "");
    job.b = detail::field_or<std::string>(j, "b", "");
    if (job.a.empty() || job.b.empty()) throw parse_error("compare job needs fields a and b");
    job.sample_size = detail::field_or(j, "sample_size", job.sample_size);
    job.validation_size = detail::field_or(j, "validation_size", job.validation_size);
    job.gap_threshold = detail::field_or(j, "gap_threshold", job.gap_threshold);
    job.residual_threshold = detail::field_or(j, "residual_threshold", job.residual_threshold);
    job.expect_equivalent = detail::field_or(j, "expect_equivalent", job.expect_equivalent);
    cfg.job = std::move(job);
  } else if (task == "paper-suite") {
    SuiteJob job;
    job.n_polar = detail::field_or(j, "n_polar", job.n_polar);
    job.n_azimuthal = detail::field_or(j, "n_azimuthal", job.n_azimuthal);
    if (j.contains("ftilde_override"))
      job.ftilde_override = j.at("ftilde_override").get<std::string>();
    cfg.job = std::move(job);
  } else {
    throw parse_error("job field task must be balance, verify, compare, or paper-suite");
  }
  return cfg;
}

}  // namespace balmet

#endif
