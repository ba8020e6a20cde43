// Command line front end: balance / verify / compare / paper-suite, plus a
// config-file alternative to flags.  Reports are JSON documents; without
// --out they go to stdout, with --out they are written to the named file.
// Exit statuses: 0 ok, 2 usage, 3 data, 4 non-convergence, 5 equivalence
// demanded but not certified.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "balmet/balmet.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kData = 3;
constexpr int kNoConvergence = 4;
constexpr int kNotEquivalent = 5;

void emit_report(const balmet::json& report, const std::optional<std::string>& out) {
  if (out) {
    balmet::save_json(report, *out);
    std::cout << "report written to " << *out << "\n";
  } else {
    std::cout << report.dump(2) << "\n";
  }
}

int run_balance_job(const balmet::BalanceJob& job, const std::optional<std::string>& out) {
  const balmet::BalanceOutcome outcome = balmet::run_balance(job);
  for (size_t i = 0; i < outcome.reports.size(); ++i) {
    const auto& rep = outcome.reports[i];
    std::fprintf(stderr, "seed %u: %s after %d iterations, residual %.3e\n",
                 i < outcome.seeds.size() ? outcome.seeds[i] : 0u,
                 rep.converged ? "converged" : "NOT converged", rep.iterations,
                 rep.residual_history.empty() ? -1.0 : rep.residual_history.back());
  }
  if (outcome.metric_agreement)
    std::fprintf(stderr, "pairwise metric agreement: %.3e\n", *outcome.metric_agreement);
  emit_report(balmet::balance_outcome_to_json(outcome), out);
  return outcome.all_converged ? kOk : kNoConvergence;
}

int run_verify_job(const balmet::VerifyJob& job, const std::optional<std::string>& out) {
  const balmet::VerifyReport rep = balmet::run_verify(job);
  for (const auto& c : rep.checks)
    std::fprintf(stderr, "%-20s %10.3e (threshold %.1e) %s\n", c.name.c_str(), c.value,
                 c.threshold, c.pass ? "ok" : "FAIL");
  std::fprintf(stderr, "lambda %s %.12g\n", rep.lambda_estimated ? "estimated" : "given",
               rep.lambda);
  emit_report(balmet::verify_report_to_json(rep), out);
  return kOk;
}

int run_compare_job(const balmet::CompareJob& job, const std::optional<std::string>& out) {
  const balmet::EquivalenceVerdict v = balmet::run_compare(job);
  std::fprintf(stderr, "verdict: %s (%s)\n", balmet::to_string(v.kind), v.reason.c_str());
  std::fprintf(stderr, "overlap gap %.3e, alignment residual %.3e, validation residual %.3e\n",
               v.overlap_gap, v.alignment_residual, v.validation_residual);
  emit_report(balmet::verdict_to_json(v), out);
  if (job.expect_equivalent && v.kind != balmet::Equivalence::Equivalent)
    return kNotEquivalent;
  return kOk;
}

int run_suite_job(const balmet::SuiteJob& job, const std::optional<std::string>& out) {
  const balmet::SuiteResult result = balmet::run_paper_suite(job);
  balmet::print_suite(result);
  if (out) balmet::save_json(balmet::suite_to_json(result), *out);
  return result.all_pass ? kOk : 1;
}

int dispatch(const balmet::JobConfig& cfg) {
  return std::visit(
      [&](const auto& job) -> int {
        using T = std::decay_t<decltype(job)>;
        if constexpr (std::is_same_v<T, balmet::BalanceJob>)
          return run_balance_job(job, cfg.output);
        else if constexpr (std::is_same_v<T, balmet::VerifyJob>)
          return run_verify_job(job, cfg.output);
        else if constexpr (std::is_same_v<T, balmet::CompareJob>)
          return run_compare_job(job, cfg.output);
        else
          return run_suite_job(job, cfg.output);
      },
      cfg.job);
}

std::vector<unsigned> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos)
    return {static_cast<unsigned>(std::stoul(text))};
  const unsigned lo = static_cast<unsigned>(std::stoul(text.substr(0, dots)));
  const unsigned hi = static_cast<unsigned>(std::stoul(text.substr(dots + 2)));
  if (hi < lo) throw balmet::parse_error("seed range is empty: " + text);
  std::vector<unsigned> seeds;
  for (unsigned s = lo; s <= hi; ++s) seeds.push_back(s);
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balanced metrics on holomorphic bundles over the projective line"};
  app.require_subcommand(0, 1);

  std::string config_path;
  app.add_option("--config", config_path, "job/1 document instead of flags");
  std::string out_path;
  app.add_option("--out", out_path, "write the JSON report to this file");

  balmet::BalanceJob bal;
  std::string seeds_text;
  auto* balance = app.add_subcommand("balance", "drive a basis to its balanced position");
  balance->add_option("--degrees", bal.degrees, "summand degrees, comma separated")
      ->delimiter(',');
  balance->add_option("--seed", seeds_text, "random start seed, or a range like 0..4");
  balance->add_option("--seeds", seeds_text, "alias of --seed");
  balance->add_option("--start", bal.start, "random | monomial | eq8 | basis/1 file")
      ->capture_default_str();
  balance->add_flag("--compare-metrics", bal.compare_metrics,
                    "report pairwise pullback metric agreement across seeds");
  balance->add_option("--n-polar", bal.n_polar, "polar quadrature size (0 = automatic)");
  balance->add_option("--n-azimuthal", bal.n_azimuthal,
                      "azimuthal quadrature size (0 = automatic)");
  balance->add_option("--tol", bal.tolerance, "Gram residual target")->capture_default_str();
  balance->add_option("--max-iter", bal.max_iterations, "iteration cap")
      ->capture_default_str();

  balmet::VerifyJob ver;
  auto* verify = app.add_subcommand("verify", "check balance, holomorphy, and form claims");
  verify->add_option("--example", ver.subject,
                     "map specification (eq8, ftilde, balanced(...), file)");
  verify->add_option("--degrees", ver.degrees, "summand degrees for --basis")->delimiter(',');
  verify->add_option("--basis", ver.basis_source, "monomial | random | eq8 | basis/1 file");
  verify->add_option("--seed", ver.seed, "seed for --basis random");
  double lambda_flag = 0.0;
  auto* lambda_opt =
      verify->add_option("--lambda", lambda_flag, "target form scale (default: estimated)");
  verify->add_option("--n-polar", ver.n_polar, "polar quadrature size (0 = automatic)");
  verify->add_option("--n-azimuthal", ver.n_azimuthal,
                     "azimuthal quadrature size (0 = automatic)");
  verify->add_option("--sample", ver.sample_size, "sample point count")
      ->capture_default_str();

  balmet::CompareJob cmp;
  auto* compare = app.add_subcommand("compare", "decide unitary equivalence of two maps");
  compare->add_option("--a", cmp.a, "first map specification");
  compare->add_option("--b", cmp.b, "second map specification");
  compare->add_flag("--expect-equivalent", cmp.expect_equivalent,
                    "exit with status 5 unless the verdict is equivalent");
  compare->add_option("--gap-threshold", cmp.gap_threshold,
                      "overlap gap above which maps are declared inequivalent")
      ->capture_default_str();
  compare->add_option("--residual-threshold", cmp.residual_threshold,
                      "validation residual below which maps are declared equivalent")
      ->capture_default_str();
  compare->add_option("--sample", cmp.sample_size, "alignment sample size")
      ->capture_default_str();
  compare->add_option("--validation", cmp.validation_size, "fresh validation point count")
      ->capture_default_str();

  balmet::SuiteJob suite;
  std::string ftilde_override;
  auto* paper_suite =
      app.add_subcommand("paper-suite", "run every shipped acceptance criterion");
  paper_suite->add_option("--n-polar", suite.n_polar, "polar quadrature size")
      ->capture_default_str();
  paper_suite->add_option("--n-azimuthal", suite.n_azimuthal, "azimuthal quadrature size")
      ->capture_default_str();
  paper_suite->add_option("--ftilde-override", ftilde_override,
                          "replace the built-in fixture by a grassmap/1 file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help or version
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    balmet::JobConfig cfg;
    if (!config_path.empty()) {
      if (app.get_subcommands().size() > 0) {
        std::cerr << "usage error: --config excludes subcommands\n";
        return kUsage;
      }
      cfg = balmet::job_from_json(balmet::load_json(config_path));
      if (!out_path.empty()) cfg.output = out_path;
    } else if (balance->parsed()) {
      if (!seeds_text.empty()) bal.seeds = parse_seed_range(seeds_text);
      if (bal.start == "random" && bal.degrees.empty()) {
        std::cerr << "usage error: balance needs --degrees (or --start with a basis)\n";
        return kUsage;
      }
      cfg.job = bal;
    } else if (verify->parsed()) {
      if (*lambda_opt) ver.lambda = lambda_flag;
      if (ver.subject.empty() && ver.basis_source.empty()) {
        std::cerr << "usage error: verify needs --example, or --degrees with --basis\n";
        return kUsage;
      }
      cfg.job = ver;
    } else if (compare->parsed()) {
      if (cmp.a.empty() || cmp.b.empty()) {
        std::cerr << "usage error: compare needs both --a and --b\n";
        return kUsage;
      }
      cfg.job = cmp;
    } else if (paper_suite->parsed()) {
      if (!ftilde_override.empty()) suite.ftilde_override = ftilde_override;
      cfg.job = suite;
    } else {
      std::cerr << "usage error: give a subcommand or --config; see --help\n";
      return kUsage;
    }
    if (!out_path.empty()) cfg.output = out_path;
    return dispatch(cfg);
  } catch (const balmet::parse_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const balmet::precondition_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const balmet::singular_point_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const balmet::integration_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}
