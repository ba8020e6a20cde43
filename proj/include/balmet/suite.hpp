#ifndef BALMET_SUITE_HPP
#define BALMET_SUITE_HPP

#include <cstdio>

#include "balmet/jobs.hpp"

namespace balmet {

struct CriterionResult {
  int index{0};
  std::string name;
  bool pass{false};
  std::string detail;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;
  bool all_pass{false};
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return std::string(buf);
}

inline double fs_unit_density(const cplx& z) {
  const double d = 1.0 + std::norm(z);
  return 1.0 / (d * d);
}

// Fixed-metric pairing of the degree-k monomials: entries are rational in
// |z0|^2, |z1|^2 with an exact closed form, the independent ground truth
// for the quadrature.
inline double monomial_pairing_error(int k, const QuadratureScheme& scheme) {
  const MatrixXcd h = integrate(
      [&](const ChartPoint& x) {
        Eigen::VectorXcd v(k + 1);
        for (int a = 0; a <= k; ++a)
          v(a) = std::pow(x.z0, k - a) * std::pow(x.z1, a);
        return MatrixXcd((v * v.adjoint()) / std::pow(x.norm2(), k));
      },
      scheme);
  auto factorial = [](int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  double worst = 0.0;
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b) {
      const double oracle =
          a == b ? static_cast<double>(factorial(k - a)) * factorial(a) / factorial(k + 1)
                 : 0.0;
      worst = std::max(worst, std::abs(h(a, b) - cplx(oracle, 0.0)));
    }
  return worst;
}

}  // namespace detail

// The shipped end-to-end checks, one result per numbered claim the project
// is accountable for.  Runtime target is well under a minute.
inline SuiteResult run_paper_suite(const SuiteJob& job) {
  const QuadratureScheme scheme = build_quadrature(job.n_polar, job.n_azimuthal);
  const GrassMap ftilde =
      job.ftilde_override ? resolve_map(*job.ftilde_override) : ftilde_map();
  const std::vector<cplx> probes = metric_probe_points(20);
  const std::vector<ChartPoint> sphere_sample = fibonacci_points(30);

  SuiteResult out;
  auto add = [&](int index, const std::string& name, bool pass, std::string detail) {
    out.criteria.push_back({index, name, pass, std::move(detail)});
  };

  // 1. quadrature versus the exact monomial pairing
  {
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k)
      worst = std::max(worst, detail::monomial_pairing_error(k, scheme));
    add(1, "quadrature-oracle", worst <= 1e-12,
        detail::fmt("max pairing error %.2e on scheme ", worst) +
            std::to_string(scheme.n_polar) + "x" + std::to_string(scheme.n_azimuthal) +
            " (exact only for polar degree < n_polar and phase index < n_azimuthal)");
  }

  // 2. the shipped rank-2 fixture is balanced; the normalized measure does
  //    not see the form scale
  {
    const GramMatrix g = gram(eq8_basis(), scheme);
    double wsum = 0.0;
    for (double w : scheme.weights) wsum += w;
    const bool pass = g.residual() <= 1e-10 && std::abs(wsum - 1.0) <= 1e-13;
    add(2, "eq8-balanced", pass,
        detail::fmt("Gram residual %.2e, weight normalization drift %.1e "
                    "(identical for every form scale)",
                    g.residual(), std::abs(wsum - 1.0)));
  }

  // 3. pullback form of the fixture is twice the reference form
  {
    const FormField form = pullback_form_holo(eq8_basis());
    double worst = 0.0;
    for (const cplx& z : probes)
      worst = std::max(worst, std::abs(form(z) - 2.0 * detail::fs_unit_density(z)));
    add(3, "eq8-kahler-form", worst <= 1e-5,
        detail::fmt("max |form - 2 FS| = %.2e over %g points", worst,
                    static_cast<double>(probes.size())));
  }

  // 4. the mixed-entry fixture: full rank, holomorphic as a map, form twice
  //    the reference form
  {
    double min_ratio = std::numeric_limits<double>::infinity();
    double defect = 0.0;
    for (const auto& x : sphere_sample) {
      Eigen::JacobiSVD<MatrixXcd> svd(ftilde.evaluate(x));
      const auto& sv = svd.singularValues();
      min_ratio = std::min(min_ratio, sv(sv.size() - 1) / sv(0));
      defect = std::max(defect, holomorphy_defect(ftilde, x));
    }
    const FormField form = pullback_form_projector(ftilde);
    double form_dev = 0.0;
    for (const cplx& z : probes)
      form_dev = std::max(form_dev, std::abs(form(z) - 2.0 * detail::fs_unit_density(z)));
    const bool pass =
        ftilde.rank() == 2 && min_ratio > 1e-6 && defect <= 1e-5 && form_dev <= 1e-4;
    add(4, "ftilde-triple-check", pass,
        detail::fmt("min rank ratio %.2e, holomorphy defect %.2e, max |form - 2 FS| %.2e",
                    min_ratio, defect, form_dev));
  }

  // 5. no unitary takes the first fixture to the second
  {
    const EquivalenceVerdict v = decide_equivalence(eq8_map(), ftilde);
    const bool pass = v.kind == Equivalence::NotEquivalent && v.overlap_gap > 1e-3;
    add(5, "rigidity-gap", pass,
        std::string("verdict ") + to_string(v.kind) +
            detail::fmt(", overlap gap %.3e (threshold 1e-3), witness ", v.overlap_gap) +
            v.witness_x.str() + " / " + v.witness_y.str());
  }

  // 6. five random starts on two degree-1 summands give the same metric,
  //    and it is the expected one
  {
    int converged_count = 0;
    std::vector<Basis> finals;
    for (unsigned seed = 0; seed < 5; ++seed) {
      const BalanceReport rep =
          balance_iterate(random_basis(BundleSpec({1, 1}), seed), scheme);
      if (rep.converged) ++converged_count;
      finals.push_back(rep.final_basis);
    }
    double pairwise = 0.0, to_target = 0.0;
    for (const cplx& z : probes) {
      const MatrixXcd target =
          MatrixXcd::Identity(2, 2) / (1.0 + std::norm(z));
      for (size_t i = 0; i < finals.size(); ++i) {
        const MatrixXcd hi = pullback_metric(finals[i], z);
        to_target = std::max(to_target, (hi - target).norm());
        for (size_t j = i + 1; j < finals.size(); ++j)
          pairwise = std::max(pairwise, (hi - pullback_metric(finals[j], z)).norm());
      }
    }
    const bool pass = converged_count == 5 && pairwise <= 1e-8 && to_target <= 1e-8;
    add(6, "balanced-metric-unique", pass,
        detail::fmt("converged %g/5, pairwise metric gap %.2e, gap to identity/(1+|z|^2) %.2e",
                    static_cast<double>(converged_count), pairwise, to_target));
  }

  // 7. joining two balanced degree-1 bases stays balanced and lands in the
  //    unitary orbit of the rank-2 fixture
  {
    const Basis b1 =
        balance_iterate(random_basis(BundleSpec({1}), 11), scheme).final_basis;
    const Basis b2 =
        balance_iterate(random_basis(BundleSpec({1}), 12), scheme).final_basis;
    const Basis joined = direct_sum(b1, b2);
    const double res = gram(joined, scheme).residual();
    const EquivalenceVerdict v =
        decide_equivalence(GrassMap::from_basis(joined), eq8_map());
    const bool pass = res <= 1e-10 && v.kind == Equivalence::Equivalent;
    add(7, "direct-sum-balanced", pass,
        detail::fmt("joined Gram residual %.2e, ", res) + "verdict versus eq8: " +
            to_string(v.kind) +
            detail::fmt(" (validation residual %.2e)", v.validation_residual));
  }

  // 8. moment map components across the shipped bases
  {
    struct Row {
      const char* name;
      Basis basis;
      bool balanced;
    };
    const std::vector<Row> rows = {
        {"eq8", eq8_basis(), true},
        {"monomial-degree-1", monomial_basis(BundleSpec({1})), true},
        {"binomial-degree-2", binomial_basis(2), true},
        {"binomial-degree-3", binomial_basis(3), true},
        {"monomial-degree-2", monomial_basis(BundleSpec({2})), false},
    };
    bool pass = true;
    double worst_repro = 0.0, worst_traceless = 0.0, monomial_traceless = 0.0;
    for (const auto& row : rows) {
      const MomentMapData mm = moment_map(row.basis, scheme, sphere_sample);
      worst_repro = std::max(worst_repro, mm.reproducing_defect);
      pass = pass && mm.reproducing_defect <= 1e-10;
      const double traceless = mm.traceless_part.norm();
      if (row.balanced) {
        worst_traceless = std::max(worst_traceless, traceless);
        pass = pass && traceless <= 1e-10;
      } else {
        monomial_traceless = traceless;
        pass = pass && traceless > 1e-2;
      }
    }
    add(8, "moment-map-components", pass,
        detail::fmt("max reproducing defect %.2e, max balanced traceless %.2e, "
                    "degree-2 monomial traceless %.2e",
                    worst_repro, worst_traceless, monomial_traceless));
  }

  // 9. the direct-sum ratio precondition is enforced with a useful message
  {
    bool threw = false;
    std::string message;
    try {
      direct_sum(monomial_basis(BundleSpec({1})), monomial_basis(BundleSpec({3})));
    } catch (const precondition_error& e) {
      threw = true;
      message = e.what();
    }
    const bool pass = threw && message.find("1/2") != std::string::npos &&
                      message.find("1/4") != std::string::npos;
    add(9, "direct-sum-ratio-guard", pass,
        threw ? "rejected with: " + message : "no error raised");
  }

  // 10. structural invariants: Gram trace law, projector algebra, gauge and
  //     unitary behavior, second-order stencil convergence
  {
    bool pass = true;
    std::string notes;

    double trace_err = 0.0;
    const std::vector<std::vector<int>> degree_sets = {{1, 1}, {2}, {1, 3}, {0, 1}, {2, 2}};
    for (size_t i = 0; i < degree_sets.size(); ++i) {
      const BundleSpec spec(degree_sets[i]);
      const QuadratureScheme local =
          build_quadrature(std::max(job.n_polar, default_polar_size(degree_sets[i])),
                           std::max(job.n_azimuthal, default_polar_size(degree_sets[i])));
      const Basis b = random_basis(spec, 21 + static_cast<unsigned>(i));
      const GramMatrix g = gram(b, local);
      trace_err = std::max(trace_err, std::abs(g.entries.trace().real() - spec.rank()));
    }
    pass = pass && trace_err <= 1e-10;
    notes += detail::fmt("trace law %.2e", trace_err);

    const Basis pb = random_basis(BundleSpec({1, 2}), 31);
    const GrassMap pm = GrassMap::from_basis(pb);
    double proj_err = 0.0;
    for (const auto& x : fibonacci_points(10)) {
      const MatrixXcd p = projector(pm, x);
      proj_err = std::max(proj_err, (p * p - p).norm());
      proj_err = std::max(proj_err, (p - MatrixXcd(p.adjoint())).norm());
    }
    pass = pass && proj_err <= 1e-12;
    notes += detail::fmt(", projector algebra %.2e", proj_err);

    const Basis ub = random_basis(BundleSpec({1, 1}), 41);
    const MatrixXcd w = random_unitary(4, 42);
    const Basis wb(ub.spec(), w * ub.coeffs());
    double uni_err =
        std::abs(gram(wb, scheme).residual() - gram(ub, scheme).residual());
    const GrassMap um = GrassMap::from_basis(ub), wm = GrassMap::from_basis(wb);
    for (const auto& x : fibonacci_points(8)) {
      const MatrixXcd lhs = projector(wm, x);
      const MatrixXcd rhs = w * projector(um, x) * w.adjoint();
      uni_err = std::max(uni_err, (lhs - rhs).norm());
    }
    pass = pass && uni_err <= 1e-12;
    notes += detail::fmt(", unitary relabeling %.2e", uni_err);

    std::mt19937_64 gauge_eng(43);
    MatrixXcd a =
        MatrixXcd::Identity(2, 2) + 0.3 * complex_gaussian_matrix(2, 2, gauge_eng);
    const Basis gb(ub.spec(), ub.coeffs() * right_gauge_matrix(ub.spec(), a));
    const GrassMap gm = GrassMap::from_basis(gb);
    double gauge_err = 0.0;
    for (const auto& x : fibonacci_points(8))
      gauge_err = std::max(gauge_err, (projector(gm, x) - projector(um, x)).norm());
    pass = pass && gauge_err <= 1e-10;
    notes += detail::fmt(", right gauge %.2e", gauge_err);

    const cplx z0(0.7, 0.3);
    auto quartic = [](cplx z) { return std::norm(z) * std::norm(z); };
    auto wave = [](cplx z) { return std::exp(z.real()) * std::cos(0.5 * z.imag()); };
    const double q_exact = 4.0 * std::norm(z0);
    const double w_exact = 0.25 * 0.75 * std::exp(z0.real()) * std::cos(0.5 * z0.imag());
    const double rq =
        std::abs(ddbar_coefficient(quartic, z0, 1e-2) - q_exact) /
        std::abs(ddbar_coefficient(quartic, z0, 5e-3) - q_exact);
    const double rw = std::abs(ddbar_coefficient(wave, z0, 1e-2) - w_exact) /
                      std::abs(ddbar_coefficient(wave, z0, 5e-3) - w_exact);
    const bool order_ok = rq > 3.5 && rq < 4.5 && rw > 3.5 && rw < 4.5;
    pass = pass && order_ok;
    notes += detail::fmt(", stencil halving ratios %.2f and %.2f", rq, rw);

    add(10, "invariant-suite", pass, notes);
  }

  out.all_pass = true;
  for (const auto& c : out.criteria) out.all_pass = out.all_pass && c.pass;
  return out;
}

inline json suite_to_json(const SuiteResult& s) {
  json rows = json::array();
  for (const auto& c : s.criteria)
    rows.push_back(
        json{{"index", c.index}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return json{{"schema", "suite_report/1"}, {"criteria", std::move(rows)},
              {"all_pass", s.all_pass}};
}

inline void print_suite(const SuiteResult& s, std::FILE* stream = stdout) {
  for (const auto& c : s.criteria)
    std::fprintf(stream, "[%s] %2d %-24s %s\n", c.pass ? "PASS" : "FAIL", c.index,
                 c.name.c_str(), c.detail.c_str());
  std::fprintf(stream, "%s\n", s.all_pass ? "all criteria passed" : "CRITERIA FAILED");
}

}  // namespace balmet

#endif
