#ifndef BALMET_SERIALIZE_HPP
#define BALMET_SERIALIZE_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "balmet/balance.hpp"
#include "balmet/maps.hpp"
#include "balmet/rigidity.hpp"

// JSON forms used by the command line tool and the test suite.  Every
// document carries a "schema" tag with an explicit version.  Complex
// numbers are [re, im] pairs, matrices are row-major nested arrays.
// Documents contain no timestamps or environment data, so identical inputs
// produce byte-identical files.

namespace balmet {

using json = nlohmann::json;

inline json complex_to_json(const cplx& v) { return json::array({v.real(), v.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw parse_error("expected [re, im] pair, got " + j.dump());
  return cplx(j[0].get<double>(), j[1].get<double>());
}

inline json matrix_to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw parse_error("expected a non-empty matrix");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) throw parse_error("expected non-empty matrix rows");
  MatrixXcd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw parse_error("ragged matrix rows");
    for (size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(j[i][k]);
  }
  return m;
}

inline json point_to_json(const ChartPoint& x) {
  return json::array({complex_to_json(x.z0), complex_to_json(x.z1)});
}

inline void require_schema(const json& j, const std::string& expected) {
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
    throw parse_error("document has no schema tag");
  const std::string got = j["schema"].get<std::string>();
  if (got != expected)
    throw parse_error("expected schema " + expected + ", got " + got);
}

inline json basis_to_json(const Basis& b) {
  return json{{"schema", "basis/1"},
              {"degrees", b.spec().degrees},
              {"coeffs", matrix_to_json(b.coeffs())}};
}

inline Basis basis_from_json(const json& j) {
  require_schema(j, "basis/1");
  if (!j.contains("degrees") || !j.contains("coeffs"))
    throw parse_error("basis/1 needs degrees and coeffs");
  BundleSpec spec(j["degrees"].get<std::vector<int>>());
  MatrixXcd c = matrix_from_json(j["coeffs"]);
  if (c.rows() != spec.sections() || c.cols() != spec.sections())
    throw parse_error("basis/1 coefficient shape does not match the degrees");
  return Basis(std::move(spec), std::move(c));
}

// Maps serialize either through their basis or through their entry
// expressions; maps built from a raw callable have no faithful document
// form and are rejected.
inline json grassmap_to_json(const GrassMap& m) {
  json j{{"schema", "grassmap/1"}, {"sections", m.sections()}, {"rank", m.rank()}};
  if (m.has_basis()) {
    j["basis"] = basis_to_json(m.basis());
    return j;
  }
  if (m.entry_sources().has_value()) {
    json rows = json::array();
    for (const auto& row : *m.entry_sources()) rows.push_back(row);
    j["entries"] = rows;
    return j;
  }
  throw precondition_error("grassmap_to_json: map has no serializable form");
}

inline GrassMap grassmap_from_json(const json& j) {
  require_schema(j, "grassmap/1");
  if (j.contains("basis")) return GrassMap::from_basis(basis_from_json(j["basis"]));
  if (j.contains("entries")) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& row : j["entries"]) rows.push_back(row.get<std::vector<std::string>>());
    return GrassMap::from_expressions(rows);
  }
  throw parse_error("grassmap/1 needs a basis or an entries table");
}

inline json balance_report_to_json(const BalanceReport& r) {
  return json{{"schema", "balance_report/1"},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"tolerance", r.tolerance},
              {"max_iterations", r.max_iterations},
              {"quadrature", {{"n_polar", r.n_polar}, {"n_azimuthal", r.n_azimuthal}}},
              {"residual_history", r.residual_history},
              {"final_residual", r.residual_history.empty() ? -1.0 : r.residual_history.back()},
              {"final_basis", basis_to_json(r.final_basis)}};
}

inline json verdict_to_json(const EquivalenceVerdict& v) {
  json j{{"schema", "verdict/1"},
         {"kind", to_string(v.kind)},
         {"reason", v.reason},
         {"overlap_gap", v.overlap_gap},
         {"alignment_residual", v.alignment_residual},
         {"validation_residual", v.validation_residual},
         {"thresholds",
          {{"overlap_gap", v.gap_threshold}, {"residual", v.residual_threshold}}}};
  if (v.kind == Equivalence::NotEquivalent && std::isfinite(v.overlap_gap))
    j["witness"] = {{"x", point_to_json(v.witness_x)}, {"y", point_to_json(v.witness_y)}};
  if (v.kind == Equivalence::Equivalent) j["unitary"] = matrix_to_json(v.unitary);
  return j;
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace balmet

#endif
