#include "qam/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "qam/errors.hpp"

namespace qam {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const Rational& r) {
  return Json{{"exact", to_string(r)}, {"value", to_double(r)}};
}

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const CptpReport& r) {
  return Json{{"completeness", r.completeness},
              {"s_block", optional_json(r.s_block)},
              {"sd_block", optional_json(r.sd_block)},
              {"d_block", optional_json(r.d_block)},
              {"lower_left", optional_json(r.lower_left)},
              {"tolerance", r.tolerance},
              {"passes", r.passes}};
}

Json to_json(const QamReport& r) {
  Json patterns = Json::array();
  for (const auto& p : r.patterns) {
    patterns.push_back(Json{{"kind", p.pattern.kind == BlockKind::Stable ? "orthogonal" : "dfs"},
                            {"block", p.pattern.block},
                            {"pattern", p.pattern.pattern},
                            {"fixed_point_residual", p.fixed_point_residual},
                            {"convergence_residual", p.convergence_residual},
                            {"max_iterations", p.max_iterations},
                            {"converged", p.converged},
                            {"rate_residual", p.rate_residual},
                            {"leakage", p.leakage}});
  }
  return Json{{"C1_fixed_point", r.max_fixed_point()},
              {"C2_convergence", r.max_convergence()},
              {"C2_rate", r.max_rate()},
              {"C3_leakage", r.max_leakage()},
              {"spurious_mixture_residual", r.spurious_mixture_residual},
              {"tolerance", r.tolerance},
              {"passes", r.passes},
              {"patterns", patterns}};
}

Json to_json(const CapacityReport& r) {
  Json out{{"M_perp", r.m_perp},  {"M_nonperp", r.m_nonperp}, {"N_S", r.n_s},
           {"N_D", r.n_d},        {"N", r.n},                 {"alpha_q", to_json(r.alpha_q)},
           {"p_succ", r.p_succ},  {"alpha_qc", r.alpha_qc},   {"saturates_bound", r.saturates_bound},
           {"asymptotic_constant", r.asymptotic_constant},
           {"asymptotic_estimate", r.asymptotic_estimate}};
  out["alpha_qc_exact"] = r.alpha_qc_exact ? to_json(*r.alpha_qc_exact) : Json(nullptr);
  return out;
}

Json to_json(const Table& t) { return Json{{"columns", t.columns}, {"rows", t.rows}}; }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail(ErrorCode::ConfigParse, "expected a number or [re, im], got " + j.dump());
}

ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::ConfigParse, "expected a non-empty vector");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    fail(ErrorCode::ConfigParse, "expected a matrix as a list of rows");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(ErrorCode::ConfigParse, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
  }
  return m;
}

std::string to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  char buf[32];
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace qam
