#include "arecloak/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "arecloak/errors.hpp"

namespace arecloak {

Json matrix_to_json(const Matrix& m) {
  if (!m.allFinite())
    throw InvalidInput("refusing to serialize a matrix with NaN or Inf");
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array())
    throw InvalidInput(where + ": row 0 is not an array");
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array())
      throw InvalidInput(where + ": row " + std::to_string(i) +
                         " is not an array");
    if (static_cast<Index>(row.size()) != cols)
      throw InvalidInput(where + ": row " + std::to_string(i) + " has " +
                         std::to_string(row.size()) + " entries, expected " +
                         std::to_string(cols));
    for (Index k = 0; k < cols; ++k) {
      const Json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_number())
        throw InvalidInput(where + ": entry (" + std::to_string(i) + "," +
                           std::to_string(k) + ") is not a number");
      const double value = cell.get<double>();
      if (!std::isfinite(value))
        throw InvalidInput(where + ": entry (" + std::to_string(i) + "," +
                           std::to_string(k) + ") is not finite");
      m(i, k) = value;
    }
  }
  return m;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open " + path.string() + " for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write to " + path.string() + " failed");
}

namespace {

Json complex_to_json(Complex z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw InvalidInput(where + ": expected an object with re and im");
  return Complex(j.at("re").get<double>(), j.at("im").get<double>());
}

Json real_vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector real_vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

Json complex_vector_to_json(const ComplexVector& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

ComplexVector complex_vector_from_json(const Json& j,
                                       const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v(i) = complex_from_json(j[static_cast<std::size_t>(i)], where);
  return v;
}

}  // namespace

ProblemFile read_problem_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  if (!j.is_object())
    throw InvalidInput(path.string() + ": top level must be an object");
  ProblemFile f;
  try {
    if (j.contains("are")) {
      const Json& a = j.at("are");
      f.are.emplace(matrix_from_json(a.at("A"), "are.A"),
                    matrix_from_json(a.at("Q"), "are.Q"),
                    matrix_from_json(a.at("D"), "are.D"));
    }
    if (j.contains("lqr")) {
      const Json& l = j.at("lqr");
      f.lqr.emplace(matrix_from_json(l.at("A"), "lqr.A"),
                    matrix_from_json(l.at("B"), "lqr.B"),
                    matrix_from_json(l.at("C"), "lqr.C"),
                    matrix_from_json(l.at("R"), "lqr.R"));
    }
    if (j.contains("meta")) {
      const Json& m = j.at("meta");
      if (m.contains("name")) f.meta.name = m.at("name").get<std::string>();
      if (m.contains("seed"))
        f.meta.seed = m.at("seed").get<std::uint64_t>();
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  if (!f.are && !f.lqr)
    throw InvalidInput(path.string() +
                       ": neither an \"are\" nor an \"lqr\" block present");
  return f;
}

void write_problem_file(const std::filesystem::path& path,
                        const ProblemFile& f) {
  if (!f.are && !f.lqr)
    throw InvalidInput("problem file needs an \"are\" or \"lqr\" block");
  Json j = Json::object();
  if (f.are)
    j["are"] = Json{{"A", matrix_to_json(f.are->a())},
                    {"Q", matrix_to_json(f.are->q())},
                    {"D", matrix_to_json(f.are->d())}};
  if (f.lqr)
    j["lqr"] = Json{{"A", matrix_to_json(f.lqr->a())},
                    {"B", matrix_to_json(f.lqr->b())},
                    {"C", matrix_to_json(f.lqr->c())},
                    {"R", matrix_to_json(f.lqr->r())}};
  if (f.meta.name || f.meta.seed) {
    Json m = Json::object();
    if (f.meta.name) m["name"] = *f.meta.name;
    if (f.meta.seed) m["seed"] = *f.meta.seed;
    j["meta"] = std::move(m);
  }
  write_json_file(path, j);
}

AreProblem problem_file_to_are(const ProblemFile& f) {
  if (f.are) return *f.are;
  if (f.lqr) return lqr_to_are(*f.lqr);
  throw InvalidInput("problem file holds no coefficients");
}

SolutionFile read_solution_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  SolutionFile s;
  try {
    s.p = matrix_from_json(j.at("P"), "P");
    s.residual = j.at("residual").get<double>();
    for (const Json& z : j.at("closed_loop_spectrum"))
      s.closed_loop_spectrum.push_back(
          complex_from_json(z, "closed_loop_spectrum"));
  } catch (const Json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return s;
}

void write_solution_file(const std::filesystem::path& path,
                         const SolutionFile& s) {
  Json spectrum = Json::array();
  for (Complex z : s.closed_loop_spectrum)
    spectrum.push_back(complex_to_json(z));
  write_json_file(path, Json{{"P", matrix_to_json(s.p)},
                             {"residual", s.residual},
                             {"closed_loop_spectrum", std::move(spectrum)}});
}

Json shift_record_to_json(const ShiftRecord& rec, bool keep_vectors) {
  Json j{{"kind", rec.kind == ShiftKind::real_axis ? "real" : "complex"},
         {"index", rec.candidate_index},
         {"eigenvalue", complex_to_json(rec.eigenvalue)},
         {"delta", rec.delta}};
  if (keep_vectors) {
    if (rec.kind == ShiftKind::real_axis) {
      j["vector"] = real_vector_to_json(rec.real_vector);
    } else {
      j["vector_plus"] = complex_vector_to_json(rec.vector_plus);
      j["vector_minus"] = complex_vector_to_json(rec.vector_minus);
    }
  }
  return j;
}

ShiftRecord shift_record_from_json(const Json& j) {
  ShiftRecord rec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "real")
    rec.kind = ShiftKind::real_axis;
  else if (kind == "complex")
    rec.kind = ShiftKind::complex_pair;
  else
    throw InvalidInput("shift record: unknown kind \"" + kind + "\"");
  rec.candidate_index = j.at("index").get<std::size_t>();
  rec.eigenvalue = complex_from_json(j.at("eigenvalue"), "eigenvalue");
  rec.delta = j.at("delta").get<double>();
  if (j.contains("vector"))
    rec.real_vector = real_vector_from_json(j.at("vector"), "vector");
  if (j.contains("vector_plus"))
    rec.vector_plus =
        complex_vector_from_json(j.at("vector_plus"), "vector_plus");
  if (j.contains("vector_minus"))
    rec.vector_minus =
        complex_vector_from_json(j.at("vector_minus"), "vector_minus");
  return rec;
}

Json privacy_report_to_json(const PrivacyReport& p) {
  const auto ratio = [](const std::optional<double>& v) {
    return v ? Json(*v) : Json(nullptr);
  };
  return Json{{"rel_change_A", ratio(p.rel_change_a)},
              {"rel_change_D", ratio(p.rel_change_d)},
              {"rel_change_Q", ratio(p.rel_change_q)},
              {"shifts_applied", p.shifts_applied},
              {"negative_real_count", p.negative_real_count},
              {"ambiguity_sequences", p.ambiguity_sequences.str()},
              {"ambiguity_magnitudes", p.ambiguity_magnitudes}};
}

PrivacyReport privacy_report_from_json(const Json& j) {
  PrivacyReport p;
  const auto ratio = [&j](const char* key) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
  };
  p.rel_change_a = ratio("rel_change_A");
  p.rel_change_d = ratio("rel_change_D");
  p.rel_change_q = ratio("rel_change_Q");
  p.shifts_applied = j.at("shifts_applied").get<std::size_t>();
  p.negative_real_count = j.at("negative_real_count").get<std::size_t>();
  p.ambiguity_sequences = BigCount(j.at("ambiguity_sequences").get<std::string>());
  p.ambiguity_magnitudes = j.at("ambiguity_magnitudes").get<std::size_t>();
  return p;
}

namespace {

std::string selection_name(ShiftSelection s) {
  switch (s) {
    case ShiftSelection::real_only: return "real";
    case ShiftSelection::complex_only: return "complex";
    case ShiftSelection::mixed: return "mixed";
  }
  return "real";
}

ShiftSelection selection_from_name(const std::string& s) {
  if (s == "real") return ShiftSelection::real_only;
  if (s == "complex") return ShiftSelection::complex_only;
  if (s == "mixed") return ShiftSelection::mixed;
  throw InvalidInput("unknown selection \"" + s + "\"");
}

}  // namespace

ReportFile read_report_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  ReportFile r;
  try {
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.plan.seed = r.seed;
    if (j.contains("window")) {
      const Json& w = j.at("window");
      r.plan.window.margin = w.at("margin").get<double>();
      r.plan.window.negative_span = w.at("negative_span").get<double>();
      r.plan.window.selection =
          selection_from_name(w.at("selection").get<std::string>());
    }
    r.keep_vectors = j.value("keep_vectors", false);
    for (const Json& rec : j.at("shifts"))
      r.plan.records.push_back(shift_record_from_json(rec));
    if (j.contains("privacy") && !j.at("privacy").is_null())
      r.privacy = privacy_report_from_json(j.at("privacy"));
    if (j.contains("verify") && !j.at("verify").is_null()) {
      const Json& v = j.at("verify");
      VerifyBlock b;
      b.residual = v.at("residual").get<double>();
      b.closed_loop_stable = v.at("closed_loop_stable").get<bool>();
      if (v.contains("solution_match") && !v.at("solution_match").is_null())
        b.solution_match = v.at("solution_match").get<double>();
      r.verify = b;
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
  return r;
}

void write_report_file(const std::filesystem::path& path,
                       const ReportFile& r) {
  Json shifts = Json::array();
  for (const ShiftRecord& rec : r.plan.records)
    shifts.push_back(shift_record_to_json(rec, r.keep_vectors));
  Json j{{"mode", r.mode},
         {"seed", r.seed},
         {"window",
          Json{{"margin", r.plan.window.margin},
               {"negative_span", r.plan.window.negative_span},
               {"selection", selection_name(r.plan.window.selection)}}},
         {"keep_vectors", r.keep_vectors},
         {"shifts", std::move(shifts)}};
  j["privacy"] = r.privacy ? privacy_report_to_json(*r.privacy) : Json(nullptr);
  if (r.verify) {
    Json v{{"residual", r.verify->residual},
           {"closed_loop_stable", r.verify->closed_loop_stable}};
    v["solution_match"] = r.verify->solution_match
                              ? Json(*r.verify->solution_match)
                              : Json(nullptr);
    j["verify"] = std::move(v);
  } else {
    j["verify"] = Json(nullptr);
  }
  write_json_file(path, j);
}

}  // namespace arecloak
