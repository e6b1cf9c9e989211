#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "arecloak/are.hpp"
#include "arecloak/lqr.hpp"
#include "arecloak/privacy.hpp"
#include "arecloak/shift.hpp"

namespace arecloak {

using Json = nlohmann::json;

// Matrices travel as row-major arrays of arrays of finite numbers; NaN and
// Inf are rejected in both directions (the serializer would silently write
// null otherwise).
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& where);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

struct ProblemMeta {
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;
};

// {"are": {"A","Q","D"}} and/or {"lqr": {"A","B","C","R"}}, plus optional
// {"meta": {"name","seed"}}.
struct ProblemFile {
  std::optional<AreProblem> are;
  std::optional<LqrProblem> lqr;
  ProblemMeta meta;
};

ProblemFile read_problem_file(const std::filesystem::path& path);
void write_problem_file(const std::filesystem::path& path,
                        const ProblemFile& f);

// Coefficients of `f` as an equation, deriving them from the LQR block when
// no explicit block is present.
AreProblem problem_file_to_are(const ProblemFile& f);

struct SolutionFile {
  Matrix p;
  double residual = 0.0;
  std::vector<Complex> closed_loop_spectrum;
};

SolutionFile read_solution_file(const std::filesystem::path& path);
void write_solution_file(const std::filesystem::path& path,
                         const SolutionFile& s);

struct VerifyBlock {
  double residual = 0.0;
  bool closed_loop_stable = false;
  std::optional<double> solution_match;
};

// The secret side-channel of a disguise run. Never written to the same file
// as the disguised coefficients; eigenvectors are included only when
// keep_vectors is set.
struct ReportFile {
  std::string mode;
  std::uint64_t seed = 0;
  ShiftPlan plan;
  bool keep_vectors = false;
  std::optional<PrivacyReport> privacy;
  std::optional<VerifyBlock> verify;
};

ReportFile read_report_file(const std::filesystem::path& path);
void write_report_file(const std::filesystem::path& path,
                       const ReportFile& r);

Json privacy_report_to_json(const PrivacyReport& p);
PrivacyReport privacy_report_from_json(const Json& j);

Json shift_record_to_json(const ShiftRecord& rec, bool keep_vectors);
ShiftRecord shift_record_from_json(const Json& j);

}  // namespace arecloak
