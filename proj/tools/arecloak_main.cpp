#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arecloak/are.hpp"
#include "arecloak/errors.hpp"
#include "arecloak/io.hpp"
#include "arecloak/lqr.hpp"
#include "arecloak/privacy.hpp"
#include "arecloak/realizability.hpp"
#include "arecloak/rng.hpp"
#include "arecloak/shift.hpp"

namespace {

using namespace arecloak;

// Exit codes, also documented in the README:
//   0 success (verify: all checks passed)
//   1 verify ran cleanly but a check failed
//   2 invalid input or bad usage
//   3 mathematical assumption violated for this instance
//   4 no admissible shift
//   5 numeric backend failure
//   6 trivial request (nothing to do)
enum ExitCode {
  kOk = 0,
  kVerifyFailed = 1,
  kBadInput = 2,
  kAssumption = 3,
  kNoShift = 4,
  kNumeric = 5,
  kTrivial = 6,
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double max_re(const std::vector<Complex>& spectrum) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Complex& z : spectrum) worst = std::max(worst, z.real());
  return worst;
}

ShiftSelection parse_selection(const std::string& s) {
  if (s == "real") return ShiftSelection::real_only;
  if (s == "complex") return ShiftSelection::complex_only;
  if (s == "mixed") return ShiftSelection::mixed;
  throw InvalidInput("unknown selection '" + s + "'");
}

void print_privacy(const PrivacyReport& m) {
  auto rel = [](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("n/a");
  };
  std::cout << "  rel change A        " << rel(m.rel_change_a) << "\n"
            << "  rel change Q        " << rel(m.rel_change_q) << "\n"
            << "  rel change D        " << rel(m.rel_change_d) << "\n"
            << "  shifts applied      " << m.shifts_applied << "\n"
            << "  candidate pool r    " << m.negative_real_count << "\n"
            << "  index sequences     " << m.ambiguity_sequences.str() << "\n"
            << "  free magnitudes     " << m.ambiguity_magnitudes << "\n";
}

struct DisguiseArgs {
  std::string in;
  std::string out;
  std::string secrets_out;
  std::string mode = "problem1";
  std::size_t shifts = 1;
  std::uint64_t seed = 0;
  double margin = 0.05;
  double span = 1.0;
  std::string selection = "real";
  bool keep_vectors = false;
};

int run_disguise(const DisguiseArgs& args, bool selection_given) {
  if (args.shifts == 0)
    throw TrivialRequest("trivial request: --shifts 0 leaves the coefficients unchanged");

  SamplingWindow window;
  window.margin = args.margin;
  window.negative_span = args.span;
  window.selection = parse_selection(args.selection);

  const ProblemFile input = read_problem_file(args.in);
  const AreProblem original = problem_file_to_are(input);

  AreProblem disguised = original;
  ShiftPlan plan;
  plan.seed = args.seed;

  if (args.mode == "problem1") {
    const HamiltonianMatrix h = build_hamiltonian(original);
    PerturbResult result = perturb(h, args.shifts, window, args.seed);
    disguised = split_hamiltonian(result.hamiltonian);
    plan = result.plan;
  } else {
    if (selection_given && window.selection != ShiftSelection::real_only)
      throw InvalidInput("problem2 keeps Q and D psd and only supports --selection real");
    window.selection = ShiftSelection::real_only;
    plan.window = window;
    for (std::size_t j = 0; j < args.shifts; ++j) {
      RealizableShift step =
          find_realizable_shift(disguised, mix_seed(args.seed, j), window);
      disguised = step.modified;
      plan.records.push_back(step.record);
    }
  }

  ProblemFile out;
  out.are = disguised;
  if (args.mode == "problem2") out.lqr = realize_as_lqr(disguised);
  if (input.meta.name) out.meta.name = *input.meta.name + "-disguised";
  write_problem_file(args.out, out);

  const PrivacyReport measures = privacy_measures(original, disguised, plan);

  if (!args.secrets_out.empty()) {
    ReportFile secrets;
    secrets.mode = args.mode;
    secrets.seed = args.seed;
    secrets.plan = plan;
    secrets.keep_vectors = args.keep_vectors;
    secrets.privacy = measures;
    write_report_file(args.secrets_out, secrets);
  }

  std::cout << "disguised " << original.order() << "-state problem with "
            << plan.records.size() << " shift(s) [" << args.mode << "]\n";
  print_privacy(measures);
  std::cout << "wrote " << args.out;
  if (!args.secrets_out.empty()) std::cout << " and " << args.secrets_out;
  std::cout << "\n";
  return kOk;
}

struct SolveArgs {
  std::string in;
  std::string out;
};

int run_solve(const SolveArgs& args) {
  const AreProblem p = problem_file_to_are(read_problem_file(args.in));
  const StabilizingSolution sol = solve_stabilizing(p);

  SolutionFile f;
  f.p = sol.p;
  f.residual = sol.residual;
  f.closed_loop_spectrum = sol.closed_loop_spectrum;
  write_solution_file(args.out, f);

  std::cout << "solved " << p.order() << "-state equation, residual "
            << fmt(sol.residual) << ", closed-loop abscissa "
            << fmt(max_re(f.closed_loop_spectrum)) << "\n"
            << "wrote " << args.out << "\n";
  return kOk;
}

struct VerifyArgs {
  std::string original;
  std::string disguised;
  std::string solution;
  std::string secrets;
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  const AreProblem original = problem_file_to_are(read_problem_file(args.original));
  const AreProblem disguised = problem_file_to_are(read_problem_file(args.disguised));
  if (original.order() != disguised.order())
    throw InvalidInput("original and disguised problems have different state dimensions");

  const SolutionFile sol = read_solution_file(args.solution);
  if (sol.p.rows() != original.order())
    throw InvalidInput("solution dimension does not match the original problem");

  const double coeff_scale = std::max(
      {1.0, original.a().norm(), original.q().norm(), original.d().norm()});
  const double p_norm = sol.p.norm();
  const double residual = are_residual(original, sol.p);
  const double residual_bound = 1e-8 * (1.0 + p_norm * p_norm) * coeff_scale;
  const bool residual_ok = residual <= residual_bound;

  const bool stable = spectral_abscissa(closed_loop(original, sol.p)) < 0.0;

  VerifyBlock block;
  block.residual = residual;
  block.closed_loop_stable = stable;

  bool match_ok = true;
  if (!args.secrets.empty()) {
    const StabilizingSolution reference = solve_stabilizing(original);
    const double denom = std::max(reference.p.norm(), 1e-300);
    block.solution_match = (sol.p - reference.p).norm() / denom;
    match_ok = *block.solution_match <= 1e-8;
  }

  const bool verdict = residual_ok && stable && match_ok;

  std::cout << "residual vs original   " << fmt(residual) << " (bound "
            << fmt(residual_bound) << ")  " << (residual_ok ? "ok" : "FAIL")
            << "\n"
            << "closed loop Hurwitz    " << (stable ? "yes  ok" : "no  FAIL")
            << "\n";
  if (block.solution_match)
    std::cout << "solution match         " << fmt(*block.solution_match)
              << "  " << (match_ok ? "ok" : "FAIL") << "\n";
  std::cout << "verdict                " << (verdict ? "PASS" : "FAIL") << "\n";

  if (!args.out.empty()) {
    ReportFile report;
    report.mode = "verify";
    if (!args.secrets.empty()) {
      const ReportFile secrets = read_report_file(args.secrets);
      report.seed = secrets.seed;
      report.plan = secrets.plan;
      report.keep_vectors = secrets.keep_vectors;
    }
    report.verify = block;
    write_report_file(args.out, report);
    std::cout << "wrote " << args.out << "\n";
  }
  return verdict ? kOk : kVerifyFailed;
}

struct AnalyzeArgs {
  std::string original;
  std::string disguised;
  std::string secrets;
  std::string out;
  bool attack = false;
  std::size_t budget = 1000;
  std::size_t depth = 0;
  bool depth_given = false;
  std::uint64_t seed = 0;
};

int run_analyze(const AnalyzeArgs& args) {
  const AreProblem original = problem_file_to_are(read_problem_file(args.original));
  const AreProblem disguised = problem_file_to_are(read_problem_file(args.disguised));
  if (original.order() != disguised.order())
    throw InvalidInput("original and disguised problems have different state dimensions");

  ShiftPlan plan;
  if (!args.secrets.empty()) plan = read_report_file(args.secrets).plan;

  const PrivacyReport measures = privacy_measures(original, disguised, plan);
  std::cout << "privacy measures\n";
  print_privacy(measures);

  Json report;
  report["privacy"] = privacy_report_to_json(measures);

  if (args.attack) {
    std::size_t depth = args.depth;
    if (!args.depth_given)
      depth = plan.records.empty() ? 1 : plan.records.size();
    const HamiltonianMatrix h_true = build_hamiltonian(original);
    const HamiltonianMatrix h_tilde = build_hamiltonian(disguised);
    const AttackReport attack =
        simulate_attack(h_tilde, h_true, depth, args.budget, args.seed);

    Json block;
    block["depth"] = attack.depth;
    block["budget"] = args.budget;
    block["total_sequences"] = attack.total_sequences.str();
    block["evaluated"] = attack.sequences.size();
    block["truncated"] = attack.truncated;
    if (attack.best) {
      const AttackSequence& b = attack.sequences[*attack.best];
      Json best;
      best["indices"] = b.indices;
      best["gammas"] = b.gammas;
      best["distance"] = b.distance;
      block["best"] = best;
    } else {
      block["best"] = nullptr;
    }
    Json listed = Json::array();
    const std::size_t cap = std::min<std::size_t>(attack.sequences.size(), 64);
    for (std::size_t i = 0; i < cap; ++i) {
      const AttackSequence& s = attack.sequences[i];
      Json row;
      row["indices"] = s.indices;
      row["gammas"] = s.gammas;
      row["distance"] = s.distance;
      listed.push_back(row);
    }
    block["sequences"] = listed;
    report["attack"] = block;

    std::cout << "attack depth " << attack.depth << ", evaluated "
              << attack.sequences.size() << " of "
              << attack.total_sequences.str() << " sequence(s)"
              << (attack.truncated ? " (truncated)" : "") << "\n";
    if (attack.best) {
      const AttackSequence& b = attack.sequences[*attack.best];
      std::cout << "  best distance       " << fmt(b.distance) << "\n  indices            ";
      for (std::size_t i : b.indices) std::cout << ' ' << i;
      std::cout << "\n";
    }
  }

  if (!args.out.empty()) {
    write_json_file(args.out, report);
    std::cout << "wrote " << args.out << "\n";
  }
  return kOk;
}

struct BenchArgs {
  Index n = 20;
  Index m = 2;
  Index p = 2;
  std::uint64_t seed = 0;
  std::size_t shifts = 9;
  std::string mode = "problem1";
  double margin = 0.05;
  double span = 1.0;
  double ridge = 0.0;
  double real_fraction = 0.35;
  double unstable_fraction = 0.25;
  std::string out;
  std::string csv;
};

int run_bench(const BenchArgs& args) {
  BenchmarkSpec spec;
  spec.state_dim = args.n;
  spec.input_dim = args.m;
  spec.output_dim = args.p;
  spec.seed = args.seed;
  spec.ridge = args.ridge;
  spec.real_fraction = args.real_fraction;
  spec.unstable_fraction = args.unstable_fraction;

  SamplingWindow window;
  window.margin = args.margin;
  window.negative_span = args.span;
  window.selection = ShiftSelection::real_only;

  const DisguiseMode mode = args.mode == "problem2" ? DisguiseMode::realizable
                                                    : DisguiseMode::unconstrained;
  const CaseStudyResult result = case_study(spec, args.shifts, mode, window);

  std::cout << "case study n=" << result.state_dim << " [" << args.mode
            << "], applied " << result.applied_shifts << "/"
            << result.requested_shifts << " shift(s), candidate pool "
            << result.negative_real_count << "\n";
  std::cout << "iteration        relA          relD          relQ\n";
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%13.6e", v.value_or(0.0));
    return std::string(buf);
  };
  for (const CaseStudyRow& row : result.rows) {
    std::printf("%9zu %s %s %s\n", row.iteration,
                cell(row.measures.rel_change_a).c_str(),
                cell(row.measures.rel_change_d).c_str(),
                cell(row.measures.rel_change_q).c_str());
  }
  std::cout << "solution drift      " << fmt(result.solution_drift) << "\n"
            << "residual (original) " << fmt(result.final_residual) << "\n"
            << "closed loop stable  "
            << (result.closed_loop_stable ? "yes" : "no") << "\n";

  if (!args.csv.empty()) {
    std::ofstream f(args.csv);
    if (!f) throw InvalidInput("cannot open '" + args.csv + "' for writing");
    f << "iteration,relA,relD,relQ\n";
    for (const CaseStudyRow& row : result.rows) {
      auto field = [](const std::optional<double>& v) {
        return v ? fmt17(*v) : std::string();
      };
      f << row.iteration << ',' << field(row.measures.rel_change_a) << ','
        << field(row.measures.rel_change_d) << ','
        << field(row.measures.rel_change_q) << '\n';
    }
    std::cout << "wrote " << args.csv << "\n";
  }

  if (!args.out.empty()) {
    Json rows = Json::array();
    for (const CaseStudyRow& row : result.rows) {
      Json r = privacy_report_to_json(row.measures);
      r["iteration"] = row.iteration;
      rows.push_back(r);
    }
    Json summary;
    summary["requested_shifts"] = result.requested_shifts;
    summary["applied_shifts"] = result.applied_shifts;
    summary["negative_real_count"] = result.negative_real_count;
    summary["solution_drift"] = result.solution_drift;
    summary["final_residual"] = result.final_residual;
    summary["closed_loop_stable"] = result.closed_loop_stable;
    summary["state_dim"] = result.state_dim;
    Json report;
    report["rows"] = rows;
    report["summary"] = summary;
    write_json_file(args.out, report);
    std::cout << "wrote " << args.out << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"structured eigenvalue shifts for outsourcing Riccati equations"};
  app.require_subcommand(1);

  DisguiseArgs dis;
  CLI::App* disguise = app.add_subcommand(
      "disguise", "shift Hamiltonian eigenvalues, write the disguised problem");
  disguise->add_option("--in", dis.in, "input problem file")
      ->required()
      ->check(CLI::ExistingFile);
  disguise->add_option("--out", dis.out, "disguised problem file")->required();
  disguise->add_option("--secrets-out", dis.secrets_out,
                       "where to write the shift plan (keep private)");
  disguise->add_option("--mode", dis.mode, "problem1 | problem2")
      ->check(CLI::IsMember({"problem1", "problem2"}));
  disguise->add_option("--shifts", dis.shifts, "number of shifts (default 1)");
  disguise->add_option("--seed", dis.seed, "RNG seed (default 0)")
      ->envname("ARECLOAK_SEED");
  disguise->add_option("--margin", dis.margin,
                       "relative guard band of the sampling window");
  disguise->add_option("--span", dis.span,
                       "how far real shifts may move away from the axis");
  CLI::Option* sel = disguise->add_option(
      "--selection", dis.selection, "real | complex | mixed (problem1 only)");
  sel->check(CLI::IsMember({"real", "complex", "mixed"}));
  disguise->add_flag("--keep-vectors", dis.keep_vectors,
                     "store eigenvectors in the secrets file");

  SolveArgs sol;
  CLI::App* solve = app.add_subcommand("solve", "compute the stabilizing solution");
  solve->add_option("--in", sol.in, "problem file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", sol.out, "solution file")->required();

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand(
      "verify", "check a returned solution against the original problem");
  verify->add_option("--original", ver.original, "original problem file")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--disguised", ver.disguised, "disguised problem file")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--solution", ver.solution, "solution file from the cloud")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--secrets", ver.secrets, "shift plan from disguise")
      ->check(CLI::ExistingFile);
  verify->add_option("--out", ver.out, "verification report file");

  AnalyzeArgs ana;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "privacy measures and optional reconstruction attack");
  analyze->add_option("--original", ana.original, "original problem file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--disguised", ana.disguised, "disguised problem file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--secrets", ana.secrets, "shift plan from disguise")
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", ana.out, "analysis report file");
  analyze->add_flag("--attack", ana.attack, "run the reconstruction attack");
  analyze->add_option("--budget", ana.budget,
                      "max index sequences to score (default 1000)");
  CLI::Option* depth_opt =
      analyze->add_option("--depth", ana.depth,
                          "attack depth (default: plan length, else 1)");
  analyze->add_option("--seed", ana.seed, "seed for truncated sweeps")
      ->envname("ARECLOAK_SEED");

  BenchArgs ben;
  CLI::App* bench = app.add_subcommand(
      "bench", "generate a random instance and run the disguise case study");
  bench->add_option("--n", ben.n, "state dimension (default 20)");
  bench->add_option("--m", ben.m, "input dimension (default 2)");
  bench->add_option("--p", ben.p, "output dimension (default 2)");
  bench->add_option("--seed", ben.seed, "RNG seed (default 0)")
      ->envname("ARECLOAK_SEED");
  bench->add_option("--shifts", ben.shifts, "shifts to apply (default 9)");
  bench->add_option("--mode", ben.mode, "problem1 | problem2")
      ->check(CLI::IsMember({"problem1", "problem2"}));
  bench->add_option("--margin", ben.margin, "sampling window guard band");
  bench->add_option("--span", ben.span, "negative-direction window span");
  bench->add_option("--ridge", ben.ridge,
                    "identity ridge added to Q and D before disguising");
  bench->add_option("--real-fraction", ben.real_fraction,
                    "share of real eigenvalues in the generated A");
  bench->add_option("--unstable-fraction", ben.unstable_fraction,
                    "share of unstable eigenvalues in the generated A");
  bench->add_option("--out", ben.out, "JSON report file");
  bench->add_option("--csv", ben.csv, "CSV file (iteration,relA,relD,relQ)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (app.got_subcommand(disguise))
      return run_disguise(dis, sel->count() > 0);
    if (app.got_subcommand(solve)) return run_solve(sol);
    if (app.got_subcommand(verify)) return run_verify(ver);
    if (app.got_subcommand(analyze)) {
      ana.depth_given = depth_opt->count() > 0;
      return run_analyze(ana);
    }
    if (app.got_subcommand(bench)) return run_bench(ben);
  } catch (const TrivialRequest& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTrivial;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const AssumptionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssumption;
  } catch (const NoAdmissibleShift& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoShift;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kBadInput;
}
