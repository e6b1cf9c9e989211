#pragma once

#include <cstdint>
#include <vector>

#include "arecloak/are.hpp"
#include "arecloak/privacy.hpp"
#include "arecloak/shift.hpp"
#include "arecloak/types.hpp"

namespace arecloak {

// LQR data (A, B, C, R) with R symmetric positive definite. The associated
// equation uses Q = C'C and D = B R^{-1} B'.
class LqrProblem {
 public:
  LqrProblem(Matrix a, Matrix b, Matrix c, Matrix r);

  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& c() const { return c_; }
  const Matrix& r() const { return r_; }
  Index state_dim() const { return a_.rows(); }
  Index input_dim() const { return b_.cols(); }
  Index output_dim() const { return c_.rows(); }

 private:
  Matrix a_, b_, c_, r_;
};

AreProblem lqr_to_are(const LqrProblem& l);

// Factors psd coefficients back into LQR form: R = I_m with m the numeric
// rank of D, B from the clipped eigenfactorization D = BB', C likewise from
// Q = C'C. Throws InvalidInput when a coefficient is not psd within
// tolerance (a disguise that ignored realizability cannot be dressed up as
// an LQR problem).
LqrProblem realize_as_lqr(const AreProblem& p, double rank_tol = kZeroEigTol);

struct BenchmarkSpec {
  Index state_dim = 4;
  Index input_dim = 1;
  Index output_dim = 1;
  std::uint64_t seed = 0;
  double stability_margin = 0.1;  // min |Re| of generated eigenvalues
  double real_fraction = 0.35;    // share of real eigenvalues of A
  double unstable_fraction = 0.25;
  double coupling = 0.3;          // off-block fill strength
  // Added to Q and D (times identity) when building the case-study equation;
  // full-rank coefficients keep the kernel-window branch of the realizable
  // search available.
  double ridge = 0.0;
};

// Seeded random stabilizable/detectable instance with |A| = O(1) and a
// controlled share of real eigenvalues (real closed-loop eigenvalues are
// what the structured real shifts feed on). Deterministic per seed.
LqrProblem generate_benchmark(const BenchmarkSpec& spec);

enum class DisguiseMode { unconstrained, realizable };

struct CaseStudyRow {
  std::size_t iteration = 0;  // 0 is the untouched baseline
  PrivacyReport measures;
};

struct CaseStudyResult {
  std::vector<CaseStudyRow> rows;
  std::size_t requested_shifts = 0;
  std::size_t applied_shifts = 0;
  // Negative real eigenvalues of the original Hamiltonian; bounds how many
  // real shifts are even possible.
  std::size_t negative_real_count = 0;
  double solution_drift = 0.0;    // |P_disguised - P| / |P|
  double final_residual = 0.0;    // P_disguised in the original equation
  bool closed_loop_stable = false;
  Index state_dim = 0;
};

// Benchmark pipeline: generate, disguise iteratively (driver per mode),
// record privacy measures after every shift, then solve the disguised
// equation and score the returned solution against the original. Runs out
// of admissible shifts gracefully: applied_shifts says how far it got.
CaseStudyResult case_study(const BenchmarkSpec& spec, std::size_t shifts,
                           DisguiseMode mode,
                           const SamplingWindow& window = {});

}  // namespace arecloak
