#include "arecloak/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "arecloak/errors.hpp"
#include "arecloak/realizability.hpp"
#include "arecloak/rng.hpp"

namespace arecloak {

LqrProblem::LqrProblem(Matrix a, Matrix b, Matrix c, Matrix r)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), r_(std::move(r)) {
  const Index n = a_.rows();
  if (n == 0 || a_.cols() != n)
    throw InvalidInput("state matrix must be square and nonempty");
  if (b_.rows() != n) throw InvalidInput("B row count must match the state");
  if (c_.cols() != n)
    throw InvalidInput("C column count must match the state");
  const Index m = b_.cols();
  if (r_.rows() != m || r_.cols() != m)
    throw InvalidInput("R must be square of the input dimension");
  require_finite(a_, "A");
  require_finite(b_, "B");
  require_finite(c_, "C");
  if (m > 0) {
    require_finite(r_, "R");
    if (relative_asymmetry(r_) > kSymmetryTol)
      throw InvalidInput("R is not symmetric");
    r_ = symmetrized(r_);
    const SymmetricEig re = sym_eig_extremes(r_);
    if (re.min_value <= 1e-12 * std::max(1.0, re.max_value))
      throw InvalidInput("R is not positive definite");
  }
}

AreProblem lqr_to_are(const LqrProblem& l) {
  const Index n = l.state_dim();
  Matrix d = Matrix::Zero(n, n);
  if (l.input_dim() > 0) {
    const Matrix rinv_bt = l.r().ldlt().solve(l.b().transpose());
    d = symmetrized(l.b() * rinv_bt);
  }
  const Matrix q = symmetrized(l.c().transpose() * l.c());
  return AreProblem(l.a(), q, d);
}

namespace {

// Eigenfactor a psd matrix as W W' keeping only eigenvalues above the rank
// cut; negatives within tolerance are clipped to zero.
Matrix psd_factor(const Matrix& s, double rank_tol, const std::string& name) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s));
  if (es.info() != Eigen::Success)
    throw NumericError("symmetric eigen decomposition failed");
  const Vector& w = es.eigenvalues();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w(0) < -kPsdTol * scale)
    throw InvalidInput(name + " is not positive semidefinite (min eigenvalue " +
                       std::to_string(w(0)) + ")");
  const double cut = rank_tol * scale;
  std::vector<Index> keep;
  for (Index i = 0; i < w.size(); ++i)
    if (w(i) > cut) keep.push_back(i);
  Matrix factor(s.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    factor.col(static_cast<Index>(j)) =
        es.eigenvectors().col(keep[j]) * std::sqrt(w(keep[j]));
  return factor;
}

}  // namespace

LqrProblem realize_as_lqr(const AreProblem& p, double rank_tol) {
  const Matrix b = psd_factor(p.d(), rank_tol, "D");
  const Matrix c = psd_factor(p.q(), rank_tol, "Q").transpose();
  const Index m = b.cols();
  return LqrProblem(p.a(), b, c, Matrix::Identity(m, m));
}

namespace {

struct SpectrumPlan {
  std::vector<double> reals;                       // signed real eigenvalues
  std::vector<std::pair<double, double>> pairs;    // (re, im), im > 0
};

SpectrumPlan plan_spectrum(Index n, const BenchmarkSpec& spec, Rng& rng) {
  const auto count = [n](double f) {
    return std::min<Index>(n, static_cast<Index>(std::lround(f * static_cast<double>(n))));
  };
  Index n_unstable = count(spec.unstable_fraction);
  Index n_real = count(spec.real_fraction);
  // Complex eigenvalues come in conjugate pairs on each side of the axis.
  Index real_unstable = std::min(
      n_unstable, static_cast<Index>(std::lround(
                      spec.real_fraction * static_cast<double>(n_unstable))));
  if ((n_unstable - real_unstable) % 2 != 0) {
    if (real_unstable > 0 && n_real > 0)
      --real_unstable;
    else
      ++real_unstable;
  }
  real_unstable = std::clamp<Index>(real_unstable, 0, n_unstable);
  Index real_stable = n_real - real_unstable;
  const Index n_stable = n - n_unstable;
  real_stable = std::clamp<Index>(real_stable, 0, n_stable);
  if ((n_stable - real_stable) % 2 != 0) ++real_stable;
  real_stable = std::clamp<Index>(real_stable, 0, n_stable);
  if ((n_stable - real_stable) % 2 != 0) --real_stable;

  SpectrumPlan plan;
  const double lo = spec.stability_margin;
  const auto draw = [&rng, lo]() { return rng.uniform(lo, 1.0); };
  for (Index i = 0; i < real_stable; ++i) plan.reals.push_back(-draw());
  for (Index i = 0; i < real_unstable; ++i) plan.reals.push_back(draw());
  for (Index i = 0; i < (n_stable - real_stable) / 2; ++i)
    plan.pairs.emplace_back(-draw(), rng.uniform(0.1, 1.0));
  for (Index i = 0; i < (n_unstable - real_unstable) / 2; ++i)
    plan.pairs.emplace_back(draw(), rng.uniform(0.1, 1.0));
  return plan;
}

Matrix random_orthogonal(Index n, Rng& rng) {
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  return Eigen::HouseholderQR<Matrix>(g).householderQ();
}

Matrix build_state_matrix(Index n, const BenchmarkSpec& spec, Rng& rng) {
  const SpectrumPlan plan = plan_spectrum(n, spec, rng);
  Matrix t = Matrix::Zero(n, n);
  std::vector<Index> block_starts;
  Index at = 0;
  for (double lam : plan.reals) {
    block_starts.push_back(at);
    t(at, at) = lam;
    at += 1;
  }
  for (auto [re, im] : plan.pairs) {
    block_starts.push_back(at);
    t(at, at) = re;
    t(at + 1, at + 1) = re;
    t(at, at + 1) = im;
    t(at + 1, at) = -im;
    at += 2;
  }
  // Fill strictly above the block diagonal; eigenvalues are untouched.
  for (std::size_t bi = 0; bi + 1 < block_starts.size(); ++bi) {
    const Index rows_end = block_starts[bi + 1];
    const Index rows_begin = block_starts[bi];
    for (Index i = rows_begin; i < rows_end; ++i)
      for (Index j = rows_end; j < n; ++j)
        t(i, j) = spec.coupling * rng.gaussian();
  }
  const Matrix u = random_orthogonal(n, rng);
  return u * t * u.transpose();
}

}  // namespace

LqrProblem generate_benchmark(const BenchmarkSpec& spec) {
  const Index n = spec.state_dim;
  const Index m = spec.input_dim;
  const Index p = spec.output_dim;
  if (n < 1 || m < 1 || p < 1)
    throw InvalidInput("benchmark dimensions must be at least 1");
  if (m > n || p > n)
    throw InvalidInput("input and output dimensions cannot exceed the state");
  if (!(spec.stability_margin > 0.0) || spec.stability_margin >= 1.0)
    throw InvalidInput("stability margin must lie in (0, 1)");

  constexpr int kRetries = 8;
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    const Matrix a = build_state_matrix(n, spec, rng);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Matrix b(n, m);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) b(i, j) = scale * rng.gaussian();
    Matrix c(p, n);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = scale * rng.gaussian();

    LqrProblem candidate(a, b, c, Matrix::Identity(m, m));
    try {
      const AreProblem are = lqr_to_are(candidate);
      const SolvabilityReport sr = check_solvability(are);
      if (!sr.stabilizable || !sr.detectable) continue;
      solve_stabilizing(are);
    } catch (const Error&) {
      continue;
    }
    return candidate;
  }
  throw NumericError("benchmark generation retry limit exceeded");
}

CaseStudyResult case_study(const BenchmarkSpec& spec, std::size_t shifts,
                           DisguiseMode mode, const SamplingWindow& window) {
  const LqrProblem lqr = generate_benchmark(spec);
  AreProblem original = lqr_to_are(lqr);
  if (spec.ridge > 0.0) {
    const Index n = original.order();
    original = AreProblem(
        original.a(), original.q() + spec.ridge * Matrix::Identity(n, n),
        original.d() + spec.ridge * Matrix::Identity(n, n));
  }

  const StabilizingSolution base = solve_stabilizing(original);
  HamiltonianMatrix h = build_hamiltonian(original);

  CaseStudyResult result;
  result.state_dim = original.order();
  result.requested_shifts = shifts;
  result.negative_real_count = negative_real_eigenpairs(h).size();

  ShiftPlan cumulative;
  cumulative.seed = spec.seed;
  cumulative.window = window;

  AreProblem current = original;
  result.rows.push_back({0, privacy_measures(original, current, cumulative)});

  // A stage is retried with fresh seeds while any measure falls below the
  // previous row: shifts can partially cancel earlier ones, and the point of
  // piling them up is a growing disguise. When no attempt grows all three
  // the least-shrinking one is kept.
  constexpr int kStageAttempts = 32;
  auto stalls = [](const PrivacyReport& next, const PrivacyReport& prev) {
    auto drop = [](const std::optional<double>& n0,
                   const std::optional<double>& p0) {
      const double n = n0.value_or(0.0);
      const double p = p0.value_or(0.0);
      return std::min(n - p, n > 0.0 ? 0.0 : -1.0);
    };
    return std::min({drop(next.rel_change_a, prev.rel_change_a),
                     drop(next.rel_change_q, prev.rel_change_q),
                     drop(next.rel_change_d, prev.rel_change_d)});
  };

  for (std::size_t iter = 1; iter <= shifts; ++iter) {
    const PrivacyReport& prev = result.rows.back().measures;
    bool stage_done = false;
    double best_score = -std::numeric_limits<double>::infinity();
    std::optional<AreProblem> best_are;
    std::optional<ShiftRecord> best_record;

    for (int attempt = 0; attempt < kStageAttempts && !stage_done; ++attempt) {
      const std::uint64_t stage_seed =
          mix_seed(spec.seed, 1000 + 64 * iter + attempt);
      AreProblem next = current;
      ShiftRecord record;
      try {
        if (mode == DisguiseMode::unconstrained) {
          PerturbResult pr = perturb(h, 1, window, stage_seed);
          record = std::move(pr.plan.records.front());
          next = split_hamiltonian(pr.hamiltonian);
        } else {
          RealizableShift rs = find_realizable_shift(current, stage_seed, window);
          record = std::move(rs.record);
          next = std::move(rs.modified);
        }
      } catch (const NoAdmissibleShift&) {
        break;
      }
      cumulative.records.push_back(record);
      const PrivacyReport measured = privacy_measures(original, next, cumulative);
      cumulative.records.pop_back();
      const double score = stalls(measured, prev);
      if (score > best_score) {
        best_score = score;
        best_are = std::move(next);
        best_record = std::move(record);
      }
      stage_done = best_score >= -1e-12;
    }
    if (!best_are) break;

    current = std::move(*best_are);
    cumulative.records.push_back(std::move(*best_record));
    h = build_hamiltonian(current);
    ++result.applied_shifts;
    result.rows.push_back(
        {iter, privacy_measures(original, current, cumulative)});
  }

  const StabilizingSolution cloud = solve_stabilizing(current);
  result.solution_drift =
      (cloud.p - base.p).norm() / std::max(1e-300, base.p.norm());
  result.final_residual = are_residual(original, cloud.p);
  result.closed_loop_stable =
      spectral_abscissa(closed_loop(original, cloud.p)) < 0.0;
  return result;
}

}  // namespace arecloak
