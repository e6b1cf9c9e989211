#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "arecloak/are.hpp"
#include "arecloak/errors.hpp"
#include "arecloak/privacy.hpp"
#include "arecloak/shift.hpp"
#include "helpers.hpp"

using namespace arecloak;
using testutil::rel_diff;

namespace {

PerturbResult disguise_real(const AreProblem& p, std::size_t k,
                            std::uint64_t seed) {
  SamplingWindow window;
  window.selection = ShiftSelection::real_only;
  return perturb(build_hamiltonian(p), k, window, seed);
}

}  // namespace

TEST_CASE("index_sequence_count: falling factorial, exact") {
  CHECK(index_sequence_count(10, 3) == BigCount(720));
  CHECK(index_sequence_count(6, 2) == BigCount(30));
  CHECK(index_sequence_count(5, 0) == BigCount(1));
  CHECK(index_sequence_count(3, 5) == BigCount(0));
  CHECK(index_sequence_count(0, 0) == BigCount(1));

  // 40!/(40-12)! straight from integer multiplication.
  BigCount expected(1);
  for (int j = 0; j < 12; ++j) expected *= 40 - j;
  CHECK(index_sequence_count(40, 12) == expected);
}

TEST_CASE("privacy_measures: identical problems give zero measures") {
  const AreProblem p = testutil::real_rich_instance(4, 2);
  ShiftPlan empty;
  const PrivacyReport r = privacy_measures(p, p, empty);
  REQUIRE(r.rel_change_a.has_value());
  CHECK(*r.rel_change_a == 0.0);
  CHECK(*r.rel_change_q == 0.0);
  CHECK(*r.rel_change_d == 0.0);
  CHECK(r.shifts_applied == 0);
  CHECK(r.ambiguity_magnitudes == 0);
}

TEST_CASE("privacy_measures: hand-checked relative changes and pool size") {
  const AreProblem p = testutil::real_rich_instance(4, 2);
  const PerturbResult result = disguise_real(p, 2, 9);
  const AreProblem mod = split_hamiltonian(result.hamiltonian);
  const PrivacyReport r = privacy_measures(p, mod, result.plan);

  CHECK(*r.rel_change_a ==
        doctest::Approx((mod.a() - p.a()).norm() / p.a().norm()));
  CHECK(*r.rel_change_q ==
        doctest::Approx((mod.q() - p.q()).norm() / p.q().norm()));
  CHECK(*r.rel_change_d ==
        doctest::Approx((mod.d() - p.d()).norm() / p.d().norm()));
  CHECK(r.shifts_applied == 2);
  CHECK(r.ambiguity_magnitudes == 2);

  const std::size_t pool =
      negative_real_eigenpairs(result.hamiltonian).size();
  CHECK(r.negative_real_count == pool);
  CHECK(r.ambiguity_sequences == index_sequence_count(pool, 2));
}

TEST_CASE("privacy_measures: zero-norm blocks are reported as absent") {
  const Matrix a = Matrix::Constant(1, 1, -1.0);
  const AreProblem p(a, Matrix::Zero(1, 1), Matrix::Constant(1, 1, 1.0));
  ShiftPlan empty;
  const PrivacyReport r = privacy_measures(p, p, empty);
  CHECK_FALSE(r.rel_change_q.has_value());
  CHECK(r.rel_change_a.has_value());
}

TEST_CASE("reverse_direction rebuilds the applied update") {
  const AreProblem p = testutil::scalar_problem();
  const PerturbResult result = disguise_real(p, 1, 4);
  const ShiftRecord& rec = result.plan.records[0];

  // In the disguised matrix the shifted eigenvalue sits at lambda + delta
  // and keeps its eigenvector, so f(index, H_tilde) equals the original
  // update direction and gamma = delta undoes the shift.
  const std::vector<ReverseStep> path =
      true_reverse_path(result.hamiltonian, result.plan);
  REQUIRE(path.size() == 1);
  const Matrix f = reverse_direction(result.hamiltonian, path[0].index);
  const Matrix undone = result.hamiltonian.matrix() - path[0].gamma * f;
  CHECK((undone - build_hamiltonian(p).matrix()).norm() <=
        1e-8 * std::max(1.0, undone.norm()));
  CHECK(path[0].gamma == doctest::Approx(rec.delta).epsilon(1e-9));
}

TEST_CASE("reverse_direction validates the index") {
  const HamiltonianMatrix h = build_hamiltonian(testutil::scalar_problem());
  CHECK_THROWS_AS(reverse_direction(h, 5), InvalidInput);
}

TEST_CASE("confusion_member: validation and gamma = 0 identity") {
  const AreProblem p = testutil::real_rich_instance(4, 2);
  const HamiltonianMatrix h = build_hamiltonian(p);
  const std::size_t r = negative_real_eigenpairs(h).size();
  REQUIRE(r >= 1);

  CHECK_THROWS_AS(confusion_member(h, {0, 0}, {0.1}), InvalidInput);
  CHECK_THROWS_AS(confusion_member(h, {r + 3}, {0.1}), InvalidInput);

  // gamma below the feasibility floor lambda_i(H_j).
  const double lam = negative_real_eigenpairs(h)[0].value;
  CHECK_THROWS_AS(confusion_member(h, {0}, {lam - 0.1}), InvalidInput);

  const ConfusionCandidate same = confusion_member(h, {0}, {0.0});
  CHECK((same.hamiltonian.matrix() - h.matrix()).norm() == 0.0);
}

TEST_CASE("confusion sets nest: a depth-j member extends by gamma = 0") {
  const AreProblem p = testutil::real_rich_instance(6, 21);
  const PerturbResult result = disguise_real(p, 3, 12);
  const HamiltonianMatrix& ht = result.hamiltonian;
  const std::vector<ReverseStep> path = true_reverse_path(ht, result.plan);
  REQUIRE(path.size() == 3);

  std::vector<std::size_t> indices;
  std::vector<double> gammas;
  for (const ReverseStep& step : path) {
    indices.push_back(step.index);
    gammas.push_back(step.gamma);
  }

  for (std::size_t j = 0; j < 3; ++j) {
    const std::vector<std::size_t> idx_j(indices.begin(),
                                         indices.begin() + j);
    const std::vector<double> gam_j(gammas.begin(), gammas.begin() + j);
    const ConfusionCandidate short_member = confusion_member(ht, idx_j, gam_j);

    std::vector<std::size_t> idx_ext = idx_j;
    std::vector<double> gam_ext = gam_j;
    idx_ext.push_back(0);
    gam_ext.push_back(0.0);
    const ConfusionCandidate padded = confusion_member(ht, idx_ext, gam_ext);
    CHECK((padded.hamiltonian.matrix() - short_member.hamiltonian.matrix())
              .norm() == 0.0);
  }

  // The full true path lands on the original Hamiltonian.
  const ConfusionCandidate truth = confusion_member(ht, indices, gammas);
  CHECK((truth.hamiltonian.matrix() - build_hamiltonian(p).matrix()).norm() <=
        1e-6 * std::max(1.0, build_hamiltonian(p).matrix().norm()));
}

TEST_CASE("true_reverse_path refuses complex records") {
  const AreProblem p = testutil::rotating_problem();
  SamplingWindow window;
  window.selection = ShiftSelection::complex_only;
  const PerturbResult result = perturb(build_hamiltonian(p), 1, window, 2);
  CHECK_THROWS_AS(true_reverse_path(result.hamiltonian, result.plan),
                  InvalidInput);
}

TEST_CASE("simulate_attack: scalar disguise is reconstructed exactly") {
  const AreProblem p = testutil::scalar_problem();
  const PerturbResult result = disguise_real(p, 1, 8);
  const HamiltonianMatrix h_true = build_hamiltonian(p);

  const AttackReport report =
      simulate_attack(result.hamiltonian, h_true, 1, 100, 0);
  CHECK(report.depth == 1);
  CHECK(report.total_sequences == BigCount(1));
  CHECK_FALSE(report.truncated);
  REQUIRE(report.sequences.size() == 1);
  REQUIRE(report.best.has_value());
  CHECK(report.sequences[0].distance <=
        1e-6 * std::max(1.0, h_true.matrix().norm()));
}

TEST_CASE("simulate_attack: depth-1 sweep lists every candidate index") {
  const AreProblem p = testutil::real_rich_instance(6, 21);
  const PerturbResult result = disguise_real(p, 1, 3);
  const HamiltonianMatrix h_true = build_hamiltonian(p);
  const std::size_t r = negative_real_eigenpairs(result.hamiltonian).size();
  REQUIRE(r >= 2);

  const AttackReport report =
      simulate_attack(result.hamiltonian, h_true, 1, 10000, 0);
  CHECK(report.total_sequences == BigCount(static_cast<unsigned>(r)));
  CHECK(report.sequences.size() == r);
  CHECK_FALSE(report.truncated);

  // The true index must reconstruct H essentially exactly, and no other
  // index can do better.
  const std::size_t true_index =
      true_reverse_path(result.hamiltonian, result.plan)[0].index;
  bool seen = false;
  for (const AttackSequence& s : report.sequences) {
    REQUIRE(s.indices.size() == 1);
    if (s.indices[0] == true_index) {
      seen = true;
      CHECK(s.distance <= 1e-6 * std::max(1.0, h_true.matrix().norm()));
    }
  }
  CHECK(seen);
  REQUIRE(report.best.has_value());
  CHECK(report.sequences[*report.best].indices[0] == true_index);
}

TEST_CASE("simulate_attack: budget truncation and determinism") {
  const AreProblem p = testutil::real_rich_instance(6, 21);
  const PerturbResult result = disguise_real(p, 1, 3);
  const HamiltonianMatrix h_true = build_hamiltonian(p);
  const std::size_t r = negative_real_eigenpairs(result.hamiltonian).size();
  REQUIRE(r >= 3);

  const AttackReport cut = simulate_attack(result.hamiltonian, h_true, 1, 2, 5);
  CHECK(cut.truncated);
  CHECK(cut.sequences.size() == 2);

  const AttackReport again = simulate_attack(result.hamiltonian, h_true, 1, 2, 5);
  REQUIRE(again.sequences.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(cut.sequences[i].indices == again.sequences[i].indices);
    CHECK(cut.sequences[i].distance == again.sequences[i].distance);
  }

  const AttackReport none = simulate_attack(result.hamiltonian, h_true, 1, 0, 0);
  CHECK(none.truncated);
  CHECK(none.sequences.empty());
  CHECK_FALSE(none.best.has_value());
}

TEST_CASE("simulate_attack: depth 2 enumerates level pools exhaustively") {
  const AreProblem p = testutil::real_rich_instance(6, 21);
  const PerturbResult result = disguise_real(p, 2, 14);
  const HamiltonianMatrix h_true = build_hamiltonian(p);
  const std::size_t r = negative_real_eigenpairs(result.hamiltonian).size();
  REQUIRE(r >= 2);

  const AttackReport report =
      simulate_attack(result.hamiltonian, h_true, 2, 100000, 0);
  CHECK(report.total_sequences ==
        index_sequence_count(r, 2));
  CHECK(report.sequences.size() ==
        static_cast<std::size_t>(r * (r - 1)));
  for (const AttackSequence& s : report.sequences)
    CHECK(s.indices.size() == 2);
  REQUIRE(report.best.has_value());
}
