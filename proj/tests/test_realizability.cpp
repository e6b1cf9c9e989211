#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <vector>

#include "arecloak/are.hpp"
#include "arecloak/errors.hpp"
#include "arecloak/realizability.hpp"
#include "arecloak/rng.hpp"
#include "arecloak/shift.hpp"
#include "helpers.hpp"

using namespace arecloak;
using testutil::rel_diff;

TEST_CASE("coefficient_directions reproduces the scalar chain F and G") {
  const testutil::ScalarChain oracle;
  Vector v(2);
  v << oracle.vu, oracle.vl;
  const CoefficientDirections dirs = coefficient_directions(v);

  REQUIRE(dirs.d_direction.rows() == 1);
  CHECK(dirs.d_direction(0, 0) == doctest::Approx(oracle.f).epsilon(1e-12));
  CHECK(dirs.q_direction(0, 0) == doctest::Approx(oracle.g).epsilon(1e-12));
  CHECK(dirs.d_direction(0, 0) == doctest::Approx(-0.56066).epsilon(1e-4));
  CHECK(dirs.q_direction(0, 0) == doctest::Approx(-1.56066).epsilon(1e-4));

  CHECK(dirs.v_upper(0) == doctest::Approx(oracle.vu));
  CHECK(dirs.v_lower(0) == doctest::Approx(oracle.vl));
  CHECK(dirs.p_upper(0) == doctest::Approx(oracle.pu));
  CHECK(dirs.p_lower(0) == doctest::Approx(oracle.pl));
  CHECK(dirs.q_upper(0) == doctest::Approx(oracle.qu));
  CHECK(dirs.q_lower(0) == doctest::Approx(oracle.ql));
}

TEST_CASE("coefficient_directions matches the blockwise shift of real_shift") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(5));
    const Vector v = testutil::random_unit(2 * n, rng);
    const CoefficientDirections dirs = coefficient_directions(v);
    const DualVectors d = real_dual_vectors(v);

    // The rank-two Hamiltonian update, split into its blocks.
    const Matrix update = v * d.p.transpose() - d.q * d.q.transpose();
    const Matrix f = -update.topRightCorner(n, n);
    const Matrix g = -update.bottomLeftCorner(n, n);
    CHECK((dirs.d_direction - f).norm() < 1e-12);
    CHECK((dirs.q_direction - g).norm() < 1e-12);
    CHECK((dirs.d_direction - dirs.d_direction.transpose()).norm() < 1e-12);
    CHECK((dirs.q_direction - dirs.q_direction.transpose()).norm() < 1e-12);
  }
  CHECK_THROWS_AS(coefficient_directions(Vector::Ones(3)), InvalidInput);
}

TEST_CASE("definiteness_by_scalars: worked scalar values") {
  const testutil::ScalarChain oracle;
  Vector v(2);
  v << oracle.vu, oracle.vl;
  const CoefficientDirections dirs = coefficient_directions(v);

  // Scalars of the F test, frozen from the worked chain.
  const double alpha_uu = dirs.q_upper.dot(dirs.q_upper);
  const double beta_uu = dirs.v_upper.dot(dirs.q_upper);
  const double gamma = dirs.q_upper.dot(dirs.p_lower);
  const double alpha_ul = dirs.q_upper.dot(dirs.q_lower);
  const double beta_ul = dirs.v_upper.dot(dirs.q_lower);
  const double delta = dirs.v_upper.dot(dirs.p_lower);
  CHECK(alpha_uu == doctest::Approx(0.85355).epsilon(1e-4));
  CHECK(beta_uu == doctest::Approx(0.35355).epsilon(1e-4));
  CHECK(gamma == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(alpha_ul == doctest::Approx(-0.35355).epsilon(1e-4));
  CHECK(beta_ul == doctest::Approx(-0.14645).epsilon(1e-4));
  CHECK(delta == doctest::Approx(0.20711).epsilon(1e-4));
  CHECK(std::abs(alpha_ul * delta - gamma * beta_ul) < 1e-12);
  CHECK(alpha_uu * alpha_ul - beta_uu * gamma ==
        doctest::Approx(-0.47855).epsilon(1e-4));

  const DirectionVerdicts verdicts = definiteness_by_scalars(dirs);
  CHECK(verdicts.d_direction == SignVerdict::negative_semidefinite);
  CHECK(verdicts.q_direction == SignVerdict::negative_semidefinite);
}

TEST_CASE("definiteness_by_scalars: vanishing-block edge cases") {
  // v concentrated in the lower block: F = 0 (psd), G = -v_l v_l' (nsd).
  Vector lower = Vector::Zero(4);
  lower(2) = 1.0;
  const CoefficientDirections dl = coefficient_directions(lower);
  CHECK(dl.d_direction.norm() == 0.0);
  const DirectionVerdicts vl = definiteness_by_scalars(dl);
  CHECK(vl.d_direction == SignVerdict::positive_semidefinite);
  CHECK(vl.q_direction == SignVerdict::negative_semidefinite);

  // v concentrated in the upper block: F = v_u v_u' (psd), G = 0 (psd).
  Vector upper = Vector::Zero(4);
  upper(1) = 1.0;
  const CoefficientDirections du = coefficient_directions(upper);
  CHECK(du.q_direction.norm() == 0.0);
  const DirectionVerdicts vu = definiteness_by_scalars(du);
  CHECK(vu.d_direction == SignVerdict::positive_semidefinite);
  CHECK(vu.q_direction == SignVerdict::positive_semidefinite);
}

TEST_CASE("definiteness_by_scalars never certifies falsely") {
  Rng rng(23);
  int fired = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.index(8));
    const Vector v = testutil::random_unit(2 * n, rng);
    const CoefficientDirections dirs = coefficient_directions(v);
    const DirectionVerdicts verdicts = definiteness_by_scalars(dirs);

    const auto check_one = [&](SignVerdict verdict, const Matrix& m) {
      if (verdict == SignVerdict::unknown) return;
      ++fired;
      const SymmetricEig e = sym_eig_extremes(m);
      const double scale = std::max(
          {1.0, std::abs(e.min_value), std::abs(e.max_value)});
      if (verdict == SignVerdict::positive_semidefinite)
        CHECK(e.min_value >= -1e-10 * scale);
      else
        CHECK(e.max_value <= 1e-10 * scale);
    };
    check_one(verdicts.d_direction, dirs.d_direction);
    check_one(verdicts.q_direction, dirs.q_direction);
  }
  CHECK(fired > 0);
}

TEST_CASE("psd_preserving_interval: frozen diagonal cases") {
  Matrix t = Matrix::Zero(3, 3);
  t.diagonal() << 2.0, -1.0, 0.0;
  const auto w = psd_preserving_interval(Matrix::Identity(3, 3), t);
  REQUIRE(w.has_value());
  REQUIRE(w->lower.has_value());
  REQUIRE(w->upper.has_value());
  CHECK(*w->lower == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(*w->upper == doctest::Approx(1.0).epsilon(1e-12));

  // Window endpoints still give a psd matrix.
  for (const double delta : {*w->lower, *w->upper, 0.0}) {
    const SymmetricEig e = sym_eig_extremes(Matrix::Identity(3, 3) + delta * t);
    CHECK(e.min_value >= -1e-12);
  }

  // Kernel leak: ker(S) not inside ker(T).
  Matrix s2 = Matrix::Zero(2, 2);
  s2(0, 0) = 1.0;
  CHECK_FALSE(psd_preserving_interval(s2, Matrix::Identity(2, 2)).has_value());

  // T = 0 and S = 0 both give the full line.
  const auto full = psd_preserving_interval(s2, Matrix::Zero(2, 2));
  REQUIRE(full.has_value());
  CHECK_FALSE(full->lower.has_value());
  CHECK_FALSE(full->upper.has_value());
  const auto zero_s = psd_preserving_interval(Matrix::Zero(2, 2), Matrix::Zero(2, 2));
  REQUIRE(zero_s.has_value());

  // One-sided window: T nsd on the range of S.
  Matrix t3 = Matrix::Zero(2, 2);
  t3(0, 0) = -3.0;
  const auto half = psd_preserving_interval(s2, t3);
  REQUIRE(half.has_value());
  CHECK_FALSE(half->lower.has_value());
  REQUIRE(half->upper.has_value());
  CHECK(*half->upper == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK_THROWS_AS(psd_preserving_interval(-Matrix::Identity(2, 2), t3),
                  InvalidInput);
}

TEST_CASE("psd_preserving_interval is sound on random instances") {
  Rng rng(31);
  int windows = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.index(5));
    const Index rank = 1 + static_cast<Index>(rng.index(n));
    const Matrix s = testutil::random_psd(n, rank, rng);

    // Push T into the range of S so the kernel inclusion holds.
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Matrix range =
        es.eigenvectors().rightCols(std::min<Index>(rank, n));
    const Matrix w0 = testutil::random_matrix(range.cols(), range.cols(), rng);
    const Matrix t = symmetrized(range * (w0 + w0.transpose()) * range.transpose());

    const auto window = psd_preserving_interval(s, t);
    REQUIRE(window.has_value());
    ++windows;
    std::vector<double> samples;
    if (window->lower) samples.push_back(*window->lower);
    if (window->upper) samples.push_back(*window->upper);
    if (window->lower && window->upper)
      samples.push_back(0.5 * (*window->lower + *window->upper));
    for (const double delta : samples) {
      const SymmetricEig e = sym_eig_extremes(s + delta * t);
      CHECK(e.min_value >=
            -1e-8 * std::max(1.0, std::abs(e.max_value)));
    }
  }
  CHECK(windows > 0);
}

TEST_CASE("find_realizable_shift: scalar instance always lands negative") {
  const AreProblem p = testutil::scalar_problem();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RealizableShift shift = find_realizable_shift(p, seed);
    CHECK(shift.branch == WindowBranch::both_nsd);
    CHECK(shift.record.delta < 0.0);
    CHECK(shift.record.delta >= shift.sampled_lower);
    CHECK(shift.record.delta <= shift.sampled_upper);
    CHECK(shift.modified.q()(0, 0) > 1.0);  // Q grows along -G
    CHECK(shift.modified.d()(0, 0) > 1.0);

    const double base = solve_stabilizing(p).p(0, 0);
    const double after = solve_stabilizing(shift.modified).p(0, 0);
    CHECK(std::abs(after - base) <= 1e-10 * base);
  }
}

TEST_CASE("find_realizable_shift keeps Q and D psd on random instances") {
  int successes = 0;
  for (std::uint64_t seed = 1; seed <= 24 && successes < 10; ++seed) {
    BenchmarkSpec spec;
    spec.state_dim = 2 + static_cast<Index>(seed % 5);
    spec.input_dim = 1;
    spec.output_dim = 1;
    spec.seed = seed;
    spec.real_fraction = 1.0;
    spec.unstable_fraction = 0.5;
    AreProblem p = lqr_to_are(generate_benchmark(spec));
    if (seed % 2 == 0) {
      const Index n = p.order();
      p = AreProblem(p.a(), p.q() + 0.05 * Matrix::Identity(n, n),
                     p.d() + 0.05 * Matrix::Identity(n, n));
    }

    std::optional<RealizableShift> shift;
    try {
      shift = find_realizable_shift(p, seed * 1000 + 1);
    } catch (const NoAdmissibleShift&) {
      continue;
    }
    ++successes;

    const SymmetricEig qe = sym_eig_extremes(shift->modified.q());
    const SymmetricEig de = sym_eig_extremes(shift->modified.d());
    CHECK(qe.min_value >= -1e-8 * std::max(1.0, std::abs(qe.max_value)));
    CHECK(de.min_value >= -1e-8 * std::max(1.0, std::abs(de.max_value)));

    CHECK(rel_diff(shift->modified.a(), p.a()) > 1e-12);
    CHECK(rel_diff(shift->modified.q(), p.q()) > 1e-12);
    CHECK(rel_diff(shift->modified.d(), p.d()) > 1e-12);

    CHECK(rel_diff(solve_stabilizing(shift->modified).p,
                   solve_stabilizing(p).p) <= 1e-8);
  }
  CHECK(successes >= 5);
}

TEST_CASE("find_realizable_shift rejects indefinite coefficients") {
  const Matrix one = Matrix::Constant(1, 1, 1.0);
  const Matrix neg = Matrix::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(find_realizable_shift(AreProblem(one, neg, one), 0),
                  AssumptionViolation);
  CHECK_THROWS_AS(find_realizable_shift(AreProblem(one, one, neg), 0),
                  AssumptionViolation);
}

TEST_CASE("find_realizable_shift: exhaustion raises NoAdmissibleShift") {
  // Rank-one D with a kernel the directions leak into, scalars silent:
  // every candidate runs out of windows.
  Matrix a = Matrix::Zero(2, 2);
  a << 1.0, 0.4, 0.0, 2.0;
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  const AreProblem p(a, Matrix::Identity(2, 2), d);
  REQUIRE_FALSE(negative_real_eigenpairs(build_hamiltonian(p)).empty());
  CHECK_THROWS_AS(find_realizable_shift(p, 3), NoAdmissibleShift);
}
