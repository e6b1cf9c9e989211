#pragma once

#include <cmath>
#include <cstdint>

#include "arecloak/are.hpp"
#include "arecloak/lqr.hpp"
#include "arecloak/rng.hpp"
#include "arecloak/types.hpp"

namespace testutil {

using namespace arecloak;

// Worked scalar instance (A, Q, D) = (1, 1, 1): every quantity below follows
// from lambda = -sqrt(2) and the eigenvector direction (1, 1 + sqrt(2)).
struct ScalarChain {
  double sqrt2 = std::sqrt(2.0);
  double p_star = 1.0 + sqrt2;            // stabilizing solution
  double lambda = -sqrt2;                 // stable Hamiltonian eigenvalue
  double vu = 1.0 / std::sqrt(1.0 + (1.0 + sqrt2) * (1.0 + sqrt2));
  double vl = (1.0 + sqrt2) * vu;
  // p = (J + I) v and q = J v for v = (vu, vl).
  double pu = vu + vl;
  double pl = vl - vu;
  double qu = vl;
  double ql = -vu;
  // Coefficient directions D -> D + delta F, Q -> Q + delta G.
  double f = vu * vu - 2.0 * vu * vl;
  double g = -vl * vl - 2.0 * vu * vl;
  // A -> A + delta (vu pu - qu qu).
  double a_dir = vu * pu - qu * qu;

  double a_tilde(double delta) const { return 1.0 + delta * a_dir; }
  double q_tilde(double delta) const { return 1.0 + delta * g; }
  double d_tilde(double delta) const { return 1.0 + delta * f; }
};

inline AreProblem scalar_problem() {
  Matrix one = Matrix::Constant(1, 1, 1.0);
  return AreProblem(one, one, one);
}

// 2-state instance whose Hamiltonian spectrum is a single complex quadruple.
inline AreProblem rotating_problem() {
  Matrix a(2, 2);
  a << 0.3, 2.0, -2.0, 0.3;
  return AreProblem(a, Matrix::Identity(2, 2), Matrix::Identity(2, 2));
}

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  return m;
}

inline Matrix random_psd(Index n, Index rank, Rng& rng) {
  Matrix r = random_matrix(n, rank, rng);
  return symmetrized(r * r.transpose());
}

inline Vector random_unit(Index n, Rng& rng) {
  Vector v(n);
  double norm = 0.0;
  while (norm < 1e-8) {
    for (Index i = 0; i < n; ++i) v(i) = rng.gaussian();
    norm = v.norm();
  }
  return v / norm;
}

// Benchmark instance tuned so the Hamiltonian has negative real eigenvalues.
inline AreProblem real_rich_instance(Index n, std::uint64_t seed) {
  BenchmarkSpec spec;
  spec.state_dim = n;
  spec.input_dim = std::max<Index>(1, n / 3);
  spec.output_dim = std::max<Index>(1, n / 3);
  spec.seed = seed;
  spec.real_fraction = 1.0;
  spec.unstable_fraction = 0.5;
  return lqr_to_are(generate_benchmark(spec));
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace testutil
