#pragma once

#include <optional>
#include <vector>

#include "arecloak/numerics.hpp"
#include "arecloak/types.hpp"

namespace arecloak {

// Relative Frobenius tolerance on |(JH)' - JH| for a matrix to count as
// Hamiltonian.
inline constexpr double kStructureTol = 1e-10;

// Relative asymmetry accepted in Q and D before symmetrizing.
inline constexpr double kSymmetryTol = 1e-8;

// Coefficients of A'X + XA + Q - XDX = 0. Q and D are stored symmetrized;
// definiteness is not required here, only symmetry.
class AreProblem {
 public:
  AreProblem(Matrix a, Matrix q, Matrix d);

  const Matrix& a() const { return a_; }
  const Matrix& q() const { return q_; }
  const Matrix& d() const { return d_; }
  Index order() const { return a_.rows(); }

 private:
  Matrix a_, q_, d_;
};

// A 2n x 2n matrix H with JH symmetric, J the symplectic form.
class HamiltonianMatrix {
 public:
  explicit HamiltonianMatrix(Matrix h);

  const Matrix& matrix() const { return h_; }
  Index half_order() const { return h_.rows() / 2; }

 private:
  Matrix h_;
};

// |JH - (JH)'|_F / max(1, |H|_F).
double hamiltonian_structure_defect(const Matrix& h);

// H = [A, -D; -Q, -A'].
HamiltonianMatrix build_hamiltonian(const AreProblem& p);

// Inverse of build_hamiltonian, symmetrizing the off-diagonal blocks.
AreProblem split_hamiltonian(const HamiltonianMatrix& h);

struct StabilizingSolution {
  Matrix p;                                  // symmetric
  std::vector<Complex> closed_loop_spectrum; // eigenvalues of A - D P
  double residual;                           // |A'P + PA + Q - PDP|_F
};

// Stabilizing solution from the stable invariant subspace of the Hamiltonian:
// with [V11; V21] spanning it, P = V21 V11^{-1}. Throws AssumptionViolation
// when the stable eigenvalue count is not n (imaginary-axis spectrum),
// NumericError when V11 is numerically singular or the residual check fails.
StabilizingSolution solve_stabilizing(const AreProblem& p);

double are_residual(const AreProblem& p, const Matrix& x);

Matrix closed_loop(const AreProblem& p, const Matrix& x);

struct SolvabilityReport {
  bool stabilizable = false;
  bool detectable = false;
  // min over tested eigenvalues of sigma_min/sigma_max of the test pencil;
  // empty when no eigenvalue needed testing (A already stable).
  std::optional<double> stabilizability_margin;
  std::optional<double> detectability_margin;
};

// Eigenvector tests on the closed right half plane: for every eigenvalue of A
// with Re >= 0, [A - lambda I, D] and [A' - conj(lambda) I, Q] must have full
// row rank. Rank via SVD with threshold rank_tol * sigma_max.
SolvabilityReport check_solvability(const AreProblem& p,
                                    double rank_tol = 1e-9);

}  // namespace arecloak
