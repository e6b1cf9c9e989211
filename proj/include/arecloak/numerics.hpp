#pragma once

#include <optional>
#include <vector>

#include "arecloak/types.hpp"

namespace arecloak {

// |Im(lambda)| <= kRealClassifyTol * (1 + |lambda|) classifies an eigenvalue
// as real.
inline constexpr double kRealClassifyTol = 1e-9;

// Eigenvalues within kAxisTol * max(1, |spectrum|_max) of the imaginary axis
// are treated as lying on it.
inline constexpr double kAxisTol = 1e-9;

// Relative threshold below which a symmetric eigenvalue counts as zero.
inline constexpr double kZeroEigTol = 1e-10;

struct EigenPair {
  Complex value;
  ComplexVector vector;  // unit 2-norm
  bool is_real = false;
};

// Residual tolerance used to validate computed eigenpairs, relative to the
// Frobenius norm of the matrix.
double eig_residual_tol(Index order);

// All right eigenpairs of a real square matrix, each validated against
// |M v - lambda v| <= eig_residual_tol(n) * max(1, |M|_F). Order follows the
// backend; no sorting is applied.
std::vector<EigenPair> eig_all(const Matrix& m);

// Extracts the real representative of an eigenvector whose eigenvalue is
// classified real: rotates the phase away, checks the leftover imaginary
// part, normalizes to unit norm with the largest-magnitude entry positive.
Vector real_eigenvector(const EigenPair& pair);

struct SchurDecomposition {
  Matrix orthogonal;         // U
  Matrix quasi_triangular;   // T = U' M U
  Index stable_count;        // eigenvalues with Re < 0, ordered first in T
};

// Real Schur form with the open-left-half-plane eigenvalues ordered to the
// leading block.
SchurDecomposition ordered_stable_schur(const Matrix& m);

// Orthonormal basis of ker(M): columns of V for singular values
// <= rank_tol * max(1, sigma_max). Zero columns for a trivial kernel.
Matrix kernel_basis(const Matrix& m, double rank_tol = 1e-10);

struct SymmetricEig {
  Vector values;  // ascending
  double min_value = 0.0;
  double max_value = 0.0;
  std::optional<double> min_positive;  // smallest eigenvalue above the zero cut
  Index rank = 0;
};

// Eigen-decomposition summary of the symmetric part of s.
SymmetricEig sym_eig_extremes(const Matrix& s, double zero_tol = kZeroEigTol);

// max Re(lambda) over the spectrum.
double spectral_abscissa(const Matrix& m);

// Bottleneck distance under a greedy one-to-one matching of two equal-size
// multisets of complex numbers. Used to compare computed spectra against
// predicted ones.
double match_spectra(std::vector<Complex> a, std::vector<Complex> b);

}  // namespace arecloak
