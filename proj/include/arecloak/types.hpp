#pragma once

#include <complex>
#include <string>

#include <Eigen/Core>

namespace arecloak {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

bool is_finite(const Matrix& m);

// Throws InvalidInput if m contains NaN or Inf.
void require_finite(const Matrix& m, const std::string& name);

// Largest |m - m'| entry relative to max(1, |m|_inf).
double relative_asymmetry(const Matrix& m);

inline Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// J = [0 I; -I 0], the 2n x 2n symplectic form.
Matrix symplectic_form(Index n);

}  // namespace arecloak
