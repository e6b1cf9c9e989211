#include "arecloak/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <lapacke.h>

#include "arecloak/errors.hpp"

namespace arecloak {

bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const std::string& name) {
  if (!m.allFinite()) throw InvalidInput(name + " contains NaN or Inf");
}

double relative_asymmetry(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Matrix symplectic_form(Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

double eig_residual_tol(Index order) {
  return 1e3 * std::numeric_limits<double>::epsilon() *
         static_cast<double>(std::max<Index>(order, 1));
}

std::vector<EigenPair> eig_all(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("eig_all: matrix not square");
  require_finite(m, "eig_all input");
  const Index n = m.rows();
  if (n == 0) return {};

  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen decomposition failed to converge");

  const double scale = std::max(1.0, m.norm());
  const double tol = eig_residual_tol(n) * scale;

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    EigenPair p;
    p.value = solver.eigenvalues()(i);
    p.vector = solver.eigenvectors().col(i);
    p.vector.normalize();
    p.is_real = std::abs(p.value.imag()) <=
                kRealClassifyTol * (1.0 + std::abs(p.value));
    const double residual = (m.cast<Complex>() * p.vector - p.value * p.vector).norm();
    if (residual > tol)
      throw NumericError("eigenpair residual " + std::to_string(residual) +
                         " exceeds tolerance " + std::to_string(tol));
    pairs.push_back(std::move(p));
  }
  return pairs;
}

Vector real_eigenvector(const EigenPair& pair) {
  if (!pair.is_real)
    throw InvalidInput("real_eigenvector: eigenvalue not classified real");
  Index imax = 0;
  pair.vector.cwiseAbs().maxCoeff(&imax);
  const Complex pivot = pair.vector(imax);
  if (std::abs(pivot) == 0.0)
    throw NumericError("real_eigenvector: zero eigenvector");
  ComplexVector rotated = pair.vector * (std::abs(pivot) / pivot);
  const double imag_norm = rotated.imag().norm();
  if (imag_norm > 1e-8 * rotated.norm())
    throw NumericError("real_eigenvector: residual imaginary part " +
                       std::to_string(imag_norm));
  Vector v = rotated.real();
  v.normalize();
  Index vmax = 0;
  v.cwiseAbs().maxCoeff(&vmax);
  if (v(vmax) < 0.0) v = -v;
  return v;
}

namespace {

lapack_logical select_stable(const double* re, const double* /*im*/) {
  return *re < 0.0 ? 1 : 0;
}

}  // namespace

SchurDecomposition ordered_stable_schur(const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidInput("ordered_stable_schur: matrix not square");
  require_finite(m, "ordered_stable_schur input");
  const lapack_int n = static_cast<lapack_int>(m.rows());

  Matrix t = m;  // overwritten with the quasi-triangular factor
  Matrix u(n, n);
  Vector wr(n), wi(n);
  lapack_int sdim = 0;

  const lapack_int info = LAPACKE_dgees(
      LAPACK_COL_MAJOR, 'V', 'S', select_stable, n, t.data(), n, &sdim,
      wr.data(), wi.data(), u.data(), n);
  if (info < 0)
    throw InvalidInput("ordered_stable_schur: illegal argument " +
                       std::to_string(-info));
  if (info > 0)
    throw NumericError(
        info <= n ? "ordered_stable_schur: QR iteration failed to converge"
                  : "ordered_stable_schur: eigenvalue reordering unreliable");

  const double scale = std::max(1.0, m.norm());
  const double tol = eig_residual_tol(m.rows()) * scale;
  if ((u * u.transpose() - Matrix::Identity(n, n)).norm() > tol)
    throw NumericError("ordered_stable_schur: factor lost orthogonality");
  if ((u.transpose() * m * u - t).norm() > tol)
    throw NumericError("ordered_stable_schur: factorization residual too large");

  return SchurDecomposition{std::move(u), std::move(t), sdim};
}

Matrix kernel_basis(const Matrix& m, double rank_tol) {
  require_finite(m, "kernel_basis input");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Index n = m.cols();
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cut = rank_tol * std::max(1.0, smax);
  Index rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

SymmetricEig sym_eig_extremes(const Matrix& s, double zero_tol) {
  if (s.rows() != s.cols())
    throw InvalidInput("sym_eig_extremes: matrix not square");
  require_finite(s, "sym_eig_extremes input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(s));
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric eigen decomposition failed");

  SymmetricEig out;
  out.values = solver.eigenvalues();
  out.min_value = out.values(0);
  out.max_value = out.values(out.values.size() - 1);
  const double cut =
      zero_tol * std::max(1.0, out.values.cwiseAbs().maxCoeff());
  for (Index i = 0; i < out.values.size(); ++i) {
    const double w = out.values(i);
    if (std::abs(w) > cut) ++out.rank;
    if (w > cut && !out.min_positive) out.min_positive = w;
  }
  return out;
}

double spectral_abscissa(const Matrix& m) {
  if (m.rows() != m.cols())
    throw InvalidInput("spectral_abscissa: matrix not square");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigen decomposition failed to converge");
  return solver.eigenvalues().real().maxCoeff();
}

double match_spectra(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size())
    throw InvalidInput("match_spectra: size mismatch");
  double worst = 0.0;
  while (!a.empty()) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = std::abs(a[i] - b[j]);
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    worst = std::max(worst, best);
    a.erase(a.begin() + static_cast<std::ptrdiff_t>(bi));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return worst;
}

}  // namespace arecloak
