#include "arecloak/are.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "arecloak/errors.hpp"

namespace arecloak {

AreProblem::AreProblem(Matrix a, Matrix q, Matrix d)
    : a_(std::move(a)), q_(std::move(q)), d_(std::move(d)) {
  const Index n = a_.rows();
  if (n == 0 || a_.cols() != n)
    throw InvalidInput("state matrix must be square and nonempty");
  if (q_.rows() != n || q_.cols() != n || d_.rows() != n || d_.cols() != n)
    throw InvalidInput("coefficient dimensions disagree with state matrix");
  require_finite(a_, "A");
  require_finite(q_, "Q");
  require_finite(d_, "D");
  if (relative_asymmetry(q_) > kSymmetryTol)
    throw InvalidInput("Q is not symmetric");
  if (relative_asymmetry(d_) > kSymmetryTol)
    throw InvalidInput("D is not symmetric");
  q_ = symmetrized(q_);
  d_ = symmetrized(d_);
}

HamiltonianMatrix::HamiltonianMatrix(Matrix h) : h_(std::move(h)) {
  if (h_.rows() != h_.cols() || h_.rows() == 0 || h_.rows() % 2 != 0)
    throw InvalidInput("Hamiltonian matrix must be square of even order");
  require_finite(h_, "H");
  const double defect = hamiltonian_structure_defect(h_);
  if (defect > kStructureTol)
    throw InvalidInput("matrix violates Hamiltonian structure, defect " +
                       std::to_string(defect));
}

double hamiltonian_structure_defect(const Matrix& h) {
  const Index n = h.rows() / 2;
  const Matrix jh = symplectic_form(n) * h;
  return (jh - jh.transpose()).norm() / std::max(1.0, h.norm());
}

HamiltonianMatrix build_hamiltonian(const AreProblem& p) {
  const Index n = p.order();
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = p.a();
  h.topRightCorner(n, n) = -p.d();
  h.bottomLeftCorner(n, n) = -p.q();
  h.bottomRightCorner(n, n) = -p.a().transpose();
  return HamiltonianMatrix(std::move(h));
}

AreProblem split_hamiltonian(const HamiltonianMatrix& h) {
  const Index n = h.half_order();
  const Matrix& m = h.matrix();
  return AreProblem(m.topLeftCorner(n, n),
                    symmetrized(-m.bottomLeftCorner(n, n)),
                    symmetrized(-m.topRightCorner(n, n)));
}

double are_residual(const AreProblem& p, const Matrix& x) {
  return (p.a().transpose() * x + x * p.a() + p.q() - x * p.d() * x).norm();
}

Matrix closed_loop(const AreProblem& p, const Matrix& x) {
  return p.a() - p.d() * x;
}

StabilizingSolution solve_stabilizing(const AreProblem& p) {
  const Index n = p.order();
  const HamiltonianMatrix h = build_hamiltonian(p);
  const SchurDecomposition schur = ordered_stable_schur(h.matrix());
  if (schur.stable_count != n)
    throw AssumptionViolation(
        "Hamiltonian spectrum is not split n/n about the imaginary axis "
        "(stable count " + std::to_string(schur.stable_count) + " of " +
        std::to_string(2 * n) + ")");

  const Matrix v11 = schur.orthogonal.topLeftCorner(n, n);
  const Matrix v21 = schur.orthogonal.bottomLeftCorner(n, n);

  Eigen::JacobiSVD<Matrix> svd(v11);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  if (!(smin > 1e-12 * std::max(1.0, smax)))
    throw NumericError("stable subspace has no graph form, V11 is singular");

  // P = V21 V11^{-1}, computed as the solution of V11' P' = V21'.
  Matrix x = v11.transpose().partialPivLu().solve(v21.transpose());
  x = symmetrized(x);

  StabilizingSolution out;
  out.p = std::move(x);
  out.residual = are_residual(p, out.p);
  const double bound =
      1e-8 * (1.0 + out.p.squaredNorm()) *
      std::max(1.0, std::max(p.a().norm(), std::max(p.q().norm(), p.d().norm())));
  if (!(out.residual <= bound))
    throw NumericError("solution residual " + std::to_string(out.residual) +
                       " exceeds bound " + std::to_string(bound));

  const Matrix acl = closed_loop(p, out.p);
  Eigen::EigenSolver<Matrix> es(acl, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("closed-loop eigenvalue computation failed");
  for (Index i = 0; i < n; ++i)
    out.closed_loop_spectrum.push_back(es.eigenvalues()(i));
  if (es.eigenvalues().real().maxCoeff() >= 0.0)
    throw NumericError("computed solution is not stabilizing");
  return out;
}

namespace {

// sigma_min / sigma_max of [A - lambda I, W]; full row rank iff the ratio
// clears rank_tol.
double pencil_margin(const Matrix& a, const Matrix& w, Complex lambda) {
  const Index n = a.rows();
  ComplexMatrix pencil(n, 2 * n);
  pencil.leftCols(n) = a.cast<Complex>();
  pencil.leftCols(n).diagonal().array() -= lambda;
  pencil.rightCols(n) = w.cast<Complex>();
  Eigen::JacobiSVD<ComplexMatrix> svd(pencil);
  const double smax = svd.singularValues()(0);
  if (smax == 0.0) return 0.0;
  return svd.singularValues()(n - 1) / smax;
}

}  // namespace

SolvabilityReport check_solvability(const AreProblem& p, double rank_tol) {
  SolvabilityReport report;
  report.stabilizable = true;
  report.detectable = true;

  Eigen::EigenSolver<Matrix> es(p.a(), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("eigenvalue computation failed");

  for (Index i = 0; i < p.order(); ++i) {
    const Complex lambda = es.eigenvalues()(i);
    if (lambda.real() < 0.0) continue;

    const double ms = pencil_margin(p.a(), p.d(), lambda);
    report.stabilizability_margin =
        std::min(report.stabilizability_margin.value_or(ms), ms);
    if (ms <= rank_tol) report.stabilizable = false;

    const double md =
        pencil_margin(p.a().transpose(), p.q(), std::conj(lambda));
    report.detectability_margin =
        std::min(report.detectability_margin.value_or(md), md);
    if (md <= rank_tol) report.detectable = false;
  }
  return report;
}

}  // namespace arecloak
