#include "arecloak/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "arecloak/errors.hpp"
#include "arecloak/rng.hpp"

namespace arecloak {

namespace {

std::vector<RealEigenPair> negative_reals_from(
    const std::vector<EigenPair>& pairs) {
  std::vector<RealEigenPair> out;
  for (const EigenPair& p : pairs) {
    if (!p.is_real || p.value.real() >= 0.0) continue;
    out.push_back({p.value.real(), real_eigenvector(p)});
  }
  std::sort(out.begin(), out.end(),
            [](const RealEigenPair& a, const RealEigenPair& b) {
              return a.value < b.value;
            });
  return out;
}

std::vector<ComplexQuadruple> quadruples_from(
    const std::vector<EigenPair>& pairs) {
  std::vector<ComplexQuadruple> out;
  for (const EigenPair& p : pairs) {
    if (p.is_real) continue;
    if (p.value.real() <= 0.0 || p.value.imag() <= 0.0) continue;
    const double tol = 1e-8 * (1.0 + std::abs(p.value));
    const EigenPair* partner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const EigenPair& q : pairs) {
      const double d = std::abs(q.value + p.value);
      if (d < best) {
        best = d;
        partner = &q;
      }
    }
    if (partner == nullptr || best > tol || partner->is_real) continue;
    out.push_back({p, *partner});
  }
  std::sort(out.begin(), out.end(),
            [](const ComplexQuadruple& a, const ComplexQuadruple& b) {
              if (a.plus.value.real() != b.plus.value.real())
                return a.plus.value.real() < b.plus.value.real();
              return a.plus.value.imag() < b.plus.value.imag();
            });
  return out;
}

void require_unit(const Vector& v) {
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw InvalidInput("eigenvector must have unit norm");
}

void require_eigenpair(const Matrix& h, Complex lambda,
                       const ComplexVector& v, const std::string& what) {
  const double tol = eig_residual_tol(h.rows()) * std::max(1.0, h.norm());
  const double residual = (h.cast<Complex>() * v - lambda * v).norm();
  if (residual > tol)
    throw InvalidInput(what + ": not an eigenpair of the given matrix, "
                       "residual " + std::to_string(residual));
}

}  // namespace

std::vector<RealEigenPair> negative_real_eigenpairs(
    const HamiltonianMatrix& h) {
  return negative_reals_from(eig_all(h.matrix()));
}

std::vector<ComplexQuadruple> complex_quadruples(const HamiltonianMatrix& h) {
  return quadruples_from(eig_all(h.matrix()));
}

DualVectors real_dual_vectors(const Vector& v) {
  if (v.size() % 2 != 0) throw InvalidInput("vector length must be even");
  require_unit(v);
  const Index n = v.size() / 2;
  DualVectors d;
  d.q = Vector(v.size());
  d.q.head(n) = v.tail(n);
  d.q.tail(n) = -v.head(n);
  d.p = d.q + v;
  return d;
}

HamiltonianMatrix real_shift(const HamiltonianMatrix& h, double lambda,
                             const Vector& v, double delta) {
  if (v.size() != h.matrix().rows())
    throw InvalidInput("eigenvector length does not match matrix order");
  if (!std::isfinite(delta)) throw InvalidInput("shift size must be finite");
  require_eigenpair(h.matrix(), Complex(lambda, 0.0), v.cast<Complex>(),
                    "real_shift");
  const DualVectors d = real_dual_vectors(v);

  Matrix shifted = h.matrix();
  shifted.noalias() += delta * (v * d.p.transpose() - d.q * d.q.transpose());

  const double tol =
      eig_residual_tol(shifted.rows()) * std::max(1.0, shifted.norm());
  const double post = (shifted * v - (lambda + delta) * v).norm();
  if (post > tol)
    throw NumericError("shifted eigenpair residual " + std::to_string(post) +
                       " exceeds tolerance");
  return HamiltonianMatrix(std::move(shifted));
}

HamiltonianMatrix complex_shift(const HamiltonianMatrix& h,
                                const EigenPair& plus, const EigenPair& minus,
                                double delta) {
  const Matrix& hm = h.matrix();
  const Complex mu = plus.value;
  if (plus.vector.size() != hm.rows() || minus.vector.size() != hm.rows())
    throw InvalidInput("eigenvector length does not match matrix order");
  if (!std::isfinite(delta)) throw InvalidInput("shift size must be finite");
  if (mu.real() <= 0.0 || mu.imag() <= 0.0)
    throw InvalidInput(
        "complex_shift expects the Re > 0, Im > 0 quadruple representative");
  if (std::abs(mu.imag()) <= kRealClassifyTol * (1.0 + std::abs(mu)))
    throw AssumptionViolation("eigenvalue is numerically real, use real_shift");
  if (std::abs(minus.value + mu) > 1e-8 * (1.0 + std::abs(mu)))
    throw InvalidInput("second eigenpair is not at -mu");
  if (delta <= -mu.real())
    throw AssumptionViolation(
        "shift would push the quadruple across the imaginary axis");
  require_eigenpair(hm, mu, plus.vector, "complex_shift");
  require_eigenpair(hm, minus.value, minus.vector, "complex_shift");

  const ComplexMatrix j = symplectic_form(h.half_order()).cast<Complex>();
  const ComplexVector jv = j * plus.vector;
  const ComplexVector jvm = j * minus.vector;
  // v' J v_minus without conjugation; Eigen's dot() would conjugate v.
  const Complex pairing = (plus.vector.transpose() * jvm).value();
  if (std::abs(pairing) < kThetaTol)
    throw AssumptionViolation(
        "eigenvector pairing v' J v_minus is numerically zero; the quadruple "
        "does not admit a simple structured shift");
  const Complex theta = Complex(1.0, 0.0) / pairing;

  const ComplexVector p = theta * jvm;
  const ComplexVector q = theta * jv;

  Matrix shifted = hm;
  shifted.noalias() +=
      2.0 * delta *
      (plus.vector * p.transpose() + minus.vector * q.transpose()).real();

  const double tol =
      eig_residual_tol(shifted.rows()) * std::max(1.0, shifted.norm());
  const ComplexMatrix sc = shifted.cast<Complex>();
  const double post_plus =
      (sc * plus.vector - (mu + delta) * plus.vector).norm();
  const double post_minus =
      (sc * minus.vector - (minus.value - delta) * minus.vector).norm();
  if (post_plus > tol || post_minus > tol)
    throw NumericError("shifted quadruple residual exceeds tolerance");
  return HamiltonianMatrix(std::move(shifted));
}

std::vector<Complex> rado_spectrum(const Matrix& l, const ComplexMatrix& m,
                                   const ComplexVector& lambda,
                                   const ComplexMatrix& n) {
  if (l.rows() != l.cols()) throw InvalidInput("rado_spectrum: L not square");
  const Index r = lambda.size();
  if (m.rows() != l.rows() || m.cols() != r || n.rows() != r ||
      n.cols() != l.cols())
    throw InvalidInput("rado_spectrum: factor dimensions inconsistent");

  const double tol = 1e-6 * std::max(1.0, l.norm());
  for (Index i = 0; i < r; ++i) {
    const double residual =
        (l.cast<Complex>() * m.col(i) - lambda(i) * m.col(i)).norm();
    if (residual > tol * std::max(1.0, m.col(i).norm()))
      throw InvalidInput("rado_spectrum: column " + std::to_string(i) +
                         " is not an eigenvector of L");
  }

  Eigen::EigenSolver<Matrix> es(l, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("eigen decomposition failed to converge");
  std::vector<Complex> survivors(es.eigenvalues().data(),
                                 es.eigenvalues().data() + l.rows());
  for (Index i = 0; i < r; ++i) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < survivors.size(); ++s) {
      const double d = std::abs(survivors[s] - lambda(i));
      if (d < best) {
        best = d;
        nearest = s;
      }
    }
    survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(nearest));
  }

  ComplexMatrix core = n * m;
  core += ComplexMatrix(lambda.asDiagonal());
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(core,
                                               /*computeEigenvectors=*/false);
  if (ces.info() != Eigen::Success)
    throw NumericError("eigen decomposition failed to converge");
  for (Index i = 0; i < r; ++i) survivors.push_back(ces.eigenvalues()(i));
  return survivors;
}

namespace {

bool clear_of_spectrum(const std::vector<EigenPair>& pairs,
                       const std::vector<Complex>& targets, double cut) {
  for (const EigenPair& p : pairs)
    for (const Complex& t : targets)
      if (std::abs(p.value - t) < cut) return false;
  return true;
}

bool is_simple(const std::vector<EigenPair>& pairs, Complex value,
               double cut) {
  int hits = 0;
  for (const EigenPair& p : pairs)
    if (std::abs(p.value - value) < cut) ++hits;
  return hits == 1;
}

}  // namespace

PerturbResult perturb(const HamiltonianMatrix& h, std::size_t count,
                      const SamplingWindow& window, std::uint64_t seed) {
  if (!(window.margin > 0.0) || !(window.margin < 0.5))
    throw InvalidInput("sampling margin must lie in (0, 0.5)");
  if (!(window.negative_span > window.margin))
    throw InvalidInput("negative_span must exceed margin");

  Rng rng(seed);
  HamiltonianMatrix current = h;
  ShiftPlan plan;
  plan.seed = seed;
  plan.window = window;

  constexpr int kAttemptsPerCandidate = 32;

  for (std::size_t step = 0; step < count; ++step) {
    const std::vector<EigenPair> pairs = eig_all(current.matrix());
    const double cut = kCollisionTol * std::max(1.0, current.matrix().norm());

    std::vector<RealEigenPair> reals;
    if (window.selection != ShiftSelection::complex_only)
      reals = negative_reals_from(pairs);
    std::vector<ComplexQuadruple> quads;
    if (window.selection != ShiftSelection::real_only)
      quads = quadruples_from(pairs);

    std::vector<std::size_t> real_pool, quad_pool;
    for (std::size_t i = 0; i < reals.size(); ++i)
      if (is_simple(pairs, Complex(reals[i].value, 0.0), cut))
        real_pool.push_back(i);
    for (std::size_t i = 0; i < quads.size(); ++i)
      if (is_simple(pairs, quads[i].plus.value, cut)) quad_pool.push_back(i);

    bool applied = false;
    while (!applied && (!real_pool.empty() || !quad_pool.empty())) {
      bool use_real;
      if (quad_pool.empty())
        use_real = true;
      else if (real_pool.empty())
        use_real = false;
      else
        use_real = rng.coin();

      if (use_real) {
        const std::size_t pick = rng.index(real_pool.size());
        const std::size_t ci = real_pool[pick];
        const RealEigenPair& cand = reals[ci];
        const double alam = std::abs(cand.value);
        for (int attempt = 0; attempt < kAttemptsPerCandidate && !applied;
             ++attempt) {
          const bool toward_axis = rng.coin();
          double delta;
          if (toward_axis)
            delta = rng.uniform(window.margin * alam,
                                (1.0 - window.margin) * alam);
          else
            delta = -rng.uniform(window.margin * alam,
                                 window.negative_span * alam);
          const Complex t(cand.value + delta, 0.0);
          if (!clear_of_spectrum(pairs, {t, -t}, cut)) continue;
          current = real_shift(current, cand.value, cand.vector, delta);
          ShiftRecord rec;
          rec.kind = ShiftKind::real_axis;
          rec.candidate_index = ci;
          rec.eigenvalue = Complex(cand.value, 0.0);
          rec.delta = delta;
          rec.real_vector = cand.vector;
          plan.records.push_back(std::move(rec));
          applied = true;
        }
        if (!applied)
          real_pool.erase(real_pool.begin() +
                          static_cast<std::ptrdiff_t>(pick));
      } else {
        const std::size_t pick = rng.index(quad_pool.size());
        const std::size_t ci = quad_pool[pick];
        const ComplexQuadruple& cand = quads[ci];
        const double axis_gap = cand.plus.value.real();
        for (int attempt = 0; attempt < kAttemptsPerCandidate && !applied;
             ++attempt) {
          double delta = rng.uniform(window.margin * axis_gap,
                                     (1.0 - window.margin) * axis_gap);
          if (rng.coin()) delta = -delta;
          const Complex t = cand.plus.value + delta;
          if (!clear_of_spectrum(pairs, {t, std::conj(t), -t, -std::conj(t)},
                                 cut))
            continue;
          current = complex_shift(current, cand.plus, cand.minus, delta);
          ShiftRecord rec;
          rec.kind = ShiftKind::complex_pair;
          rec.candidate_index = ci;
          rec.eigenvalue = cand.plus.value;
          rec.delta = delta;
          rec.vector_plus = cand.plus.vector;
          rec.vector_minus = cand.minus.vector;
          plan.records.push_back(std::move(rec));
          applied = true;
        }
        if (!applied)
          quad_pool.erase(quad_pool.begin() +
                          static_cast<std::ptrdiff_t>(pick));
      }
    }
    if (!applied)
      throw NoAdmissibleShift(
          "no eigenvalue admits a structured shift at step " +
          std::to_string(step + 1) + " of " + std::to_string(count));
  }
  return PerturbResult{std::move(current), std::move(plan)};
}

}  // namespace arecloak
