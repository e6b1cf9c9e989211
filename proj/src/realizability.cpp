#include "arecloak/realizability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "arecloak/errors.hpp"
#include "arecloak/rng.hpp"

namespace arecloak {

CoefficientDirections coefficient_directions(const Vector& v) {
  if (v.size() % 2 != 0) throw InvalidInput("vector length must be even");
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw InvalidInput("eigenvector must have unit norm");
  const Index n = v.size() / 2;
  CoefficientDirections d;
  d.v_upper = v.head(n);
  d.v_lower = v.tail(n);
  // p = (J + I) v and q = J v, blockwise.
  d.p_upper = d.v_upper + d.v_lower;
  d.p_lower = d.v_lower - d.v_upper;
  d.q_upper = d.v_lower;
  d.q_lower = -d.v_upper;
  d.d_direction = d.q_upper * d.q_lower.transpose() -
                  d.v_upper * d.p_lower.transpose();
  d.q_direction = d.q_lower * d.q_upper.transpose() -
                  d.v_lower * d.p_upper.transpose();
  return d;
}

namespace {

SignVerdict one_sided_verdict(const Vector& vu, const Vector& pl,
                              const Vector& qu, const Vector& ql) {
  const double alpha_uu = qu.dot(qu);
  const double beta_uu = vu.dot(qu);
  const double gamma = qu.dot(pl);
  const double alpha_ul = qu.dot(ql);
  const double beta_ul = vu.dot(ql);
  const double delta = vu.dot(pl);

  const double cond = alpha_ul * delta - gamma * beta_ul;
  if (cond > kScalarZeroTol) return SignVerdict::unknown;

  // Nonpositive discriminant: the restricted form has one sign, carried by
  // the leading coefficient, or by the trailing one when the leading
  // coefficient vanishes.
  const double lead = alpha_uu * alpha_ul - beta_uu * gamma;
  if (lead > kScalarZeroTol) return SignVerdict::positive_semidefinite;
  if (lead < -kScalarZeroTol) return SignVerdict::negative_semidefinite;
  const double trail = beta_uu * beta_ul - vu.dot(vu) * delta;
  if (trail < -kScalarZeroTol) return SignVerdict::negative_semidefinite;
  return SignVerdict::positive_semidefinite;
}

}  // namespace

DirectionVerdicts definiteness_by_scalars(const CoefficientDirections& dirs) {
  DirectionVerdicts out;
  out.d_direction = one_sided_verdict(dirs.v_upper, dirs.p_lower,
                                      dirs.q_upper, dirs.q_lower);
  // G swaps the roles of the upper and lower blocks.
  out.q_direction = one_sided_verdict(dirs.v_lower, dirs.p_upper,
                                      dirs.q_lower, dirs.q_upper);
  return out;
}

std::optional<ShiftInterval> psd_preserving_interval(const Matrix& s,
                                                     const Matrix& t) {
  if (s.rows() != s.cols() || t.rows() != s.rows() || t.cols() != s.cols())
    throw InvalidInput("psd_preserving_interval: dimension mismatch");
  const SymmetricEig se = sym_eig_extremes(s);
  const double s_scale = std::max(1.0, se.values.cwiseAbs().maxCoeff());
  if (se.min_value < -1e-10 * s_scale)
    throw InvalidInput("psd_preserving_interval: S is not psd");

  const Matrix kernel = kernel_basis(symmetrized(s));
  if (kernel.cols() > 0) {
    const double leak = (t * kernel).norm();
    if (leak > kKernelInclusionTol * std::max(1.0, t.norm()))
      return std::nullopt;
  }

  const SymmetricEig te = sym_eig_extremes(t);
  const double t_cut =
      kZeroEigTol * std::max(1.0, te.values.cwiseAbs().maxCoeff());

  ShiftInterval w;
  if (se.rank == 0) return w;  // S = 0, so T = 0 by inclusion: all shifts ok
  const double mu_min = se.min_positive.value();
  if (te.max_value > t_cut) w.lower = -mu_min / te.max_value;
  if (te.min_value < -t_cut) w.upper = -mu_min / te.min_value;
  return w;
}

namespace {

struct Segment {
  double lo, hi;
};

bool spectrum_clear(const std::vector<EigenPair>& pairs, Complex target,
                    double cut) {
  for (const EigenPair& p : pairs) {
    if (std::abs(p.value - target) < cut) return false;
    if (std::abs(p.value + target) < cut) return false;
  }
  return true;
}

double rel_change(const Matrix& before, const Matrix& after) {
  return (after - before).norm() / std::max(1.0, before.norm());
}

}  // namespace

RealizableShift find_realizable_shift(const AreProblem& p, std::uint64_t seed,
                                      const SamplingWindow& window) {
  if (!(window.margin > 0.0) || !(window.margin < 0.5))
    throw InvalidInput("sampling margin must lie in (0, 0.5)");
  if (!(window.negative_span > window.margin))
    throw InvalidInput("negative_span must exceed margin");

  const SymmetricEig qe = sym_eig_extremes(p.q());
  const SymmetricEig de = sym_eig_extremes(p.d());
  if (qe.min_value < -1e-10 * std::max(1.0, std::abs(qe.max_value)))
    throw AssumptionViolation("Q must be positive semidefinite");
  if (de.min_value < -1e-10 * std::max(1.0, std::abs(de.max_value)))
    throw AssumptionViolation("D must be positive semidefinite");

  const HamiltonianMatrix h = build_hamiltonian(p);
  const std::vector<EigenPair> pairs = eig_all(h.matrix());
  std::vector<RealEigenPair> candidates;
  for (const EigenPair& ep : pairs) {
    if (!ep.is_real || ep.value.real() >= 0.0) continue;
    candidates.push_back({ep.value.real(), real_eigenvector(ep)});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const RealEigenPair& a, const RealEigenPair& b) {
              return std::abs(a.value) < std::abs(b.value);
            });

  const double cut = kCollisionTol * std::max(1.0, h.matrix().norm());
  Rng rng(seed);
  constexpr int kAttempts = 32;
  const double inf = std::numeric_limits<double>::infinity();

  for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
    const RealEigenPair& cand = candidates[ci];
    const double alam = std::abs(cand.value);

    const CoefficientDirections dirs = coefficient_directions(cand.vector);
    if (dirs.d_direction.norm() <= 1e-12 || dirs.q_direction.norm() <= 1e-12)
      continue;  // a vanishing direction cannot change the coefficients
    const DirectionVerdicts verdicts = definiteness_by_scalars(dirs);

    std::vector<Segment> segments;
    WindowBranch branch;
    const Segment positive{window.margin * alam, (1.0 - window.margin) * alam};
    const Segment negative{-window.negative_span * alam,
                           -window.margin * alam};
    if (verdicts.d_direction == SignVerdict::positive_semidefinite &&
        verdicts.q_direction == SignVerdict::positive_semidefinite) {
      branch = WindowBranch::both_psd;
      segments.push_back(positive);
    } else if (verdicts.d_direction == SignVerdict::negative_semidefinite &&
               verdicts.q_direction == SignVerdict::negative_semidefinite) {
      branch = WindowBranch::both_nsd;
      segments.push_back(negative);
    } else {
      branch = WindowBranch::kernel_windows;
      const auto wf = psd_preserving_interval(p.d(), dirs.d_direction);
      if (!wf) continue;
      const auto wg = psd_preserving_interval(p.q(), dirs.q_direction);
      if (!wg) continue;
      const double lo = std::max(wf->lower.value_or(-inf),
                                 wg->lower.value_or(-inf));
      const double hi = std::min(wf->upper.value_or(inf),
                                 wg->upper.value_or(inf));
      const Segment neg{std::max(lo, negative.lo), std::min(hi, negative.hi)};
      const Segment pos{std::max(lo, positive.lo), std::min(hi, positive.hi)};
      if (neg.lo < neg.hi) segments.push_back(neg);
      if (pos.lo < pos.hi) segments.push_back(pos);
      if (segments.empty()) continue;
    }

    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const Segment& seg = segments.size() == 1
                               ? segments.front()
                               : segments[rng.index(segments.size())];
      const double delta = rng.uniform(seg.lo, seg.hi);
      if (!spectrum_clear(pairs, Complex(cand.value + delta, 0.0), cut))
        continue;

      const HamiltonianMatrix shifted =
          real_shift(h, cand.value, cand.vector, delta);
      const AreProblem modified = split_hamiltonian(shifted);

      const SymmetricEig qe2 = sym_eig_extremes(modified.q());
      const SymmetricEig de2 = sym_eig_extremes(modified.d());
      if (qe2.min_value < -kPsdTol * std::max(1.0, std::abs(qe2.max_value)))
        continue;
      if (de2.min_value < -kPsdTol * std::max(1.0, std::abs(de2.max_value)))
        continue;
      if (rel_change(p.a(), modified.a()) <= 1e-12 ||
          rel_change(p.q(), modified.q()) <= 1e-12 ||
          rel_change(p.d(), modified.d()) <= 1e-12)
        break;  // trivial on some block for every delta along this direction

      ShiftRecord rec;
      rec.kind = ShiftKind::real_axis;
      rec.candidate_index = ci;
      rec.eigenvalue = Complex(cand.value, 0.0);
      rec.delta = delta;
      rec.real_vector = cand.vector;
      return RealizableShift{modified, std::move(rec), branch, seg.lo, seg.hi};
    }
  }
  throw NoAdmissibleShift(
      "no negative real eigenvalue admits a semidefiniteness-preserving "
      "shift for this problem");
}

}  // namespace arecloak
