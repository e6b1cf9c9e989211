#include "arecloak/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "arecloak/errors.hpp"
#include "arecloak/rng.hpp"

namespace arecloak {

BigCount index_sequence_count(std::size_t r, std::size_t k) {
  if (k > r) return BigCount(0);
  BigCount count(1);
  for (std::size_t j = 0; j < k; ++j) count *= BigCount(r - j);
  return count;
}

namespace {

std::optional<double> rel_change(const Matrix& before, const Matrix& after) {
  const double base = before.norm();
  if (base == 0.0) return std::nullopt;
  return (after - before).norm() / base;
}

}  // namespace

PrivacyReport privacy_measures(const AreProblem& original,
                               const AreProblem& modified,
                               const ShiftPlan& plan) {
  if (original.order() != modified.order())
    throw InvalidInput("privacy_measures: order mismatch");
  PrivacyReport report;
  report.rel_change_a = rel_change(original.a(), modified.a());
  report.rel_change_q = rel_change(original.q(), modified.q());
  report.rel_change_d = rel_change(original.d(), modified.d());
  report.shifts_applied = plan.records.size();
  report.negative_real_count =
      negative_real_eigenpairs(build_hamiltonian(modified)).size();
  report.ambiguity_sequences = index_sequence_count(
      report.negative_real_count, report.shifts_applied);
  report.ambiguity_magnitudes = report.shifts_applied;
  return report;
}

Matrix reverse_direction(const HamiltonianMatrix& h, std::size_t index) {
  const std::vector<RealEigenPair> list = negative_real_eigenpairs(h);
  if (index >= list.size())
    throw InvalidInput("reverse_direction: index " + std::to_string(index) +
                       " out of range, only " + std::to_string(list.size()) +
                       " negative real eigenvalues");
  const DualVectors d = real_dual_vectors(list[index].vector);
  return list[index].vector * d.p.transpose() - d.q * d.q.transpose();
}

ConfusionCandidate confusion_member(const HamiltonianMatrix& h_tilde,
                                    const std::vector<std::size_t>& indices,
                                    const std::vector<double>& gammas) {
  if (indices.size() != gammas.size())
    throw InvalidInput("confusion_member: sequence lengths differ");
  HamiltonianMatrix current = h_tilde;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::vector<RealEigenPair> list = negative_real_eigenpairs(current);
    if (indices[j] >= list.size())
      throw InvalidInput("confusion_member: index out of range at level " +
                         std::to_string(j));
    const RealEigenPair& pair = list[indices[j]];
    if (!(gammas[j] > pair.value))
      throw InvalidInput("confusion_member: gamma at level " +
                         std::to_string(j) +
                         " violates the feasibility bound");
    // H - gamma f(i, H) is a structured shift of size -gamma.
    current = real_shift(current, pair.value, pair.vector, -gammas[j]);
  }
  return ConfusionCandidate{indices, gammas, std::move(current)};
}

std::vector<ReverseStep> true_reverse_path(const HamiltonianMatrix& h_tilde,
                                           const ShiftPlan& plan) {
  HamiltonianMatrix current = h_tilde;
  std::vector<ReverseStep> steps;
  for (auto it = plan.records.rbegin(); it != plan.records.rend(); ++it) {
    if (it->kind != ShiftKind::real_axis)
      throw InvalidInput(
          "true_reverse_path: plan contains a complex-pair shift");
    const double target = it->eigenvalue.real() + it->delta;
    const std::vector<RealEigenPair> list = negative_real_eigenpairs(current);
    std::size_t at = list.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const double d = std::abs(list[i].value - target);
      if (d < best) {
        best = d;
        at = i;
      }
    }
    if (at == list.size() || best > 1e-6 * std::max(1.0, std::abs(target)))
      throw NumericError(
          "true_reverse_path: shifted eigenvalue not found in the current "
          "spectrum");
    steps.push_back({at, it->delta});
    current = real_shift(current, list[at].value, list[at].vector, -it->delta);
  }
  return steps;
}

namespace {

// |base - gamma f|_F through the expanded quadratic; a, b, c are
// |base|^2, <base, f>, |f|^2.
double distance_at(double a, double b, double c, double gamma) {
  return std::sqrt(std::max(0.0, a - 2.0 * gamma * b + gamma * gamma * c));
}

double golden_section_min(double lo, double hi, double a, double b, double c) {
  constexpr double kInvPhi = 0.6180339887498949;
  const double span = hi - lo;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = distance_at(a, b, c, x1);
  double f2 = distance_at(a, b, c, x2);
  for (int it = 0; it < 300 && (hi - lo) > 1e-14 * span; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = distance_at(a, b, c, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = distance_at(a, b, c, x2);
    }
  }
  return 0.5 * (lo + hi);
}

struct AttackState {
  const Matrix* h_true;
  std::size_t depth;
  std::size_t budget;
  std::size_t pool0;  // negative real count of the disguised matrix
  std::vector<AttackSequence>* out;
  std::vector<std::size_t> indices;
  std::vector<double> gammas;
};

void attack_dfs(AttackState& st, const HamiltonianMatrix& current,
                std::size_t level, const std::vector<std::size_t>* order0) {
  if (st.out->size() >= st.budget) return;
  if (level == st.depth) {
    AttackSequence seq;
    seq.indices = st.indices;
    seq.gammas = st.gammas;
    seq.distance = (current.matrix() - *st.h_true).norm();
    st.out->push_back(std::move(seq));
    return;
  }

  const std::vector<RealEigenPair> list = negative_real_eigenpairs(current);
  if (st.pool0 < level) return;
  const std::size_t pool = std::min(st.pool0 - level, list.size());

  for (std::size_t slot = 0; slot < pool; ++slot) {
    if (st.out->size() >= st.budget) return;
    const std::size_t i =
        (level == 0 && order0 != nullptr) ? (*order0)[slot] : slot;
    if (i >= list.size()) continue;
    const RealEigenPair& pair = list[i];
    const DualVectors dv = real_dual_vectors(pair.vector);
    const Matrix f = pair.vector * dv.p.transpose() - dv.q * dv.q.transpose();

    const Matrix base = current.matrix() - *st.h_true;
    const double a = base.squaredNorm();
    const double b = (base.array() * f.array()).sum();
    const double c = f.squaredNorm();

    const double lo = pair.value + 1e-9 * std::max(1.0, std::abs(pair.value));
    const double hi =
        pair.value +
        4.0 * std::max(std::abs(pair.value), current.matrix().norm());
    double gamma = golden_section_min(lo, hi, a, b, c);
    // gamma = 0 is always feasible and is the floor of the nested sets.
    if (distance_at(a, b, c, 0.0) < distance_at(a, b, c, gamma)) gamma = 0.0;

    st.indices.push_back(i);
    st.gammas.push_back(gamma);
    const HamiltonianMatrix next =
        real_shift(current, pair.value, pair.vector, -gamma);
    attack_dfs(st, next, level + 1, order0);
    st.indices.pop_back();
    st.gammas.pop_back();
  }
}

}  // namespace

AttackReport simulate_attack(const HamiltonianMatrix& h_tilde,
                             const HamiltonianMatrix& h_true,
                             std::size_t depth, std::size_t budget,
                             std::uint64_t seed) {
  if (h_true.matrix().rows() != h_tilde.matrix().rows())
    throw InvalidInput("simulate_attack: order mismatch");

  AttackReport report;
  report.depth = depth;
  const std::size_t r = negative_real_eigenpairs(h_tilde).size();
  report.total_sequences = index_sequence_count(r, depth);
  if (budget == 0 || depth == 0) {
    report.truncated = report.total_sequences > 0 && depth > 0;
    return report;
  }

  std::vector<std::size_t> order0(r);
  for (std::size_t i = 0; i < r; ++i) order0[i] = i;
  const bool will_truncate = BigCount(budget) < report.total_sequences;
  if (will_truncate) {
    Rng rng(seed);
    for (std::size_t i = r; i > 1; --i)
      std::swap(order0[i - 1], order0[rng.index(i)]);
  }

  AttackState st;
  st.h_true = &h_true.matrix();
  st.depth = depth;
  st.budget = budget;
  st.pool0 = r;
  st.out = &report.sequences;
  attack_dfs(st, h_tilde, 0, &order0);

  report.truncated = BigCount(report.sequences.size()) < report.total_sequences;
  for (std::size_t i = 0; i < report.sequences.size(); ++i)
    if (!report.best ||
        report.sequences[i].distance < report.sequences[*report.best].distance)
      report.best = i;
  return report;
}

}  // namespace arecloak
