#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "arecloak/are.hpp"
#include "arecloak/shift.hpp"

namespace arecloak {

using BigCount = boost::multiprecision::cpp_int;

// r (r-1) ... (r-k+1), exact; 0 when k > r, 1 when k = 0.
BigCount index_sequence_count(std::size_t r, std::size_t k);

struct PrivacyReport {
  // |X_mod - X|_F / |X|_F; absent when the original block has zero norm.
  std::optional<double> rel_change_a;
  std::optional<double> rel_change_q;
  std::optional<double> rel_change_d;
  std::size_t shifts_applied = 0;
  // Negative real eigenvalues of the modified Hamiltonian: the index pool an
  // adversary has to guess from.
  std::size_t negative_real_count = 0;
  BigCount ambiguity_sequences{0};       // r!/(r-k)!
  std::size_t ambiguity_magnitudes = 0;  // continuous unknowns, one per shift
};

PrivacyReport privacy_measures(const AreProblem& original,
                               const AreProblem& modified,
                               const ShiftPlan& plan);

// f(i, H) = v p' - q q' built from the i-th negative real eigenpair of H,
// ascending by value. The direction an adversary subtracts when guessing
// that eigenvalue was shifted.
Matrix reverse_direction(const HamiltonianMatrix& h, std::size_t index);

struct ConfusionCandidate {
  std::vector<std::size_t> indices;
  std::vector<double> gammas;
  HamiltonianMatrix hamiltonian;
};

// Applies the reverse recursion H_{j+1} = H_j - gamma_j f(i_j, H_j). Each
// gamma_j must satisfy gamma_j > lambda_{i_j}(H_j); gamma_j = 0 is allowed
// and leaves H_j unchanged.
ConfusionCandidate confusion_member(const HamiltonianMatrix& h_tilde,
                                    const std::vector<std::size_t>& indices,
                                    const std::vector<double>& gammas);

struct ReverseStep {
  std::size_t index;
  double gamma;
};

// The (index, gamma) sequence that undoes a recorded plan of real shifts,
// last shift first. Throws InvalidInput if the plan contains complex-pair
// shifts, NumericError if a shifted eigenvalue cannot be located.
std::vector<ReverseStep> true_reverse_path(const HamiltonianMatrix& h_tilde,
                                           const ShiftPlan& plan);

struct AttackSequence {
  std::vector<std::size_t> indices;
  std::vector<double> gammas;  // per-level minimizers
  double distance = 0.0;       // |candidate - H_true|_F at the leaf
};

struct AttackReport {
  std::size_t depth = 0;
  BigCount total_sequences{0};  // r!/(r-k)! for the full enumeration
  bool truncated = false;       // budget cut the enumeration short
  std::vector<AttackSequence> sequences;
  std::optional<std::size_t> best;  // position of the smallest distance
};

// Oracle-scored reconstruction attempt: enumerates index sequences of the
// given depth (level j draws from the first r-j candidates), optimizing each
// gamma by golden-section search over its feasibility bracket, greedily per
// level, against |candidate - h_true|_F. At most `budget` sequences are
// scored; with a truncating budget the seed shuffles the first-level order
// so partial sweeps are not biased toward low indices.
AttackReport simulate_attack(const HamiltonianMatrix& h_tilde,
                             const HamiltonianMatrix& h_true,
                             std::size_t depth, std::size_t budget,
                             std::uint64_t seed);

}  // namespace arecloak
