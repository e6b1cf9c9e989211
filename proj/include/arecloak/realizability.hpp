#pragma once

#include <cstdint>
#include <optional>

#include "arecloak/are.hpp"
#include "arecloak/shift.hpp"
#include "arecloak/types.hpp"

namespace arecloak {

// Kernel inclusion ker(S) subset of ker(T) accepted when
// |T K_S|_F <= kKernelInclusionTol * max(1, |T|_F).
inline constexpr double kKernelInclusionTol = 1e-8;

// Scalars from the definiteness test whose magnitude falls below this count
// as zero (all of them are bounded by small integers for unit vectors).
inline constexpr double kScalarZeroTol = 1e-12;

// Relative eigenvalue floor for "still positive semidefinite" checks.
inline constexpr double kPsdTol = 1e-8;

// Rank-two symmetric directions along which a real shift with eigenvector v
// moves the coefficients: D -> D + delta F, Q -> Q + delta G. The blocks of
// v, p = (J+I)v and q = Jv are kept for the scalar tests.
struct CoefficientDirections {
  Matrix d_direction;  // F = q_u q_l' - v_u p_l'
  Matrix q_direction;  // G = q_l q_u' - v_l p_u'
  Vector v_upper, v_lower;
  Vector p_upper, p_lower;
  Vector q_upper, q_lower;
};

CoefficientDirections coefficient_directions(const Vector& v);

enum class SignVerdict { positive_semidefinite, negative_semidefinite, unknown };

struct DirectionVerdicts {
  SignVerdict d_direction = SignVerdict::unknown;
  SignVerdict q_direction = SignVerdict::unknown;
};

// Sign of F and G from inner products of the split vectors only. One-sided:
// a verdict certifies semidefiniteness, `unknown` certifies nothing. On the
// restricted span the form is A k1^2 + B k1 k2 + C k2^2; if
// alpha_ul delta - gamma beta_ul <= 0 the discriminant is nonpositive and
// the sign is that of A, or of C when A vanishes.
DirectionVerdicts definiteness_by_scalars(const CoefficientDirections& dirs);

struct ShiftInterval {
  std::optional<double> lower;  // empty = unbounded below
  std::optional<double> upper;  // empty = unbounded above
};

// Closed interval of delta guaranteeing S + delta T >= 0 for psd S, built
// from the smallest nonzero eigenvalue of S and the extreme eigenvalues of
// T. Needs ker(S) subset of ker(T); returns empty when that inclusion fails.
// Sufficient, not necessary.
std::optional<ShiftInterval> psd_preserving_interval(const Matrix& s,
                                                     const Matrix& t);

enum class WindowBranch { both_psd, both_nsd, kernel_windows };

struct RealizableShift {
  AreProblem modified;
  ShiftRecord record;
  WindowBranch branch;
  double sampled_lower = 0.0;  // segment the shift size was drawn from
  double sampled_upper = 0.0;
};

// One structured real shift that keeps Q and D positive semidefinite, keeps
// the stabilizing solution, and changes A, Q and D. Candidates are the
// negative real eigenvalues of the Hamiltonian, nearest the imaginary axis
// first; per candidate the scalar verdicts fix the sign of the shift, and
// when they are silent the kernel windows for (D, F) and (Q, G) are
// intersected. Throws AssumptionViolation if Q or D is not psd and
// NoAdmissibleShift when every candidate fails.
RealizableShift find_realizable_shift(const AreProblem& p, std::uint64_t seed,
                                      const SamplingWindow& window = {});

}  // namespace arecloak
