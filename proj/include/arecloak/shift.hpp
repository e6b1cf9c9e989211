#pragma once

#include <cstdint>
#include <vector>

#include "arecloak/are.hpp"
#include "arecloak/numerics.hpp"
#include "arecloak/types.hpp"

namespace arecloak {

// Minimum |v' J v_minus| accepted when normalizing the rank-4 update for a
// complex pair; smaller values indicate a (numerically) defective quadruple.
inline constexpr double kThetaTol = 1e-8;

// Relative spacing required between a shifted eigenvalue and the rest of the
// spectrum when sampling shift sizes.
inline constexpr double kCollisionTol = 1e-6;

struct RealEigenPair {
  double value;
  Vector vector;  // unit norm, largest-magnitude entry positive
};

// Real eigenvalues with Re < 0, ascending by value (most negative first).
// Eigenvectors are validated and sign-normalized.
std::vector<RealEigenPair> negative_real_eigenpairs(const HamiltonianMatrix& h);

struct DualVectors {
  Vector p;  // (J + I) v
  Vector q;  // J v
};

// For unit v: p'v = 1, q'v = 0, q'q = 1. These make v p' - q q' move the
// pair {lambda, -lambda} without touching the rest of the spectrum.
DualVectors real_dual_vectors(const Vector& v);

// H + delta (v p' - q q') for a real eigenpair (lambda, v) of H. Checks that
// the pair actually belongs to H, that v survives as an eigenvector at
// lambda + delta, and that the result is still Hamiltonian.
HamiltonianMatrix real_shift(const HamiltonianMatrix& h, double lambda,
                             const Vector& v, double delta);

// One quadruple {mu, conj(mu), -mu, -conj(mu)}: plus holds the
// Re > 0, Im > 0 representative, minus the eigenpair at -mu.
struct ComplexQuadruple {
  EigenPair plus;
  EigenPair minus;
};

std::vector<ComplexQuadruple> complex_quadruples(const HamiltonianMatrix& h);

// H + 2 delta Re(v p' + v_minus q') with p = theta J v_minus, q = theta J v,
// theta = 1/(v' J v_minus). Moves the quadruple real parts by +-delta; the
// update is invariant to the phase and scale of both eigenvectors. Requires
// delta > -Re(mu) so nothing crosses the imaginary axis.
HamiltonianMatrix complex_shift(const HamiltonianMatrix& h,
                                const EigenPair& plus, const EigenPair& minus,
                                double delta);

// Spectrum of L + M N when the columns of M are eigenvectors of L with
// eigenvalues lambda: eig(diag(lambda) + N M) together with the unmoved part
// of eig(L).
std::vector<Complex> rado_spectrum(const Matrix& l, const ComplexMatrix& m,
                                   const ComplexVector& lambda,
                                   const ComplexMatrix& n);

enum class ShiftKind { real_axis, complex_pair };

enum class ShiftSelection { real_only, complex_only, mixed };

struct SamplingWindow {
  // Shift magnitudes stay inside (margin, 1 - margin) times the distance to
  // the imaginary axis; for real shifts away from the axis the window is
  // (margin, negative_span) times |lambda| instead.
  double margin = 0.05;
  double negative_span = 1.0;
  ShiftSelection selection = ShiftSelection::real_only;
};

struct ShiftRecord {
  ShiftKind kind = ShiftKind::real_axis;
  std::size_t candidate_index = 0;  // position in the candidate list used
  Complex eigenvalue;               // value before the shift
  double delta = 0.0;
  Vector real_vector;               // real_axis only
  ComplexVector vector_plus;        // complex_pair only
  ComplexVector vector_minus;
};

struct ShiftPlan {
  std::uint64_t seed = 0;
  SamplingWindow window;
  std::vector<ShiftRecord> records;
};

struct PerturbResult {
  HamiltonianMatrix hamiltonian;
  ShiftPlan plan;
};

// Applies `count` randomized structured shifts, re-deriving candidates after
// each one. Sampled shift targets keep a relative distance of kCollisionTol
// from the rest of the spectrum so eigenvalues stay simple. Throws
// NoAdmissibleShift when candidates run out.
PerturbResult perturb(const HamiltonianMatrix& h, std::size_t count,
                      const SamplingWindow& window, std::uint64_t seed);

}  // namespace arecloak
