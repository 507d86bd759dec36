#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace specgraph {

using Cx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Error taxonomy.
//
// Conditions that invalidate a whole computation are thrown; recoverable
// per-item conditions (a Newton solve that fails for one index, an unresolved
// winding cell) are reported through result structs by the functions that can
// continue past them.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The leading z-coefficient of the potential vanishes (or nearly so) at the
// requested parameter value, so the problem degenerates there.
struct LeadingCoefficientVanishes : Error { using Error::Error; };

// Root tracking detected a collision of distinct roots along the parameter
// path; the path runs through (or too close to) a branch point.
struct BranchPointEncountered : Error { using Error::Error; };

// Square-root continuation could not decide between the two branches.
struct BranchAmbiguity : Error { using Error::Error; };

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureFailure : Error { using Error::Error; };

// Two turning points coincide where the operation requires them distinct.
struct DegenerateTurningPoints : Error { using Error::Error; };

// An adaptive stepper drove the step size to zero without terminating.
struct StepCollapse : Error { using Error::Error; };

// A traced line escaped in a direction that matches no admissible asymptote.
struct AsymptoteMismatch : Error { using Error::Error; };

// Planar subdivision construction hit a tangency or self-intersection it
// cannot represent.
struct ArrangementDegeneracy : Error { using Error::Error; };

// A query point lies on a traced line, so face membership is undefined.
struct OnStokesLine : Error { using Error::Error; };

// Zero-set seeding cannot resolve curves at the requested lattice density.
struct SeedMiss : Error { using Error::Error; };

// A curve segment violates a precondition of the asymptotic rule applied to
// it (interior junction, endpoint degeneracy).
struct HypothesisViolated : Error { using Error::Error; };

// Estimate/reference pairing is ambiguous: two reference values are nearer to
// one estimate than to each other.
struct MatchingAmbiguous : Error { using Error::Error; };

// No route between the requested endpoints satisfies the face constraints.
struct RoutingFailure : Error { using Error::Error; };

// A requested evaluation point sits too close to a turning point.
struct TooCloseToTurningPoint : Error { using Error::Error; };

// Boundary phase of the characteristic determinant could not be tracked to
// within the aliasing bound even at the finest edge refinement.
struct WindingUnresolved : Error { using Error::Error; };

// The potential does not have the restricted form an operation requires.
struct FormNotSupported : Error { using Error::Error; };

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------

inline double sqr(double x) { return x * x; }

// Normalize an angle to [0, 2*pi).
inline double angle_norm(double a) {
  a = std::fmod(a, 2 * pi);
  if (a < 0) a += 2 * pi;
  return a;
}

// Distance between two angles on the circle, in [0, pi].
inline double angle_dist(double a, double b) {
  double d = angle_norm(a - b);
  return d > pi ? 2 * pi - d : d;
}

// True if |v - ref| < |v + ref|, i.e. v is nearer to ref than to -ref.
inline bool same_sign_branch(Cx v, Cx ref) {
  return std::norm(v - ref) <= std::norm(v + ref);
}

// Canonical representative of a value defined only up to overall sign:
// Im >= 0, with Re >= 0 breaking the tie on the real axis.
inline Cx standardize_sign(Cx v) {
  if (v.imag() > 0) return v;
  if (v.imag() < 0) return -v;
  return v.real() >= 0 ? v : -v;
}

}  // namespace specgraph
