#pragma once

// Ready-made model problems. Both arise as the inviscid small-shear limit of
// stability problems for plane shear flows; they double as regression
// fixtures because many of their quantities have closed forms.

#include "specgraph/potential.hpp"

namespace specgraph::models {

struct ModelProblem {
  BivariatePotential potential;
  BoundaryPoint a, b;
  ParameterDomain domain;
};

// Attach excluded discs around every branch point of the root functions
// inside the rectangle.
inline ParameterDomain guarded_domain(const BivariatePotential& pot, Cx lo,
                                      Cx hi, double disc_radius = 1e-2) {
  ParameterDomain d{lo, hi, {}};
  for (Cx b : branch_points(pot, lo, hi)) d.excluded.push_back({b, disc_radius});
  return d;
}

// Linear velocity profile (plane Couette flow):
//   P(z, lambda) = i (z - lambda),  y(-1) = y(1) = 0.
// The single turning point z = lambda is simple for every lambda and there
// are no branch points in the parameter.
inline ModelProblem plane_couette() {
  ModelProblem m;
  m.potential.coeffs = {{Cx(0, 0), Cx(0, -1)}, {Cx(0, 1)}};
  m.a = BoundaryPoint::at(Cx(-1, 0));
  m.b = BoundaryPoint::at(Cx(1, 0));
  m.domain = ParameterDomain{Cx(-1.6, -3.0), Cx(1.6, -0.02), {}};
  return m;
}

// Combined Couette-Poiseuille profile:
//   P(z, lambda) = i (z^2 - z/2 - lambda),  y(-1) = y(1) = 0.
// Turning points z = 1/4 +- sqrt(1/16 + lambda) collide at the branch point
// lambda = -1/16, which gets an excluded disc.
inline ModelProblem couette_poiseuille() {
  ModelProblem m;
  m.potential.coeffs = {{Cx(0, 0), Cx(0, -1)}, {Cx(0, -0.5)}, {Cx(0, 1)}};
  m.a = BoundaryPoint::at(Cx(-1, 0));
  m.b = BoundaryPoint::at(Cx(1, 0));
  m.domain = guarded_domain(m.potential, Cx(-0.5, -2.2), Cx(1.8, -0.02));
  return m;
}

}  // namespace specgraph::models
