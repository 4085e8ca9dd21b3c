#pragma once

#include "ham/path.hpp"

namespace ham {

// Continuous phase Delta with det u(gamma(t)) = exp(i Delta(t)), Delta(0) = arg det u(I) = 0.
struct RotationLift {
  std::vector<double> times;
  std::vector<double> phase;
  double max_step = 0.0;  // largest |phase increment| after refinement

  double total() const { return phase.back() - phase.front(); }
};

// Unwraps the determinant phase along the path with an aliasing guard:
// adjacent increments are refined (via the path source) until below max_phase_step.
// Throws if the refinement budget is exhausted.
RotationLift rotation_lift(const SymplecticPath& gamma, double max_phase_step = 0.78539816339744831,
                           int max_depth = 24);
RotationLift rotation_lift_source(const PathSourcePtr& src, int initial_samples,
                                  double max_phase_step = 0.78539816339744831, int max_depth = 24);

}  // namespace ham
