#include "ham/rotation.hpp"

#include <cmath>
#include <complex>
#include <list>
#include <stdexcept>

namespace ham {

namespace {

std::complex<double> det_unitary(const Mat& S) {
  CMat u = unitary_part(S, 1e-4);
  std::complex<double> d = u.determinant();
  // determinant of a unitary matrix lies on the circle; renormalize rounding.
  double a = std::abs(d);
  return a > 0 ? d / a : std::complex<double>(1.0, 0.0);
}

}  // namespace

RotationLift rotation_lift_source(const PathSourcePtr& src, int initial_samples,
                                  double max_phase_step, int max_depth) {
  struct Node {
    double t;
    std::complex<double> det;
    int depth;
  };
  std::list<Node> nodes;
  const double tau = src->tau();
  for (int k = 0; k <= initial_samples; ++k) {
    const double t = tau * k / initial_samples;
    nodes.push_back({t, det_unitary(src->value(t)), 0});
  }
  // Refine until adjacent phase increments are unambiguous.
  auto it = nodes.begin();
  while (std::next(it) != nodes.end()) {
    auto jt = std::next(it);
    const double dphi = std::arg(jt->det / it->det);
    if (std::abs(dphi) < max_phase_step) {
      ++it;
      continue;
    }
    if (it->depth >= max_depth)
      throw std::runtime_error("rotation_lift: refinement budget exhausted (phase step " +
                               std::to_string(dphi) + ")");
    const double tm = 0.5 * (it->t + jt->t);
    nodes.insert(jt, {tm, det_unitary(src->value(tm)), it->depth + 1});
  }

  RotationLift lift;
  lift.times.reserve(nodes.size());
  lift.phase.reserve(nodes.size());
  double acc = 0.0;
  std::complex<double> prev = nodes.front().det;
  lift.times.push_back(nodes.front().t);
  lift.phase.push_back(std::arg(prev));
  acc = lift.phase.back();
  for (auto n = std::next(nodes.begin()); n != nodes.end(); ++n) {
    const double d = std::arg(n->det / prev);
    acc += d;
    lift.max_step = std::max(lift.max_step, std::abs(d));
    lift.times.push_back(n->t);
    lift.phase.push_back(acc);
    prev = n->det;
  }
  return lift;
}

RotationLift rotation_lift(const SymplecticPath& gamma, double max_phase_step, int max_depth) {
  const int base = std::max<int>(256, static_cast<int>(gamma.times.size()) - 1);
  return rotation_lift_source(gamma.source, base, max_phase_step, max_depth);
}

}  // namespace ham
