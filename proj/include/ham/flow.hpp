#pragma once

#include "ham/family.hpp"

namespace ham {

struct FlowResult {
  Vec endpoint;
  Mat monodromy;              // D phi_s(z0)
  double err_estimate = 0.0;  // Richardson (h vs h/2) on the endpoint
  double monodromy_defect = 0.0;
  bool blew_up = false;
};

// RK4 on u' = J grad H_lambda(u) with simultaneous variational equations
// V' = J H''(u) V; fixed step with step-halving error control.
FlowResult flow(const HamiltonianFamily& family, double lambda, const Vec& z0, double horizon,
                int steps = 4096, double norm_cap = 1e8);

// Dense version (trajectory samples at the step grid).
struct FlowTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  FlowResult result;
};
FlowTrajectory flow_dense(const HamiltonianFamily& family, double lambda, const Vec& z0,
                          double horizon, int steps = 4096, double norm_cap = 1e8);

struct BranchPoint {
  double lambda = 0.0;
  Vec z0;
  std::vector<double> times;
  std::vector<Vec> samples;
  double boundary_residual = 0.0;
  double flow_residual = 0.0;  // independent half-step re-integration defect
  double distance_to_branch = 0.0;
  int side = 0;  // -1: lambda < mu, +1: lambda > mu, 0: at mu
  bool converged = false;
  bool degenerate_jacobian = false;
  int newton_iters = 0;
};

// Newton on F(z) = phi_tau(z) - M z - r. Near-singular Jacobians fall back to
// a Moore-Penrose step (reported via degenerate_jacobian).
BranchPoint newton_bvp(const HamiltonianFamily& family, double lambda, const Vec& z_init,
                       const Vec& affine_offset, int steps = 4096, double ftol = 1e-10,
                       int max_iter = 60);

struct BranchSwitchOptions {
  std::vector<double> dlambdas = {1e-1, 1e-2, 1e-3};   // relative to |Lambda|
  std::vector<double> amplitudes = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};  // times scale
  double scale = 1.0;
  double search_radius = 0.05;  // reject solutions farther from the branch
  double distinct_factor = 10.0;
  int steps = 4096;
};

// Predictor-corrector branch search near a flagged candidate mu, along kernel
// directions; returns de-duplicated nontrivial branch points on both sides.
std::vector<BranchPoint> branch_switch(const HamiltonianFamily& family, double mu,
                                       const Mat& kernel_basis,
                                       const BranchSwitchOptions& opt = {});

// Reversible shooting: u(0) = (0, y), residual = first n components of
// phi_{tau/2}; solutions extended to brake orbits by N-reflection.
struct BrakeOrbit {
  Vec y0;
  std::vector<double> times;   // on [0, tau]
  std::vector<Vec> samples;    // full brake orbit
  double residual = 0.0;
  double extension_residual = 0.0;
  bool converged = false;
  bool degenerate = false;
};
std::vector<BrakeOrbit> brake_shoot(const HamiltonianFamily& family, double lambda,
                                    const std::vector<Vec>& y_inits, int steps = 4096);

// u_M(t) = M^k u(t - k tau) on [-k tau, k tau]; requires u(tau) = M u(0).
struct ExtendedOrbit {
  std::vector<double> times;
  std::vector<Vec> samples;
  double junction_defect = 0.0;
};
ExtendedOrbit extend_to_line(const std::vector<double>& times, const std::vector<Vec>& u,
                             const Mat& M, int copies, double tol = 1e-6);

// C0 distance after optimal phase alignment (autonomous families).
double phase_aligned_distance(const HamiltonianFamily& family, const BranchPoint& a,
                              const BranchPoint& b);

}  // namespace ham
