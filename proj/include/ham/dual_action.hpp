#pragma once

#include "ham/fenchel.hpp"
#include "ham/flow.hpp"

namespace ham {

// Discretized dual variable: piecewise-constant w on m uniform cells of [0,tau].
// psi_K(lambda, w) = 1/2 (w, Lambda^{-1} w)_{L2} + int H_K^*(lambda, t; w(t)) dt,
// evaluated exactly on the discretization (closed-form Lambda gram + midpoint
// rule for the conjugate term), so the analytic gradient is the exact gradient
// of the discrete functional.
struct DualState {
  double lambda = 0.0;
  std::vector<double> mid;  // cell midpoints
  std::vector<Vec> w;       // dual variable per cell
  double value = 0.0;
  std::vector<Vec> grad;    // L2 gradient per cell
  double grad_norm = 0.0;   // L2 norm
  std::vector<Vec> orbit;   // u(t_mid) = grad H_K^*(lambda, t; w)
  double orbit_flow_residual = 0.0;      // of the polished orbit
  double orbit_boundary_residual = 0.0;  // of the polished orbit
  double discretization_defect = 0.0;    // O(h) defect of the cell-level orbit
  BranchPoint polished;  // Newton flow-polish seeded at u_hat(0) = -(Lambda^{-1} w)(0)
  bool converged = false;
  int iterations = 0;
};

class DualAction {
 public:
  DualAction(const ConvexShift& shift, const DualOperatorSpec& spec, int cells);

  int cells() const { return m_; }
  double cell_mid(int p) const { return (p + 0.5) * h_; }

  // value and exact L2 gradient of the discretized psi_K at w.
  double eval(double lambda, const std::vector<Vec>& w, std::vector<Vec>* grad = nullptr) const;

  // Gateaux derivative of the gradient map at w (matrix of the discrete
  // B_lambda(w) = A_{M,tau,K} + (H_K^*)''(w)), used by the residual descent.
  Mat gradient_jacobian(double lambda, const std::vector<Vec>& w) const;

  // Critical point search: residual descent (Gauss-Newton steps on the merit
  // 1/2 ||grad psi||^2 with Armijo line search; only the Gateaux second form
  // of psi is used). Recovers the orbit u = grad H_K^*(lambda, .; w).
  DualState descend_and_recover(double lambda, const std::vector<Vec>& w_init,
                                double grad_tol = 1e-9, int max_iter = 400) const;

  // dual variable of a primal curve: w = -Lambda u = -J u' - K u at midpoints.
  std::vector<Vec> dual_of_orbit(const std::function<Vec(double)>& u) const;

  const DualOperatorSpec& spec() const { return spec_; }
  const ConvexShift& shift() const { return shift_; }

 private:
  ConvexShift shift_;
  DualOperatorSpec spec_;
  int m_;
  double h_;
  Mat gram_;  // (Lambda^{-1} phi_i, phi_j)
};

// Primal action Phi(lambda, u) = int [ 1/2 <J u', u> + H(lambda, t, u) ] dt by
// quadrature on a sampled curve (midpoint rule, derivative by central FD).
double primal_action(const HamiltonianFamily& family, double lambda,
                     const std::function<Vec(double)>& u, int samples = 2048);

}  // namespace ham
