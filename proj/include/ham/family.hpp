#pragma once

#include <functional>
#include <string>

#include "ham/path.hpp"

namespace ham {

// Parametrized Hamiltonian H(lambda, t, z) with derivatives, boundary matrix,
// symmetry flags, and a trivial-branch provider.
struct HamiltonianFamily {
  int dim = 0;  // 2n
  double tau = 0.0;
  Mat boundary;  // M
  double lambda_lo = 0.0, lambda_hi = 0.0;

  std::function<double(double, double, const Vec&)> H;
  std::function<Vec(double, double, const Vec&)> gradH;
  std::function<Mat(double, double, const Vec&)> hessH;
  std::function<Vec(double, double)> branch;  // u_lambda(t)

  bool M_periodic = false;
  bool reversible = false;
  bool autonomous = false;
  bool even = false;

  std::string name;

  int half_dim() const { return dim / 2; }

  // Linearization along the branch: B_lambda(t) = H''(lambda, t, u_lambda(t)).
  CoefficientPath linearization(double lambda) const;

  // Spot checks of the declared structure; throws on violation.
  // - gradH consistent with H by central differences (1e-5 relative)
  // - hessH symmetric
  // - branch residual u' - J grad H <= 1e-8 at samples
  // - flags verified by sampling
  void validate(int samples = 12, double grad_tol = 1e-5, double branch_tol = 1e-8) const;
};

// H = lambda |z|^2 / 2, trivial branch 0.
HamiltonianFamily make_linear_family(int n, double tau, const Mat& M, double lo, double hi);

// H = lambda |z|^2 / 2 + c4 |z|^4 / 4, trivial branch 0.
HamiltonianFamily make_quartic_family(int n, double tau, const Mat& M, double lo, double hi,
                                      double c4 = 1.0);

// H = lambda/2 sum_i rho_i (q_i^2 + p_i^2), trivial branch 0.
HamiltonianFamily make_rotation_family(const Vec& rhos, double tau, const Mat& M, double lo,
                                       double hi);

// Radial polynomial H = lambda |z|^2 / 2 + sum_k c[k] |z|^{2(k+2)} (k+2 <= 3).
HamiltonianFamily make_polynomial_family(int n, double tau, const Mat& M, double lo, double hi,
                                         const std::vector<double>& higher_coeffs);

}  // namespace ham
