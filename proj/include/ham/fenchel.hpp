#pragma once

#include "ham/dual_operator.hpp"
#include "ham/family.hpp"

namespace ham {

// Convexification data: H_K(lambda,t,z) = chi(z) H(lambda,t,z) - K/2 |z|^2 with a
// C^2 cutoff chi vanishing outside |z| >= 2R, so c1 I <= (H_K)'' <= c2 I globally.
struct ConvexShift {
  const HamiltonianFamily* family = nullptr;
  double K = 0.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double R = 0.0;       // cutoff radius (chi = 1 inside |z| <= R)
  double margin = 0.0;  // nondegeneracy margin of Lambda_{M,tau,K}

  double Hk(double lambda, double t, const Vec& z) const;
  Vec gradHk(double lambda, double t, const Vec& z) const;
  Mat hessHk(double lambda, double t, const Vec& z) const;
};

// Scan K < 0 until c1 > 0 with margin; R defaults to 2 max||u_lambda|| + 1.
// K = 0 is accepted when H is already uniformly convex and nondegenerate.
ConvexShift choose_shift(const HamiltonianFamily& family, double R = -1.0,
                         double margin_req = 1e-3);

struct ConjugateEval {
  double value = 0.0;  // H_K^*(lambda, t; xi)
  Vec zstar;           // argmax
  Mat hess_star;       // (H_K^*)'' = (H_K''(z*))^{-1}
  int newton_iters = 0;
};

// Legendre-Fenchel conjugate by damped Newton on grad H_K(z) = xi.
ConjugateEval conjugate(const ConvexShift& shift, double lambda, double t, const Vec& xi);

}  // namespace ham
