#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ham/linalg.hpp"

namespace ham {

// Time-dependent symmetric coefficient B(t) of a linear Hamiltonian system
// Z' = J B(t) Z on [0, tau].
struct CoefficientPath {
  double tau = 0.0;
  int dim = 0;  // 2n
  std::function<Mat(double)> eval;
  bool periodic = false;    // B(t + tau) = B(t)
  bool reversible = false;  // N^T B(-t) N = B(t), N = diag(-I_n, I_n)

  Mat operator()(double t) const { return eval(t); }

  static CoefficientPath constant(const Mat& B, double tau);
  // B = diag(rho_1..rho_n, rho_1..rho_n); gamma(t) has cosine diagonal blocks.
  static CoefficientPath rotation_blocks(const Vec& rhos, double tau);
  static CoefficientPath from_function(int dim, double tau, std::function<Mat(double)> f,
                                       bool periodic = false, bool reversible = false);

  // max over samples of ||B - B^T||; throws if above tol.
  void check_symmetry(int samples = 64, double tol = 1e-10) const;
  // checks N^T B(-t) N = B(t) on samples (requires reversible tag).
  void check_reversibility(int samples = 64, double tol = 1e-10) const;
};

// A continuously evaluable symplectic curve with known logarithmic derivative.
// coefficient(t) = -J gamma'(t) gamma(t)^{-1}, symmetric for symplectic curves.
class PathSource {
 public:
  virtual ~PathSource() = default;
  virtual int dim() const = 0;
  virtual double tau() const = 0;
  virtual Mat value(double t) const = 0;
  virtual Mat coefficient(double t) const = 0;
};

using PathSourcePtr = std::shared_ptr<const PathSource>;

// Sampled symplectic path gamma: [0,tau] -> Sp(2n,R), gamma(0) = I, backed by
// a source for refinement between samples.
struct SymplecticPath {
  PathSourcePtr source;
  std::vector<double> times;
  std::vector<Mat> mats;
  double defect = 0.0;        // max_k || gamma_k^T J gamma_k - J ||_F
  double err_estimate = 0.0;  // Richardson endpoint estimate

  int dim() const { return source->dim(); }
  int half_dim() const { return dim() / 2; }
  double tau() const { return times.back(); }
  const Mat& monodromy() const { return mats.back(); }
  Mat value_at(double t) const { return source->value(t); }
  Mat coefficient_at(double t) const { return source->coefficient(t); }

  void recompute_defect();
};

// Gauss-Legendre 2-stage integration of Z' = J B(t) Z, Z(0) = I.
// Exactly symplectic step map; order 4. steps >= 16.
SymplecticPath fundamental_solution(const CoefficientPath& B, int steps = 4096);

// Single Gauss-2 step matrix over [t, t+h].
Mat gauss2_step(const CoefficientPath& B, double t, double h);

// Polar-geodesic path from I to the target: s -> exp(s log P) * rep(exp(s w)),
// with target = P * U and w the principal log of u(U). samples grid points.
// loop_delta != 0 multiplies by exp(delta*sin(pi s/tau) J) (endpoints fixed).
SymplecticPath connect_to(const SymplecticMatrix& target, int samples = 256,
                          double loop_delta = 0.0);

// Constant path at the identity.
SymplecticPath constant_identity_path(int dim, double tau, int samples = 16);

// ---- sources used to assemble index computations ----

PathSourcePtr make_fundamental_source(const CoefficientPath& B, int steps);
PathSourcePtr make_connect_source(const Mat& target, double tau, double loop_delta);
PathSourcePtr make_constant_source(int dim, double tau);
// gamma(t) * C with constant C (coefficient unchanged).
PathSourcePtr make_right_product_source(PathSourcePtr base, const Mat& C);
// base(t) * exp(delta * sin(pi t / tau) J).
PathSourcePtr make_twist_source(PathSourcePtr base, double delta);
// first on [0,tau/2], second on [tau/2,tau] (linear reparametrization).
PathSourcePtr make_catenation_source(PathSourcePtr first, PathSourcePtr second);
// base restricted to [a,b], shifted to [0, b-a].
PathSourcePtr make_restriction_source(PathSourcePtr base, double a, double b);
// gamma(t) = phi * base(t) * phi^{-1} for constant symplectic phi.
PathSourcePtr make_conjugated_source(PathSourcePtr base, const Mat& phi);

// Sample a source uniformly into a SymplecticPath.
SymplecticPath sample_source(PathSourcePtr src, int samples);

}  // namespace ham
