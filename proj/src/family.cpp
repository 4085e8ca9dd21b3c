#include "ham/family.hpp"

#include <cmath>

namespace ham {

CoefficientPath HamiltonianFamily::linearization(double lambda) const {
  auto hh = hessH;
  auto br = branch;
  const double lam = lambda;
  return CoefficientPath::from_function(
      dim, tau, [hh, br, lam](double t) { return hh(lam, t, br(lam, t)); }, M_periodic,
      reversible);
}

void HamiltonianFamily::validate(int samples, double grad_tol, double branch_tol) const {
  const int d = dim;
  Mat J = standard_structure(d / 2);
  const double lam = 0.5 * (lambda_lo + lambda_hi);
  for (int k = 0; k <= samples; ++k) {
    const double t = tau * k / samples;
    Vec z = branch(lam, t) + 0.1 * Vec::Ones(d) * std::sin(3.0 * t + k);
    // gradient vs central differences
    Vec g = gradH(lam, t, z);
    const double fd = 1e-5;
    for (int i = 0; i < d; ++i) {
      Vec e = Vec::Zero(d);
      e(i) = fd;
      const double gfd = (H(lam, t, z + e) - H(lam, t, z - e)) / (2 * fd);
      if (std::abs(gfd - g(i)) > grad_tol * (1.0 + std::abs(g(i))))
        throw std::runtime_error("HamiltonianFamily: grad/H mismatch");
    }
    Mat Hs = hessH(lam, t, z);
    if ((Hs - Hs.transpose()).norm() > 1e-10 * (1.0 + Hs.norm()))
      throw std::runtime_error("HamiltonianFamily: Hessian not symmetric");
  }
  // branch residual by central differences in t
  for (int k = 1; k < samples; ++k) {
    const double t = tau * k / samples;
    const double fd = 1e-6 * tau;
    Vec du = (branch(lam, t + fd) - branch(lam, t - fd)) / (2 * fd);
    Vec res = du - J * gradH(lam, t, branch(lam, t));
    if (res.norm() > branch_tol + 1e-6)
      throw std::runtime_error("HamiltonianFamily: branch residual too large");
  }
  if (M_periodic) {
    for (int k = 0; k <= 4; ++k) {
      const double t = tau * k / 4;
      Vec z = 0.3 * Vec::Ones(d);
      const double a = H(lam, t + tau, boundary * z), b = H(lam, t, z);
      if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(b)))
        throw std::runtime_error("HamiltonianFamily: M-periodicity violated");
    }
  }
  if (even) {
    Vec z = 0.4 * Vec::Ones(d);
    if (std::abs(H(lam, 0.3 * tau, z) - H(lam, 0.3 * tau, Vec(-z))) > 1e-12)
      throw std::runtime_error("HamiltonianFamily: evenness violated");
  }
}

namespace {

HamiltonianFamily radial_family(int n, double tau, const Mat& M, double lo, double hi,
                                std::vector<double> cs, std::string name) {
  // H = lambda |z|^2 / 2 + sum_k cs[k] |z|^{2(k+2)}
  HamiltonianFamily f;
  f.dim = 2 * n;
  f.tau = tau;
  f.boundary = M;
  f.lambda_lo = lo;
  f.lambda_hi = hi;
  f.name = std::move(name);
  f.H = [cs](double lam, double, const Vec& z) {
    const double s = z.squaredNorm();
    double v = 0.5 * lam * s;
    double p = s * s;
    for (double c : cs) {
      v += c * p;
      p *= s;
    }
    return v;
  };
  f.gradH = [cs](double lam, double, const Vec& z) {
    const double s = z.squaredNorm();
    // d/dz [c s^{k+2}] = 2 c (k+2) s^{k+1} z
    double coef = lam;
    double p = s;
    for (size_t k = 0; k < cs.size(); ++k) {
      coef += 2.0 * cs[k] * (k + 2) * p;
      p *= s;
    }
    return Vec(coef * z);
  };
  f.hessH = [cs](double lam, double, const Vec& z) {
    // Hess[g(|z|^2)] = 2 g'(s) I + 4 g''(s) z z^T with s = |z|^2;
    // here 2 g'(s) = coef(s) = lam + sum 2 c_k (k+2) s^{k+1} and
    // coef'(s) = sum 2 c_k (k+2)(k+1) s^k.
    const double s = z.squaredNorm();
    const int d = static_cast<int>(z.size());
    double coef = lam, p = s;
    for (size_t k = 0; k < cs.size(); ++k) {
      coef += 2.0 * cs[k] * (k + 2) * p;
      p *= s;
    }
    double cps = 0.0, q = 1.0;
    for (size_t k = 0; k < cs.size(); ++k) {
      cps += 2.0 * cs[k] * (k + 2) * (k + 1) * q;
      q *= s;
    }
    return Mat(coef * Mat::Identity(d, d) + 2.0 * cps * z * z.transpose());
  };
  f.branch = [n](double, double) { return Vec(Vec::Zero(2 * n)); };
  f.M_periodic = true;
  f.autonomous = true;
  f.even = true;
  {
    const int nn = n;
    Mat N = Mat::Identity(2 * nn, 2 * nn);
    N.topLeftCorner(nn, nn) *= -1.0;
    f.reversible = true;  // radial H is N-invariant
  }
  return f;
}

}  // namespace

HamiltonianFamily make_linear_family(int n, double tau, const Mat& M, double lo, double hi) {
  return radial_family(n, tau, M, lo, hi, {}, "linear_quadratic");
}

HamiltonianFamily make_quartic_family(int n, double tau, const Mat& M, double lo, double hi,
                                      double c4) {
  return radial_family(n, tau, M, lo, hi, {c4 / 4.0}, "quadratic_plus_quartic");
}

HamiltonianFamily make_rotation_family(const Vec& rhos, double tau, const Mat& M, double lo,
                                       double hi) {
  const int n = static_cast<int>(rhos.size());
  HamiltonianFamily f;
  f.dim = 2 * n;
  f.tau = tau;
  f.boundary = M;
  f.lambda_lo = lo;
  f.lambda_hi = hi;
  f.name = "rotation_blocks";
  Vec r = rhos;
  f.H = [r, n](double lam, double, const Vec& z) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += 0.5 * lam * r(i) * (z(i) * z(i) + z(n + i) * z(n + i));
    return v;
  };
  f.gradH = [r, n](double lam, double, const Vec& z) {
    Vec g(2 * n);
    for (int i = 0; i < n; ++i) {
      g(i) = lam * r(i) * z(i);
      g(n + i) = lam * r(i) * z(n + i);
    }
    return g;
  };
  f.hessH = [r, n](double lam, double, const Vec&) {
    Mat Hs = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      Hs(i, i) = lam * r(i);
      Hs(n + i, n + i) = lam * r(i);
    }
    return Hs;
  };
  f.branch = [n](double, double) { return Vec(Vec::Zero(2 * n)); };
  f.M_periodic = true;
  f.autonomous = true;
  f.even = true;
  f.reversible = true;
  return f;
}

HamiltonianFamily make_polynomial_family(int n, double tau, const Mat& M, double lo, double hi,
                                         const std::vector<double>& higher) {
  if (higher.size() > 2)
    throw std::invalid_argument("make_polynomial_family: degree above 6 not supported");
  return radial_family(n, tau, M, lo, hi, higher, "polynomial");
}

}  // namespace ham
