#include "ham/fenchel.hpp"

#include <cmath>

namespace ham {

namespace {

// C^2 profile: 1 on [0,1], 0 on [2,inf), quintic smoothstep in between.
double bump(double r, double* d1 = nullptr, double* d2 = nullptr) {
  if (r <= 1.0) {
    if (d1) *d1 = 0.0;
    if (d2) *d2 = 0.0;
    return 1.0;
  }
  if (r >= 2.0) {
    if (d1) *d1 = 0.0;
    if (d2) *d2 = 0.0;
    return 0.0;
  }
  const double s = r - 1.0;
  const double p = 10 * s * s * s - 15 * s * s * s * s + 6 * s * s * s * s * s;
  if (d1) *d1 = -(30 * s * s - 60 * s * s * s + 30 * s * s * s * s);
  if (d2) *d2 = -(60 * s - 180 * s * s + 120 * s * s * s);
  return 1.0 - p;
}

}  // namespace

double ConvexShift::Hk(double lambda, double t, const Vec& z) const {
  const bool cut = std::isfinite(R);
  const double chi = cut ? bump(z.norm() / R) : 1.0;
  const double h = chi > 0.0 ? family->H(lambda, t, z) : 0.0;
  return chi * h - 0.5 * K * z.squaredNorm();
}

Vec ConvexShift::gradHk(double lambda, double t, const Vec& z) const {
  const bool cut = std::isfinite(R);
  const double nz = z.norm();
  double d1 = 0.0;
  const double chi = cut ? bump(nz / R, &d1) : 1.0;
  Vec g = -K * z;
  if (chi > 0.0 || d1 != 0.0) {
    const double h = family->H(lambda, t, z);
    Vec gh = family->gradH(lambda, t, z);
    Vec dr = (cut && nz > 1e-14) ? Vec(z / (nz * R)) : Vec(Vec::Zero(z.size()));
    g += chi * gh + d1 * h * dr;
  }
  return g;
}

Mat ConvexShift::hessHk(double lambda, double t, const Vec& z) const {
  const int d = static_cast<int>(z.size());
  const bool cut = std::isfinite(R);
  const double nz = z.norm();
  double d1 = 0.0, d2 = 0.0;
  const double chi = cut ? bump(nz / R, &d1, &d2) : 1.0;
  Mat Hs = -K * Mat::Identity(d, d);
  if (chi > 0.0 || d1 != 0.0 || d2 != 0.0) {
    const double h = family->H(lambda, t, z);
    Vec gh = family->gradH(lambda, t, z);
    Mat hh = family->hessH(lambda, t, z);
    if (cut && nz > 1e-14) {
      Vec dr = z / (nz * R);
      Mat ddr = (Mat::Identity(d, d) / nz - z * z.transpose() / (nz * nz * nz)) / R;
      Hs += chi * hh + d1 * (dr * gh.transpose() + gh * dr.transpose()) +
            (d2 * h) * dr * dr.transpose() + (d1 * h) * ddr;
    } else {
      Hs += chi * hh;
    }
  }
  return 0.5 * (Hs + Hs.transpose().eval());
}

ConvexShift choose_shift(const HamiltonianFamily& family, double R, double margin_req) {
  ConvexShift s;
  s.family = &family;
  if (R <= 0.0) {
    double umax = 0.0;
    for (int k = 0; k <= 16; ++k) {
      for (int l = 0; l <= 8; ++l) {
        const double lam = family.lambda_lo +
                           (family.lambda_hi - family.lambda_lo) * l / 8.0;
        umax = std::max(umax, family.branch(lam, family.tau * k / 16.0).norm());
      }
    }
    R = 2.0 * umax + 1.0;
  }
  s.R = R;

  auto hess_bounds = [&](double K, double Rprobe, double& c1, double& c2) {
    ConvexShift probe = s;
    probe.K = K;
    probe.R = Rprobe;
    c1 = std::numeric_limits<double>::infinity();
    c2 = -std::numeric_limits<double>::infinity();
    const int d = family.dim;
    std::vector<Vec> dirs;
    for (int i = 0; i < d; ++i) dirs.push_back(Vec::Unit(d, i));
    dirs.push_back(Vec::Ones(d) / std::sqrt(double(d)));
    const double span = std::isfinite(Rprobe) ? Rprobe : R;
    // dense radial ladder: covers the cutoff band [R, 2R] finely
    std::vector<double> radii = {0.0};
    for (double r = 0.1; r <= 2.45; r += 0.05) radii.push_back(r * span);
    for (int l = 0; l <= 4; ++l) {
      const double lam =
          family.lambda_lo + (family.lambda_hi - family.lambda_lo) * l / 4.0;
      for (int k = 0; k <= 4; ++k) {
        const double t = family.tau * k / 4.0;
        for (const Vec& dir : dirs) {
          for (double rad : radii) {
            Vec z = family.branch(lam, t) + rad * dir;
            Eigen::SelfAdjointEigenSolver<Mat> es(probe.hessHk(lam, t, z));
            c1 = std::min(c1, es.eigenvalues().minCoeff());
            c2 = std::max(c2, es.eigenvalues().maxCoeff());
          }
        }
      }
    }
  };

  auto accept = [&](double K, double Rfinal, double c1, double c2) {
    DualOperatorSpec spec = DualOperatorSpec::make(family.boundary, family.tau, K, margin_req);
    s.K = K;
    s.R = Rfinal;
    s.c1 = c1;
    s.c2 = c2;
    s.c3 = std::abs(family.H(0.5 * (family.lambda_lo + family.lambda_hi), 0.0,
                             Vec::Zero(family.dim))) +
           1.0;
    s.margin = spec.margin;
    return s;
  };

  // Already-convex case: K = 0 without cutoff (sampled uniform convexity).
  {
    double c1, c2;
    hess_bounds(0.0, std::numeric_limits<double>::infinity(), c1, c2);
    if (c1 > 1e-6) {
      try {
        return accept(0.0, std::numeric_limits<double>::infinity(), c1, c2);
      } catch (const std::invalid_argument&) {
      }
    }
  }
  // Descending negative ladder with the cutoff active.
  for (double K = -0.7; K > -3000.0; K *= 1.9) {
    double c1, c2;
    hess_bounds(K, R, c1, c2);
    if (c1 <= 1e-6) continue;
    try {
      return accept(K, R, c1, c2);
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  throw std::runtime_error("choose_shift: no admissible K in the scan range");
}

ConjugateEval conjugate(const ConvexShift& shift, double lambda, double t, const Vec& xi) {
  ConjugateEval out;
  Vec z = xi / shift.c1;
  // damped Newton on the strictly convex merit g(z) = H_K(z) - <xi, z>
  auto merit = [&](const Vec& y) { return shift.Hk(lambda, t, y) - xi.dot(y); };
  const double scale = 1.0 + xi.norm();
  const double tol = 1e-12 * scale;
  double g0 = merit(z);
  bool done = false;
  for (int it = 0; it < 100 && !done; ++it) {
    Vec grad = shift.gradHk(lambda, t, z) - xi;
    const double gn = grad.norm();
    if (gn < tol) {
      out.newton_iters = it;
      done = true;
      break;
    }
    Mat Hs = shift.hessHk(lambda, t, z);
    Vec step = Hs.ldlt().solve(-grad);
    if (gn < 1e-4 * scale) {
      // local phase: full Newton, monitored by the gradient norm
      Vec znew = z + step;
      const double gnew = (shift.gradHk(lambda, t, znew) - xi).norm();
      if (gnew >= gn) {
        // rounding floor reached
        out.newton_iters = it;
        done = gn < 1e-9 * scale;
        if (!done)
          throw std::runtime_error("conjugate: Newton stagnation (shift invariant violated?)");
        break;
      }
      z = znew;
      out.newton_iters = it + 1;
      continue;
    }
    double alpha = 1.0;
    bool progressed = false;
    for (int ls = 0; ls < 40; ++ls) {
      const double g1 = merit(z + alpha * step);
      if (g1 <= g0 + 1e-4 * alpha * grad.dot(step)) {
        progressed = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!progressed)
      throw std::runtime_error("conjugate: Newton stagnation (shift invariant violated?)");
    z += alpha * step;
    g0 = merit(z);
    out.newton_iters = it + 1;
  }
  if (!done) {
    Vec grad = shift.gradHk(lambda, t, z) - xi;
    if (grad.norm() > 1e-9 * scale)
      throw std::runtime_error("conjugate: Newton stagnation (shift invariant violated?)");
  }
  out.zstar = z;
  out.value = xi.dot(z) - shift.Hk(lambda, t, z);
  out.hess_star = shift.hessHk(lambda, t, z).inverse();
  out.hess_star = 0.5 * (out.hess_star + out.hess_star.transpose().eval());
  return out;
}

}  // namespace ham
