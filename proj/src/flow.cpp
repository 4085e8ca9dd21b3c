#include "ham/flow.hpp"

#include <cmath>

namespace ham {

namespace {

struct StepState {
  Vec z;
  Mat V;
};

StepState rk4_step(const HamiltonianFamily& family, double lambda, const StepState& s, double t,
                   double h, const Mat& J) {
  auto f = [&](double tt, const Vec& z) { return Vec(J * family.gradH(lambda, tt, z)); };
  auto Df = [&](double tt, const Vec& z, const Mat& V) {
    return Mat(J * family.hessH(lambda, tt, z) * V);
  };
  Vec k1 = f(t, s.z);
  Mat K1 = Df(t, s.z, s.V);
  Vec k2 = f(t + h / 2, s.z + h / 2 * k1);
  Mat K2 = Df(t + h / 2, s.z + h / 2 * k1, s.V + h / 2 * K1);
  Vec k3 = f(t + h / 2, s.z + h / 2 * k2);
  Mat K3 = Df(t + h / 2, s.z + h / 2 * k2, s.V + h / 2 * K2);
  Vec k4 = f(t + h, s.z + h * k3);
  Mat K4 = Df(t + h, s.z + h * k3, s.V + h * K3);
  StepState out;
  out.z = s.z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  out.V = s.V + h / 6 * (K1 + 2 * K2 + 2 * K3 + K4);
  return out;
}

FlowTrajectory run_flow(const HamiltonianFamily& family, double lambda, const Vec& z0,
                        double horizon, int steps, double norm_cap, bool dense) {
  const int d = static_cast<int>(z0.size());
  Mat J = standard_structure(d / 2);
  FlowTrajectory tr;
  StepState s{z0, Mat::Identity(d, d)};
  const double h = horizon / steps;
  if (dense) {
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    tr.times.push_back(0.0);
    tr.states.push_back(z0);
  }
  for (int k = 0; k < steps; ++k) {
    s = rk4_step(family, lambda, s, k * h, h, J);
    if (s.z.norm() > norm_cap) {
      tr.result.blew_up = true;
      tr.result.endpoint = s.z;
      tr.result.monodromy = s.V;
      return tr;
    }
    if (dense) {
      tr.times.push_back((k + 1) * h);
      tr.states.push_back(s.z);
    }
  }
  // half-step Richardson estimate on the endpoint
  StepState s2{z0, Mat::Identity(d, d)};
  const int steps2 = 2 * steps;
  const double h2 = horizon / steps2;
  for (int k = 0; k < steps2; ++k) s2 = rk4_step(family, lambda, s2, k * h2, h2, J);
  tr.result.endpoint = s2.z;
  tr.result.monodromy = s2.V;
  tr.result.err_estimate = (s2.z - s.z).norm() / 15.0 + 1e-15;
  tr.result.monodromy_defect = symplectic_defect(s2.V);
  if (dense) tr.states.back() = s2.z;
  return tr;
}

}  // namespace

FlowResult flow(const HamiltonianFamily& family, double lambda, const Vec& z0, double horizon,
                int steps, double norm_cap) {
  return run_flow(family, lambda, z0, horizon, steps, norm_cap, false).result;
}

FlowTrajectory flow_dense(const HamiltonianFamily& family, double lambda, const Vec& z0,
                          double horizon, int steps, double norm_cap) {
  return run_flow(family, lambda, z0, horizon, steps, norm_cap, true);
}

BranchPoint newton_bvp(const HamiltonianFamily& family, double lambda, const Vec& z_init,
                       const Vec& affine_offset, int steps, double ftol, int max_iter) {
  const int d = family.dim;
  BranchPoint bp;
  bp.lambda = lambda;
  Vec z = z_init;
  for (int it = 0; it < max_iter; ++it) {
    FlowResult fr = flow(family, lambda, z, family.tau, steps);
    if (fr.blew_up) {
      bp.converged = false;
      bp.z0 = z;
      return bp;
    }
    Vec F = fr.endpoint - family.boundary * z - affine_offset;
    bp.newton_iters = it;
    if (F.norm() <= ftol) {
      bp.converged = true;
      FlowTrajectory tr = flow_dense(family, lambda, z, family.tau, steps);
      bp.z0 = z;
      bp.times = tr.times;
      bp.samples = tr.states;
      bp.boundary_residual = F.norm();
      // independent re-verification at half step
      FlowResult fr2 = flow(family, lambda, z, family.tau, 2 * steps);
      bp.flow_residual = (fr2.endpoint - fr.endpoint).norm();
      return bp;
    }
    Mat Jac = fr.monodromy - family.boundary;
    Eigen::JacobiSVD<Mat> svd(Jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(d - 1);
    const double smax = svd.singularValues()(0);
    Vec step;
    if (smin < 1e-10 * std::max(1.0, smax)) {
      bp.degenerate_jacobian = true;
      // Moore-Penrose step with small-singular-value truncation
      Vec sv = svd.singularValues();
      Vec y = svd.matrixU().transpose() * (-F);
      for (int i = 0; i < d; ++i)
        y(i) = sv(i) > 1e-10 * std::max(1.0, smax) ? y(i) / sv(i) : 0.0;
      step = svd.matrixV() * y;
    } else {
      step = Jac.partialPivLu().solve(-F);
    }
    // mild damping for large steps
    const double cap = 1.0 + z.norm();
    if (step.norm() > cap) step *= cap / step.norm();
    z += step;
  }
  bp.converged = false;
  bp.z0 = z;
  return bp;
}

namespace {

double c0_distance(const BranchPoint& a, const std::function<Vec(double)>& b) {
  double dmax = 0.0;
  for (size_t k = 0; k < a.times.size(); ++k)
    dmax = std::max(dmax, (a.samples[k] - b(a.times[k])).norm());
  return dmax;
}

}  // namespace

double phase_aligned_distance(const HamiltonianFamily& family, const BranchPoint& a,
                              const BranchPoint& b) {
  if (!family.autonomous) {
    double dmax = 0.0;
    for (size_t k = 0; k < a.times.size() && k < b.samples.size(); ++k)
      dmax = std::max(dmax, (a.samples[k] - b.samples[k]).norm());
    return dmax;
  }
  // align over a theta grid refined to 1e-4 tau
  const double tau = family.tau;
  const size_t n = a.times.size();
  auto sample_shifted = [&](double theta) {
    // b extended by boundary relation: b(t + tau) = M b(t); linear interpolation
    double best = 0.0;
    for (size_t k = 0; k < n; ++k) {
      double t = a.times[k] + theta;
      Mat Mpow = Mat::Identity(family.dim, family.dim);
      while (t >= tau) {
        t -= tau;
        Mpow = family.boundary * Mpow;
      }
      while (t < 0) {
        t += tau;
        Mpow = family.boundary.inverse() * Mpow;
      }
      const double x = t / tau * (n - 1);
      const size_t i0 = std::min(n - 2, static_cast<size_t>(std::floor(x)));
      const double w = x - i0;
      Vec bval = (1.0 - w) * b.samples[i0] + w * b.samples[i0 + 1];
      best = std::max(best, (a.samples[k] - Mpow * bval).norm());
    }
    return best;
  };
  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double theta = tau * k / 64.0;
    const double v = sample_shifted(theta);
    if (v < best) {
      best = v;
      best_theta = theta;
    }
  }
  double lo = best_theta - tau / 64.0, hi = best_theta + tau / 64.0;
  while (hi - lo > 1e-4 * tau) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (sample_shifted(m1) < sample_shifted(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::min(best, sample_shifted(0.5 * (lo + hi)));
}

std::vector<BranchPoint> branch_switch(const HamiltonianFamily& family, double mu,
                                       const Mat& kernel_basis, const BranchSwitchOptions& opt) {
  std::vector<BranchPoint> found;
  const double box = std::max(1e-12, family.lambda_hi - family.lambda_lo);
  for (int side : {-1, +1}) {
    for (double dl : opt.dlambdas) {
      const double lambda = mu + side * dl * box;
      if (lambda < family.lambda_lo || lambda > family.lambda_hi) continue;
      auto branch_at = [&](double t) { return family.branch(lambda, t); };
      for (int kc = 0; kc < kernel_basis.cols(); ++kc) {
        Vec dir = kernel_basis.col(kc);
        if (dir.norm() < 1e-12) continue;
        dir.normalize();
        for (double amp : opt.amplitudes) {
          Vec z = family.branch(lambda, 0.0) + amp * opt.scale * dir;
          BranchPoint bp = newton_bvp(family, lambda, z, Vec::Zero(family.dim), opt.steps);
          if (!bp.converged) continue;
          bp.side = side;
          bp.distance_to_branch = c0_distance(bp, branch_at);
          // reject the trivial branch and cutoff artifacts
          if (bp.distance_to_branch <= opt.distinct_factor * 1e-9) continue;
          if (bp.distance_to_branch > opt.search_radius) continue;
          // alignment resolution: one grid step of drift along the orbit
          double drift = 0.0;
          for (size_t k = 0; k + 1 < bp.samples.size(); ++k)
            drift = std::max(drift, (bp.samples[k + 1] - bp.samples[k]).norm());
          const double dedupe_tol =
              std::max(opt.distinct_factor * std::max(1e-9, bp.boundary_residual + 1e-10),
                       2.0 * drift);
          bool duplicate = false;
          for (const BranchPoint& other : found) {
            if (other.side != bp.side || std::abs(other.lambda - bp.lambda) > 1e-12) continue;
            if (phase_aligned_distance(family, bp, other) <= dedupe_tol) {
              duplicate = true;
              break;
            }
          }
          if (!duplicate) found.push_back(bp);
        }
      }
    }
  }
  return found;
}

std::vector<BrakeOrbit> brake_shoot(const HamiltonianFamily& family, double lambda,
                                    const std::vector<Vec>& y_inits, int steps) {
  if (!family.reversible)
    throw std::invalid_argument("brake_shoot: family not flagged reversible");
  const int n = family.half_dim();
  const int d = family.dim;
  Mat N = Mat::Identity(d, d);
  N.topLeftCorner(n, n) *= -1.0;

  std::vector<BrakeOrbit> out;
  for (const Vec& y0 : y_inits) {
    Vec y = y0;
    BrakeOrbit orb;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
      Vec z0 = Vec::Zero(d);
      z0.tail(n) = y;
      FlowResult fr = flow(family, lambda, z0, family.tau / 2.0, steps / 2);
      if (fr.blew_up) break;
      Vec F = fr.endpoint.head(n);
      if (F.norm() <= 1e-10) {
        converged = true;
        orb.residual = F.norm();
        break;
      }
      Mat Jac = fr.monodromy.topRightCorner(n, n);  // d(first n)/d(y)
      Eigen::JacobiSVD<Mat> svd(Jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const double smax = svd.singularValues()(0);
      const double smin = svd.singularValues()(n - 1);
      Vec step;
      if (smin < 1e-10 * std::max(1.0, smax)) {
        orb.degenerate = true;
        Vec sv = svd.singularValues();
        Vec rhs = svd.matrixU().transpose() * (-F);
        for (int i = 0; i < n; ++i)
          rhs(i) = sv(i) > 1e-10 * std::max(1.0, smax) ? rhs(i) / sv(i) : 0.0;
        step = svd.matrixV() * rhs;
      } else {
        step = Jac.partialPivLu().solve(-F);
      }
      y += step;
    }
    if (!converged) continue;
    orb.converged = true;
    orb.y0 = y;
    // extend to the full brake orbit: u(-t) = N u(t), then periodic wrap.
    Vec z0 = Vec::Zero(d);
    z0.tail(n) = y;
    FlowTrajectory half = flow_dense(family, lambda, z0, family.tau / 2.0, steps / 2);
    const size_t m = half.times.size();
    orb.times.clear();
    orb.samples.clear();
    for (size_t k = 0; k < m; ++k) {
      orb.times.push_back(half.times[k]);
      orb.samples.push_back(half.states[k]);
    }
    for (size_t k = 1; k < m; ++k) {
      // u(tau/2 + s) = N u(tau/2 - s): brake symmetry at the half period
      orb.times.push_back(family.tau / 2.0 + half.times[k]);
      orb.samples.push_back(N * half.states[m - 1 - k]);
    }
    // extension residual: flow from u(tau/2) forward and compare
    FlowTrajectory second =
        flow_dense(family, lambda, half.states.back(), family.tau / 2.0, steps / 2);
    double ext = 0.0;
    for (size_t k = 0; k < m; ++k)
      ext = std::max(ext, (second.states[k] - orb.samples[m - 1 + k]).norm());
    orb.extension_residual = ext;
    out.push_back(orb);
  }
  return out;
}

ExtendedOrbit extend_to_line(const std::vector<double>& times, const std::vector<Vec>& u,
                             const Mat& M, int copies, double tol) {
  if (times.size() != u.size() || times.size() < 2)
    throw std::invalid_argument("extend_to_line: bad sampling");
  const double tau = times.back() - times.front();
  Vec defect = u.back() - M * u.front();
  if (defect.norm() > tol)
    throw std::invalid_argument("extend_to_line: boundary residual too large (" +
                                std::to_string(defect.norm()) + ")");
  ExtendedOrbit out;
  out.junction_defect = defect.norm();
  const size_t m = times.size();
  for (int k = -copies; k <= copies; ++k) {
    Mat Mk = Mat::Identity(M.rows(), M.cols());
    for (int j = 0; j < std::abs(k); ++j) Mk = (k > 0 ? Mat(M * Mk) : Mat(M.inverse() * Mk));
    for (size_t s = (k == -copies ? 0 : 1); s < m; ++s) {
      out.times.push_back(times[s] + k * tau);
      out.samples.push_back(Mk * u[s]);
    }
  }
  return out;
}

}  // namespace ham
