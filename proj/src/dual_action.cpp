#include "ham/dual_action.hpp"

#include <cmath>

namespace ham {

DualAction::DualAction(const ConvexShift& shift, const DualOperatorSpec& spec, int cells)
    : shift_(shift), spec_(spec), m_(cells), h_(spec.tau / cells) {
  gram_ = assemble_lambda_gram(spec_, m_);
}

double DualAction::eval(double lambda, const std::vector<Vec>& w,
                        std::vector<Vec>* grad) const {
  const int d = 2 * spec_.n;
  Vec wflat(m_ * d);
  for (int p = 0; p < m_; ++p) wflat.segment(p * d, d) = w[p];
  Vec gw = gram_ * wflat;
  double value = 0.5 * wflat.dot(gw);
  if (grad) grad->assign(m_, Vec::Zero(d));
  for (int p = 0; p < m_; ++p) {
    ConjugateEval ce = conjugate(shift_, lambda, cell_mid(p), w[p]);
    value += h_ * ce.value;
    if (grad) (*grad)[p] = gw.segment(p * d, d) / h_ + ce.zstar;
  }
  return value;
}

Mat DualAction::gradient_jacobian(double lambda, const std::vector<Vec>& w) const {
  const int d = 2 * spec_.n;
  Mat Jac = gram_ / h_;
  for (int p = 0; p < m_; ++p) {
    ConjugateEval ce = conjugate(shift_, lambda, cell_mid(p), w[p]);
    Jac.block(p * d, p * d, d, d) += ce.hess_star;
  }
  return Jac;
}

DualState DualAction::descend_and_recover(double lambda, const std::vector<Vec>& w_init,
                                          double grad_tol, int max_iter) const {
  const int d = 2 * spec_.n;
  DualState st;
  st.lambda = lambda;
  st.mid.resize(m_);
  for (int p = 0; p < m_; ++p) st.mid[p] = cell_mid(p);
  std::vector<Vec> w = w_init;
  if (static_cast<int>(w.size()) != m_)
    throw std::invalid_argument("descend_and_recover: w_init has wrong cell count");

  auto l2norm = [&](const std::vector<Vec>& g) {
    double s = 0.0;
    for (const Vec& v : g) s += h_ * v.squaredNorm();
    return std::sqrt(s);
  };

  std::vector<Vec> grad;
  double value = eval(lambda, w, &grad);
  double res = l2norm(grad);
  int it = 0;
  for (; it < max_iter && res > grad_tol; ++it) {
    // Gauss-Newton step on 1/2 ||grad||^2 using the Gateaux derivative.
    Mat Jac = gradient_jacobian(lambda, w);
    Vec gflat(m_ * d);
    for (int p = 0; p < m_; ++p) gflat.segment(p * d, d) = grad[p];
    Vec step = Jac.partialPivLu().solve(-gflat);
    // Armijo on the residual merit.
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      std::vector<Vec> wtry(m_);
      for (int p = 0; p < m_; ++p) wtry[p] = w[p] + alpha * step.segment(p * d, d);
      std::vector<Vec> gtry;
      eval(lambda, wtry, &gtry);
      const double rtry = l2norm(gtry);
      if (rtry < (1.0 - 1e-4 * alpha) * res) {
        w = wtry;
        grad = gtry;
        res = rtry;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // stagnation
  }
  value = eval(lambda, w, &grad);
  res = l2norm(grad);

  st.w = w;
  st.value = value;
  st.grad = grad;
  st.grad_norm = res;
  st.converged = res <= grad_tol;
  st.iterations = it;

  // Orbit recovery: u(t) = grad H_K^*(lambda, t; w(t)) at midpoints;
  // the continuous representative is u_hat = -Lambda^{-1} w.
  st.orbit.resize(m_);
  for (int p = 0; p < m_; ++p)
    st.orbit[p] = conjugate(shift_, lambda, cell_mid(p), w[p]).zstar;
  LambdaInverse li = lambda_inverse(w, spec_);
  Mat J = standard_structure(spec_.n);
  double flow_res = 0.0;
  for (int p = 0; p < m_; ++p) {
    const double t = cell_mid(p);
    Vec uhat = -li.w(t);
    const double fd = h_ / 64.0;
    Vec du = -(li.w(t + fd) - li.w(t - fd)) / (2 * fd);
    flow_res = std::max(flow_res,
                        (du - J * shift_.family->gradH(lambda, t, uhat)).norm());
  }
  st.discretization_defect = flow_res;
  Vec u0 = -li.w(0.0);

  // Newton flow-polish seeded at u_hat(0): refines the O(h^2)-accurate start
  // to a machine-accurate orbit of the flow, staying on the same orbit.
  if (st.converged) {
    BranchPoint bp = newton_bvp(*shift_.family, lambda, u0, Vec::Zero(2 * spec_.n));
    if (bp.converged && (bp.z0 - u0).norm() <= 0.1 * (1.0 + u0.norm())) {
      st.polished = bp;
      st.orbit_boundary_residual = bp.boundary_residual;
      st.orbit_flow_residual = bp.flow_residual;
    } else {
      st.orbit_boundary_residual = (Vec(-li.w(spec_.tau)) - spec_.M * u0).norm();
      st.orbit_flow_residual = flow_res;
    }
  } else {
    st.orbit_boundary_residual = (Vec(-li.w(spec_.tau)) - spec_.M * u0).norm();
    st.orbit_flow_residual = flow_res;
  }
  return st;
}

std::vector<Vec> DualAction::dual_of_orbit(const std::function<Vec(double)>& u) const {
  const int d = 2 * spec_.n;
  Mat J = standard_structure(spec_.n);
  std::vector<Vec> w(m_);
  for (int p = 0; p < m_; ++p) {
    const double t = cell_mid(p);
    const double fd = h_ / 64.0;
    Vec du = (u(t + fd) - u(t - fd)) / (2 * fd);
    w[p] = -(J * du) - spec_.K * u(t);
  }
  (void)d;
  return w;
}

double primal_action(const HamiltonianFamily& family, double lambda,
                     const std::function<Vec(double)>& u, int samples) {
  Mat J = standard_structure(family.dim / 2);
  const double h = family.tau / samples;
  double acc = 0.0;
  for (int p = 0; p < samples; ++p) {
    const double t = (p + 0.5) * h;
    const double fd = h / 16.0;
    Vec du = (u(t + fd) - u(t - fd)) / (2 * fd);
    acc += h * (0.5 * (J * du).dot(u(t)) + family.H(lambda, t, u(t)));
  }
  return acc;
}

}  // namespace ham
