#include <doctest.h>

#include <cmath>
#include <random>

#include "ham/dual_action.hpp"

using namespace ham;

namespace {

HamiltonianFamily quartic1(double lo = 0.25, double hi = 1.75) {
  return make_quartic_family(1, 2 * M_PI, Mat::Identity(2, 2), lo, hi);
}

}  // namespace

TEST_CASE("choose_shift: linear family accepts K <= -1 with margin") {
  HamiltonianFamily f = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.5, 1.5);
  ConvexShift s = choose_shift(f);
  CHECK(s.K < 0.0);
  CHECK(s.c1 > 0.0);
  CHECK(s.c2 >= s.c1);
  CHECK(s.margin > 1e-3);
  // Hessian sandwich on samples inside the cutoff
  for (double r : {0.0, 0.5, 1.0}) {
    Vec z(2);
    z << r, 0.2 * r;
    Mat Hk = s.hessHk(1.0, 0.3, z);
    Eigen::SelfAdjointEigenSolver<Mat> es(Hk);
    CHECK(es.eigenvalues().minCoeff() >= s.c1 - 1e-9);
    CHECK(es.eigenvalues().maxCoeff() <= s.c2 + 1e-9);
  }
}

TEST_CASE("choose_shift: already-convex case accepts K = 0") {
  // H = lambda |z|^2/2 with lambda in [0.3, 0.45] and tau = 1: gamma_0(tau) = I,
  // det(gamma_0(tau) - I) = 0 -> K = 0 must be rejected for M = I.
  // Use M = -I instead: det(I - (-I)) != 0 and H already convex.
  HamiltonianFamily f = make_linear_family(1, 1.0, -Mat::Identity(2, 2), 0.3, 0.45);
  ConvexShift s = choose_shift(f);
  CHECK(s.K == 0.0);
}

TEST_CASE("conjugate: quadratic and quartic closed forms") {
  HamiltonianFamily f = quartic1();
  ConvexShift s;
  s.family = &f;
  s.K = 0.0;
  s.R = 100.0;  // effectively no cutoff at test scale
  s.c1 = 0.25;
  s.c2 = 10.0;

  // H_K = |z|^2/2 + |z|^4/4 at lambda = 1: grad = (1 + |z|^2) z; xi = (2,0) -> z* = (1,0)
  Vec xi(2);
  xi << 2.0, 0.0;
  ConjugateEval ce = conjugate(s, 1.0, 0.0, xi);
  CHECK(ce.zstar(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(ce.zstar(1) == doctest::Approx(0.0));
  CHECK(ce.value == doctest::Approx(1.25).epsilon(1e-10));

  // pure quadratic: H = a |z|^2 / 2 -> conjugate = |xi|^2/(2a), z* = xi/a
  HamiltonianFamily lin = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 2.0, 2.0);
  ConvexShift sl;
  sl.family = &lin;
  sl.K = 0.0;
  sl.R = 100.0;
  sl.c1 = 1.0;
  sl.c2 = 4.0;
  Vec xi2(2);
  xi2 << 1.0, -3.0;
  ConjugateEval cl = conjugate(sl, 2.0, 0.0, xi2);
  CHECK((cl.zstar - xi2 / 2.0).norm() < 1e-10);
  CHECK(cl.value == doctest::Approx(xi2.squaredNorm() / 4.0).epsilon(1e-10));
}

TEST_CASE("conjugate: Fenchel round trip and Hessian inverse") {
  HamiltonianFamily f = quartic1();
  ConvexShift s = choose_shift(f);
  std::mt19937 rng(5);
  std::normal_distribution<double> N01(0.0, 0.4);
  for (int trial = 0; trial < 20; ++trial) {
    Vec z(2);
    z << N01(rng), N01(rng);
    const double lam = 0.75, t = 0.4;
    Vec xi = s.gradHk(lam, t, z);
    ConjugateEval ce = conjugate(s, lam, t, xi);
    CHECK((ce.zstar - z).norm() < 1e-10);  // grad H* (grad H_K (z)) = z
    Mat prod = ce.hess_star * s.hessHk(lam, t, z);
    CHECK((prod - Mat::Identity(2, 2)).norm() < 1e-8);
    // sandwich 1/c2 <= (H*)'' <= 1/c1
    Eigen::SelfAdjointEigenSolver<Mat> es(ce.hess_star);
    CHECK(es.eigenvalues().minCoeff() >= 1.0 / s.c2 - 1e-9);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 / s.c1 + 1e-9);
  }
}

TEST_CASE("psi: trivial branch of the linear family is critical") {
  HamiltonianFamily f = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.25, 0.75);
  ConvexShift s = choose_shift(f);
  DualOperatorSpec spec = DualOperatorSpec::make(f.boundary, f.tau, s.K);
  DualAction act(s, spec, 64);
  std::vector<Vec> w0(64, Vec::Zero(2));
  std::vector<Vec> grad;
  act.eval(0.5, w0, &grad);
  double gn = 0.0;
  for (const Vec& g : grad) gn = std::max(gn, g.norm());
  CHECK(gn < 1e-10);
}

TEST_CASE("psi: analytic gradient matches finite differences") {
  HamiltonianFamily f = quartic1();
  ConvexShift s = choose_shift(f);
  DualOperatorSpec spec = DualOperatorSpec::make(f.boundary, f.tau, s.K);
  const int m = 24;
  DualAction act(s, spec, m);
  std::mt19937 rng(11);
  std::normal_distribution<double> N01(0.0, 0.3);
  std::vector<Vec> w(m);
  for (int p = 0; p < m; ++p) {
    w[p] = Vec(2);
    w[p] << N01(rng), N01(rng);
  }
  const double lam = 0.75;
  std::vector<Vec> grad;
  act.eval(lam, w, &grad);
  const double h = f.tau / m;
  for (int dir = 0; dir < 10; ++dir) {
    std::vector<Vec> v(m);
    for (int p = 0; p < m; ++p) {
      v[p] = Vec(2);
      v[p] << N01(rng), N01(rng);
    }
    // analytic directional derivative: (grad, v)_{L2} = sum h grad_p . v_p
    double dd = 0.0;
    for (int p = 0; p < m; ++p) dd += h * grad[p].dot(v[p]);
    const double eps = 1e-6;
    std::vector<Vec> wp(m), wm(m);
    for (int p = 0; p < m; ++p) {
      wp[p] = w[p] + eps * v[p];
      wm[p] = w[p] - eps * v[p];
    }
    const double fd = (act.eval(lam, wp) - act.eval(lam, wm)) / (2 * eps);
    CHECK(std::abs(fd - dd) <= 1e-6 * (1.0 + std::abs(dd)));
  }
}

TEST_CASE("psi value at the trivial branch equals -Phi") {
  // nontrivial branch value check on the quartic family at the zero branch:
  // Phi(0) = 0, so psi(w0 = 0) must be 0 as well.
  HamiltonianFamily f = quartic1();
  ConvexShift s = choose_shift(f);
  DualOperatorSpec spec = DualOperatorSpec::make(f.boundary, f.tau, s.K);
  DualAction act(s, spec, 64);
  std::vector<Vec> w0(64, Vec::Zero(2));
  const double psi0 = act.eval(0.75, w0);
  auto u0 = [&](double) { return Vec(Vec::Zero(2)); };
  const double phi0 = primal_action(f, 0.75, u0);
  CHECK(std::abs(psi0 + phi0) < 1e-9);
}

TEST_CASE("descend_and_recover: linear family converges to the trivial branch") {
  HamiltonianFamily f = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.25, 0.75);
  ConvexShift s = choose_shift(f);
  DualOperatorSpec spec = DualOperatorSpec::make(f.boundary, f.tau, s.K);
  const int m = 64;
  DualAction act(s, spec, m);
  std::mt19937 rng(3);
  std::normal_distribution<double> N01(0.0, 0.02);
  std::vector<Vec> w(m);
  for (int p = 0; p < m; ++p) {
    w[p] = Vec(2);
    w[p] << N01(rng), N01(rng);
  }
  DualState st = act.descend_and_recover(0.5, w);
  CHECK(st.converged);
  double umax = 0.0;
  for (const Vec& u : st.orbit) umax = std::max(umax, u.norm());
  CHECK(umax < 1e-8);
}

TEST_CASE("descend_and_recover: quartic circle orbit at lambda = 0.75") {
  HamiltonianFamily f = quartic1();
  ConvexShift s = choose_shift(f);
  DualOperatorSpec spec = DualOperatorSpec::make(f.boundary, f.tau, s.K);
  const int m = 256;
  DualAction act(s, spec, m);
  const double lam = 0.75, r = 0.5;
  // init near the circle of radius 0.5: w = -J u' - K u for u = r e^{tJ} (1,0)
  auto ucirc = [&](double t) {
    Vec u(2);
    u << r * std::cos(t), r * std::sin(t);
    return u;
  };
  std::vector<Vec> w = act.dual_of_orbit(ucirc);
  DualState st = act.descend_and_recover(lam, w);
  CHECK(st.converged);
  CHECK(st.orbit_boundary_residual < 1e-9);
  CHECK(st.orbit_flow_residual < 1e-7);
  REQUIRE(st.polished.converged);
  // amplitude law on the polished orbit: |u(0)| = 0.5 within 1e-6
  CHECK(std::abs(st.polished.z0.norm() - 0.5) < 1e-6);
  // cell-level recovered orbit agrees to discretization accuracy
  double rmin = 1e9, rmax = 0.0;
  for (const Vec& u : st.orbit) {
    rmin = std::min(rmin, u.norm());
    rmax = std::max(rmax, u.norm());
  }
  CHECK(rmax - rmin < 1e-5);
  CHECK(std::abs(0.5 * (rmin + rmax) - 0.5) < 5e-3);

  // duality value relation Phi(u) = -Psi at the critical point
  // (discrete functionals differ by the O(h^2) quadrature bias)
  const double psi = st.value;
  LambdaInverse li = lambda_inverse(st.w, spec);
  auto uhat = [&](double t) { return Vec(-li.w(t)); };
  const double phi = primal_action(f, lam, uhat);
  CHECK(std::abs(phi + psi) < 5e-3);
  // and the bias shrinks ~4x under cell doubling
  DualAction act2(s, spec, 2 * m);
  std::vector<Vec> w2 = act2.dual_of_orbit(ucirc);
  DualState st2 = act2.descend_and_recover(lam, w2);
  REQUIRE(st2.converged);
  LambdaInverse li2 = lambda_inverse(st2.w, spec);
  auto uhat2 = [&](double t) { return Vec(-li2.w(t)); };
  const double gap1 = std::abs(primal_action(f, lam, uhat) + st.value);
  const double gap2 = std::abs(primal_action(f, lam, uhat2) + st2.value);
  CHECK(gap2 < 0.5 * gap1 + 1e-9);
}
