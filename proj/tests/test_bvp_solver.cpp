#include <doctest.h>

#include <cmath>
#include <random>

#include "ham/flow.hpp"

using namespace ham;

namespace {

HamiltonianFamily quartic1() {
  return make_quartic_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.25, 1.75);
}

}  // namespace

TEST_CASE("flow: linear rotation closes after a period") {
  HamiltonianFamily f = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 1.0, 1.0);
  Vec z0(2);
  z0 << 1.0, 0.0;
  FlowResult fr = flow(f, 1.0, z0, 2 * M_PI);
  CHECK((fr.endpoint - z0).norm() < 1e-10);
  CHECK((fr.monodromy - Mat::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("flow: quartic circle closed form") {
  HamiltonianFamily f = quartic1();
  Vec z0(2);
  z0 << 0.5, 0.0;
  // u' = J (lambda + |u|^2) u with lambda = 0.75: angular speed 1
  FlowResult fr = flow(f, 0.75, z0, 2 * M_PI);
  CHECK((fr.endpoint - z0).norm() < 1e-9);
}

TEST_CASE("flow: monodromy symplectic on random cubic-type Hamiltonians") {
  std::mt19937 rng(17);
  std::normal_distribution<double> N01(0.0, 0.4);
  for (int trial = 0; trial < 5; ++trial) {
    // rotation family with random rho acts as a generic structured test;
    // add a polynomial tail for nonlinearity
    std::vector<double> cs = {0.2 * std::abs(N01(rng))};
    HamiltonianFamily f =
        make_polynomial_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.4, 1.2, cs);
    Vec z0(2);
    z0 << N01(rng), N01(rng);
    FlowResult fr = flow(f, 0.8, z0, 2 * M_PI, 2048);
    CHECK(fr.monodromy_defect < 1e-7);
    CHECK((flow(f, 0.8, z0, 2 * M_PI, 4096).endpoint - fr.endpoint).norm() <
          16 * fr.err_estimate + 1e-13);
  }
}

TEST_CASE("flow: energy conservation along autonomous orbits") {
  HamiltonianFamily f = quartic1();
  Vec z0(2);
  z0 << 0.45, -0.2;
  FlowTrajectory tr = flow_dense(f, 0.9, z0, 2 * M_PI, 4096);
  const double H0 = f.H(0.9, 0.0, z0);
  double dev = 0.0;
  for (const Vec& z : tr.states) dev = std::max(dev, std::abs(f.H(0.9, 0.0, z) - H0));
  CHECK(dev <= 1e-7);
}

TEST_CASE("newton_bvp: trivial and closed-form branches") {
  HamiltonianFamily f = quartic1();
  // trivial branch from zero init
  BranchPoint triv = newton_bvp(f, 0.5, Vec::Zero(2), Vec::Zero(2));
  CHECK(triv.converged);
  CHECK(triv.z0.norm() < 1e-9);

  // closed-form circle branch at lambda = 0.99: |z| = sqrt(1 - 0.99) = 0.1
  Vec init(2);
  init << 0.1, 0.0;
  BranchPoint bp = newton_bvp(f, 0.99, init, Vec::Zero(2));
  CHECK(bp.converged);
  CHECK(std::abs(bp.z0.norm() - 0.1) < 1e-8);
  CHECK(bp.boundary_residual <= 1e-9);
  CHECK(bp.flow_residual <= 1e-8);

  // linear family off-resonance: unique solution 0
  HamiltonianFamily lin = make_linear_family(1, 2 * M_PI, Mat::Identity(2, 2), 0.3, 0.7);
  Vec small(2);
  small << 0.05, -0.03;
  BranchPoint z = newton_bvp(lin, 0.6, small, Vec::Zero(2));
  CHECK(z.converged);
  CHECK(z.z0.norm() < 1e-9);
}

TEST_CASE("branch_switch: quartic one-sided branch at mu = 1") {
  HamiltonianFamily f = quartic1();
  Mat kernel(2, 2);
  kernel << 1, 0, 0, 1;  // full kernel at mu = 1 (gamma(tau) = I)
  BranchSwitchOptions opt;
  opt.dlambdas = {0.05 / 1.5, 0.01 / 1.5};  // lambda box is 1.5 wide
  opt.search_radius = 0.3;
  std::vector<BranchPoint> pts = branch_switch(f, 1.0, kernel, opt);
  bool found_below = false, found_above = false;
  for (const BranchPoint& bp : pts) {
    if (bp.side < 0) {
      found_below = true;
      CHECK(std::abs(bp.z0.norm() - std::sqrt(1.0 - bp.lambda)) < 1e-6);
    }
    if (bp.side > 0) found_above = true;
  }
  CHECK(found_below);
  CHECK_FALSE(found_above);  // one-sided branch
}

TEST_CASE("branch_switch: even family solutions come in +/- pairs") {
  HamiltonianFamily f = quartic1();
  Mat kernel = Mat::Identity(2, 2);
  BranchSwitchOptions opt;
  opt.dlambdas = {0.05 / 1.5};
  opt.search_radius = 0.3;
  std::vector<BranchPoint> pts = branch_switch(f, 1.0, kernel, opt);
  // for every found point, -z0 is also a solution; the de-dup keeps distinct
  // representatives (phase alignment may identify them on circles)
  for (const BranchPoint& bp : pts) {
    BranchPoint mirror = newton_bvp(f, bp.lambda, Vec(-bp.z0), Vec::Zero(2));
    CHECK(mirror.converged);
    CHECK(std::abs(mirror.z0.norm() - bp.z0.norm()) < 1e-8);
  }
}

TEST_CASE("branch points converge monotonically to the trivial branch") {
  HamiltonianFamily f = quartic1();
  double prev = 1e9;
  for (double lambda : {0.90, 0.95, 0.99, 0.999}) {
    Vec init(2);
    init << std::sqrt(1.0 - lambda) * 1.2, 0.0;
    BranchPoint bp = newton_bvp(f, lambda, init, Vec::Zero(2));
    REQUIRE(bp.converged);
    double c0 = 0.0;
    for (const Vec& s : bp.samples) c0 = std::max(c0, s.norm());
    CHECK(c0 < prev);
    prev = c0;
    // energy conservation along the emitted orbit
    const double H0 = f.H(lambda, 0.0, bp.samples.front());
    double dev = 0.0;
    for (const Vec& s : bp.samples) dev = std::max(dev, std::abs(f.H(lambda, 0.0, s) - H0));
    CHECK(dev <= 1e-7);
  }
}

TEST_CASE("brake_shoot: reversible family") {
  HamiltonianFamily f = quartic1();
  REQUIRE(f.reversible);
  std::vector<Vec> inits;
  Vec y(1);
  y << 0.316;  // near sqrt(1 - 0.9)
  inits.push_back(y);
  std::vector<BrakeOrbit> orbits = brake_shoot(f, 0.9, inits);
  REQUIRE(orbits.size() == 1);
  const BrakeOrbit& orb = orbits[0];
  CHECK(orb.converged);
  CHECK(std::abs(orb.y0.norm() - std::sqrt(0.1)) < 1e-6);
  CHECK(orb.extension_residual <= 1e-8);

  // non-reversible family is refused
  HamiltonianFamily nf = quartic1();
  nf.reversible = false;
  CHECK_THROWS(brake_shoot(nf, 0.9, inits));
}

TEST_CASE("extend_to_line") {
  // constant u = c with M c = c
  Mat M = Mat::Identity(2, 2);
  std::vector<double> ts = {0.0, 0.5, 1.0};
  Vec c(2);
  c << 0.3, -0.1;
  std::vector<Vec> u = {c, c, c};
  ExtendedOrbit ext = extend_to_line(ts, u, M, 2);
  CHECK(ext.samples.size() == 11);  // 5 copies, junction samples shared
  for (size_t k = 0; k + 1 < ext.times.size(); ++k) CHECK(ext.times[k] < ext.times[k + 1]);
  for (const Vec& s : ext.samples) CHECK((s - c).norm() < 1e-12);

  // rotation arc with M = e^{theta J}
  const double theta = 0.8;
  Mat R(2, 2);
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const int m = 64;
  std::vector<double> ts2(m + 1);
  std::vector<Vec> u2(m + 1);
  for (int k = 0; k <= m; ++k) {
    ts2[k] = theta * k / m;
    Mat Rt(2, 2);
    Rt << std::cos(ts2[k]), -std::sin(ts2[k]), std::sin(ts2[k]), std::cos(ts2[k]);
    u2[k] = Rt * c;
  }
  ExtendedOrbit ext2 = extend_to_line(ts2, u2, R, 1);
  CHECK(ext2.junction_defect < 1e-9);
  // u_M(t + tau) = M u_M(t) on overlapping samples
  for (size_t k = 0; k + m < ext2.samples.size(); ++k)
    CHECK((ext2.samples[k + m] - R * ext2.samples[k]).norm() < 1e-9);

  // boundary violation rejected
  std::vector<Vec> bad = u2;
  bad.back() += Vec::Ones(2);
  CHECK_THROWS(extend_to_line(ts2, bad, R, 1));
}
