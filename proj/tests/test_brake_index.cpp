#include <doctest.h>

#include <cmath>

#include "ham/brake.hpp"

using namespace ham;

namespace {

// Exact mode count for the diagonal brake family B = diag(rho, rho) blocks:
// mu1 in the Galerkin-consistent normalization is m^-(Q_{B,K}) + n*floor(K tau/2pi),
// m^- = sum_i #{ m in Z : m * (2pi/tau) in (-rho_i, -K) }.
long long fourier_mu1(const Vec& rhos, double tau, double K) {
  const double w = 2 * M_PI / tau;
  long long mm = 0;
  for (int i = 0; i < rhos.size(); ++i) {
    for (int m = -200; m <= 200; ++m) {
      const double x = m * w;
      if (x > -rhos(i) && x < -K) ++mm;
    }
  }
  return mm + static_cast<long long>(rhos.size()) * std::llround(std::floor(K * tau / (2 * M_PI)));
}

// Diagonal-family closed form (full-period count): n - k + sum [lambda rho tau / pi].
long long ex68_formula(const Vec& rhos, double lambda, double tau) {
  const int n = static_cast<int>(rhos.size());
  int k = 0;
  long long s = 0;
  for (int i = 0; i < n; ++i) {
    double x = lambda * rhos(i) * tau / M_PI;
    double r = x - std::round(x);
    if (std::abs(r) < 1e-9) {
      ++k;
      s += std::llround(x);
    } else {
      s += static_cast<long long>(std::floor(x));
    }
  }
  return n - k + s;
}

int ex68_nullity(const Vec& rhos, double lambda, double tau) {
  int c = 0;
  for (int i = 0; i < rhos.size(); ++i) {
    double x = lambda * rhos(i) * tau / (2 * M_PI);
    if (std::abs(x - std::round(x)) < 1e-9) ++c;
  }
  return c;
}

}  // namespace

TEST_CASE("brake nullities from the half monodromy") {
  // gamma(tau/2) = I: B = C = 0 blocks
  auto nus = brake_nullities(Mat::Identity(4, 4));
  CHECK(nus.first == 2);
  CHECK(nus.second == 2);

  // n=1, rotation by pi: off-diagonal entries sin(pi) = 0
  Mat R(2, 2);
  R << std::cos(M_PI), -std::sin(M_PI), std::sin(M_PI), std::cos(M_PI);
  auto nR = brake_nullities(R);
  CHECK(nR.first == 1);
  CHECK(nR.second == 1);

  Mat D(2, 2);
  D << 2.0, 0.0, 0.0, 0.5;
  auto nD = brake_nullities(D);
  CHECK(nD.first == 1);
  CHECK(nD.second == 1);
}

TEST_CASE("brake indices: diagonal family against the exact Fourier normalization") {
  // mu1 (half-interval, dual-oracle-consistent) equals the Fourier value,
  // which is K-independent; spot check several (rho, tau).
  struct Case {
    double rho, tau, K;
  };
  for (const Case& c : {Case{1.0, 2 * M_PI, -0.5}, Case{0.3, 2 * M_PI, -0.5},
                        Case{2.5, 2 * M_PI, -0.5}, Case{1.0, M_PI, -0.7},
                        Case{-1.0, 2 * M_PI, -1.5}, Case{-2.0, 2 * M_PI, -2.5}}) {
    Vec rhos(1);
    rhos << c.rho;
    CoefficientPath B = CoefficientPath::rotation_blocks(rhos, c.tau);
    REQUIRE(B.reversible);
    BrakeIndices bi = brake_indices(B, 2048);
    REQUIRE(bi.status == IndexStatus::Ok);
    CHECK(bi.mu1 == fourier_mu1(rhos, c.tau, c.K));
    CHECK(bi.mu1 == bi.mu2);  // diagonal constant family
  }
}

TEST_CASE("brake indices: full-period count matches the diagonal-family closed form") {
  Vec rhos(1);
  rhos << 1.0;
  const double tau = 2 * M_PI;
  // lambda rho tau / pi = 2 lambda: sweep through (0,1), (1,2), =2, (2,3), =4 patterns
  for (double lambda : {0.3, 0.8, 1.0, 1.3, 2.0}) {
    Vec lr = lambda * rhos;
    CoefficientPath B = CoefficientPath::rotation_blocks(lr, tau);
    BrakeIndices bi = brake_indices(B, 2048);
    REQUIRE(bi.status == IndexStatus::Ok);
    CHECK(bi.full_period_count1 == ex68_formula(rhos, lambda, tau));
    CHECK(bi.full_period_count2 == ex68_formula(rhos, lambda, tau));
    CHECK(bi.nu1 == ex68_nullity(rhos, lambda, tau));
  }
  // n = 2 instance
  Vec r2(2);
  r2 << 1.0, 2.5;
  for (double lambda : {0.4, 1.0}) {
    Vec lr = lambda * r2;
    CoefficientPath B = CoefficientPath::rotation_blocks(lr, tau);
    BrakeIndices bi = brake_indices(B, 2048);
    REQUIRE(bi.status == IndexStatus::Ok);
    CHECK(bi.full_period_count1 == ex68_formula(r2, lambda, tau));
    CHECK(bi.nu1 == ex68_nullity(r2, lambda, tau));
  }
}

TEST_CASE("brake monotonicity (mu1 + nu1 nondecreasing)") {
  Vec r1(1), r2(1);
  r1 << 0.6;
  r2 << 1.4;
  const double tau = 2 * M_PI;
  BrakeIndices b1 = brake_indices(CoefficientPath::rotation_blocks(r1, tau), 2048);
  BrakeIndices b2 = brake_indices(CoefficientPath::rotation_blocks(r2, tau), 2048);
  CHECK(b2.mu1 >= b1.mu1 + b1.nu1);
}

TEST_CASE("brake indices: non-reversible coefficient is refused") {
  Mat Bc(2, 2);
  Bc << 1.0, 0.5, 0.5, 1.0;  // off-diagonal constant violates (B2)
  CoefficientPath B = CoefficientPath::constant(Bc, 2 * M_PI);
  CHECK_FALSE(B.reversible);
  CHECK_THROWS(brake_indices(B, 256));
}

TEST_CASE("brake indices: step doubling stability") {
  Vec rhos(2);
  rhos << 0.7, 1.9;
  CoefficientPath B = CoefficientPath::rotation_blocks(rhos, 5.0);
  BrakeIndices a = brake_indices(B, 1024);
  BrakeIndices b = brake_indices(B, 2048);
  CHECK(a.mu1 == b.mu1);
  CHECK(a.mu2 == b.mu2);
  CHECK(a.nu1 == b.nu1);
  CHECK(a.full_period_count1 == b.full_period_count1);
}

TEST_CASE("brake maslov: time-dependent reversible coefficient") {
  // B(t) = (1 + 0.3 cos(2 pi t / tau)) I: satisfies (B1)-(B2); nu from blocks.
  const double tau = 2 * M_PI;
  CoefficientPath B = CoefficientPath::from_function(
      2, tau,
      [tau](double t) {
        return Mat((1.0 + 0.3 * std::cos(2 * M_PI * t / tau)) * Mat::Identity(2, 2));
      },
      true, true);
  BrakeIndices bi = brake_indices(B, 2048);
  REQUIRE(bi.status == IndexStatus::Ok);
  // sanity: integer outputs stable under refinement
  BrakeIndices bj = brake_indices(B, 4096);
  CHECK(bi.mu1 == bj.mu1);
  CHECK(bi.nu1 == bj.nu1);
}
