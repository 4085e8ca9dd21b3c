#pragma once

#include "ham/index.hpp"
#include "ham/path.hpp"

namespace ham {

// Brake-orbit indices of a reversible linear system, from the path on [0, tau/2].
//
// mu1/mu2 follow the Lagrangian crossing count on [0, tau/2] with conventions
// frozen against the dual Galerkin oracle normalization:
//   mu_k = -m^-(Gamma_0|U_k) + sum_{t in (0,tau/2)} sign(Gamma_t) - m^-(Gamma_{tau/2}),
// where Gamma_t(w) = <w, B(t) w> on gamma(t)U_k ∩ U_k.
//
// full_period_count1/2 are the same counts taken over [0, tau] with the start
// contributing +m^+ instead of -m^-; on diagonal constant families this equals
// the closed form n - k + sum_i [lambda rho_i tau / pi].
struct BrakeIndices {
  int mu1 = 0, mu2 = 0;
  int nu1 = 0, nu2 = 0;
  long long full_period_count1 = 0, full_period_count2 = 0;
  Mat half_monodromy;
  IndexStatus status = IndexStatus::Ok;
  std::string note;
};

// Kernel dimensions of the B and C blocks of gamma(tau/2) = [[A,B],[C,D]].
std::pair<int, int> brake_nullities(const Mat& gamma_half, double tol = 1e-8);

// U_k crossing index over the given interval; path must start at I.
// k = 1 -> U_1 = {0} x R^n, k = 2 -> U_2 = R^n x {0}.
long long brake_maslov(const SymplecticPath& gamma_half, int k, const IndexOptions& opt = {});

// Convenience driver: integrates the half path of the reversible coefficient
// and assembles all four indices plus the full-period crossing counts.
BrakeIndices brake_indices(const CoefficientPath& B, int steps = 4096,
                           const IndexOptions& opt = {});

}  // namespace ham
