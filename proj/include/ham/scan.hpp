#pragma once

#include "ham/family.hpp"
#include "ham/flow.hpp"
#include "ham/index.hpp"

namespace ham {

enum class ScanMode { FixedPeriod, AutonomousOrbit, EquilibriumOrbit, Brake };

enum class Classification {
  None,
  NecessaryOnly,
  Jump,
  Rabinowitz,
  MonotoneFamily,
  OrbitJump,
  OrbitRabinowitz,
  EquilibriumOrbit,
  BrakeJump,
  BrakeRabinowitz,
  DeformationCrossing,
  Unresolved,
};

const char* to_string(Classification c);

struct ProfilePoint {
  double lambda = 0.0;
  long long i = 0;
  int nu = 0;
  // brake mode carries (mu1, nu1) in (i, nu)
  IndexStatus status = IndexStatus::Ok;
};

struct Candidate {
  double mu = 0.0;
  int nu_mu = 0;
  long long i_mu = 0;
  long long i_left = 0, i_right = 0;  // flanking values at zero-nullity points
  double lambda_left = 0.0, lambda_right = 0.0;
  Classification classification = Classification::None;
  std::string evidence;
  Mat kernel_basis;  // near-kernel of gamma_mu(tau) - M
  bool gate_a = true;  // equilibrium/brake symmetry gates
};

struct ScanReport {
  std::vector<ProfilePoint> profile;
  std::vector<Candidate> candidates;
  ScanMode mode = ScanMode::FixedPeriod;
  int steps = 4096;
  double lambda_resolution = 0.0;
  bool monotone_hint = false;
};

struct ScanOptions {
  int steps = 4096;
  int grid = 33;
  double refine_floor = 1e-6;  // resolution floor in lambda
  bool monotone_family = false;  // Hhat'' > 0 along the branch (monotone staircase)
  IndexOptions index;
};

// lambda -> (i_{tau,M}(gamma_lambda), nu) along the trivial branch.
std::vector<ProfilePoint> index_profile(const HamiltonianFamily& family,
                                        const std::vector<double>& grid,
                                        const ScanOptions& opt = {});

// Locate and classify bifurcation candidates per the index-jump criteria.
ScanReport classify(const HamiltonianFamily& family, ScanMode mode,
                    const ScanOptions& opt = {});

// Fixed Hamiltonian (no parameter): crossing times of dim Ker(gamma_B(t)-M) > 0
// on (0, tau) for definite Hessian along the branch, plus the staircase of
// interval indices between crossings.
struct DeformationReport {
  std::vector<double> crossing_times;
  std::vector<int> nullities;
  std::vector<long long> interval_index;  // i on each open interval
  bool hessian_positive = true;
  bool applicable = true;
  std::string note;
};
DeformationReport deformation_scan(const HamiltonianFamily& family, double lambda,
                                   const ScanOptions& opt = {});

}  // namespace ham
