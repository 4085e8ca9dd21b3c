#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ham/path.hpp"
#include "ham/rotation.hpp"

namespace ham {

struct NullityResult {
  int nu = 0;
  double margin = 0.0;  // smallest retained singular value / sigma_max
  Mat kernel_basis;     // columns: near-kernel of gamma_end - M
};

// dim Ker(gamma_end - M) by singular value threshold tol * sigma_max.
NullityResult nullity_rel(const Mat& gamma_end, const Mat& M, double tol = 1e-8);

struct CrossingRecord {
  double t = 0.0;
  int kernel_dim = 0;
  int signature = 0;
  double margin = 0.0;        // kernel margin at the crossing
  double form_min_abs = 0.0;  // smallest |eigenvalue| of the crossing form
  bool at_endpoint = false;
};

enum class IndexStatus { Ok, Unresolved };

struct IndexReport {
  long long i = 0;
  int nu = 0;
  std::vector<CrossingRecord> crossings;
  double cz = 0.0;  // mu_CZ = i + nu/2 (M = I context)
  bool cz_valid = false;
  IndexStatus status = IndexStatus::Ok;
  std::string note;
  double kernel_margin = 0.0;
  // product-path bracket bookkeeping for general M.
  bool bracket_applied = false;
  double bracket_value = 0.0;     // i_tau(product) - Delta_xi / pi before [ . ]
  double bracket_fraction = 0.0;  // distance to nearest integer
};

struct IndexOptions {
  int scan_samples = 2048;       // dense scan resolution (at least the path grid)
  double kernel_tol = 1e-8;      // relative singular value threshold
  double form_tol = 1e-6;        // relative crossing-form degeneracy threshold
  int max_twist_attempts = 6;    // twist ladder size
  double twist_base = 1e-4;      // first nonzero twist angle
  int first_twist_attempt = 0;   // > 0 forces the twist (kinked-junction paths)
  int connect_samples = 512;     // xi path sampling for Delta_xi
  double connect_loop_delta = 1e-3;
};

// Long-index i_tau of a path starting at the identity, relative to M = I,
// by the crossing algorithm with frozen endpoint conventions:
//   i = (m+(B(0)) - n) + sum over interior crossings of sign(Gamma) - m-(Gamma_tau).
// Degenerate crossing forms are retried on a twisted path (endpoints fixed).
IndexReport p_path_index(const PathSourcePtr& src, const IndexOptions& opt = {});

// Maslov-type index (i_{tau,M}, nu_{tau,M}) of gamma relative to M.
// M = I uses the direct crossing algorithm; general M uses the product path
// (gamma M^{-1}) * xi with xi(tau) = M^{-1} and subtracts Delta_xi / pi.
IndexReport maslov_index(const SymplecticPath& gamma, const SymplecticMatrix& M,
                         const IndexOptions& opt = {});

// mu_CZ = i_tau + dim Ker(I - gamma(tau)) / 2.
double conley_zehnder(const SymplecticPath& gamma, const IndexOptions& opt = {});

// Maslov-type index of a path on [a,b] (Eq-style i(gamma,[a,b]) = i1(phi) - i1(beta)):
// catenation of the basepath (from I to gamma(a)) with the restricted path.
long long interval_index(const PathSourcePtr& gamma, double a, double b,
                         const PathSourcePtr& basepath, const IndexOptions& opt = {});

struct StaircaseStep {
  double lo = 0.0, hi = 0.0;  // open/closed per closure flags below
  long long i = 0;
};

struct StaircaseProfile {
  std::vector<double> crossings;           // Gamma(A) in (0, lambda_max]
  std::vector<int> crossing_nullities;     // nu at each crossing
  std::vector<StaircaseStep> steps;        // i on each open interval between crossings
  std::vector<long long> i_at_crossings;   // value exactly at each crossing
  bool definite_positive = true;
};

// Index profile of lambda -> (i_{1,M}(exp(lambda t J A)), nu) for definite A
// over lambda in (0, lambda_max]. Throws for indefinite A.
StaircaseProfile staircase_profile(const Mat& A, const SymplecticMatrix& M,
                                   double lambda_max, const IndexOptions& opt = {});

}  // namespace ham
