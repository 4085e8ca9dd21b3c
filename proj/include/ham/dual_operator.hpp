#pragma once

#include <functional>
#include <optional>

#include "ham/index.hpp"
#include "ham/path.hpp"

namespace ham {

// Nondegenerate data for Lambda_{M,tau,K} u = J u' + K u on W^{1,2}_M.
struct DualOperatorSpec {
  Mat M;
  double tau = 0.0;
  double K = 0.0;
  int n = 0;
  double margin = 0.0;  // smallest singular value of (I - gamma_K(tau)^{-1} M)

  static DualOperatorSpec make(const Mat& M, double tau, double K, double min_margin = 1e-8);
};

// Scan a candidate list for K with det(e^{K tau J} - M) margin > margin_req and
// B - K I >= eps_req on samples.
std::optional<DualOperatorSpec> choose_shift_K(const Mat& M, const CoefficientPath& B,
                                               double eps_req = 0.1, double margin_req = 1e-3);

// Exact inverse of Lambda on piecewise-constant input: u is constant u[p] on the
// p-th of m uniform cells. The result is evaluable anywhere on [0, tau].
struct LambdaInverse {
  DualOperatorSpec spec;
  std::vector<Vec> cells;        // input cell values
  Vec w0;                        // w(0)
  std::function<Vec(double)> w;  // exact solution
  double boundary_residual = 0.0;
  double equation_residual = 0.0;  // max |J w' + K w - u| at cell midpoints
};
LambdaInverse lambda_inverse(const std::vector<Vec>& u_cells, const DualOperatorSpec& spec);

struct GalerkinAssembly {
  int basis_size = 0;      // number of cells (general) / modes per pair (brake)
  std::string basis;       // description
  Mat G;                   // 2 q(phi_i, phi_j), dense symmetric
  Vec eigenvalues;         // sorted; filled when the dimension is small
  double asymmetry = 0.0;  // max |G - G^T| before symmetrization
};

struct MorseCount {
  int m_minus = 0;
  int m_zero = 0;
  double gap = 0.0;
  bool converged = false;  // counts agreed between m and 2m
};

// Morse counts of a dense symmetric matrix: eigenvalues < -gap and in [-gap, gap],
// via Householder tridiagonalization + Sturm bisection counts.
std::pair<int, int> symmetric_counts(const Mat& G, double gap);

// Gram matrix (Lambda^{-1} phi_i, phi_j)_{L^2} alone, on the piecewise-constant
// basis over an m-cell uniform grid (closed-form per-cell integrals).
Mat assemble_lambda_gram(const DualOperatorSpec& spec, int m);

// q_{M,B|K}(u,v) = 1/2 [ (Lambda^{-1} u, v) + (C u, v) ], C = (B - K)^{-1},
// on piecewise-constant vector fields over an m-cell uniform grid.
// gap_override > 0 replaces the default zero-classification gap.
GalerkinAssembly assemble_dual_form(const CoefficientPath& B, const DualOperatorSpec& spec,
                                    int m);
MorseCount count_from_assembly(const GalerkinAssembly& A, double gap_override = 0.0);

// Assemble at m, certify against 2m; converged = counts agree.
std::pair<GalerkinAssembly, MorseCount> assemble_and_count(const CoefficientPath& B,
                                                           const DualOperatorSpec& spec, int m,
                                                           double gap_override = 0.0);

// Brake form Q_{B,K} on L_tau (odd sines x first block, even cosines x second),
// m modes per coordinate pair; K must avoid (2pi/tau) Z and satisfy B - K >= eps.
GalerkinAssembly assemble_brake_form(const CoefficientPath& B, double K, int m);
std::pair<GalerkinAssembly, MorseCount> brake_assemble_and_count(const CoefficientPath& B,
                                                                 double K, int m,
                                                                 double gap_override = 0.0);

// I_{tau,M}(B1, B2) = sum over s in [0,1) of nu_{tau,M}((1-s)B1 + s B2),
// for B1 < B2 pointwise; nullity scan with bisection refinement.
long long relative_morse(const CoefficientPath& B1, const CoefficientPath& B2, const Mat& M,
                         int steps = 1024, double tol = 1e-8);

}  // namespace ham
