#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace ham {

using Mat  = Eigen::MatrixXd;
using Vec  = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Standard complex structure J = [[0, -I_n], [I_n, 0]].
Mat standard_structure(int n);

// ||S^T J S - J||_F. Throws on odd dimension.
double symplectic_defect(const Mat& S);

// Validated symplectic matrix. Construction checks the defect.
struct SymplecticMatrix {
  Mat m;
  double tol;

  explicit SymplecticMatrix(Mat entries, double tolerance = 1e-8);

  int dim() const { return static_cast<int>(m.rows()); }
  int half_dim() const { return dim() / 2; }
};

// Symmetric positive (semi)definite square root / logarithm via eigendecomposition.
Mat sym_sqrt(const Mat& A);
Mat sym_log(const Mat& A);

struct PolarFactors {
  Mat P;  // sqrt(S S^T), symmetric positive definite, symplectic when S is
  Mat U;  // orthogonal-symplectic factor, S = P U
};
PolarFactors symplectic_polar(const Mat& S);

// u(S) = U1 + i U2 from the polar factor U = [[U1, -U2],[U2, U1]].
CMat unitary_part(const Mat& S, double defect_tol = 1e-6);

// Ring embedding C^{n x n} -> R^{2n x 2n}, A + iB -> [[A, -B],[B, A]].
Mat real_rep(const CMat& A);
// Inverse of real_rep for matrices in its image.
CMat complex_rep(const Mat& S);

// Principal logarithm of a unitary matrix, skew-Hermitian, phases in (-pi, pi].
CMat unitary_log(const CMat& U);

// Near-kernel of A by SVD: count of singular values < rel_tol * scale where
// scale = max(sigma_max, scale_floor); the floor keeps the threshold meaningful
// when A itself is near zero (full kernel).
// margin (optional) receives sigma_smallest_retained / scale (or +inf),
// basis (optional) receives an orthonormal basis of the near-kernel (columns).
int kernel_dimension(const Mat& A, double rel_tol, double* margin = nullptr,
                     Mat* basis = nullptr, double scale_floor = 0.0);

// Smallest singular value.
double smallest_singular_value(const Mat& A);

// Inertia (m_plus, m_zero, m_minus) of a small symmetric matrix with the given
// absolute threshold for zero classification.
struct Inertia {
  int plus = 0, zero = 0, minus = 0;
  int signature() const { return plus - minus; }
};
Inertia symmetric_inertia(const Mat& A, double zero_tol);

}  // namespace ham
