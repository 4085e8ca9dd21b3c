#include "ham/linalg.hpp"

#include <cmath>
#include <limits>

namespace ham {

Mat standard_structure(int n) {
  if (n < 1) throw std::invalid_argument("standard_structure: n must be >= 1");
  Mat J = Mat::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -Mat::Identity(n, n);
  J.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return J;
}

double symplectic_defect(const Mat& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0)
    throw std::invalid_argument("symplectic_defect: matrix must be square of even dimension");
  const int n = static_cast<int>(S.rows()) / 2;
  Mat J = standard_structure(n);
  return (S.transpose() * J * S - J).norm();
}

SymplecticMatrix::SymplecticMatrix(Mat entries, double tolerance)
    : m(std::move(entries)), tol(tolerance) {
  const double d = symplectic_defect(m);
  if (d > tol)
    throw std::invalid_argument("SymplecticMatrix: defect " + std::to_string(d) +
                                " exceeds tolerance " + std::to_string(tol));
}

Mat sym_sqrt(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  Vec d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d(i) = std::sqrt(std::max(d(i), 0.0));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Mat sym_log(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  Vec d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) throw std::invalid_argument("sym_log: matrix not positive definite");
    d(i) = std::log(d(i));
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

PolarFactors symplectic_polar(const Mat& S) {
  PolarFactors f;
  f.P = sym_sqrt(S * S.transpose());
  f.U = f.P.ldlt().solve(S);
  // One orthogonality refinement pass; P is well conditioned at desk scale.
  Eigen::JacobiSVD<Mat> svd(f.U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  f.U = svd.matrixU() * svd.matrixV().transpose();
  return f;
}

CMat unitary_part(const Mat& S, double defect_tol) {
  const double d = symplectic_defect(S);
  if (d > defect_tol)
    throw std::invalid_argument("unitary_part: input not symplectic (defect " +
                                std::to_string(d) + ")");
  const int n = static_cast<int>(S.rows()) / 2;
  PolarFactors f = symplectic_polar(S);
  CMat u(n, n);
  u.real() = f.U.topLeftCorner(n, n);
  u.imag() = f.U.bottomLeftCorner(n, n);
  return u;
}

Mat real_rep(const CMat& A) {
  const int n = static_cast<int>(A.rows());
  Mat S(2 * n, 2 * n);
  S.topLeftCorner(n, n) = A.real();
  S.bottomRightCorner(n, n) = A.real();
  S.topRightCorner(n, n) = -A.imag();
  S.bottomLeftCorner(n, n) = A.imag();
  return S;
}

CMat complex_rep(const Mat& S) {
  const int n = static_cast<int>(S.rows()) / 2;
  CMat A(n, n);
  A.real() = S.topLeftCorner(n, n);
  A.imag() = S.bottomLeftCorner(n, n);
  return A;
}

CMat unitary_log(const CMat& U) {
  // U is normal; its Schur form is diagonal with a unitary Q.
  Eigen::ComplexSchur<CMat> schur(U);
  const CMat& Q = schur.matrixU();
  CVec loglam(U.rows());
  for (int i = 0; i < U.rows(); ++i) {
    double theta = std::arg(schur.matrixT()(i, i));  // (-pi, pi]
    loglam(i) = std::complex<double>(0.0, theta);
  }
  CMat W = Q * loglam.asDiagonal() * Q.adjoint();
  return 0.5 * (W - W.adjoint().eval());
}

int kernel_dimension(const Mat& A, double rel_tol, double* margin, Mat* basis,
                     double scale_floor) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double scale = std::max(smax, scale_floor);
  const double thresh =
      rel_tol * scale + 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
  int k = 0;
  double smallest_retained = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) < thresh)
      ++k;
    else
      smallest_retained = std::min(smallest_retained, sv(i));
  }
  if (margin) {
    if (scale <= 0.0)
      *margin = 0.0;
    else
      *margin = std::isfinite(smallest_retained) ? smallest_retained / scale
                                                 : std::numeric_limits<double>::infinity();
  }
  if (basis) {
    const int m = static_cast<int>(A.cols());
    *basis = svd.matrixV().rightCols(k);
    if (k == 0) *basis = Mat::Zero(m, 0);
  }
  return k;
}

double smallest_singular_value(const Mat& A) {
  Eigen::JacobiSVD<Mat> svd(A);
  const Vec& sv = svd.singularValues();
  return sv.size() ? sv(sv.size() - 1) : 0.0;
}

Inertia symmetric_inertia(const Mat& A, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  Inertia in;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > zero_tol)
      ++in.plus;
    else if (v < -zero_tol)
      ++in.minus;
    else
      ++in.zero;
  }
  return in;
}

}  // namespace ham
