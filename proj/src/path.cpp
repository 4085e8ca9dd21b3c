#include "ham/path.hpp"

#include <cmath>

namespace ham {

CoefficientPath CoefficientPath::constant(const Mat& B, double tau) {
  CoefficientPath p;
  p.tau = tau;
  p.dim = static_cast<int>(B.rows());
  Mat Bc = B;
  p.eval = [Bc](double) { return Bc; };
  p.periodic = true;
  // constant B is reversible iff N^T B N = B
  const int n = p.dim / 2;
  Mat N = Mat::Identity(p.dim, p.dim);
  N.topLeftCorner(n, n) *= -1.0;
  p.reversible = (N.transpose() * Bc * N - Bc).norm() < 1e-12 * (1.0 + Bc.norm());
  return p;
}

CoefficientPath CoefficientPath::rotation_blocks(const Vec& rhos, double tau) {
  const int n = static_cast<int>(rhos.size());
  Mat B = Mat::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    B(i, i) = rhos(i);
    B(n + i, n + i) = rhos(i);
  }
  return constant(B, tau);
}

CoefficientPath CoefficientPath::from_function(int dim, double tau,
                                               std::function<Mat(double)> f,
                                               bool periodic, bool reversible) {
  CoefficientPath p;
  p.dim = dim;
  p.tau = tau;
  p.eval = std::move(f);
  p.periodic = periodic;
  p.reversible = reversible;
  return p;
}

void CoefficientPath::check_symmetry(int samples, double tol) const {
  for (int k = 0; k <= samples; ++k) {
    const double t = tau * k / samples;
    Mat B = eval(t);
    if ((B - B.transpose()).norm() > tol * (1.0 + B.norm()))
      throw std::invalid_argument("CoefficientPath: non-symmetric sample at t=" +
                                  std::to_string(t));
  }
}

void CoefficientPath::check_reversibility(int samples, double tol) const {
  const int n = dim / 2;
  Mat N = Mat::Identity(dim, dim);
  N.topLeftCorner(n, n) *= -1.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = tau * k / samples;
    // B(-t) via periodic wrap.
    double tm = -t;
    while (tm < 0) tm += tau;
    Mat lhs = N.transpose() * eval(tm) * N;
    if ((lhs - eval(t)).norm() > tol * (1.0 + eval(t).norm()))
      throw std::invalid_argument("CoefficientPath: reversibility violated at t=" +
                                  std::to_string(t));
  }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre 2-stage step for the linear system.

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kC1 = 0.5 - kSqrt3 / 6.0;
constexpr double kC2 = 0.5 + kSqrt3 / 6.0;
constexpr double kA11 = 0.25;
constexpr double kA12 = 0.25 - kSqrt3 / 6.0;
constexpr double kA21 = 0.25 + kSqrt3 / 6.0;
constexpr double kA22 = 0.25;
}  // namespace

Mat gauss2_step(const CoefficientPath& B, double t, double h) {
  const int d = B.dim;
  Mat J = standard_structure(d / 2);
  Mat A1 = J * B.eval(t + kC1 * h);
  Mat A2 = J * B.eval(t + kC2 * h);
  Mat lhs = Mat::Zero(2 * d, 2 * d);
  lhs.topLeftCorner(d, d) = Mat::Identity(d, d) - h * kA11 * A1;
  lhs.topRightCorner(d, d) = -h * kA12 * A1;
  lhs.bottomLeftCorner(d, d) = -h * kA21 * A2;
  lhs.bottomRightCorner(d, d) = Mat::Identity(d, d) - h * kA22 * A2;
  Mat rhs(2 * d, d);
  rhs.topRows(d) = A1;
  rhs.bottomRows(d) = A2;
  Mat K = lhs.partialPivLu().solve(rhs);
  return Mat::Identity(d, d) + 0.5 * h * (K.topRows(d) + K.bottomRows(d));
}

namespace {

std::vector<Mat> integrate_grid(const CoefficientPath& B, int steps) {
  const int d = B.dim;
  std::vector<Mat> mats;
  mats.reserve(steps + 1);
  mats.push_back(Mat::Identity(d, d));
  const double h = B.tau / steps;
  for (int k = 0; k < steps; ++k) {
    Mat S = gauss2_step(B, k * h, h);
    mats.push_back(S * mats.back());
  }
  return mats;
}

class FundamentalSource : public PathSource {
 public:
  FundamentalSource(CoefficientPath B, int steps) : coeff_(std::move(B)), steps_(steps) {
    coeff_.check_symmetry();
    mats_ = integrate_grid(coeff_, steps_);
    h_ = coeff_.tau / steps_;
  }

  int dim() const override { return coeff_.dim; }
  double tau() const override { return coeff_.tau; }

  Mat value(double t) const override {
    if (t <= 0.0) return mats_.front();
    if (t >= coeff_.tau) {
      if (t <= coeff_.tau * (1.0 + 1e-12)) return mats_.back();
      throw std::invalid_argument("FundamentalSource: t out of range");
    }
    int k = static_cast<int>(std::floor(t / h_));
    k = std::min(k, steps_ - 1);
    const double t0 = k * h_;
    const double dt = t - t0;
    if (dt < 1e-14 * coeff_.tau) return mats_[k];
    // Re-integrate the sub-interval at a finer step than the base grid.
    const int nsub = 8;
    Mat Z = mats_[k];
    const double hs = dt / nsub;
    for (int j = 0; j < nsub; ++j) Z = gauss2_step(coeff_, t0 + j * hs, hs) * Z;
    return Z;
  }

  Mat coefficient(double t) const override { return coeff_.eval(t); }

  const std::vector<Mat>& grid() const { return mats_; }
  double grid_h() const { return h_; }
  const CoefficientPath& coeff() const { return coeff_; }

 private:
  CoefficientPath coeff_;
  int steps_;
  double h_;
  std::vector<Mat> mats_;
};

class ConnectSource : public PathSource {
 public:
  ConnectSource(const Mat& target, double tau, double loop_delta)
      : tau_(tau), delta_(loop_delta), d_(static_cast<int>(target.rows())) {
    PolarFactors f = symplectic_polar(target);
    L_ = sym_log(f.P);
    Eigen::SelfAdjointEigenSolver<Mat> es(L_);
    Lvec_ = es.eigenvectors();
    Lval_ = es.eigenvalues();
    CMat u = complex_rep(f.U);
    W_ = unitary_log(u);
    // W = Q diag(i theta) Q^*; exp(sW) = Q diag(e^{is theta}) Q^*.
    Eigen::ComplexSchur<CMat> schur(u);
    Q_ = schur.matrixU();
    theta_.resize(u.rows());
    for (int i = 0; i < u.rows(); ++i) theta_(i) = std::arg(schur.matrixT()(i, i));
    J_ = standard_structure(d_ / 2);
  }

  int dim() const override { return d_; }
  double tau() const override { return tau_; }

  Mat value(double t) const override {
    const double s = t / tau_;
    Mat base = expP(s) * real_rep(expW(s));
    if (delta_ != 0.0) {
      const double b = delta_ * std::sin(M_PI * t / tau_);
      base = base * rot(b);
    }
    return base;
  }

  Mat coefficient(double t) const override {
    const double s = t / tau_;
    Mat eP = expP(s);
    Mat X = eP * real_rep(W_) * expP(-s);
    Mat B = -(J_ * (L_ + X)) / tau_;  // d/dt = (1/tau) d/ds
    B = 0.5 * (B + B.transpose().eval());
    if (delta_ != 0.0) {
      Mat phi = value(t);
      const double bdot = delta_ * (M_PI / tau_) * std::cos(M_PI * t / tau_);
      Mat T = -bdot * (J_ * phi * phi.transpose() * J_);
      B += 0.5 * (T + T.transpose().eval());
    }
    return B;
  }

 private:
  Mat expP(double s) const {
    Vec e = (s * Lval_).array().exp();
    return Lvec_ * e.asDiagonal() * Lvec_.transpose();
  }
  CMat expW(double s) const {
    CVec e(theta_.size());
    for (int i = 0; i < theta_.size(); ++i)
      e(i) = std::complex<double>(std::cos(s * theta_(i)), std::sin(s * theta_(i)));
    return Q_ * e.asDiagonal() * Q_.adjoint();
  }
  Mat rot(double angle) const {
    // exp(angle * J)
    CMat u = CMat::Identity(d_ / 2, d_ / 2) * std::complex<double>(std::cos(angle), std::sin(angle));
    return real_rep(u);
  }

  double tau_, delta_;
  int d_;
  Mat L_, Lvec_, J_;
  Vec Lval_, theta_;
  CMat W_, Q_;
};

class ConstantSource : public PathSource {
 public:
  ConstantSource(int dim, double tau) : d_(dim), tau_(tau) {}
  int dim() const override { return d_; }
  double tau() const override { return tau_; }
  Mat value(double) const override { return Mat::Identity(d_, d_); }
  Mat coefficient(double) const override { return Mat::Zero(d_, d_); }

 private:
  int d_;
  double tau_;
};

class RightProductSource : public PathSource {
 public:
  RightProductSource(PathSourcePtr base, Mat C) : base_(std::move(base)), C_(std::move(C)) {}
  int dim() const override { return base_->dim(); }
  double tau() const override { return base_->tau(); }
  Mat value(double t) const override { return base_->value(t) * C_; }
  Mat coefficient(double t) const override { return base_->coefficient(t); }

 private:
  PathSourcePtr base_;
  Mat C_;
};

class TwistSource : public PathSource {
 public:
  TwistSource(PathSourcePtr base, double delta)
      : base_(std::move(base)), delta_(delta), J_(standard_structure(base_->dim() / 2)) {}
  int dim() const override { return base_->dim(); }
  double tau() const override { return base_->tau(); }

  Mat value(double t) const override {
    const double b = delta_ * std::sin(M_PI * t / tau());
    const int n = dim() / 2;
    CMat u = CMat::Identity(n, n) * std::complex<double>(std::cos(b), std::sin(b));
    return base_->value(t) * real_rep(u);
  }

  Mat coefficient(double t) const override {
    Mat phi = base_->value(t);
    const double bdot = delta_ * (M_PI / tau()) * std::cos(M_PI * t / tau());
    Mat B = base_->coefficient(t) - bdot * (J_ * phi * phi.transpose() * J_);
    return 0.5 * (B + B.transpose().eval());
  }

 private:
  PathSourcePtr base_;
  double delta_;
  Mat J_;
};

class CatenationSource : public PathSource {
 public:
  CatenationSource(PathSourcePtr first, PathSourcePtr second)
      : a_(std::move(first)), b_(std::move(second)), tau_(a_->tau() + b_->tau()) {
    if ((a_->value(a_->tau()) - b_->value(0.0)).norm() >
        1e-6 * (1.0 + a_->value(a_->tau()).norm()))
      throw std::invalid_argument("catenation: junction mismatch");
  }
  int dim() const override { return a_->dim(); }
  double tau() const override { return tau_; }

  Mat value(double t) const override {
    const double mid = tau_ / 2.0;
    if (t <= mid) return a_->value(scaleA() * t);
    return b_->value(scaleB() * (t - mid));
  }

  Mat coefficient(double t) const override {
    const double mid = tau_ / 2.0;
    if (t <= mid) return scaleA() * a_->coefficient(scaleA() * t);
    return scaleB() * b_->coefficient(scaleB() * (t - mid));
  }

 private:
  double scaleA() const { return a_->tau() / (tau_ / 2.0); }
  double scaleB() const { return b_->tau() / (tau_ / 2.0); }
  PathSourcePtr a_, b_;
  double tau_;
};

class RestrictionSource : public PathSource {
 public:
  RestrictionSource(PathSourcePtr base, double a, double b)
      : base_(std::move(base)), a_(a), b_(b) {}
  int dim() const override { return base_->dim(); }
  double tau() const override { return b_ - a_; }
  Mat value(double t) const override { return base_->value(a_ + t); }
  Mat coefficient(double t) const override { return base_->coefficient(a_ + t); }

 private:
  PathSourcePtr base_;
  double a_, b_;
};

class ConjugatedSource : public PathSource {
 public:
  ConjugatedSource(PathSourcePtr base, Mat phi)
      : base_(std::move(base)), phi_(std::move(phi)), phiInv_(phi_.inverse()) {}
  int dim() const override { return base_->dim(); }
  double tau() const override { return base_->tau(); }
  Mat value(double t) const override { return phi_ * base_->value(t) * phiInv_; }
  Mat coefficient(double t) const override {
    // B_conj = phi^{-T} B phi^{-1}
    Mat B = phiInv_.transpose() * base_->coefficient(t) * phiInv_;
    return 0.5 * (B + B.transpose().eval());
  }

 private:
  PathSourcePtr base_;
  Mat phi_, phiInv_;
};

}  // namespace

PathSourcePtr make_fundamental_source(const CoefficientPath& B, int steps) {
  return std::make_shared<FundamentalSource>(B, steps);
}
PathSourcePtr make_connect_source(const Mat& target, double tau, double loop_delta) {
  return std::make_shared<ConnectSource>(target, tau, loop_delta);
}
PathSourcePtr make_constant_source(int dim, double tau) {
  return std::make_shared<ConstantSource>(dim, tau);
}
PathSourcePtr make_right_product_source(PathSourcePtr base, const Mat& C) {
  return std::make_shared<RightProductSource>(std::move(base), C);
}
PathSourcePtr make_twist_source(PathSourcePtr base, double delta) {
  return std::make_shared<TwistSource>(std::move(base), delta);
}
PathSourcePtr make_catenation_source(PathSourcePtr first, PathSourcePtr second) {
  return std::make_shared<CatenationSource>(std::move(first), std::move(second));
}
PathSourcePtr make_restriction_source(PathSourcePtr base, double a, double b) {
  return std::make_shared<RestrictionSource>(std::move(base), a, b);
}
PathSourcePtr make_conjugated_source(PathSourcePtr base, const Mat& phi) {
  return std::make_shared<ConjugatedSource>(std::move(base), phi);
}

void SymplecticPath::recompute_defect() {
  double d = 0.0;
  for (const Mat& S : mats) d = std::max(d, symplectic_defect(S));
  defect = d;
}

SymplecticPath sample_source(PathSourcePtr src, int samples) {
  SymplecticPath p;
  p.source = src;
  p.times.reserve(samples + 1);
  p.mats.reserve(samples + 1);
  const double tau = src->tau();
  for (int k = 0; k <= samples; ++k) {
    const double t = tau * k / samples;
    p.times.push_back(t);
    p.mats.push_back(src->value(t));
  }
  p.recompute_defect();
  return p;
}

namespace {
Mat integrate_endpoint(const CoefficientPath& B, int steps) {
  Mat Z = Mat::Identity(B.dim, B.dim);
  const double h = B.tau / steps;
  for (int k = 0; k < steps; ++k) Z = gauss2_step(B, k * h, h) * Z;
  return Z;
}
}  // namespace

SymplecticPath fundamental_solution(const CoefficientPath& B, int steps) {
  if (steps < 16) throw std::invalid_argument("fundamental_solution: steps must be >= 16");
  auto src = std::make_shared<FundamentalSource>(B, steps);
  SymplecticPath p;
  p.source = src;
  const double h = B.tau / steps;
  p.times.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) p.times[k] = k * h;
  p.mats = src->grid();
  p.recompute_defect();
  // Richardson endpoint estimate against a half-resolution run (order 4).
  Mat coarse = integrate_endpoint(B, std::max(16, steps / 2));
  p.err_estimate = 1.5 * (p.mats.back() - coarse).norm() / 15.0 + 1e-15;
  return p;
}

SymplecticPath connect_to(const SymplecticMatrix& target, int samples, double loop_delta) {
  auto src = std::make_shared<ConnectSource>(target.m, 1.0, loop_delta);
  return sample_source(src, samples);
}

SymplecticPath constant_identity_path(int dim, double tau, int samples) {
  return sample_source(std::make_shared<ConstantSource>(dim, tau), samples);
}

}  // namespace ham
