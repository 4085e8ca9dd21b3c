#include "ham/dual_operator.hpp"

#include "ham/minima.hpp"

#include <cmath>
#include <complex>
#include <memory>

namespace ham {

namespace {

using Cplx = std::complex<double>;
const Cplx kI(0.0, 1.0);

// J-algebra scalars: z = x + i y acts on R^{2n} as x I + y J.
Mat re_op(const Cplx& z, const Mat& J) {
  const int d = static_cast<int>(J.rows());
  return z.real() * Mat::Identity(d, d) + z.imag() * J;
}

Vec apply_op(const Cplx& z, const Mat& J, const Vec& v) {
  return z.real() * v + z.imag() * (J * v);
}

Cplx exp_i(double a) { return Cplx(std::cos(a), std::sin(a)); }

// int_a^b e^{-i K s} ds
Cplx cE(double K, double a, double b) {
  if (K == 0.0) return Cplx(b - a, 0.0);
  return (exp_i(-K * b) - exp_i(-K * a)) / Cplx(0.0, -K);
}
// int_a^b e^{i K t} dt
Cplx cF(double K, double a, double b) {
  if (K == 0.0) return Cplx(b - a, 0.0);
  return (exp_i(K * b) - exp_i(K * a)) / Cplx(0.0, K);
}

}  // namespace

DualOperatorSpec DualOperatorSpec::make(const Mat& M, double tau, double K, double min_margin) {
  DualOperatorSpec s;
  s.M = M;
  s.tau = tau;
  s.K = K;
  s.n = static_cast<int>(M.rows()) / 2;
  Mat J = standard_structure(s.n);
  Mat gammaKinv = re_op(exp_i(-K * tau), J);
  Mat Jop = Mat::Identity(2 * s.n, 2 * s.n) - gammaKinv * M;
  s.margin = smallest_singular_value(Jop);
  if (s.margin < min_margin)
    throw std::invalid_argument("DualOperatorSpec: degenerate (margin " +
                                std::to_string(s.margin) + ")");
  return s;
}

std::optional<DualOperatorSpec> choose_shift_K(const Mat& M, const CoefficientPath& B,
                                               double eps_req, double margin_req) {
  double minb = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 64; ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B.eval(B.tau * k / 64.0));
    minb = std::min(minb, es.eigenvalues().minCoeff());
  }
  const double w = 2 * M_PI / B.tau;
  const double cands[] = {-0.31, -0.47, -0.71, -1.13, -1.57, -2.41, -3.67, -5.53, -8.11};
  for (double c : cands) {
    const double K = c * std::max(1.0, 0.25 * w);
    if (minb - K < eps_req) continue;
    try {
      return DualOperatorSpec::make(M, B.tau, K, margin_req);
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  return std::nullopt;
}

LambdaInverse lambda_inverse(const std::vector<Vec>& u_cells, const DualOperatorSpec& spec) {
  const int m = static_cast<int>(u_cells.size());
  if (m == 0) throw std::invalid_argument("lambda_inverse: empty input");
  const int d = 2 * spec.n;
  const double tau = spec.tau;
  const double h = tau / m;
  Mat J = standard_structure(spec.n);
  const double K = spec.K;

  // V = int_0^tau gamma^{-1} J u = sum_p (i cE_p) u_p; prefix sums for R(t).
  auto prefix = std::make_shared<std::vector<Vec>>(m + 1, Vec::Zero(d));
  for (int p = 0; p < m; ++p) {
    Cplx z = kI * cE(K, p * h, (p + 1) * h);
    (*prefix)[p + 1] = (*prefix)[p] + apply_op(z, J, u_cells[p]);
  }
  Mat gammaKinv = re_op(exp_i(-K * tau), J);
  Mat Jop = Mat::Identity(d, d) - gammaKinv * spec.M;
  Vec w0c = Jop.partialPivLu().solve((*prefix)[m]);

  LambdaInverse out;
  out.spec = spec;
  out.cells = u_cells;
  out.w0 = w0c;
  auto cells = std::make_shared<std::vector<Vec>>(u_cells);
  out.w = [=](double t) -> Vec {
    double tc = std::min(std::max(t, 0.0), tau);
    int q = std::min(static_cast<int>(std::floor(tc / h)), m - 1);
    Vec R = (*prefix)[q] + apply_op(kI * cE(K, q * h, tc), J, (*cells)[q]);
    return apply_op(exp_i(K * tc), J, Vec(w0c - R));
  };
  out.boundary_residual = (out.w(tau) - spec.M * out.w(0.0)).norm();
  double res = 0.0;
  const double fd = h / 64.0;
  for (int p = 0; p < m; ++p) {
    const double t = (p + 0.5) * h;
    Vec wd = (out.w(t + fd) - out.w(t - fd)) / (2 * fd);
    res = std::max(res, (J * wd + K * out.w(t) - u_cells[p]).norm());
  }
  out.equation_residual = res;
  return out;
}

Mat assemble_lambda_gram(const DualOperatorSpec& spec, int m) {
  const int n = spec.n;
  const int d = 2 * n;
  const int dim = d * m;
  const double tau = spec.tau;
  const double h = tau / m;
  const double K = spec.K;
  Mat J = standard_structure(n);

  Mat gammaKinv = re_op(exp_i(-K * tau), J);
  Mat A = (Mat::Identity(d, d) - gammaKinv * spec.M).inverse();
  Mat AJ = A * J, JA = J * A, JAJ = J * A * J;

  std::vector<Cplx> Ep(m), Fq(m), Xpp(m);
  for (int p = 0; p < m; ++p) {
    const double a = p * h, b = (p + 1) * h;
    Ep[p] = cE(K, a, b);
    Fq[p] = cF(K, a, b);
    if (K == 0.0)
      Xpp[p] = kI * h * h / 2.0;
    else
      Xpp[p] = -(1.0 / K) * (Cplx(h, 0.0) - exp_i(-K * a) * Fq[p]);
  }

  Mat G = Mat::Zero(dim, dim);
  Mat block(d, d);
  for (int p = 0; p < m; ++p) {
    const Cplx z2 = kI * Ep[p];
    const double x2 = z2.real(), y2 = z2.imag();
    for (int q = 0; q < m; ++q) {
      const Cplx z1 = Fq[q];
      const double x1 = z1.real(), y1 = z1.imag();
      block = (x1 * x2) * A + (x1 * y2) * AJ + (y1 * x2) * JA + (y1 * y2) * JAJ;
      if (q > p) {
        Cplx X = Fq[q] * (kI * Ep[p]);
        block -= re_op(X, J);
      } else if (q == p) {
        block -= re_op(Xpp[p], J);
      }
      for (int a2 = 0; a2 < d; ++a2)
        for (int b2 = 0; b2 < d; ++b2) G(p * d + a2, q * d + b2) = block(b2, a2);
    }
  }
  return G;
}

GalerkinAssembly assemble_dual_form(const CoefficientPath& B, const DualOperatorSpec& spec,
                                    int m) {
  const int n = spec.n;
  const int d = 2 * n;
  const int dim = d * m;
  const double tau = spec.tau;
  const double h = tau / m;
  const double K = spec.K;

  for (int k = 0; k <= 32; ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B.eval(tau * k / 32.0) - K * Mat::Identity(d, d));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("assemble_dual_form: B - K I not positive definite");
  }

  Mat G = assemble_lambda_gram(spec, m);

  // C(t) = (B - K)^{-1} term: block diagonal, 4-point Gauss per cell.
  const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                        0.8611363115940526};
  const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                        0.3478548451374538};
  for (int p = 0; p < m; ++p) {
    Mat Cblk = Mat::Zero(d, d);
    const double a = p * h, b = (p + 1) * h;
    for (int g = 0; g < 4; ++g) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gx[g];
      Cblk += 0.5 * (b - a) * gw[g] * (B.eval(t) - K * Mat::Identity(d, d)).inverse();
    }
    for (int a2 = 0; a2 < d; ++a2)
      for (int b2 = 0; b2 < d; ++b2) G(p * d + a2, p * d + b2) += Cblk(b2, a2);
  }

  GalerkinAssembly out;
  out.basis_size = m;
  out.basis = "piecewise-constant, " + std::to_string(m) + " cells x " + std::to_string(d) +
              " directions";
  out.asymmetry = (G - G.transpose()).cwiseAbs().maxCoeff();
  out.G = 0.5 * (G + G.transpose().eval());
  if (dim <= 600) {
    Eigen::SelfAdjointEigenSolver<Mat> es(out.G, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();
  }
  return out;
}

std::pair<int, int> symmetric_counts(const Mat& G, double gap) {
  const int dim = static_cast<int>(G.rows());
  Eigen::Tridiagonalization<Mat> tri(G);
  Vec dv = tri.diagonal();
  Vec ev = tri.subDiagonal();
  auto count_below = [&](double x) {
    int cnt = 0;
    double q = dv(0) - x;
    if (q < 0) ++cnt;
    for (int k = 1; k < dim; ++k) {
      double denom = q;
      if (std::abs(denom) < 1e-300) denom = (denom < 0 ? -1e-300 : 1e-300);
      q = dv(k) - x - ev(k - 1) * ev(k - 1) / denom;
      if (q < 0) ++cnt;
    }
    return cnt;
  };
  const int below_m = count_below(-gap);
  const int below_p = count_below(gap);
  return {below_m, below_p - below_m};
}

MorseCount count_from_assembly(const GalerkinAssembly& A, double gap_override) {
  MorseCount mc;
  const double scale = A.G.cwiseAbs().maxCoeff();
  mc.gap = gap_override > 0.0
               ? gap_override
               : std::max(1e-7, 10.0 * std::numeric_limits<double>::epsilon() * scale);
  auto c = symmetric_counts(A.G, mc.gap);
  mc.m_minus = c.first;
  mc.m_zero = c.second;
  return mc;
}

std::pair<GalerkinAssembly, MorseCount> assemble_and_count(const CoefficientPath& B,
                                                           const DualOperatorSpec& spec, int m,
                                                           double gap_override) {
  GalerkinAssembly A1 = assemble_dual_form(B, spec, m);
  MorseCount c1 = count_from_assembly(A1, gap_override);
  GalerkinAssembly A2 = assemble_dual_form(B, spec, 2 * m);
  MorseCount c2 = count_from_assembly(A2, gap_override);
  c1.converged = (c1.m_minus == c2.m_minus && c1.m_zero == c2.m_zero);
  return {A1, c1};
}

GalerkinAssembly assemble_brake_form(const CoefficientPath& B, double K, int m) {
  if (!B.reversible)
    throw std::invalid_argument("assemble_brake_form: B must satisfy the reversibility pattern");
  B.check_reversibility();
  const int n = B.dim / 2;
  const int d = 2 * n;
  const double tau = B.tau;
  const double w = 2 * M_PI / tau;
  {
    const double r = K / w;
    if (std::abs(r - std::round(r)) < 1e-9)
      throw std::invalid_argument("assemble_brake_form: K in (2 pi / tau) Z");
  }
  for (int k = 0; k <= 32; ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B.eval(tau * k / 32.0) - K * Mat::Identity(d, d));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("assemble_brake_form: B - K I not positive definite");
  }

  // Basis per coordinate pair i in 0..n-1:
  //   sin(m' w t) e_i,      m' = 1..m    -> index i*m + (m'-1)
  //   cos(m' w t) e_{n+i},  m' = 0..m-1  -> index n*m + i*m + m'
  const int dim = 2 * n * m;

  // Fourier coefficients of C(t) = (B - K)^{-1} up to order 2m (trapezoid;
  // spectral accuracy for smooth periodic C).
  const int Nq = std::max(2048, 8 * m);
  std::vector<Mat> Cs(Nq);
  for (int q = 0; q < Nq; ++q)
    Cs[q] = (B.eval(tau * q / Nq) - K * Mat::Identity(d, d)).inverse();
  const int Kmax = 2 * m;
  std::vector<Mat> ccoef(Kmax + 1, Mat::Zero(d, d)), scoef(Kmax + 1, Mat::Zero(d, d));
  for (int k = 0; k <= Kmax; ++k) {
    Mat mc = Mat::Zero(d, d), ms = Mat::Zero(d, d);
    for (int q = 0; q < Nq; ++q) {
      const double t = tau * q / Nq;
      mc += Cs[q] * std::cos(k * w * t);
      ms += Cs[q] * std::sin(k * w * t);
    }
    ccoef[k] = mc * (tau / Nq);
    scoef[k] = ms * (tau / Nq);
  }
  auto ccof = [&](int k) -> const Mat& { return ccoef[std::abs(k)]; };
  auto sval = [&](int k, int r, int c) -> double {
    if (k >= 0) return scoef[k](r, c);
    return -scoef[-k](r, c);
  };

  Mat G = Mat::Zero(dim, dim);

  // (Lambda~_K)^{-1} part: mode-wise closed form.
  for (int i = 0; i < n; ++i) {
    for (int mp = 1; mp <= m; ++mp) {
      const double a = K, b = mp * w;
      const double det = a * a - b * b;
      const double i00 = a / det, i01 = -b / det;
      const int is = i * m + (mp - 1);
      G(is, is) += i00 * (tau / 2.0);
      if (mp <= m - 1) {
        const int ic = n * m + i * m + mp;
        G(ic, ic) += i00 * (tau / 2.0);
        G(is, ic) += i01 * (tau / 2.0);
        G(ic, is) += i01 * (tau / 2.0);
      }
    }
    const int ic0 = n * m + i * m + 0;
    G(ic0, ic0) += (1.0 / K) * tau;
  }

  // C part via trigonometric product identities.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int m1 = 1; m1 <= m; ++m1) {
        for (int m2 = 1; m2 <= m; ++m2)
          G(j * m + (m2 - 1), i * m + (m1 - 1)) +=
              0.5 * (ccof(m1 - m2)(j, i) - ccof(m1 + m2)(j, i));
        for (int m2 = 0; m2 < m; ++m2) {
          const double v = 0.5 * (sval(m1 + m2, n + j, i) + sval(m1 - m2, n + j, i));
          G(n * m + j * m + m2, i * m + (m1 - 1)) += v;
        }
      }
      for (int m1 = 0; m1 < m; ++m1) {
        for (int m2 = 1; m2 <= m; ++m2) {
          // (C cos_{i,m1}, sin_{j,m2}) = 1/2 [s_{m2+m1} + s_{m2-m1}](j, n+i)
          const double v = 0.5 * (sval(m2 + m1, j, n + i) + sval(m2 - m1, j, n + i));
          G(j * m + (m2 - 1), n * m + i * m + m1) += v;
        }
        for (int m2 = 0; m2 < m; ++m2)
          G(n * m + j * m + m2, n * m + i * m + m1) +=
              0.5 * (ccof(m1 - m2)(n + j, n + i) + ccof(m1 + m2)(n + j, n + i));
      }
    }
  }

  // Congruence rescaling to the L2-orthonormal basis (inertia preserved).
  Vec norms(dim);
  for (int i = 0; i < n; ++i) {
    for (int mp = 1; mp <= m; ++mp) norms(i * m + (mp - 1)) = std::sqrt(tau / 2.0);
    for (int mp = 0; mp < m; ++mp)
      norms(n * m + i * m + mp) = std::sqrt(mp == 0 ? tau : tau / 2.0);
  }
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) G(r, c) /= norms(r) * norms(c);

  GalerkinAssembly out;
  out.basis_size = m;
  out.basis = "brake trig modes, " + std::to_string(m) + " per coordinate pair";
  out.asymmetry = (G - G.transpose()).cwiseAbs().maxCoeff();
  out.G = 0.5 * (G + G.transpose().eval());
  if (dim <= 600) {
    Eigen::SelfAdjointEigenSolver<Mat> es(out.G, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();
  }
  return out;
}

std::pair<GalerkinAssembly, MorseCount> brake_assemble_and_count(const CoefficientPath& B,
                                                                 double K, int m,
                                                                 double gap_override) {
  GalerkinAssembly A1 = assemble_brake_form(B, K, m);
  MorseCount c1 = count_from_assembly(A1, gap_override);
  GalerkinAssembly A2 = assemble_brake_form(B, K, 2 * m);
  MorseCount c2 = count_from_assembly(A2, gap_override);
  c1.converged = (c1.m_minus == c2.m_minus && c1.m_zero == c2.m_zero);
  return {A1, c1};
}

long long relative_morse(const CoefficientPath& B1, const CoefficientPath& B2, const Mat& M,
                         int steps, double tol) {
  if (B1.dim != B2.dim || std::abs(B1.tau - B2.tau) > 1e-12)
    throw std::invalid_argument("relative_morse: incompatible coefficient paths");
  const int d = B1.dim;
  for (int k = 0; k <= 16; ++k) {
    const double t = B1.tau * k / 16.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(B2.eval(t) - B1.eval(t));
    if (es.eigenvalues().minCoeff() < 0.0)
      throw std::invalid_argument("relative_morse: need B1 <= B2 pointwise");
  }
  auto monodromy = [&](double s) {
    CoefficientPath Bs = CoefficientPath::from_function(d, B1.tau, [&B1, &B2, s](double t) {
      return Mat((1.0 - s) * B1.eval(t) + s * B2.eval(t));
    });
    return fundamental_solution(Bs, steps).monodromy();
  };
  auto smin = [&](double s) { return smallest_singular_value(monodromy(s) - M); };
  auto nu_at = [&](double s) { return nullity_rel(monodromy(s), M, tol).nu; };

  long long total = nu_at(0.0);  // s = 0 belongs to [0, 1)

  double scale = 0.0;
  for (int k = 0; k <= 16; ++k) scale = std::max(scale, smin(k / 16.0));
  const double cross_tol = 1e-6 * std::max(1.0, scale);
  for (double s0 : scan_minima(smin, 0.0, 1.0, 160, 0.25 * std::max(1.0, scale), cross_tol,
                               48)) {
    if (s0 <= 1e-9 || s0 >= 1.0 - 1e-12) continue;
    total += nu_at(s0);
  }
  return total;
}

}  // namespace ham
