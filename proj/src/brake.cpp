#include "ham/brake.hpp"

#include <cmath>

#include "ham/minima.hpp"

namespace ham {

std::pair<int, int> brake_nullities(const Mat& gamma_half, double tol) {
  const int n = static_cast<int>(gamma_half.rows()) / 2;
  Mat Bblk = gamma_half.topRightCorner(n, n);
  Mat Cblk = gamma_half.bottomLeftCorner(n, n);
  const double scale = std::max(1.0, gamma_half.norm());
  return {kernel_dimension(Bblk, tol, nullptr, nullptr, scale),
          kernel_dimension(Cblk, tol, nullptr, nullptr, scale)};
}

namespace {

// Relevant block whose kernel detects gamma(t)U_k ∩ U_k.
Mat uk_block(const Mat& gamma, int k) {
  const int n = static_cast<int>(gamma.rows()) / 2;
  return k == 1 ? Mat(gamma.topRightCorner(n, n)) : Mat(gamma.bottomLeftCorner(n, n));
}

// Embed eta in U_k.
Mat uk_embed(const Mat& eta, int k, int n) {
  Mat V = Mat::Zero(2 * n, eta.cols());
  if (k == 1)
    V.bottomRows(n) = eta;
  else
    V.topRows(n) = eta;
  return V;
}

struct UkForm {
  Inertia inertia;
  bool degenerate = false;
};

UkForm uk_crossing_form(const PathSourcePtr& src, double t, int k, const Mat& eta,
                        double form_tol) {
  const int n = src->dim() / 2;
  Mat gamma = src->value(t);
  Mat W = gamma * uk_embed(eta, k, n);
  Mat B = src->coefficient(t);
  Mat F = W.transpose() * B * W;
  F = 0.5 * (F + F.transpose().eval());
  const double scale = std::max(1.0, B.norm());
  Eigen::SelfAdjointEigenSolver<Mat> es(F);
  UkForm out;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    if (v > form_tol * scale)
      ++out.inertia.plus;
    else if (v < -form_tol * scale)
      ++out.inertia.minus;
    else
      ++out.inertia.zero;
  }
  out.degenerate = out.inertia.zero > 0;
  return out;
}

double uk_smin(const PathSourcePtr& src, double t, int k) {
  return smallest_singular_value(uk_block(src->value(t), k));
}

struct UkResult {
  long long count = 0;
  bool ok = false;
  std::string note;
};

// start_plus = false: start contributes -m^-(Gamma_0);  true: +m^+(Gamma_0).
// End always contributes -m^-(Gamma_end) when the endpoint is a crossing.
UkResult uk_index_once(const PathSourcePtr& src, int k, bool start_plus,
                       const IndexOptions& opt) {
  UkResult res;
  const int n = src->dim() / 2;
  const double T = src->tau();

  {
    Mat B0 = src->coefficient(0.0);
    Mat G0 = k == 1 ? Mat(B0.bottomRightCorner(n, n)) : Mat(B0.topLeftCorner(n, n));
    const double scale = std::max(1.0, B0.norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(G0);
    Inertia in;
    for (int i = 0; i < n; ++i) {
      const double v = es.eigenvalues()(i);
      if (v > opt.form_tol * scale)
        ++in.plus;
      else if (v < -opt.form_tol * scale)
        ++in.minus;
      else
        ++in.zero;
    }
    if (in.zero > 0) {
      res.note = "degenerate start form";
      return res;
    }
    res.count = start_plus ? in.plus : -in.minus;
  }

  const int N = std::max(opt.scan_samples, 256);
  std::vector<double> ts(N + 1), sm(N + 1);
  for (int j = 0; j <= N; ++j) {
    ts[j] = T * j / N;
    sm[j] = uk_smin(src, ts[j], k);
  }
  double scale_blk = 0.0;
  for (int j = 0; j <= N; j += std::max(1, N / 16)) scale_blk = std::max(scale_blk, sm[j]);
  const double cross_tol = 1e-7 * std::max(1.0, scale_blk);
  const double leave_tol = 50.0 * cross_tol;
  const double dip_trigger = 0.25 * std::max(1.0, scale_blk);

  int j_leave = 1;
  while (j_leave <= N && sm[j_leave] < leave_tol) ++j_leave;
  if (j_leave > N) {
    res.note = "block never leaves degeneracy";
    return res;
  }

  auto fmin = [&](double t) { return uk_smin(src, t, k); };
  for (double t0 : scan_minima(fmin, ts[j_leave], T, N, dip_trigger, cross_tol)) {
    if (t0 > T * (1.0 - 1e-9)) continue;
    Mat blk = uk_block(src->value(t0), k);
    Mat eta;
    int kd = kernel_dimension(blk, opt.kernel_tol, nullptr, &eta, 1.0);
    if (kd == 0) continue;
    UkForm f = uk_crossing_form(src, t0, k, eta, opt.form_tol);
    if (f.degenerate) {
      res.note = "degenerate crossing form at t=" + std::to_string(t0);
      return res;
    }
    res.count += f.inertia.signature();
  }

  {
    Mat blk = uk_block(src->value(T), k);
    Mat eta;
    int kd = kernel_dimension(blk, opt.kernel_tol, nullptr, &eta, 1.0);
    if (kd > 0) {
      UkForm f = uk_crossing_form(src, T, k, eta, opt.form_tol);
      if (f.degenerate) {
        res.note = "degenerate endpoint form";
        return res;
      }
      res.count -= f.inertia.minus;
    }
  }

  res.ok = true;
  return res;
}

UkResult uk_index(const PathSourcePtr& src, int k, bool start_plus, const IndexOptions& opt) {
  for (int attempt = 0; attempt <= opt.max_twist_attempts; ++attempt) {
    double delta = attempt == 0 ? 0.0 : opt.twist_base * std::pow(3.16, attempt - 1);
    PathSourcePtr use = attempt == 0 ? src : make_twist_source(src, delta);
    UkResult r = uk_index_once(use, k, start_plus, opt);
    if (!r.ok) continue;
    if (attempt > 0) {
      UkResult rh = uk_index_once(make_twist_source(src, delta / 2.0), k, start_plus, opt);
      if (!rh.ok || rh.count != r.count) continue;
    }
    return r;
  }
  UkResult bad;
  bad.note = "unresolved after twist ladder";
  return bad;
}

}  // namespace

long long brake_maslov(const SymplecticPath& gamma_half, int k, const IndexOptions& opt) {
  if (k != 1 && k != 2) throw std::invalid_argument("brake_maslov: k must be 1 or 2");
  UkResult r = uk_index(gamma_half.source, k, /*start_plus=*/false, opt);
  if (!r.ok) throw std::runtime_error("brake_maslov: " + r.note);
  return r.count;
}

BrakeIndices brake_indices(const CoefficientPath& B, int steps, const IndexOptions& opt) {
  if (!B.reversible)
    throw std::invalid_argument("brake_indices: coefficient path must be tagged reversible");
  B.check_reversibility();

  BrakeIndices out;
  // Half path for mu/nu, full path for the full-period counts.
  CoefficientPath half = B;
  half.tau = B.tau / 2.0;
  SymplecticPath ghalf = fundamental_solution(half, std::max(16, steps / 2));
  SymplecticPath gfull = fundamental_solution(B, steps);

  out.half_monodromy = ghalf.monodromy();
  auto nus = brake_nullities(out.half_monodromy, opt.kernel_tol);
  out.nu1 = nus.first;
  out.nu2 = nus.second;

  UkResult m1 = uk_index(ghalf.source, 1, false, opt);
  UkResult m2 = uk_index(ghalf.source, 2, false, opt);
  UkResult f1 = uk_index(gfull.source, 1, true, opt);
  UkResult f2 = uk_index(gfull.source, 2, true, opt);
  if (!m1.ok || !m2.ok || !f1.ok || !f2.ok) {
    out.status = IndexStatus::Unresolved;
    out.note = m1.ok ? (m2.ok ? (f1.ok ? f2.note : f1.note) : m2.note) : m1.note;
    return out;
  }
  out.mu1 = static_cast<int>(m1.count);
  out.mu2 = static_cast<int>(m2.count);
  out.full_period_count1 = f1.count;
  out.full_period_count2 = f2.count;
  return out;
}

}  // namespace ham
