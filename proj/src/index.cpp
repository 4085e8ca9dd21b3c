#include "ham/index.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "ham/minima.hpp"

namespace ham {

NullityResult nullity_rel(const Mat& gamma_end, const Mat& M, double tol) {
  if (gamma_end.rows() != M.rows() || gamma_end.cols() != M.cols())
    throw std::invalid_argument("nullity_rel: dimension mismatch");
  NullityResult r;
  const double scale = std::max({gamma_end.norm(), M.norm(), 1.0});
  r.nu = kernel_dimension(gamma_end - M, tol, &r.margin, &r.kernel_basis, scale);
  return r;
}

namespace {

double smin_at(const PathSourcePtr& src, double t) {
  const int d = src->dim();
  return smallest_singular_value(src->value(t) - Mat::Identity(d, d));
}

struct FormEval {
  Inertia inertia;
  double min_abs = 0.0;  // smallest |eigenvalue| relative to the form scale
  bool degenerate = false;
};

// Crossing form <w, B(t) w> on the near-kernel of gamma(t) - I, w = gamma(t) v.
FormEval crossing_form(const PathSourcePtr& src, double t, const Mat& kernel_basis,
                       double form_tol) {
  Mat gamma = src->value(t);
  Mat B = src->coefficient(t);
  Mat W = gamma * kernel_basis;
  Mat F = W.transpose() * B * W;
  F = 0.5 * (F + F.transpose().eval());
  const double scale = std::max(1.0, B.norm());
  Eigen::SelfAdjointEigenSolver<Mat> es(F);
  FormEval out;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    min_abs = std::min(min_abs, std::abs(v));
    if (v > form_tol * scale)
      ++out.inertia.plus;
    else if (v < -form_tol * scale)
      ++out.inertia.minus;
    else
      ++out.inertia.zero;
  }
  out.min_abs = std::isfinite(min_abs) ? min_abs / scale : 0.0;
  out.degenerate = out.inertia.zero > 0;
  return out;
}

struct PPathResult {
  long long i = 0;
  std::vector<CrossingRecord> crossings;
  bool ok = false;
  std::string note;
};

PPathResult p_path_index_once(const PathSourcePtr& src, const IndexOptions& opt) {
  PPathResult res;
  const int d = src->dim();
  const int n = d / 2;
  const double tau = src->tau();

  // Start form: B(0) on the full space.
  {
    Mat B0 = src->coefficient(0.0);
    const double scale = std::max(1.0, B0.norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(B0);
    Inertia in;
    for (int i = 0; i < d; ++i) {
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
    res.i = in.plus - n;
    CrossingRecord rec;
    rec.t = 0.0;
    rec.kernel_dim = d;
    rec.signature = in.signature();
    rec.at_endpoint = true;
    res.crossings.push_back(rec);
  }

  // Dense scan of s_min(t).
  const int N = std::max(opt.scan_samples, 256);
  std::vector<double> ts(N + 1), sm(N + 1);
  for (int k = 0; k <= N; ++k) {
    ts[k] = tau * k / N;
    sm[k] = smin_at(src, ts[k]);
  }

  double scale_mat = 0.0;
  for (int k = 0; k <= N; k += std::max(1, N / 16)) scale_mat = std::max(scale_mat, sm[k]);
  // absolute crossing threshold: refined minima of true crossings reach ~1e-11
  const double cross_tol = 1e-7 * std::max(1.0, scale_mat);
  const double leave_tol = 50.0 * cross_tol;
  // loose trigger: refine every plausible dip, reject after refinement
  const double dip_trigger = 0.25 * std::max(1.0, scale_mat);

  // Leave the forced t=0 crossing before scanning for interior dips.
  int k_leave = 1;
  while (k_leave <= N && sm[k_leave] < leave_tol) ++k_leave;
  if (k_leave > N) {
    res.note = "path never leaves the identity (constant-like)";
    return res;
  }

  // Interior crossings (cluster-aware dip scan).
  auto fmin = [&](double t) { return smin_at(src, t); };
  std::vector<double> dips =
      scan_minima(fmin, ts[k_leave], tau, N, dip_trigger, cross_tol);
  for (double t0 : dips) {
    if (t0 > tau * (1.0 - 1e-9)) continue;  // handled as endpoint
    NullityResult ker = nullity_rel(src->value(t0), Mat::Identity(d, d), opt.kernel_tol);
    if (ker.nu == 0) continue;
    FormEval fe = crossing_form(src, t0, ker.kernel_basis, opt.form_tol);
    if (fe.degenerate) {
      res.note = "degenerate crossing form at t=" + std::to_string(t0);
      return res;
    }
    CrossingRecord rec;
    rec.t = t0;
    rec.kernel_dim = ker.nu;
    rec.signature = fe.inertia.signature();
    rec.margin = ker.margin;
    rec.form_min_abs = fe.min_abs;
    res.crossings.push_back(rec);
    res.i += fe.inertia.signature();
  }

  // Endpoint crossing contributes -m^-(Gamma_tau).
  {
    NullityResult ker = nullity_rel(src->value(tau), Mat::Identity(d, d), opt.kernel_tol);
    if (ker.nu > 0) {
      FormEval fe = crossing_form(src, tau, ker.kernel_basis, opt.form_tol);
      if (fe.degenerate) {
        res.note = "degenerate endpoint form";
        return res;
      }
      CrossingRecord rec;
      rec.t = tau;
      rec.kernel_dim = ker.nu;
      rec.signature = fe.inertia.signature();
      rec.margin = ker.margin;
      rec.form_min_abs = fe.min_abs;
      rec.at_endpoint = true;
      res.crossings.push_back(rec);
      res.i -= fe.inertia.minus;
    }
  }

  res.ok = true;
  return res;
}

}  // namespace

IndexReport p_path_index(const PathSourcePtr& src, const IndexOptions& opt) {
  IndexReport rep;
  // Twist ladder: delta = 0, then geometric increases; every nonzero delta is
  // validated against delta/2 for integer stability.
  for (int attempt = opt.first_twist_attempt; attempt <= opt.max_twist_attempts; ++attempt) {
    double delta = attempt == 0 ? 0.0 : opt.twist_base * std::pow(3.16, attempt - 1);
    PathSourcePtr use = attempt == 0 ? src : make_twist_source(src, delta);
    PPathResult r = p_path_index_once(use, opt);
    if (!r.ok) continue;
    if (attempt > 0) {
      PPathResult rh = p_path_index_once(make_twist_source(src, delta / 2.0), opt);
      if (!rh.ok || rh.i != r.i) continue;
    }
    rep.i = r.i;
    rep.crossings = r.crossings;
    rep.status = IndexStatus::Ok;
    rep.note = attempt == 0 ? "" : ("twist delta=" + std::to_string(delta));
    return rep;
  }
  rep.status = IndexStatus::Unresolved;
  rep.note = "crossing algorithm unresolved after twist ladder";
  return rep;
}

namespace {

bool is_identity(const Mat& M) {
  return (M - Mat::Identity(M.rows(), M.cols())).norm() < 1e-12 * std::sqrt(double(M.rows()));
}

}  // namespace

IndexReport maslov_index(const SymplecticPath& gamma, const SymplecticMatrix& M,
                         const IndexOptions& opt) {
  if ((gamma.mats.front() - Mat::Identity(gamma.dim(), gamma.dim())).norm() > 1e-9)
    throw std::invalid_argument("maslov_index: path must start at the identity");
  if (M.dim() != gamma.dim()) throw std::invalid_argument("maslov_index: dimension mismatch");

  IndexReport rep;
  NullityResult nres = nullity_rel(gamma.monodromy(), M.m, opt.kernel_tol);
  rep.nu = nres.nu;
  rep.kernel_margin = nres.margin;

  if (is_identity(M.m)) {
    IndexReport pr = p_path_index(gamma.source, opt);
    rep.i = pr.i;
    rep.crossings = pr.crossings;
    rep.status = pr.status;
    rep.note = pr.note;
    rep.cz = static_cast<double>(rep.i) + 0.5 * rep.nu;
    rep.cz_valid = true;
    return rep;
  }

  // Product-path definition: i_{tau,M}(gamma) = [ i_tau((gamma M^{-1}) * xi) - Delta_xi / pi ].
  const double tau = gamma.tau();
  Mat Minv = M.m.inverse();
  PathSourcePtr xi = make_connect_source(Minv, tau, opt.connect_loop_delta);
  PathSourcePtr leg2 = make_right_product_source(gamma.source, Minv);
  PathSourcePtr phi = make_catenation_source(xi, leg2);

  IndexOptions popt = opt;
  // The junction value of the product path is M^{-1}; when 1 is an eigenvalue
  // of M the junction is an unavoidable crossing with a kinked one-sided form.
  // Force the endpoint-fixing twist so the crossing moves into a smooth leg.
  if (nullity_rel(Minv, Mat::Identity(gamma.dim(), gamma.dim()), opt.kernel_tol).nu > 0)
    popt.first_twist_attempt = std::max(popt.first_twist_attempt, 1);
  IndexReport pr = p_path_index(phi, popt);
  if (pr.status != IndexStatus::Ok) {
    rep.status = pr.status;
    rep.note = pr.note;
    return rep;
  }
  RotationLift lift = rotation_lift_source(xi, opt.connect_samples);
  const double r = static_cast<double>(pr.i) - lift.total() / M_PI;
  const double rn = std::round(r);
  if (std::abs(r - rn) < 1e-6) {
    rep.i = static_cast<long long>(rn);
  } else {
    rep.i = static_cast<long long>(std::floor(r));
    rep.bracket_applied = true;
  }
  rep.bracket_value = r;
  rep.bracket_fraction = std::abs(r - rn);
  // Map product-path crossings on the gamma leg back to gamma time:
  // leg2 occupies [tau/2, tau] of the product, s = 2t - tau.
  for (const CrossingRecord& c : pr.crossings) {
    if (c.t <= tau / 2.0 || c.at_endpoint) continue;
    CrossingRecord rec = c;
    rec.t = 2.0 * c.t - tau;
    rep.crossings.push_back(rec);
  }
  if (rep.nu > 0) {
    CrossingRecord rec;
    rec.t = tau;
    rec.kernel_dim = rep.nu;
    rec.margin = nres.margin;
    rec.at_endpoint = true;
    rep.crossings.push_back(rec);
  }
  return rep;
}

double conley_zehnder(const SymplecticPath& gamma, const IndexOptions& opt) {
  SymplecticMatrix I(Mat::Identity(gamma.dim(), gamma.dim()));
  IndexReport rep = maslov_index(gamma, I, opt);
  if (rep.status != IndexStatus::Ok)
    throw std::runtime_error("conley_zehnder: unresolved index: " + rep.note);
  return rep.cz;
}

long long interval_index(const PathSourcePtr& gamma, double a, double b,
                         const PathSourcePtr& basepath, const IndexOptions& opt) {
  if (a >= b) throw std::invalid_argument("interval_index: need a < b");
  PathSourcePtr seg = make_restriction_source(gamma, a, b);
  Mat start = seg->value(0.0);
  Mat base_end = basepath->value(basepath->tau());
  if ((start - base_end).norm() > 1e-6 * (1.0 + start.norm()))
    throw std::invalid_argument("interval_index: basepath endpoint mismatch");
  PathSourcePtr phi = make_catenation_source(basepath, seg);
  IndexOptions popt = opt;
  if (nullity_rel(start, Mat::Identity(gamma->dim(), gamma->dim()), opt.kernel_tol).nu > 0)
    popt.first_twist_attempt = std::max(popt.first_twist_attempt, 1);
  IndexReport iphi = p_path_index(phi, popt);
  IndexReport ibeta = p_path_index(basepath, opt);
  if (iphi.status != IndexStatus::Ok || ibeta.status != IndexStatus::Ok)
    throw std::runtime_error("interval_index: unresolved component index");
  long long value = iphi.i - ibeta.i;
  // Identity-junction normalization: a non-constant segment leaving a full
  // junction crossing picks up the +n start bonus relative to i_1 of the
  // segment as a path in P; subtract it so i(gamma,[0,tau]) = i_tau(gamma).
  const int d = gamma->dim();
  if (is_identity(start)) {
    double dev = 0.0;
    for (int k = 1; k <= 16; ++k) {
      double t = (b - a) * k / 16.0;
      dev = std::max(dev, (seg->value(t) - Mat::Identity(d, d)).norm());
    }
    if (dev > 1e-8 * d) value -= d / 2;
  }
  return value;
}

StaircaseProfile staircase_profile(const Mat& A, const SymplecticMatrix& M, double lambda_max,
                                   const IndexOptions& opt) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const bool pos = lo > 0.0;
  const bool neg = hi < 0.0;
  if (!pos && !neg)
    throw std::invalid_argument("staircase_profile: A must be definite");

  const int d = static_cast<int>(A.rows());
  StaircaseProfile prof;
  prof.definite_positive = pos;

  // Locate Gamma(A): lambda in (0, lambda_max] with Ker(exp(lambda J A) - M) != 0.
  auto smin = [&](double lam) {
    Mat X = (lam * standard_structure(d / 2) * A).exp();
    return smallest_singular_value(X - M.m);
  };
  const double cross_tol = 1e-7 * std::max(1.0, M.m.norm());
  std::vector<double> dips = scan_minima(smin, 0.0, lambda_max, 4096,
                                         0.25 * std::max(1.0, M.m.norm()), cross_tol);
  for (double lam : dips) {
    if (lam < 1e-9 * lambda_max || lam > lambda_max * (1.0 - 1e-12)) continue;
    Mat X = (lam * standard_structure(d / 2) * A).exp();
    prof.crossings.push_back(lam);
    prof.crossing_nullities.push_back(nullity_rel(X, M.m, opt.kernel_tol).nu);
  }
  if (smin(lambda_max) < cross_tol &&
      (prof.crossings.empty() || std::abs(prof.crossings.back() - lambda_max) > 1e-8 * lambda_max)) {
    prof.crossings.push_back(lambda_max);
    Mat X = (lambda_max * standard_structure(d / 2) * A).exp();
    prof.crossing_nullities.push_back(nullity_rel(X, M.m, opt.kernel_tol).nu);
  }

  // i on each open interval and at each crossing, by direct evaluation.
  auto eval_i = [&](double lam) -> long long {
    CoefficientPath B = CoefficientPath::constant(lam * A, 1.0);
    SymplecticPath g = fundamental_solution(B, 1024);
    IndexOptions o = opt;
    IndexReport r = maslov_index(g, M, o);
    if (r.status != IndexStatus::Ok)
      throw std::runtime_error("staircase_profile: unresolved index at lambda=" +
                               std::to_string(lam));
    return r.i;
  };

  std::vector<double> bounds;
  bounds.push_back(0.0);
  for (double c : prof.crossings) bounds.push_back(c);
  if (prof.crossings.empty() || prof.crossings.back() < lambda_max * (1.0 - 1e-12))
    bounds.push_back(lambda_max);
  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    StaircaseStep st;
    st.lo = bounds[k];
    st.hi = bounds[k + 1];
    st.i = eval_i(0.5 * (bounds[k] + bounds[k + 1]));
    prof.steps.push_back(st);
  }
  for (double c : prof.crossings) prof.i_at_crossings.push_back(eval_i(c));
  return prof;
}

}  // namespace ham
