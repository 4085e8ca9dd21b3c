#include "ham/minima.hpp"

#include <algorithm>
#include <cmath>

namespace ham {

namespace {

double golden_refine(const std::function<double(double)>& f, double a, double b) {
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  const double span = b - a;
  for (int it = 0; it < 70 && (b - a) > 1e-13 * std::max(1.0, span); ++it) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<double> scan_minima(const std::function<double(double)>& f, double a, double b,
                                int N, double trigger, double accept_tol, int subsamples) {
  std::vector<double> ts(N + 1), fv(N + 1);
  for (int k = 0; k <= N; ++k) {
    ts[k] = a + (b - a) * k / N;
    fv[k] = f(ts[k]);
  }
  std::vector<double> out;
  for (int k = 1; k < N; ++k) {
    if (!(fv[k] <= fv[k - 1] && fv[k] <= fv[k + 1])) continue;
    if (fv[k] > trigger) continue;
    // sub-sample the bracket so clustered minima separate
    const double lo = ts[k - 1], hi = ts[k + 1];
    std::vector<double> ss(subsamples + 1), sf(subsamples + 1);
    for (int j = 0; j <= subsamples; ++j) {
      ss[j] = lo + (hi - lo) * j / subsamples;
      sf[j] = f(ss[j]);
    }
    for (int j = 1; j < subsamples; ++j) {
      if (!(sf[j] <= sf[j - 1] && sf[j] <= sf[j + 1])) continue;
      if (sf[j] > trigger) continue;
      const double t0 = golden_refine(f, ss[j - 1], ss[j + 1]);
      if (f(t0) > accept_tol) continue;
      bool dup = false;
      for (double t : out)
        if (std::abs(t - t0) < 1e-9 * std::max(1.0, b - a)) dup = true;
      if (!dup) out.push_back(t0);
    }
  }
  // Terminal runs: a crossing between the last (first) interior sample and the
  // boundary shows up as a monotone run into the boundary, not a sampled local
  // minimum. Refine those brackets too; boundary hits are deduplicated by the
  // callers' endpoint handling.
  auto probe_bracket = [&](double lo, double hi) {
    const double t0 = golden_refine(f, lo, hi);
    if (f(t0) > accept_tol) return;
    for (double t : out)
      if (std::abs(t - t0) < 1e-9 * std::max(1.0, b - a)) return;
    out.push_back(t0);
  };
  if (N >= 2 && fv[N] < fv[N - 1] && fv[N] <= trigger) probe_bracket(ts[N - 1], b);
  if (N >= 2 && fv[0] < fv[1] && fv[0] <= trigger) probe_bracket(a, ts[1]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ham
