#include "ham/scan.hpp"

#include "ham/minima.hpp"

#include <cmath>

#include "ham/brake.hpp"

namespace ham {

const char* to_string(Classification c) {
  switch (c) {
    case Classification::None: return "NONE";
    case Classification::NecessaryOnly: return "NECESSARY_ONLY";
    case Classification::Jump: return "JUMP";
    case Classification::Rabinowitz: return "RABINOWITZ";
    case Classification::MonotoneFamily: return "MONOTONE_FAMILY";
    case Classification::OrbitJump: return "ORBIT_JUMP";
    case Classification::OrbitRabinowitz: return "ORBIT_RABINOWITZ";
    case Classification::EquilibriumOrbit: return "EQUILIBRIUM_ORBIT";
    case Classification::BrakeJump: return "BRAKE_JUMP";
    case Classification::BrakeRabinowitz: return "BRAKE_RABINOWITZ";
    case Classification::DeformationCrossing: return "DEFORMATION_CROSSING";
    case Classification::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

namespace {

ProfilePoint eval_point(const HamiltonianFamily& family, double lambda, ScanMode mode,
                        const ScanOptions& opt, Mat* kernel = nullptr) {
  ProfilePoint pt;
  pt.lambda = lambda;
  CoefficientPath B = family.linearization(lambda);
  if (mode == ScanMode::Brake) {
    BrakeIndices bi = brake_indices(B, opt.steps, opt.index);
    pt.i = bi.mu1;
    pt.nu = bi.nu1;
    pt.status = bi.status;
    if (kernel) {
      // kernel of the B block of the half monodromy, embedded in U_1
      const int n = family.half_dim();
      Mat eta;
      kernel_dimension(bi.half_monodromy.topRightCorner(n, n), opt.index.kernel_tol, nullptr,
                       &eta, std::max(1.0, bi.half_monodromy.norm()));
      Mat V = Mat::Zero(2 * n, eta.cols());
      V.bottomRows(n) = eta;
      *kernel = V;
    }
    return pt;
  }
  SymplecticPath g = fundamental_solution(B, opt.steps);
  SymplecticMatrix M(family.boundary, 1e-8);
  IndexReport rep = maslov_index(g, M, opt.index);
  pt.i = rep.i;
  pt.nu = rep.nu;
  pt.status = rep.status;
  if (kernel) {
    NullityResult nr = nullity_rel(g.monodromy(), family.boundary, opt.index.kernel_tol);
    *kernel = nr.kernel_basis;
  }
  return pt;
}

int baseline_nullity(ScanMode mode) {
  return mode == ScanMode::AutonomousOrbit ? 1 : 0;
}

}  // namespace

std::vector<ProfilePoint> index_profile(const HamiltonianFamily& family,
                                        const std::vector<double>& grid,
                                        const ScanOptions& opt) {
  std::vector<ProfilePoint> out;
  out.reserve(grid.size());
  for (double lam : grid) out.push_back(eval_point(family, lam, ScanMode::FixedPeriod, opt));
  return out;
}

ScanReport classify(const HamiltonianFamily& family, ScanMode mode, const ScanOptions& opt) {
  ScanReport rep;
  rep.mode = mode;
  rep.steps = opt.steps;
  rep.monotone_hint = opt.monotone_family;

  const int base_nu = baseline_nullity(mode);

  std::vector<double> grid(opt.grid);
  for (int k = 0; k < opt.grid; ++k)
    grid[k] = family.lambda_lo +
              (family.lambda_hi - family.lambda_lo) * k / double(opt.grid - 1);

  std::vector<ProfilePoint> prof;
  for (double lam : grid) prof.push_back(eval_point(family, lam, mode, opt));
  rep.profile = prof;

  if (prof.front().nu > base_nu || prof.back().nu > base_nu)
    throw std::runtime_error("classify: nu > baseline at a grid endpoint; refine the grid");

  // candidate brackets: grid cells where nu > baseline inside, or the index
  // changes between successive baseline-nullity points.
  struct Bracket {
    double lo, hi;
  };
  std::vector<Bracket> brackets;
  for (size_t k = 0; k + 1 < prof.size(); ++k) {
    const bool left_ok = prof[k].nu <= base_nu;
    const bool right_ok = prof[k + 1].nu <= base_nu;
    if (left_ok && right_ok && prof[k].i == prof[k + 1].i) continue;
    brackets.push_back({prof[k].lambda, prof[k + 1].lambda});
  }
  // merge adjacent brackets
  std::vector<Bracket> merged;
  for (const Bracket& b : brackets) {
    if (!merged.empty() && std::abs(merged.back().hi - b.lo) < 1e-15)
      merged.back().hi = b.hi;
    else
      merged.push_back(b);
  }

  rep.lambda_resolution = opt.refine_floor;
  for (const Bracket& b : merged) {
    // bisect on the index change / nullity to localize mu
    double lo = b.lo, hi = b.hi;
    ProfilePoint plo = eval_point(family, lo, mode, opt);
    ProfilePoint phi_ = eval_point(family, hi, mode, opt);
    while (hi - lo > opt.refine_floor) {
      const double mid = 0.5 * (lo + hi);
      ProfilePoint pm = eval_point(family, mid, mode, opt);
      if (pm.nu > base_nu) {
        // found a degenerate point: take it as the candidate
        lo = hi = mid;
        break;
      }
      if (pm.i != plo.i) {
        hi = mid;
        phi_ = pm;
      } else {
        lo = mid;
        plo = pm;
      }
    }
    const double mu = 0.5 * (lo + hi);
    Candidate cand;
    cand.mu = mu;
    Mat kernel;
    ProfilePoint pmu = eval_point(family, mu, mode, opt, &kernel);
    cand.nu_mu = pmu.nu;
    cand.i_mu = pmu.i;
    cand.kernel_basis = kernel;
    // flanking values at the nearest baseline-nullity points
    double dl = std::max(opt.refine_floor, 1e-4 * (family.lambda_hi - family.lambda_lo));
    ProfilePoint pl = eval_point(family, mu - dl, mode, opt);
    ProfilePoint pr = eval_point(family, mu + dl, mode, opt);
    int guard = 0;
    while (pl.nu > base_nu && guard++ < 12) {
      dl *= 2;
      pl = eval_point(family, mu - dl, mode, opt);
    }
    guard = 0;
    double dr = dl;
    while (pr.nu > base_nu && guard++ < 12) {
      dr *= 2;
      pr = eval_point(family, mu + dr, mode, opt);
    }
    cand.lambda_left = pl.lambda;
    cand.lambda_right = pr.lambda;
    cand.i_left = pl.i;
    cand.i_right = pr.i;

    // necessity filter: nu_mu > baseline required for any bifurcation
    if (cand.nu_mu <= base_nu) continue;

    const long long imu = cand.i_mu;
    const int numu = cand.nu_mu;
    const bool flanks_clean = (pl.nu == base_nu && pr.nu == base_nu);
    const bool jump = flanks_clean && (cand.i_left != cand.i_right);
    auto is_rab_pair = [&](long long lo_i, long long hi_i, int effective_nu) {
      return (std::min(cand.i_left, cand.i_right) == lo_i &&
              std::max(cand.i_left, cand.i_right) == hi_i && effective_nu > 0);
    };

    switch (mode) {
      case ScanMode::FixedPeriod: {
        if (opt.monotone_family && jump) {
          cand.classification = Classification::MonotoneFamily;
          cand.evidence = "monotone family: i jumps by exactly nu across mu";
        } else if (jump && is_rab_pair(imu, imu + numu, numu)) {
          cand.classification = Classification::Rabinowitz;
          cand.evidence = "flanking indices realize {i_mu, i_mu + nu_mu} with nu = 0 flanks";
        } else if (jump) {
          cand.classification = Classification::Jump;
          cand.evidence = "i_left != i_right with nu = 0 flanks";
        } else {
          cand.classification = Classification::NecessaryOnly;
          cand.evidence = "nu_mu > 0 only";
        }
        break;
      }
      case ScanMode::AutonomousOrbit: {
        // baseline nullity 1; necessity needs nu >= 2
        if (cand.nu_mu < 2) {
          cand.classification = Classification::NecessaryOnly;
          cand.evidence = "nu_mu < 2: orbit necessity not met";
          break;
        }
        if (jump && is_rab_pair(imu, imu + numu - 1, numu - 1)) {
          cand.classification = Classification::OrbitRabinowitz;
          cand.evidence = "flanks realize {i_mu, i_mu + nu_mu - 1} with nu = 1 flanks";
        } else if (jump) {
          cand.classification = Classification::OrbitJump;
          cand.evidence = "index jump with nu = 1 flanks";
        } else {
          cand.classification = Classification::NecessaryOnly;
          cand.evidence = "nu_mu >= 2 only";
        }
        break;
      }
      case ScanMode::EquilibriumOrbit: {
        // gate (a): Ker(M - I) ∩ Ker(H''_mu(v0)) = 0
        Vec v0 = family.branch(mu, 0.0);
        Mat H2 = family.hessH(mu, 0.0, v0);
        Mat MI = family.boundary - Mat::Identity(family.dim, family.dim);
        Mat stacked(2 * family.dim, family.dim);
        stacked.topRows(family.dim) = MI;
        stacked.bottomRows(family.dim) = H2;
        const bool gate_a = kernel_dimension(stacked, 1e-10, nullptr, nullptr,
                                             std::max(1.0, H2.norm())) == 0;
        cand.gate_a = gate_a;
        if (gate_a && jump && is_rab_pair(imu, imu + numu, numu)) {
          cand.classification = Classification::EquilibriumOrbit;
          cand.evidence = "no nonzero constant kernel solutions; index pattern {i, i+nu}";
        } else {
          cand.classification = Classification::NecessaryOnly;
          cand.evidence = gate_a ? "index pattern incomplete" : "gate (a) fails";
        }
        break;
      }
      case ScanMode::Brake: {
        // even-kernel gate: kernel solutions w(t) = gamma(t) v with v in U1
        // kernel basis; even ones must vanish
        bool gate_even = true;
        if (cand.kernel_basis.cols() > 0) {
          CoefficientPath B = family.linearization(mu);
          SymplecticPath g = fundamental_solution(B, opt.steps);
          const int d = family.dim;
          const int nprobe = 8;
          for (int c = 0; c < cand.kernel_basis.cols(); ++c) {
            double dev = 0.0;
            Mat N = Mat::Identity(d, d);
            N.topLeftCorner(d / 2, d / 2) *= -1.0;
            for (int k = 1; k <= nprobe; ++k) {
              const double t = family.tau / 2.0 * k / nprobe;
              Vec wt = g.value_at(t) * cand.kernel_basis.col(c);
              // v in U1 has N v = v, so w(-t) = gamma(-t) v = N gamma(t) N v = N w(t);
              // the solution is even iff N w(t) = w(t) for all t.
              dev = std::max(dev, (N * wt - wt).norm());
            }
            if (dev < 1e-6) gate_even = false;  // a nonzero even kernel solution exists
          }
        }
        cand.gate_a = gate_even;
        if (jump && is_rab_pair(imu, imu + numu, numu)) {
          cand.classification = Classification::BrakeRabinowitz;
          cand.evidence = gate_even ? "mu1 pattern {i, i+nu}, no nonzero even kernel solutions"
                                    : "mu1 pattern {i, i+nu}; even-kernel gate fails";
        } else if (jump) {
          cand.classification = Classification::BrakeJump;
          cand.evidence = "mu1 jump with nu1 = 0 flanks";
        } else {
          cand.classification = Classification::NecessaryOnly;
          cand.evidence = "nu1 > 0 only";
        }
        break;
      }
    }
    rep.candidates.push_back(cand);
  }
  return rep;
}

DeformationReport deformation_scan(const HamiltonianFamily& family, double lambda,
                                   const ScanOptions& opt) {
  DeformationReport out;
  CoefficientPath B = family.linearization(lambda);
  // definiteness check along the branch
  double mineig = std::numeric_limits<double>::infinity();
  double maxeig = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 32; ++k) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B.eval(family.tau * k / 32.0));
    mineig = std::min(mineig, es.eigenvalues().minCoeff());
    maxeig = std::max(maxeig, es.eigenvalues().maxCoeff());
  }
  if (mineig <= 0.0 && maxeig >= 0.0) {
    out.applicable = false;
    out.note = "Hessian along the branch is indefinite; corollary inapplicable";
    return out;
  }
  out.hessian_positive = mineig > 0.0;

  SymplecticPath g = fundamental_solution(B, opt.steps);
  const double tau = family.tau;
  auto smin = [&](double t) {
    return smallest_singular_value(g.value_at(t) - family.boundary);
  };
  const int N = std::max(512, opt.steps / 4);
  double scale = 0.0;
  for (int k = 0; k <= 64; ++k) scale = std::max(scale, smin(tau * k / 64.0));
  for (double t0 : scan_minima(smin, 0.0, tau, N, 0.25 * std::max(1.0, scale),
                               1e-6 * std::max(1.0, scale))) {
    if (t0 < 1e-9 * tau || t0 > tau * (1 - 1e-9)) continue;
    out.crossing_times.push_back(t0);
    out.nullities.push_back(
        nullity_rel(g.value_at(t0), family.boundary, opt.index.kernel_tol).nu);
  }

  // interval staircase by direct index evaluation at midpoints
  std::vector<double> bounds{0.0};
  for (double c : out.crossing_times) bounds.push_back(c);
  bounds.push_back(tau);
  SymplecticMatrix M(family.boundary, 1e-8);
  for (size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double s = 0.5 * (bounds[k] + bounds[k + 1]);
    CoefficientPath Bs = CoefficientPath::from_function(
        family.dim, s, [&B](double t) { return B.eval(t); });
    SymplecticPath gs = fundamental_solution(Bs, std::max(256, int(opt.steps * s / tau)));
    IndexReport r = maslov_index(gs, M, opt.index);
    out.interval_index.push_back(r.status == IndexStatus::Ok ? r.i : 0);
  }
  return out;
}

}  // namespace ham
