// hamscan: Maslov-type indices, dual Morse oracles, and bifurcation scans for
// parametrized Hamiltonian boundary value problems.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ham/dual_action.hpp"
#include "ham/report.hpp"

using namespace ham;

namespace {

struct CliConfig {
  std::string config_path;
  std::string out_path;
  int steps = 4096;
  int basis = 256;
  double tol_kernel = 1e-8;
  unsigned seed = 0;
};

Mat parse_boundary(const Json& j, int n) {
  const std::string type = j.value("type", "identity");
  if (type == "identity") return Mat::Identity(2 * n, 2 * n);
  if (type == "rotation") {
    const double theta = j.at("theta").get<double>();
    CMat u = CMat::Identity(n, n) * std::complex<double>(std::cos(theta), std::sin(theta));
    return real_rep(u);
  }
  if (type == "diag_kappa") {
    const int kappa = j.at("kappa").get<int>();
    if (kappa < 0 || kappa > n) throw std::invalid_argument("config: kappa out of range");
    Mat M = Mat::Identity(2 * n, 2 * n);
    for (int i = 0; i < n - kappa; ++i) {
      M(i, i) = -1.0;
      M(n + i, n + i) = -1.0;
    }
    return M;
  }
  if (type == "matrix") {
    const int dim = j.at("dim").get<int>();
    auto rows = j.at("rows").get<std::vector<double>>();
    if (static_cast<int>(rows.size()) != dim * dim)
      throw std::invalid_argument("config: matrix entries must be row-major dim*dim");
    Mat M(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) M(r, c) = rows[r * dim + c];
    return M;
  }
  throw std::invalid_argument("config: unknown boundary matrix type '" + type + "'");
}

HamiltonianFamily parse_family(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const int n = j.at("n").get<int>();
  const double tau = j.at("tau").get<double>();
  auto lam = j.value("lambda", std::vector<double>{0.0, 1.0});
  if (lam.size() != 2) throw std::invalid_argument("config: family.lambda must be [lo, hi]");
  Mat M = parse_boundary(j.value("M", Json{{"type", "identity"}}), n);
  SymplecticMatrix check(M, 1e-10);
  std::vector<double> coeffs = j.value("coefficients", std::vector<double>{});

  HamiltonianFamily f;
  if (kind == "linear_quadratic") {
    f = make_linear_family(n, tau, M, lam[0], lam[1]);
  } else if (kind == "quadratic_plus_quartic") {
    const double c4 = coeffs.empty() ? 1.0 : coeffs[0];
    f = make_quartic_family(n, tau, M, lam[0], lam[1], c4);
  } else if (kind == "rotation_blocks") {
    if (static_cast<int>(coeffs.size()) != n)
      throw std::invalid_argument("config: rotation_blocks needs n coefficients (rho_i)");
    Vec rhos(n);
    for (int i = 0; i < n; ++i) rhos(i) = coeffs[i];
    f = make_rotation_family(rhos, tau, M, lam[0], lam[1]);
  } else if (kind == "polynomial") {
    f = make_polynomial_family(n, tau, M, lam[0], lam[1], coeffs);
  } else {
    throw std::invalid_argument("config: unknown family.kind '" + kind + "'");
  }
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("config: non-finite coefficient");
  return f;
}

ScanMode parse_mode(const std::string& s) {
  if (s == "fixed_period") return ScanMode::FixedPeriod;
  if (s == "autonomous_orbit") return ScanMode::AutonomousOrbit;
  if (s == "equilibrium_orbit") return ScanMode::EquilibriumOrbit;
  if (s == "brake") return ScanMode::Brake;
  throw std::invalid_argument("config: unknown mode '" + s + "'");
}

int write_report(const Json& doc, const CliConfig& cli) {
  const std::string text = doc.dump(2) + "\n";
  if (!cli.out_path.empty()) {
    std::ofstream out(cli.out_path);
    out << text;
  }
  std::cout << render_table(doc);
  return 0;
}

int run_command(const std::string& command, const CliConfig& cli) {
  std::ifstream in(cli.config_path);
  if (!in) {
    std::cerr << "config error: cannot open '" << cli.config_path << "'\n";
    return 3;
  }
  Json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    std::cerr << "config error: invalid JSON: " << e.what() << "\n";
    return 3;
  }

  Json doc = report_header(command, cli.seed);
  doc["tolerances"] = {{"steps", cli.steps}, {"basis", cli.basis},
                       {"tol_kernel", cli.tol_kernel}};
  bool unresolved = false;

  try {
    HamiltonianFamily family = parse_family(cfg.at("family"));
    family.validate();
    IndexOptions iopt;
    iopt.kernel_tol = cli.tol_kernel;
    ScanOptions sopt;
    sopt.steps = cli.steps;
    sopt.index = iopt;
    sopt.grid = cfg.value("family", Json::object()).value("grid", 33);
    sopt.monotone_family = cfg.value("monotone", false);

    if (command == "index") {
      const double lambda = cfg.value("lambda", 1.0);
      CoefficientPath B = family.linearization(lambda);
      SymplecticPath g = fundamental_solution(B, cli.steps);
      SymplecticMatrix M(family.boundary, 1e-8);
      IndexReport rep = maslov_index(g, M, iopt);
      doc["lambda"] = lambda;
      doc["index"] = to_json(rep);
      unresolved |= rep.status != IndexStatus::Ok;
    } else if (command == "scan" || command == "confirm") {
      ScanMode mode = parse_mode(cfg.value("mode", "fixed_period"));
      ScanReport rep = classify(family, mode, sopt);
      doc["scan"] = to_json(rep);
      for (const ProfilePoint& p : rep.profile) unresolved |= p.status != IndexStatus::Ok;
      if (command == "confirm") {
        Json confirmations = Json::array();
        BranchSwitchOptions bopt;
        bopt.steps = cli.steps;
        for (const Candidate& cand : rep.candidates) {
          Json c;
          c["mu"] = cand.mu;
          Json pts = Json::array();
          for (const BranchPoint& bp : branch_switch(family, cand.mu, cand.kernel_basis, bopt))
            pts.push_back(to_json(bp));
          c["branch_points"] = pts;
          confirmations.push_back(c);
        }
        doc["confirmations"] = confirmations;
      }
    } else if (command == "morse-oracle") {
      const double lambda = cfg.value("lambda", 1.0);
      const double K = cfg.at("K").get<double>();
      CoefficientPath B = family.linearization(lambda);
      DualOperatorSpec spec = DualOperatorSpec::make(family.boundary, family.tau, K);
      auto [A, mc] = assemble_and_count(B, spec, cli.basis);
      doc["morse"] = to_json(mc);
      // identity check against the crossing-index route
      SymplecticPath gB = fundamental_solution(B, cli.steps);
      CoefficientPath BK =
          CoefficientPath::constant(K * Mat::Identity(family.dim, family.dim), family.tau);
      SymplecticPath gK = fundamental_solution(BK, cli.steps);
      SymplecticMatrix M(family.boundary, 1e-8);
      IndexReport iB = maslov_index(gB, M, iopt);
      IndexReport iK = maslov_index(gK, M, iopt);
      const long long predicted = iB.i - iK.i - iK.nu;
      doc["predicted"] = predicted;
      doc["match"] = (predicted == mc.m_minus && iB.nu == mc.m_zero);
      unresolved |= iB.status != IndexStatus::Ok || iK.status != IndexStatus::Ok ||
                    !mc.converged;
    } else if (command == "brake-index") {
      const double lambda = cfg.value("lambda", 1.0);
      CoefficientPath B = family.linearization(lambda);
      BrakeIndices bi = brake_indices(B, cli.steps, iopt);
      doc["brake"] = to_json(bi);
      unresolved |= bi.status != IndexStatus::Ok;
    } else if (command == "solve-bvp") {
      const double lambda = cfg.value("lambda", 1.0);
      Vec z0 = Vec::Zero(family.dim);
      if (cfg.contains("bvp") && cfg["bvp"].contains("z_init")) {
        auto zi = cfg["bvp"]["z_init"].get<std::vector<double>>();
        if (static_cast<int>(zi.size()) != family.dim)
          throw std::invalid_argument("config: bvp.z_init has wrong dimension");
        for (int i = 0; i < family.dim; ++i) z0(i) = zi[i];
      }
      Vec off = Vec::Zero(family.dim);
      if (cfg.contains("bvp") && cfg["bvp"].contains("offset")) {
        auto ov = cfg["bvp"]["offset"].get<std::vector<double>>();
        for (int i = 0; i < family.dim && i < static_cast<int>(ov.size()); ++i) off(i) = ov[i];
      }
      BranchPoint bp = newton_bvp(family, lambda, z0, off, cli.steps);
      Json arr = Json::array();
      arr.push_back(to_json(bp));
      doc["branch_points"] = arr;
      unresolved |= !bp.converged;
    } else {
      std::cerr << "config error: unknown command\n";
      return 3;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  write_report(doc, cli);
  return unresolved ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maslov-type indices and bifurcation detection for Hamiltonian BVPs"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CliConfig cli;
  app.add_option("--config", cli.config_path, "config file (JSON)")->required();
  app.add_option("--out", cli.out_path, "output report path (JSON)");
  app.add_option("--steps", cli.steps, "integration steps")->default_val(4096);
  app.add_option("--basis", cli.basis, "Galerkin basis size")->default_val(256);
  app.add_option("--tol-kernel", cli.tol_kernel, "kernel singular value threshold")
      ->default_val(1e-8);
  app.add_option("--seed", cli.seed, "rng seed recorded in the report")->default_val(0);

  std::string picked;
  for (const char* name :
       {"index", "scan", "morse-oracle", "brake-index", "solve-bvp", "confirm"}) {
    CLI::App* sub = app.add_subcommand(name, name);
    sub->callback([&picked, name]() { picked = name; });
  }

  CLI11_PARSE(app, argc, argv);
  return run_command(picked, cli);
}
