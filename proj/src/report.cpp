#include "ham/report.hpp"

#include <sstream>

namespace ham {

Json report_header(const std::string& command, unsigned seed) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

Json to_json(const IndexReport& r) {
  Json j;
  j["i"] = r.i;
  j["nu"] = r.nu;
  if (r.cz_valid) j["cz"] = r.cz;
  j["status"] = r.status == IndexStatus::Ok ? "OK" : "UNRESOLVED";
  if (!r.note.empty()) j["note"] = r.note;
  j["kernel_margin"] = r.kernel_margin;
  if (r.bracket_applied) {
    j["bracket_applied"] = true;
    j["bracket_value"] = r.bracket_value;
    j["bracket_fraction"] = r.bracket_fraction;
  }
  Json cr = Json::array();
  for (const CrossingRecord& c : r.crossings) {
    Json e;
    e["t"] = c.t;
    e["kernel_dim"] = c.kernel_dim;
    e["signature"] = c.signature;
    e["margin"] = c.margin;
    e["at_endpoint"] = c.at_endpoint;
    cr.push_back(e);
  }
  j["crossings"] = cr;
  return j;
}

Json to_json(const ProfilePoint& p) {
  Json j;
  j["lambda"] = p.lambda;
  j["i"] = p.i;
  j["nu"] = p.nu;
  j["status"] = p.status == IndexStatus::Ok ? "OK" : "UNRESOLVED";
  return j;
}

Json to_json(const Candidate& c) {
  Json j;
  j["mu"] = c.mu;
  j["nu_mu"] = c.nu_mu;
  j["i_mu"] = c.i_mu;
  j["i_left"] = c.i_left;
  j["i_right"] = c.i_right;
  j["lambda_left"] = c.lambda_left;
  j["lambda_right"] = c.lambda_right;
  j["classification"] = to_string(c.classification);
  j["evidence"] = c.evidence;
  j["gate"] = c.gate_a;
  return j;
}

Json to_json(const ScanReport& r) {
  Json j;
  Json prof = Json::array();
  for (const ProfilePoint& p : r.profile) prof.push_back(to_json(p));
  j["profile"] = prof;
  Json cands = Json::array();
  for (const Candidate& c : r.candidates) cands.push_back(to_json(c));
  j["candidates"] = cands;
  j["steps"] = r.steps;
  j["lambda_resolution"] = r.lambda_resolution;
  return j;
}

Json to_json(const MorseCount& m) {
  Json j;
  j["m_minus"] = m.m_minus;
  j["m_zero"] = m.m_zero;
  j["gap"] = m.gap;
  j["converged"] = m.converged;
  return j;
}

Json to_json(const BrakeIndices& b) {
  Json j;
  j["mu1"] = b.mu1;
  j["mu2"] = b.mu2;
  j["nu1"] = b.nu1;
  j["nu2"] = b.nu2;
  j["full_period_count1"] = b.full_period_count1;
  j["full_period_count2"] = b.full_period_count2;
  j["status"] = b.status == IndexStatus::Ok ? "OK" : "UNRESOLVED";
  return j;
}

Json to_json(const BranchPoint& b) {
  Json j;
  j["lambda"] = b.lambda;
  j["z0"] = std::vector<double>(b.z0.data(), b.z0.data() + b.z0.size());
  j["boundary_residual"] = b.boundary_residual;
  j["flow_residual"] = b.flow_residual;
  j["distance_to_branch"] = b.distance_to_branch;
  j["side"] = b.side;
  j["converged"] = b.converged;
  j["degenerate_jacobian"] = b.degenerate_jacobian;
  return j;
}

std::string render_table(const Json& doc) {
  std::ostringstream os;
  os << "command: " << doc.value("command", "?") << "\n";
  if (doc.contains("index")) {
    const Json& r = doc["index"];
    os << "  i = " << r["i"] << "  nu = " << r["nu"];
    if (r.contains("cz")) os << "  cz = " << r["cz"];
    os << "  [" << r.value("status", "?") << "]\n";
  }
  if (doc.contains("scan")) {
    os << "  lambda        i     nu\n";
    for (const Json& p : doc["scan"]["profile"])
      os << "  " << p["lambda"] << "  " << p["i"] << "  " << p["nu"] << "\n";
    for (const Json& c : doc["scan"]["candidates"])
      os << "  candidate mu = " << c["mu"] << "  " << c["classification"]
         << "  (nu = " << c["nu_mu"] << ", i: " << c["i_left"] << " -> " << c["i_right"]
         << ")\n";
  }
  if (doc.contains("morse")) {
    const Json& m = doc["morse"];
    os << "  m_minus = " << m["m_minus"] << "  m_zero = " << m["m_zero"];
    if (doc.contains("predicted")) os << "  predicted = " << doc["predicted"];
    if (doc.contains("match")) os << "  match = " << doc["match"];
    os << "\n";
  }
  if (doc.contains("brake")) {
    const Json& b = doc["brake"];
    os << "  mu1 = " << b["mu1"] << "  mu2 = " << b["mu2"] << "  nu1 = " << b["nu1"]
       << "  nu2 = " << b["nu2"] << "\n";
  }
  if (doc.contains("branch_points")) {
    for (const Json& b : doc["branch_points"])
      os << "  branch point at lambda = " << b["lambda"]
         << ", |u(0)| = " << Json(b["z0"]).dump() << ", residual = " << b["boundary_residual"]
         << "\n";
  }
  return os.str();
}

}  // namespace ham
