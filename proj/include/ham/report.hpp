#pragma once

#include <json.hpp>

#include "ham/brake.hpp"
#include "ham/dual_operator.hpp"
#include "ham/flow.hpp"
#include "ham/scan.hpp"

namespace ham {

using Json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

Json report_header(const std::string& command, unsigned seed);
Json to_json(const IndexReport& r);
Json to_json(const ProfilePoint& p);
Json to_json(const Candidate& c);
Json to_json(const ScanReport& r);
Json to_json(const MorseCount& m);
Json to_json(const BrakeIndices& b);
Json to_json(const BranchPoint& b);

// Human-readable table rendering of a report document.
std::string render_table(const Json& doc);

}  // namespace ham
