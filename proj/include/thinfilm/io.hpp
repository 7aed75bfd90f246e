#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "thinfilm/analysis.hpp"
#include "thinfilm/ledger.hpp"
#include "thinfilm/model.hpp"

namespace thinfilm {

using nlohmann::json;

/// Shortest decimal that parses back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_double(double v);
/// Inverse of format_double; throws IoError on malformed text.
double parse_double(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

inline constexpr std::string_view kLedgerHeader =
    "t,mass,energy,entropy,alpha_entropy,hx_sq,sup,moment,B1,B2,Btilde,x_left,x_right";

std::string ledger_csv(const RunLedger& ledger);
/// Parses the columns of kLedgerHeader back into samples.
std::vector<FunctionalSample> parse_ledger_csv(std::string_view text);

/// '#' header lines "key = value" for n, m, a0, a1, t, dx, origin, then one
/// "x h" row per node.
std::string snapshot_text(const Snapshot& s, const ProblemParams& p);
Snapshot parse_snapshot(std::string_view text);

/// Header line plus rows, every cell through format_double.
std::string numeric_csv(std::string_view header, const std::vector<std::vector<double>>& rows);

// JSON forms; doubles that are not finite are stored as strings.
json number(double v);
double number_from(const json& j);

void to_json(json& j, const BasicConstants& b);
void from_json(const json& j, BasicConstants& b);
void to_json(json& j, const ConstantsLedger& k);
void from_json(const json& j, ConstantsLedger& k);
void to_json(json& j, const BlowupCertificate& c);
void from_json(const json& j, BlowupCertificate& c);
void to_json(json& j, const WeightedBoundReport& r);
void to_json(json& j, const SpreadingFit& f);
void to_json(json& j, const RegimeReport& r);
void to_json(json& j, const LedgerEvent& e);
void to_json(json& j, const SegmentRecord& s);

}  // namespace thinfilm
