#pragma once

// JSON and CSV emission for reports, ledgers and manifests, and JSON parsing of
// solver configurations. Keys are sorted (nlohmann::json uses std::map).

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sigma2/audit.hpp"
#include "sigma2/solver.hpp"
#include "sigma2/symfun.hpp"

namespace sigma2 {

using Json = nlohmann::json;

Json to_json(const SlackRecord& s);
Json to_json(const SolverReport& r);
Json to_json(const AuditLedger& l);

/// SolverConfig from a JSON document with the SolverConfig field names.
/// rhs: {"kind": "constant", "value": c} | {"kind": "manufactured", "delta": δ}
///    | {"kind": "fu_yau", "alpha": α, "f": c or path, "mu": c or path}
/// chi: "identity" or {"scale": s}. phi0 (optional): path to an S2F1 field.
struct ParsedConfig {
    SolverConfig cfg;
    Json rhs;  // the rhs object as given
    Json chi;  // the chi entry as given
    std::string phi0_path;
    std::optional<ScalarField> phi_star;  // manufactured kind only
};
ParsedConfig solver_config_from_json(const Json& j);

/// The effective configuration with every default filled in.
Json to_json(const ParsedConfig& pc);

/// FNV-1a 64-bit over the compact dump of j, as 16 hex digits.
std::string config_digest(const Json& j);

/// Doubles in JSON: non-finite values become null.
Json number(double v);

void write_json(const std::string& path, const Json& j);

/// CSV with a fixed header; rows are written verbatim, so an empty table is
/// just the header line.
class CsvTable {
public:
    explicit CsvTable(std::string header) : header_(std::move(header)) {}
    void add(std::string row) { rows_.push_back(std::move(row)); }
    std::size_t size() const { return rows_.size(); }
    void write(const std::string& path) const;

private:
    std::string header_;
    std::vector<std::string> rows_;
};

/// Shortest round-trip decimal form of v.
std::string fmt(double v);

} // namespace sigma2
