#pragma once

// Orchestration of the CLI subcommands and their JSON reports.
//
// Report layout ("mwlab-report/1"):
//   schema, tool{name, version}, command, config{...}, module{...},
//   result{...command specific...}, verdict{status, exit_code, summary},
//   timing{wall_seconds, jobs}
// Everything outside "timing" is a function of the config alone.

#include "mwlab/module_config.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mwlab {

inline constexpr const char* kReportSchema = "mwlab-report/1";

enum ExitCode : int { kExitOk = 0, kExitAnomaly = 1, kExitUsage = 2 };

struct RunConfig {
    std::string subcommand;
    std::string fixture;
    std::optional<std::uint64_t> place_bound;
    std::optional<std::uint64_t> step_bound;
    std::optional<long> l;
    std::optional<std::vector<unsigned>> pattern;
    std::string out;
    int jobs = 0;
    std::uint64_t seed = 0;
};

struct RunOutcome {
    nlohmann::json report;
    int exit_code = kExitOk;
    std::vector<std::string> summary;  // human-readable lines
};

RunOutcome run_counterexample(const RunConfig& cfg);
RunOutcome run_dynamics(const RunConfig& cfg);
RunOutcome run_scan(const RunConfig& cfg);
RunOutcome run_axioms(const RunConfig& cfg);
// Re-validates the certificates and witnesses stored in a report, using only
// the recorded data (scan-orders hits are re-verified one place at a time).
RunOutcome verify_report(const nlohmann::json& report);

// Dispatches on cfg.subcommand; InputError and ResourceError become exit 2.
RunOutcome run(const RunConfig& cfg);

// Serialization helpers, also used by the tests.
nlohmann::json to_json(const IntVector& v);
nlohmann::json to_json(const IntMatrix& m);
nlohmann::json to_json(const FiniteAbelianGroup& g);
nlohmann::json to_json(const CertificateCheck& c);
nlohmann::json to_json(const PlaceFixing& pf);
FixingMatrixCertificate certificate_from_json(const nlohmann::json& j);

// Report with the timing block removed; stable across runs and job counts.
nlohmann::json strip_timing(nlohmann::json report);

}  // namespace mwlab
