#pragma once

// Run descriptions: a module (curve fixture or synthetic tables) plus named
// points and per-command sections, read from JSON. A bare .curve file is also
// accepted and describes the module alone.

#include "mwlab/dynamics.hpp"
#include "mwlab/local_global.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mwlab {

struct DynamicsSection {
    nlohmann::json phi;  // {"multiply": m} or {"matrix": [[...]], "torsion_multiplier": t}
    std::string point;
    std::vector<std::string> lambda;
};

struct ScanSection {
    std::vector<std::string> points;
    std::optional<long> l;
    std::optional<std::vector<unsigned>> pattern;
};

struct RunDescription {
    std::string path;
    std::string format;  // "curve" or "json"
    std::shared_ptr<const GlobalModule> module;
    std::vector<std::string> point_names;  // declaration order
    std::map<std::string, GlobalPoint> points;

    std::optional<std::vector<std::string>> counterexample;
    std::optional<DynamicsSection> dynamics;
    std::optional<ScanSection> scan;
    std::optional<std::uint64_t> place_bound;
    std::optional<std::uint64_t> step_bound;

    // Evaluates "2*P1 - P2 + T" style combinations of declared names.
    GlobalPoint point(const std::string& expr) const;
    std::vector<GlobalPoint> points_of(const std::vector<std::string>& exprs) const;
};

// Throws InputError (FixtureError for curve files) on any malformed input.
RunDescription load_run_description(const std::string& path);
RunDescription parse_run_description(const nlohmann::json& doc, const std::string& origin,
                                     const std::string& base_dir = ".");

EndoMap parse_endomorphism(const nlohmann::json& phi);
// Integers as JSON numbers or decimal strings.
Integer json_integer(const nlohmann::json& v, const std::string& what);
nlohmann::json integer_json(const Integer& n);

}  // namespace mwlab
