#pragma once

// End-to-end pipeline orchestration and the persisted JSON run report:
// construct the surface and subsystem, measure degrees, compose to the
// plane, certify, run the integer audits, and serialize everything with a
// stable key order. Identical configurations produce byte-identical
// reports; files are written atomically (temp + rename).

#include "irrmap/audit.hpp"
#include "irrmap/project.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace irrmap {

struct RunConfig {
    int d = 1;
    std::optional<Mat2c> omega;   // explicit period matrix; else drawn from seed
    std::string profile = "auto"; // "auto" or 16 comma-separated weights
    std::uint64_t seed = 7;
    double newton_tol = 1e-10;
    int degree_trials = 5;
    int degree_grid = 16;
    int certify_trials = 20;
    int certify_grid = 12;
    std::string out; // report file path; empty writes nothing
};

// Surface descriptor: {"d": int, "omega": [[[re,im],[re,im]],[[re,im],[re,im]]]}.
Mat2c omega_from_json(const nlohmann::json& j);
nlohmann::ordered_json omega_to_json(const Mat2c& omega);
std::pair<int, Mat2c> parse_surface_descriptor(const std::string& text);

// Deterministic derived seed for independent random streams.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt);

// Runs the full pipeline and returns the report. Writes it to cfg.out when
// set (before raising any audit-gate error, so failures stay inspectable).
// Throws irrmap::error; errc_is_numerical() distinguishes exit semantics.
nlohmann::ordered_json run_pipeline(const RunConfig& cfg);

// Canonical serialized form: 2-space indent, newline-terminated.
std::string serialize_report(const nlohmann::ordered_json& report);
void write_report_atomic(const nlohmann::ordered_json& report,
                         const std::string& path);

} // namespace irrmap
