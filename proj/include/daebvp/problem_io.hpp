/*
 * JSON problem files.
 *
 *   {
 *     "schema_version": "1.0",
 *     "mode": "bvp" | "ivp",
 *     "E": [[...], ...], "A": ..., "B": ..., "C": ...,   // row-major
 *     "d": [...],
 *     "T": 1.0,
 *     "f": [ {"alpha": 0, "omega": 0, "kind": "none", "poly": [[v0...], [v1...]]} ]
 *   }
 *
 * In ivp mode B and C are ignored (and may be omitted) and d is x(0).
 */

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bvp.hpp"

namespace daebvp
{

inline constexpr const char *schema_version = "1.0";

enum class ProblemMode
{
    bvp,
    ivp
};

struct ProblemFile
{
    std::string schema = schema_version;
    ProblemMode mode = ProblemMode::bvp;
    Matrix E, A, B, C;
    Vector d;
    double T = 1.0;
    ExpPolySignal f;

    // For ivp mode: B = I, C = 0.
    BvpProblem to_problem() const;
};

// Throws Error(InvalidInput) naming the offending field.
ProblemFile parse_problem(const nlohmann::json &j);

// As parse_problem; JSON syntax errors report line and column.
ProblemFile load_problem(const std::filesystem::path &path);
ProblemFile load_problem_text(const std::string &text);

nlohmann::ordered_json to_json(const ProblemFile &problem);

void save_problem(const ProblemFile &problem, const std::filesystem::path &path);

} // namespace daebvp
