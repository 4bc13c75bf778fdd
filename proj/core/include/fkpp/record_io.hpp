#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "fkpp/experiments.hpp"

namespace fkpp {

/// RunRecord as a JSON document. Layout:
///   { "experiment", "runner", "spec_hash", "version", "canonical_spec",
///     "passed", "failures": [..], "wall_seconds",
///     "curves": [ { "label", "monotone", "converged", "reference_lambda"?,
///                   "warnings": [..],
///                   "points": [ { "parameter", "lambda", "residual", "iterations",
///                                 "nodes", "wall_seconds", "lambda_scaled"?,
///                                 "shift_error"?, "classification"?, "expected"?,
///                                 "decay_rate"?, "monitors"? } ] } ] }
/// Doubles are written so that they parse back bit-identically.
std::string record_to_json(const RunRecord& record, int indent = 2);
RunRecord record_from_json(const std::string& text);

/// parameter,lambda,residual,iterations,nodes, one row per point, 17 significant digits.
void write_curve_csv(std::ostream& os, const CurveResult& curve);

/// Writes <dir>/<experiment>.json and <dir>/<experiment>_<label>.csv per curve.
void write_record_files(const std::filesystem::path& dir, const RunRecord& record);

/// {"error": {"kind", "message", "exit_code"}}
std::string error_json(const std::string& kind, const std::string& message, int exit_code);

}  // namespace fkpp
