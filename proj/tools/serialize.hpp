// serialize.hpp — JSON and CSV forms of reduced models, reports and oracles
//
// Complex numbers are [re, im] pairs; matrices are row-major nested arrays.
// Doubles are written in shortest round-trip form, so re-reading and
// re-writing a document reproduces it byte for byte.

#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "adiael/oracles.hpp"
#include "adiael/validation.hpp"

namespace adiael::cli {

inline constexpr int kOutputSchemaVersion = 1;

nlohmann::json to_json(cplx z);
nlohmann::json to_json(const Matrix& M);
nlohmann::json real_matrix_json(const Eigen::MatrixXd& M);

nlohmann::json reduced_json(const ReducedModel& r);
nlohmann::json report_json(const ValidationReport& r, const SweepConfig& cfg);
nlohmann::json jc_oracle_json(const JCParams& p);
nlohmann::json labframe_oracle_json(const LabFrameParams& p);

/// One row per (g, t): g, epsilon, t, discrepancy_manifold, discrepancy_product.
void write_sweep_csv(std::ostream& os, const ValidationReport& r);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// Pretty-printed document followed by a newline.
std::string dump(const nlohmann::json& j);

} // namespace adiael::cli
