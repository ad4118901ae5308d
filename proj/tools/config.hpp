// config.hpp — Model configuration documents for the command-line tool
//
// A config is a JSON object; see schemas/model_config.schema.json. Every
// violation is reported as "<file>:<line>: <path>: <problem>".

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "adiael/elimination.hpp"

namespace adiael::cli {

inline constexpr int kConfigSchemaVersion = 1;

/// Input problem in a config document (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    BipartiteModel model;
    SylvesterMethod method = SylvesterMethod::direct;
    QuadratureConfig quadrature;
    int order = 2;
};

/// JSON pointer of every value in a syntactically valid document -> 1-based
/// line where the value starts.
std::map<std::string, int> index_lines(const std::string& text);

ModelConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ModelConfig load_config(const std::string& path);

/// Dense complex matrix from a row-major literal whose entries are numbers or
/// [re, im] pairs. Throws std::invalid_argument on malformed input.
Matrix matrix_from_json(const nlohmann::json& j);

} // namespace adiael::cli
