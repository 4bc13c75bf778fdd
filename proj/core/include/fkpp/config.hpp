#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fkpp/error.hpp"
#include "fkpp/experiments.hpp"

namespace fkpp {

/// Run configuration. The on-disk format is YAML; see README for the key
/// reference. Experiment-level `tolerances` override the top-level ones key
/// by key.
struct Config {
    std::vector<ExperimentSpec> experiments;
    std::string output_dir = "fkpp-out";
    Tolerances tolerances;
    unsigned threads = 1;

    bool operator==(const Config&) const = default;
};

/// Syntax errors carry the 1-based line/column; semantic errors carry the key
/// path (e.g. "experiments[0].grid.diffusivity") and the node position.
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, std::string key_path, int line, int column);

    const std::string& key_path() const { return key_path_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    std::string key_path_;
    int line_;
    int column_;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

/// YAML text that parses back to an equal Config; doubles use 17 significant digits.
std::string serialize_config(const Config& config);

}  // namespace fkpp
