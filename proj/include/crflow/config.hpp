// Run configuration: line-oriented `key = value` text with `[section]` headers.
// Comments start with '#' or ';'. Every key is addressed as section.key.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "crflow/elliptic.hpp"
#include "crflow/flow.hpp"
#include "crflow/grid.hpp"

namespace crflow {

struct ConfigEntry {
    std::string value;
    int line = 0;  // 0 for overrides from the command line
};

/// Parsed but uninterpreted document, keyed by "section.key".
using ConfigDocument = std::map<std::string, ConfigEntry>;

/// Throws ConfigError with the line number on malformed lines or duplicates.
ConfigDocument parse_config(const std::string& text);
ConfigDocument load_config_file(const std::string& path);
/// Applies "section.key=value" overrides.
void apply_override(ConfigDocument& doc, const std::string& assignment);

struct RunConfig {
    std::string subcommand;
    std::string output = "out";
    std::uint64_t seed = 12345;
    int record_every = 1;
    int snapshot_every = 0;  // 0: initial and final state only

    Grid grid = Grid::cube(32, 1.0, 4);
    std::vector<int> verify_resolutions{16, 32};

    std::string metric_preset = "perturbed-torus";
    double metric_amplitude = 0.0;  // 0: the preset's own default
    std::string metric_input;  // snapshot path, overrides the preset

    IntegratorConfig integrator;
    double horizon = 0.2;
    int random_domains = 8;

    std::string model = "nil";
    std::array<double, 3> abc{1.0, 1.0, 1.0};
    double isotropic_c = 6.0;
    double homogeneous_horizon = 5.0;  // classical time
    double rtol = 1e-10;
    double ds = 0.05;
    bool renormalize = true;

    std::string project_kind = "tilde";
    std::string tensor_input;  // snapshot path; random smooth tensor otherwise
};

/// Interprets a document. Unknown keys, bad values and out-of-range settings
/// raise ConfigError naming the field and line.
RunConfig interpret_config(const ConfigDocument& doc, const std::string& subcommand);

/// The effective configuration as a config file with sorted sections and keys.
/// It parses back to the same RunConfig (the output directory is not part of
/// it); the config hash is taken over these bytes.
std::string canonical_config(const RunConfig& cfg);
/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace crflow
