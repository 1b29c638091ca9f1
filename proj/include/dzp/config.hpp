#pragma once

// Pipeline configuration: strict JSON with defaults. Unknown keys are
// rejected recursively and every error names the offending key.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dzp/temporal_graph.hpp"
#include "dzp/vectorize.hpp"
#include "dzp/zigzag.hpp"

namespace dzp {

struct NoiseConfig {
    NoiseMode mode = NoiseMode::evasion;
    double ratio = 0.0;
    std::uint64_t seed = 1;
    bool explicit_split = false;
    std::vector<int> train_indices;  // used when explicit_split
    std::vector<int> test_indices;
    double train_fraction = 0.7;  // used otherwise: first chunk trains
};

struct ZpiSettings {
    int size = 50;
    bool theta_auto = true;
    double theta = 0.0;  // meaningful when !theta_auto
    ZpiBounds bounds;    // auto by default
};

struct PipelineConfig {
    std::string input_path = "data/toy.csv";
    Granularity granularity = Granularity::seconds(1);
    int eps = 1;
    int delta = 1;
    bool window_full = true;
    int window = 0;  // meaningful when !window_full
    int max_hom_dim = 1;
    ZpiSettings zpi;
    std::optional<NoiseConfig> noise;
    Backend backend = Backend::dowker;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

PipelineConfig parse_config(const std::string& path);
PipelineConfig parse_config_text(const std::string& json_text, const std::string& origin);

// Fully resolved config as JSON with sorted keys; input to the manifest
// hash.
std::string canonical_config_json(const PipelineConfig& cfg);

// FNV-1a 64 over the canonical JSON.
std::uint64_t config_hash(const PipelineConfig& cfg);

}  // namespace dzp
