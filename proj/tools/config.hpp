#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecgbeat/balance.hpp"
#include "ecgbeat/cv.hpp"
#include "ecgbeat/model.hpp"
#include "ecgbeat/pipeline.hpp"
#include "ecgbeat/synth.hpp"

namespace ecgbeat::cli {

struct GbdtGrid {
    std::vector<double> learning_rate{0.1, 0.5};
    std::vector<std::size_t> max_depth{4, 10};
    std::vector<std::size_t> n_estimators{50};
};

struct RfGrid {
    std::vector<std::size_t> n_trees{50, 100};
    std::vector<std::size_t> max_depth{0, 10};
};

/// Every tunable of the pipeline. Defaults are the documented module defaults.
struct PipelineConfig {
    std::filesystem::path workdir = "work";
    std::uint64_t seed = 42;
    std::vector<std::string> labels{"N", "S", "V"};

    // ingest
    double fs = 360.0;
    std::size_t lead = 0;
    bool strict_labels = false;

    PreprocessConfig preprocess;
    double test_fraction = 0.2;

    std::map<std::string, std::size_t> targets{{"N", 300000}, {"S", 100000}, {"V", 100000}};
    std::size_t k_neighbors = 5;

    std::size_t mtf_bins = 8;

    std::string model = "gbdt";
    GbdtParams gbdt;
    RfParams rf;

    std::size_t folds = 3;
    bool grid_balance = false;
    GbdtGrid gbdt_grid;
    RfGrid rf_grid;

    SynthConfig synth;

    LabelSet label_set() const { return LabelSet(labels); }
    BalancePlan balance_plan() const;  // seeded with `seed`
    nlohmann::json to_json() const;
};

/// Reads `j` into `cfg`, appending one message per bad or unknown key.
void merge_json(PipelineConfig& cfg, const nlohmann::json& j, std::vector<std::string>& errors);

/// Runs every module precondition; returns all failures.
std::vector<std::string> validate(const PipelineConfig& cfg);

/// Cross product of the grid axes for the configured model kind.
std::vector<ModelSpec> model_grid(const PipelineConfig& cfg);

/// Parses `N=300000,S=100000,V=100000`.
std::map<std::string, std::size_t> parse_targets(const std::string& text);

/// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string config_hash(const PipelineConfig& cfg);

}  // namespace ecgbeat::cli
