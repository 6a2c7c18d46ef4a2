#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epic/backend.hpp"
#include "epic/dataset.hpp"
#include "epic/orchestrate.hpp"
#include "epic/prompt.hpp"
#include "epic/sampler.hpp"

namespace epic {

// Everything one generation run needs. Loaded from a JSON document; relative
// paths resolve against the document's directory. The API key is never part
// of the config; it comes from EPIC_API_KEY.
struct RunConfig {
    std::filesystem::path dataset;
    std::string target;
    std::optional<std::filesystem::path> descriptions;
    LoadOptions load;
    SamplePlan plan;
    PromptVariant variant;
    bool use_descriptions = true;
    BackendConfig backend;
    GenerationTarget targets;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;
    std::string tokenizer_command;  // empty selects the heuristic estimator
};

struct NamedVariant {
    std::string name;
    SamplePlan plan;
    PromptVariant variant;
    bool use_descriptions = true;
};

RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Fails with Errc::Config when a referenced input is missing.
void check_paths(const RunConfig& config);

// Listed "variants" first, then the cross-product of "matrix" axes in
// key order with the last axis varying fastest.
std::vector<NamedVariant> parse_variants(const nlohmann::json& doc, const RunConfig& base);

nlohmann::ordered_json to_json(const RunConfig& config);
nlohmann::ordered_json to_json(const NamedVariant& variant);

TokenEstimator make_estimator(const RunConfig& config);

}  // namespace epic
