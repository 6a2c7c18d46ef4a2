#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epic/backend.hpp"
#include "epic/dataset.hpp"
#include "epic/decode.hpp"
#include "epic/mapper.hpp"
#include "epic/prompt.hpp"
#include "epic/sampler.hpp"

namespace epic {

struct GenerationTarget {
    std::map<std::string, std::size_t> per_class;
    std::size_t max_inferences = 0;  // 0 selects the default budget
    std::uint64_t seed = 0;
};

struct InferenceRecord {
    std::uint64_t request_id = 0;
    std::uint64_t draw_seed = 0;
    std::size_t input_tokens = 0;
    std::size_t output_valid = 0;
    bool success = false;  // output_valid >= 1
    DiscardCounts discarded;
    std::size_t group_mismatches = 0;
    std::size_t raw_lines = 0;
    std::size_t attempt_count = 0;
    std::int64_t latency_ms = 0;
    std::map<std::string, std::size_t> valid_by_class;
    std::string error;  // backend failure, empty on success
};

struct GenerationLog {
    std::string estimator = "heuristic";
    std::vector<InferenceRecord> inferences;
    std::map<std::string, std::size_t> accumulated;  // all valid rows per class
    std::map<std::string, std::size_t> kept;         // after truncation to target
};

struct EfficiencyReport {
    std::size_t inferences = 0;
    double mean_input_tokens = 0;
    double mean_output_samples = 0;  // over all inferences, failures count as 0
    double success_rate = 0;
    std::string estimator;
};

struct RunOptions {
    // Used when the variant is mapped; built from the training table otherwise.
    std::optional<Codebook> codebook;
    TokenEstimator estimator;
};

struct RunResult {
    Table synthetic;
    GenerationLog log;
    std::optional<Codebook> codebook;
    bool budget_exhausted = false;
    std::size_t budget = 0;
};

// Seed of the sample draw for inference `index`.
std::uint64_t draw_seed(const GenerationTarget& target, std::uint64_t index) noexcept;

// 50 times the inferences a perfect backend would need.
std::size_t default_max_inferences(const Table& train, const SamplePlan& plan, const GenerationTarget& target);

void validate_run(const Table& train, const SamplePlan& plan, const PromptVariant& variant,
                  const GenerationTarget& target);

// Generate, parse and accumulate until every per-class target is met or the
// budget runs out. Results are committed in request-id order, so the output
// does not depend on backend concurrency or arrival order.
RunResult run(const Table& train, const SamplePlan& plan, const PromptVariant& variant, Backend& backend,
              std::size_t concurrency_limit, const GenerationTarget& target, const RunOptions& options = {});

RunResult run(const Table& train, const SamplePlan& plan, const PromptVariant& variant, const BackendConfig& config,
              const GenerationTarget& target, const RunOptions& options = {}, LogSink log = {});

EfficiencyReport report(const GenerationLog& log);

std::string to_json(const EfficiencyReport& report);
std::string to_json(const GenerationLog& log, const EfficiencyReport& report);

}  // namespace epic
