#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epic/dataset.hpp"
#include "epic/mapper.hpp"
#include "epic/sampler.hpp"

namespace epic {

enum class PromptFormat { Csv, Sentence };

const char* to_string(PromptFormat format) noexcept;
PromptFormat parse_prompt_format(std::string_view text);

using Descriptions = std::vector<std::pair<std::string, std::string>>;

struct PromptVariant {
    PromptFormat format = PromptFormat::Csv;
    bool grouped = true;
    bool mapped = false;
    Descriptions descriptions;
    bool class_first = true;
};

// Counts prompt tokens. The heuristic splits whitespace-delimited runs at
// ASCII punctuation: every punctuation character is one token and each
// maximal run of other characters is one token. A plugin wraps any external
// tokenizer; reports carry name() so numbers are never compared across
// estimators.
class TokenEstimator {
public:
    using Adapter = std::function<std::size_t(std::string_view)>;

    TokenEstimator() = default;
    static TokenEstimator heuristic() { return {}; }
    static TokenEstimator plugin(std::string name, Adapter adapter);
    // Runs `command` with the prompt on stdin and reads an integer from stdout.
    static TokenEstimator command(std::string command);

    std::size_t count(std::string_view text) const;
    const std::string& name() const noexcept { return name_; }
    bool is_plugin() const noexcept { return static_cast<bool>(adapter_); }

private:
    std::string name_ = "heuristic";
    Adapter adapter_;
};

std::size_t heuristic_token_count(std::string_view text) noexcept;
std::size_t estimate_tokens(std::string_view text, const TokenEstimator& estimator = {});

struct AssembledPrompt {
    std::string text;
    std::string header;
    std::vector<std::string> group_labels;  // one entry per label line, in prompt order
    std::size_t example_count = 0;
    std::size_t token_estimate = 0;
    PromptFormat format = PromptFormat::Csv;
    bool grouped = true;
    std::vector<bool> numeric_columns;  // per header column
};

// "A.", "B.", ... for group index 0, 1, ...; at most 26 groups.
std::string group_label(std::size_t index);

std::string prompt_header(const Schema& schema);

// One example line without its terminator. Cells are taken in prompt order
// (target first); categorical cells are encoded when a codebook is given.
std::string render_row(const Row& row, const Schema& schema, PromptFormat format, const Codebook* codebook = nullptr);

AssembledPrompt assemble(const SampledPrompt& draw, const Schema& schema, const PromptVariant& variant,
                         const Codebook* codebook = nullptr, const TokenEstimator& estimator = {});

// "name: description" per line; blank lines ignored.
Descriptions parse_descriptions(std::string_view text);
Descriptions load_descriptions(const std::filesystem::path& path);

}  // namespace epic
