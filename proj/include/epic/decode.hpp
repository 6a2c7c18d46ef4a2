#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "epic/dataset.hpp"
#include "epic/mapper.hpp"
#include "epic/prompt.hpp"

namespace epic {

// Original categorical values seen per column in the training table.
class ValueDomains {
public:
    ValueDomains() = default;
    explicit ValueDomains(const Table& train);

    bool contains(std::size_t column, std::string_view value) const;
    const std::unordered_set<std::string>& values(std::size_t column) const { return values_.at(column); }

private:
    std::vector<std::unordered_set<std::string>> values_;
};

struct DiscardCounts {
    std::size_t field_count = 0;
    std::size_t numeric_parse = 0;
    std::size_t unknown_category = 0;
    std::size_t unknown_code = 0;

    std::size_t total() const noexcept { return field_count + numeric_parse + unknown_category + unknown_code; }
    DiscardCounts& operator+=(const DiscardCounts& o) noexcept;
    bool operator==(const DiscardCounts&) const = default;
};

struct ParseOutcome {
    std::vector<std::pair<std::string, Row>> valid_rows;  // (class label, row in schema order)
    DiscardCounts discarded;
    std::size_t group_mismatches = 0;
    std::size_t raw_line_count = 0;  // data-candidate lines only
};

// Splits one data line into cell text, in the order of `names`. Returns
// nullopt when the line does not yield exactly names.size() fields.
std::optional<std::vector<std::string>> split_fields(std::string_view line, const std::vector<std::string>& names,
                                                     PromptFormat format);

// Column names in prompt order.
std::vector<std::string> header_names(const Schema& schema);

// Total over arbitrary input: every problem becomes a per-line discard.
// `group_classes` maps "A.", "B.", ... onto classes; defaults to the schema's
// class order.
ParseOutcome parse_completion(std::string_view text, const Schema& schema, const PromptVariant& variant,
                              const Codebook* codebook, const ValueDomains& domains,
                              const std::vector<std::string>* group_classes = nullptr);

}  // namespace epic
