#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epic/dataset.hpp"

namespace epic {

enum class ClassMode { MultiClass, SingleClass };
enum class Balance { Balanced, OriginalRatio };

struct SamplePlan {
    ClassMode class_mode = ClassMode::MultiClass;
    std::string single_label;  // used when class_mode == SingleClass
    Balance balance = Balance::Balanced;
    std::size_t per_group = 3;  // n
    std::size_t sets = 3;       // t
    std::uint64_t seed = 0;
};

struct GroupDraw {
    std::string label;
    std::vector<std::size_t> source_rows;  // indices into the training table
    std::vector<Row> rows;
};

struct SetDraw {
    std::vector<GroupDraw> groups;  // in class order
    // (group index, row index within group) in the order rows were drawn;
    // used when a prompt lists samples without grouping.
    std::vector<std::pair<std::size_t, std::size_t>> listing;
};

struct SampledPrompt {
    std::vector<SetDraw> sets;

    std::size_t example_count() const noexcept;
};

// Per-set group sizes under OriginalRatio: largest-remainder apportionment of
// n*c rows over the class frequencies. Ties go to the earlier class.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& class_counts, std::size_t total);

// Class labels drawn for a plan, in group order.
std::vector<std::string> plan_labels(const Table& train, const SamplePlan& plan);

// Rows per group in one set, aligned with plan_labels().
std::vector<std::size_t> group_sizes(const Table& train, const SamplePlan& plan);

SampledPrompt draw(const Table& train, const SamplePlan& plan);

}  // namespace epic
