#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epic/dataset.hpp"

namespace epic {

// nullopt marks an Undefined entry (a degenerate column).
using Correlation = std::optional<double>;

struct CorrelationMatrix {
    std::vector<std::string> labels;
    std::vector<Correlation> values;  // row-major, labels.size() squared

    std::size_t size() const noexcept { return labels.size(); }
    const Correlation& at(std::size_t i, std::size_t j) const { return values.at(i * labels.size() + j); }
    Correlation& at(std::size_t i, std::size_t j) { return values.at(i * labels.size() + j); }
};

// Sample Pearson r over pairwise-complete observations. Undefined when fewer
// than two pairs remain or either side has zero variance.
Correlation pearson(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y);
Correlation pearson(std::span<const double> x, std::span<const double> y);

// Uncorrected Cramer's V from the r x c contingency table. Undefined when
// either column has a single category.
Correlation cramers_v(std::span<const std::string> a, std::span<const std::string> b);

CorrelationMatrix pearson_matrix(const Table& table, std::span<const std::size_t> rows);
CorrelationMatrix cramers_matrix(const Table& table, std::span<const std::size_t> rows);

// synth - real entrywise; Undefined wherever either side is.
CorrelationMatrix difference(const CorrelationMatrix& synth, const CorrelationMatrix& real);

struct ClassFidelity {
    std::string label;
    std::size_t real_rows = 0;
    std::size_t synth_rows = 0;
    CorrelationMatrix pearson_real, pearson_synth, pearson_diff;
    CorrelationMatrix cramers_real, cramers_synth, cramers_diff;
};

struct ClassShare {
    std::string label;
    std::size_t real_count = 0;
    std::size_t synth_count = 0;
    double real_frequency = 0;
    double synth_frequency = 0;
};

struct NumericSummary {
    std::optional<double> min, max, mean, std;
};

struct ColumnSummary {
    std::string column;
    NumericSummary real, synth;
};

struct FidelityReport {
    std::vector<ClassFidelity> per_class;
    std::vector<ClassShare> class_distribution;
    std::vector<ColumnSummary> numeric_summaries;
};

NumericSummary summarize(std::span<const std::optional<double>> values);

// Per-class matrices exclude the target column, which is constant within a class.
FidelityReport build_report(const Table& real, const Table& synth);

std::string to_json(const FidelityReport& report);
// Flat "row,column,value" export; Undefined entries are written as empty cells.
std::string to_csv(const CorrelationMatrix& matrix);

}  // namespace epic
