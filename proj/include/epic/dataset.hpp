#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epic {

enum class ColumnKind { Categorical, Numerical };

const char* to_string(ColumnKind kind) noexcept;
ColumnKind parse_column_kind(std::string_view text);

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;

    bool operator==(const Column&) const = default;
};

// Cells are kept as text. Numerical cells hold a decimal literal or a missing
// marker; categorical cells are arbitrary text, missing markers included.
using Row = std::vector<std::string>;

class Schema {
public:
    Schema() = default;
    Schema(std::vector<Column> columns, std::string target, std::vector<std::string> class_labels);

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::string& target() const noexcept { return target_; }
    const std::vector<std::string>& class_labels() const noexcept { return class_labels_; }

    std::size_t size() const noexcept { return columns_.size(); }
    std::size_t target_index() const noexcept { return target_index_; }
    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;
    const Column& column(std::size_t i) const { return columns_.at(i); }

    // Column order used inside prompts: target first, then the rest in schema order.
    std::vector<std::size_t> prompt_order() const;

    // Same columns (names and kinds) and target; class label lists may differ.
    bool compatible_with(const Schema& other) const;

    Schema with_class_labels(std::vector<std::string> labels) const;

    bool operator==(const Schema&) const = default;

private:
    std::vector<Column> columns_;
    std::string target_;
    std::vector<std::string> class_labels_;
    std::size_t target_index_ = 0;
};

struct Table {
    Schema schema;
    std::vector<Row> rows;

    std::size_t size() const noexcept { return rows.size(); }
    bool empty() const noexcept { return rows.empty(); }

    // Rows whose target equals `label`, as indices into `rows`.
    std::vector<std::size_t> class_rows(std::string_view label) const;
    std::map<std::string, std::size_t> class_counts() const;

    bool operator==(const Table&) const = default;
};

struct SplitPair {
    Table train;
    Table test;
    std::uint64_t seed = 0;
};

bool is_missing(std::string_view cell) noexcept;

// Parses a whole-cell decimal literal. Returns nullopt for missing markers,
// partial parses and non-finite values.
std::optional<double> parse_number(std::string_view cell) noexcept;

// Shortest text that round-trips to the same double.
std::string format_number(double value);
// Fixed-point text with the given number of decimals.
std::string format_number(double value, int decimals);

struct LoadOptions {
    std::map<std::string, ColumnKind> kinds;
    // Explicit class order; defaults to ascending frequency (minority first),
    // ties broken by first appearance.
    std::vector<std::string> class_labels;
};

Table load_csv(const std::filesystem::path& path, const std::string& target, const LoadOptions& options = {});
Table parse_csv(std::string_view text, const std::string& target, const LoadOptions& options = {});

std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::filesystem::path& path);

// Default class order for a set of rows: ascending count, ties by first appearance.
std::vector<std::string> order_class_labels(const std::vector<Row>& rows, std::size_t target_index);

// Rebuilds class_labels so they name exactly the labels present in `rows`,
// keeping the existing order and appending unseen labels by first appearance.
Table with_rows(const Schema& schema, std::vector<Row> rows);

Table dedup(const Table& table);

SplitPair split(const Table& table, double ratio, std::uint64_t seed);

struct ToyShape {
    double scale = 2.0;                // radius of the outer arcs
    double arc_span = 1.5707963267948966;  // latent angle range [0, arc_span)
    int decimals = -1;                 // -1 writes shortest round-trip text
};

// Imbalanced two-class toy table: five numerical pairs built on moon and
// circle arcs, one numerical/categorical pair, and a "class" target.
Table generate_toy(std::size_t n_major, std::size_t n_minor, double noise, std::uint64_t seed,
                   const ToyShape& shape = {});

}  // namespace epic
