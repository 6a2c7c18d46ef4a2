#pragma once

// Shared fixtures and hand-rolled generators for the test suites.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epic/dataset.hpp"
#include "epic/decode.hpp"
#include "epic/prompt.hpp"

namespace epic::testing {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(EPIC_FIXTURE_DIR) / name; }
inline std::filesystem::path golden(const std::string& name) { return std::filesystem::path(EPIC_GOLDEN_DIR) / name; }

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Table travel() { return load_csv(fixture("travel_train.csv"), "Churn"); }
inline Table sick() { return load_csv(fixture("sick_train.csv"), "Class"); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("epic_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Random categorical token over a small alphabet; may contain spaces but
// never commas, quotes or newlines.
inline std::string random_token(std::mt19937_64& rng, std::size_t max_len = 6) {
    static constexpr std::string_view chars = "abcdefghijklmnopqrstuvwxyzXYZ_- ";
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
    std::string s;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) s += chars[pick(rng)];
    if (s.front() == ' ') s.front() = 'q';
    if (s.back() == ' ') s.back() = 'z';
    return s;
}

struct TableSpec {
    std::size_t columns_min = 2, columns_max = 6;
    std::size_t classes_min = 2, classes_max = 4;
    std::size_t rows_min = 4, rows_max = 40;
    std::size_t levels_max = 6;
    bool allow_missing = true;
};

// Random table with a categorical target "y" and a mix of numerical and
// categorical feature columns. Every class has at least one row.
inline Table random_table(std::mt19937_64& rng, const TableSpec& spec = {}) {
    auto uni = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    const std::size_t n_cols = uni(spec.columns_min, spec.columns_max);
    const std::size_t n_classes = uni(spec.classes_min, spec.classes_max);
    const std::size_t n_rows = std::max(uni(spec.rows_min, spec.rows_max), n_classes);

    std::vector<Column> cols;
    std::vector<std::vector<std::string>> levels;
    for (std::size_t c = 0; c < n_cols; ++c) {
        const bool numeric = uni(0, 1) == 0;
        cols.push_back({"c" + std::to_string(c), numeric ? ColumnKind::Numerical : ColumnKind::Categorical});
        std::vector<std::string> lv;
        if (!numeric) {
            const std::size_t k = uni(1, spec.levels_max);
            while (lv.size() < k) {
                auto tok = random_token(rng);
                if (is_missing(tok) || parse_number(tok)) continue;
                if (std::find(lv.begin(), lv.end(), tok) == lv.end()) lv.push_back(tok);
            }
        }
        levels.push_back(std::move(lv));
    }
    std::vector<std::string> classes;
    for (std::size_t k = 0; k < n_classes; ++k) classes.push_back("k" + std::to_string(k));
    const std::size_t target_pos = uni(0, n_cols);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(target_pos), Column{"y", ColumnKind::Categorical});

    std::normal_distribution<double> normal(0.0, 10.0);
    std::vector<Row> rows;
    for (std::size_t r = 0; r < n_rows; ++r) {
        Row row;
        std::size_t feat = 0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c == target_pos) {
                row.push_back(classes[r < n_classes ? r : uni(0, n_classes - 1)]);
                continue;
            }
            if (spec.allow_missing && uni(0, 19) == 0) {
                row.push_back("?");
            } else if (cols[c].kind == ColumnKind::Numerical) {
                const double v = normal(rng);
                row.push_back(uni(0, 2) == 0 ? std::to_string(static_cast<long>(v)) : format_number(v));
            } else {
                const auto& lv = levels[feat];
                row.push_back(lv[uni(0, lv.size() - 1)]);
            }
            ++feat;
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::string> labels = order_class_labels(rows, target_pos);
    return Table{Schema(cols, "y", labels), rows};
}

// Renders `rows` as one completion block: grouped rows go under their class
// label in class order, ungrouped rows are listed as given.
inline std::string render_block(const Table& t, const std::vector<Row>& rows, const PromptVariant& v,
                                const Codebook* cb) {
    std::string text = prompt_header(t.schema) + "\n";
    const std::size_t ti = t.schema.target_index();
    if (!v.grouped) {
        for (const auto& r : rows) text += render_row(r, t.schema, v.format, v.mapped ? cb : nullptr) + "\n";
        return text;
    }
    const auto& labels = t.schema.class_labels();
    for (std::size_t k = 0; k < labels.size(); ++k) {
        text += group_label(k) + "\n";
        for (const auto& r : rows)
            if (r[ti] == labels[k]) text += render_row(r, t.schema, v.format, v.mapped ? cb : nullptr) + "\n";
        text += "\n";
    }
    return text;
}

// Random multiset of training rows (with repeats) of size 1..max_rows.
inline std::vector<Row> random_rows(const Table& t, std::mt19937_64& rng, std::size_t max_rows = 12) {
    std::uniform_int_distribution<std::size_t> n(1, max_rows), pick(0, t.size() - 1);
    std::vector<Row> out;
    const std::size_t k = n(rng);
    for (std::size_t i = 0; i < k; ++i) out.push_back(t.rows[pick(rng)]);
    return out;
}

}  // namespace epic::testing
