#include "epic/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "epic/error.hpp"

namespace epic {

const char* to_string(ColumnKind kind) noexcept {
    return kind == ColumnKind::Numerical ? "numerical" : "categorical";
}

ColumnKind parse_column_kind(std::string_view text) {
    if (text == "numerical" || text == "numeric" || text == "number") return ColumnKind::Numerical;
    if (text == "categorical" || text == "category") return ColumnKind::Categorical;
    throw Error(Errc::InvalidKind, "unknown column kind '" + std::string(text) + "'");
}

Schema::Schema(std::vector<Column> columns, std::string target, std::vector<std::string> class_labels)
    : columns_(std::move(columns)), target_(std::move(target)), class_labels_(std::move(class_labels)) {
    std::unordered_set<std::string> seen;
    for (const auto& c : columns_) {
        if (c.name.empty()) throw Error(Errc::InvalidArgument, "empty column name");
        if (!seen.insert(c.name).second) throw Error(Errc::InvalidArgument, "duplicate column '" + c.name + "'");
    }
    auto idx = find(target_);
    if (!idx) throw Error(Errc::MissingTarget, "target column '" + target_ + "' not in header");
    target_index_ = *idx;
    if (columns_[target_index_].kind != ColumnKind::Categorical)
        throw Error(Errc::InvalidKind, "target column '" + target_ + "' must be categorical");
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw Error(Errc::InvalidArgument, "no column named '" + std::string(name) + "'");
    return *idx;
}

std::vector<std::size_t> Schema::prompt_order() const {
    std::vector<std::size_t> order;
    order.reserve(columns_.size());
    order.push_back(target_index_);
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (i != target_index_) order.push_back(i);
    return order;
}

bool Schema::compatible_with(const Schema& other) const {
    return columns_ == other.columns_ && target_ == other.target_;
}

Schema Schema::with_class_labels(std::vector<std::string> labels) const {
    return Schema(columns_, target_, std::move(labels));
}

std::vector<std::size_t> Table::class_rows(std::string_view label) const {
    std::vector<std::size_t> out;
    const auto t = schema.target_index();
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i][t] == label) out.push_back(i);
    return out;
}

std::map<std::string, std::size_t> Table::class_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& label : schema.class_labels()) counts[label] = 0;
    const auto t = schema.target_index();
    for (const auto& r : rows) ++counts[r[t]];
    return counts;
}

bool is_missing(std::string_view cell) noexcept {
    return cell.empty() || cell == "?" || cell == "NA";
}

std::optional<double> parse_number(std::string_view cell) noexcept {
    if (is_missing(cell)) return std::nullopt;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (*first == '+') ++first;
    if (first == last) return std::nullopt;
    double value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    (void)ec;
    return std::string(buf, ptr);
}

std::string format_number(double value, int decimals) {
    if (decimals < 0) return format_number(value);
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
    (void)ec;
    std::string out(buf, ptr);
    if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
    return out;
}

namespace {

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC-4180 style reader: comma delimiter, double-quoted fields with "" escapes,
// LF or CRLF record terminators.
std::vector<CsvRecord> read_records(std::string_view text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = line;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        // A line with no characters at all is blank, not a one-field record.
        const bool blank = current.fields.empty() && field.empty() && !field_started;
        end_field();
        if (!blank) records.push_back(std::move(current));
        current = CsvRecord{};
        current.line = line;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
            case '"':
                if (!field_started && field.empty()) {
                    in_quotes = true;
                    field_started = true;
                } else {
                    field.push_back(ch);
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                field.push_back(ch);
                break;
            case '\n':
                ++line;
                end_record();
                break;
            default:
                field.push_back(ch);
                field_started = true;
        }
    }
    if (in_quotes) throw Error(Errc::RaggedRow, "line " + std::to_string(current.line) + " has an unterminated quote");
    if (!field.empty() || field_started || !current.fields.empty()) end_record();
    return records;
}

bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view s) {
    if (!needs_quotes(s)) {
        out.append(s);
        return;
    }
    out.push_back('"');
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
}

}  // namespace

std::vector<std::string> order_class_labels(const std::vector<Row>& rows, std::size_t target_index) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& r : rows) {
        auto [it, inserted] = counts.try_emplace(r[target_index], 0);
        if (inserted) labels.push_back(r[target_index]);
        ++it->second;
    }
    std::stable_sort(labels.begin(), labels.end(),
                     [&](const std::string& a, const std::string& b) { return counts[a] < counts[b]; });
    return labels;
}

Table with_rows(const Schema& schema, std::vector<Row> rows) {
    const auto t = schema.target_index();
    std::unordered_set<std::string> present;
    for (const auto& r : rows) present.insert(r[t]);

    std::vector<std::string> labels;
    std::unordered_set<std::string> kept;
    for (const auto& label : schema.class_labels()) {
        if (present.contains(label)) {
            labels.push_back(label);
            kept.insert(label);
        }
    }
    for (const auto& r : rows) {
        if (kept.insert(r[t]).second) labels.push_back(r[t]);
    }
    return Table{schema.with_class_labels(std::move(labels)), std::move(rows)};
}

Table parse_csv(std::string_view text, const std::string& target, const LoadOptions& options) {
    auto records = read_records(text);
    if (records.empty()) throw Error(Errc::EmptyFile, "no header row");

    const auto& header = records.front().fields;
    const std::size_t m = header.size();
    std::vector<Row> rows;
    rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].fields.size() != m)
            throw Error(Errc::RaggedRow, "line " + std::to_string(records[r].line) + " has " +
                                             std::to_string(records[r].fields.size()) + " fields, expected " +
                                             std::to_string(m));
        rows.push_back(std::move(records[r].fields));
    }

    auto target_it = std::find(header.begin(), header.end(), target);
    if (target_it == header.end()) throw Error(Errc::MissingTarget, "target column '" + target + "' not in header");
    const auto target_index = static_cast<std::size_t>(target_it - header.begin());

    std::vector<Column> columns;
    columns.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        Column col{header[c], ColumnKind::Categorical};
        if (auto ov = options.kinds.find(header[c]); ov != options.kinds.end()) {
            col.kind = ov->second;
        } else if (c != target_index) {
            bool any = false;
            bool numeric = true;
            for (const auto& row : rows) {
                if (is_missing(row[c])) continue;
                any = true;
                if (!parse_number(row[c])) {
                    numeric = false;
                    break;
                }
            }
            if (any && numeric) col.kind = ColumnKind::Numerical;
        }
        if (col.kind == ColumnKind::Numerical) {
            for (const auto& row : rows) {
                if (!is_missing(row[c]) && !parse_number(row[c]))
                    throw Error(Errc::InvalidKind, "column '" + col.name + "' declared numerical but holds '" +
                                                       row[c] + "'");
            }
        }
        columns.push_back(std::move(col));
    }

    std::vector<std::string> labels = options.class_labels;
    if (labels.empty()) {
        labels = order_class_labels(rows, target_index);
    } else {
        std::unordered_set<std::string> declared(labels.begin(), labels.end());
        for (const auto& row : rows)
            if (!declared.contains(row[target_index]))
                throw Error(Errc::InvalidArgument, "class value '" + row[target_index] + "' not in declared labels");
    }
    Schema schema(std::move(columns), target, std::move(labels));
    if (!options.class_labels.empty()) return with_rows(schema, std::move(rows));
    return Table{std::move(schema), std::move(rows)};
}

Table load_csv(const std::filesystem::path& path, const std::string& target, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), target, options);
}

std::string to_csv(const Table& table) {
    std::string out;
    const auto& cols = table.schema.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out.push_back(',');
        append_field(out, cols[c].name);
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out.push_back(',');
            // A single empty field would read back as a blank line.
            if (row.size() == 1 && row[c].empty()) {
                out.append("\"\"");
                continue;
            }
            append_field(out, row[c]);
        }
        out.push_back('\n');
    }
    return out;
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << to_csv(table);
    if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

namespace {

struct RowHash {
    std::size_t operator()(const Row& r) const noexcept {
        std::size_t h = r.size();
        for (const auto& cell : r) h ^= std::hash<std::string>{}(cell) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

}  // namespace

Table dedup(const Table& table) {
    std::unordered_set<Row, RowHash> seen;
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows)
        if (seen.insert(r).second) rows.push_back(r);
    return with_rows(table.schema, std::move(rows));
}

SplitPair split(const Table& table, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw Error(Errc::InvalidArgument, "split ratio must lie in (0, 1)");
    const std::size_t n = table.rows.size();
    if (n < 2) throw Error(Errc::TooFewRows, "need at least 2 rows to split, got " + std::to_string(n));

    const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<char> in_train(n, 0);
    for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;

    std::vector<Row> train_rows, test_rows;
    train_rows.reserve(n_train);
    test_rows.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train_rows : test_rows).push_back(table.rows[i]);

    return SplitPair{with_rows(table.schema, std::move(train_rows)), with_rows(table.schema, std::move(test_rows)),
                     seed};
}

Table generate_toy(std::size_t n_major, std::size_t n_minor, double noise, std::uint64_t seed,
                   const ToyShape& shape) {
    if (n_major < 1 || n_minor < 1) throw Error(Errc::InvalidArgument, "toy class counts must be >= 1");
    if (!(noise >= 0.0)) throw Error(Errc::InvalidArgument, "toy noise must be >= 0");

    static const char* const kCategories[] = {"alpha", "beta", "gamma", "delta"};
    // Category probabilities per class; the minority leans toward the tail.
    static constexpr double kMajorP[] = {0.50, 0.30, 0.15, 0.05};
    static constexpr double kMinorP[] = {0.10, 0.20, 0.30, 0.40};
    constexpr std::size_t kPairs = 5;

    std::vector<Column> columns{{"class", ColumnKind::Categorical}};
    for (std::size_t i = 1; i <= 2 * kPairs + 1; ++i) columns.push_back({"x" + std::to_string(i), ColumnKind::Numerical});
    columns.push_back({"cat", ColumnKind::Categorical});

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, shape.arc_span);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double r = shape.scale;
    auto jitter = [&] { return noise > 0.0 ? noise * gauss(rng) : 0.0; };
    auto fmt = [&](double v) { return format_number(v, shape.decimals); };

    std::vector<Row> rows;
    rows.reserve(n_major + n_minor);
    for (std::size_t i = 0; i < n_major + n_minor; ++i) {
        const bool minor = i >= n_major;
        Row row;
        row.reserve(columns.size());
        row.emplace_back(minor ? "minor" : "major");
        for (std::size_t p = 0; p < kPairs; ++p) {
            const double theta = angle(rng);
            double x = 0, y = 0;
            if (p % 2 == 0) {
                // Moons: the minority arc is the mirrored, shifted lower moon.
                x = minor ? r * (1.0 - std::cos(theta)) : r * std::cos(theta);
                y = minor ? r * (0.5 - std::sin(theta)) : r * std::sin(theta);
            } else {
                // Concentric circles, rotated a quarter turn; minority on the inner ring.
                const double radius = minor ? 0.5 * r : r;
                x = -radius * std::sin(theta);
                y = radius * std::cos(theta);
            }
            row.push_back(fmt(x + jitter()));
            row.push_back(fmt(y + jitter()));
        }
        const double* probs = minor ? kMinorP : kMajorP;
        std::discrete_distribution<std::size_t> pick(probs, probs + 4);
        const std::size_t k = pick(rng);
        const double x11 = static_cast<double>(k) + 0.8 * unit(rng);
        row.push_back(fmt(x11 + jitter()));
        row.emplace_back(kCategories[k]);
        rows.push_back(std::move(row));
    }
    std::shuffle(rows.begin(), rows.end(), rng);

    Schema schema(std::move(columns), "class", {"minor", "major"});
    return Table{std::move(schema), std::move(rows)};
}

}  // namespace epic
