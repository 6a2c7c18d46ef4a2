#include "epic/decode.hpp"

#include "epic/error.hpp"

namespace epic {

ValueDomains::ValueDomains(const Table& train) : values_(train.schema.size()) {
    for (std::size_t c = 0; c < train.schema.size(); ++c) {
        if (train.schema.column(c).kind != ColumnKind::Categorical) continue;
        for (const auto& row : train.rows) values_[c].insert(row[c]);
    }
}

bool ValueDomains::contains(std::size_t column, std::string_view value) const {
    if (column >= values_.size()) return false;
    return values_[column].contains(std::string(value));
}

DiscardCounts& DiscardCounts::operator+=(const DiscardCounts& o) noexcept {
    field_count += o.field_count;
    numeric_parse += o.numeric_parse;
    unknown_category += o.unknown_category;
    unknown_code += o.unknown_code;
    return *this;
}

std::vector<std::string> header_names(const Schema& schema) {
    std::vector<std::string> names;
    for (auto c : schema.prompt_order()) names.push_back(schema.column(c).name);
    return names;
}

namespace {

std::optional<std::vector<std::string>> split_csv(std::string_view line, std::size_t expected) {
    std::vector<std::string> fields;
    fields.reserve(expected);
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        if (fields.size() > expected) return std::nullopt;
        start = comma + 1;
    }
    if (fields.size() != expected) return std::nullopt;
    return fields;
}

// "<name> is <value>, " repeated in header order.
std::optional<std::vector<std::string>> split_sentence(std::string_view line, const std::vector<std::string>& names) {
    if (names.empty()) return std::nullopt;
    std::vector<std::string> fields;
    fields.reserve(names.size());
    std::string prefix = names[0] + " is ";
    if (!line.starts_with(prefix)) return std::nullopt;
    std::size_t pos = prefix.size();
    for (std::size_t k = 0; k + 1 < names.size(); ++k) {
        const std::string delim = ", " + names[k + 1] + " is ";
        const auto at = line.find(delim, pos);
        if (at == std::string_view::npos) return std::nullopt;
        fields.emplace_back(line.substr(pos, at - pos));
        pos = at + delim.size();
    }
    std::string_view last = line.substr(pos);
    while (!last.empty() && last.back() == ' ') last.remove_suffix(1);
    if (!last.empty() && last.back() == ',') last.remove_suffix(1);
    if (last.find(", ") != std::string_view::npos) return std::nullopt;
    fields.emplace_back(last);
    return fields;
}

bool is_group_label(std::string_view line) noexcept {
    return line.size() == 2 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.';
}

bool is_blank(std::string_view line) noexcept {
    return line.find_first_not_of(" \t\r\f\v") == std::string_view::npos;
}

}  // namespace

std::optional<std::vector<std::string>> split_fields(std::string_view line, const std::vector<std::string>& names,
                                                     PromptFormat format) {
    return format == PromptFormat::Csv ? split_csv(line, names.size()) : split_sentence(line, names);
}

ParseOutcome parse_completion(std::string_view text, const Schema& schema, const PromptVariant& variant,
                              const Codebook* codebook, const ValueDomains& domains,
                              const std::vector<std::string>* group_classes) {
    ParseOutcome out;
    const auto order = schema.prompt_order();
    const auto names = header_names(schema);
    const std::string header = prompt_header(schema);
    const auto& classes = group_classes ? *group_classes : schema.class_labels();
    const Codebook* cb = variant.mapped ? codebook : nullptr;
    const bool mapped_without_book = variant.mapped && codebook == nullptr;
    std::optional<std::size_t> group;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (is_blank(line)) continue;
        if (line == header) {
            group.reset();
            continue;
        }
        if (is_group_label(line)) {
            group = static_cast<std::size_t>(line[0] - 'A');
            continue;
        }

        ++out.raw_line_count;
        auto fields = split_fields(line, names, variant.format);
        if (!fields) {
            ++out.discarded.field_count;
            continue;
        }

        Row row(schema.size());
        bool ok = true;
        for (std::size_t k = 0; k < order.size() && ok; ++k) {
            const std::size_t c = order[k];
            std::string& cell = (*fields)[k];
            const auto& col = schema.column(c);
            if (col.kind == ColumnKind::Numerical) {
                if (!is_missing(cell) && !parse_number(cell)) {
                    ++out.discarded.numeric_parse;
                    ok = false;
                }
            } else {
                if (cb != nullptr || mapped_without_book) {
                    const std::string* original = cb ? try_decode_value(col.name, cell, *cb) : nullptr;
                    if (original == nullptr) {
                        ++out.discarded.unknown_code;
                        ok = false;
                        break;
                    }
                    cell = *original;
                }
                if (!domains.contains(c, cell)) {
                    ++out.discarded.unknown_category;
                    ok = false;
                }
            }
            if (ok) row[c] = std::move(cell);
        }
        if (!ok) continue;

        const std::string& label = row[schema.target_index()];
        if (variant.grouped && group && *group < classes.size() && classes[*group] != label) ++out.group_mismatches;
        out.valid_rows.emplace_back(label, std::move(row));
    }
    return out;
}

}  // namespace epic
