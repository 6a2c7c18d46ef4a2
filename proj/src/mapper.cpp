#include "epic/mapper.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "epic/error.hpp"

namespace epic {

Codebook::Codebook(std::uint64_t seed, std::vector<Entry> entries) : seed_(seed), entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!is_valid_code(e.code)) throw Error(Errc::InvalidArgument, "malformed code '" + e.code + "'");
        if (!forward_.emplace(std::make_pair(e.column, e.value), i).second)
            throw Error(Errc::InvalidArgument, "duplicate mapping for " + e.column + "=" + e.value);
        if (!inverse_.emplace(e.code, i).second)
            throw Error(Errc::InvalidArgument, "code '" + e.code + "' assigned twice");
    }
}

std::optional<std::string_view> Codebook::code_for(std::string_view column, std::string_view value) const {
    auto it = forward_.find(std::make_pair(std::string(column), std::string(value)));
    if (it == forward_.end()) return std::nullopt;
    return entries_[it->second].code;
}

const Codebook::Entry* Codebook::find_code(std::string_view code) const {
    auto it = inverse_.find(code);
    return it == inverse_.end() ? nullptr : &entries_[it->second];
}

std::string Codebook::to_json() const {
    nlohmann::ordered_json doc;
    doc["seed"] = seed_;
    doc["alphabet"] = kAlphabet;
    doc["code_length"] = kCodeLength;
    auto& arr = doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& e : entries_) arr.push_back({{"column", e.column}, {"value", e.value}, {"code", e.code}});
    return doc.dump(2) + "\n";
}

Codebook Codebook::from_json(std::string_view text) {
    try {
        auto doc = nlohmann::json::parse(text);
        std::vector<Entry> entries;
        for (const auto& e : doc.at("entries"))
            entries.push_back({e.at("column").get<std::string>(), e.at("value").get<std::string>(),
                               e.at("code").get<std::string>()});
        return Codebook(doc.at("seed").get<std::uint64_t>(), std::move(entries));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::Config, std::string("bad codebook document: ") + ex.what());
    }
}

void Codebook::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << to_json();
}

Codebook Codebook::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

bool is_valid_code(std::string_view code) noexcept {
    if (code.size() != Codebook::kCodeLength) return false;
    for (char ch : code)
        if (!((ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9'))) return false;
    return true;
}

namespace {

std::string code_from_index(std::size_t index) {
    std::string code(Codebook::kCodeLength, ' ');
    for (std::size_t i = Codebook::kCodeLength; i-- > 0;) {
        code[i] = Codebook::kAlphabet[index % Codebook::kAlphabet.size()];
        index /= Codebook::kAlphabet.size();
    }
    return code;
}

}  // namespace

Codebook build_codebook(const Table& table, std::uint64_t seed) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t c = 0; c < table.schema.size(); ++c) {
        const auto& col = table.schema.column(c);
        if (col.kind != ColumnKind::Categorical) continue;
        std::unordered_map<std::string_view, bool> seen;
        // Declared class labels come first so their codes do not depend on row order.
        if (c == table.schema.target_index())
            for (const auto& label : table.schema.class_labels())
                if (seen.emplace(label, true).second) pairs.emplace_back(col.name, label);
        for (const auto& row : table.rows)
            if (seen.emplace(row[c], true).second) pairs.emplace_back(col.name, row[c]);
    }
    if (pairs.size() > Codebook::kCodeSpace)
        throw Error(Errc::CodeSpaceExhausted, std::to_string(pairs.size()) + " categorical values exceed " +
                                                  std::to_string(Codebook::kCodeSpace) + " codes");

    // Partial Fisher-Yates over the code space, tracking only displaced slots.
    std::mt19937_64 rng(seed);
    std::unordered_map<std::size_t, std::size_t> displaced;
    auto slot = [&](std::size_t i) {
        auto it = displaced.find(i);
        return it == displaced.end() ? i : it->second;
    };
    std::vector<Codebook::Entry> entries;
    entries.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, Codebook::kCodeSpace - 1);
        const std::size_t j = pick(rng);
        const std::size_t chosen = slot(j);
        displaced[j] = slot(i);
        entries.push_back({std::move(pairs[i].first), std::move(pairs[i].second), code_from_index(chosen)});
    }
    return Codebook(seed, std::move(entries));
}

namespace {

template <typename Fn>
Table map_categorical(const Table& table, Fn&& map_cell) {
    const auto& schema = table.schema;
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Row out = row;
        for (std::size_t c = 0; c < schema.size(); ++c)
            if (schema.column(c).kind == ColumnKind::Categorical) out[c] = map_cell(schema.column(c).name, row[c]);
        rows.push_back(std::move(out));
    }
    std::vector<std::string> labels;
    labels.reserve(schema.class_labels().size());
    for (const auto& label : schema.class_labels()) labels.push_back(map_cell(schema.target(), label));
    return Table{schema.with_class_labels(std::move(labels)), std::move(rows)};
}

}  // namespace

Table encode(const Table& table, const Codebook& codebook) {
    return map_categorical(table, [&](const std::string& column, const std::string& value) {
        auto code = codebook.code_for(column, value);
        if (!code) throw Error(Errc::UnknownValue, "no code for " + column + "='" + value + "'");
        return std::string(*code);
    });
}

Table decode(const Table& table, const Codebook& codebook) {
    return map_categorical(table, [&](const std::string& column, const std::string& code) {
        return decode_value(column, code, codebook);
    });
}

const std::string* try_decode_value(std::string_view column, std::string_view code, const Codebook& codebook) noexcept {
    const auto* entry = codebook.find_code(code);
    if (entry == nullptr || entry->column != column) return nullptr;
    return &entry->value;
}

const std::string& decode_value(std::string_view column, std::string_view code, const Codebook& codebook) {
    if (const auto* value = try_decode_value(column, code, codebook)) return *value;
    throw Error(Errc::UnknownCode, "code '" + std::string(code) + "' is not assigned in column '" + std::string(column) + "'");
}

}  // namespace epic
