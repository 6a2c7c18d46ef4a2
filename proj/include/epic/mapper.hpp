#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epic/dataset.hpp"

namespace epic {

// Unique variable mapping: every (column, categorical value) pair gets its own
// three-symbol code over [A-Z0-9]. Codes are unique across the whole table, so
// a code written under the wrong column is detectable on decode.
class Codebook {
public:
    static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    static constexpr std::size_t kCodeLength = 3;
    static constexpr std::size_t kCodeSpace = 36 * 36 * 36;

    struct Entry {
        std::string column;
        std::string value;
        std::string code;

        bool operator==(const Entry&) const = default;
    };

    Codebook() = default;
    Codebook(std::uint64_t seed, std::vector<Entry> entries);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    // Entries in assignment order.
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    std::optional<std::string_view> code_for(std::string_view column, std::string_view value) const;
    // Inverse lookup, ignoring column.
    const Entry* find_code(std::string_view code) const;

    std::string to_json() const;
    static Codebook from_json(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static Codebook load(const std::filesystem::path& path);

    bool operator==(const Codebook& other) const { return seed_ == other.seed_ && entries_ == other.entries_; }

private:
    std::uint64_t seed_ = 0;
    std::vector<Entry> entries_;
    std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> forward_;
    std::map<std::string, std::size_t, std::less<>> inverse_;
};

bool is_valid_code(std::string_view code) noexcept;

Codebook build_codebook(const Table& table, std::uint64_t seed);

Table encode(const Table& table, const Codebook& codebook);
Table decode(const Table& table, const Codebook& codebook);

// Original value for `code`, or an UnknownCode error when the code is not
// assigned or belongs to a different column.
const std::string& decode_value(std::string_view column, std::string_view code, const Codebook& codebook);
// Non-throwing variant used on the parse hot path.
const std::string* try_decode_value(std::string_view column, std::string_view code, const Codebook& codebook) noexcept;

}  // namespace epic
