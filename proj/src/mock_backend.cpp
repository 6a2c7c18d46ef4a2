#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "epic/backend.hpp"
#include "epic/decode.hpp"
#include "epic/seed.hpp"

namespace epic {

namespace {

struct ExampleGroup {
    std::string key;  // label line ("A.") or, when ungrouped, the class cell
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

std::vector<std::string> split_header(std::string_view header) {
    std::vector<std::string> names;
    std::size_t start = 0;
    while (true) {
        auto comma = header.find(',', start);
        names.emplace_back(header.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return names;
}

// Example groups of the prompt in first-appearance order, read with the same
// line grammar the completion parser uses.
std::vector<ExampleGroup> read_examples(const AssembledPrompt& prompt, const std::vector<std::string>& names) {
    std::vector<ExampleGroup> groups;
    std::map<std::string, std::size_t, std::less<>> index;
    std::string current;
    bool in_sets = false;
    for (auto line : lines_of(prompt.text)) {
        if (line == prompt.header) {
            in_sets = true;
            current.clear();
            continue;
        }
        if (!in_sets || line.empty()) continue;
        if (line.size() == 2 && line[0] >= 'A' && line[0] <= 'Z' && line[1] == '.') {
            current = std::string(line);
            continue;
        }
        auto fields = split_fields(line, names, prompt.format);
        if (!fields) continue;
        std::string key = prompt.grouped ? current : fields->front();
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) groups.push_back({key, {}});
        groups[it->second].rows.push_back(std::move(*fields));
    }
    return groups;
}

int decimals_of(std::string_view cell) {
    if (cell.find_first_of("eE") != std::string_view::npos) return -1;
    auto dot = cell.find('.');
    return dot == std::string_view::npos ? 0 : static_cast<int>(cell.size() - dot - 1);
}

double column_std(const std::vector<std::vector<std::string>>& rows, std::size_t col) {
    std::vector<double> xs;
    for (const auto& r : rows)
        if (auto v = parse_number(r[col])) xs.push_back(*v);
    if (xs.size() < 2) return 0.0;
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::string render(const std::vector<std::string>& cells, const std::vector<std::string>& names, PromptFormat format) {
    std::string line;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (format == PromptFormat::Csv) {
            if (k) line.push_back(',');
            line += cells[k];
        } else {
            line += names[k] + " is " + cells[k] + ", ";
        }
    }
    return line;
}

}  // namespace

std::string mock_completion(const AssembledPrompt& prompt, const MockConfig& config, std::uint64_t request_id) {
    std::mt19937_64 rng(derive_seed(config.seed, request_id));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const bool scripted_failure =
        std::find(config.fail_on.begin(), config.fail_on.end(), request_id) != config.fail_on.end();
    if (scripted_failure || unit(rng) < config.failure_rate)
        return "I am unable to continue this sequence.\nPlease provide more context.\n";

    const auto names = split_header(prompt.header);
    auto numeric = prompt.numeric_columns;
    const auto groups = read_examples(prompt, names);
    if (numeric.size() != names.size()) {
        // No schema hint: a column is numeric when every example cell parses.
        numeric.assign(names.size(), true);
        for (std::size_t k = 0; k < names.size(); ++k) {
            bool any = false;
            for (const auto& g : groups)
                for (const auto& r : g.rows) {
                    if (is_missing(r[k])) continue;
                    any = true;
                    if (!parse_number(r[k])) numeric[k] = false;
                }
            if (!any) numeric[k] = false;
        }
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::string out;
    for (const auto& group : groups) {
        if (prompt.grouped) out += group.key + "\n";
        std::vector<double> stds(names.size(), 0.0);
        for (std::size_t k = 0; k < names.size(); ++k)
            if (numeric[k]) stds[k] = column_std(group.rows, k);

        std::uniform_int_distribution<std::size_t> pick(0, group.rows.size() - 1);
        for (std::size_t i = 0; i < config.rows_per_group; ++i) {
            auto cells = group.rows[pick(rng)];
            if (config.numeric_jitter > 0.0) {
                // Column 0 is the class; it stays fixed within a group.
                for (std::size_t k = 1; k < cells.size(); ++k) {
                    if (numeric[k]) {
                        auto v = parse_number(cells[k]);
                        if (!v) continue;
                        const double moved = *v + config.numeric_jitter * stds[k] * gauss(rng);
                        cells[k] = format_number(moved, decimals_of(cells[k]));
                    } else if (unit(rng) < config.numeric_jitter) {
                        cells[k] = group.rows[pick(rng)][k];
                    }
                }
            }
            out += render(cells, names, prompt.format);
            out += '\n';
        }
        out += '\n';
    }
    out += '\n';
    return out;
}

CompletionResult MockBackend::complete(const AssembledPrompt& prompt, std::uint64_t request_id) {
    return CompletionResult{mock_completion(prompt, config_, request_id), std::chrono::milliseconds{0}, 1};
}

}  // namespace epic
