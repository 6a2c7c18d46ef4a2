#include "epic/prompt.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "epic/error.hpp"

namespace epic {

const char* to_string(PromptFormat format) noexcept {
    return format == PromptFormat::Sentence ? "sentence" : "csv";
}

PromptFormat parse_prompt_format(std::string_view text) {
    if (text == "csv") return PromptFormat::Csv;
    if (text == "sentence") return PromptFormat::Sentence;
    throw Error(Errc::Config, "unknown prompt format '" + std::string(text) + "'");
}

namespace {

bool is_space(unsigned char ch) noexcept {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\v' || ch == '\f';
}

bool is_punct(unsigned char ch) noexcept {
    return (ch >= 0x21 && ch <= 0x2f) || (ch >= 0x3a && ch <= 0x40) || (ch >= 0x5b && ch <= 0x60) ||
           (ch >= 0x7b && ch <= 0x7e);
}

}  // namespace

std::size_t heuristic_token_count(std::string_view text) noexcept {
    std::size_t tokens = 0;
    bool in_word = false;
    for (unsigned char ch : text) {
        if (is_space(ch)) {
            in_word = false;
        } else if (is_punct(ch)) {
            ++tokens;
            in_word = false;
        } else if (!in_word) {
            ++tokens;
            in_word = true;
        }
    }
    return tokens;
}

TokenEstimator TokenEstimator::plugin(std::string name, Adapter adapter) {
    TokenEstimator e;
    e.name_ = "plugin:" + std::move(name);
    e.adapter_ = std::move(adapter);
    return e;
}

TokenEstimator TokenEstimator::command(std::string command) {
    auto run = [command](std::string_view text) -> std::size_t {
        char path[] = "/tmp/epic-prompt-XXXXXX";
        const int fd = ::mkstemp(path);
        if (fd < 0) throw Error(Errc::Io, "cannot create temporary prompt file");
        ::close(fd);
        {
            std::ofstream out(path, std::ios::binary);
            out << text;
        }
        const std::string cmd = command + " < '" + path + "'";
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (pipe == nullptr) {
            std::remove(path);
            throw Error(Errc::Io, "cannot run tokenizer command");
        }
        unsigned long long count = 0;
        const int matched = std::fscanf(pipe, "%llu", &count);
        const int status = ::pclose(pipe);
        std::remove(path);
        if (matched != 1 || status != 0) throw Error(Errc::Io, "tokenizer command failed: " + command);
        return static_cast<std::size_t>(count);
    };
    return plugin(command, std::move(run));
}

std::size_t TokenEstimator::count(std::string_view text) const {
    return adapter_ ? adapter_(text) : heuristic_token_count(text);
}

std::size_t estimate_tokens(std::string_view text, const TokenEstimator& estimator) { return estimator.count(text); }

std::string group_label(std::size_t index) {
    if (index >= 26) throw Error(Errc::InvalidArgument, "more than 26 class groups cannot be labelled");
    return std::string(1, static_cast<char>('A' + index)) + ".";
}

std::string prompt_header(const Schema& schema) {
    std::string header;
    for (auto c : schema.prompt_order()) {
        if (!header.empty()) header.push_back(',');
        header += schema.column(c).name;
    }
    return header;
}

std::string render_row(const Row& row, const Schema& schema, PromptFormat format, const Codebook* codebook) {
    std::string line;
    bool first = true;
    for (auto c : schema.prompt_order()) {
        const auto& col = schema.column(c);
        std::string_view value = row[c];
        if (codebook != nullptr && col.kind == ColumnKind::Categorical) {
            auto code = codebook->code_for(col.name, value);
            if (!code) throw Error(Errc::UnknownValue, "no code for " + col.name + "='" + std::string(value) + "'");
            value = *code;
        }
        if (format == PromptFormat::Csv) {
            if (!first) line.push_back(',');
            line += value;
        } else {
            line += col.name;
            line += " is ";
            line += value;
            line += ", ";
        }
        first = false;
    }
    return line;
}

AssembledPrompt assemble(const SampledPrompt& draw, const Schema& schema, const PromptVariant& variant,
                         const Codebook* codebook, const TokenEstimator& estimator) {
    if (variant.mapped && codebook == nullptr) throw Error(Errc::MissingCodebook, "mapped prompt needs a codebook");
    if (draw.sets.empty() || draw.example_count() == 0) throw Error(Errc::EmptyDraw, "no examples to embed");
    const Codebook* cb = variant.mapped ? codebook : nullptr;

    AssembledPrompt out;
    out.header = prompt_header(schema);
    out.format = variant.format;
    out.grouped = variant.grouped;
    for (auto c : schema.prompt_order()) out.numeric_columns.push_back(schema.column(c).kind == ColumnKind::Numerical);
    std::string& text = out.text;

    if (!variant.descriptions.empty()) {
        for (const auto& [name, description] : variant.descriptions) {
            text += name;
            text += ": ";
            text += description;
            text += '\n';
        }
        text += '\n';
    }

    auto emit_row = [&](const Row& row) {
        text += render_row(row, schema, variant.format, cb);
        text += '\n';
        ++out.example_count;
    };

    for (const auto& set : draw.sets) {
        text += out.header;
        text += '\n';
        if (variant.grouped) {
            for (std::size_t g = 0; g < set.groups.size(); ++g) {
                out.group_labels.push_back(group_label(g));
                text += out.group_labels.back();
                text += '\n';
                for (const auto& row : set.groups[g].rows) emit_row(row);
                text += '\n';
            }
        } else {
            for (const auto& [g, i] : set.listing) emit_row(set.groups[g].rows[i]);
            text += '\n';
        }
        text += '\n';
    }
    text += out.header;
    text += '\n';

    out.token_estimate = estimator.count(text);
    return out;
}

Descriptions parse_descriptions(std::string_view text) {
    Descriptions out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos || colon == 0)
            throw Error(Errc::Config, "description line " + std::to_string(lineno) + " lacks 'name: text'");
        std::string name = line.substr(0, colon);
        std::size_t start = colon + 1;
        while (start < line.size() && line[start] == ' ') ++start;
        out.emplace_back(std::move(name), line.substr(start));
    }
    return out;
}

Descriptions load_descriptions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_descriptions(buf.str());
}

}  // namespace epic
