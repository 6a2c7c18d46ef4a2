#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "epic/error.hpp"
#include "epic/prompt.hpp"
#include "support.hpp"

using namespace epic;
using epic::testing::golden;
using epic::testing::slurp;

namespace {

AssembledPrompt travel_prompt(const PromptVariant& v, std::uint64_t seed = 9) {
    const Table t = epic::testing::travel();
    SamplePlan p;
    p.per_group = 3;
    p.sets = 3;
    p.seed = seed;
    return assemble(draw(t, p), t.schema, v);
}

PromptVariant travel_variant() {
    PromptVariant v;
    v.descriptions = load_descriptions(epic::testing::fixture("travel_descriptions.txt"));
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

// Token oracle: one regex, one match per token.
std::size_t regex_tokens(const std::string& text) {
    static const std::regex token("[[:punct:]]|[^[:space:][:punct:]]+");
    return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), token),
                                                  std::sregex_iterator()));
}

}  // namespace

TEST(Assemble, TravelGoldenBytes) {
    const auto a = travel_prompt(travel_variant());
    EXPECT_EQ(a.text, slurp(golden("travel_prompt.txt")));
}

TEST(Assemble, TravelSkeleton) {
    const auto a = travel_prompt(travel_variant());
    const std::string header =
        "Churn,Age,FrequentFlyer,AnnualIncomeClass,ServicesOpted,AccountSyncedToSocialMedia,BookedHotelOrNot";
    EXPECT_EQ(a.header, header);
    EXPECT_EQ(a.example_count, 18u);
    const auto lines = lines_of(a.text);

    // Descriptions block: 7 lines then one blank.
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NE(lines[i].find(": "), std::string::npos) << lines[i];
    EXPECT_TRUE(lines[7].empty());

    // Walk the skeleton: per set, header, A., 3 rows, blank, B., 3 rows, blank, blank.
    std::size_t i = 8, data_rows = 0;
    for (int set = 0; set < 3; ++set) {
        ASSERT_EQ(lines[i++], header);
        for (const char* label : {"A.", "B."}) {
            ASSERT_EQ(lines[i++], label);
            for (int r = 0; r < 3; ++r, ++data_rows) {
                const auto& row = lines[i++];
                EXPECT_EQ(row.rfind(std::string(label) == "A." ? "Churn," : "Doesnt churn,", 0), 0u) << row;
                EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
            }
            ASSERT_TRUE(lines[i++].empty());
        }
        ASSERT_TRUE(lines[i++].empty());
    }
    ASSERT_EQ(lines[i++], header);
    EXPECT_EQ(i, lines.size());
    EXPECT_EQ(data_rows, 18u);
    EXPECT_EQ(a.text.back(), '\n');
    EXPECT_EQ(a.text.substr(a.text.size() - header.size() - 2), "\n" + header + "\n");
    EXPECT_EQ(count_of(a.text, header + "\n"), 4u);
    EXPECT_EQ(a.group_labels.size(), 6u);
}

TEST(Assemble, SickMappedGoldenBytes) {
    const Table t = epic::testing::sick();
    SamplePlan p;
    p.per_group = 2;
    p.sets = 2;
    p.seed = 10;
    PromptVariant v;
    v.mapped = true;
    const Codebook cb = build_codebook(t, 2024);
    const auto a = assemble(draw(t, p), t.schema, v, &cb);
    EXPECT_EQ(a.text, slurp(golden("sick_mapped_prompt.txt")));

    // Every categorical cell is a 3-char code; numerics are untouched.
    const std::regex code("^[A-Z0-9]{3}$");
    const auto order = t.schema.prompt_order();
    for (const auto& line : lines_of(a.text)) {
        if (line.empty() || line == a.header || line == "A." || line == "B.") continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        ASSERT_EQ(cells.size(), order.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (t.schema.column(order[k]).kind == ColumnKind::Categorical)
                EXPECT_TRUE(std::regex_match(cells[k], code)) << cells[k];
            else
                EXPECT_TRUE(parse_number(cells[k])) << cells[k];
        }
    }
}

TEST(Assemble, MissingCodebookAndEmptyDraw) {
    const Table t = epic::testing::travel();
    PromptVariant v;
    v.mapped = true;
    SamplePlan p;
    try {
        assemble(draw(t, p), t.schema, v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MissingCodebook);
    }
    try {
        assemble(SampledPrompt{}, t.schema, PromptVariant{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EmptyDraw);
    }
}

TEST(RenderRow, SentenceStyle) {
    const Table t = parse_csv("y,v1\nyes,3\n", "y");
    EXPECT_EQ(render_row(t.rows[0], t.schema, PromptFormat::Sentence), "y is yes, v1 is 3, ");
    EXPECT_EQ(render_row(t.rows[0], t.schema, PromptFormat::Csv), "yes,3");
}

TEST(Assemble, UngroupedHasNoLabels) {
    PromptVariant v = travel_variant();
    v.grouped = false;
    const auto a = travel_prompt(v);
    EXPECT_TRUE(a.group_labels.empty());
    for (const auto& line : lines_of(a.text)) EXPECT_FALSE(line == "A." || line == "B.");
    EXPECT_EQ(count_of(a.text, a.header + "\n"), 4u);
}

TEST(Assemble, Deterministic) {
    EXPECT_EQ(travel_prompt(travel_variant(), 3).text, travel_prompt(travel_variant(), 3).text);
}

TEST(Tokens, HeuristicExamples) {
    EXPECT_EQ(heuristic_token_count(""), 0u);
    EXPECT_EQ(heuristic_token_count("a,b"), 3u);
    EXPECT_EQ(heuristic_token_count("  Doesnt churn,28\n"), 4u);
    EXPECT_EQ(heuristic_token_count("A."), 2u);
}

TEST(Tokens, TravelGoldenCount) {
    const auto a = travel_prompt(travel_variant());
    EXPECT_EQ(a.token_estimate, 395u);
    EXPECT_EQ(regex_tokens(a.text), 395u);
}

TEST(Tokens, MatchesRegexOracleProperty) {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> byte(0x20, 0x7e);
    std::uniform_int_distribution<int> len(0, 80);
    for (int iter = 0; iter < 3000; ++iter) {
        std::string s;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            const int b = byte(rng);
            s += (b % 11 == 0) ? '\n' : (b % 7 == 0 ? ' ' : static_cast<char>(b));
        }
        ASSERT_EQ(heuristic_token_count(s), regex_tokens(s)) << s;
    }
}

TEST(Tokens, PluginEstimator) {
    const auto est = TokenEstimator::plugin("chars", [](std::string_view s) { return s.size(); });
    EXPECT_EQ(est.name(), "plugin:chars");
    EXPECT_TRUE(est.is_plugin());
    EXPECT_EQ(est.count("abcd"), 4u);
    EXPECT_EQ(estimate_tokens("a,b"), 3u);
}

TEST(Tokens, CommandEstimator) {
    const auto est = TokenEstimator::command("wc -c");
    EXPECT_EQ(est.count("hello"), 5u);
    EXPECT_NE(est.name().find("plugin"), std::string::npos);
}

TEST(Tokens, CsvCheaperThanSentence) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PromptVariant csv = travel_variant();
        PromptVariant sentence = csv;
        sentence.format = PromptFormat::Sentence;
        const auto a = travel_prompt(csv, seed), b = travel_prompt(sentence, seed);
        ASSERT_EQ(a.example_count, b.example_count);
        EXPECT_LT(a.token_estimate, b.token_estimate);
    }
}

TEST(Assemble, InvariantsProperty) {
    std::mt19937_64 rng(17);
    epic::testing::TableSpec spec;
    spec.rows_min = 30;
    spec.rows_max = 60;
    spec.classes_max = 3;
    for (int iter = 0; iter < 200; ++iter) {
        const Table t = epic::testing::random_table(rng, spec);
        SamplePlan p;
        p.per_group = 1 + rng() % 2;
        p.sets = 1 + rng() % 3;
        p.seed = rng();
        const auto counts = t.class_counts();
        bool enough = true;
        for (const auto& [k, n] : counts) enough = enough && n >= p.per_group * p.sets;
        if (!enough) continue;
        PromptVariant v;
        v.grouped = rng() % 2;
        v.mapped = rng() % 2;
        v.format = rng() % 2 ? PromptFormat::Csv : PromptFormat::Sentence;
        const Codebook cb = build_codebook(t, rng());
        const auto a = assemble(draw(t, p), t.schema, v, &cb);
        const auto lines = lines_of(a.text);
        ASSERT_EQ(lines.back(), a.header);
        std::size_t headers = 0, labels = 0;
        for (const auto& l : lines) {
            headers += l == a.header;
            labels += std::regex_match(l, std::regex("^[A-Z]\\.$"));
        }
        ASSERT_EQ(headers, p.sets + 1);
        ASSERT_EQ(labels, v.grouped ? p.sets * t.schema.class_labels().size() : 0u);
        ASSERT_EQ(a.header.substr(0, 2), "y,") << a.header;
    }
}

TEST(GroupLabel, Alphabet) {
    EXPECT_EQ(group_label(0), "A.");
    EXPECT_EQ(group_label(25), "Z.");
    EXPECT_THROW(group_label(26), Error);
}

TEST(Descriptions, Parse) {
    const auto d = parse_descriptions("a: first\n\nb: second: part\n");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[1].first, "b");
    EXPECT_EQ(d[1].second, "second: part");
}
