#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "epic/dataset.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using epic::testing::fixture;
using epic::testing::slurp;
using epic::testing::TempDir;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + EPIC_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

// Mock run over the toy table with a per-class target.
json toy_config(const fs::path& train, std::size_t per_class) {
    return {{"seed", 11},
            {"dataset", train.string()},
            {"target", "class"},
            {"plan", {{"per_group", 3}, {"sets", 3}}},
            {"backend", {{"kind", "mock"}, {"concurrency", 4}, {"mock", {{"numeric_jitter", 0.05}}}}},
            {"targets", {{"per_class", {{"major", per_class}, {"minor", per_class}}}}}};
}

}  // namespace

TEST(Cli, SplitWritesPartsAndIsReproducible) {
    TempDir a, b;
    const auto input = fixture("travel_train.csv");
    for (const auto* d : {&a, &b})
        ASSERT_EQ(run_cli("split --input " + q(input) + " --target Churn --ratio 0.75 --seed 3 --output-dir " +
                          q(d->path())),
                  0);
    const auto train = epic::load_csv(a.path() / "train.csv", "Churn");
    const auto test = epic::load_csv(a.path() / "test.csv", "Churn");
    EXPECT_EQ(train.size(), 18u);
    EXPECT_EQ(test.size(), 6u);
    for (const char* f : {"train.csv", "test.csv", "split.manifest"})
        EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
    const json m = read_json(a.path() / "split.manifest");
    EXPECT_EQ(m["train_rows"], 18);
    EXPECT_EQ(m["seed"], 3);
}

TEST(Cli, SplitRatioOutOfRangeIsUsage) {
    TempDir d;
    EXPECT_EQ(run_cli("split --input " + q(fixture("travel_train.csv")) +
                      " --target Churn --ratio 1.5 --seed 1 --output-dir " + q(d.path())),
              64);
    EXPECT_FALSE(fs::exists(d.path() / "train.csv"));
}

TEST(Cli, SplitMissingTargetIsDataError) {
    TempDir d;
    EXPECT_EQ(run_cli("split --input " + q(fixture("travel_train.csv")) + " --target Nope --seed 1 --output-dir " +
                      q(d.path())),
              2);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli("frobnicate"), 64);
    EXPECT_EQ(run_cli("split --target Churn"), 64);
    EXPECT_EQ(run_cli("toy --seed notanumber"), 64);
}

TEST(Cli, ToyThenGenerateIsDeterministic) {
    TempDir d;
    ASSERT_EQ(run_cli("toy --n-major 500 --n-minor 500 --noise 0.1 --seed 5 --decimals 4 --output-dir " +
                      q(d.path())),
              0);
    const auto toy = epic::load_csv(d.path() / "toy.csv", "class");
    EXPECT_EQ(toy.size(), 1000u);

    write_json(d.path() / "run.json", toy_config(d.path() / "toy.csv", 500));
    for (const char* out : {"r1", "r2"})
        ASSERT_EQ(run_cli("generate --config " + q(d.path() / "run.json") + " --output-dir " + q(d.path() / out)), 0);
    for (const char* f : {"synthetic.csv", "efficiency.report"})
        EXPECT_EQ(slurp(d.path() / "r1" / f), slurp(d.path() / "r2" / f)) << f;
    // run.meta echoes the output directory; everything else must match.
    json m1 = read_json(d.path() / "r1" / "run.meta"), m2 = read_json(d.path() / "r2" / "run.meta");
    m1["config"].erase("output_dir");
    m2["config"].erase("output_dir");
    EXPECT_EQ(m1, m2);

    const auto synth = epic::load_csv(d.path() / "r1" / "synthetic.csv", "class");
    EXPECT_EQ(synth.size(), 1000u);
    const auto counts = synth.class_counts();
    EXPECT_EQ(counts.at("major"), 500u);
    EXPECT_EQ(counts.at("minor"), 500u);
    const json meta = read_json(d.path() / "r1" / "run.meta");
    EXPECT_EQ(meta["synthetic_rows"], 1000);
    EXPECT_EQ(meta["budget_exhausted"], false);
    EXPECT_TRUE(meta["codebook"].is_null());
    EXPECT_FALSE(fs::exists(d.path() / "r1" / "codebook.map"));

    // A different seed changes the output.
    ASSERT_EQ(run_cli("generate --config " + q(d.path() / "run.json") + " --seed 12 --output-dir " +
                      q(d.path() / "r3")),
              0);
    EXPECT_NE(slurp(d.path() / "r1" / "synthetic.csv"), slurp(d.path() / "r3" / "synthetic.csv"));
}

TEST(Cli, GenerateTravelMetaAndMappedCodebook) {
    TempDir d;
    json cfg = {{"seed", 9},
                {"dataset", fixture("travel_train.csv").string()},
                {"target", "Churn"},
                {"descriptions", fixture("travel_descriptions.txt").string()},
                {"variant", {{"mapped", true}}},
                {"backend", {{"mock", {{"numeric_jitter", 0.0}}}}},
                {"targets", {{"per_class", {{"Churn", 10}, {"Doesnt churn", 10}}}}}};
    write_json(d.path() / "run.json", cfg);
    ASSERT_EQ(run_cli("generate --config " + q(d.path() / "run.json") + " --output-dir " + q(d.path() / "out")), 0);
    const json meta = read_json(d.path() / "out" / "run.meta");
    EXPECT_EQ(meta["examples_per_prompt"], 18);
    EXPECT_EQ(meta["completions_per_prompt"], 1);
    EXPECT_EQ(meta["class_order"], json::array({"Churn", "Doesnt churn"}));
    EXPECT_EQ(meta["codebook"], "codebook.map");
    EXPECT_TRUE(fs::exists(d.path() / "out" / "codebook.map"));
    // Decoded output is in the original vocabulary.
    const auto synth = epic::load_csv(d.path() / "out" / "synthetic.csv", "Churn");
    EXPECT_EQ(synth.size(), 20u);
    for (const auto& row : synth.rows) EXPECT_TRUE(row.back() == "Churn" || row.back() == "Doesnt churn");
}

TEST(Cli, BudgetExhaustedExitsThreeWithPartialOutputs) {
    TempDir d;
    json cfg = {{"seed", 1},
                {"dataset", fixture("travel_train.csv").string()},
                {"target", "Churn"},
                {"backend", {{"mock", {{"failure_rate", 1.0}}}}},
                {"targets", {{"per_class", {{"Churn", 5}}}}}};
    write_json(d.path() / "run.json", cfg);
    EXPECT_EQ(run_cli("generate --config " + q(d.path() / "run.json") + " --max-inferences 4 --output-dir " +
                      q(d.path() / "out")),
              3);
    for (const char* f : {"synthetic.csv", "efficiency.report", "run.meta"})
        EXPECT_TRUE(fs::exists(d.path() / "out" / f)) << f;
    const json meta = read_json(d.path() / "out" / "run.meta");
    EXPECT_EQ(meta["budget_exhausted"], true);
    EXPECT_EQ(meta["inferences"], 4);
    const json eff = read_json(d.path() / "out" / "efficiency.report");
    EXPECT_EQ(eff["summary"]["success_rate"], 0.0);
}

TEST(Cli, GenerateConfigErrors) {
    TempDir d;
    write_json(d.path() / "key.json", {{"seed", 1},
                                       {"dataset", fixture("travel_train.csv").string()},
                                       {"target", "Churn"},
                                       {"backend", {{"api_key", "secret"}}}});
    EXPECT_EQ(run_cli("generate --config " + q(d.path() / "key.json")), 2);
    write_json(d.path() / "missing.json", {{"seed", 1}, {"dataset", "nowhere.csv"}, {"target", "Churn"}});
    EXPECT_EQ(run_cli("generate --config " + q(d.path() / "missing.json")), 2);
    EXPECT_EQ(run_cli("generate"), 64);
}

TEST(Cli, MetricsSelfCompareIsZero) {
    TempDir d;
    const auto input = fixture("sick_train.csv");
    ASSERT_EQ(run_cli("metrics --real " + q(input) + " --synthetic " + q(input) + " --target Class --export-csv" +
                      " --output-dir " + q(d.path())),
              0);
    const json r = read_json(d.path() / "fidelity.report");
    ASSERT_FALSE(r["per_class"].empty());
    for (const auto& cls : r["per_class"])
        for (const char* key : {"pearson_diff", "cramers_diff"})
            for (const auto& row : cls[key]["values"])
                for (const auto& v : row)
                    if (!v.is_null()) EXPECT_EQ(v.get<double>(), 0.0);
    EXPECT_TRUE(fs::exists(d.path() / "matrices" / "class0_pearson_diff.csv"));
    EXPECT_TRUE(fs::exists(d.path() / "matrices" / "class1_cramers_real.csv"));
}

TEST(Cli, MetricsSchemaMismatchIsDataError) {
    TempDir d;
    std::ofstream(d.path() / "other.csv") << "Class,age\nsick,1\nnegative,2\n";
    EXPECT_EQ(run_cli("metrics --real " + q(fixture("sick_train.csv")) + " --synthetic " + q(d.path() / "other.csv") +
                      " --target Class --output-dir " + q(d.path())),
              2);
    std::ofstream(d.path() / "kinds.csv") << slurp(fixture("sick_train.csv")) << "sick,old,M,f,t,1,1,1,1,1,other\n";
    EXPECT_EQ(run_cli("metrics --real " + q(fixture("sick_train.csv")) + " --synthetic " + q(d.path() / "kinds.csv") +
                      " --target Class --output-dir " + q(d.path())),
              2);
}

TEST(Cli, AblateTwoVariants) {
    TempDir d;
    json cfg = {{"seed", 4},
                {"dataset", fixture("travel_train.csv").string()},
                {"target", "Churn"},
                {"output_dir", (d.path() / "out").string()},
                {"targets", {{"per_class", {{"Churn", 6}, {"Doesnt churn", 6}}}}},
                {"matrix", {{"format", {"csv", "sentence"}}}}};
    write_json(d.path() / "ablate.json", cfg);
    ASSERT_EQ(run_cli("ablate --config " + q(d.path() / "ablate.json")), 0);
    const json r = read_json(d.path() / "out" / "ablation.report");
    ASSERT_EQ(r["variants"].size(), 2u);
    EXPECT_EQ(r["variants"][0]["name"], "format=csv");
    EXPECT_EQ(r["variants"][1]["name"], "format=sentence");
    for (const auto& v : r["variants"]) EXPECT_EQ(v["status"], "ok");
    EXPECT_LT(r["variants"][0]["input_tokens"].get<double>(), r["variants"][1]["input_tokens"].get<double>());

    const std::string csv = slurp(d.path() / "out" / "ablation.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_EQ(csv.rfind("variant,input_tokens,output_samples,success_rate,inferences,status\n", 0), 0u);
}

TEST(Cli, AblateFailedVariantDoesNotStopSweep) {
    TempDir d;
    json cfg = {{"seed", 4},
                {"dataset", fixture("travel_train.csv").string()},
                {"target", "Churn"},
                {"output_dir", (d.path() / "out").string()},
                {"targets", {{"per_class", {{"Churn", 3}}}}},
                {"variants", {{{"name", "huge"}, {"per_group", 50}}, {{"name", "small"}, {"per_group", 2}}}}};
    write_json(d.path() / "ablate.json", cfg);
    ASSERT_EQ(run_cli("ablate --config " + q(d.path() / "ablate.json")), 0);
    const json r = read_json(d.path() / "out" / "ablation.report");
    ASSERT_EQ(r["variants"].size(), 2u);
    EXPECT_EQ(r["variants"][0]["status"], "failed");
    EXPECT_EQ(r["variants"][1]["status"], "ok");
}

TEST(Cli, AblateEmptyVariantListIsUsage) {
    TempDir d;
    write_json(d.path() / "ablate.json", {{"seed", 4},
                                          {"dataset", fixture("travel_train.csv").string()},
                                          {"target", "Churn"},
                                          {"variants", json::array()}});
    EXPECT_EQ(run_cli("ablate --config " + q(d.path() / "ablate.json") + " --output-dir " + q(d.path())), 64);
}

TEST(Cli, ToyRejectsBadCounts) {
    TempDir d;
    EXPECT_EQ(run_cli("toy --n-major 0 --seed 1 --output-dir " + q(d.path())), 64);
    EXPECT_EQ(run_cli("toy --noise -1 --seed 1 --output-dir " + q(d.path())), 64);
}
