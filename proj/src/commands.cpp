#include "epic/commands.hpp"

#include <fstream>
#include <iostream>
#include <mutex>

#include <json.hpp>

#include "epic/config.hpp"
#include "epic/dataset.hpp"
#include "epic/error.hpp"
#include "epic/fidelity.hpp"
#include "epic/orchestrate.hpp"

namespace epic {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create " + dir.string() + ": " + ec.message());
}

int report_error(const Error& ex, std::ostream& err) {
    err << "error: " << ex.what() << "\n";
    return kExitDataError;
}

std::size_t examples_per_prompt(const Table& train, const SamplePlan& plan) {
    std::size_t per_set = 0;
    for (auto s : group_sizes(train, plan)) per_set += s;
    return per_set * plan.sets;
}

ojson efficiency_json(const GenerationLog& log) {
    if (log.inferences.empty())
        return ojson::parse(to_json(log, EfficiencyReport{0, 0, 0, 0, log.estimator}));
    return ojson::parse(to_json(log, report(log)));
}

struct PreparedRun {
    RunConfig config;
    Table train;
};

PreparedRun prepare(RunConfig cfg) {
    check_paths(cfg);
    Table train = load_csv(cfg.dataset, cfg.target, cfg.load);
    if (cfg.descriptions && cfg.use_descriptions) cfg.variant.descriptions = load_descriptions(*cfg.descriptions);
    return {std::move(cfg), std::move(train)};
}

LogSink stream_sink(std::ostream& err) {
    auto mu = std::make_shared<std::mutex>();
    return [&err, mu](std::string_view line) {
        std::lock_guard lock(*mu);
        err << line << "\n";
    };
}

}  // namespace

int cmd_split(const SplitArgs& args, std::ostream& out, std::ostream& err) {
    if (!(args.ratio > 0.0 && args.ratio < 1.0)) {
        err << "usage error: --ratio must lie strictly between 0 and 1\n";
        return kExitUsage;
    }
    try {
        const Table source = load_csv(args.input, args.target);
        const Table unique = dedup(source);
        const SplitPair parts = split(unique, args.ratio, args.seed);
        ensure_dir(args.output_dir);
        write_csv(parts.train, args.output_dir / "train.csv");
        write_csv(parts.test, args.output_dir / "test.csv");

        ojson manifest;
        manifest["tool"] = "epic";
        manifest["version"] = kVersion;
        manifest["input"] = args.input.string();
        manifest["target"] = args.target;
        manifest["ratio"] = args.ratio;
        manifest["seed"] = args.seed;
        manifest["stratified"] = false;
        manifest["rows_in"] = source.size();
        manifest["rows_after_dedup"] = unique.size();
        manifest["train_rows"] = parts.train.size();
        manifest["test_rows"] = parts.test.size();
        write_text(args.output_dir / "split.manifest", manifest.dump(2) + "\n");
        out << "train " << parts.train.size() << " rows, test " << parts.test.size() << " rows\n";
        return kExitOk;
    } catch (const Error& ex) {
        return report_error(ex, err);
    }
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        RunConfig cfg = load_run_config(args.config);
        if (args.output_dir) cfg.output_dir = *args.output_dir;
        if (args.seed) {
            cfg.seed = *args.seed;
            cfg.plan.seed = cfg.targets.seed = cfg.seed;
        }
        if (args.max_inferences) cfg.targets.max_inferences = *args.max_inferences;

        auto [config, train] = prepare(std::move(cfg));
        const auto estimator = make_estimator(config);
        RunOptions options;
        options.estimator = estimator;
        auto result = run(train, config.plan, config.variant, config.backend, config.targets, options, stream_sink(err));

        ensure_dir(config.output_dir);
        write_csv(result.synthetic, config.output_dir / "synthetic.csv");
        if (result.codebook) result.codebook->save(config.output_dir / "codebook.map");
        write_text(config.output_dir / "efficiency.report", efficiency_json(result.log).dump(2) + "\n");

        ojson meta;
        meta["tool"] = "epic";
        meta["version"] = kVersion;
        meta["command"] = "generate";
        meta["config"] = to_json(config);
        meta["seeds"] = {{"base", config.seed},
                         {"draw", "derived per inference from base seed and request id"},
                         {"codebook", config.seed},
                         {"mock", config.backend.mock.seed}};
        meta["token_estimator"] = estimator.name();
        meta["message_convention"] = "single user message, no system prompt";
        meta["completions_per_prompt"] = 1;
        meta["examples_per_prompt"] = examples_per_prompt(train, config.plan);
        meta["class_order"] = train.schema.class_labels();
        meta["training_rows"] = train.size();
        meta["budget"] = result.budget;
        meta["inferences"] = result.log.inferences.size();
        meta["budget_exhausted"] = result.budget_exhausted;
        meta["synthetic_rows"] = result.synthetic.size();
        meta["codebook"] = result.codebook ? ojson("codebook.map") : ojson();
        write_text(config.output_dir / "run.meta", meta.dump(2) + "\n");

        out << "generated " << result.synthetic.size() << " rows in " << result.log.inferences.size()
            << " inferences\n";
        if (result.budget_exhausted) {
            err << "error: BudgetExhausted: stopped after " << result.budget
                << " inferences; partial outputs written\n";
            return kExitBudgetExhausted;
        }
        return kExitOk;
    } catch (const Error& ex) {
        return report_error(ex, err);
    }
}

int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const Table real = load_csv(args.real, args.target);
        LoadOptions synth_options;
        for (const auto& col : real.schema.columns()) synth_options.kinds[col.name] = col.kind;
        Table synth;
        try {
            synth = load_csv(args.synthetic, args.target, synth_options);
        } catch (const Error& ex) {
            if (ex.code() == Errc::InvalidKind) throw Error(Errc::SchemaMismatch, ex.what());
            throw;
        }
        const auto report = build_report(real, synth);
        ensure_dir(args.output_dir);
        write_text(args.output_dir / "fidelity.report", to_json(report));
        if (args.export_csv) {
            const auto dir = args.output_dir / "matrices";
            ensure_dir(dir);
            for (std::size_t i = 0; i < report.per_class.size(); ++i) {
                const auto& cf = report.per_class[i];
                const std::string stem = "class" + std::to_string(i) + "_";
                write_text(dir / (stem + "pearson_real.csv"), to_csv(cf.pearson_real));
                write_text(dir / (stem + "pearson_synthetic.csv"), to_csv(cf.pearson_synth));
                write_text(dir / (stem + "pearson_diff.csv"), to_csv(cf.pearson_diff));
                write_text(dir / (stem + "cramers_real.csv"), to_csv(cf.cramers_real));
                write_text(dir / (stem + "cramers_synthetic.csv"), to_csv(cf.cramers_synth));
                write_text(dir / (stem + "cramers_diff.csv"), to_csv(cf.cramers_diff));
            }
        }
        out << "fidelity report for " << report.per_class.size() << " classes\n";
        return kExitOk;
    } catch (const Error& ex) {
        return report_error(ex, err);
    }
}

int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(args.config);
        if (!in) throw Error(Errc::Config, "cannot open config " + args.config.string());
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& ex) {
            throw Error(Errc::Config, ex.what());
        }
        RunConfig base = parse_run_config(doc, args.config.parent_path());
        if (args.output_dir) base.output_dir = *args.output_dir;
        const auto variants = parse_variants(doc, base);
        if (variants.empty()) {
            err << "usage error: the ablation config lists no variants\n";
            return kExitUsage;
        }

        auto [config, train] = prepare(std::move(base));
        Descriptions descriptions = config.variant.descriptions;
        const auto estimator = make_estimator(config);
        ensure_dir(config.output_dir);

        ojson rows = ojson::array();
        std::string csv = "variant,input_tokens,output_samples,success_rate,inferences,status\n";
        for (const auto& v : variants) {
            ojson row = to_json(v);
            try {
                PromptVariant variant = v.variant;
                variant.descriptions = v.use_descriptions ? descriptions : Descriptions{};
                RunOptions options;
                options.estimator = estimator;
                auto result = run(train, v.plan, variant, config.backend, config.targets, options, stream_sink(err));
                const auto eff = result.log.inferences.empty()
                                     ? EfficiencyReport{0, 0, 0, 0, result.log.estimator}
                                     : report(result.log);
                row["input_tokens"] = eff.mean_input_tokens;
                row["output_samples"] = eff.mean_output_samples;
                row["success_rate"] = eff.success_rate;
                row["inferences"] = eff.inferences;
                row["budget_exhausted"] = result.budget_exhausted;
                row["status"] = "ok";
                csv += v.name.find(',') == std::string::npos ? v.name : "\"" + v.name + "\"";
                csv += "," + format_number(eff.mean_input_tokens) + "," + format_number(eff.mean_output_samples) + "," +
                       format_number(eff.success_rate) + "," + std::to_string(eff.inferences) + ",ok\n";
            } catch (const Error& ex) {
                row["status"] = "failed";
                row["error"] = ex.what();
                csv += (v.name.find(',') == std::string::npos ? v.name : "\"" + v.name + "\"") + ",,,,,failed\n";
                err << "variant " << v.name << " failed: " << ex.what() << "\n";
            }
            rows.push_back(std::move(row));
        }

        ojson doc_out;
        doc_out["tool"] = "epic";
        doc_out["version"] = kVersion;
        doc_out["token_estimator"] = estimator.name();
        doc_out["base_config"] = to_json(config);
        doc_out["variants"] = std::move(rows);
        write_text(config.output_dir / "ablation.report", doc_out.dump(2) + "\n");
        write_text(config.output_dir / "ablation.csv", csv);
        out << "ablation over " << variants.size() << " variants\n";
        return kExitOk;
    } catch (const Error& ex) {
        return report_error(ex, err);
    }
}

int cmd_toy(const ToyArgs& args, std::ostream& out, std::ostream& err) {
    if (args.n_major < 1 || args.n_minor < 1 || !(args.noise >= 0.0)) {
        err << "usage error: class counts must be >= 1 and noise >= 0\n";
        return kExitUsage;
    }
    try {
        ToyShape shape;
        shape.decimals = args.decimals;
        const Table toy = generate_toy(args.n_major, args.n_minor, args.noise, args.seed, shape);
        ensure_dir(args.output_dir);
        write_csv(toy, args.output_dir / "toy.csv");
        out << "toy table with " << toy.size() << " rows\n";
        return kExitOk;
    } catch (const Error& ex) {
        return report_error(ex, err);
    }
}

}  // namespace epic
