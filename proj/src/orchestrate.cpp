#include "epic/orchestrate.hpp"

#include <algorithm>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "epic/error.hpp"
#include "epic/seed.hpp"

namespace epic {

std::uint64_t draw_seed(const GenerationTarget& target, std::uint64_t index) noexcept {
    return derive_seed(target.seed, index);
}

std::size_t default_max_inferences(const Table& train, const SamplePlan& plan, const GenerationTarget& target) {
    const auto labels = plan_labels(train, plan);
    const auto sizes = group_sizes(train, plan);
    std::size_t expected = 1;
    for (const auto& [label, wanted] : target.per_class) {
        if (wanted == 0) continue;
        std::size_t per_inference = 1;
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == label) per_inference = std::max<std::size_t>(sizes[k], 1);
        expected = std::max(expected, (wanted + per_inference - 1) / per_inference);
    }
    return 50 * expected;
}

void validate_run(const Table& train, const SamplePlan& plan, const PromptVariant& variant,
                  const GenerationTarget& target) {
    if (variant.grouped && plan.class_mode != ClassMode::MultiClass)
        throw Error(Errc::Config, "grouped prompts require multi-class sampling");
    if (!variant.class_first) throw Error(Errc::Config, "the class column is always placed first");
    const auto& labels = train.schema.class_labels();
    for (const auto& [label, count] : target.per_class) {
        (void)count;
        if (std::find(labels.begin(), labels.end(), label) == labels.end())
            throw Error(Errc::Config, "target names unknown class '" + label + "'");
    }
    if (variant.grouped && labels.size() > 26) throw Error(Errc::Config, "at most 26 class groups are supported");
}

namespace {

bool targets_met(const std::map<std::string, std::size_t>& have, const GenerationTarget& target) {
    for (const auto& [label, wanted] : target.per_class) {
        auto it = have.find(label);
        if ((it == have.end() ? 0 : it->second) < wanted) return false;
    }
    return true;
}

struct Outcome {
    InferenceRecord record;
    std::vector<std::pair<std::string, Row>> rows;
};

}  // namespace

RunResult run(const Table& train, const SamplePlan& plan, const PromptVariant& variant, Backend& backend,
              std::size_t concurrency_limit, const GenerationTarget& target, const RunOptions& options) {
    validate_run(train, plan, variant, target);

    RunResult result;
    result.log.estimator = options.estimator.name();
    if (variant.mapped) result.codebook = options.codebook ? *options.codebook : build_codebook(train, target.seed);
    const Codebook* cb = result.codebook ? &*result.codebook : nullptr;
    const ValueDomains domains(train);
    const auto classes = plan_labels(train, plan);
    result.budget = target.max_inferences ? target.max_inferences : default_max_inferences(train, plan, target);

    auto infer = [&](std::uint64_t id) {
        Outcome out;
        auto& rec = out.record;
        rec.request_id = id;
        rec.draw_seed = draw_seed(target, id);
        SamplePlan p = plan;
        p.seed = rec.draw_seed;
        const auto prompt = assemble(draw(train, p), train.schema, variant, cb, options.estimator);
        rec.input_tokens = prompt.token_estimate;
        try {
            auto completion = backend.complete(prompt, id);
            rec.attempt_count = completion.attempt_count;
            rec.latency_ms = completion.latency.count();
            auto parsed = parse_completion(completion.text, train.schema, variant, cb, domains, &classes);
            rec.discarded = parsed.discarded;
            rec.group_mismatches = parsed.group_mismatches;
            rec.raw_lines = parsed.raw_line_count;
            rec.output_valid = parsed.valid_rows.size();
            for (const auto& [label, row] : parsed.valid_rows) ++rec.valid_by_class[label];
            out.rows = std::move(parsed.valid_rows);
        } catch (const Error& ex) {
            rec.error = ex.what();
        }
        rec.success = rec.output_valid >= 1;
        return out;
    };

    std::map<std::string, std::size_t> accumulated;
    std::vector<Row> kept_rows;
    auto commit = [&](Outcome&& out) {
        for (auto& [label, row] : out.rows) {
            auto& have = accumulated[label];
            auto wanted = target.per_class.find(label);
            if (wanted != target.per_class.end() && have < wanted->second) {
                kept_rows.push_back(std::move(row));
                ++result.log.kept[label];
            }
            ++have;
        }
        result.log.inferences.push_back(std::move(out.record));
        return targets_met(accumulated, target);
    };

    bool done = targets_met(accumulated, target);
    const std::size_t workers = std::max<std::size_t>(1, concurrency_limit);
    if (!done && workers == 1) {
        for (std::uint64_t id = 0; id < result.budget && !done; ++id) done = commit(infer(id));
    } else if (!done) {
        std::mutex mu;
        std::uint64_t next_id = 0;
        std::uint64_t next_commit = 0;
        std::map<std::uint64_t, Outcome> pending;
        std::exception_ptr failure;

        auto worker = [&] {
            while (true) {
                std::uint64_t id;
                {
                    std::lock_guard lock(mu);
                    if (done || failure || next_id >= result.budget) return;
                    id = next_id++;
                }
                Outcome out;
                try {
                    out = infer(id);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
                std::lock_guard lock(mu);
                pending.emplace(id, std::move(out));
                // Commit strictly in id order; anything finishing after the
                // stop point is surplus and dropped.
                while (!done && !pending.empty() && pending.begin()->first == next_commit) {
                    done = commit(std::move(pending.begin()->second));
                    pending.erase(pending.begin());
                    ++next_commit;
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    result.log.accumulated = accumulated;
    for (const auto& [label, wanted] : target.per_class) {
        (void)wanted;
        result.log.kept.try_emplace(label, 0);
        result.log.accumulated.try_emplace(label, 0);
    }
    result.budget_exhausted = !done;
    result.synthetic = with_rows(train.schema, std::move(kept_rows));
    return result;
}

RunResult run(const Table& train, const SamplePlan& plan, const PromptVariant& variant, const BackendConfig& config,
              const GenerationTarget& target, const RunOptions& options, LogSink log) {
    auto backend = make_backend(config, std::move(log));
    return run(train, plan, variant, *backend, config.concurrency_limit, target, options);
}

EfficiencyReport report(const GenerationLog& log) {
    if (log.inferences.empty()) throw Error(Errc::EmptyLog, "no inferences recorded");
    EfficiencyReport r;
    r.inferences = log.inferences.size();
    r.estimator = log.estimator;
    std::size_t tokens = 0, samples = 0, successes = 0;
    for (const auto& rec : log.inferences) {
        tokens += rec.input_tokens;
        samples += rec.output_valid;
        successes += rec.success ? 1 : 0;
    }
    const auto n = static_cast<double>(r.inferences);
    r.mean_input_tokens = static_cast<double>(tokens) / n;
    r.mean_output_samples = static_cast<double>(samples) / n;
    r.success_rate = static_cast<double>(successes) / n;
    return r;
}

namespace {

nlohmann::ordered_json report_json(const EfficiencyReport& report) {
    return {{"inferences", report.inferences},
            {"mean_input_tokens", report.mean_input_tokens},
            {"mean_output_samples", report.mean_output_samples},
            {"success_rate", report.success_rate},
            {"token_estimator", report.estimator}};
}

}  // namespace

std::string to_json(const EfficiencyReport& report) { return report_json(report).dump(2) + "\n"; }

std::string to_json(const GenerationLog& log, const EfficiencyReport& report) {
    nlohmann::ordered_json doc;
    doc["summary"] = report_json(report);
    doc["accumulated_per_class"] = log.accumulated;
    doc["kept_per_class"] = log.kept;
    auto& arr = doc["inferences"] = nlohmann::ordered_json::array();
    for (const auto& rec : log.inferences) {
        nlohmann::ordered_json j;
        j["request_id"] = rec.request_id;
        j["draw_seed"] = rec.draw_seed;
        j["input_tokens"] = rec.input_tokens;
        j["output_valid"] = rec.output_valid;
        j["success"] = rec.success;
        j["valid_by_class"] = rec.valid_by_class;
        j["raw_lines"] = rec.raw_lines;
        j["discarded"] = {{"field_count", rec.discarded.field_count},
                          {"numeric_parse", rec.discarded.numeric_parse},
                          {"unknown_category", rec.discarded.unknown_category},
                          {"unknown_code", rec.discarded.unknown_code}};
        j["group_mismatches"] = rec.group_mismatches;
        j["attempts"] = rec.attempt_count;
        j["latency_ms"] = rec.latency_ms;
        if (!rec.error.empty()) j["error"] = rec.error;
        arr.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

}  // namespace epic
