#include "epic/config.hpp"

#include <fstream>
#include <map>

#include "epic/error.hpp"

namespace epic {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

ClassMode parse_class_mode(const std::string& s) {
    if (s == "multi" || s == "multi_class") return ClassMode::MultiClass;
    if (s == "single" || s == "single_class") return ClassMode::SingleClass;
    throw Error(Errc::Config, "unknown class_mode '" + s + "'");
}

Balance parse_balance(const std::string& s) {
    if (s == "balanced") return Balance::Balanced;
    if (s == "original" || s == "original_ratio") return Balance::OriginalRatio;
    throw Error(Errc::Config, "unknown balance '" + s + "'");
}

const char* to_string(ClassMode m) { return m == ClassMode::MultiClass ? "multi" : "single"; }
const char* to_string(Balance b) { return b == Balance::Balanced ? "balanced" : "original"; }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

void apply_plan(const json& j, SamplePlan& plan) {
    if (!j.is_object()) return;
    if (j.contains("class_mode")) plan.class_mode = parse_class_mode(j.at("class_mode").get<std::string>());
    if (j.contains("label")) plan.single_label = j.at("label").get<std::string>();
    if (j.contains("balance")) plan.balance = parse_balance(j.at("balance").get<std::string>());
    plan.per_group = get_or<std::size_t>(j, "per_group", plan.per_group);
    plan.sets = get_or<std::size_t>(j, "sets", plan.sets);
    if (plan.per_group < 1 || plan.sets < 1) throw Error(Errc::Config, "per_group and sets must be >= 1");
}

void apply_variant(const json& j, PromptVariant& variant, bool& use_descriptions) {
    if (!j.is_object()) return;
    if (j.contains("format")) variant.format = parse_prompt_format(j.at("format").get<std::string>());
    variant.grouped = get_or<bool>(j, "grouped", variant.grouped);
    variant.mapped = get_or<bool>(j, "mapped", variant.mapped);
    use_descriptions = get_or<bool>(j, "descriptions", use_descriptions);
}

}  // namespace

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
    try {
        RunConfig cfg;
        if (!doc.contains("seed")) throw Error(Errc::Config, "config must set 'seed'");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        cfg.dataset = resolve(base_dir, doc.at("dataset").get<std::string>());
        cfg.target = doc.at("target").get<std::string>();
        if (doc.contains("descriptions") && !doc.at("descriptions").is_null())
            cfg.descriptions = resolve(base_dir, doc.at("descriptions").get<std::string>());
        if (doc.contains("kinds"))
            for (const auto& [name, kind] : doc.at("kinds").items())
                try {
                    cfg.load.kinds[name] = parse_column_kind(kind.get<std::string>());
                } catch (const Error& ex) {
                    throw Error(Errc::Config, ex.what());
                }
        cfg.load.class_labels = get_or<std::vector<std::string>>(doc, "class_labels", {});
        cfg.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out"));

        apply_plan(doc.value("plan", json::object()), cfg.plan);
        cfg.plan.seed = cfg.seed;
        apply_variant(doc.value("variant", json::object()), cfg.variant, cfg.use_descriptions);

        const json b = doc.value("backend", json::object());
        cfg.backend.kind = parse_backend_kind(get_or<std::string>(b, "kind", "mock"));
        cfg.backend.endpoint = get_or<std::string>(b, "endpoint", "");
        cfg.backend.model = get_or<std::string>(b, "model", "");
        cfg.backend.temperature = get_or<double>(b, "temperature", cfg.backend.temperature);
        cfg.backend.max_output_tokens = get_or<std::size_t>(b, "max_output_tokens", cfg.backend.max_output_tokens);
        cfg.backend.request_timeout = std::chrono::milliseconds(
            static_cast<long long>(1000 * get_or<double>(b, "timeout_s", 60.0)));
        cfg.backend.retries = get_or<std::size_t>(b, "retries", cfg.backend.retries);
        cfg.backend.concurrency_limit = get_or<std::size_t>(b, "concurrency", cfg.backend.concurrency_limit);
        cfg.backend.stop = get_or<std::vector<std::string>>(b, "stop", {});
        if (b.contains("api_key")) throw Error(Errc::Config, "api keys belong in EPIC_API_KEY, not the config file");
        if (cfg.backend.temperature < 0) throw Error(Errc::Config, "temperature must be >= 0");
        if (cfg.backend.concurrency_limit < 1) throw Error(Errc::Config, "concurrency must be >= 1");
        if (cfg.backend.kind == BackendKind::Http && (cfg.backend.endpoint.empty() || cfg.backend.model.empty()))
            throw Error(Errc::Config, "http backend needs 'endpoint' and 'model'");

        const json m = b.value("mock", json::object());
        cfg.backend.mock.seed = get_or<std::uint64_t>(m, "seed", cfg.seed);
        cfg.backend.mock.numeric_jitter = get_or<double>(m, "numeric_jitter", cfg.backend.mock.numeric_jitter);
        cfg.backend.mock.failure_rate = get_or<double>(m, "failure_rate", cfg.backend.mock.failure_rate);
        cfg.backend.mock.rows_per_group = get_or<std::size_t>(m, "rows_per_group", cfg.plan.per_group);
        cfg.backend.mock.fail_on = get_or<std::vector<std::uint64_t>>(m, "fail_on", {});
        if (cfg.backend.mock.failure_rate < 0 || cfg.backend.mock.failure_rate > 1)
            throw Error(Errc::Config, "mock failure_rate must lie in [0, 1]");

        const json t = doc.value("targets", json::object());
        cfg.targets.per_class = get_or<std::map<std::string, std::size_t>>(t, "per_class", {});
        cfg.targets.max_inferences = get_or<std::size_t>(t, "max_inferences", 0);
        cfg.targets.seed = cfg.seed;

        const json e = doc.value("estimator", json::object());
        const auto kind = get_or<std::string>(e, "kind", "heuristic");
        if (kind == "plugin") {
            cfg.tokenizer_command = get_or<std::string>(e, "command", "");
            if (cfg.tokenizer_command.empty()) throw Error(Errc::Config, "plugin estimator needs 'command'");
        } else if (kind != "heuristic") {
            throw Error(Errc::Config, "unknown estimator kind '" + kind + "'");
        }
        return cfg;
    } catch (const json::exception& ex) {
        throw Error(Errc::Config, ex.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Config, "cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& ex) {
        throw Error(Errc::Config, path.string() + ": " + ex.what());
    }
    return parse_run_config(doc, path.parent_path());
}

void check_paths(const RunConfig& config) {
    if (!std::filesystem::exists(config.dataset))
        throw Error(Errc::Config, "dataset not found: " + config.dataset.string());
    if (config.descriptions && !std::filesystem::exists(*config.descriptions))
        throw Error(Errc::Config, "descriptions not found: " + config.descriptions->string());
}

std::vector<NamedVariant> parse_variants(const json& doc, const RunConfig& base) {
    std::vector<NamedVariant> out;
    auto overlay = [&](const json& j, std::string name) {
        NamedVariant v{std::move(name), base.plan, base.variant, base.use_descriptions};
        try {
            apply_plan(j, v.plan);
            apply_variant(j, v.variant, v.use_descriptions);
        } catch (const json::exception& ex) {
            throw Error(Errc::Config, ex.what());
        }
        return v;
    };
    if (doc.contains("variants")) {
        std::size_t i = 0;
        for (const auto& j : doc.at("variants")) {
            auto name = get_or<std::string>(j, "name", "variant" + std::to_string(i));
            out.push_back(overlay(j, std::move(name)));
            ++i;
        }
    }
    if (doc.contains("matrix")) {
        std::map<std::string, std::vector<json>> sorted;
        for (const auto& [key, values] : doc.at("matrix").items()) {
            if (!values.is_array() || values.empty()) throw Error(Errc::Config, "matrix axis '" + key + "' is empty");
            sorted[key] = values.get<std::vector<json>>();
        }
        const std::vector<std::pair<std::string, std::vector<json>>> axes(sorted.begin(), sorted.end());
        std::vector<std::size_t> idx(axes.size(), 0);
        bool more = !axes.empty();
        while (more) {
            json j = json::object();
            std::string name;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                const auto& value = axes[a].second[idx[a]];
                j[axes[a].first] = value;
                if (!name.empty()) name += ",";
                name += axes[a].first + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
            }
            out.push_back(overlay(j, name));
            // Odometer step, last axis fastest.
            more = false;
            for (std::size_t k = axes.size(); k-- > 0;) {
                if (++idx[k] < axes[k].second.size()) {
                    more = true;
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    return out;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["dataset"] = c.dataset.string();
    j["target"] = c.target;
    j["descriptions"] = c.descriptions ? nlohmann::ordered_json(c.descriptions->string()) : nlohmann::ordered_json();
    nlohmann::ordered_json kinds = nlohmann::ordered_json::object();
    for (const auto& [name, kind] : c.load.kinds) kinds[name] = epic::to_string(kind);
    j["kinds"] = kinds;
    j["class_labels"] = c.load.class_labels;
    j["seed"] = c.seed;
    j["plan"] = {{"class_mode", to_string(c.plan.class_mode)},
                 {"label", c.plan.single_label},
                 {"balance", to_string(c.plan.balance)},
                 {"per_group", c.plan.per_group},
                 {"sets", c.plan.sets}};
    j["variant"] = {{"format", epic::to_string(c.variant.format)},
                    {"grouped", c.variant.grouped},
                    {"mapped", c.variant.mapped},
                    {"descriptions", c.use_descriptions},
                    {"class_first", c.variant.class_first}};
    j["backend"] = {{"kind", epic::to_string(c.backend.kind)},
                    {"endpoint", c.backend.endpoint},
                    {"model", c.backend.model},
                    {"temperature", c.backend.temperature},
                    {"max_output_tokens", c.backend.max_output_tokens},
                    {"timeout_s", static_cast<double>(c.backend.request_timeout.count()) / 1000.0},
                    {"retries", c.backend.retries},
                    {"concurrency", c.backend.concurrency_limit},
                    {"stop", c.backend.stop},
                    {"mock",
                     {{"seed", c.backend.mock.seed},
                      {"numeric_jitter", c.backend.mock.numeric_jitter},
                      {"failure_rate", c.backend.mock.failure_rate},
                      {"rows_per_group", c.backend.mock.rows_per_group},
                      {"fail_on", c.backend.mock.fail_on}}}};
    j["targets"] = {{"per_class", c.targets.per_class}, {"max_inferences", c.targets.max_inferences}};
    j["estimator"] = c.tokenizer_command.empty()
                         ? nlohmann::ordered_json{{"kind", "heuristic"}}
                         : nlohmann::ordered_json{{"kind", "plugin"}, {"command", c.tokenizer_command}};
    j["output_dir"] = c.output_dir.string();
    return j;
}

nlohmann::ordered_json to_json(const NamedVariant& v) {
    return {{"name", v.name},
            {"class_mode", to_string(v.plan.class_mode)},
            {"balance", to_string(v.plan.balance)},
            {"per_group", v.plan.per_group},
            {"sets", v.plan.sets},
            {"format", epic::to_string(v.variant.format)},
            {"grouped", v.variant.grouped},
            {"mapped", v.variant.mapped},
            {"descriptions", v.use_descriptions}};
}

TokenEstimator make_estimator(const RunConfig& config) {
    return config.tokenizer_command.empty() ? TokenEstimator::heuristic()
                                            : TokenEstimator::command(config.tokenizer_command);
}

}  // namespace epic
