#include <algorithm>
#include <cstdlib>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "epic/backend.hpp"
#include "epic/error.hpp"

namespace epic {

const char* to_string(BackendKind kind) noexcept { return kind == BackendKind::Http ? "http" : "mock"; }

BackendKind parse_backend_kind(std::string_view text) {
    if (text == "http") return BackendKind::Http;
    if (text == "mock") return BackendKind::Mock;
    throw Error(Errc::Config, "unknown backend kind '" + std::string(text) + "'");
}

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(Errc::Config, "endpoint must be an absolute URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string read_api_key() {
    const char* key = std::getenv(kApiKeyEnv);
    if (key == nullptr || *key == '\0') throw Error(Errc::AuthError, std::string(kApiKeyEnv) + " is not set");
    return key;
}

}  // namespace

HttpBackend::HttpBackend(BackendConfig config, LogSink log) : HttpBackend(config, read_api_key(), std::move(log)) {}

HttpBackend::HttpBackend(BackendConfig config, std::string api_key, LogSink log)
    : config_(std::move(config)), api_key_(std::move(api_key)), log_(std::move(log)) {
    if (config_.endpoint.empty() || config_.model.empty())
        throw Error(Errc::Config, "http backend needs endpoint and model");
    auto url = split_url(config_.endpoint);
    origin_ = std::move(url.origin);
    path_ = std::move(url.path);
}

std::string HttpBackend::request_body(std::string_view prompt_text) const {
    nlohmann::ordered_json body;
    body["model"] = config_.model;
    body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt_text}}});
    body["temperature"] = config_.temperature;
    body["max_tokens"] = config_.max_output_tokens;
    body["n"] = 1;
    if (!config_.stop.empty()) body["stop"] = config_.stop;
    return body.dump();
}

std::string extract_completion_text(std::string_view body) {
    try {
        auto doc = nlohmann::json::parse(body);
        const auto& choice = doc.at("choices").at(0);
        if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
        return choice.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        throw Error(Errc::MalformedResponse, std::string("unexpected completion body: ") + ex.what());
    }
}

CompletionResult HttpBackend::complete(const AssembledPrompt& prompt, std::uint64_t request_id) {
    httplib::Client client(origin_);
    client.set_connection_timeout(config_.request_timeout);
    client.set_read_timeout(config_.request_timeout);
    client.set_write_timeout(config_.request_timeout);

    const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    const std::string body = request_body(prompt.text);
    const auto started = std::chrono::steady_clock::now();
    auto delay = config_.backoff_initial;

    Errc last_code = Errc::Transport;
    std::string last_message;
    const std::size_t attempts = config_.retries + 1;
    for (std::size_t attempt = 1; attempt <= attempts; ++attempt) {
        auto res = client.Post(path_, headers, body, "application/json");
        auto log = [&](const std::string& what) {
            if (log_)
                log_("request " + std::to_string(request_id) + " attempt " + std::to_string(attempt) + "/" +
                     std::to_string(attempts) + " POST " + origin_ + path_ + " -> " + what);
        };

        std::chrono::milliseconds wait = delay;
        if (!res) {
            const auto err = res.error();
            last_code = (err == httplib::Error::Read || err == httplib::Error::Write ||
                         err == httplib::Error::ConnectionTimeout)
                            ? Errc::Timeout
                            : Errc::Transport;
            last_message = httplib::to_string(err);
            log(last_message);
        } else {
            const int status = res->status;
            log("HTTP " + std::to_string(status));
            if (status >= 200 && status < 300) {
                const auto latency =
                    std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
                return CompletionResult{extract_completion_text(res->body), latency, attempt};
            }
            if (status == 401 || status == 403)
                throw Error(Errc::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
            if (status == 429) {
                last_code = Errc::RateLimited;
                if (res->has_header("Retry-After")) {
                    const long seconds = std::strtol(res->get_header_value("Retry-After").c_str(), nullptr, 10);
                    if (seconds > 0) wait = std::min<std::chrono::milliseconds>(std::chrono::seconds(seconds), config_.backoff_max);
                }
            } else if (status >= 500) {
                last_code = Errc::Transport;
            } else {
                throw Error(Errc::MalformedResponse, "HTTP " + std::to_string(status) + " from endpoint");
            }
            last_message = "HTTP " + std::to_string(status);
        }

        if (attempt < attempts) {
            std::this_thread::sleep_for(wait);
            delay = std::min(delay * 2, config_.backoff_max);
        }
    }
    throw Error(last_code, last_message + " after " + std::to_string(attempts) + " attempts");
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, LogSink log) {
    if (config.kind == BackendKind::Mock) return std::make_unique<MockBackend>(config.mock);
    return std::make_unique<HttpBackend>(config, std::move(log));
}

}  // namespace epic
