#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "epic/prompt.hpp"

namespace epic {

enum class BackendKind { Http, Mock };

const char* to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view text);

struct MockConfig {
    std::uint64_t seed = 0;
    // Numeric noise scale as a fraction of the group's column std; also the
    // per-cell probability of resampling a categorical cell.
    double numeric_jitter = 0.05;
    double failure_rate = 0.0;
    std::size_t rows_per_group = 3;
    // Request ids that always fail, for scripted efficiency runs.
    std::vector<std::uint64_t> fail_on;
};

struct BackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string endpoint;  // full URL of a chat-completions route
    std::string model;
    double temperature = 1.0;
    std::size_t max_output_tokens = 2048;
    std::chrono::milliseconds request_timeout{60'000};
    std::size_t retries = 3;
    std::size_t concurrency_limit = 1;
    std::chrono::milliseconds backoff_initial{500};
    std::chrono::milliseconds backoff_max{16'000};
    std::vector<std::string> stop;
    MockConfig mock;
};

inline constexpr const char* kApiKeyEnv = "EPIC_API_KEY";

struct CompletionResult {
    std::string text;
    std::chrono::milliseconds latency{0};
    std::size_t attempt_count = 1;
};

using LogSink = std::function<void(std::string_view)>;

class Backend {
public:
    virtual ~Backend() = default;
    // Safe to call from several threads at once.
    virtual CompletionResult complete(const AssembledPrompt& prompt, std::uint64_t request_id) = 0;
};

class MockBackend final : public Backend {
public:
    explicit MockBackend(MockConfig config) : config_(std::move(config)) {}
    CompletionResult complete(const AssembledPrompt& prompt, std::uint64_t request_id) override;

private:
    MockConfig config_;
};

// Posts the prompt as a single user message. The credential is read from
// EPIC_API_KEY at construction and is never written to the log sink.
class HttpBackend final : public Backend {
public:
    HttpBackend(BackendConfig config, LogSink log = {});
    HttpBackend(BackendConfig config, std::string api_key, LogSink log = {});
    CompletionResult complete(const AssembledPrompt& prompt, std::uint64_t request_id) override;

    // Request body for one prompt, without credentials.
    std::string request_body(std::string_view prompt_text) const;

private:
    BackendConfig config_;
    std::string api_key_;
    LogSink log_;
    std::string origin_;
    std::string path_;
};

// Text of the first choice in a chat-completions response body.
std::string extract_completion_text(std::string_view body);

// Deterministic stand-in for a model: continues the prompt with one new set
// built from the prompt's own examples.
std::string mock_completion(const AssembledPrompt& prompt, const MockConfig& config, std::uint64_t request_id);

std::unique_ptr<Backend> make_backend(const BackendConfig& config, LogSink log = {});

}  // namespace epic
