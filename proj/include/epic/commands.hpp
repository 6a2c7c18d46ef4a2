#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace epic {

// Process exit statuses shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitDataError = 2,
    kExitBudgetExhausted = 3,
    kExitUsage = 64,
};

inline constexpr const char* kVersion = "0.1.0";

struct SplitArgs {
    std::filesystem::path input;
    std::string target;
    double ratio = 0.8;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
};

struct GenerateArgs {
    std::filesystem::path config;
    std::optional<std::filesystem::path> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_inferences;
};

struct MetricsArgs {
    std::filesystem::path real;
    std::filesystem::path synthetic;
    std::string target;
    std::filesystem::path output_dir = ".";
    bool export_csv = false;
};

struct AblateArgs {
    std::filesystem::path config;
    std::optional<std::filesystem::path> output_dir;
};

struct ToyArgs {
    std::size_t n_major = 900;
    std::size_t n_minor = 100;
    double noise = 0.1;
    std::uint64_t seed = 0;
    int decimals = -1;
    std::filesystem::path output_dir = ".";
};

// Each command writes its fixed-name outputs under the output directory and
// reports progress and errors on the given streams.
int cmd_split(const SplitArgs& args, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsArgs& args, std::ostream& out, std::ostream& err);
int cmd_ablate(const AblateArgs& args, std::ostream& out, std::ostream& err);
int cmd_toy(const ToyArgs& args, std::ostream& out, std::ostream& err);

}  // namespace epic
