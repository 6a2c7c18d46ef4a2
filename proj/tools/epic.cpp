// Command-line front end: split | generate | metrics | ablate | toy.

#include <iostream>

#include <CLI11.hpp>

#include "epic/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"In-context synthetic tabular data generation"};
    app.set_version_flag("--version", epic::kVersion);
    app.require_subcommand(1);

    epic::SplitArgs split;
    auto* split_cmd = app.add_subcommand("split", "Deduplicate a CSV and split it into train/test");
    split_cmd->add_option("--input", split.input, "Source CSV")->required();
    split_cmd->add_option("--target", split.target, "Target class column")->required();
    split_cmd->add_option("--ratio", split.ratio, "Training fraction")->capture_default_str();
    split_cmd->add_option("--seed", split.seed, "Random seed")->required();
    split_cmd->add_option("--output-dir", split.output_dir, "Output directory")->capture_default_str();

    epic::GenerateArgs generate;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("generate", "Run the generation loop from a JSON config");
    gen_cmd->add_option("--config", generate.config, "Run config (JSON)")->required();
    auto* gen_out_opt = gen_cmd->add_option("--output-dir", gen_out, "Override output_dir");
    std::uint64_t gen_seed = 0;
    auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Override seed");
    std::size_t gen_budget = 0;
    auto* gen_budget_opt = gen_cmd->add_option("--max-inferences", gen_budget, "Override inference budget");

    epic::MetricsArgs metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "Fidelity report for real vs synthetic tables");
    metrics_cmd->add_option("--real", metrics.real, "Real CSV")->required();
    metrics_cmd->add_option("--synthetic", metrics.synthetic, "Synthetic CSV")->required();
    metrics_cmd->add_option("--target", metrics.target, "Target class column")->required();
    metrics_cmd->add_option("--output-dir", metrics.output_dir, "Output directory")->capture_default_str();
    metrics_cmd->add_flag("--export-csv", metrics.export_csv, "Also write each matrix as CSV");

    epic::AblateArgs ablate;
    std::string ablate_out;
    auto* ablate_cmd = app.add_subcommand("ablate", "Efficiency sweep over prompt variants");
    ablate_cmd->add_option("--config", ablate.config, "Ablation config (JSON)")->required();
    auto* ablate_out_opt = ablate_cmd->add_option("--output-dir", ablate_out, "Override output_dir");

    epic::ToyArgs toy;
    auto* toy_cmd = app.add_subcommand("toy", "Write the imbalanced toy dataset");
    toy_cmd->add_option("--n-major", toy.n_major, "Majority rows")->capture_default_str();
    toy_cmd->add_option("--n-minor", toy.n_minor, "Minority rows")->capture_default_str();
    toy_cmd->add_option("--noise", toy.noise, "Gaussian noise std")->capture_default_str();
    toy_cmd->add_option("--seed", toy.seed, "Random seed")->required();
    toy_cmd->add_option("--decimals", toy.decimals, "Fixed decimals (-1 for shortest round-trip)")->capture_default_str();
    toy_cmd->add_option("--output-dir", toy.output_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return epic::kExitUsage;
    }

    if (*split_cmd) return epic::cmd_split(split, std::cout, std::cerr);
    if (*gen_cmd) {
        if (*gen_out_opt) generate.output_dir = gen_out;
        if (*gen_seed_opt) generate.seed = gen_seed;
        if (*gen_budget_opt) generate.max_inferences = gen_budget;
        return epic::cmd_generate(generate, std::cout, std::cerr);
    }
    if (*metrics_cmd) return epic::cmd_metrics(metrics, std::cout, std::cerr);
    if (*ablate_cmd) {
        if (*ablate_out_opt) ablate.output_dir = ablate_out;
        return epic::cmd_ablate(ablate, std::cout, std::cerr);
    }
    if (*toy_cmd) return epic::cmd_toy(toy, std::cout, std::cerr);
    return epic::kExitUsage;
}
