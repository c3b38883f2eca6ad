#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "limas/cli.hpp"
#include "limas/error.hpp"

namespace {

int config_error(const std::string& what) {
    std::cerr << "limas: " << what << '\n';
    return limas::cli::kExitConfig;
}

std::vector<std::string> split_values(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto tok = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!tok.empty()) out.push_back(tok);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"limas: consensus design for linear interconnected multi-agent systems"};
    app.require_subcommand(1);
    std::string output_dir;
    app.add_option("--output-dir", output_dir, "Override the config output_dir");

    std::string cfg_path;
    auto* analyze = app.add_subcommand("analyze", "Run the consensusability tests and write report.json");
    analyze->add_option("config", cfg_path, "Run config (JSON)")->required();

    std::string gain_text, gain_file;
    auto* simulate = app.add_subcommand("simulate", "Simulate the closed loop and write trace.csv");
    simulate->add_option("config", cfg_path, "Run config (JSON)")->required();
    auto* gain_opt = simulate->add_option("--gain", gain_text, "Explicit gain, comma separated");
    simulate->add_option("--gain-file", gain_file, "report.json to take the gain from")->excludes(gain_opt);

    std::string param, values;
    limas::cli::SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and tabulate verdicts");
    sweep->add_option("config", cfg_path, "Run config (JSON)")->required();
    sweep->add_option("--param", param, "xi | gc_topology | edge_removal_count | seed")->required();
    sweep->add_option("--values", values, "Comma separated values")->required();
    sweep->add_flag("--bisect", sweep_opt.bisect, "Bisect the xi feasibility threshold");
    sweep->add_option("--bisect-steps", sweep_opt.bisect_steps, "Bisection steps")->check(CLI::PositiveNumber);
    sweep->add_option("--draws", sweep_opt.draws, "Removal draws per edge_removal_count value")->check(CLI::PositiveNumber);

    std::string example;
    auto* gen = app.add_subcommand("gen-example", "Print a bundled case-study config");
    gen->add_option("name", example, "supercap | dcmg")->required()->check(CLI::IsMember({"supercap", "dcmg"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : limas::cli::kExitConfig;
    }

    try {
        if (gen->parsed()) {
            std::cout << limas::cli::example_config(example).dump(2) << '\n';
            return 0;
        }
        auto cfg = limas::cli::load_config(cfg_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (analyze->parsed()) return limas::cli::cmd_analyze(cfg, std::cout);
        if (simulate->parsed()) {
            limas::cli::GainSource src;
            if (!gain_text.empty()) src.gain = limas::cli::parse_gain(gain_text);
            if (!gain_file.empty()) src.gain_file = gain_file;
            return limas::cli::cmd_simulate(cfg, src, std::cout);
        }
        return limas::cli::cmd_sweep(cfg, param, split_values(values), sweep_opt, std::cout);
    } catch (const limas::Error& e) {
        using limas::ErrorCode;
        switch (e.code()) {
            case ErrorCode::ConfigParse:
            case ErrorCode::UnknownParameter:
            case ErrorCode::InvalidArgument:
            case ErrorCode::InvalidGraph:
            case ErrorCode::DimensionMismatch:
            case ErrorCode::CyberGraphDisconnected:
                return config_error(e.what());
            default:
                std::cerr << "limas: " << e.what() << '\n';
                return 70;
        }
    } catch (const std::exception& e) {
        std::cerr << "limas: " << e.what() << '\n';
        return 70;
    }
}
