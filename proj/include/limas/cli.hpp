#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "limas/consensus.hpp"
#include "limas/sim.hpp"

namespace limas::cli {

constexpr int kExitConfig = 64;
constexpr int kExitDiverged = 5;

/// Graph as written in a config. kind is explicit, benchmark, complete,
/// circle, star or path; n and weight are optional for generators.
struct GraphSpec {
    std::string kind = "explicit";
    std::optional<std::size_t> n;
    std::optional<double> weight;
    std::vector<Edge> edges;  // 0-based here, 1-based in JSON

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

/// Named builder parameters. Only the fields of the selected builder are
/// serialized.
struct BuilderSpec {
    std::string name;  // supercap | dcmg
    SupercapParams supercap;
    DcmgParams dcmg;
    std::optional<std::vector<double>> line_resistances;
    std::pair<double, double> line_resistance_range{0.0, 0.0};
    double xi = 1.0;
};

struct InlineModel {
    Matrix a;
    Matrix ap;
    Vector b;
    GraphSpec g_p;
};

struct SimSpec {
    std::string mode;  // continuous | discrete
    double t_end = 1.0;
    std::optional<double> dt;  // sample_time / 10 when absent
    int steps = 100;
    int record_every = 1;
    std::optional<Vector> x0;  // random when absent
    std::optional<RowVector> gain;
};

struct RunConfig {
    std::optional<BuilderSpec> builder;
    std::optional<InlineModel> inline_model;
    std::optional<GraphSpec> g_p;  // builder topology override
    GraphSpec g_c;
    std::vector<TestName> tests = default_test_order();
    std::uint64_t seed = 42;
    std::optional<SimSpec> sim;
    std::string output_dir = "out";
};

/// Throws Error(ConfigParse) on malformed input.
RunConfig parse_config(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const RunConfig& c);

/// Reads and parses a config file, then applies LIMAS_SEED when set.
RunConfig load_config(const std::filesystem::path& path);

WeightedGraph build_graph(const GraphSpec& g, std::size_t default_n);
std::vector<double> line_resistances(const RunConfig& c);
LimasModel build_model(const RunConfig& c);

/// Bundled case-study configs: supercap, dcmg.
nlohmann::ordered_json example_config(const std::string& name);

int cmd_analyze(const RunConfig& c, std::ostream& out);

struct GainSource {
    std::optional<RowVector> gain;
    std::optional<std::filesystem::path> gain_file;
};

/// Parses "k1,k2,..." or "[k1, k2, ...]".
RowVector parse_gain(const std::string& text);

/// First gain found in a report.json array.
std::optional<RowVector> gain_from_report(const std::filesystem::path& path);

int cmd_simulate(const RunConfig& c, const GainSource& src, std::ostream& out);

struct SweepOptions {
    bool bisect = false;
    int bisect_steps = 20;
    int draws = 1;  // edge_removal_count draws per value
};

struct SweepRow {
    std::string value;
    int draw = 0;
    Verdict verdict = Verdict::NotConcluded;
    std::optional<double> margin;
    std::optional<double> delta_p;
    std::optional<double> gamma_c;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<std::pair<double, double>> threshold;  // (infeasible, feasible) xi bracket
};

/// Parameters: xi, gc_topology, edge_removal_count, seed. Throws
/// UnknownParameter otherwise.
SweepResult run_sweep(const RunConfig& c, const std::string& param, const std::vector<std::string>& values,
                      const SweepOptions& opt = {});
/// Bisects xi between a feasible `hi` and an infeasible `lo` (geometric
/// midpoints) and returns the final (infeasible, feasible) bracket.
std::pair<double, double> xi_threshold(const RunConfig& c, double lo, double hi, int steps = 20);

void write_sweep_csv(const SweepResult& r, std::ostream& out);

int cmd_sweep(const RunConfig& c, const std::string& param, const std::vector<std::string>& values,
              const SweepOptions& opt, std::ostream& out);

}  // namespace limas::cli
