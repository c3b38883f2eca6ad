#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "limas/cli.hpp"
#include "limas/error.hpp"

using namespace limas;
using namespace limas::cli;
using Json = nlohmann::ordered_json;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("limas_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

RunConfig example(const std::string& name, const std::string& out) {
    RunConfig c = parse_config(example_config(name));
    c.output_dir = scratch(out).string();
    return c;
}

ErrorCode parse_error(const Json& j) {
    try {
        parse_config(j);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidArgument;
}

const char* kInline = R"({
  "model": {"A": [[1.1, 0.1], [0.0, 0.9]], "Ap": [[0.0, 0.0], [0.0, 0.0]], "B": [0.0, 1.0],
            "g_p": {"n": 3, "edges": [[1, 2, 0.5], [2, 3]]}, "g_c": {"type": "complete", "n": 3, "weight": 0.5}},
  "tests": ["lp", "analytic"],
  "seed": 7,
  "sim": {"mode": "discrete", "steps": 50, "x0": [1, 0, 0, 1, 2, 0]},
  "output_dir": "x"
})";

}  // namespace

TEST_CASE("config round trip") {
    for (const char* name : {"supercap", "dcmg"}) {
        const auto c = parse_config(example_config(name));
        const Json once = to_json(c);
        CHECK(to_json(parse_config(once)) == once);
    }
    const auto c = parse_config(Json::parse(kInline));
    REQUIRE(c.inline_model.has_value());
    CHECK(c.inline_model->g_p.edges.size() == 2);
    CHECK(c.inline_model->g_p.edges[1] == Edge{1, 2, 1.0});
    CHECK(c.tests == std::vector<TestName>{TestName::LpSufficient, TestName::AnalyticSufficient});
    CHECK(c.seed == 7);
    const auto again = parse_config(to_json(c));
    CHECK(again.inline_model->a == c.inline_model->a);
    CHECK(again.inline_model->g_p == c.inline_model->g_p);
    CHECK(again.g_c == c.g_c);
    CHECK(*again.sim->x0 == *c.sim->x0);
    CHECK(to_json(again) == to_json(c));
}

TEST_CASE("bundled configs match gen-example") {
    for (const char* name : {"supercap", "dcmg"}) {
        std::ifstream in(std::filesystem::path(LIMAS_SOURCE_DIR) / "configs" / (std::string(name) + ".json"));
        REQUIRE(in.good());
        CHECK(Json::parse(in) == example_config(name));
    }
}

TEST_CASE("config validation") {
    auto j = example_config("dcmg");
    j["model"]["A"] = Json::array({Json::array({1.0})});
    CHECK(parse_error(j) == ErrorCode::ConfigParse);

    auto k = Json::parse(kInline);
    k["model"]["B"] = Json::array({1.0, 2.0, 3.0});
    CHECK(parse_error(k) == ErrorCode::ConfigParse);

    auto t = Json::parse(kInline);
    t["tests"] = Json::array({"lp", "nope"});
    CHECK(parse_error(t) == ErrorCode::ConfigParse);

    auto u = example_config("dcmg");
    u["extra"] = 1;
    CHECK(parse_error(u) == ErrorCode::ConfigParse);

    auto g = example_config("dcmg");
    g["model"]["g_c"] = "hexagon";
    CHECK(parse_error(g) == ErrorCode::ConfigParse);
}

TEST_CASE("seed override from the environment") {
    const auto path = scratch("seed.json");
    std::ofstream(path) << example_config("dcmg").dump();
    ::setenv("LIMAS_SEED", "99", 1);
    const auto c = load_config(path);
    ::unsetenv("LIMAS_SEED");
    CHECK(c.seed == 99);
    CHECK(load_config(path).seed == 42);
    CHECK(line_resistances(c) != line_resistances(load_config(path)));
}

TEST_CASE("builders from config") {
    const auto dc = example("dcmg", "b1");
    const auto r = line_resistances(dc);
    CHECK(r.size() == 8);
    for (double v : r) {
        CHECK(v >= 4.0);
        CHECK(v <= 8.0);
    }
    auto scaled = dc;
    scaled.builder->xi = 0.5;
    const auto r2 = line_resistances(scaled);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r2[i] == doctest::Approx(0.5 * r[i]));
    const auto m = build_model(dc);
    CHECK(m.lc()(0, 1) == doctest::Approx(-1.0 / 9.0));
    CHECK(build_model(example("supercap", "b2")).n_states() == 1);
}

TEST_CASE("analyze exit codes") {
    std::ostringstream out;
    auto sc = example("supercap", "a1");
    CHECK(cmd_analyze(sc, out) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(sc.output_dir) / "report.json"));

    auto dc = example("dcmg", "a2");
    CHECK(cmd_analyze(dc, out) == 0);
    std::ifstream rep(std::filesystem::path(dc.output_dir) / "report.json");
    const auto j = Json::parse(rep);
    CHECK(j.back()["test"] == "LpSufficient");
    CHECK(j.back()["gain"].size() == 3);

    auto star = example("dcmg", "a3");
    star.g_c = GraphSpec{"star", {}, {}, {}};
    CHECK(cmd_analyze(star, out) == 1);

    auto in = parse_config(Json::parse(kInline));
    in.output_dir = scratch("a4").string();
    CHECK(cmd_analyze(in, out) == 0);
}

TEST_CASE("simulate") {
    std::ostringstream out;
    auto sc = example("supercap", "s1");
    REQUIRE(cmd_simulate(sc, {}, out) == 0);
    std::ifstream sum(std::filesystem::path(sc.output_dir) / "summary.json");
    const auto j = Json::parse(sum);
    CHECK(j["final_consensus_error"].get<double>() < 1e-3);
    CHECK(std::filesystem::exists(std::filesystem::path(sc.output_dir) / "trace.csv"));

    GainSource bad;
    bad.gain = RowVector::Constant(1, 200.0);
    CHECK(cmd_simulate(example("supercap", "s2"), bad, out) == kExitDiverged);

    auto in = parse_config(Json::parse(kInline));
    in.output_dir = scratch("s3").string();
    CHECK(cmd_simulate(in, {}, out) == 0);
    GainSource wrong;
    wrong.gain = RowVector::Ones(3);
    CHECK_THROWS_AS(cmd_simulate(in, wrong, out), Error);

    CHECK(parse_gain("[-1.5, 2,3e-2]") == (RowVector(3) << -1.5, 2.0, 0.03).finished());
    CHECK_THROWS_AS(parse_gain("1,x"), Error);
}

TEST_CASE("sweeps") {
    const auto dc = example("dcmg", "w1");
    const auto topo = run_sweep(dc, "gc_topology", {"complete", "circle", "star"});
    REQUIRE(topo.rows.size() == 3);
    CHECK(topo.rows[0].verdict == Verdict::ConsensusableSufficient);
    CHECK(topo.rows[1].verdict == Verdict::NotConcluded);
    CHECK(topo.rows[2].verdict == Verdict::NotConcluded);

    SweepOptions opt;
    opt.draws = 10;
    const auto removal = run_sweep(dc, "edge_removal_count", {"2"}, opt);
    REQUIRE(removal.rows.size() == 10);
    bool some_infeasible = false;
    for (const auto& r : removal.rows) some_infeasible |= r.verdict != Verdict::ConsensusableSufficient;
    CHECK(some_infeasible);
    CHECK(run_sweep(dc, "edge_removal_count", {"2"}, opt).rows[3].margin == removal.rows[3].margin);

    SweepOptions bis;
    bis.bisect = true;
    const auto xi = run_sweep(dc, "xi", {"1.0", "0.1", "0.01"}, bis);
    REQUIRE(xi.threshold.has_value());
    CHECK(xi.threshold->first > 0.01);
    CHECK(xi.threshold->second < 0.1);
    CHECK(xi.threshold->second / xi.threshold->first < 1.0 + 1e-4);

    const auto seeds = run_sweep(dc, "seed", {"1", "2"});
    CHECK(seeds.rows.size() == 2);

    try {
        run_sweep(dc, "capacitance", {"1"});
        FAIL("expected UnknownParameter");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownParameter);
    }

    std::ostringstream csv;
    write_sweep_csv(topo, csv);
    CHECK(csv.str().rfind("value,draw,verdict,feasible,margin,delta_p,gamma_c\n", 0) == 0);
}
