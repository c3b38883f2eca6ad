#include "limas/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "limas/error.hpp"
#include "limas/random.hpp"
#include "limas/report_json.hpp"

namespace limas::cli {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigParse, what); }

double get_number(const Json& j, const std::string& key) {
    if (!j.is_number()) bad(key + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(key + " must be finite");
    return v;
}

std::vector<double> get_numbers(const Json& j, const std::string& key) {
    if (!j.is_array()) bad(key + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_number(v, key));
    return out;
}

Matrix get_matrix(const Json& j, const std::string& key) {
    if (!j.is_array() || j.empty()) bad(key + " must be a non-empty nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row = get_numbers(j[static_cast<std::size_t>(r)], key);
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            bad(key + " rows have different lengths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
}

Vector get_vector(const Json& j, const std::string& key) {
    if (!j.is_array()) bad(key + " must be an array");
    if (!j.empty() && j[0].is_array()) {
        const Matrix m = get_matrix(j, key);
        if (m.cols() != 1) bad(key + " must be a column");
        return m.col(0);
    }
    const auto v = get_numbers(j, key);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json matrix_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

template <class V>
Json vector_json(const V& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, _] : j.items()) {
        if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
    }
}

const std::set<std::string> kGraphKinds = {"explicit", "benchmark", "complete", "circle", "star", "path"};

GraphSpec parse_graph(const Json& j, const std::string& key) {
    GraphSpec g;
    if (j.is_string()) {
        g.kind = j.get<std::string>();
        if (g.kind == "explicit" || !kGraphKinds.count(g.kind)) bad(key + ": unknown topology '" + g.kind + "'");
        return g;
    }
    if (!j.is_object()) bad(key + " must be a topology name or an object");
    if (j.contains("type")) {
        check_keys(j, {"type", "n", "weight"}, key);
        if (!j["type"].is_string()) bad(key + ".type must be a string");
        g.kind = j["type"].get<std::string>();
        if (g.kind == "explicit" || !kGraphKinds.count(g.kind)) bad(key + ": unknown topology '" + g.kind + "'");
    } else {
        check_keys(j, {"n", "edges"}, key);
        if (!j.contains("n") || !j.contains("edges")) bad(key + " needs n and edges");
        if (!j["edges"].is_array()) bad(key + ".edges must be an array");
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) bad(key + " edges are [i, j] or [i, j, w]");
            if (!e[0].is_number_unsigned() || !e[1].is_number_unsigned()) bad(key + " edge endpoints are 1-based integers");
            const auto i = e[0].get<std::size_t>(), jj = e[1].get<std::size_t>();
            if (i < 1 || jj < 1) bad(key + " edge endpoints are 1-based");
            g.edges.push_back({i - 1, jj - 1, e.size() == 3 ? get_number(e[2], key + " weight") : 1.0});
        }
    }
    if (j.contains("n")) {
        if (!j["n"].is_number_unsigned()) bad(key + ".n must be a positive integer");
        g.n = j["n"].get<std::size_t>();
    }
    if (j.contains("weight")) g.weight = get_number(j["weight"], key + ".weight");
    return g;
}

Json graph_json(const GraphSpec& g) {
    if (g.kind == "explicit") {
        Json edges = Json::array();
        for (const auto& e : g.edges) edges.push_back(Json::array({e.i + 1, e.j + 1, e.weight}));
        return Json{{"n", g.n.value_or(0)}, {"edges", edges}};
    }
    if (!g.n && !g.weight) return g.kind;
    Json out{{"type", g.kind}};
    if (g.n) out["n"] = *g.n;
    if (g.weight) out["weight"] = *g.weight;
    return out;
}

GraphSpec explicit_spec(const WeightedGraph& g) {
    GraphSpec s;
    s.n = g.n_nodes();
    s.edges = g.edges();
    return s;
}

BuilderSpec parse_builder(const std::string& name, const Json& params) {
    BuilderSpec b;
    b.name = name;
    if (!params.is_object()) bad("model.params must be an object");
    auto num = [&](const char* key, double& dst) {
        if (params.contains(key)) dst = get_number(params[key], std::string("params.") + key);
    };
    if (name == "supercap") {
        check_keys(params, {"capacitance", "leak_resistance", "sample_time", "gain", "line_resistances",
                            "line_resistance_range", "xi"},
                   "supercap params");
        b.line_resistance_range = {10.0, 50.0};
        num("capacitance", b.supercap.capacitance);
        num("leak_resistance", b.supercap.leak_resistance);
        num("sample_time", b.supercap.sample_time);
        num("gain", b.supercap.gain);
    } else if (name == "dcmg") {
        check_keys(params, {"rt", "ct", "lt", "rl", "k_pr", "v_ref", "sample_time", "line_resistances",
                            "line_resistance_range", "xi"},
                   "dcmg params");
        b.line_resistance_range = {4.0, 8.0};
        num("rt", b.dcmg.rt);
        num("ct", b.dcmg.ct);
        num("lt", b.dcmg.lt);
        num("rl", b.dcmg.rl);
        num("v_ref", b.dcmg.v_ref);
        num("sample_time", b.dcmg.sample_time);
        if (params.contains("k_pr")) {
            b.dcmg.k_pr = get_vector(params["k_pr"], "params.k_pr");
            if (b.dcmg.k_pr.size() != 3) bad("params.k_pr must have three entries");
        }
    } else {
        bad("unknown builder '" + name + "' (expected supercap or dcmg)");
    }
    if (params.contains("line_resistances")) b.line_resistances = get_numbers(params["line_resistances"], "line_resistances");
    if (params.contains("line_resistance_range")) {
        const auto r = get_numbers(params["line_resistance_range"], "line_resistance_range");
        if (r.size() != 2 || !(r[0] > 0.0) || !(r[1] >= r[0])) bad("line_resistance_range must be [lo, hi] with 0 < lo <= hi");
        b.line_resistance_range = {r[0], r[1]};
    }
    num("xi", b.xi);
    if (!(b.xi > 0.0)) bad("xi must be positive");
    return b;
}

Json builder_params_json(const BuilderSpec& b) {
    Json p;
    if (b.name == "supercap") {
        p["capacitance"] = b.supercap.capacitance;
        p["leak_resistance"] = b.supercap.leak_resistance;
        p["sample_time"] = b.supercap.sample_time;
        p["gain"] = b.supercap.gain;
    } else {
        p["rt"] = b.dcmg.rt;
        p["ct"] = b.dcmg.ct;
        p["lt"] = b.dcmg.lt;
        p["rl"] = b.dcmg.rl;
        p["k_pr"] = vector_json(b.dcmg.k_pr);
        p["v_ref"] = b.dcmg.v_ref;
        p["sample_time"] = b.dcmg.sample_time;
    }
    if (b.line_resistances) p["line_resistances"] = *b.line_resistances;
    p["line_resistance_range"] = Json::array({b.line_resistance_range.first, b.line_resistance_range.second});
    p["xi"] = b.xi;
    return p;
}

SimSpec parse_sim(const Json& j) {
    if (!j.is_object()) bad("sim must be an object");
    check_keys(j, {"mode", "t_end", "dt", "steps", "record_every", "x0", "gain"}, "sim");
    SimSpec s;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) bad("sim.mode must be a string");
        s.mode = j["mode"].get<std::string>();
        if (s.mode != "continuous" && s.mode != "discrete") bad("sim.mode must be continuous or discrete");
    }
    if (j.contains("t_end")) s.t_end = get_number(j["t_end"], "sim.t_end");
    if (j.contains("dt")) s.dt = get_number(j["dt"], "sim.dt");
    auto positive_int = [&](const char* key, int& dst) {
        if (!j.contains(key)) return;
        if (!j[key].is_number_integer() || j[key].get<long long>() < 1) bad(std::string("sim.") + key + " must be a positive integer");
        dst = j[key].get<int>();
    };
    positive_int("steps", s.steps);
    positive_int("record_every", s.record_every);
    if (j.contains("x0")) {
        if (j["x0"].is_string()) {
            if (j["x0"].get<std::string>() != "random") bad("sim.x0 must be \"random\" or an array");
        } else {
            s.x0 = get_vector(j["x0"], "sim.x0");
        }
    }
    if (j.contains("gain")) s.gain = get_vector(j["gain"], "sim.gain").transpose();
    return s;
}

Json sim_json(const SimSpec& s) {
    Json j;
    if (!s.mode.empty()) j["mode"] = s.mode;
    j["t_end"] = s.t_end;
    if (s.dt) j["dt"] = *s.dt;
    j["steps"] = s.steps;
    j["record_every"] = s.record_every;
    j["x0"] = s.x0 ? vector_json(*s.x0) : Json("random");
    if (s.gain) j["gain"] = vector_json(*s.gain);
    return j;
}

std::filesystem::path prepare_output(const RunConfig& c) {
    const std::filesystem::path dir(c.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string fmt(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", round_significant(x));
    return buf;
}

std::string fmt_gain(const RowVector& k) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < k.size(); ++i) s += (i ? ", " : "") + fmt(k[i]);
    return s + "]";
}

WeightedGraph builder_topology(const RunConfig& c) {
    if (c.g_p) return build_graph(*c.g_p, 9);
    return c.builder->name == "supercap" ? supercap_physical_topology() : dcmg_physical_topology();
}

}  // namespace

RunConfig parse_config(const Json& j) {
    if (!j.is_object()) bad("config must be a JSON object");
    check_keys(j, {"model", "tests", "seed", "sim", "output_dir"}, "config");
    if (!j.contains("model") || !j["model"].is_object()) bad("config needs a model object");
    const Json& m = j["model"];
    RunConfig c;
    if (m.contains("builder")) {
        check_keys(m, {"builder", "params", "g_p", "g_c"}, "model");
        if (!m["builder"].is_string()) bad("model.builder must be a string");
        c.builder = parse_builder(m["builder"].get<std::string>(), m.value("params", Json::object()));
        if (m.contains("g_p")) c.g_p = parse_graph(m["g_p"], "model.g_p");
        c.g_c = m.contains("g_c") ? parse_graph(m["g_c"], "model.g_c")
                                  : GraphSpec{c.builder->name == "supercap" ? "benchmark" : "complete", {}, {}, {}};
    } else {
        check_keys(m, {"A", "Ap", "B", "g_p", "g_c"}, "model");
        for (const char* key : {"A", "Ap", "B", "g_p", "g_c"})
            if (!m.contains(key)) bad(std::string("inline model needs ") + key);
        InlineModel im;
        im.a = get_matrix(m["A"], "A");
        im.ap = get_matrix(m["Ap"], "Ap");
        im.b = get_vector(m["B"], "B");
        const auto n = im.a.rows();
        if (im.a.cols() != n || im.ap.rows() != n || im.ap.cols() != n || im.b.size() != n) {
            bad("inline A, Ap must be n x n and B must have n entries");
        }
        im.g_p = parse_graph(m["g_p"], "model.g_p");
        if (!im.g_p.n) bad("inline model.g_p needs n");
        c.inline_model = std::move(im);
        c.g_c = parse_graph(m["g_c"], "model.g_c");
    }
    if (j.contains("tests")) {
        if (!j["tests"].is_array() || j["tests"].empty()) bad("tests must be a non-empty array");
        c.tests.clear();
        for (const auto& t : j["tests"]) {
            if (!t.is_string()) bad("test names must be strings");
            const auto name = parse_test_name(t.get<std::string>());
            if (!name) bad("unknown test '" + t.get<std::string>() + "'");
            c.tests.push_back(*name);
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) bad("seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("sim")) c.sim = parse_sim(j["sim"]);
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) bad("output_dir must be a string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    return c;
}

Json to_json(const RunConfig& c) {
    Json model;
    if (c.builder) {
        model["builder"] = c.builder->name;
        model["params"] = builder_params_json(*c.builder);
        if (c.g_p) model["g_p"] = graph_json(*c.g_p);
    } else if (c.inline_model) {
        model["A"] = matrix_json(c.inline_model->a);
        model["Ap"] = matrix_json(c.inline_model->ap);
        model["B"] = vector_json(c.inline_model->b);
        model["g_p"] = graph_json(c.inline_model->g_p);
    }
    model["g_c"] = graph_json(c.g_c);
    Json tests = Json::array();
    for (auto t : c.tests) tests.push_back(std::string(to_string(t)));
    Json j{{"model", model}, {"tests", tests}, {"seed", c.seed}};
    if (c.sim) j["sim"] = sim_json(*c.sim);
    j["output_dir"] = c.output_dir;
    return j;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        bad(path.string() + ": " + e.what());
    }
    RunConfig c = parse_config(j);
    if (const char* env = std::getenv("LIMAS_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || env[0] == '-') bad("LIMAS_SEED must be a non-negative integer");
        c.seed = v;
    }
    return c;
}

WeightedGraph build_graph(const GraphSpec& g, std::size_t default_n) {
    const std::size_t n = g.n.value_or(default_n);
    if (g.kind == "explicit") return WeightedGraph(n, g.edges);
    if (g.kind == "benchmark") {
        if (n != 9) throw Error(ErrorCode::ConfigParse, "benchmark cyber topology has 9 agents");
        return supercap_cyber_topology();
    }
    if (g.kind == "complete") return complete_graph(n, g.weight.value_or(1.0 / static_cast<double>(n)));
    if (g.kind == "circle") return circle_graph(n, g.weight.value_or(1.0));
    if (g.kind == "star") return star_graph(n, g.weight.value_or(1.0));
    if (g.kind == "path") return path_graph(n, g.weight.value_or(1.0));
    throw Error(ErrorCode::ConfigParse, "unknown topology '" + g.kind + "'");
}

std::vector<double> line_resistances(const RunConfig& c) {
    if (!c.builder) throw Error(ErrorCode::ConfigParse, "line resistances need a named builder");
    const auto topo = builder_topology(c);
    std::vector<double> r;
    if (c.builder->line_resistances) {
        r = *c.builder->line_resistances;
        if (r.size() != topo.n_edges()) throw Error(ErrorCode::ConfigParse, "need one line resistance per physical edge");
    } else {
        r = draw_uniform(c.seed, "line_resistances", topo.n_edges(), c.builder->line_resistance_range.first,
                         c.builder->line_resistance_range.second);
    }
    for (auto& v : r) v *= c.builder->xi;
    return r;
}

LimasModel build_model(const RunConfig& c) {
    if (c.builder) {
        const auto topo = builder_topology(c);
        const auto g_c = build_graph(c.g_c, topo.n_nodes());
        if (c.builder->name == "supercap") {
            SupercapParams p = c.builder->supercap;
            p.line_resistances = line_resistances(c);
            return build_supercap(p, topo, g_c);
        }
        DcmgParams p = c.builder->dcmg;
        p.line_resistances = line_resistances(c);
        return build_dcmg(p, topo, g_c);
    }
    if (!c.inline_model) throw Error(ErrorCode::ConfigParse, "config has no model");
    const auto& im = *c.inline_model;
    const auto g_p = build_graph(im.g_p, *im.g_p.n);
    return LimasModel(im.a, im.ap, im.b, g_p, build_graph(c.g_c, g_p.n_nodes()));
}

Json example_config(const std::string& name) {
    if (name == "supercap") {
        return Json::parse(R"({
  "model": {
    "builder": "supercap",
    "params": {"capacitance": 10.0, "leak_resistance": 5000.0, "sample_time": 0.0001, "gain": -200.0,
               "line_resistance_range": [10.0, 50.0], "xi": 1.0},
    "g_c": "benchmark"
  },
  "tests": ["Necessary", "ScalarS1S2", "LpSufficient", "AnalyticSufficient"],
  "seed": 42,
  "sim": {"mode": "continuous", "t_end": 5.0, "dt": 1e-05, "record_every": 1000, "x0": "random"},
  "output_dir": "out/supercap"
})");
    }
    if (name == "dcmg") {
        return Json::parse(R"({
  "model": {
    "builder": "dcmg",
    "params": {"rt": 0.2, "ct": 0.0022, "lt": 0.0018, "rl": 9.0, "k_pr": [-2.13, -0.16, 13.55], "v_ref": 48.0,
               "sample_time": 0.0001, "line_resistance_range": [4.0, 8.0], "xi": 1.0},
    "g_c": "complete"
  },
  "tests": ["Necessary", "ScalarS1S2", "LpSufficient", "AnalyticSufficient"],
  "seed": 42,
  "sim": {"mode": "continuous", "t_end": 2.0, "dt": 1e-05, "record_every": 1000, "x0": "random"},
  "output_dir": "out/dcmg"
})");
    }
    throw Error(ErrorCode::InvalidArgument, "unknown example '" + name + "' (expected supercap or dcmg)");
}

int cmd_analyze(const RunConfig& c, std::ostream& out) {
    const LimasModel m = build_model(c);
    const DesignResult res = design_gain(m, c.tests);
    const auto dir = prepare_output(c);
    std::ofstream f(dir / "report.json");
    f << limas::to_json(res.reports).dump(2) << '\n';
    if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + (dir / "report.json").string());
    for (const auto& r : res.reports) out << to_string(r.test) << ": " << to_string(r.verdict) << '\n';
    out << "verdict: " << to_string(res.summary.verdict) << '\n';
    if (res.summary.gain) out << "gain: " << fmt_gain(*res.summary.gain) << '\n';
    if (!res.summary.message.empty()) out << "message: " << res.summary.message << '\n';
    return exit_code(res.summary.verdict);
}

RowVector parse_gain(const std::string& text) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    s.erase(std::remove_if(s.begin(), s.end(), [](char ch) { return ch == '[' || ch == ']'; }), s.end());
    std::istringstream in(s);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size() || !std::isfinite(x)) bad("cannot parse gain entry '" + tok + "'");
        v.push_back(x);
    }
    if (v.empty()) bad("empty gain");
    return Eigen::Map<const RowVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::optional<RowVector> gain_from_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        bad(path.string() + ": " + e.what());
    }
    const Json arr = j.is_array() ? j : Json::array({j});
    for (const auto& r : arr) {
        if (r.is_object() && r.contains("gain") && r["gain"].is_array()) {
            return get_vector(r["gain"], "gain").transpose();
        }
    }
    return std::nullopt;
}

int cmd_simulate(const RunConfig& c, const GainSource& src, std::ostream& out) {
    const LimasModel m = build_model(c);
    const SimSpec s = c.sim.value_or(SimSpec{});
    std::optional<RowVector> k = src.gain;
    if (!k && src.gain_file) {
        k = gain_from_report(*src.gain_file);
        if (!k) bad(src.gain_file->string() + " holds no gain");
    }
    if (!k) k = s.gain;
    if (!k && c.builder && c.builder->name == "supercap") k = RowVector::Constant(1, c.builder->supercap.gain);
    if (!k) {
        const auto res = design_gain(m, c.tests);
        if (!res.summary.gain) {
            out << "no gain available: " << to_string(res.summary.verdict) << '\n';
            return exit_code(res.summary.verdict);
        }
        k = res.summary.gain;
    }
    if (k->size() != m.n_states()) bad("gain must have " + std::to_string(m.n_states()) + " entries");

    const auto N = m.n_agents(), n = m.n_states();
    const std::string mode = !s.mode.empty() ? s.mode : (c.builder ? "continuous" : "discrete");
    Vector x0;
    if (s.x0) {
        x0 = *s.x0;
        if (x0.size() != N * n) bad("sim.x0 must have N*n entries");
    } else if (c.builder && c.builder->name == "supercap") {
        x0 = supercap_initial_state(c.seed, static_cast<std::size_t>(N));
    } else if (c.builder) {
        x0 = dcmg_initial_state(c.seed, static_cast<std::size_t>(N));
    } else {
        const auto v = draw_uniform(c.seed, "x0", static_cast<std::size_t>(N * n), -1.0, 1.0);
        x0 = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    SimulationTrace tr;
    try {
        if (mode == "continuous") {
            if (!c.builder) bad("continuous simulation needs a named builder");
            const auto topo = builder_topology(c);
            const auto g_c = build_graph(c.g_c, topo.n_nodes());
            if (c.builder->name == "supercap") {
                SupercapParams p = c.builder->supercap;
                p.line_resistances = line_resistances(c);
                const double dt = s.dt.value_or(p.sample_time / 10.0);
                tr = simulate_continuous(supercap_field(p, topo, g_c, (*k)[0]), x0, s.t_end, dt, N, n, s.record_every);
            } else {
                DcmgParams p = c.builder->dcmg;
                p.line_resistances = line_resistances(c);
                const double dt = s.dt.value_or(p.sample_time / 10.0);
                tr = simulate_continuous(dcmg_field(p, topo, g_c, *k), x0, s.t_end, dt, N, n, s.record_every);
            }
        } else {
            tr = simulate_discrete(m, *k, x0, s.steps, s.record_every);
            for (std::size_t i = 0; i < tr.states.size(); ++i) {
                if (!tr.states[i].allFinite() || tr.states[i].cwiseAbs().maxCoeff() > kDivergenceBound) {
                    throw Error(ErrorCode::NonFiniteState, "state diverged at step " + fmt(tr.times[i]));
                }
            }
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonFiniteState) throw;
        out << "diverged: " << e.what() << '\n';
        return kExitDiverged;
    }

    const auto dir = prepare_output(c);
    {
        std::ofstream f(dir / "trace.csv");
        write_trace_csv(tr, f);
    }
    Json summary{{"mode", mode},
                 {"gain", vector_json(*k)},
                 {"samples", tr.times.size()},
                 {"t_final", round_significant(tr.times.back())},
                 {"initial_consensus_error", round_significant(tr.consensus_error.front())},
                 {"final_consensus_error", round_significant(tr.consensus_error.back())},
                 {"initial_average", vector_json(tr.average_state.front().unaryExpr([](double v) { return round_significant(v); }))},
                 {"final_average", vector_json(tr.average_state.back().unaryExpr([](double v) { return round_significant(v); }))}};
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    out << "gain: " << fmt_gain(*k) << '\n';
    out << "initial consensus_error: " << fmt(tr.consensus_error.front()) << '\n';
    out << "final consensus_error: " << fmt(tr.consensus_error.back()) << '\n';
    return 0;
}

namespace {

SweepRow evaluate(const RunConfig& c, std::string value, int draw) {
    SweepRow row;
    row.value = std::move(value);
    row.draw = draw;
    const auto res = design_gain(build_model(c), c.tests);
    row.verdict = res.summary.verdict;
    for (const auto& r : res.reports) {
        if (r.test == TestName::LpSufficient && r.margin) row.margin = r.margin;
        if (!row.delta_p && r.delta_p) row.delta_p = r.delta_p;
        if (!row.gamma_c && r.gamma_c) row.gamma_c = r.gamma_c;
    }
    if (!row.margin) row.margin = res.summary.margin;
    return row;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    bad("cannot parse number '" + s + "'");
}

RunConfig with_xi(const RunConfig& c, double xi) {
    if (!c.builder) throw Error(ErrorCode::ConfigParse, "xi sweep needs a named builder");
    if (!(xi > 0.0)) bad("xi must be positive");
    RunConfig c2 = c;
    c2.builder->xi = xi;
    return c2;
}

bool feasible(const RunConfig& c) {
    return design_gain(build_model(c), c.tests).summary.verdict == Verdict::ConsensusableSufficient;
}

WeightedGraph remove_random_edges(const WeightedGraph& g, std::size_t count, std::uint64_t seed) {
    if (count >= g.n_edges()) throw Error(ErrorCode::InvalidArgument, "cannot remove that many cyber edges");
    CounterRng rng(seed, "edge_removal");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<std::size_t> idx(g.n_edges());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
        idx.resize(count);
        auto out = g.without_edges(idx);
        if (is_connected(out)) return out;
    }
    throw Error(ErrorCode::CyberGraphDisconnected, "every removal draw disconnected the cyber graph");
}

}  // namespace

std::pair<double, double> xi_threshold(const RunConfig& c, double lo, double hi, int steps) {
    for (int s = 0; s < steps; ++s) {
        const double mid = std::sqrt(lo * hi);
        (feasible(with_xi(c, mid)) ? hi : lo) = mid;
    }
    return {lo, hi};
}

SweepResult run_sweep(const RunConfig& c, const std::string& param, const std::vector<std::string>& values,
                      const SweepOptions& opt) {
    if (param != "xi" && param != "gc_topology" && param != "edge_removal_count" && param != "seed") {
        throw Error(ErrorCode::UnknownParameter,
                    "'" + param + "' (expected xi, gc_topology, edge_removal_count or seed)");
    }
    SweepResult res;
    std::size_t index = 0;
    for (const auto& v : values) {
        if (param == "xi") {
            res.rows.push_back(evaluate(with_xi(c, parse_double(v)), v, 0));
        } else if (param == "gc_topology") {
            RunConfig c2 = c;
            c2.g_c = parse_graph(Json(v), "gc_topology");
            res.rows.push_back(evaluate(c2, v, 0));
        } else if (param == "seed") {
            RunConfig c2 = c;
            const double s = parse_double(v);
            if (s < 0 || s != std::floor(s)) bad("seed values must be non-negative integers");
            c2.seed = static_cast<std::uint64_t>(s);
            res.rows.push_back(evaluate(c2, v, 0));
        } else {
            const double r = parse_double(v);
            if (r < 0 || r != std::floor(r)) bad("edge_removal_count values must be non-negative integers");
            const auto base = build_graph(c.g_c, build_model(c).n_agents());
            for (int d = 0; d < opt.draws; ++d, ++index) {
                RunConfig c2 = c;
                c2.g_c = explicit_spec(remove_random_edges(base, static_cast<std::size_t>(r), c.seed ^ index));
                res.rows.push_back(evaluate(c2, v, d));
            }
            continue;
        }
        ++index;
    }
    if (param == "xi" && opt.bisect) {
        std::optional<double> feas, infeas;
        for (const auto& row : res.rows) {
            const double x = parse_double(row.value);
            if (row.verdict == Verdict::ConsensusableSufficient) {
                if (!feas || x < *feas) feas = x;
            } else if (!infeas || x > *infeas) {
                infeas = x;
            }
        }
        if (feas && infeas && *infeas < *feas) res.threshold = xi_threshold(c, *infeas, *feas, opt.bisect_steps);
    }
    return res;
}

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
    out << "value,draw,verdict,feasible,margin,delta_p,gamma_c\n";
    auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string(); };
    for (const auto& row : r.rows) {
        out << row.value << ',' << row.draw << ',' << to_string(row.verdict) << ','
            << (row.verdict == Verdict::ConsensusableSufficient ? "true" : "false") << ',' << opt(row.margin) << ','
            << opt(row.delta_p) << ',' << opt(row.gamma_c) << '\n';
    }
}

int cmd_sweep(const RunConfig& c, const std::string& param, const std::vector<std::string>& values,
              const SweepOptions& opt, std::ostream& out) {
    const auto res = run_sweep(c, param, values, opt);
    const auto dir = prepare_output(c);
    {
        std::ofstream f(dir / ("sweep_" + param + ".csv"));
        write_sweep_csv(res, f);
    }
    write_sweep_csv(res, out);
    if (param == "xi" && opt.bisect) {
        if (res.threshold) {
            out << "threshold: xi in (" << fmt(res.threshold->first) << ", " << fmt(res.threshold->second) << ")\n";
            std::ofstream(dir / "sweep_xi_threshold.json")
                << Json{{"infeasible", round_significant(res.threshold->first)},
                        {"feasible", round_significant(res.threshold->second)}}
                       .dump(2)
                << '\n';
        } else {
            out << "threshold: no feasible to infeasible transition in the swept values\n";
        }
    }
    return 0;
}

}  // namespace limas::cli
