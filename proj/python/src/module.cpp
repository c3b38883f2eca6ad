#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "limas/cli.hpp"
#include "limas/error.hpp"
#include "limas/report_json.hpp"
#include "limas/simstab.hpp"

namespace py = pybind11;
using namespace limas;

namespace {

WeightedGraph graph_from(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    std::vector<Edge> out;
    for (const auto& [i, j, w] : edges) out.push_back({i, j, w});
    return WeightedGraph(n, std::move(out));
}

std::string report_str(const TestReport& r) { return to_json(r).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "LIMAS consensus design core";

    static py::exception<Error> error(m, "LimasError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            error(e.what());
        }
    });

    py::class_<LimasModel>(m, "Model")
        .def(py::init([](const Matrix& a, const Matrix& ap, const Vector& b, std::size_t n_agents,
                         const std::vector<std::tuple<std::size_t, std::size_t, double>>& g_p,
                         const std::vector<std::tuple<std::size_t, std::size_t, double>>& g_c) {
                 return LimasModel(a, ap, b, graph_from(n_agents, g_p), graph_from(n_agents, g_c));
             }),
             py::arg("A"), py::arg("Ap"), py::arg("B"), py::arg("n_agents"), py::arg("g_p"), py::arg("g_c"),
             "Edges are 0-based (i, j, weight) triplets.")
        .def_property_readonly("A", &LimasModel::a)
        .def_property_readonly("Ap", &LimasModel::ap)
        .def_property_readonly("B", &LimasModel::b)
        .def_property_readonly("Lp", &LimasModel::lp)
        .def_property_readonly("Lc", &LimasModel::lc)
        .def_property_readonly("n_agents", &LimasModel::n_agents)
        .def_property_readonly("n_states", &LimasModel::n_states);

    m.def("model_from_config", [](const std::string& text) {
        return cli::build_model(cli::parse_config(nlohmann::ordered_json::parse(text)));
    });
    m.def("example_config", [](const std::string& name) { return cli::example_config(name).dump(); });

    m.def("scalar_test", [](const LimasModel& mod) { return report_str(scalar_test(mod)); });
    m.def("lp_sufficient_test", [](const LimasModel& mod, double min_margin) {
        return report_str(lp_sufficient_test(mod, min_margin));
    }, py::arg("model"), py::arg("min_margin") = 1e-9);
    m.def("analytic_sufficient_test", [](const LimasModel& mod) { return report_str(analytic_sufficient_test(mod)); });
    m.def("necessary_test", [](const LimasModel& mod) { return report_str(necessary_test(mod)); });
    m.def("design_gain", [](const LimasModel& mod, const std::vector<std::string>& tests) {
        std::vector<TestName> order;
        for (const auto& t : tests) {
            const auto name = parse_test_name(t);
            if (!name) throw Error(ErrorCode::InvalidArgument, "unknown test '" + t + "'");
            order.push_back(*name);
        }
        const auto res = design_gain(mod, order.empty() ? default_test_order() : order);
        return nlohmann::ordered_json{{"summary", to_json(res.summary)}, {"reports", to_json(res.reports)}}.dump();
    }, py::arg("model"), py::arg("tests") = std::vector<std::string>{});
    m.def("gain_is_sound", &gain_is_sound, py::arg("model"), py::arg("gain"), py::arg("margin") = kSchurMargin);

    m.def("closed_loop_matrix", &closed_loop_matrix);
    m.def("reduced_closed_loop_matrix", &reduced_closed_loop_matrix);
    m.def("simulate_discrete", [](const LimasModel& mod, const RowVector& k, const Vector& x0, int steps) {
        const auto tr = simulate_discrete(mod, k, x0, steps);
        Matrix out(static_cast<Eigen::Index>(tr.states.size()), x0.size());
        for (std::size_t s = 0; s < tr.states.size(); ++s) out.row(static_cast<Eigen::Index>(s)) = tr.states[s].transpose();
        return py::make_tuple(out, tr.consensus_error);
    });

    m.def("simultaneous_stabilization", [](const std::vector<std::pair<Matrix, Vector>>& pairs, double min_margin) {
        std::vector<SystemPair> ps;
        for (const auto& [a, b] : pairs) ps.emplace_back(a, b);
        const auto v = simultaneous_stabilization(ps, min_margin);
        py::dict d;
        d["feasible"] = v.feasible;
        d["margin"] = v.margin;
        d["gain"] = v.gain ? py::cast(*v.gain) : py::none();
        return d;
    }, py::arg("pairs"), py::arg("min_margin") = 1e-9);

    m.def("laplacian", [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
        return laplacian(graph_from(n, edges));
    });
}
