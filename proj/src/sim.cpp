#include "limas/sim.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "limas/error.hpp"
#include "limas/random.hpp"

namespace limas {

Vector average_state(const Vector& x, Eigen::Index n_agents, Eigen::Index n_states) {
    Vector avg = Vector::Zero(n_states);
    for (Eigen::Index i = 0; i < n_agents; ++i) avg += x.segment(i * n_states, n_states);
    return avg / static_cast<double>(n_agents);
}

double consensus_error(const Vector& x, Eigen::Index n_agents, Eigen::Index n_states) {
    const Vector avg = average_state(x, n_agents, n_states);
    double err = 0;
    for (Eigen::Index i = 0; i < n_agents; ++i)
        err = std::max(err, (x.segment(i * n_states, n_states) - avg).cwiseAbs().maxCoeff());
    return err;
}

void SimulationTrace::record(double t, const Vector& x) {
    times.push_back(t);
    states.push_back(x);
    average_state.push_back(limas::average_state(x, n_agents, n_states));
    consensus_error.push_back(limas::consensus_error(x, n_agents, n_states));
}

namespace {

void check_x0(const Vector& x0, Eigen::Index n_agents, Eigen::Index n_states) {
    if (x0.size() != n_agents * n_states) throw Error(ErrorCode::DimensionMismatch, "x0 must have N*n entries");
}

}  // namespace

SimulationTrace simulate_discrete(const LimasModel& m, const RowVector& k, const Vector& x0, int steps,
                                  int record_every) {
    if (steps < 1 || record_every < 1) throw Error(ErrorCode::InvalidArgument, "steps and record_every must be >= 1");
    check_x0(x0, m.n_agents(), m.n_states());
    const Matrix mcl = closed_loop_matrix(m, k);
    SimulationTrace tr;
    tr.n_agents = m.n_agents();
    tr.n_states = m.n_states();
    Vector x = x0;
    tr.record(0.0, x);
    for (int s = 1; s <= steps; ++s) {
        x = mcl * x;
        if (s % record_every == 0) tr.record(static_cast<double>(s), x);
    }
    return tr;
}

std::vector<Vector> simulate_modal(const LimasModel& m, const RowVector& k, const Vector& x0, int steps) {
    const auto N = m.n_agents();
    const auto n = m.n_states();
    check_x0(x0, N, n);
    const auto modes = modal_decomposition(m.lp(), m.lc());
    const Matrix t = kron(modes.phi, Matrix::Identity(n, n));
    std::vector<Matrix> blocks;
    blocks.push_back(m.a());
    for (const auto& p : modes.pairs) blocks.push_back(m.a() - p.lambda_p * m.ap() + p.lambda_c * m.b() * k);

    Vector z = t.transpose() * x0;
    std::vector<Vector> out;
    out.push_back(x0);
    for (int s = 1; s <= steps; ++s) {
        for (Eigen::Index i = 0; i < N; ++i) z.segment(i * n, n) = blocks[static_cast<std::size_t>(i)] * z.segment(i * n, n);
        out.push_back(t * z);
    }
    return out;
}

SimulationTrace simulate_continuous(const VectorField& f, const Vector& x0, double t_end, double dt,
                                    Eigen::Index n_agents, Eigen::Index n_states, int record_every) {
    if (!(dt > 0.0) || !(t_end >= dt)) throw Error(ErrorCode::InvalidArgument, "need dt > 0 and t_end >= dt");
    if (record_every < 1) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
    check_x0(x0, n_agents, n_states);
    const auto steps = static_cast<long>(std::llround(t_end / dt));
    SimulationTrace tr;
    tr.n_agents = n_agents;
    tr.n_states = n_states;
    Vector x = x0;
    tr.record(0.0, x);
    for (long s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        const Vector k1 = f(t, x);
        const Vector k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Vector k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Vector k4 = f(t + dt, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
            throw Error(ErrorCode::NonFiniteState, "state diverged at t = " + std::to_string(t + dt));
        }
        if ((s + 1) % record_every == 0) tr.record(static_cast<double>(s + 1) * dt, x);
    }
    return tr;
}

void write_trace_csv(const SimulationTrace& trace, std::ostream& out) {
    out << 't';
    for (Eigen::Index i = 1; i <= trace.n_agents; ++i)
        for (Eigen::Index j = 1; j <= trace.n_states; ++j) out << ",x_" << i << '_' << j;
    out << ",consensus_error\n";
    out << std::setprecision(12);
    for (std::size_t r = 0; r < trace.times.size(); ++r) {
        out << trace.times[r];
        for (Eigen::Index c = 0; c < trace.states[r].size(); ++c) out << ',' << trace.states[r][c];
        out << ',' << trace.consensus_error[r] << '\n';
    }
}

std::vector<double> draw_uniform(std::uint64_t seed, std::string_view stream, std::size_t count, double lo,
                                 double hi) {
    CounterRng rng(seed, stream);
    std::vector<double> out(count);
    for (auto& v : out) v = rng.uniform(lo, hi);
    return out;
}

WeightedGraph resistive_graph(const WeightedGraph& topology, const std::vector<double>& resistances, double factor) {
    if (resistances.size() != topology.n_edges()) {
        throw Error(ErrorCode::DimensionMismatch, "need one line resistance per physical edge");
    }
    std::vector<Edge> edges = topology.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!(resistances[e] > 0.0)) throw Error(ErrorCode::InvalidArgument, "line resistances must be positive");
        edges[e].weight = factor / resistances[e];
    }
    return WeightedGraph(topology.n_nodes(), std::move(edges));
}

LimasModel build_supercap(const SupercapParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c) {
    if (!(p.capacitance > 0 && p.leak_resistance > 0 && p.sample_time > 0)) {
        throw Error(ErrorCode::InvalidArgument, "supercapacitor parameters must be positive");
    }
    const double scale = p.sample_time / p.capacitance;
    const double a = 1.0 - p.sample_time / (p.leak_resistance * p.capacitance);
    return LimasModel(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1), Vector::Ones(1),
                      resistive_graph(g_p, p.line_resistances, scale), g_c.scaled(scale));
}

VectorField supercap_field(const SupercapParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c, double k) {
    const Matrix lr = laplacian(resistive_graph(g_p, p.line_resistances));
    const Matrix lc = laplacian(g_c);
    const Eigen::Index N = lr.rows();
    const Matrix sys = (-Matrix::Identity(N, N) / p.leak_resistance - lr + k * lc) / p.capacitance;
    return [sys](double, const Vector& x) -> Vector { return sys * x; };
}

namespace {

WeightedGraph one_based(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
    std::vector<Edge> out;
    for (const auto& [i, j] : edges) out.push_back({i - 1, j - 1, 1.0});
    return WeightedGraph(n, std::move(out));
}

}  // namespace

WeightedGraph supercap_physical_topology() {
    return one_based(9, {{1, 3}, {2, 3}, {4, 7}, {5, 6}, {6, 7}, {8, 9}});
}

WeightedGraph supercap_cyber_topology() {
    return one_based(9, {{1, 2}, {1, 3}, {2, 4}, {4, 6}, {6, 7}, {5, 7}, {4, 5}, {3, 8}, {6, 9}, {8, 9}});
}

WeightedGraph dcmg_physical_topology() {
    return one_based(9, {{1, 2}, {2, 3}, {2, 4}, {4, 5}, {4, 6}, {6, 7}, {6, 8}, {8, 9}});
}

Vector supercap_initial_state(std::uint64_t seed, std::size_t n_agents) {
    const auto v = draw_uniform(seed, "x0", n_agents, 4.0, 6.0);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix dcmg_a_ct(const DcmgParams& p) {
    if (p.k_pr.size() != 3) throw Error(ErrorCode::DimensionMismatch, "K_pr must have three entries");
    if (!(p.rt > 0 && p.ct > 0 && p.lt > 0 && p.rl > 0 && p.sample_time > 0)) {
        throw Error(ErrorCode::InvalidArgument, "DGU electrical parameters must be positive");
    }
    Matrix a(3, 3);
    a << -1.0 / (p.rl * p.ct), 1.0 / p.ct, 0.0,
         (p.k_pr[0] - 1.0) / p.lt, (p.k_pr[1] - p.rt) / p.lt, p.k_pr[2] / p.lt,
         -1.0, 0.0, 0.0;
    return a;
}

LimasModel build_dcmg(const DcmgParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c) {
    const double ts = p.sample_time;
    Matrix a = Matrix::Identity(3, 3) + ts * dcmg_a_ct(p);
    Matrix ap = Matrix::Zero(3, 3);
    ap(0, 0) = ts / p.ct;
    Vector b = Vector::Zero(3);
    b[2] = ts;
    return LimasModel(std::move(a), std::move(ap), std::move(b), resistive_graph(g_p, p.line_resistances), g_c);
}

VectorField dcmg_field(const DcmgParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c, const RowVector& k) {
    if (k.size() != 3) throw Error(ErrorCode::DimensionMismatch, "DGU gain must be 1 x 3");
    const Matrix lp = laplacian(resistive_graph(g_p, p.line_resistances));
    const Matrix lc = laplacian(g_c);
    const Eigen::Index N = lp.rows();
    Matrix ap = Matrix::Zero(3, 3);
    ap(0, 0) = 1.0 / p.ct;
    Vector e3 = Vector::Zero(3);
    e3[2] = 1.0;
    const Matrix sys = kron(Matrix::Identity(N, N), dcmg_a_ct(p)) - kron(lp, ap) + kron(lc, e3 * k);
    const Vector drive = kron(Vector::Ones(N), e3) * p.v_ref;
    return [sys, drive](double, const Vector& x) -> Vector { return sys * x + drive; };
}

Vector dcmg_initial_state(std::uint64_t seed, std::size_t n_agents) {
    CounterRng rng(seed, "x0");
    Vector x(static_cast<Eigen::Index>(3 * n_agents));
    for (std::size_t i = 0; i < n_agents; ++i) {
        const auto o = static_cast<Eigen::Index>(3 * i);
        x[o] = rng.uniform(46.0, 50.0);
        x[o + 1] = rng.uniform(0.0, 2.0);
        x[o + 2] = 0.0;
    }
    return x;
}

}  // namespace limas
