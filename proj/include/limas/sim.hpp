#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "limas/graph.hpp"
#include "limas/model.hpp"
#include "limas/types.hpp"

namespace limas {

/// Stacked agent states x = [x_1; ...; x_N] sampled on a uniform grid.
struct SimulationTrace {
    Eigen::Index n_agents = 0;
    Eigen::Index n_states = 0;
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> consensus_error;  // max_i |x_i - xbar|_inf
    std::vector<Vector> average_state;

    void record(double t, const Vector& x);
};

Vector average_state(const Vector& x, Eigen::Index n_agents, Eigen::Index n_states);
double consensus_error(const Vector& x, Eigen::Index n_agents, Eigen::Index n_states);

/// x(t+1) = M_cl x(t) for `steps` steps; every `record_every`-th state is kept
/// (the initial state always is).
SimulationTrace simulate_discrete(const LimasModel& m, const RowVector& k, const Vector& x0, int steps,
                                  int record_every = 1);

/// Same trajectory computed mode by mode in the shared eigenbasis: the
/// average evolves under A and mode i under A_i + B_i K. Requires commuting
/// Laplacians.
std::vector<Vector> simulate_modal(const LimasModel& m, const RowVector& k, const Vector& x0, int steps);

using VectorField = std::function<Vector(double t, const Vector& x)>;

constexpr double kDivergenceBound = 1e9;

/// Fixed-step RK4 from t = 0 to t_end. Throws NonFiniteState when any state
/// leaves [-1e9, 1e9] or becomes non-finite.
SimulationTrace simulate_continuous(const VectorField& f, const Vector& x0, double t_end, double dt,
                                    Eigen::Index n_agents, Eigen::Index n_states, int record_every = 1);

/// CSV with header t,x_1_1,...,x_N_n,consensus_error.
void write_trace_csv(const SimulationTrace& trace, std::ostream& out);

/// Draws `count` values uniform in [lo, hi] from the given seed.
std::vector<double> draw_uniform(std::uint64_t seed, std::string_view stream, std::size_t count, double lo,
                                 double hi);

/// Physical topology with weights factor / R_ij in edge order.
WeightedGraph resistive_graph(const WeightedGraph& topology, const std::vector<double>& resistances,
                              double factor = 1.0);

struct SupercapParams {
    double capacitance = 10.0;
    double leak_resistance = 5000.0;
    double sample_time = 1e-4;
    double gain = -200.0;
    std::vector<double> line_resistances;  // one per physical edge
};

/// Scalar model a = 1 - Ts/(RC), Lp^m weights Ts/(C R_ij), Lc^m weights
/// Ts/C b_ij, Ap = B = 1.
LimasModel build_supercap(const SupercapParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c);

/// C dV_i/dt = -V_i/R - sum (V_i - V_j)/R_ij + k sum b_ij (V_i - V_j).
VectorField supercap_field(const SupercapParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c, double k);

/// Benchmark 9-agent supercapacitor network: three physical clusters
/// {1,2,3}, {4,5,6,7}, {8,9} and a connected unit-weight cyber graph.
WeightedGraph supercap_physical_topology();
WeightedGraph supercap_cyber_topology();

/// Supercapacitor voltages uniform in [4, 6] V.
Vector supercap_initial_state(std::uint64_t seed, std::size_t n_agents);

struct DcmgParams {
    double rt = 0.2;
    double ct = 2.2e-3;
    double lt = 1.8e-3;
    double rl = 9.0;
    Vector k_pr = (Vector(3) << -2.13, -0.16, 13.55).finished();
    double v_ref = 48.0;
    double sample_time = 1e-4;
    std::vector<double> line_resistances;  // one per physical edge
};

/// Continuous DGU matrix over x_i = (V_i, I_ti, v_i).
Matrix dcmg_a_ct(const DcmgParams& p);

/// A = I + Ts A_ct, Ap = diag(Ts/Ct, 0, 0), B = (0, 0, Ts), physical weights 1/R_ij.
LimasModel build_dcmg(const DcmgParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c);

/// DGU dynamics with V_ref,i = V_ref + K sum b_ij (x_i - x_j).
VectorField dcmg_field(const DcmgParams& p, const WeightedGraph& g_p, const WeightedGraph& g_c, const RowVector& k);

/// Benchmark 9-DGU tree 1-2, 2-3, 2-4, 4-5, 4-6, 6-7, 6-8, 8-9.
WeightedGraph dcmg_physical_topology();

/// V in [46, 50] V, I_t in [0, 2] A, v = 0.
Vector dcmg_initial_state(std::uint64_t seed, std::size_t n_agents);

}  // namespace limas
