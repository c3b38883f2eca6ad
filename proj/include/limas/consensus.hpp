#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "limas/control.hpp"
#include "limas/graph.hpp"
#include "limas/model.hpp"

namespace limas {

enum class TestName { ScalarS1S2, LpSufficient, AnalyticSufficient, Necessary };
enum class Verdict { ConsensusableSufficient, NotConcluded, NecessaryViolated, AssumptionViolation };

std::string_view to_string(TestName t);
std::string_view to_string(Verdict v);
/// Accepts the enum spelling or the short forms scalar, lp, analytic, necessary.
std::optional<TestName> parse_test_name(std::string_view s);

/// Open interval (lo, hi).
struct Interval {
    double lo = 0;
    double hi = 0;

    [[nodiscard]] bool empty() const { return !(hi > lo); }
    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] double midpoint() const { return 0.5 * (lo + hi); }
    [[nodiscard]] bool contains(double k) const { return k > lo && k < hi; }
};

struct ScalarIntervals {
    Interval k_plus;
    Interval k_minus;
    std::optional<Interval> admissible_plus;   // K+ cap [0, inf), when S1 holds
    std::optional<Interval> admissible_minus;  // K- cap (-inf, 0), when S2 holds
    bool s1 = false;
    bool s2 = false;
};

struct NecessaryFlags {
    bool n1 = false;
    bool n2 = false;
    bool n3 = false;
    double d_max = 0;
    double d_min = 0;
    bool boundary = false;  // some |det| fell inside the +-1e-10 band around 1
};

struct TestReport {
    TestName test = TestName::Necessary;
    Verdict verdict = Verdict::NotConcluded;
    std::optional<RowVector> gain;
    std::optional<double> gamma_c;
    std::optional<double> delta_p;
    std::optional<double> sigma_c;
    std::optional<double> sigma;
    std::optional<double> k_star;
    std::optional<double> margin;
    std::optional<ScalarIntervals> intervals;
    std::optional<NecessaryFlags> n_flags;
    std::string message;
};

struct AssumptionReport {
    bool a1_commuting = false;
    std::optional<bool> a2_controllable;  // evaluated only when A1 holds
    std::optional<double> alpha;          // Ap = alpha A
    std::optional<ModalDecomposition> modes;
    std::string message;
};

/// A1 by commute_check, A2 on every modal pair, A3 by projecting Ap onto A.
AssumptionReport check_assumptions(const LimasModel& m);

/// alpha = <Ap, A> / <A, A> when |Ap - alpha A|_max <= 1e-8 |Ap|_max.
std::optional<double> proportionality(const Matrix& a, const Matrix& ap);

/// Modal pairs (A - lambda_p Ap, lambda_c B) in decomposition order.
std::vector<SystemPair> modal_pairs(const LimasModel& m, const ModalDecomposition& modes);

constexpr double kDetBand = 1e-10;

/// Lumped scalar test: `a` with already-lumped Laplacian spectra. The gain
/// is the midpoint of the wider admissible sub-interval.
TestReport scalar_test(double a, const LaplacianSpectrum& spect_p, const LaplacianSpectrum& spect_c);

/// Model-level scalar test for n = 1: lumps Ap into Lp (Ap >= 0 required)
/// and B into the gain, then checks the reduced closed loop.
TestReport scalar_test(const LimasModel& m);

/// LP route. Without A1 the pairs are heuristically taken over every
/// (lambda_p, lambda_c) combination and a gain is accepted only if the
/// reduced closed loop is Schur.
TestReport lp_sufficient_test(const LimasModel& m, double min_margin = 1e-9);

TestReport analytic_sufficient_test(const LimasModel& m);

TestReport necessary_test(const LimasModel& m);

struct DesignResult {
    TestReport summary;
    std::vector<TestReport> reports;  // every test that ran, in order
};

std::vector<TestName> default_test_order();

/// Runs the tests in order, stopping at the first sufficient gain or at a
/// necessity violation under A1. The scalar test runs only for n = 1.
DesignResult design_gain(const LimasModel& m, const std::vector<TestName>& order = default_test_order());

/// Every modal matrix and the reduced closed loop are Schur with the margin.
bool gain_is_sound(const LimasModel& m, const RowVector& k, double margin = kSchurMargin);

int exit_code(Verdict v);

}  // namespace limas
