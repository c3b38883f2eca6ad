#include "limas/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "limas/error.hpp"
#include "limas/simstab.hpp"

namespace limas {

std::string_view to_string(TestName t) {
    switch (t) {
        case TestName::ScalarS1S2: return "ScalarS1S2";
        case TestName::LpSufficient: return "LpSufficient";
        case TestName::AnalyticSufficient: return "AnalyticSufficient";
        case TestName::Necessary: return "Necessary";
    }
    return "Unknown";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::ConsensusableSufficient: return "ConsensusableSufficient";
        case Verdict::NotConcluded: return "NotConcluded";
        case Verdict::NecessaryViolated: return "NecessaryViolated";
        case Verdict::AssumptionViolation: return "AssumptionViolation";
    }
    return "Unknown";
}

std::optional<TestName> parse_test_name(std::string_view s) {
    if (s == "scalar" || s == "ScalarS1S2") return TestName::ScalarS1S2;
    if (s == "lp" || s == "LpSufficient") return TestName::LpSufficient;
    if (s == "analytic" || s == "AnalyticSufficient") return TestName::AnalyticSufficient;
    if (s == "necessary" || s == "Necessary") return TestName::Necessary;
    return std::nullopt;
}

std::optional<double> proportionality(const Matrix& a, const Matrix& ap) {
    const double ap_norm = max_abs(ap);
    if (ap_norm == 0.0) return 0.0;
    const double aa = a.cwiseProduct(a).sum();
    if (aa == 0.0) return std::nullopt;
    const double alpha = ap.cwiseProduct(a).sum() / aa;
    if (max_abs(ap - alpha * a) <= 1e-8 * ap_norm) return alpha;
    return std::nullopt;
}

std::vector<SystemPair> modal_pairs(const LimasModel& m, const ModalDecomposition& modes) {
    std::vector<SystemPair> out;
    out.reserve(modes.pairs.size());
    for (const auto& p : modes.pairs) out.emplace_back(m.a() - p.lambda_p * m.ap(), p.lambda_c * m.b());
    return out;
}

AssumptionReport check_assumptions(const LimasModel& m) {
    AssumptionReport r;
    r.a1_commuting = commute_check(m.lp(), m.lc());
    r.alpha = proportionality(m.a(), m.ap());
    if (!r.a1_commuting) {
        r.message = "A1 fails: Laplacians do not commute";
        return r;
    }
    try {
        r.modes = modal_decomposition(m.lp(), m.lc());
    } catch (const Error& e) {
        r.message = e.what();
        return r;
    }
    bool ok = true;
    for (const auto& p : modal_pairs(m, *r.modes)) ok = ok && is_controllable(p.a(), p.b());
    r.a2_controllable = ok;
    if (!ok) r.message = "A2 fails: some modal pair is not controllable";
    return r;
}

bool gain_is_sound(const LimasModel& m, const RowVector& k, double margin) {
    if (commute_check(m.lp(), m.lc())) {
        const auto pairs = modal_pairs(m, modal_decomposition(m.lp(), m.lc()));
        if (!verify_gain(pairs, k, margin)) return false;
    }
    return is_schur(reduced_closed_loop_matrix(m, k), margin);
}

namespace {

TestReport make_report(TestName t, Verdict v, std::string message = {}) {
    TestReport r;
    r.test = t;
    r.verdict = v;
    r.message = std::move(message);
    return r;
}

void fill_spectra(TestReport& r, const LimasModel& m) {
    r.gamma_c = spectrum(m.lc()).eigenratio;
    r.delta_p = spectrum(m.lp()).delta;
}

/// Every distinct (lambda_p, lambda_c) over the nonzero-index spectra.
std::vector<ModalPair> cross_pairs(const LaplacianSpectrum& sp, const LaplacianSpectrum& sc) {
    std::vector<ModalPair> out;
    const double scale = std::max({1.0, sp.lambda_max(), sc.lambda_max()});
    auto same = [&](const ModalPair& x, const ModalPair& y) {
        return std::abs(x.lambda_p - y.lambda_p) <= 1e-12 * scale && std::abs(x.lambda_c - y.lambda_c) <= 1e-12 * scale;
    };
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i)
        for (Eigen::Index j = 1; j < sc.eigenvalues.size(); ++j) {
            const ModalPair p{sp.eigenvalues[i], sc.eigenvalues[j]};
            if (std::none_of(out.begin(), out.end(), [&](const ModalPair& q) { return same(p, q); })) out.push_back(p);
        }
    return out;
}

}  // namespace

TestReport scalar_test(double a, const LaplacianSpectrum& spect_p, const LaplacianSpectrum& spect_c) {
    TestReport r = make_report(TestName::ScalarS1S2, Verdict::NotConcluded);
    const double lp_min = spect_p.lambda_min(), lp_max = spect_p.lambda_max();
    const double lc_min = spect_c.lambda_min(), lc_max = spect_c.lambda_max();
    const double gamma = spect_c.eigenratio;
    const double delta = spect_p.delta;
    r.gamma_c = gamma;
    r.delta_p = delta;

    ScalarIntervals iv;
    iv.s1 = lp_min > a - 1.0 && (gamma - 1.0) * (1.0 - a + lp_min) < gamma * (2.0 - delta);
    iv.s2 = lp_max < 1.0 + a && (gamma - 1.0) * (1.0 + a - lp_max) < gamma * (2.0 - delta);
    iv.k_plus = {(-1.0 - a + lp_max) / lc_min, (1.0 - a + lp_min) / lc_max};
    iv.k_minus = {(-1.0 - a + lp_max) / lc_max, (1.0 - a + lp_min) / lc_min};
    if (iv.s1) {
        const Interval adm{std::max(0.0, iv.k_plus.lo), iv.k_plus.hi};
        if (!adm.empty()) iv.admissible_plus = adm;
    }
    if (iv.s2) {
        const Interval adm{iv.k_minus.lo, std::min(0.0, iv.k_minus.hi)};
        if (!adm.empty()) iv.admissible_minus = adm;
    }

    const Interval* pick = nullptr;
    if (iv.admissible_plus) pick = &*iv.admissible_plus;
    if (iv.admissible_minus && (!pick || iv.admissible_minus->width() > pick->width())) pick = &*iv.admissible_minus;
    if (pick) {
        r.verdict = Verdict::ConsensusableSufficient;
        r.gain = RowVector::Constant(1, pick->midpoint());
    } else {
        r.message = "neither S1 nor S2 holds";
    }
    r.intervals = iv;
    return r;
}

TestReport scalar_test(const LimasModel& m) {
    if (m.n_states() != 1) {
        return make_report(TestName::ScalarS1S2, Verdict::AssumptionViolation, "scalar test needs n = 1");
    }
    const double ap = m.ap()(0, 0);
    const double b = m.b()[0];
    if (ap < 0.0) {
        return make_report(TestName::ScalarS1S2, Verdict::AssumptionViolation,
                           "Ap < 0 cannot be lumped into positive Laplacian weights");
    }
    if (b == 0.0) return make_report(TestName::ScalarS1S2, Verdict::AssumptionViolation, "A2 fails: B = 0");

    TestReport r = scalar_test(m.a()(0, 0), spectrum(ap * m.lp()), spectrum(m.lc()));
    if (b != 1.0) r.message = "intervals refer to the lumped gain B*k";
    if (r.verdict != Verdict::ConsensusableSufficient) return r;

    // the chosen (wider) sub-interval first, then the other one
    std::vector<Interval> candidates;
    const auto& iv = *r.intervals;
    for (const auto& adm : {iv.admissible_plus, iv.admissible_minus})
        if (adm) candidates.push_back(*adm);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Interval& x, const Interval& y) { return x.width() > y.width(); });
    for (const auto& adm : candidates) {
        const RowVector k = RowVector::Constant(1, adm.midpoint() / b);
        if (is_schur(reduced_closed_loop_matrix(m, k))) {
            r.gain = k;
            return r;
        }
    }
    r.gain.reset();
    r.verdict = Verdict::NotConcluded;
    r.message = "admissible interval too narrow for the Schur margin";
    return r;
}

TestReport lp_sufficient_test(const LimasModel& m, double min_margin) {
    TestReport r = make_report(TestName::LpSufficient, Verdict::NotConcluded);
    fill_spectra(r, m);
    const auto ar = check_assumptions(m);

    std::vector<SystemPair> pairs;
    bool heuristic = false;
    if (ar.a1_commuting) {
        if (!ar.a2_controllable.value_or(false)) {
            r.verdict = Verdict::AssumptionViolation;
            r.message = ar.message;
            return r;
        }
        pairs = modal_pairs(m, *ar.modes);
    } else {
        heuristic = true;
        for (const auto& p : cross_pairs(spectrum(m.lp()), spectrum(m.lc()))) {
            pairs.emplace_back(m.a() - p.lambda_p * m.ap(), p.lambda_c * m.b());
            if (!is_controllable(pairs.back().a(), pairs.back().b())) {
                r.verdict = Verdict::AssumptionViolation;
                r.message = "A1 fails and a cross-paired modal system is not controllable";
                return r;
            }
        }
    }

    if (pairs.size() == 1) pairs.push_back(pairs.front());  // N = 2: one mode, LP needs M >= 2
    const auto v = simultaneous_stabilization(pairs, min_margin);
    r.margin = v.margin;
    const std::string tag = heuristic ? "A1 fails; cross-paired spectra" : "";
    if (!v.feasible) {
        r.message = tag.empty() ? "LP infeasible" : tag + ", LP infeasible";
        return r;
    }
    if (!verify_gain(pairs, *v.gain) || !is_schur(reduced_closed_loop_matrix(m, *v.gain))) {
        r.message = tag.empty() ? "LP gain failed closed-loop verification" : tag + ", gain not verified on the reduced closed loop";
        return r;
    }
    r.verdict = Verdict::ConsensusableSufficient;
    r.gain = *v.gain;
    if (!tag.empty()) r.message = tag + ", gain verified on the reduced closed loop";
    if (v.gain_spread > 1e-6 * std::max(1.0, v.gain->cwiseAbs().maxCoeff())) {
        r.message += (r.message.empty() ? "" : "; ") + std::string("warning: gain spread ") + std::to_string(v.gain_spread);
    }
    return r;
}

TestReport analytic_sufficient_test(const LimasModel& m) {
    TestReport r = make_report(TestName::AnalyticSufficient, Verdict::AssumptionViolation);
    fill_spectra(r, m);
    const auto ar = check_assumptions(m);
    if (!ar.a1_commuting || !ar.a2_controllable.value_or(false)) {
        r.message = ar.message;
        return r;
    }
    if (!ar.alpha) {
        r.message = "A3 fails: Ap is not proportional to A";
        return r;
    }
    r.verdict = Verdict::NotConcluded;
    const double alpha = *ar.alpha;
    const auto& modes = ar.modes->pairs;

    std::vector<double> alphas, lcs;
    for (const auto& p : modes) {
        alphas.push_back(1.0 - alpha * p.lambda_p);
        lcs.push_back(p.lambda_c);
    }
    double a_max = 0, a_min = std::numeric_limits<double>::infinity();
    for (double ai : alphas) {
        a_max = std::max(a_max, std::abs(ai));
        a_min = std::min(a_min, std::abs(ai));
    }
    const double lc_max = *std::max_element(lcs.begin(), lcs.end());
    const Matrix a_bar = a_max * m.a();
    const double crit = sigma_c(a_bar);
    r.sigma_c = crit;

    if (is_schur(a_bar)) {
        const RowVector zero = RowVector::Zero(m.n_states());
        if (gain_is_sound(m, zero)) {
            r.verdict = Verdict::ConsensusableSufficient;
            r.gain = zero;
            r.message = "alpha_max A is Schur";
            return r;
        }
    }

    const double budget = a_min * a_min - a_max * a_max * crit;
    if (budget <= 0.0) {
        r.message = "alpha_min^2 <= alpha_max^2 sigma_c";
        return r;
    }
    double r_min = std::numeric_limits<double>::infinity(), r_max = -r_min;
    for (double ai : alphas)
        for (double lj : lcs) {
            r_min = std::min(r_min, ai / lj);
            r_max = std::max(r_max, ai / lj);
        }
    const double half = 0.5 * (r_max - r_min);
    if (!(half * half < budget / (lc_max * lc_max))) {
        r.message = "spread condition fails";
        return r;
    }
    const double k_star = 0.5 * (r_min + r_max);
    double sigma = std::numeric_limits<double>::infinity();
    for (double ai : alphas)
        for (double lj : lcs) sigma = std::min(sigma, (2.0 * ai * lj * k_star - lj * lj * k_star * k_star) / (a_max * a_max));
    r.k_star = k_star;
    r.sigma = sigma;

    MareSolution sol;
    try {
        sol = solve_mare(a_bar, m.b(), sigma);
    } catch (const Error& e) {
        r.message = std::string("MARE: ") + e.what();
        return r;
    }
    const Vector pb = sol.p_mat * m.b();
    const RowVector k = -k_star / m.b().dot(pb) * (pb.transpose() * m.a());
    if (!gain_is_sound(m, k)) {
        r.message = "MARE gain failed closed-loop verification";
        return r;
    }
    r.verdict = Verdict::ConsensusableSufficient;
    r.gain = k;
    return r;
}

TestReport necessary_test(const LimasModel& m) {
    TestReport r = make_report(TestName::Necessary, Verdict::NotConcluded);
    fill_spectra(r, m);
    const auto sp = spectrum(m.lp());
    const double gamma = *r.gamma_c;

    NecessaryFlags f;
    f.d_max = 0;
    f.d_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) {
        const Matrix ai = m.a() - sp.eigenvalues[i] * m.ap();
        const double d = std::abs(ai.partialPivLu().determinant());
        f.d_max = std::max(f.d_max, d);
        f.d_min = std::min(f.d_min, d);
    }
    const bool max_in_band = std::abs(f.d_max - 1.0) <= kDetBand;
    const bool min_in_band = std::abs(f.d_min - 1.0) <= kDetBand;
    f.boundary = max_in_band || min_in_band;
    const bool max_ge1 = f.d_max >= 1.0 || max_in_band;
    const bool min_lt1 = f.d_min < 1.0 || min_in_band;
    const bool eq26 = f.d_max - 1.0 < gamma * f.d_min + gamma;
    const bool eq27 = gamma * (f.d_min - 1.0) < f.d_max + 1.0;
    f.n1 = !max_ge1;
    f.n2 = max_ge1 && min_lt1 && eq26;
    f.n3 = !min_lt1 && eq26 && eq27;
    r.n_flags = f;

    const auto ar = check_assumptions(m);
    if (!ar.a1_commuting || !ar.a2_controllable.value_or(false)) {
        r.verdict = Verdict::AssumptionViolation;
        r.message = ar.message;
        return r;
    }
    if (f.n1 || f.n2 || f.n3) {
        r.message = "necessary conditions hold";
        return r;
    }
    if (f.boundary) {
        r.message = "N1-N3 fail only at the |det| = 1 boundary band";
        return r;
    }
    r.verdict = Verdict::NecessaryViolated;
    r.message = "N1, N2 and N3 all fail";
    return r;
}

std::vector<TestName> default_test_order() {
    return {TestName::Necessary, TestName::ScalarS1S2, TestName::LpSufficient, TestName::AnalyticSufficient};
}

namespace {

TestReport run_one(TestName t, const LimasModel& m) {
    try {
        switch (t) {
            case TestName::ScalarS1S2: return scalar_test(m);
            case TestName::LpSufficient: return lp_sufficient_test(m);
            case TestName::AnalyticSufficient: return analytic_sufficient_test(m);
            case TestName::Necessary: return necessary_test(m);
        }
    } catch (const Error& e) {
        return make_report(t, Verdict::NotConcluded, e.what());
    }
    return make_report(t, Verdict::NotConcluded);
}

template <class T>
void take_first(std::optional<T>& dst, const std::optional<T>& src) {
    if (!dst && src) dst = src;
}

}  // namespace

DesignResult design_gain(const LimasModel& m, const std::vector<TestName>& order) {
    DesignResult out;
    for (const auto t : order) {
        if (t == TestName::ScalarS1S2 && m.n_states() != 1) continue;
        out.reports.push_back(run_one(t, m));
        const auto& last = out.reports.back();
        if (last.verdict == Verdict::ConsensusableSufficient || last.verdict == Verdict::NecessaryViolated) {
            out.summary = last;
            return out;
        }
    }
    if (out.reports.empty()) {
        out.summary = make_report(TestName::Necessary, Verdict::NotConcluded, "no test ran");
        return out;
    }
    const bool any_open = std::any_of(out.reports.begin(), out.reports.end(),
                                      [](const TestReport& r) { return r.verdict == Verdict::NotConcluded; });
    const Verdict merged = any_open ? Verdict::NotConcluded : Verdict::AssumptionViolation;
    TestReport s = *std::find_if(out.reports.begin(), out.reports.end(),
                                 [&](const TestReport& r) { return r.verdict == merged; });
    s.message.clear();
    for (const auto& r : out.reports) {
        take_first(s.gamma_c, r.gamma_c);
        take_first(s.delta_p, r.delta_p);
        take_first(s.sigma_c, r.sigma_c);
        take_first(s.sigma, r.sigma);
        take_first(s.k_star, r.k_star);
        take_first(s.margin, r.margin);
        take_first(s.intervals, r.intervals);
        take_first(s.n_flags, r.n_flags);
        if (!r.message.empty()) {
            if (!s.message.empty()) s.message += "; ";
            s.message += std::string(to_string(r.test)) + ": " + r.message;
        }
    }
    out.summary = s;
    return out;
}

int exit_code(Verdict v) {
    switch (v) {
        case Verdict::ConsensusableSufficient: return 0;
        case Verdict::NotConcluded: return 1;
        case Verdict::NecessaryViolated: return 2;
        case Verdict::AssumptionViolation: return 3;
    }
    return 1;
}

}  // namespace limas
