#include "limas/report_json.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace limas {

using json = nlohmann::ordered_json;

double round_significant(double x, int digits) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    return std::strtod(buf, nullptr);
}

namespace {

json number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round_significant(x);
}

json number(const std::optional<double>& x) { return x ? number(*x) : json(nullptr); }

json interval(const Interval& iv) { return json::array({number(iv.lo), number(iv.hi)}); }

json interval(const std::optional<Interval>& iv) { return iv ? interval(*iv) : json(nullptr); }

}  // namespace

json to_json(const TestReport& r) {
    json j;
    j["test"] = std::string(to_string(r.test));
    j["verdict"] = std::string(to_string(r.verdict));
    if (r.gain) {
        json g = json::array();
        for (Eigen::Index i = 0; i < r.gain->size(); ++i) g.push_back(number((*r.gain)[i]));
        j["gain"] = g;
    } else {
        j["gain"] = nullptr;
    }
    j["gamma_c"] = number(r.gamma_c);
    j["delta_p"] = number(r.delta_p);
    j["sigma_c"] = number(r.sigma_c);
    j["sigma"] = number(r.sigma);
    j["k_star"] = number(r.k_star);
    if (r.intervals) {
        const auto& iv = *r.intervals;
        j["intervals"] = {{"k_plus", interval(iv.k_plus)},
                          {"k_minus", interval(iv.k_minus)},
                          {"admissible_plus", interval(iv.admissible_plus)},
                          {"admissible_minus", interval(iv.admissible_minus)},
                          {"s1", iv.s1},
                          {"s2", iv.s2}};
    } else {
        j["intervals"] = nullptr;
    }
    if (r.n_flags) {
        const auto& f = *r.n_flags;
        j["n_flags"] = {{"N1", f.n1},           {"N2", f.n2},           {"N3", f.n3},
                        {"d_max", number(f.d_max)}, {"d_min", number(f.d_min)}, {"boundary", f.boundary}};
    } else {
        j["n_flags"] = nullptr;
    }
    j["margin"] = number(r.margin);
    j["message"] = r.message;
    return j;
}

json to_json(const std::vector<TestReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return arr;
}

}  // namespace limas
