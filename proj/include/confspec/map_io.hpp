#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "confspec/errors.hpp"
#include "confspec/powerseries.hpp"
#include "confspec/quasidisc.hpp"
#include "confspec/stability.hpp"

namespace confspec {

// Map specification:
//   {"type":"polynomial","coeffs":[[re,im],...]}
//   {"type":"scale","r":0.8}
//   {"type":"perturbation","eps":0.1,"k":3}
//   {"type":"disc_to_square","terms":64}
//   {"type":"identity"}
inline PowerSeriesMap parse_map_spec(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw InvalidParameter("map spec: missing string field 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "identity") return identity_map();
    if (type == "scale") {
        if (!j.contains("r") || !j["r"].is_number())
            throw InvalidParameter("map spec: scale requires numeric field 'r'");
        return scale_map(j["r"].get<double>());
    }
    if (type == "perturbation") {
        if (!j.contains("eps") || !j["eps"].is_number())
            throw InvalidParameter("map spec: perturbation requires numeric field 'eps'");
        if (!j.contains("k") || !j["k"].is_number_integer())
            throw InvalidParameter("map spec: perturbation requires integer field 'k'");
        return perturbation_map(j["eps"].get<double>(), j["k"].get<int>());
    }
    if (type == "disc_to_square") {
        if (!j.contains("terms") || !j["terms"].is_number_integer())
            throw InvalidParameter("map spec: disc_to_square requires integer field 'terms'");
        return disc_to_square_map(j["terms"].get<int>());
    }
    if (type == "polynomial") {
        if (!j.contains("coeffs") || !j["coeffs"].is_array())
            throw InvalidParameter("map spec: polynomial requires array field 'coeffs'");
        std::vector<complexd> coeffs;
        for (const auto& c : j["coeffs"]) {
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
                throw InvalidParameter("map spec: each coefficient must be a [re,im] pair");
            coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
        }
        return PowerSeriesMap(std::move(coeffs), "polynomial");
    }
    throw InvalidParameter("map spec: unknown type '" + type + "'");
}

inline DiscreteJordanCurve parse_curve(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidParameter("curve: expected a JSON array of [x,y] pairs");
    std::vector<std::array<double, 2>> pts;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw InvalidParameter("curve: each vertex must be a [x,y] pair");
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return DiscreteJordanCurve(std::move(pts));
}

inline nlohmann::json cq_to_json(const SobolevConstantEstimate& cq) {
    return {
        {"q", cq.q},
        {"value", cq.value},
        {"mode", cq.mode == SobolevConstantEstimate::Mode::variational ? "variational"
                                                                       : "user_override"},
        {"basis_size", cq.basis_size},
        {"iterations", cq.iterations},
        {"residual", cq.residual},
        {"converged", cq.converged},
    };
}

inline nlohmann::json certificate_to_json(const ClassCertificate& c) {
    nlohmann::json j{
        {"p", std::isinf(c.p) ? nlohmann::json("inf") : nlohmann::json(c.p)},
        {"seminorm", c.seminorm},
        {"tau", c.tau},
        {"member", c.member},
        {"quad_error", c.quad_error},
    };
    if (std::isinf(c.p)) {
        j["inf_jac"] = c.inf_jac;
        j["grid_max"] = c.grid_max_flag;
    }
    return j;
}

inline nlohmann::json report_to_json(const StabilityReport& r) {
    nlohmann::json per_n = nlohmann::json::array();
    for (int i = 0; i < r.n_max; ++i) {
        per_n.push_back({
            {"n", i + 1},
            {"lambda1", r.lambdas1[i]},
            {"lambda2", r.lambdas2[i]},
            {"diff", r.diffs[i]},
            {"c_n", r.c_n[i]},
            {"bound_thm44", r.bound_thm44[i]},
            {"bound_thm33", r.bound_thm33[i]},
            {"bound_lemma31", r.bound_lemma31[i]},
            {"bound_remark", r.bound_remark[i]},
            {"bound_measure", r.bound_measure[i]},
            {"slack", r.slack[i]},
            {"satisfied", static_cast<bool>(r.satisfied[i])},
            {"trivial_regime", static_cast<bool>(r.trivial_regime[i])},
        });
    }
    return {
        {"map1", r.map1_label},
        {"map2", r.map2_label},
        {"p", std::isinf(r.p) ? nlohmann::json("inf") : nlohmann::json(r.p)},
        {"s", r.s},
        {"q", r.q},
        {"n_max", r.n_max},
        {"per_n", per_n},
        {"ds", r.ds},
        {"l2_abs_deriv_distance", r.l2_abs_deriv},
        {"l2_deriv_distance", r.l2_deriv},
        {"lp_seminorm1", r.lp1},
        {"lp_seminorm2", r.lp2},
        {"measure_variation",
         {{"plus", r.mv.plus}, {"minus", r.mv.minus}, {"total", r.mv.total}}},
        {"cq", cq_to_json(r.cq)},
        {"B_lem32", r.B_lem32},
        {"optimal_B", r.optB.B},
        {"lambda1_absdiff_weight",
         std::isinf(r.optB.lambda1) ? nlohmann::json("inf") : nlohmann::json(r.optB.lambda1)},
        {"degenerate_weight", r.degenerate_weight},
        {"tau", r.tau},
        {"B_ptau", r.B_ptau},
        {"certificate1", certificate_to_json(r.cert1)},
        {"certificate2", certificate_to_json(r.cert2)},
        {"grid_max_flag", r.grid_max_flag},
        {"max_quad_error", r.max_quad_error},
        {"params",
         {{"m_max", r.params.m_max},
          {"k_max", r.params.k_max},
          {"nr", r.params.nr},
          {"ntheta", r.params.ntheta},
          {"cq_basis", r.params.cq_basis},
          {"cq_tol", r.params.cq_tol}}},
    };
}

inline std::string report_to_csv(const StabilityReport& r) {
    std::string csv = "n,lambda1,lambda2,diff,bound_thm44,bound_thm33,bound_opt,satisfied\n";
    char line[512];
    for (int i = 0; i < r.n_max; ++i) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", i + 1,
                      r.lambdas1[i], r.lambdas2[i], r.diffs[i], r.bound_thm44[i],
                      r.bound_thm33[i], r.bound_lemma31[i], r.satisfied[i] ? "true" : "false");
        csv += line;
    }
    return csv;
}

inline nlohmann::json quasidisc_to_json(const QuasidiscParams& qp) {
    auto num = [](double v) {
        return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
    };
    return {
        {"K", qp.K},        {"k", qp.k},
        {"p_sup", num(qp.p_sup)}, {"p_chosen", num(qp.p_chosen)},
        {"dim_bound", qp.dim_bound}, {"M", qp.M},
        {"cq", cq_to_json(qp.cq)},
    };
}

} // namespace confspec
