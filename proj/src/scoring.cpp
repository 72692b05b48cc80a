#include "exposure/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "exposure/errors.hpp"
#include "json_util.hpp"

namespace exposure {

void LikelihoodParams::validate() const {
    for (double e : {exp_e, exp_m, exp_t, exp_u}) {
        if (!(e > 0.0) || !std::isfinite(e)) throw DomainError("likelihood exponents must be positive");
    }
    if (!(floor_epsilon > 0.0 && floor_epsilon <= 0.1))
        throw DomainError("floor_epsilon must lie in (0, 0.1]");
}

void CptParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0,1]");
    if (!(lambda >= 1.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 1");
    if (!(gamma_weight > 0.0 && gamma_weight <= 1.0)) throw DomainError("gamma must lie in (0,1]");
}

double probability_weight(double p, double gamma_weight) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0,1]");
    if (!(gamma_weight > 0.0 && gamma_weight <= 1.0)) throw DomainError("gamma must lie in (0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double pg = std::pow(p, gamma_weight);
    const double qg = std::pow(1.0 - p, gamma_weight);
    return pg / std::pow(pg + qg, 1.0 / gamma_weight);
}

RiskValue prospect_value(double x, double p, const CptParams& params) {
    const double w = probability_weight(p, params.gamma_weight);
    RiskValue v;
    v.objective_impact = x;
    v.weighted_probability = w;
    if (x >= 0.0) {
        v.perceived = w * std::pow(x, params.alpha);
    } else {
        v.perceived = -params.lambda * w * std::pow(-x, params.beta);
    }
    return v;
}

LikelihoodResult likelihood(double e, double m, double t, double u, const LikelihoodParams& params) {
    LikelihoodResult r;
    auto& c = r.contributions;
    c.e_factor = std::pow(e, params.exp_e);
    c.m_factor = std::pow(m, params.exp_m);
    c.t_factor = std::pow(std::max(t, params.floor_epsilon), params.exp_t);
    c.u_factor = std::pow(std::max(u, params.floor_epsilon), params.exp_u);
    r.raw = (c.e_factor * c.m_factor) / (c.t_factor * c.u_factor);
    r.bounded = r.raw / (1.0 + r.raw);
    return r;
}

LikelihoodResult likelihood(const VariableScores& scores, const LikelihoodParams& params) {
    return likelihood(scores.exposure, scores.motivation, scores.traceability, scores.systems_update, params);
}

double isunf_likelihood(const IsunfFactors& f) {
    return f.impact * f.stability * f.uniqueness * f.network * f.factors;
}

RiskValue risk_value(double impact, const LikelihoodResult& result, const CptParams& params) {
    return prospect_value(impact, result.bounded, params);
}

ScoringParams parse_params(std::string_view text) {
    using namespace detail;
    const json root = parse_json(text);
    require_object(root, "params");
    check_keys(root, {"cpt", "likelihood"}, "params");
    ScoringParams p;
    if (root.contains("cpt")) {
        const auto& c = require_object(root["cpt"], "cpt");
        check_keys(c, {"alpha", "beta", "lambda", "gamma"}, "cpt");
        if (c.contains("alpha")) p.cpt.alpha = get_number(c["alpha"], "cpt.alpha");
        if (c.contains("beta")) p.cpt.beta = get_number(c["beta"], "cpt.beta");
        if (c.contains("lambda")) p.cpt.lambda = get_number(c["lambda"], "cpt.lambda");
        if (c.contains("gamma")) p.cpt.gamma_weight = get_number(c["gamma"], "cpt.gamma");
    }
    if (root.contains("likelihood")) {
        const auto& l = require_object(root["likelihood"], "likelihood");
        check_keys(l, {"exp_e", "exp_m", "exp_t", "exp_u", "floor_epsilon"}, "likelihood");
        if (l.contains("exp_e")) p.likelihood.exp_e = get_number(l["exp_e"], "likelihood.exp_e");
        if (l.contains("exp_m")) p.likelihood.exp_m = get_number(l["exp_m"], "likelihood.exp_m");
        if (l.contains("exp_t")) p.likelihood.exp_t = get_number(l["exp_t"], "likelihood.exp_t");
        if (l.contains("exp_u")) p.likelihood.exp_u = get_number(l["exp_u"], "likelihood.exp_u");
        if (l.contains("floor_epsilon"))
            p.likelihood.floor_epsilon = get_number(l["floor_epsilon"], "likelihood.floor_epsilon");
    }
    try {
        p.cpt.validate();
        p.likelihood.validate();
    } catch (const DomainError& e) {
        throw RangeError(std::string("params: ") + e.what());
    }
    return p;
}

}  // namespace exposure
