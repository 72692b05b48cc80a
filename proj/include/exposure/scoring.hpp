#pragma once

#include <string_view>

#include "exposure/metrics.hpp"

namespace exposure {

// Exponents of the likelihood formula E^e * M^m / (T^t * U^u). Named after
// the variable they weight so they are not confused with the prospect-theory
// parameters below.
struct LikelihoodParams {
    double exp_e = 1.0;
    double exp_m = 1.0;
    double exp_t = 1.0;
    double exp_u = 1.0;
    double floor_epsilon = 0.01;  // lower bound applied to T and U

    void validate() const;  // throws DomainError
    friend bool operator==(const LikelihoodParams&, const LikelihoodParams&) = default;
};

// Cumulative prospect theory parameters (Tversky-Kahneman values).
struct CptParams {
    double alpha = 0.88;         // gain sensitivity
    double beta = 0.88;          // loss sensitivity
    double lambda = 2.25;        // loss aversion
    double gamma_weight = 0.61;  // probability distortion

    void validate() const;  // throws DomainError
    friend bool operator==(const CptParams&, const CptParams&) = default;
};

struct LikelihoodContributions {
    double e_factor = 0.0;  // E^exp_e
    double m_factor = 0.0;  // M^exp_m
    double t_factor = 0.0;  // max(T, eps)^exp_t
    double u_factor = 0.0;  // max(U, eps)^exp_u
};

struct LikelihoodResult {
    double raw = 0.0;
    double bounded = 0.0;  // raw / (1 + raw), in [0,1)
    LikelihoodContributions contributions;
};

struct IsunfFactors {
    double impact = 0.0;
    double stability = 0.0;
    double uniqueness = 0.0;
    double network = 0.0;
    double factors = 0.0;
};

struct RiskValue {
    double perceived = 0.0;
    double objective_impact = 0.0;
    double weighted_probability = 0.0;
};

// pi(p) = p^g / (p^g + (1-p)^g)^(1/g). Exact at both endpoints.
double probability_weight(double p, double gamma_weight);

// Gains: pi(p) * x^alpha. Losses: -lambda * pi(p) * |x|^beta.
RiskValue prospect_value(double x, double p, const CptParams& params = {});

LikelihoodResult likelihood(const VariableScores& scores, const LikelihoodParams& params = {});
LikelihoodResult likelihood(double e, double m, double t, double u, const LikelihoodParams& params = {});

// Legacy product scorer: Impact x Stability x Uniqueness x Network x Factors.
double isunf_likelihood(const IsunfFactors& factors);

// prospect_value with p := the bounded likelihood.
RiskValue risk_value(double impact, const LikelihoodResult& likelihood, const CptParams& params = {});

struct ScoringParams {
    CptParams cpt;
    LikelihoodParams likelihood;
};

// Parameter file {"cpt": {...}, "likelihood": {...}}; absent fields keep defaults.
ScoringParams parse_params(std::string_view text);

}  // namespace exposure
