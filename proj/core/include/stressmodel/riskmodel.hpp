#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "stressmodel/estimators.hpp"
#include "stressmodel/normal.hpp"

namespace stressmodel {

// Closed-form moments of the stress-mixture return distribution.
struct MixtureMoments {
    double mean = 0.0;
    double variance = 0.0;
    double excess_kurtosis = 0.0;

    double stddev() const;
};

// Stress-bucket filter: selects buckets wholly contained in
// [kappa_min, kappa_max). Defaults select everything.
struct BucketFilter {
    double kappa_min = -std::numeric_limits<double>::infinity();
    double kappa_max = std::numeric_limits<double>::infinity();
};

// P(r < x0) under the stress mixture: sum over populated buckets of
// P_i * Phi((x0 - mu_i) / sigma_i). A sigma = 0 bucket contributes its mass
// as a step at mu_i. Throws DegenerateBucket if any populated bucket has no
// sigma estimate, EmptyTable if nothing is populated.
double mixture_cdf(const EstimateTable& table, double x0);

// P(a <= r < b) = mixture_cdf(b) - mixture_cdf(a), clamped at 0.
double interval_probability(const EstimateTable& table, double a, double b);

// Mixture CDF with bucket mass renormalized over the filtered subset.
double conditional_cdf(const EstimateTable& table, const BucketFilter& filter, double x0);

MixtureMoments mixture_moments(const EstimateTable& table);

// Single-normal fit: Phi((x0 - mean) / stddev).
double normal_fit_cdf(const MixtureMoments& moments, double x0);
double normal_fit_cdf(const std::vector<double>& sample, double x0);

// r_N = N * mixture mean.
double expected_n_day_return(const EstimateTable& table, double horizon_days);

// P_N = mixture_cdf(-r_N): chance one day erases N days of expected gains.
double loss_probability_pn(const EstimateTable& table, double horizon_days);

double sharpe_ratio(const MixtureMoments& moments, double risk_free_per_day = 0.0);
double sharpe_ratio(const std::vector<double>& sample, double risk_free_per_day = 0.0);

// One risk query's worth of results, ready for serialization.
struct RiskReport {
    double threshold = 0.0;  // per-day log return
    std::optional<BucketFilter> conditioning;
    double mixture_probability = 0.0;
    std::optional<double> normal_fit_probability;
    double risk_free = 0.0;
    std::optional<double> horizon_days;
    std::optional<double> expected_horizon_return;  // r_N
    std::optional<double> loss_probability;         // P_N
};

RiskReport make_risk_report(const EstimateTable& table, double threshold,
                            const std::optional<BucketFilter>& conditioning = std::nullopt,
                            std::optional<double> horizon_days = std::nullopt,
                            double risk_free = 0.0);

}  // namespace stressmodel
