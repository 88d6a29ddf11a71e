#pragma once

#include <optional>
#include <vector>

#include "stressmodel/estimators.hpp"
#include "stressmodel/series.hpp"

namespace stressmodel {

// Per-day moments of the two assets inside one stress cell.
struct CellParams {
    double mu_s = 0.0;     // stock (asset a)
    double mu_b = 0.0;     // bond (asset b)
    double sigma_s = 0.0;
    double sigma_b = 0.0;
    double rho = 0.0;
};

struct PortfolioMoments {
    double mu_p = 0.0;
    double var_p = 0.0;
};

// w is the bond weight, long-only: mu_p = w mu_b + (1-w) mu_s,
// var_p = w^2 s_b^2 + (1-w)^2 s_s^2 + 2 w (1-w) rho s_s s_b.
PortfolioMoments portfolio_moments(const CellParams& cell, double bond_weight);

struct FrontierPoint {
    double w = 0.0;  // bond weight
    double mu_p = 0.0;
    double var_p = 0.0;
    bool efficient = false;  // on or above the minimum-variance point
};

struct Frontier {
    std::vector<FrontierPoint> points;
    double min_variance_weight = 0.0;  // analytic w*, clamped to [0, 1]
};

// Frontier sampled at w = 0, w_step, ..., 1 with the analytic long-only
// minimum-variance weight. Throws DegenerateAssets when the assets are
// indistinguishable (sigma_s == sigma_b, rho == 1).
Frontier efficient_frontier(const CellParams& cell, double w_step);

// Two-dimensional mixture CDF: per-cell bivariate-normal portfolio return
// weighted by the cell's joint stress probability.
double portfolio_mixture_cdf(const Grid2D& grid, double bond_weight, double x0);

struct RegressionResult {
    double bucket_low = 0.0;
    std::optional<double> bucket_high;  // nullopt = open-ended
    double alpha = 0.0;
    double beta = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

// Per-stress-bucket OLS of asset returns on benchmark returns; observations
// join on date and bucket by the benchmark's stress level.
std::vector<RegressionResult> capm_regression(const LabeledSeries& asset,
                                              const LabeledSeries& benchmark,
                                              const std::vector<double>& bucket_edges);

}  // namespace stressmodel
