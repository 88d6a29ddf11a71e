#include "stressmodel/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stressmodel/errors.hpp"
#include "stressmodel/normal.hpp"

namespace stressmodel {

namespace {

void validate_cell(const CellParams& cell) {
    if (cell.sigma_s < 0.0 || cell.sigma_b < 0.0)
        throw InvalidArgument("cell standard deviations must be >= 0");
    if (std::abs(cell.rho) > 1.0)
        throw NonPositiveDefiniteCell("|rho| = " + std::to_string(std::abs(cell.rho)) + " > 1");
}

}  // namespace

PortfolioMoments portfolio_moments(const CellParams& cell, double bond_weight) {
    if (!(bond_weight >= 0.0 && bond_weight <= 1.0))
        throw WeightOutOfRange("bond weight must lie in [0, 1], got " +
                               std::to_string(bond_weight));
    validate_cell(cell);
    const double w = bond_weight, v = 1.0 - bond_weight;
    PortfolioMoments m;
    m.mu_p = w * cell.mu_b + v * cell.mu_s;
    m.var_p = w * w * cell.sigma_b * cell.sigma_b + v * v * cell.sigma_s * cell.sigma_s +
              2.0 * w * v * cell.rho * cell.sigma_s * cell.sigma_b;
    m.var_p = std::max(0.0, m.var_p);  // guards -0.0 / rounding at perfect hedges
    return m;
}

Frontier efficient_frontier(const CellParams& cell, double w_step) {
    if (!(w_step > 0.0 && w_step <= 0.5))
        throw InvalidArgument("w_step must lie in (0, 0.5]");
    validate_cell(cell);

    const double cross = cell.rho * cell.sigma_s * cell.sigma_b;
    const double denom =
        cell.sigma_s * cell.sigma_s + cell.sigma_b * cell.sigma_b - 2.0 * cross;
    if (!(denom > 0.0))
        throw DegenerateAssets("identical assets: the frontier collapses to a point");

    Frontier frontier;
    frontier.min_variance_weight =
        std::clamp((cell.sigma_s * cell.sigma_s - cross) / denom, 0.0, 1.0);
    const double mu_at_min =
        portfolio_moments(cell, frontier.min_variance_weight).mu_p;

    std::vector<double> weights;
    for (double w = 0.0; w < 1.0 - 1e-12; w += w_step) weights.push_back(w);
    weights.push_back(1.0);

    frontier.points.reserve(weights.size());
    for (double w : weights) {
        const auto m = portfolio_moments(cell, w);
        frontier.points.push_back({w, m.mu_p, m.var_p, m.mu_p >= mu_at_min - 1e-15});
    }
    return frontier;
}

double portfolio_mixture_cdf(const Grid2D& grid, double bond_weight, double x0) {
    if (!(bond_weight >= 0.0 && bond_weight <= 1.0))
        throw WeightOutOfRange("bond weight must lie in [0, 1], got " +
                               std::to_string(bond_weight));
    if (!std::isfinite(x0)) throw InvalidArgument("threshold must be finite");

    double p = 0.0;
    bool any = false;
    for (const auto& cell : grid.cells) {
        if (!cell.occupied()) continue;
        any = true;
        if (cell.degenerate() || !cell.sigma_a || !cell.sigma_b)
            throw DegenerateCell("occupied cell lacks second-moment estimates");
        CellParams params{*cell.mu_a, *cell.mu_b, *cell.sigma_a, *cell.sigma_b,
                          cell.rho.value_or(0.0)};
        const auto m = portfolio_moments(params, bond_weight);
        const double sd = std::sqrt(m.var_p);
        if (sd == 0.0)
            p += x0 >= m.mu_p ? cell.joint_probability : 0.0;
        else
            p += cell.joint_probability * normal_cdf((x0 - m.mu_p) / sd);
    }
    if (!any) throw EmptyGrid("grid has no occupied cells");
    return p;
}

std::vector<RegressionResult> capm_regression(const LabeledSeries& asset,
                                              const LabeledSeries& benchmark,
                                              const std::vector<double>& bucket_edges) {
    if (bucket_edges.empty() || !std::is_sorted(bucket_edges.begin(), bucket_edges.end()))
        throw InvalidArgument("bucket edges must be ascending and non-empty");

    std::map<Date, const LabeledObservation*> asset_by_date;
    for (const auto& obs : asset.observations) asset_by_date.emplace(obs.date, &obs);

    const std::size_t nb = bucket_edges.size();
    std::vector<std::vector<std::pair<double, double>>> pairs(nb);  // (bench, asset)
    for (const auto& bench : benchmark.observations) {
        auto it = asset_by_date.find(bench.date);
        if (it == asset_by_date.end()) continue;
        if (bench.kappa < bucket_edges.front()) continue;
        std::size_t idx = nb - 1;
        while (idx > 0 && bench.kappa < bucket_edges[idx]) --idx;
        pairs[idx].emplace_back(bench.log_return, it->second->log_return);
    }

    std::vector<RegressionResult> results;
    results.reserve(nb);
    for (std::size_t i = 0; i < nb; ++i) {
        RegressionResult r;
        r.bucket_low = bucket_edges[i];
        if (i + 1 < nb) r.bucket_high = bucket_edges[i + 1];
        r.n = pairs[i].size();
        if (r.n < 3)
            throw InsufficientBucketData("bucket [" + std::to_string(r.bucket_low) +
                                         ", ...) has " + std::to_string(r.n) +
                                         " joint observations, need >= 3");
        double mx = 0.0, my = 0.0;
        double x_min = pairs[i].front().first, x_max = x_min;
        for (const auto& [x, y] : pairs[i]) {
            mx += x;
            my += y;
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
        }
        if (x_min == x_max)
            throw ZeroBenchmarkVariance("bucket [" + std::to_string(r.bucket_low) +
                                        ", ...) has constant benchmark returns");
        mx /= static_cast<double>(r.n);
        my /= static_cast<double>(r.n);
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (const auto& [x, y] : pairs[i]) {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
            syy += (y - my) * (y - my);
        }
        r.beta = sxy / sxx;
        r.alpha = my - r.beta * mx;
        const double ss_res = syy - r.beta * sxy;
        r.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
        results.push_back(r);
    }
    return results;
}

}  // namespace stressmodel
