#include "stressmodel/riskmodel.hpp"

#include <algorithm>
#include <cmath>

#include "stressmodel/errors.hpp"

namespace stressmodel {

double MixtureMoments::stddev() const { return std::sqrt(variance); }

namespace {

// Populated buckets with validated sigma, plus their (possibly renormalized)
// weights.
struct Component {
    double weight, mu, sigma;
};

std::vector<Component> components(const EstimateTable& table, const BucketFilter* filter) {
    std::vector<Component> out;
    double mass = 0.0;
    for (const auto& bucket : table.buckets) {
        if (!bucket.populated()) continue;
        if (filter) {
            const double upper =
                bucket.upper.value_or(std::numeric_limits<double>::infinity());
            if (bucket.lower < filter->kappa_min || upper > filter->kappa_max) continue;
        }
        if (!bucket.sigma)
            throw DegenerateBucket("bucket at [" + std::to_string(bucket.lower) +
                                   ", ...) has no sigma estimate");
        out.push_back({bucket.probability, *bucket.mu, *bucket.sigma});
        mass += bucket.probability;
    }
    if (out.empty()) {
        if (filter) throw EmptySelection("no populated bucket inside the filter");
        throw EmptyTable("table has no populated buckets");
    }
    for (auto& c : out) c.weight /= mass;  // exact no-op when mass == 1
    return out;
}

double cdf_of(const std::vector<Component>& comps, double x0) {
    double p = 0.0;
    for (const auto& c : comps) {
        if (c.sigma == 0.0)
            p += x0 >= c.mu ? c.weight : 0.0;
        else
            p += c.weight * normal_cdf((x0 - c.mu) / c.sigma);
    }
    return p;
}

}  // namespace

double mixture_cdf(const EstimateTable& table, double x0) {
    if (!std::isfinite(x0)) throw InvalidArgument("threshold must be finite");
    return cdf_of(components(table, nullptr), x0);
}

double interval_probability(const EstimateTable& table, double a, double b) {
    if (!(a < b)) throw InvalidInterval("need a < b, got [" + std::to_string(a) + ", " +
                                        std::to_string(b) + ")");
    const auto comps = components(table, nullptr);
    return std::max(0.0, cdf_of(comps, b) - cdf_of(comps, a));
}

double conditional_cdf(const EstimateTable& table, const BucketFilter& filter, double x0) {
    if (!std::isfinite(x0)) throw InvalidArgument("threshold must be finite");
    return cdf_of(components(table, &filter), x0);
}

MixtureMoments mixture_moments(const EstimateTable& table) {
    const auto comps = components(table, nullptr);
    MixtureMoments m;
    for (const auto& c : comps) m.mean += c.weight * c.mu;
    double m4 = 0.0;
    for (const auto& c : comps) {
        const double d = c.mu - m.mean;
        const double v = c.sigma * c.sigma;
        m.variance += c.weight * (d * d + v);
        m4 += c.weight * (d * d * d * d + 6.0 * d * d * v + 3.0 * v * v);
    }
    m.excess_kurtosis = m.variance > 0.0 ? m4 / (m.variance * m.variance) - 3.0 : 0.0;
    return m;
}

double normal_fit_cdf(const MixtureMoments& moments, double x0) {
    if (!(moments.variance > 0.0)) throw ZeroVariance("normal fit needs positive variance");
    return normal_cdf((x0 - moments.mean) / moments.stddev());
}

double normal_fit_cdf(const std::vector<double>& sample, double x0) {
    if (sample.size() < 2) throw SampleTooSmall("normal fit needs >= 2 observations");
    MixtureMoments m;
    m.mean = sample_mean(sample);
    const double sd = sample_stddev(sample);
    m.variance = sd * sd;
    return normal_fit_cdf(m, x0);
}

double expected_n_day_return(const EstimateTable& table, double horizon_days) {
    if (horizon_days < 0.0) throw NegativeHorizon("horizon must be >= 0 days");
    return horizon_days * mixture_moments(table).mean;
}

double loss_probability_pn(const EstimateTable& table, double horizon_days) {
    if (horizon_days < 1.0) throw NegativeHorizon("P_N needs a horizon of >= 1 day");
    return mixture_cdf(table, -expected_n_day_return(table, horizon_days));
}

double sharpe_ratio(const MixtureMoments& moments, double risk_free_per_day) {
    if (!(moments.variance > 0.0)) throw ZeroVariance("Sharpe ratio needs positive variance");
    return (moments.mean - risk_free_per_day) / moments.stddev();
}

double sharpe_ratio(const std::vector<double>& sample, double risk_free_per_day) {
    if (sample.size() < 2) throw SampleTooSmall("Sharpe ratio needs >= 2 observations");
    MixtureMoments m;
    m.mean = sample_mean(sample);
    const double sd = sample_stddev(sample);
    m.variance = sd * sd;
    return sharpe_ratio(m, risk_free_per_day);
}

RiskReport make_risk_report(const EstimateTable& table, double threshold,
                            const std::optional<BucketFilter>& conditioning,
                            std::optional<double> horizon_days, double risk_free) {
    RiskReport report;
    report.threshold = threshold;
    report.conditioning = conditioning;
    report.risk_free = risk_free;
    report.mixture_probability = conditioning ? conditional_cdf(table, *conditioning, threshold)
                                              : mixture_cdf(table, threshold);
    if (!conditioning) {
        report.normal_fit_probability = normal_fit_cdf(mixture_moments(table), threshold);
        if (horizon_days) {
            report.horizon_days = horizon_days;
            report.expected_horizon_return = expected_n_day_return(table, *horizon_days);
            report.loss_probability = loss_probability_pn(table, *horizon_days);
        }
    }
    return report;
}

}  // namespace stressmodel
