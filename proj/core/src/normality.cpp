#include "stressmodel/normality.hpp"

#include <cmath>

#include "stressmodel/errors.hpp"

namespace stressmodel {

RejectionSummary pvalue_rejection_fraction(const std::vector<SampleSet>& sets, double alpha) {
    RejectionSummary summary;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::vector<double> returns;
        returns.reserve(sets[i].count());
        for (const auto& obs : sets[i].observations) returns.push_back(obs.log_return);
        try {
            NormalityResult r = shapiro_wilk(returns);
            summary.results.push_back(r);
            ++summary.tested;
            if (r.p_value < alpha) ++rejected;
        } catch (const Error&) {
            ++summary.excluded;
            summary.excluded_indices.push_back(sets[i].index);
        }
    }
    if (summary.tested == 0) throw NoObservations("no set could be tested");
    summary.fraction = static_cast<double>(rejected) / static_cast<double>(summary.tested);
    return summary;
}

double excess_kurtosis(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    if (n < 4) throw SampleTooSmall("excess_kurtosis requires n >= 4");
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 == 0.0) throw ZeroVariance("sample has zero variance");
    return m4 / (m2 * m2) - 3.0;
}

RescaledSeries rescale_returns(const LabeledSeries& series, const EstimateTable& table,
                               RescaleMode mode) {
    auto sigma_for = [&](double kappa) {
        const auto idx = table.bucket_of(kappa);
        if (!idx || !table.buckets[*idx].populated() || !table.buckets[*idx].sigma ||
            *table.buckets[*idx].sigma <= 0.0)
            throw UnpopulatedBucket("no usable sigma for kappa = " + std::to_string(kappa));
        return *table.buckets[*idx].sigma;
    };

    RescaledSeries out;
    out.mode = mode;
    const auto& obs = series.observations;
    if (mode == RescaleMode::Concurrent) {
        out.observations.reserve(obs.size());
        for (const auto& o : obs)
            out.observations.push_back({o.date, o.log_return / sigma_for(o.kappa)});
    } else {
        if (obs.size() >= 2) out.observations.reserve(obs.size() - 1);
        for (std::size_t t = 1; t < obs.size(); ++t)
            out.observations.push_back(
                {obs[t].date, obs[t].log_return / sigma_for(obs[t - 1].kappa)});
    }
    return out;
}

}  // namespace stressmodel
