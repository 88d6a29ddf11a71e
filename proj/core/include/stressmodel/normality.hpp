#pragma once

#include <vector>

#include "stressmodel/estimators.hpp"
#include "stressmodel/series.hpp"

namespace stressmodel {

struct NormalityResult {
    double w_statistic = 0.0;
    double p_value = 0.0;
    std::size_t n = 0;
};

// Shapiro-Wilk W and its significance level for an uncensored sample,
// 3 <= n <= 5000 (Royston's AS R94 approximation). The input need not be
// sorted. Larger samples are rejected rather than subsampled; partition
// first.
NormalityResult shapiro_wilk(const std::vector<double>& sample);

struct RejectionSummary {
    double fraction = 0.0;       // rejecting sets / tested sets
    std::size_t tested = 0;
    std::size_t excluded = 0;    // sets a test could not be run on
    std::vector<std::size_t> excluded_indices;
    std::vector<NormalityResult> results;  // aligned with tested sets order
};

// Fraction of sets whose SW p-value falls below alpha. Sets that cannot be
// tested (too small, zero variance) are excluded and reported.
RejectionSummary pvalue_rejection_fraction(const std::vector<SampleSet>& sets,
                                           double alpha = 0.05);

// Fourth standardized central moment minus 3 (no small-sample correction).
double excess_kurtosis(const std::vector<double>& sample);

enum class RescaleMode { Concurrent, Persistence };

struct RescaledSeries {
    std::vector<DatedValue> observations;
    RescaleMode mode = RescaleMode::Concurrent;
};

// Divide each return by the table's sigma for the day's stress bucket.
// Concurrent uses the same day's kappa; persistence uses the previous
// observation's kappa as the forecast and drops the first observation.
RescaledSeries rescale_returns(const LabeledSeries& series, const EstimateTable& table,
                               RescaleMode mode);

}  // namespace stressmodel
