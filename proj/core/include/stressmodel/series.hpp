#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stressmodel/date.hpp"

namespace stressmodel {

struct DatedValue {
    Date date;
    double value = 0.0;
};

// Ordered price levels; dates strictly increasing, closes > 0.
struct PriceSeries {
    std::vector<DatedValue> entries;
};

// Ordered stress index levels; dates strictly increasing, kappa >= 0.
struct StressSeries {
    std::vector<DatedValue> entries;
};

// One trading day after labeling: the day's log return together with that
// day's stress level and optional companions.
struct LabeledObservation {
    Date date;
    double log_return = 0.0;
    double kappa = 0.0;
    std::optional<double> kappa2;            // the other market's stress (two-asset data)
    std::optional<double> kappa_change;      // one-day fractional change of kappa
    std::optional<double> volume;            // raw trading volume
    std::optional<double> detrended_volume;  // ratio to trailing median volume

    bool operator==(const LabeledObservation&) const = default;
};

struct LabeledSeries {
    std::string asset_id;
    std::vector<LabeledObservation> observations;

    std::size_t size() const noexcept { return observations.size(); }
    bool empty() const noexcept { return observations.empty(); }
    const LabeledObservation& operator[](std::size_t i) const { return observations[i]; }
};

}  // namespace stressmodel
