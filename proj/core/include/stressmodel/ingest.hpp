#pragma once

#include <string>
#include <vector>

#include "stressmodel/series.hpp"

namespace stressmodel {

// Column names for the two-column dated files (price, stress, volume).
struct ColumnSpec {
    std::string date = "date";
    std::string value = "close";
};

// Strict parsers: a malformed row is an error, not a skip. Dates must be
// ISO-8601 and strictly increasing.
PriceSeries parse_price_series(const std::string& path, const ColumnSpec& spec = {});
StressSeries parse_stress_series(const std::string& path,
                                 const ColumnSpec& spec = {.date = "date", .value = "kappa"});
std::vector<DatedValue> parse_volume_series(const std::string& path,
                                            const ColumnSpec& spec = {.date = "date",
                                                                      .value = "volume"});

// Combined pre-labeled file: date,return,kappa[,kappa2][,volume].
LabeledSeries parse_labeled_series(const std::string& path, const std::string& asset_id = "");

// return_t = ln(close_t / close_{t-1}); output has one fewer entry.
std::vector<DatedValue> compute_log_returns(const PriceSeries& prices);

enum class JoinPolicy { Inner };

struct JoinReport {
    std::vector<Date> dropped_return_dates;  // return days without a stress label
    std::vector<Date> dropped_stress_dates;  // stress days without a return
};

// Inner join on date; each retained day carries that day's kappa.
// kappa_change is the fractional change from the previous retained
// observation's kappa (holidays collapse to the prior joined day).
LabeledSeries label_with_stress(const std::vector<DatedValue>& returns, const StressSeries& stress,
                                JoinPolicy policy, JoinReport* report = nullptr,
                                const std::string& asset_id = "");

// detrended_t = volume_t / median(volume over the previous `window` days).
// The first `window` days have no trailing window and are omitted.
std::vector<DatedValue> detrend_volume(const std::vector<DatedValue>& volumes, int window);

// Attach raw / detrended volume to matching dates of an existing labeled
// series; non-matching observations keep their fields unset.
void attach_volume(LabeledSeries& series, const std::vector<DatedValue>& volumes);
void attach_detrended_volume(LabeledSeries& series, const std::vector<DatedValue>& ratios);

}  // namespace stressmodel
