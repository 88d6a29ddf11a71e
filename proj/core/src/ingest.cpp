#include "stressmodel/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stressmodel/csv.hpp"
#include "stressmodel/errors.hpp"

namespace stressmodel {

namespace {

std::size_t require_column(const CsvTable& table, const std::string& name,
                           const std::string& path) {
    if (auto idx = table.column(name)) return *idx;
    throw MalformedInput(path + ": missing required column '" + name + "'");
}

Date parse_date_field(const CsvRow& row, std::size_t col) {
    auto d = Date::parse_iso(row.fields[col]);
    if (!d) throw MalformedRow("line " + std::to_string(row.line) + ": bad date '" +
                               row.fields[col] + "'");
    return *d;
}

double parse_numeric_field(const CsvRow& row, std::size_t col, const std::string& what) {
    auto v = parse_double(row.fields[col]);
    if (!v || !std::isfinite(*v))
        throw MalformedRow("line " + std::to_string(row.line) + ": bad " + what + " '" +
                           row.fields[col] + "'");
    return *v;
}

void require_increasing(const std::vector<DatedValue>& entries, int line) {
    if (entries.size() >= 2 && entries[entries.size() - 2].date >= entries.back().date)
        throw NonMonotonicDate("line " + std::to_string(line) + ": date " +
                               entries.back().date.to_iso() + " does not increase");
}

std::vector<DatedValue> parse_dated_file(const std::string& path, const ColumnSpec& spec) {
    const CsvTable table = read_csv(path);
    const std::size_t date_col = require_column(table, spec.date, path);
    const std::size_t value_col = require_column(table, spec.value, path);

    std::vector<DatedValue> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.push_back({parse_date_field(row, date_col),
                       parse_numeric_field(row, value_col, spec.value)});
        require_increasing(out, row.line);
    }
    return out;
}

}  // namespace

PriceSeries parse_price_series(const std::string& path, const ColumnSpec& spec) {
    const CsvTable table = read_csv(path);
    const std::size_t date_col = require_column(table, spec.date, path);
    const std::size_t value_col = require_column(table, spec.value, path);

    PriceSeries series;
    series.entries.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const Date date = parse_date_field(row, date_col);
        const double close = parse_numeric_field(row, value_col, spec.value);
        if (close <= 0.0)
            throw NonPositivePrice("line " + std::to_string(row.line) + ": close " +
                                   row.fields[value_col]);
        series.entries.push_back({date, close});
        require_increasing(series.entries, row.line);
    }
    return series;
}

StressSeries parse_stress_series(const std::string& path, const ColumnSpec& spec) {
    const CsvTable table = read_csv(path);
    const std::size_t date_col = require_column(table, spec.date, path);
    const std::size_t value_col = require_column(table, spec.value, path);

    StressSeries series;
    series.entries.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const Date date = parse_date_field(row, date_col);
        const double kappa = parse_numeric_field(row, value_col, spec.value);
        if (kappa < 0.0)
            throw MalformedRow("line " + std::to_string(row.line) + ": negative kappa " +
                               row.fields[value_col]);
        series.entries.push_back({date, kappa});
        require_increasing(series.entries, row.line);
    }
    return series;
}

std::vector<DatedValue> parse_volume_series(const std::string& path, const ColumnSpec& spec) {
    auto entries = parse_dated_file(path, spec);
    for (const auto& e : entries)
        if (e.value < 0.0)
            throw MalformedRow("negative volume on " + e.date.to_iso());
    return entries;
}

LabeledSeries parse_labeled_series(const std::string& path, const std::string& asset_id) {
    const CsvTable table = read_csv(path);
    const std::size_t date_col = require_column(table, "date", path);
    const std::size_t return_col = require_column(table, "return", path);
    const std::size_t kappa_col = require_column(table, "kappa", path);
    const auto kappa2_col = table.column("kappa2");
    const auto volume_col = table.column("volume");

    LabeledSeries series;
    series.asset_id = asset_id;
    series.observations.reserve(table.rows.size());
    Date prev_date{};
    double prev_kappa = 0.0;
    bool have_prev = false;
    for (const auto& row : table.rows) {
        LabeledObservation obs;
        obs.date = parse_date_field(row, date_col);
        obs.log_return = parse_numeric_field(row, return_col, "return");
        obs.kappa = parse_numeric_field(row, kappa_col, "kappa");
        if (obs.kappa < 0.0)
            throw MalformedRow("line " + std::to_string(row.line) + ": negative kappa");
        if (kappa2_col && !row.fields[*kappa2_col].empty())
            obs.kappa2 = parse_numeric_field(row, *kappa2_col, "kappa2");
        if (volume_col && !row.fields[*volume_col].empty())
            obs.volume = parse_numeric_field(row, *volume_col, "volume");
        if (have_prev) {
            if (obs.date <= prev_date)
                throw NonMonotonicDate("line " + std::to_string(row.line) + ": date " +
                                       obs.date.to_iso() + " does not increase");
            if (prev_kappa > 0.0) obs.kappa_change = (obs.kappa - prev_kappa) / prev_kappa;
        }
        prev_date = obs.date;
        prev_kappa = obs.kappa;
        have_prev = true;
        series.observations.push_back(std::move(obs));
    }
    return series;
}

std::vector<DatedValue> compute_log_returns(const PriceSeries& prices) {
    if (prices.entries.size() < 2)
        throw InsufficientData("need at least 2 prices, got " +
                               std::to_string(prices.entries.size()));
    std::vector<DatedValue> returns;
    returns.reserve(prices.entries.size() - 1);
    for (std::size_t i = 1; i < prices.entries.size(); ++i)
        returns.push_back({prices.entries[i].date,
                           std::log(prices.entries[i].value / prices.entries[i - 1].value)});
    return returns;
}

LabeledSeries label_with_stress(const std::vector<DatedValue>& returns, const StressSeries& stress,
                                JoinPolicy policy, JoinReport* report,
                                const std::string& asset_id) {
    (void)policy;  // only the inner join exists today
    if (returns.empty() || stress.entries.empty())
        throw EmptyJoin("both return and stress series must be non-empty");

    std::map<Date, double> stress_by_date;
    for (const auto& e : stress.entries) stress_by_date.emplace(e.date, e.value);

    LabeledSeries series;
    series.asset_id = asset_id;
    std::optional<double> prev_kappa;
    for (const auto& r : returns) {
        auto it = stress_by_date.find(r.date);
        if (it == stress_by_date.end()) {
            if (report) report->dropped_return_dates.push_back(r.date);
            continue;
        }
        LabeledObservation obs;
        obs.date = r.date;
        obs.log_return = r.value;
        obs.kappa = it->second;
        if (prev_kappa && *prev_kappa > 0.0)
            obs.kappa_change = (obs.kappa - *prev_kappa) / *prev_kappa;
        prev_kappa = obs.kappa;
        series.observations.push_back(std::move(obs));
    }
    if (report) {
        std::map<Date, double> return_by_date;
        for (const auto& r : returns) return_by_date.emplace(r.date, r.value);
        for (const auto& e : stress.entries)
            if (!return_by_date.count(e.date)) report->dropped_stress_dates.push_back(e.date);
    }
    if (series.empty()) throw EmptyJoin("no overlapping dates");
    return series;
}

std::vector<DatedValue> detrend_volume(const std::vector<DatedValue>& volumes, int window) {
    if (window < 2) throw InvalidArgument("detrend window must be >= 2");
    if (volumes.size() <= static_cast<std::size_t>(window))
        throw WindowTooLarge("window " + std::to_string(window) + " >= series length " +
                             std::to_string(volumes.size()));

    std::vector<DatedValue> out;
    out.reserve(volumes.size() - window);
    std::vector<double> buf(static_cast<std::size_t>(window));
    for (std::size_t t = static_cast<std::size_t>(window); t < volumes.size(); ++t) {
        for (int k = 0; k < window; ++k) buf[k] = volumes[t - window + k].value;
        const auto mid = buf.begin() + window / 2;
        std::nth_element(buf.begin(), mid, buf.end());
        double median = *mid;
        if (window % 2 == 0) {
            const double lower = *std::max_element(buf.begin(), mid);
            median = 0.5 * (lower + median);
        }
        if (median <= 0.0)
            throw InvalidArgument("non-positive trailing median volume at " +
                                  volumes[t].date.to_iso());
        out.push_back({volumes[t].date, volumes[t].value / median});
    }
    return out;
}

namespace {

void attach_by_date(LabeledSeries& series, const std::vector<DatedValue>& values,
                    std::optional<double> LabeledObservation::* field) {
    std::map<Date, double> by_date;
    for (const auto& v : values) by_date.emplace(v.date, v.value);
    for (auto& obs : series.observations) {
        auto it = by_date.find(obs.date);
        if (it != by_date.end()) obs.*field = it->second;
    }
}

}  // namespace

void attach_volume(LabeledSeries& series, const std::vector<DatedValue>& volumes) {
    attach_by_date(series, volumes, &LabeledObservation::volume);
}

void attach_detrended_volume(LabeledSeries& series, const std::vector<DatedValue>& ratios) {
    attach_by_date(series, ratios, &LabeledObservation::detrended_volume);
}

}  // namespace stressmodel
