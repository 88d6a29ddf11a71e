#include "stressmodel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stressmodel/errors.hpp"
#include "stressmodel/rng.hpp"

namespace stressmodel {

double sample_mean(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) return 0.0;  // degenerate sample, exactly
    const double mean = sample_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::optional<std::size_t> EstimateTable::bucket_of(double kappa) const {
    if (buckets.empty() || kappa < buckets.front().lower) return std::nullopt;
    for (std::size_t i = buckets.size(); i-- > 0;)
        if (kappa >= buckets[i].lower) return i;
    return std::nullopt;
}

std::vector<LabeledObservation> order_series(const LabeledSeries& series, OrderMode mode,
                                             std::uint64_t seed) {
    if (series.empty()) throw EmptySeries("cannot order an empty series");
    std::vector<LabeledObservation> out = series.observations;

    switch (mode) {
        case OrderMode::Chronological:
            std::sort(out.begin(), out.end(),
                      [](const auto& a, const auto& b) { return a.date < b.date; });
            break;
        case OrderMode::Randomized: {
            Rng rng(seed, /*stream=*/0);
            const auto perm = random_permutation(out.size(), rng);
            std::vector<LabeledObservation> shuffled(out.size());
            for (std::size_t i = 0; i < out.size(); ++i) shuffled[i] = out[perm[i]];
            out = std::move(shuffled);
            break;
        }
        case OrderMode::StressAscending:
            std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
                return a.kappa != b.kappa ? a.kappa < b.kappa : a.date < b.date;
            });
            break;
        case OrderMode::StressChangeAscending:
            std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
                if (a.kappa_change.has_value() != b.kappa_change.has_value())
                    return !a.kappa_change.has_value();  // undefined first
                if (a.kappa_change != b.kappa_change) return a.kappa_change < b.kappa_change;
                return a.date < b.date;
            });
            break;
    }
    return out;
}

namespace {

SampleSet make_sample_set(std::size_t index,
                          std::vector<LabeledObservation> observations) {
    SampleSet set;
    set.index = index;
    std::vector<double> returns;
    returns.reserve(observations.size());
    set.kappa_min = observations.front().kappa;
    set.kappa_max = observations.front().kappa;
    for (const auto& obs : observations) {
        returns.push_back(obs.log_return);
        set.kappa_min = std::min(set.kappa_min, obs.kappa);
        set.kappa_max = std::max(set.kappa_max, obs.kappa);
    }
    set.mu_hat = sample_mean(returns);
    set.sigma_hat = returns.size() >= 2 ? sample_stddev(returns) : 0.0;
    set.observations = std::move(observations);
    return set;
}

}  // namespace

PartitionResult partition_fixed(const std::vector<LabeledObservation>& ordered,
                                std::size_t set_size) {
    if (set_size < 3) throw SetSizeTooSmall("set size must be >= 3, got " +
                                            std::to_string(set_size));
    PartitionResult result;
    const std::size_t n_sets = ordered.size() / set_size;
    result.dropped = ordered.size() - n_sets * set_size;
    result.sets.reserve(n_sets);
    for (std::size_t s = 0; s < n_sets; ++s) {
        std::vector<LabeledObservation> chunk(ordered.begin() + s * set_size,
                                              ordered.begin() + (s + 1) * set_size);
        result.sets.push_back(make_sample_set(s, std::move(chunk)));
    }
    return result;
}

EstimateTable bucket_table(const LabeledSeries& series, const std::vector<double>& edges) {
    if (series.empty()) throw NoObservations("bucket_table requires observations");
    if (edges.empty()) throw InvalidArgument("bucket_table requires at least one edge");
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw InvalidArgument("bucket edges must be strictly ascending");

    EstimateTable table;
    table.buckets.resize(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        table.buckets[i].lower = edges[i];
        if (i + 1 < edges.size()) table.buckets[i].upper = edges[i + 1];
    }

    std::vector<std::vector<double>> returns_by_bucket(edges.size());
    for (const auto& obs : series.observations) {
        const auto idx = table.bucket_of(obs.kappa);
        if (!idx) {
            ++table.dropped_below_range;
            continue;
        }
        returns_by_bucket[*idx].push_back(obs.log_return);
    }

    table.total_count = static_cast<std::int64_t>(series.size()) - table.dropped_below_range;
    if (table.total_count == 0)
        throw NoObservations("every observation falls below the first edge");

    for (std::size_t i = 0; i < table.buckets.size(); ++i) {
        auto& bucket = table.buckets[i];
        const auto& returns = returns_by_bucket[i];
        bucket.count = static_cast<std::int64_t>(returns.size());
        bucket.probability =
            static_cast<double>(returns.size()) / static_cast<double>(table.total_count);
        if (!returns.empty()) bucket.mu = sample_mean(returns);
        if (returns.size() >= 2) bucket.sigma = sample_stddev(returns);
    }
    return table;
}

std::pair<LabeledSeries, LabeledSeries> split_sample(const LabeledSeries& series,
                                                     std::uint64_t seed) {
    const std::size_t n = series.size();
    if (n < 2) throw TooFewObservations("split_sample requires >= 2 observations");

    Rng rng(seed, /*stream=*/1);
    const auto perm = random_permutation(n, rng);
    const std::size_t train_size = (n + 1) / 2;

    std::vector<bool> in_train(n, false);
    for (std::size_t i = 0; i < train_size; ++i) in_train[perm[i]] = true;

    LabeledSeries train, test;
    train.asset_id = series.asset_id;
    test.asset_id = series.asset_id;
    for (std::size_t i = 0; i < n; ++i)
        (in_train[i] ? train : test).observations.push_back(series.observations[i]);
    return {std::move(train), std::move(test)};
}

namespace {

// Empirical quantile edges: edge k is the value at rank floor(k * n / nbins)
// of the sorted sample, edge 0 the minimum. Equal counts (+-1) per bin for
// distinct values.
std::vector<double> quantile_edges(std::vector<double> values, std::size_t nbins) {
    std::sort(values.begin(), values.end());
    std::vector<double> edges(nbins);
    edges[0] = values.front();
    for (std::size_t k = 1; k < nbins; ++k)
        edges[k] = values[k * values.size() / nbins];
    return edges;
}

std::size_t edge_bucket(const std::vector<double>& edges, double v) {
    // v >= edges.front() is guaranteed by construction.
    std::size_t idx = edges.size() - 1;
    while (idx > 0 && v < edges[idx]) --idx;
    return idx;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double mx = sample_mean(xs), my = sample_mean(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

Grid2D grid_estimates(const LabeledSeries& series_a, const LabeledSeries& series_b,
                      std::size_t deciles) {
    if (deciles < 2) throw InvalidArgument("grid needs at least 2 bins per axis");

    std::map<Date, LabeledObservation> b_by_date;
    for (const auto& obs : series_b.observations) b_by_date.emplace(obs.date, obs);

    struct JointObs {
        double r_a, r_b, k_a, k_b;
    };
    std::vector<JointObs> joint;
    for (const auto& a : series_a.observations) {
        auto it = b_by_date.find(a.date);
        if (it == b_by_date.end()) continue;
        joint.push_back({a.log_return, it->second.log_return, a.kappa, it->second.kappa});
    }
    if (joint.empty()) throw EmptyJoin("no overlapping dates between the two series");

    Grid2D grid;
    {
        std::vector<double> ka, kb;
        ka.reserve(joint.size());
        kb.reserve(joint.size());
        for (const auto& j : joint) {
            ka.push_back(j.k_a);
            kb.push_back(j.k_b);
        }
        grid.edges_a = quantile_edges(std::move(ka), deciles);
        grid.edges_b = quantile_edges(std::move(kb), deciles);
    }
    grid.cells.resize(deciles * deciles);
    grid.total_count = static_cast<std::int64_t>(joint.size());

    std::vector<std::vector<double>> ra(deciles * deciles), rb(deciles * deciles);
    for (const auto& j : joint) {
        const std::size_t i = edge_bucket(grid.edges_a, j.k_a);
        const std::size_t k = edge_bucket(grid.edges_b, j.k_b);
        ra[i * deciles + k].push_back(j.r_a);
        rb[i * deciles + k].push_back(j.r_b);
    }

    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        auto& cell = grid.cells[c];
        cell.count = static_cast<std::int64_t>(ra[c].size());
        cell.joint_probability =
            static_cast<double>(cell.count) / static_cast<double>(grid.total_count);
        if (cell.count >= 1) {
            cell.mu_a = sample_mean(ra[c]);
            cell.mu_b = sample_mean(rb[c]);
        }
        if (cell.count >= 2) {
            cell.sigma_a = sample_stddev(ra[c]);
            cell.sigma_b = sample_stddev(rb[c]);
            cell.rho = pearson(ra[c], rb[c]);
        }
    }
    return grid;
}

std::vector<VolumeByStressPoint> median_volume_by_stress(const LabeledSeries& series,
                                                         std::size_t set_size) {
    for (const auto& obs : series.observations)
        if (!obs.detrended_volume)
            throw MissingVolume("observation " + obs.date.to_iso() +
                                " lacks detrended volume");

    const auto ordered = order_series(series, OrderMode::StressAscending);
    const auto partition = partition_fixed(ordered, set_size);

    std::vector<VolumeByStressPoint> out;
    out.reserve(partition.sets.size());
    for (const auto& set : partition.sets) {
        std::vector<double> vols;
        vols.reserve(set.count());
        for (const auto& obs : set.observations) vols.push_back(*obs.detrended_volume);
        std::sort(vols.begin(), vols.end());
        const std::size_t n = vols.size();
        const double median =
            n % 2 == 1 ? vols[n / 2] : 0.5 * (vols[n / 2 - 1] + vols[n / 2]);
        out.push_back({set.index, median});
    }
    return out;
}

std::vector<MuByStressChangePoint> mu_by_stress_change(const LabeledSeries& series,
                                                       std::size_t set_size) {
    LabeledSeries with_change;
    with_change.asset_id = series.asset_id;
    for (const auto& obs : series.observations)
        if (obs.kappa_change) with_change.observations.push_back(obs);
    if (with_change.size() < set_size)
        throw MissingKappaChange("need >= " + std::to_string(set_size) +
                                 " observations with kappa_change, got " +
                                 std::to_string(with_change.size()));

    const auto ordered = order_series(with_change, OrderMode::StressChangeAscending);
    const auto partition = partition_fixed(ordered, set_size);

    std::vector<MuByStressChangePoint> out;
    out.reserve(partition.sets.size());
    for (const auto& set : partition.sets) {
        std::vector<double> changes;
        changes.reserve(set.count());
        for (const auto& obs : set.observations) changes.push_back(*obs.kappa_change);
        std::sort(changes.begin(), changes.end());
        const std::size_t n = changes.size();
        const double median =
            n % 2 == 1 ? changes[n / 2] : 0.5 * (changes[n / 2 - 1] + changes[n / 2]);
        out.push_back({median, set.mu_hat});
    }
    return out;
}

}  // namespace stressmodel
