#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stressmodel/series.hpp"

namespace stressmodel {

// One non-overlapping set of observations with its sample moments.
struct SampleSet {
    std::size_t index = 0;
    std::vector<LabeledObservation> observations;
    double kappa_min = 0.0;  // stress range actually spanned by the set
    double kappa_max = 0.0;
    double mu_hat = 0.0;
    double sigma_hat = 0.0;  // n-1 denominator

    std::size_t count() const noexcept { return observations.size(); }
};

// Per-stress-bucket frequencies and conditional moments. Buckets partition
// [edges.front(), inf): bucket i covers [edges[i], edges[i+1]), the last one
// is open-ended. A bucket with a single observation has no sigma and is
// flagged degenerate; an empty bucket carries no estimates and no mass.
struct EstimateTable {
    struct Bucket {
        double lower = 0.0;
        std::optional<double> upper;  // nullopt = open-ended
        double probability = 0.0;
        std::optional<double> mu;
        std::optional<double> sigma;
        std::optional<std::int64_t> count;  // nullopt for hand-entered tables

        bool populated() const noexcept { return probability > 0.0 && mu.has_value(); }
        bool degenerate() const noexcept { return populated() && !sigma.has_value(); }
    };

    std::vector<Bucket> buckets;
    std::int64_t total_count = 0;
    std::int64_t dropped_below_range = 0;  // observations with kappa < edges.front()

    // Bucket index containing kappa, or nullopt if below the first edge.
    std::optional<std::size_t> bucket_of(double kappa) const;
};

// Two-asset stress grid. Cell (i, j) covers stress decile i of asset a and
// decile j of asset b; occupancy can be sparse.
struct Grid2D {
    struct Cell {
        std::int64_t count = 0;
        double joint_probability = 0.0;
        std::optional<double> mu_a, mu_b;
        std::optional<double> sigma_a, sigma_b;
        std::optional<double> rho;

        bool occupied() const noexcept { return count > 0; }
        bool degenerate() const noexcept { return count == 1; }
    };

    std::vector<double> edges_a;  // size() cells per axis, last open-ended
    std::vector<double> edges_b;
    std::vector<Cell> cells;  // row-major: cell(i, j) = cells[i * edges_b.size() + j]
    std::int64_t total_count = 0;

    std::size_t rows() const noexcept { return edges_a.size(); }
    std::size_t cols() const noexcept { return edges_b.size(); }
    const Cell& cell(std::size_t i, std::size_t j) const { return cells[i * cols() + j]; }
    Cell& cell(std::size_t i, std::size_t j) { return cells[i * cols() + j]; }
};

enum class OrderMode { Chronological, Randomized, StressAscending, StressChangeAscending };

// Permutation of the input series. Stress sorts break ties by date;
// randomized order is a pure function of the seed. Observations without a
// kappa_change sort before all others in StressChangeAscending mode.
std::vector<LabeledObservation> order_series(const LabeledSeries& series, OrderMode mode,
                                             std::uint64_t seed = 0);

struct PartitionResult {
    std::vector<SampleSet> sets;
    std::size_t dropped = 0;  // trailing remainder
};

PartitionResult partition_fixed(const std::vector<LabeledObservation>& ordered,
                                std::size_t set_size);

// Frequency table over fixed kappa edges; probability = count / total over
// all observations that land in a bucket.
EstimateTable bucket_table(const LabeledSeries& series, const std::vector<double>& edges);

// Random half split, deterministic per seed; both halves stay date-ordered.
std::pair<LabeledSeries, LabeledSeries> split_sample(const LabeledSeries& series,
                                                     std::uint64_t seed);

// Inner-join two labeled series on date and estimate per-cell moments and the
// Pearson correlation over a deciles x deciles stress grid.
Grid2D grid_estimates(const LabeledSeries& series_a, const LabeledSeries& series_b,
                      std::size_t deciles = 10);

struct VolumeByStressPoint {
    std::size_t set_index = 0;
    double median_detrended_volume = 0.0;
};

std::vector<VolumeByStressPoint> median_volume_by_stress(const LabeledSeries& series,
                                                         std::size_t set_size = 75);

struct MuByStressChangePoint {
    double median_kappa_change = 0.0;
    double mu_hat = 0.0;
};

std::vector<MuByStressChangePoint> mu_by_stress_change(const LabeledSeries& series,
                                                       std::size_t set_size = 75);

// Sample moments (n-1 denominator for the standard deviation).
double sample_mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

}  // namespace stressmodel
