// stressmodel: batch CLI for stress-conditioned return analysis.
//
// Every subcommand is a pure file-in / file-out step so whole studies can be
// scripted and diffed. Each run writes a manifest with the arguments, the
// seed, and content digests of the inputs; the manifest timestamp is the only
// non-reproducible output field.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stressmodel/csv.hpp"
#include "stressmodel/errors.hpp"
#include "stressmodel/estimators.hpp"
#include "stressmodel/ingest.hpp"
#include "stressmodel/io.hpp"
#include "stressmodel/normality.hpp"
#include "stressmodel/portfolio.hpp"
#include "stressmodel/riskmodel.hpp"
#include "stressmodel/simulate.hpp"

namespace fs = std::filesystem;
namespace sm = stressmodel;
using json = nlohmann::ordered_json;

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Artifact bookkeeping for one subcommand run.
class Run {
public:
    Run(std::string command, std::string out_dir, std::vector<std::string> argv)
        : command_(std::move(command)), out_dir_(std::move(out_dir)), argv_(std::move(argv)) {}

    void record_input(const std::string& path) {
        json entry;
        entry["path"] = path;
        entry["digest"] = sm::file_digest(path);
        inputs_.push_back(std::move(entry));
    }

    void set_seed(std::uint64_t seed) { seed_ = seed; }

    std::string write_artifact(const std::string& filename, const std::string& contents) {
        const fs::path full = fs::path(out_dir_) / filename;
        sm::write_file_atomic(full.string(), contents);
        outputs_.push_back(full.string());
        return full.string();
    }

    void finish() {
        json manifest;
        manifest["schema"] = "run_manifest/v1";
        manifest["command"] = command_;
        manifest["argv"] = argv_;
        manifest["seed"] = seed_ ? json(*seed_) : json(nullptr);
        manifest["inputs"] = inputs_;
        manifest["outputs"] = outputs_;
        manifest["timestamp"] = utc_timestamp();
        std::string name = command_;
        for (char& c : name)
            if (c == '-') c = '_';
        const fs::path full = fs::path(out_dir_) / (name + "_manifest.json");
        sm::write_file_atomic(full.string(), manifest.dump(2) + "\n");
    }

private:
    std::string command_;
    std::string out_dir_;
    std::vector<std::string> argv_;
    std::optional<std::uint64_t> seed_;
    std::vector<json> inputs_;
    std::vector<std::string> outputs_;
};

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = std::min(text.find(',', start), text.size());
        const std::string field = text.substr(start, pos - start);
        const auto v = sm::parse_double(field);
        if (!v) throw sm::InvalidArgument(std::string(what) + ": bad number '" + field + "'");
        out.push_back(*v);
        start = pos + 1;
    }
    return out;
}

// Loads a labeled series either from a combined date,return,kappa CSV or from
// a price CSV joined against a stress CSV. Decided by the header.
sm::LabeledSeries load_labeled(Run& run, const std::string& input,
                               const std::string& stress_path) {
    run.record_input(input);
    const sm::CsvTable probe = sm::read_csv(input);
    if (probe.column("return") && probe.column("kappa")) {
        if (!stress_path.empty())
            throw sm::InvalidArgument("--stress cannot be combined with a pre-labeled input");
        return sm::parse_labeled_series(input);
    }
    if (probe.column("close")) {
        if (stress_path.empty())
            throw sm::InvalidArgument("price input needs --stress to supply kappa labels");
        run.record_input(stress_path);
        const auto prices = sm::parse_price_series(input);
        const auto stress = sm::parse_stress_series(stress_path);
        const auto returns = sm::compute_log_returns(prices);
        return sm::label_with_stress(returns, stress, sm::JoinPolicy::Inner);
    }
    throw sm::MalformedInput(input + ": expected either return,kappa or close columns");
}

double threshold_from_flags(const std::optional<double>& log_thr,
                            const std::optional<double>& pct_thr) {
    if (log_thr && pct_thr)
        throw sm::InvalidArgument("--threshold and --threshold-pct are mutually exclusive");
    if (log_thr) return *log_thr;
    if (pct_thr) {
        if (*pct_thr <= -100.0)
            throw sm::InvalidArgument("--threshold-pct must exceed -100");
        return std::log1p(*pct_thr / 100.0);
    }
    throw sm::InvalidArgument("one of --threshold / --threshold-pct is required");
}

// ---------------------------------------------------------------------------
// Options shared by the subcommands. CLI11 binds flags straight into this.
struct Options {
    std::string input, input2, stress, stress2, benchmark, volume;
    std::string table, grid, config, train, test;
    std::string out_dir;
    std::string format = "json";
    std::string mode = "concurrent";
    std::string edges_text, brackets_text;
    std::size_t deciles = 10;
    std::size_t set_size = 75;
    int volume_window = 252;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold, threshold_pct;
    std::optional<double> horizon;
    std::optional<double> bucket_min, bucket_max;
    double risk_free = 0.0;
    double w_step = 0.01;
    double alpha = 0.05;
    std::optional<double> mu_s, mu_b, sigma_s, sigma_b, rho;
    std::optional<int> cell_i, cell_j;
};

int cmd_estimate(Run& run, const Options& opt) {
    if (!opt.input2.empty()) {
        const auto series_a = load_labeled(run, opt.input, opt.stress);
        const auto series_b = load_labeled(run, opt.input2, opt.stress2);
        const auto grid = sm::grid_estimates(series_a, series_b, opt.deciles);
        if (opt.format == "csv")
            run.write_artifact("grid2d.csv", sm::grid_to_csv(grid));
        else
            run.write_artifact("grid2d.json", sm::grid_to_json(grid));
        std::cout << "grid: " << grid.total_count << " joint observations over "
                  << opt.deciles << "x" << opt.deciles << " cells\n";
        return 0;
    }
    if (opt.edges_text.empty()) throw sm::InvalidArgument("--edges is required");
    const auto series = load_labeled(run, opt.input, opt.stress);
    const auto edges = parse_number_list(opt.edges_text, "--edges");
    const auto table = sm::bucket_table(series, edges);
    if (opt.format == "csv")
        run.write_artifact("estimate_table.csv", sm::table_to_csv(table));
    else
        run.write_artifact("estimate_table.json", sm::table_to_json(table));
    std::cout << "table: " << table.total_count << " observations in "
              << table.buckets.size() << " buckets";
    if (table.dropped_below_range > 0)
        std::cout << " (" << table.dropped_below_range << " below first edge)";
    std::cout << "\n";
    return 0;
}

int cmd_normality(Run& run, const Options& opt) {
    if (!opt.seed) throw sm::InvalidArgument("--seed is required (randomized ordering)");
    run.set_seed(*opt.seed);
    const auto series = load_labeled(run, opt.input, opt.stress);

    json summary;
    summary["schema"] = "normality_summary/v1";
    summary["set_size"] = opt.set_size;
    summary["alpha"] = opt.alpha;
    struct ModeSpec {
        const char* name;
        sm::OrderMode mode;
    };
    const ModeSpec modes[] = {{"chronological", sm::OrderMode::Chronological},
                              {"randomized", sm::OrderMode::Randomized},
                              {"stress_ascending", sm::OrderMode::StressAscending}};
    for (const auto& m : modes) {
        const auto ordered = sm::order_series(series, m.mode, *opt.seed);
        const auto partition = sm::partition_fixed(ordered, opt.set_size);
        const auto rejection = sm::pvalue_rejection_fraction(partition.sets, opt.alpha);
        // per-set CSV carries only the testable sets
        std::vector<sm::SampleSet> tested;
        for (const auto& set : partition.sets) {
            const bool excluded =
                std::find(rejection.excluded_indices.begin(), rejection.excluded_indices.end(),
                          set.index) != rejection.excluded_indices.end();
            if (!excluded) tested.push_back(set);
        }
        run.write_artifact(std::string("normality_") + m.name + ".csv",
                           sm::normality_results_to_csv(tested, rejection.results));
        json jm;
        jm["sets"] = partition.sets.size();
        jm["dropped_observations"] = partition.dropped;
        jm["tested"] = rejection.tested;
        jm["excluded"] = rejection.excluded;
        jm["rejection_fraction"] = rejection.fraction;
        summary[m.name] = std::move(jm);
        std::cout << m.name << ": rejection fraction " << rejection.fraction << " over "
                  << rejection.tested << " sets\n";
    }
    run.write_artifact("normality_summary.json", summary.dump(2) + "\n");
    return 0;
}

int cmd_risk(Run& run, const Options& opt) {
    if (opt.table.empty()) throw sm::InvalidArgument("--table is required");
    run.record_input(opt.table);
    const auto table = sm::load_table(opt.table);
    const double x0 = threshold_from_flags(opt.threshold, opt.threshold_pct);

    std::optional<sm::BucketFilter> filter;
    if (opt.bucket_min || opt.bucket_max) {
        sm::BucketFilter f;
        if (opt.bucket_min) f.kappa_min = *opt.bucket_min;
        if (opt.bucket_max) f.kappa_max = *opt.bucket_max;
        filter = f;
    }
    const auto report = sm::make_risk_report(table, x0, filter, opt.horizon, opt.risk_free);
    run.write_artifact("risk_report.json", sm::risk_report_to_json(report));

    std::printf("threshold (log return): %.6g\n", report.threshold);
    if (filter)
        std::printf("conditioning:           kappa in [%g, %g)\n", filter->kappa_min,
                    filter->kappa_max);
    std::printf("mixture P(r < x0):      %.6e\n", report.mixture_probability);
    if (report.normal_fit_probability)
        std::printf("normal fit P(r < x0):   %.6e\n", *report.normal_fit_probability);
    if (report.expected_horizon_return)
        std::printf("r_N (N=%g):             %.6g\n", *report.horizon_days,
                    *report.expected_horizon_return);
    if (report.loss_probability)
        std::printf("P_N:                    %.6e\n", *report.loss_probability);
    std::printf("risk_free (per day):    %g\n", report.risk_free);
    return 0;
}

int cmd_rescale(Run& run, const Options& opt) {
    if (opt.table.empty()) throw sm::InvalidArgument("--table is required");
    const auto series = load_labeled(run, opt.input, opt.stress);
    run.record_input(opt.table);
    const auto table = sm::load_table(opt.table);
    sm::RescaleMode mode;
    if (opt.mode == "concurrent")
        mode = sm::RescaleMode::Concurrent;
    else if (opt.mode == "persistence")
        mode = sm::RescaleMode::Persistence;
    else
        throw sm::InvalidArgument("--mode must be concurrent or persistence");
    const auto rescaled = sm::rescale_returns(series, table, mode);
    run.write_artifact("rescaled_returns.csv", sm::rescaled_series_to_csv(rescaled));
    std::cout << "rescaled " << rescaled.observations.size() << " returns (" << opt.mode
              << ")\n";
    return 0;
}

int cmd_mu_by_dkappa(Run& run, const Options& opt) {
    const auto series = load_labeled(run, opt.input, opt.stress);
    const auto points = sm::mu_by_stress_change(series, opt.set_size);
    std::string csv = "median_dkappa,mu\n";
    for (const auto& p : points)
        csv += sm::format_double(p.median_kappa_change) + "," + sm::format_double(p.mu_hat) +
               "\n";
    run.write_artifact("mu_by_dkappa.csv", csv);
    std::cout << points.size() << " windowed estimates\n";
    return 0;
}

int cmd_volume_by_stress(Run& run, const Options& opt) {
    auto series = load_labeled(run, opt.input, opt.stress);

    std::vector<sm::DatedValue> volumes;
    if (!opt.volume.empty()) {
        run.record_input(opt.volume);
        volumes = sm::parse_volume_series(opt.volume);
    } else {
        for (const auto& obs : series.observations)
            if (obs.volume) volumes.push_back({obs.date, *obs.volume});
        if (volumes.empty())
            throw sm::MissingVolume("no volume column in input and no --volume file");
    }
    const auto ratios = sm::detrend_volume(volumes, opt.volume_window);
    sm::attach_detrended_volume(series, ratios);

    sm::LabeledSeries usable;
    usable.asset_id = series.asset_id;
    for (const auto& obs : series.observations)
        if (obs.detrended_volume) usable.observations.push_back(obs);
    if (usable.empty()) throw sm::MissingVolume("no observations after the detrend window");

    const auto points = sm::median_volume_by_stress(usable, opt.set_size);
    std::string csv = "set_index,median_detrended_volume\n";
    for (const auto& p : points)
        csv += std::to_string(p.set_index) + "," + sm::format_double(p.median_detrended_volume) +
               "\n";
    run.write_artifact("volume_by_stress.csv", csv);
    std::cout << points.size() << " stress-ordered volume sets ("
              << series.size() - usable.size() << " observations before detrend window)\n";
    return 0;
}

int cmd_frontier(Run& run, const Options& opt) {
    sm::CellParams cell;
    if (!opt.grid.empty()) {
        if (!opt.cell_i || !opt.cell_j)
            throw sm::InvalidArgument("--grid requires --cell-i and --cell-j");
        run.record_input(opt.grid);
        const auto grid = sm::grid_from_json(sm::read_text_file(opt.grid));
        const std::size_t i = static_cast<std::size_t>(*opt.cell_i);
        const std::size_t j = static_cast<std::size_t>(*opt.cell_j);
        if (i >= grid.rows() || j >= grid.cols())
            throw sm::InvalidArgument("cell index out of range");
        const auto& c = grid.cell(i, j);
        if (!c.occupied()) throw sm::EmptyGrid("requested cell has no observations");
        if (c.degenerate() || !c.sigma_a || !c.sigma_b || !c.rho)
            throw sm::DegenerateCell("requested cell lacks second-moment estimates");
        cell = {*c.mu_a, *c.mu_b, *c.sigma_a, *c.sigma_b, *c.rho};
    } else {
        if (!(opt.mu_s && opt.mu_b && opt.sigma_s && opt.sigma_b && opt.rho))
            throw sm::InvalidArgument(
                "need --grid with cell indices, or all of --mu-s --mu-b --sigma-s --sigma-b "
                "--rho");
        cell = {*opt.mu_s, *opt.mu_b, *opt.sigma_s, *opt.sigma_b, *opt.rho};
    }
    const auto frontier = sm::efficient_frontier(cell, opt.w_step);
    run.write_artifact("frontier.csv", sm::frontier_to_csv(frontier));
    json summary;
    summary["schema"] = "frontier_summary/v1";
    summary["min_variance_weight"] = frontier.min_variance_weight;
    summary["cell"] = {{"mu_s", cell.mu_s},
                       {"mu_b", cell.mu_b},
                       {"sigma_s", cell.sigma_s},
                       {"sigma_b", cell.sigma_b},
                       {"rho", cell.rho}};
    run.write_artifact("frontier_summary.json", summary.dump(2) + "\n");
    std::printf("min-variance bond weight: %.6g\n", frontier.min_variance_weight);
    return 0;
}

int cmd_capm(Run& run, const Options& opt) {
    if (opt.benchmark.empty()) throw sm::InvalidArgument("--benchmark is required");
    if (opt.edges_text.empty()) throw sm::InvalidArgument("--edges is required");
    const auto asset = load_labeled(run, opt.input, opt.stress);
    const auto bench = load_labeled(run, opt.benchmark, opt.stress2);
    const auto edges = parse_number_list(opt.edges_text, "--edges");
    const auto results = sm::capm_regression(asset, bench, edges);
    run.write_artifact("capm_regressions.csv", sm::regressions_to_csv(results));
    for (const auto& r : results)
        std::printf("bucket [%g, %s): alpha=%.3e beta=%.4f R2=%.4f n=%zu\n", r.bucket_low,
                    r.bucket_high ? sm::format_double(*r.bucket_high).c_str() : "inf", r.alpha,
                    r.beta, r.r_squared, r.n);
    return 0;
}

int cmd_simulate(Run& run, const Options& opt) {
    if (opt.config.empty()) throw sm::InvalidArgument("--config is required");
    run.record_input(opt.config);
    const auto config = sm::sim_config_from_json(sm::read_text_file(opt.config));
    if (config.joint) {
        run.set_seed(config.pair.seed);
        const auto market = sm::simulate_joint(config.pair);
        run.write_artifact("simulated_stock.csv", sm::labeled_series_to_csv(market.stock));
        run.write_artifact("simulated_bond.csv", sm::labeled_series_to_csv(market.bond));
        std::cout << "simulated " << market.stock.size() << " joint days\n";
    } else {
        run.set_seed(config.single.seed);
        const auto market = sm::simulate_market(config.single);
        run.write_artifact("simulated_market.csv",
                           sm::labeled_series_to_csv(market.observations));
        std::cout << "simulated " << market.observations.size() << " days\n";
    }
    return 0;
}

int cmd_split(Run& run, const Options& opt) {
    if (!opt.seed) throw sm::InvalidArgument("--seed is required");
    run.set_seed(*opt.seed);
    const auto series = load_labeled(run, opt.input, opt.stress);
    const auto [train, test] = sm::split_sample(series, *opt.seed);
    run.write_artifact("train.csv", sm::labeled_series_to_csv(train));
    run.write_artifact("test.csv", sm::labeled_series_to_csv(test));
    std::cout << "split " << series.size() << " observations into " << train.size() << " / "
              << test.size() << "\n";
    return 0;
}

int cmd_validate(Run& run, const Options& opt) {
    if (opt.train.empty() || opt.test.empty())
        throw sm::InvalidArgument("--train and --test are required");
    if (opt.edges_text.empty()) throw sm::InvalidArgument("--edges is required");
    run.record_input(opt.train);
    run.record_input(opt.test);
    const auto train = sm::parse_labeled_series(opt.train);
    const auto test = sm::parse_labeled_series(opt.test);
    const auto edges = parse_number_list(opt.edges_text, "--edges");
    const auto table = sm::bucket_table(train, edges);

    std::vector<double> brackets;
    if (!opt.brackets_text.empty()) {
        brackets = parse_number_list(opt.brackets_text, "--brackets");
        if (brackets.size() < 2 || !std::is_sorted(brackets.begin(), brackets.end()))
            throw sm::InvalidArgument("--brackets needs >= 2 ascending edges");
    } else {
        for (int i = -5; i <= 5; ++i) brackets.push_back(0.01 * i);
    }

    const double n_test = static_cast<double>(test.size());
    std::string csv = "bracket_low,bracket_high,predicted,observed,n_test,z\n";
    double max_abs_z = 0.0;
    for (std::size_t i = 0; i + 1 < brackets.size(); ++i) {
        const double lo = brackets[i], hi = brackets[i + 1];
        const double predicted = sm::interval_probability(table, lo, hi);
        std::size_t count = 0;
        for (const auto& obs : test.observations)
            count += (obs.log_return >= lo && obs.log_return < hi);
        const double observed = static_cast<double>(count) / n_test;
        const double se = std::sqrt(std::max(predicted * (1.0 - predicted), 0.0) / n_test);
        const double z = se > 0.0 ? (observed - predicted) / se
                                  : (observed == predicted ? 0.0 : INFINITY);
        max_abs_z = std::max(max_abs_z, std::abs(z));
        csv += sm::format_double(lo) + "," + sm::format_double(hi) + "," +
               sm::format_double(predicted) + "," + sm::format_double(observed) + "," +
               sm::format_double(n_test) + "," + sm::format_double(z) + "\n";
    }
    run.write_artifact("validation.csv", csv);
    json summary;
    summary["schema"] = "validation_summary/v1";
    summary["brackets"] = brackets.size() - 1;
    summary["n_test"] = test.size();
    summary["max_abs_z"] = max_abs_z;
    run.write_artifact("validation_summary.json", summary.dump(2) + "\n");
    std::printf("max |z| over %zu brackets: %.3f\n", brackets.size() - 1, max_abs_z);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stress-conditioned random-walk toolkit"};
    app.require_subcommand(1);

    Options opt;
    const char* env_out = std::getenv("STRESSMODEL_OUT");
    opt.out_dir = env_out ? env_out : ".";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", opt.out_dir, "output directory (env STRESSMODEL_OUT)");
        sub->add_option("--format", opt.format, "artifact format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };
    auto add_input = [&](CLI::App* sub, bool required = true) {
        auto* o = sub->add_option("--input", opt.input,
                                  "labeled CSV (date,return,kappa[,kappa2][,volume]) or price "
                                  "CSV (date,close) with --stress");
        if (required) o->required();
        sub->add_option("--stress", opt.stress, "stress CSV (date,kappa) for price inputs");
    };

    int rc = 0;
    std::function<int(Run&)> action;

    auto* est = app.add_subcommand("estimate",
                                   "frequency table over kappa buckets, or a 2-D stress grid");
    add_input(est);
    est->add_option("--input2", opt.input2, "second asset's labeled CSV (grid mode)");
    est->add_option("--stress2", opt.stress2, "stress CSV for --input2 price input");
    est->add_option("--edges", opt.edges_text, "kappa bucket edges, e.g. 0,10,20,...,70");
    est->add_option("--deciles", opt.deciles, "bins per axis in grid mode [10]");
    add_common(est);
    est->callback([&] { action = [&](Run& run) { return cmd_estimate(run, opt); }; });

    auto* nor = app.add_subcommand(
        "normality", "Shapiro-Wilk per 75-observation set for all three orderings");
    add_input(nor);
    nor->add_option("--set-size", opt.set_size, "observations per set [75]");
    nor->add_option("--seed", opt.seed, "seed for the randomized ordering")->required();
    nor->add_option("--alpha", opt.alpha, "rejection level [0.05]");
    add_common(nor);
    nor->callback([&] { action = [&](Run& run) { return cmd_normality(run, opt); }; });

    auto* risk = app.add_subcommand("risk", "mixture tail probabilities from a saved table");
    risk->add_option("--table", opt.table, "estimate table (.json or .csv)")->required();
    risk->add_option("--threshold", opt.threshold, "per-day log-return threshold x0");
    risk->add_option("--threshold-pct", opt.threshold_pct,
                     "simple percent threshold; converted as ln(1 + p/100)");
    risk->add_option("--bucket-min", opt.bucket_min, "condition on kappa >= this");
    risk->add_option("--bucket-max", opt.bucket_max, "condition on kappa < this");
    risk->add_option("--horizon", opt.horizon, "N days for r_N and P_N");
    risk->add_option("--risk-free", opt.risk_free, "per-day risk-free rate [0]");
    add_common(risk);
    risk->callback([&] { action = [&](Run& run) { return cmd_risk(run, opt); }; });

    auto* res = app.add_subcommand("rescale", "divide each return by sigma(kappa)");
    add_input(res);
    res->add_option("--table", opt.table, "estimate table supplying sigma(kappa)")->required();
    res->add_option("--mode", opt.mode, "concurrent or persistence [concurrent]");
    add_common(res);
    res->callback([&] { action = [&](Run& run) { return cmd_rescale(run, opt); }; });

    auto* mud = app.add_subcommand("mu-by-dkappa",
                                   "windowed mean return sorted by one-day stress change");
    add_input(mud);
    mud->add_option("--set-size", opt.set_size, "observations per set [75]");
    add_common(mud);
    mud->callback([&] { action = [&](Run& run) { return cmd_mu_by_dkappa(run, opt); }; });

    auto* vol = app.add_subcommand("volume-by-stress",
                                   "median detrended volume per stress-ordered set");
    add_input(vol);
    vol->add_option("--volume", opt.volume, "separate volume CSV (date,volume)");
    vol->add_option("--volume-window", opt.volume_window, "detrend window days [252]");
    vol->add_option("--set-size", opt.set_size, "observations per set [75]");
    add_common(vol);
    vol->callback([&] { action = [&](Run& run) { return cmd_volume_by_stress(run, opt); }; });

    auto* fro = app.add_subcommand("frontier", "two-asset frontier for one stress cell");
    fro->add_option("--grid", opt.grid, "grid2d JSON from estimate --input2");
    fro->add_option("--cell-i", opt.cell_i, "stock-stress cell index");
    fro->add_option("--cell-j", opt.cell_j, "bond-stress cell index");
    fro->add_option("--mu-s", opt.mu_s, "stock mean (direct cell entry)");
    fro->add_option("--mu-b", opt.mu_b, "bond mean");
    fro->add_option("--sigma-s", opt.sigma_s, "stock standard deviation");
    fro->add_option("--sigma-b", opt.sigma_b, "bond standard deviation");
    fro->add_option("--rho", opt.rho, "correlation");
    fro->add_option("--w-step", opt.w_step, "bond-weight grid spacing [0.01]");
    add_common(fro);
    fro->callback([&] { action = [&](Run& run) { return cmd_frontier(run, opt); }; });

    auto* capm = app.add_subcommand("capm", "per-stress-bucket OLS of asset vs benchmark");
    add_input(capm);
    capm->add_option("--benchmark", opt.benchmark, "benchmark labeled CSV")->required();
    capm->add_option("--stress2", opt.stress2, "stress CSV for a price benchmark");
    capm->add_option("--edges", opt.edges_text, "kappa bucket edges")->required();
    add_common(capm);
    capm->callback([&] { action = [&](Run& run) { return cmd_capm(run, opt); }; });

    auto* sim = app.add_subcommand("simulate", "synthetic market from a JSON config");
    sim->add_option("--config", opt.config, "sim_config/v1 or sim_config_joint/v1 JSON")
        ->required();
    add_common(sim);
    sim->callback([&] { action = [&](Run& run) { return cmd_simulate(run, opt); }; });

    auto* spl = app.add_subcommand("split", "random half split into train.csv / test.csv");
    add_input(spl);
    spl->add_option("--seed", opt.seed, "split seed")->required();
    add_common(spl);
    spl->callback([&] { action = [&](Run& run) { return cmd_split(run, opt); }; });

    auto* val = app.add_subcommand(
        "validate", "train-table predictions vs test-set bracket frequencies");
    val->add_option("--train", opt.train, "training labeled CSV")->required();
    val->add_option("--test", opt.test, "held-out labeled CSV")->required();
    val->add_option("--edges", opt.edges_text, "kappa bucket edges for the table")->required();
    val->add_option("--brackets", opt.brackets_text,
                    "return bracket edges [-0.05..0.05 step 0.01]");
    add_common(val);
    val->callback([&] { action = [&](Run& run) { return cmd_validate(run, opt); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return 2;
    }

    std::vector<std::string> argv_copy(argv, argv + argc);
    const std::string command = app.get_subcommands().front()->get_name();
    Run run(command, opt.out_dir, argv_copy);
    try {
        rc = action(run);
        run.finish();
    } catch (const sm::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
