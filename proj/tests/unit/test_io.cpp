#include <doctest.h>

#include <cmath>
#include <vector>

#include "stressmodel/errors.hpp"
#include "stressmodel/io.hpp"
#include "stressmodel/rng.hpp"
#include "stressmodel/simulate.hpp"
#include "temp_dir.hpp"

namespace sm = stressmodel;

namespace {

sm::EstimateTable random_table(sm::Rng& rng) {
    sm::EstimateTable table;
    const int nb = 2 + static_cast<int>(rng.next_below(6));
    std::vector<double> probs(nb);
    double mass = 0.0;
    for (auto& p : probs) {
        p = rng.next_uniform() + 0.01;
        mass += p;
    }
    double lower = 0.0;
    for (int i = 0; i < nb; ++i) {
        sm::EstimateTable::Bucket b;
        b.lower = lower;
        lower += 5.0 + 20.0 * rng.next_uniform();
        if (i + 1 < nb) b.upper = lower;
        b.probability = probs[i] / mass;
        b.mu = 0.002 * rng.next_normal();
        b.sigma = 0.005 + 0.02 * rng.next_uniform();
        b.count = 10 + static_cast<std::int64_t>(rng.next_below(1000));
        table.buckets.push_back(b);
        table.total_count += *b.count;
    }
    return table;
}

bool tables_close(const sm::EstimateTable& a, const sm::EstimateTable& b) {
    if (a.buckets.size() != b.buckets.size()) return false;
    for (std::size_t i = 0; i < a.buckets.size(); ++i) {
        const auto& x = a.buckets[i];
        const auto& y = b.buckets[i];
        if (std::abs(x.lower - y.lower) > 1e-12) return false;
        if (x.upper.has_value() != y.upper.has_value()) return false;
        if (x.upper && std::abs(*x.upper - *y.upper) > 1e-12) return false;
        if (std::abs(x.probability - y.probability) > 1e-12) return false;
        if (x.mu.has_value() != y.mu.has_value()) return false;
        if (x.mu && std::abs(*x.mu - *y.mu) > 1e-12) return false;
        if (x.sigma.has_value() != y.sigma.has_value()) return false;
        if (x.sigma && std::abs(*x.sigma - *y.sigma) > 1e-12) return false;
        if (x.count != y.count) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("estimate table round-trips through JSON and CSV") {
    sm::Rng rng(201);
    for (int trial = 0; trial < 25; ++trial) {
        const auto table = random_table(rng);
        CHECK(tables_close(table, sm::table_from_json(sm::table_to_json(table))));
        CHECK(tables_close(table, sm::table_from_csv(sm::table_to_csv(table))));
    }
}

TEST_CASE("table JSON serialization is byte-stable") {
    sm::Rng rng(203);
    const auto table = random_table(rng);
    const auto text = sm::table_to_json(table);
    CHECK(text == sm::table_to_json(table));
    CHECK(text == sm::table_to_json(sm::table_from_json(text)));
}

TEST_CASE("hand-entered tables are normalized and validated") {
    SUBCASE("mass 0.999 is accepted and renormalized") {
        const std::string text = R"({
          "schema": "estimate_table/v1",
          "buckets": [
            {"low": 0, "high": 10, "p": 0.499, "mu": 0.001, "sigma": 0.01, "count": null},
            {"low": 10, "high": null, "p": 0.5, "mu": -0.001, "sigma": 0.02, "count": null}
          ]
        })";
        const auto table = sm::table_from_json(text);
        double mass = 0.0;
        for (const auto& b : table.buckets) mass += b.probability;
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("mass far from 1 is rejected") {
        const std::string text = R"({"buckets": [
            {"low": 0, "high": null, "p": 0.5, "mu": 0.0, "sigma": 0.01}]})";
        CHECK_THROWS_AS(sm::table_from_json(text), sm::MalformedInput);
    }
    SUBCASE("non-contiguous buckets are rejected") {
        const std::string text = R"({"buckets": [
            {"low": 0, "high": 10, "p": 0.5, "mu": 0.0, "sigma": 0.01},
            {"low": 20, "high": null, "p": 0.5, "mu": 0.0, "sigma": 0.01}]})";
        CHECK_THROWS_AS(sm::table_from_json(text), sm::MalformedInput);
    }
    SUBCASE("bad JSON is rejected") {
        CHECK_THROWS_AS(sm::table_from_json("{nope"), sm::MalformedInput);
    }
}

TEST_CASE("grid round-trips through JSON") {
    sm::JointSimConfig config;
    config.n = 5000;
    config.seed = 7;
    config.stock.kappa = {25.0, 0.9, 0.3};
    config.bond.kappa = {90.0, 0.9, 0.2};
    config.stock.mu_fn = [](double, double) { return 0.0002; };
    config.stock.sigma_fn = [](double, double) { return 0.01; };
    config.bond.mu_fn = [](double, double) { return 0.0001; };
    config.bond.sigma_fn = [](double, double) { return 0.005; };
    config.rho_fn = [](double, double) { return 0.2; };
    const auto market = sm::simulate_joint(config);
    const auto grid = sm::grid_estimates(market.stock, market.bond, 5);

    const auto restored = sm::grid_from_json(sm::grid_to_json(grid));
    REQUIRE(restored.rows() == grid.rows());
    REQUIRE(restored.cols() == grid.cols());
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            const auto& a = grid.cell(i, j);
            const auto& b = restored.cell(i, j);
            CHECK(a.count == b.count);
            if (a.occupied() && a.rho)
                CHECK(*a.rho == doctest::Approx(*b.rho).epsilon(1e-12));
        }
    }
    CHECK(sm::grid_to_json(restored) == sm::grid_to_json(grid));
}

TEST_CASE("risk report round-trips through JSON") {
    sm::RiskReport report;
    report.threshold = -0.09;
    report.mixture_probability = 7.3e-4;
    report.normal_fit_probability = 3.2e-14;
    report.risk_free = 1.6e-4;
    report.horizon_days = 100.0;
    report.expected_horizon_return = 0.0434;
    report.loss_probability = 0.0054;
    sm::BucketFilter filter;
    filter.kappa_min = 70.0;
    report.conditioning = filter;

    const auto restored = sm::risk_report_from_json(sm::risk_report_to_json(report));
    CHECK(restored.threshold == report.threshold);
    CHECK(restored.mixture_probability == report.mixture_probability);
    CHECK(restored.normal_fit_probability == report.normal_fit_probability);
    REQUIRE(restored.conditioning.has_value());
    CHECK(restored.conditioning->kappa_min == 70.0);
    CHECK(std::isinf(restored.conditioning->kappa_max));
    CHECK(restored.loss_probability == report.loss_probability);
}

TEST_CASE("labeled series CSV keeps optional columns") {
    sm::LabeledSeries series;
    sm::LabeledObservation a;
    a.date = sm::Date::from_ymd(2001, 5, 14);
    a.log_return = 0.0123;
    a.kappa = 21.5;
    a.kappa2 = 88.0;
    a.volume = 1e6;
    series.observations.push_back(a);
    const auto text = sm::labeled_series_to_csv(series);
    CHECK(text == "date,return,kappa,kappa2,volume\n2001-05-14,0.0123,21.5,88,1e+06\n");
}

TEST_CASE("sim config JSON forms") {
    SUBCASE("single-asset config with step sigma") {
        const std::string text = R"({
          "schema": "sim_config/v1",
          "n": 100, "seed": 9,
          "kappa": {"mean": 25.0, "phi": 0.9, "innovation_sigma": 0.2},
          "mu": {"type": "constant", "value": 0.0003},
          "sigma": {"type": "step", "edges": [0, 20, 35], "values": [0.005, 0.01, 0.02]},
          "volume": {"type": "hinge", "base": 1.0, "threshold": 30.0, "slope": 0.0333},
          "volume_noise": 0.05
        })";
        const auto file = sm::sim_config_from_json(text);
        REQUIRE(!file.joint);
        CHECK(file.single.n == 100);
        CHECK(file.single.kappa.phi == 0.9);
        CHECK(file.single.sigma_fn(10.0) == 0.005);
        CHECK(file.single.sigma_fn(25.0) == 0.01);
        CHECK(file.single.sigma_fn(99.0) == 0.02);
        CHECK(file.single.mu_fn(50.0) == 0.0003);
        REQUIRE(file.single.volume_fn.has_value());
        CHECK((*file.single.volume_fn)(60.0) == doctest::Approx(1.0 + 0.0333 * 30.0));
    }
    SUBCASE("joint config with threshold rho") {
        const std::string text = R"({
          "schema": "sim_config_joint/v1",
          "n": 50, "seed": 2,
          "stock": {"kappa": {"mean": 25, "phi": 0.9, "innovation_sigma": 0.3},
                    "mu": {"type": "constant", "value": 0},
                    "sigma": {"type": "linear", "intercept": 0.004, "slope": 0.0002}},
          "bond": {"kappa": {"mean": 90, "phi": 0.9, "innovation_sigma": 0.2},
                   "mu": {"type": "constant", "value": 0},
                   "sigma": {"type": "constant", "value": 0.005}},
          "kappa_rho": 0.25,
          "rho": {"type": "threshold_s", "threshold": 40, "below": 0.3, "above": -0.5}
        })";
        const auto file = sm::sim_config_from_json(text);
        REQUIRE(file.joint);
        CHECK(file.pair.kappa_rho == 0.25);
        CHECK(file.pair.rho_fn(30.0, 100.0) == 0.3);
        CHECK(file.pair.rho_fn(45.0, 100.0) == -0.5);
        CHECK(file.pair.stock.sigma_fn(10.0, 0.0) == doctest::Approx(0.006));
        CHECK(file.pair.bond.sigma_fn(10.0, 50.0) == 0.005);
    }
    SUBCASE("unknown schema and bad forms are rejected") {
        CHECK_THROWS_AS(sm::sim_config_from_json(R"({"schema": "x"})"), sm::MalformedInput);
        CHECK_THROWS_AS(sm::sim_config_from_json(R"({
            "schema": "sim_config/v1", "n": 1, "seed": 1,
            "kappa": {"mean": 25, "phi": 0.9, "innovation_sigma": 0.2},
            "mu": {"type": "wiggle"},
            "sigma": {"type": "constant", "value": 0.01}})"),
                        sm::MalformedInput);
    }
}

TEST_CASE("load_table dispatches on extension") {
    TempDir dir;
    sm::Rng rng(207);
    const auto table = random_table(rng);
    const auto json_path = dir.file("t.json");
    const auto csv_path = dir.file("t.csv");
    sm::save_text(json_path, sm::table_to_json(table));
    sm::save_text(csv_path, sm::table_to_csv(table));
    CHECK(tables_close(sm::load_table(json_path), table));
    CHECK(tables_close(sm::load_table(csv_path), table));
}

TEST_CASE("file digest is content-determined") {
    TempDir dir;
    const auto a = dir.write("a.txt", "hello\n");
    const auto b = dir.write("b.txt", "hello\n");
    const auto c = dir.write("c.txt", "other\n");
    CHECK(sm::file_digest(a) == sm::file_digest(b));
    CHECK(sm::file_digest(a) != sm::file_digest(c));
    CHECK(sm::file_digest(a).substr(0, 8) == "fnv1a64:");
}

TEST_SUITE_END();
