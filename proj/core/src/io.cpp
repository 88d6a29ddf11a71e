#include "stressmodel/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stressmodel/csv.hpp"
#include "stressmodel/errors.hpp"

namespace stressmodel {

using json = nlohmann::ordered_json;

namespace {

json opt_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw MalformedInput(std::string("invalid JSON in ") + what);
    return j;
}

// Hand-entered tables (the published-table workflow) often carry rounded
// probabilities; mass within 2% of 1 is renormalized, anything further off
// is rejected.
void normalize_mass(EstimateTable& table) {
    double mass = 0.0;
    for (const auto& b : table.buckets)
        if (b.populated()) mass += b.probability;
    if (mass <= 0.0) throw MalformedInput("table probability mass is zero");
    if (std::abs(mass - 1.0) > 0.02)
        throw MalformedInput("table probability mass " + std::to_string(mass) +
                             " is not within 2% of 1");
    if (std::abs(mass - 1.0) <= 1e-12) return;  // already normalized, keep bytes stable
    for (auto& b : table.buckets) b.probability /= mass;
}

void validate_table(const EstimateTable& table) {
    double prev_lower = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.buckets.size(); ++i) {
        const auto& b = table.buckets[i];
        if (b.lower <= prev_lower) throw MalformedInput("bucket edges must be ascending");
        prev_lower = b.lower;
        if (b.upper && *b.upper <= b.lower)
            throw MalformedInput("bucket upper edge must exceed its lower edge");
        if (b.upper && i + 1 < table.buckets.size() &&
            std::abs(*b.upper - table.buckets[i + 1].lower) > 1e-12)
            throw MalformedInput("buckets must tile contiguously");
        if (!b.upper && i + 1 != table.buckets.size())
            throw MalformedInput("only the last bucket may be open-ended");
        if (b.probability < 0.0) throw MalformedInput("negative bucket probability");
        if (b.probability > 0.0 && !b.mu)
            throw MalformedInput("bucket with probability mass needs a mu estimate");
        if (b.sigma && *b.sigma < 0.0) throw MalformedInput("negative bucket sigma");
    }
}

}  // namespace

std::string table_to_json(const EstimateTable& table) {
    json j;
    j["schema"] = "estimate_table/v1";
    j["total_count"] = table.total_count;
    j["dropped_below_range"] = table.dropped_below_range;
    j["buckets"] = json::array();
    for (const auto& b : table.buckets) {
        json jb;
        jb["low"] = b.lower;
        jb["high"] = b.upper ? json(*b.upper) : json(nullptr);
        jb["p"] = b.probability;
        jb["mu"] = opt_to_json(b.mu);
        jb["sigma"] = opt_to_json(b.sigma);
        jb["count"] = b.count ? json(*b.count) : json(nullptr);
        j["buckets"].push_back(std::move(jb));
    }
    return j.dump(2) + "\n";
}

EstimateTable table_from_json(const std::string& text) {
    const json j = parse_json(text, "estimate table");
    if (!j.contains("buckets") || !j["buckets"].is_array() || j["buckets"].empty())
        throw MalformedInput("estimate table needs a non-empty 'buckets' array");
    EstimateTable table;
    table.total_count = j.value("total_count", std::int64_t{0});
    table.dropped_below_range = j.value("dropped_below_range", std::int64_t{0});
    for (const auto& jb : j["buckets"]) {
        EstimateTable::Bucket b;
        b.lower = jb.at("low").get<double>();
        if (jb.contains("high") && !jb["high"].is_null()) b.upper = jb["high"].get<double>();
        b.probability = jb.at("p").get<double>();
        if (jb.contains("mu")) b.mu = opt_from_json(jb["mu"]);
        if (jb.contains("sigma")) b.sigma = opt_from_json(jb["sigma"]);
        if (jb.contains("count") && !jb["count"].is_null())
            b.count = jb["count"].get<std::int64_t>();
        table.buckets.push_back(std::move(b));
    }
    validate_table(table);
    normalize_mass(table);
    return table;
}

std::string table_to_csv(const EstimateTable& table) {
    std::ostringstream out;
    out << "bucket_low,bucket_high,p,mu,sigma,count\n";
    for (const auto& b : table.buckets) {
        out << format_double(b.lower) << ',';
        out << (b.upper ? format_double(*b.upper) : "inf") << ',';
        out << format_double(b.probability) << ',';
        out << (b.mu ? format_double(*b.mu) : "") << ',';
        out << (b.sigma ? format_double(*b.sigma) : "") << ',';
        if (b.count) out << *b.count;
        out << '\n';
    }
    return out.str();
}

EstimateTable table_from_csv(const std::string& text) {
    const CsvTable csv = parse_csv_text(text);
    for (const char* col : {"bucket_low", "bucket_high", "p"})
        if (!csv.column(col))
            throw MalformedInput(std::string("table CSV missing column '") + col + "'");
    const auto low_col = *csv.column("bucket_low");
    const auto high_col = *csv.column("bucket_high");
    const auto p_col = *csv.column("p");
    const auto mu_col = csv.column("mu");
    const auto sigma_col = csv.column("sigma");
    const auto count_col = csv.column("count");

    auto get_opt = [](const CsvRow& row, std::optional<std::size_t> col) {
        std::optional<double> v;
        if (col && !row.fields[*col].empty()) {
            v = parse_double(row.fields[*col]);
            if (!v) throw MalformedInput("line " + std::to_string(row.line) + ": bad number '" +
                                         row.fields[*col] + "'");
        }
        return v;
    };

    EstimateTable table;
    for (const auto& row : csv.rows) {
        EstimateTable::Bucket b;
        auto low = parse_double(row.fields[low_col]);
        if (!low) throw MalformedInput("line " + std::to_string(row.line) + ": bad bucket_low");
        b.lower = *low;
        const std::string& high = row.fields[high_col];
        if (high != "inf" && !high.empty()) {
            auto h = parse_double(high);
            if (!h) throw MalformedInput("line " + std::to_string(row.line) + ": bad bucket_high");
            if (std::isfinite(*h)) b.upper = *h;
        }
        auto p = parse_double(row.fields[p_col]);
        if (!p) throw MalformedInput("line " + std::to_string(row.line) + ": bad p");
        b.probability = *p;
        b.mu = get_opt(row, mu_col);
        b.sigma = get_opt(row, sigma_col);
        if (count_col && !row.fields[*count_col].empty()) {
            auto c = parse_double(row.fields[*count_col]);
            if (!c) throw MalformedInput("line " + std::to_string(row.line) + ": bad count");
            b.count = static_cast<std::int64_t>(*c);
        }
        table.buckets.push_back(std::move(b));
    }
    if (table.buckets.empty()) throw MalformedInput("table CSV has no rows");
    for (const auto& b : table.buckets)
        if (b.count) table.total_count += *b.count;
    validate_table(table);
    normalize_mass(table);
    return table;
}

std::string grid_to_json(const Grid2D& grid) {
    json j;
    j["schema"] = "grid2d/v1";
    j["edges_s"] = grid.edges_a;
    j["edges_b"] = grid.edges_b;
    j["total_count"] = grid.total_count;
    j["cells"] = json::array();
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t k = 0; k < grid.cols(); ++k) {
            const auto& c = grid.cell(i, k);
            if (!c.occupied()) continue;
            json jc;
            jc["i"] = i;
            jc["j"] = k;
            jc["count"] = c.count;
            jc["p"] = c.joint_probability;
            jc["mu_s"] = opt_to_json(c.mu_a);
            jc["mu_b"] = opt_to_json(c.mu_b);
            jc["sigma_s"] = opt_to_json(c.sigma_a);
            jc["sigma_b"] = opt_to_json(c.sigma_b);
            jc["rho"] = opt_to_json(c.rho);
            j["cells"].push_back(std::move(jc));
        }
    }
    return j.dump(2) + "\n";
}

Grid2D grid_from_json(const std::string& text) {
    const json j = parse_json(text, "grid");
    Grid2D grid;
    grid.edges_a = j.at("edges_s").get<std::vector<double>>();
    grid.edges_b = j.at("edges_b").get<std::vector<double>>();
    grid.total_count = j.value("total_count", std::int64_t{0});
    if (grid.edges_a.empty() || grid.edges_b.empty())
        throw MalformedInput("grid needs non-empty edges");
    grid.cells.resize(grid.rows() * grid.cols());
    for (const auto& jc : j.at("cells")) {
        const auto i = jc.at("i").get<std::size_t>();
        const auto k = jc.at("j").get<std::size_t>();
        if (i >= grid.rows() || k >= grid.cols())
            throw MalformedInput("grid cell index out of range");
        auto& c = grid.cell(i, k);
        c.count = jc.at("count").get<std::int64_t>();
        c.joint_probability = jc.at("p").get<double>();
        c.mu_a = opt_from_json(jc.value("mu_s", json(nullptr)));
        c.mu_b = opt_from_json(jc.value("mu_b", json(nullptr)));
        c.sigma_a = opt_from_json(jc.value("sigma_s", json(nullptr)));
        c.sigma_b = opt_from_json(jc.value("sigma_b", json(nullptr)));
        c.rho = opt_from_json(jc.value("rho", json(nullptr)));
    }
    return grid;
}

std::string grid_to_csv(const Grid2D& grid) {
    std::ostringstream out;
    out << "i,j,kappa_s_low,kappa_s_high,kappa_b_low,kappa_b_high,p,mu_s,mu_b,sigma_s,sigma_b,"
           "rho,count\n";
    auto edge_str = [](const std::vector<double>& edges, std::size_t idx, bool upper) {
        if (upper)
            return idx + 1 < edges.size() ? format_double(edges[idx + 1]) : std::string("inf");
        return format_double(edges[idx]);
    };
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        for (std::size_t k = 0; k < grid.cols(); ++k) {
            const auto& c = grid.cell(i, k);
            if (!c.occupied()) continue;
            out << i << ',' << k << ',';
            out << edge_str(grid.edges_a, i, false) << ',' << edge_str(grid.edges_a, i, true)
                << ',';
            out << edge_str(grid.edges_b, k, false) << ',' << edge_str(grid.edges_b, k, true)
                << ',';
            out << format_double(c.joint_probability) << ',';
            out << (c.mu_a ? format_double(*c.mu_a) : "") << ','
                << (c.mu_b ? format_double(*c.mu_b) : "") << ','
                << (c.sigma_a ? format_double(*c.sigma_a) : "") << ','
                << (c.sigma_b ? format_double(*c.sigma_b) : "") << ','
                << (c.rho ? format_double(*c.rho) : "") << ',' << c.count << '\n';
        }
    }
    return out.str();
}

std::string risk_report_to_json(const RiskReport& report) {
    json j;
    j["schema"] = "risk_report/v1";
    j["threshold"] = report.threshold;
    if (report.conditioning) {
        json jc;
        jc["kappa_min"] = std::isfinite(report.conditioning->kappa_min)
                              ? json(report.conditioning->kappa_min)
                              : json(nullptr);
        jc["kappa_max"] = std::isfinite(report.conditioning->kappa_max)
                              ? json(report.conditioning->kappa_max)
                              : json(nullptr);
        j["conditioning"] = std::move(jc);
    } else {
        j["conditioning"] = nullptr;
    }
    j["mixture_probability"] = report.mixture_probability;
    j["normal_fit_probability"] = opt_to_json(report.normal_fit_probability);
    j["risk_free"] = report.risk_free;
    j["horizon_days"] = opt_to_json(report.horizon_days);
    j["r_n"] = opt_to_json(report.expected_horizon_return);
    j["p_n"] = opt_to_json(report.loss_probability);
    return j.dump(2) + "\n";
}

RiskReport risk_report_from_json(const std::string& text) {
    const json j = parse_json(text, "risk report");
    RiskReport report;
    report.threshold = j.at("threshold").get<double>();
    if (j.contains("conditioning") && !j["conditioning"].is_null()) {
        BucketFilter filter;
        const auto& jc = j["conditioning"];
        if (!jc.value("kappa_min", json(nullptr)).is_null())
            filter.kappa_min = jc["kappa_min"].get<double>();
        else
            filter.kappa_min = -std::numeric_limits<double>::infinity();
        if (!jc.value("kappa_max", json(nullptr)).is_null())
            filter.kappa_max = jc["kappa_max"].get<double>();
        else
            filter.kappa_max = std::numeric_limits<double>::infinity();
        report.conditioning = filter;
    }
    report.mixture_probability = j.at("mixture_probability").get<double>();
    report.normal_fit_probability = opt_from_json(j.value("normal_fit_probability", json(nullptr)));
    report.risk_free = j.value("risk_free", 0.0);
    report.horizon_days = opt_from_json(j.value("horizon_days", json(nullptr)));
    report.expected_horizon_return = opt_from_json(j.value("r_n", json(nullptr)));
    report.loss_probability = opt_from_json(j.value("p_n", json(nullptr)));
    return report;
}

std::string labeled_series_to_csv(const LabeledSeries& series) {
    bool any_kappa2 = false, any_volume = false;
    for (const auto& obs : series.observations) {
        any_kappa2 |= obs.kappa2.has_value();
        any_volume |= obs.volume.has_value();
    }
    std::ostringstream out;
    out << "date,return,kappa";
    if (any_kappa2) out << ",kappa2";
    if (any_volume) out << ",volume";
    out << '\n';
    for (const auto& obs : series.observations) {
        out << obs.date.to_iso() << ',' << format_double(obs.log_return) << ','
            << format_double(obs.kappa);
        if (any_kappa2) out << ',' << (obs.kappa2 ? format_double(*obs.kappa2) : "");
        if (any_volume) out << ',' << (obs.volume ? format_double(*obs.volume) : "");
        out << '\n';
    }
    return out.str();
}

std::string rescaled_series_to_csv(const RescaledSeries& series) {
    std::ostringstream out;
    out << "date,rescaled_return\n";
    for (const auto& obs : series.observations)
        out << obs.date.to_iso() << ',' << format_double(obs.value) << '\n';
    return out.str();
}

std::string normality_results_to_csv(const std::vector<SampleSet>& sets,
                                     const std::vector<NormalityResult>& results) {
    if (sets.size() != results.size())
        throw InvalidArgument("sets and results must be aligned");
    std::ostringstream out;
    out << "set_index,n,kappa_min,kappa_max,W,p\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out << sets[i].index << ',' << results[i].n << ',' << format_double(sets[i].kappa_min)
            << ',' << format_double(sets[i].kappa_max) << ','
            << format_double(results[i].w_statistic) << ',' << format_double(results[i].p_value)
            << '\n';
    }
    return out.str();
}

std::string frontier_to_csv(const Frontier& frontier) {
    std::ostringstream out;
    out << "w,mu_p,var_p,efficient\n";
    for (const auto& p : frontier.points)
        out << format_double(p.w) << ',' << format_double(p.mu_p) << ','
            << format_double(p.var_p) << ',' << (p.efficient ? 1 : 0) << '\n';
    return out.str();
}

std::string regressions_to_csv(const std::vector<RegressionResult>& results) {
    std::ostringstream out;
    out << "bucket_low,bucket_high,alpha,beta,r2,n\n";
    for (const auto& r : results)
        out << format_double(r.bucket_low) << ','
            << (r.bucket_high ? format_double(*r.bucket_high) : "inf") << ','
            << format_double(r.alpha) << ',' << format_double(r.beta) << ','
            << format_double(r.r_squared) << ',' << r.n << '\n';
    return out.str();
}

namespace {

StressFunction stress_function_from_json(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("type"))
        throw MalformedInput(std::string(what) + ": function spec needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "constant") return constant_fn(j.at("value").get<double>());
    if (type == "linear")
        return linear_fn(j.at("intercept").get<double>(), j.at("slope").get<double>());
    if (type == "step")
        return step_fn(j.at("edges").get<std::vector<double>>(),
                       j.at("values").get<std::vector<double>>());
    if (type == "hinge")
        return hinge_fn(j.at("base").get<double>(), j.at("threshold").get<double>(),
                        j.at("slope").get<double>());
    throw MalformedInput(std::string(what) + ": unknown function type '" + type + "'");
}

StressFunction2 own_kappa_fn(StressFunction fn, bool own_is_first) {
    return [fn = std::move(fn), own_is_first](double ks, double kb) {
        return fn(own_is_first ? ks : kb);
    };
}

StressFunction2 rho_function_from_json(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw MalformedInput("rho: function spec needs a 'type'");
    const std::string type = j["type"].get<std::string>();
    if (type == "constant") {
        const double v = j.at("value").get<double>();
        return [v](double, double) { return v; };
    }
    if (type == "threshold_s") {
        const double threshold = j.at("threshold").get<double>();
        const double below = j.at("below").get<double>();
        const double above = j.at("above").get<double>();
        return [threshold, below, above](double ks, double) {
            return ks >= threshold ? above : below;
        };
    }
    throw MalformedInput("rho: unknown function type '" + type + "'");
}

KappaModel kappa_model_from_json(const json& j) {
    KappaModel m;
    m.mean = j.at("mean").get<double>();
    m.phi = j.at("phi").get<double>();
    m.innovation_sigma = j.at("innovation_sigma").get<double>();
    return m;
}

}  // namespace

SimConfigFile sim_config_from_json(const std::string& text) {
    const json j = parse_json(text, "sim config");
    const std::string schema = j.value("schema", "");
    SimConfigFile file;
    if (schema == "sim_config/v1") {
        file.joint = false;
        SimConfig& c = file.single;
        c.n = j.at("n").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.kappa = kappa_model_from_json(j.at("kappa"));
        c.mu_fn = stress_function_from_json(j.at("mu"), "mu");
        c.sigma_fn = stress_function_from_json(j.at("sigma"), "sigma");
        c.mu_dkappa_slope = j.value("mu_dkappa_slope", 0.0);
        if (j.contains("volume") && !j["volume"].is_null()) {
            c.volume_fn = stress_function_from_json(j["volume"], "volume");
            c.volume_noise = j.value("volume_noise", 0.0);
        }
        return file;
    }
    if (schema == "sim_config_joint/v1") {
        file.joint = true;
        JointSimConfig& c = file.pair;
        c.n = j.at("n").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        const auto& js = j.at("stock");
        const auto& jb = j.at("bond");
        c.stock.kappa = kappa_model_from_json(js.at("kappa"));
        c.stock.mu_fn = own_kappa_fn(stress_function_from_json(js.at("mu"), "stock.mu"), true);
        c.stock.sigma_fn =
            own_kappa_fn(stress_function_from_json(js.at("sigma"), "stock.sigma"), true);
        c.bond.kappa = kappa_model_from_json(jb.at("kappa"));
        c.bond.mu_fn = own_kappa_fn(stress_function_from_json(jb.at("mu"), "bond.mu"), false);
        c.bond.sigma_fn =
            own_kappa_fn(stress_function_from_json(jb.at("sigma"), "bond.sigma"), false);
        c.kappa_rho = j.value("kappa_rho", 0.0);
        c.rho_fn = rho_function_from_json(j.at("rho"));
        return file;
    }
    throw MalformedInput("sim config: unknown schema '" + schema + "'");
}

EstimateTable load_table(const std::string& path) {
    const std::string text = read_text_file(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return table_from_csv(text);
    return table_from_json(text);
}

void save_text(const std::string& path, const std::string& contents) {
    write_file_atomic(path, contents);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFile(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string file_digest(const std::string& path) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_text_file(path))));
    return std::string("fnv1a64:") + buf;
}

}  // namespace stressmodel
