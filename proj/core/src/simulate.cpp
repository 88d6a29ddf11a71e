#include "stressmodel/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "stressmodel/errors.hpp"
#include "stressmodel/rng.hpp"

namespace stressmodel {

namespace {

// Stream tags keep the kappa path, the return draws, and the volume noise on
// independent substreams of one seed.
constexpr std::uint64_t kKappaStream = 0x6b617070u;   // "kapp"
constexpr std::uint64_t kReturnStream = 0x72657475u;  // "retu"
constexpr std::uint64_t kVolumeStream = 0x766f6c75u;  // "volu"

const Date kEpoch = Date::from_ymd(2000, 1, 1);

void validate_kappa_model(const KappaModel& m) {
    if (!(m.mean > 0.0)) throw InvalidConfig("kappa mean must be > 0");
    if (!(m.phi >= 0.0 && m.phi < 1.0)) throw InvalidConfig("phi must lie in [0, 1)");
    if (m.innovation_sigma < 0.0) throw InvalidConfig("innovation sigma must be >= 0");
}

std::vector<double> ar1_log_path(const KappaModel& model, std::size_t n, Rng& rng) {
    std::vector<double> kappa(n);
    const double log_mean = std::log(model.mean);
    const double stationary_sd =
        model.innovation_sigma / std::sqrt(1.0 - model.phi * model.phi);
    double log_k = log_mean + stationary_sd * rng.next_normal();
    kappa[0] = std::exp(log_k);
    for (std::size_t t = 1; t < n; ++t) {
        log_k = (1.0 - model.phi) * log_mean + model.phi * log_k +
                model.innovation_sigma * rng.next_normal();
        kappa[t] = std::exp(log_k);
    }
    return kappa;
}

double positive_sigma(const StressFunction2& fn, double ks, double kb) {
    const double s = fn(ks, kb);
    if (!(s > 0.0)) throw InvalidConfig("sigma_fn must be > 0 over the reachable kappa range");
    return s;
}

}  // namespace

std::vector<double> simulate_stress_path(const SimConfig& config) {
    if (config.n == 0) throw InvalidConfig("n must be >= 1");
    validate_kappa_model(config.kappa);
    Rng rng(config.seed, kKappaStream);
    return ar1_log_path(config.kappa, config.n, rng);
}

LabeledSeries simulate_returns(const SimConfig& config, const std::vector<double>& kappa_path) {
    if (kappa_path.empty()) throw InvalidConfig("kappa path must be non-empty");
    if (!config.mu_fn || !config.sigma_fn)
        throw InvalidConfig("mu_fn and sigma_fn are required");

    Rng rng(config.seed, kReturnStream);
    Rng vol_rng(config.seed, kVolumeStream);

    LabeledSeries series;
    series.asset_id = "synthetic";
    series.observations.reserve(kappa_path.size());
    for (std::size_t t = 0; t < kappa_path.size(); ++t) {
        const double kappa = kappa_path[t];
        LabeledObservation obs;
        obs.date = kEpoch + static_cast<int>(t);
        obs.kappa = kappa;
        if (t > 0 && kappa_path[t - 1] > 0.0)
            obs.kappa_change = (kappa - kappa_path[t - 1]) / kappa_path[t - 1];

        const double sigma = config.sigma_fn(kappa);
        if (!(sigma > 0.0))
            throw InvalidConfig("sigma_fn must be > 0 over the reachable kappa range");
        double mean = config.mu_fn(kappa);
        if (config.mu_dkappa_slope != 0.0 && obs.kappa_change)
            mean += config.mu_dkappa_slope * *obs.kappa_change;
        obs.log_return = mean + sigma * rng.next_normal();

        if (config.volume_fn) {
            const double level =
                (*config.volume_fn)(kappa) + config.volume_noise * vol_rng.next_normal();
            obs.detrended_volume = std::max(0.0, level);
            obs.volume = obs.detrended_volume;
        }
        series.observations.push_back(std::move(obs));
    }
    return series;
}

SyntheticMarket simulate_market(const SimConfig& config) {
    SyntheticMarket market;
    market.kappa_path = simulate_stress_path(config);
    market.observations = simulate_returns(config, market.kappa_path);
    return market;
}

JointMarket simulate_joint(const JointSimConfig& config) {
    if (config.n == 0) throw InvalidConfig("n must be >= 1");
    validate_kappa_model(config.stock.kappa);
    validate_kappa_model(config.bond.kappa);
    if (std::abs(config.kappa_rho) > 1.0)
        throw InvalidConfig("kappa_rho must lie in [-1, 1]");
    if (!config.stock.mu_fn || !config.stock.sigma_fn || !config.bond.mu_fn ||
        !config.bond.sigma_fn || !config.rho_fn)
        throw InvalidConfig("all joint model functions are required");

    // Correlated log-kappa innovations from one stream.
    Rng kappa_rng(config.seed, kKappaStream);
    const double c = config.kappa_rho;
    const double c_orth = std::sqrt(1.0 - c * c);
    std::vector<double> ks(config.n), kb(config.n);
    {
        const auto& ms = config.stock.kappa;
        const auto& mb = config.bond.kappa;
        double log_s = 0.0, log_b = 0.0;
        for (std::size_t t = 0; t < config.n; ++t) {
            const double z1 = kappa_rng.next_normal();
            const double z2 = kappa_rng.next_normal();
            const double es = z1;
            const double eb = c * z1 + c_orth * z2;
            if (t == 0) {
                log_s = std::log(ms.mean) +
                        es * ms.innovation_sigma / std::sqrt(1.0 - ms.phi * ms.phi);
                log_b = std::log(mb.mean) +
                        eb * mb.innovation_sigma / std::sqrt(1.0 - mb.phi * mb.phi);
            } else {
                log_s = (1.0 - ms.phi) * std::log(ms.mean) + ms.phi * log_s +
                        ms.innovation_sigma * es;
                log_b = (1.0 - mb.phi) * std::log(mb.mean) + mb.phi * log_b +
                        mb.innovation_sigma * eb;
            }
            ks[t] = std::exp(log_s);
            kb[t] = std::exp(log_b);
        }
    }

    Rng rng(config.seed, kReturnStream);
    JointMarket market;
    market.stock.asset_id = "synthetic_stock";
    market.bond.asset_id = "synthetic_bond";
    market.stock.observations.reserve(config.n);
    market.bond.observations.reserve(config.n);
    for (std::size_t t = 0; t < config.n; ++t) {
        const double rho = config.rho_fn(ks[t], kb[t]);
        if (std::abs(rho) > 1.0)
            throw NonPositiveDefiniteCell("rho_fn produced |rho| > 1 at (kappa_s, kappa_b) = (" +
                                          std::to_string(ks[t]) + ", " + std::to_string(kb[t]) +
                                          ")");
        const double sig_s = positive_sigma(config.stock.sigma_fn, ks[t], kb[t]);
        const double sig_b = positive_sigma(config.bond.sigma_fn, ks[t], kb[t]);
        const double z1 = rng.next_normal();
        const double z2 = rng.next_normal();
        const double r_s = config.stock.mu_fn(ks[t], kb[t]) + sig_s * z1;
        const double r_b = config.bond.mu_fn(ks[t], kb[t]) +
                           sig_b * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);

        LabeledObservation s, b;
        s.date = b.date = kEpoch + static_cast<int>(t);
        s.log_return = r_s;
        s.kappa = ks[t];
        s.kappa2 = kb[t];
        b.log_return = r_b;
        b.kappa = kb[t];
        b.kappa2 = ks[t];
        if (t > 0) {
            s.kappa_change = (ks[t] - ks[t - 1]) / ks[t - 1];
            b.kappa_change = (kb[t] - kb[t - 1]) / kb[t - 1];
        }
        market.stock.observations.push_back(std::move(s));
        market.bond.observations.push_back(std::move(b));
    }
    return market;
}

StressFunction constant_fn(double value) {
    return [value](double) { return value; };
}

StressFunction linear_fn(double intercept, double slope) {
    return [intercept, slope](double kappa) { return intercept + slope * kappa; };
}

StressFunction step_fn(std::vector<double> edges, std::vector<double> values) {
    if (edges.size() != values.size() || edges.empty())
        throw InvalidConfig("step function needs one value per edge");
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw InvalidConfig("step function edges must be ascending");
    return [edges = std::move(edges), values = std::move(values)](double kappa) {
        std::size_t idx = edges.size() - 1;
        while (idx > 0 && kappa < edges[idx]) --idx;
        return values[idx];
    };
}

StressFunction hinge_fn(double base, double threshold, double slope) {
    return [base, threshold, slope](double kappa) {
        return base + slope * std::max(0.0, kappa - threshold);
    };
}

}  // namespace stressmodel
