#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "stressmodel/series.hpp"

namespace stressmodel {

// kappa -> per-day value (sigma, mu, or detrended volume level).
using StressFunction = std::function<double(double)>;
// (kappa_s, kappa_b) -> value; used for joint-model parameters.
using StressFunction2 = std::function<double(double, double)>;

// AR(1) for ln kappa: ln k_t = (1 - phi) ln k_bar + phi ln k_{t-1} + eps_t,
// eps_t ~ N(0, innovation_sigma^2); the path starts in the stationary
// distribution so no burn-in is needed.
struct KappaModel {
    double mean = 20.0;  // k_bar, level space
    double phi = 0.97;
    double innovation_sigma = 0.05;
};

struct SimConfig {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    KappaModel kappa;
    StressFunction mu_fn;     // per-day mean at stress kappa
    StressFunction sigma_fn;  // per-day standard deviation, must stay > 0
    double mu_dkappa_slope = 0.0;  // optional linear r_kappa term in the mean
    std::optional<StressFunction> volume_fn;  // detrended volume level
    double volume_noise = 0.0;
};

struct JointSimConfig {
    struct Asset {
        KappaModel kappa;
        StressFunction2 mu_fn;     // (own, other) stress
        StressFunction2 sigma_fn;
    };
    std::size_t n = 0;
    std::uint64_t seed = 0;
    Asset stock;
    Asset bond;
    double kappa_rho = 0.0;    // correlation of the two log-kappa innovations
    StressFunction2 rho_fn;    // per-day return correlation, |rho| <= 1
};

// Deterministic per (config, seed); bit-identical across runs and platforms.
std::vector<double> simulate_stress_path(const SimConfig& config);

// Conditionally normal returns along a given stress path. Dates count up
// from 2000-01-01.
LabeledSeries simulate_returns(const SimConfig& config, const std::vector<double>& kappa_path);

struct SyntheticMarket {
    LabeledSeries observations;
    std::vector<double> kappa_path;
};

SyntheticMarket simulate_market(const SimConfig& config);

struct JointMarket {
    LabeledSeries stock;  // kappa = own stress, kappa2 = the other market's
    LabeledSeries bond;
};

JointMarket simulate_joint(const JointSimConfig& config);

// Named function forms used by configuration files and tests.
StressFunction constant_fn(double value);
StressFunction linear_fn(double intercept, double slope);
StressFunction step_fn(std::vector<double> edges, std::vector<double> values);
StressFunction hinge_fn(double base, double threshold, double slope);

}  // namespace stressmodel
