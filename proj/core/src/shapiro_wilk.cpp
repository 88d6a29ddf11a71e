#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stressmodel/errors.hpp"
#include "stressmodel/normal.hpp"
#include "stressmodel/normality.hpp"

namespace stressmodel {

namespace {

// Royston's AS R94 (Applied Statistics 44(4), 1995) for uncensored samples,
// evaluated in double precision. Polynomial coefficients are the published
// ones; the normal quantile and CDF use this library's kernels.

double poly(std::span<const double> c, double x) {
    double p = c.back();
    for (std::size_t i = c.size() - 1; i-- > 0;) p = p * x + c[i];
    return p;
}

constexpr double kC1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
constexpr double kC2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[4] = {0.544, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[3] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[2] = {-2.273, 0.459};
constexpr double kPi6 = 1.90985931710274;    // 6/pi
constexpr double kStqr = 1.04719755119660;   // asin(sqrt(3/4))

// Coefficient half-vector a[0..n/2-1] for sample size n.
std::vector<double> sw_coefficients(std::size_t n) {
    const std::size_t n2 = n / 2;
    std::vector<double> a(n2);
    if (n == 3) {
        a[0] = std::sqrt(0.5);
        return a;
    }
    const double an = static_cast<double>(n);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n2; ++i) {
        a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        sum_sq += a[i] * a[i];
    }
    sum_sq *= 2.0;
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - a[0] / std::sqrt(sum_sq);
    std::size_t first_raw;
    double fac;
    if (n > 5) {
        const double a2 = -a[1] / std::sqrt(sum_sq) + poly(kC2, rsn);
        fac = std::sqrt((sum_sq - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                        (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[0] = a1;
        a[1] = a2;
        first_raw = 2;
    } else {
        fac = std::sqrt((sum_sq - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
        a[0] = a1;
        first_raw = 1;
    }
    for (std::size_t i = first_raw; i < n2; ++i) a[i] = -a[i] / fac;
    return a;
}

}  // namespace

NormalityResult shapiro_wilk(const std::vector<double>& sample) {
    const std::size_t n = sample.size();
    if (n < 3) throw SampleTooSmall("Shapiro-Wilk requires n >= 3, got " + std::to_string(n));
    if (n > 5000)
        throw SampleTooLarge("Shapiro-Wilk valid up to n = 5000, got " + std::to_string(n));

    std::vector<double> x = sample;
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 0.0) || range < 1e-300)
        throw ZeroVariance("all sample values are (numerically) identical");

    const std::vector<double> a = sw_coefficients(n);

    // W as the squared correlation between the range-scaled order statistics
    // and the antisymmetric coefficient vector. Computing w1 = 1 - W directly
    // avoids rounding loss for W near 1.
    auto coeff = [&](std::size_t i) {  // full antisymmetric vector
        const std::size_t j = n - 1 - i;
        if (i == j) return 0.0;
        return i < j ? -a[i] : a[j];
    };
    double sa = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += coeff(i);
        sx += x[i] / range;
    }
    sa /= static_cast<double>(n);
    sx /= static_cast<double>(n);
    double ssa = 0.0, ssx = 0.0, sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double asa = coeff(i) - sa;
        const double xsx = x[i] / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    const double w = 1.0 - w1;

    NormalityResult result;
    result.n = n;
    result.w_statistic = w;

    if (n == 3) {
        result.p_value = std::clamp(kPi6 * (std::asin(std::sqrt(w)) - kStqr), 0.0, 1.0);
        return result;
    }

    const double y = std::log(w1);
    const double logn = std::log(static_cast<double>(n));
    double m, s, z;
    if (n <= 11) {
        const double an = static_cast<double>(n);
        const double gamma = poly(kG, an);
        if (y >= gamma) {
            result.p_value = 1e-99;  // W indistinguishable from its upper bound
            return result;
        }
        m = poly(kC3, an);
        s = std::exp(poly(kC4, an));
        z = (-std::log(gamma - y) - m) / s;
    } else {
        m = poly(kC5, logn);
        s = std::exp(poly(kC6, logn));
        z = (y - m) / s;
    }
    result.p_value = static_cast<double>(normal_cdf(-z));  // upper tail of N(0,1)
    return result;
}

}  // namespace stressmodel
