#pragma once

namespace stressmodel {

// Standard normal kernels. The CDF is evaluated through the complementary
// error function, so deep-tail values keep full relative accuracy instead of
// collapsing to 1 - (something rounded to 1). Probabilities are meaningful
// down to the representable floor; normal_cdf_ext extends the range to
// |z| ~ 150 via 80-bit arithmetic for tables whose tails fall below the
// double-precision floor.

double normal_pdf(double z);

// Phi(z). Relative error < 1e-9 wherever the value is representable as a
// normal double; exact 0.5 at z = 0; Phi(z) + Phi(-z) == 1 to 1e-15.
double normal_cdf(double z);

// Extended-range Phi used for deep-tail accuracy checks and log-scale work.
long double normal_cdf_ext(long double z);

// Inverse CDF: rational approximation polished with one Halley step, accurate
// to a few ulp for p in (0, 1). Throws InvalidArgument outside (0, 1).
double normal_quantile(double p);

}  // namespace stressmodel
