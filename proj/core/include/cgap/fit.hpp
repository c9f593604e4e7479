#pragma once

#include <vector>

namespace cgap::fit {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

// Weighted least squares y = intercept + slope * x.
LineFit weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& w);

// Log-log slope of |y| against d using points with d <= d_fit_max, weighted
// by 1 + log10(d_fit_max / d) so the smallest distances dominate.
LineFit loglog_slope(const std::vector<double>& d, const std::vector<double>& y, double d_fit_max);

struct PowerFit {
  double exponent = 0.0;
  double lead = 0.0;        // C in y = C d^a (1 + D d^s)
  double correction = 0.0;  // D
  double rms = 0.0;         // weighted relative residual
};

// Fits y = C d^a + C D d^(a+s) by variable projection: for each trial
// exponent a the pair (C, C D) is a weighted linear least-squares solve on
// relative residuals, and a minimizes the residual (scan then golden
// section). Same point selection and weights as loglog_slope.
PowerFit power_law_with_correction(const std::vector<double>& d, const std::vector<double>& y,
                                   double d_fit_max, double s = 0.5, double a_lo = -6.0,
                                   double a_hi = 3.0);

// n points per decade from lo to hi inclusive, logarithmically spaced.
std::vector<double> logspace(double lo, double hi, int per_decade);

// Extrapolates f(d) = L + c d^p + ... from samples at d and d / ratio.
double richardson(double f_d, double f_d_over_ratio, double ratio, double p);

} // namespace cgap::fit
