#pragma once

#include <optional>
#include <span>
#include <utility>

#include "cdp/estimator.hpp"

namespace cdp {

struct ScalingSample {
    double L;
    double value;                      // t_bar for the critical-time fit, peak slope for the exponent fit
    std::optional<double> err = std::nullopt;
};

struct TcFit {
    double tc;
    double amplitude;
    double exponent;
    double residual;            // weighted sum of squared residuals at the optimum
    bool exponent_constrained;  // false when the data were flat and the exponent is meaningless
};

// Fit value_L = tc + amplitude * L^exponent by separable least squares: for a
// fixed exponent the two linear parameters solve a 2x2 normal system, and the
// exponent is located by a coarse scan plus golden-section refinement over
// [-3, -0.05] (tolerance 1e-6).  With weighted = true, samples are weighted
// by 1/err^2 and every sample must carry err.
TcFit fit_tc(std::span<const ScalingSample> samples, bool weighted = false);

struct LogLogFit {
    double rate;       // magnitude of the log-log slope; the 1/nu estimate
    double slope;      // signed OLS slope of log(value) on log(L)
    double intercept;
    double slope_err;  // standard error of the slope
    double residual;
};

// Power-law rate from the log-log line through (L, value).  The peak of the
// transition slope steepens with L while the fitted relation is written for
// a decaying amplitude, so the magnitude of the slope is the exponent
// estimate either way; the signed slope is reported alongside.
LogLogFit fit_inv_nu(std::span<const ScalingSample> samples);

// Mean of independent batch estimates and the standard deviation of that
// mean (sample std-dev / sqrt(B)).
MeanSem batch_stats(std::span<const double> estimates);

struct LineFit {
    double slope;
    double intercept;
    double slope_err;
    double residual;
};

// Ordinary least squares line through (x, y) points; used for the jamming
// concentration versus capacity trend.
LineFit fit_line(std::span<const std::pair<double, double>> points);

}  // namespace cdp
