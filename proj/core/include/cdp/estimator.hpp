#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cdp/qhistogram.hpp"

namespace cdp {

// Microcanonical wrap probabilities Q_bar[i], i = 0..N: the fraction of runs
// that had wrapped once i bonds were tried.  Nondecreasing, Q_bar[0] = 0,
// Q_bar[N] = 1 - no_wrap/M.
std::vector<double> q_bar(const QHistogram& h);

// Canonical wrapping probability at concentration t: the binomial mixture
// sum_i C(N,i) t^i (1-t)^(N-i) Q_bar[i], with N = qbar.size() - 1.
//
// Weights are walked outward from the binomial mode by the multiplicative
// recurrence and truncated at 1e-15 of the peak, normalizing on the fly;
// sums accumulate in extended precision.  Exact at t = 0 and t = 1.
double psi_at(std::span<const double> qbar, double t);

// Derivative of psi_at: sum_i C(N,i) (i - Nt) t^(i-1) (1-t)^(N-i-1) Q_bar[i],
// evaluated over the same window with the kernel centered on the local
// Q_bar level so a flat stretch contributes exactly zero.  Endpoints use the
// one-sided limits N(Q_bar[1]-Q_bar[0]) and N(Q_bar[N]-Q_bar[N-1]).
double dpsi_at(std::span<const double> qbar, double t);

// Mean concentration at first wrap, integral of t dpsi(t) dt over [0,1], by
// the closed form Q_bar[N] - sum_i Q_bar[i] / (N+1).  Empty when no run
// wrapped (Q_bar[N] = 0): the mean is infinite / undefined.
std::optional<double> mean_threshold(std::span<const double> qbar);

// Same integral by composite Gauss-Legendre quadrature; cross-check path for
// the closed form.  panels = 0 picks a count that resolves the O(1/sqrt(N))
// transition width.
std::optional<double> mean_threshold_quadrature(std::span<const double> qbar,
                                                int panels = 0);

struct PeakEstimate {
    double t;
    double value;
};

// Location and height of the maximum of dpsi over [0,1]: uniform grid scan
// refined by parabolic interpolation around the best point.  Empty when
// Q_bar is constant (psi flat, no peak).
std::optional<PeakEstimate> max_dpsi(std::span<const double> qbar,
                                     int grid_points = 2001);

struct CurveSample {
    double t;
    double psi;
    double dpsi;
};

// (t, psi, dpsi) on a uniform grid over [0,1].  Verifies on every curve that
// psi is nondecreasing and dpsi nonnegative to 1e-12; a violation means the
// evaluator itself is broken and throws.
std::vector<CurveSample> sample_curve(std::span<const double> qbar, int grid_points);

struct MeanSem {
    double mean;
    double sem;
};

// Mean open-bond fraction at t = 1 and standard error of that mean.
MeanSem xk_estimate(const XkHistogram& h);

}  // namespace cdp
