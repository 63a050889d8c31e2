#include "cdp/fss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cdp {

namespace {

constexpr double kExpLo = -3.0;
constexpr double kExpHi = -0.05;
constexpr double kExpTol = 1e-6;

struct LinearSolution {
    double tc;
    double c;
    double ssr;
};

LinearSolution solve_for_exponent(std::span<const ScalingSample> samples,
                                  std::span<const double> weights, double a) {
    double sw = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double w = weights[i];
        const double x = std::pow(samples[i].L, a);
        const double y = samples[i].value;
        sw += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    const double det = sw * sxx - sx * sx;
    LinearSolution sol{};
    sol.tc = (sxx * sy - sx * sxy) / det;
    sol.c = (sw * sxy - sx * sy) / det;
    double ssr = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = samples[i].value - sol.tc - sol.c * std::pow(samples[i].L, a);
        ssr += weights[i] * r * r;
    }
    sol.ssr = ssr;
    return sol;
}

}  // namespace

TcFit fit_tc(std::span<const ScalingSample> samples, bool weighted) {
    if (samples.size() < 4)
        throw std::invalid_argument("fit_tc: need at least 4 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].L > 0) || !std::isfinite(samples[i].value))
            throw std::invalid_argument("fit_tc: samples must have positive L and finite values");
        for (std::size_t j = i + 1; j < samples.size(); ++j)
            if (samples[i].L == samples[j].L)
                throw std::invalid_argument("fit_tc: sizes L must be distinct");
    }

    std::vector<double> weights(samples.size(), 1.0);
    if (weighted) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!samples[i].err || *samples[i].err <= 0)
                throw std::invalid_argument("fit_tc: weighted fit needs a positive err on every sample");
            weights[i] = 1.0 / (*samples[i].err * *samples[i].err);
        }
    }

    const double first = samples[0].value;
    if (std::all_of(samples.begin(), samples.end(),
                    [&](const ScalingSample& s) { return s.value == first; }))
        return TcFit{first, 0.0, 0.0, 0.0, false};

    // Coarse scan to bracket the best exponent, then golden-section inside
    // the bracket.  The profiled objective is smooth in the exponent.
    constexpr int kScan = 64;
    double best_a = kExpLo;
    double best_ssr = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= kScan; ++s) {
        const double a = kExpLo + (kExpHi - kExpLo) * s / kScan;
        const double ssr = solve_for_exponent(samples, weights, a).ssr;
        if (ssr < best_ssr) {
            best_ssr = ssr;
            best_a = a;
        }
    }
    const double step = (kExpHi - kExpLo) / kScan;
    double lo = std::max(kExpLo, best_a - step);
    double hi = std::min(kExpHi, best_a + step);

    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = solve_for_exponent(samples, weights, x1).ssr;
    double f2 = solve_for_exponent(samples, weights, x2).ssr;
    while (hi - lo > kExpTol * 0.1) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = solve_for_exponent(samples, weights, x1).ssr;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = solve_for_exponent(samples, weights, x2).ssr;
        }
    }
    const double a = 0.5 * (lo + hi);
    const LinearSolution sol = solve_for_exponent(samples, weights, a);
    return TcFit{sol.tc, sol.c, a, sol.ssr, true};
}

LogLogFit fit_inv_nu(std::span<const ScalingSample> samples) {
    if (samples.size() < 3)
        throw std::invalid_argument("fit_inv_nu: need at least 3 samples");
    for (const ScalingSample& s : samples)
        if (!(s.L > 0) || !(s.value > 0))
            throw std::invalid_argument("fit_inv_nu: needs positive L and positive values");

    const std::size_t n = samples.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const ScalingSample& s : samples) {
        const double x = std::log(s.L);
        const double y = std::log(s.value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("fit_inv_nu: sizes L must be distinct");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;

    double ssr = 0;
    for (const ScalingSample& s : samples) {
        const double r = std::log(s.value) - intercept - slope * std::log(s.L);
        ssr += r * r;
    }
    double slope_err = 0;
    if (n > 2) {
        const double sigma2 = ssr / static_cast<double>(n - 2);
        slope_err = std::sqrt(sigma2 * n / det);
    }
    return LogLogFit{std::abs(slope), slope, intercept, slope_err, ssr};
}

MeanSem batch_stats(std::span<const double> estimates) {
    if (estimates.size() < 2)
        throw std::invalid_argument("batch_stats: need at least 2 estimates");
    const double n = static_cast<double>(estimates.size());
    double mean = 0;
    for (double e : estimates) mean += e;
    mean /= n;
    double ss = 0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    const double sd = std::sqrt(ss / (n - 1));
    return MeanSem{mean, sd / std::sqrt(n)};
}

LineFit fit_line(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2)
        throw std::invalid_argument("fit_line: need at least 2 points");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("fit_line: abscissae must not be all equal");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    double ssr = 0;
    for (const auto& [x, y] : points) {
        const double r = y - intercept - slope * x;
        ssr += r * r;
    }
    double slope_err = 0;
    if (points.size() > 2) slope_err = std::sqrt(ssr / (n - 2) * n / det);
    return LineFit{slope, intercept, slope_err, ssr};
}

}  // namespace cdp
