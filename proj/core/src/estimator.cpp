#include "cdp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cdp {

std::vector<double> q_bar(const QHistogram& h) {
    if (h.runs == 0) throw std::invalid_argument("q_bar: histogram holds no runs");
    const std::size_t n = h.id.N;
    std::vector<double> q(n + 1);
    std::uint64_t cum = 0;
    const double inv_m = 1.0 / static_cast<double>(h.runs);
    for (std::size_t i = 0; i <= n; ++i) {
        cum += h.counts[i];
        q[i] = static_cast<double>(cum) * inv_m;
    }
    return q;
}

namespace {

constexpr double kWindowCutoff = 1e-15;

struct WindowSums {
    long double weight = 0;   // sum of binomial weights in the window
    long double mixed = 0;    // sum of weight * Q_bar
    long double centered = 0; // sum of weight * (i - Nt) * (Q_bar - Q_ref)
};

// Walk the binomial weights outward from the mode.  Weights fall
// monotonically from the start point, so cutting at 1e-15 of the peak keeps
// everything that matters; starting the recurrence at weight 1 and
// renormalizing by the window total avoids overflow at any N.
WindowSums window_sums(std::span<const double> qbar, double t) {
    const std::int64_t n = static_cast<std::int64_t>(qbar.size()) - 1;
    const std::int64_t mode = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((n + 1) * t)), 0, n);
    const double nt = static_cast<double>(n) * t;
    const double q_ref = qbar[mode];
    const double up_ratio = t / (1.0 - t);

    WindowSums s;
    double w = 1.0;
    for (std::int64_t i = mode;; --i) {
        s.weight += w;
        s.mixed += w * qbar[i];
        s.centered += w * (static_cast<double>(i) - nt) * (qbar[i] - q_ref);
        if (i == 0) break;
        w *= (static_cast<double>(i) / static_cast<double>(n - i + 1)) / up_ratio;
        if (w < kWindowCutoff) break;
    }
    w = 1.0;
    for (std::int64_t i = mode; i < n;) {
        w *= (static_cast<double>(n - i) / static_cast<double>(i + 1)) * up_ratio;
        if (w < kWindowCutoff) break;
        ++i;
        s.weight += w;
        s.mixed += w * qbar[i];
        s.centered += w * (static_cast<double>(i) - nt) * (qbar[i] - q_ref);
    }
    return s;
}

void check_t(double t, const char* who) {
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument(std::string(who) + ": t must lie in [0,1], got " + std::to_string(t));
}

void check_qbar(std::span<const double> qbar, const char* who) {
    if (qbar.size() < 2)
        throw std::invalid_argument(std::string(who) + ": Q_bar needs at least N = 1 entries");
}

}  // namespace

double psi_at(std::span<const double> qbar, double t) {
    check_qbar(qbar, "psi_at");
    check_t(t, "psi_at");
    if (t == 0.0) return qbar.front();
    if (t == 1.0) return qbar.back();
    const WindowSums s = window_sums(qbar, t);
    return static_cast<double>(s.mixed / s.weight);
}

double dpsi_at(std::span<const double> qbar, double t) {
    check_qbar(qbar, "dpsi_at");
    check_t(t, "dpsi_at");
    const std::size_t n = qbar.size() - 1;
    if (t == 0.0) return static_cast<double>(n) * (qbar[1] - qbar[0]);
    if (t == 1.0) return static_cast<double>(n) * (qbar[n] - qbar[n - 1]);
    const WindowSums s = window_sums(qbar, t);
    return static_cast<double>(s.centered / s.weight / (t * (1.0 - t)));
}

std::optional<double> mean_threshold(std::span<const double> qbar) {
    check_qbar(qbar, "mean_threshold");
    if (qbar.back() == 0.0) return std::nullopt;
    long double total = 0;
    for (double q : qbar) total += q;
    // Integration by parts: every Bernstein basis polynomial integrates to
    // 1/(N+1), so the integral of t psi'(t) collapses to this closed form.
    return static_cast<double>(qbar.back() - total / static_cast<long double>(qbar.size()));
}

namespace {

// 16-point Gauss-Legendre rule on [-1, 1], positive half; mirrored in use.
constexpr int kGaussHalf = 8;
constexpr double kGaussX[kGaussHalf] = {
    0.0950125098376374401853, 0.2816035507792589132305,
    0.4580167776572273863424, 0.6178762444026437484467,
    0.7554044083550030338951, 0.8656312023878317438805,
    0.9445750230732325760780, 0.9894009349916499325962,
};
constexpr double kGaussW[kGaussHalf] = {
    0.1894506104550684962854, 0.1826034150449235888667,
    0.1691565193950025381893, 0.1495959888165767320815,
    0.1246289712555338720525, 0.0951585116824927848099,
    0.0622535239386478928628, 0.0271524594117540948518,
};

}  // namespace

std::optional<double> mean_threshold_quadrature(std::span<const double> qbar, int panels) {
    check_qbar(qbar, "mean_threshold_quadrature");
    if (qbar.back() == 0.0) return std::nullopt;
    const std::size_t n = qbar.size() - 1;
    if (panels <= 0)
        panels = std::clamp(static_cast<int>(4.0 * std::sqrt(static_cast<double>(n))), 32, 4096);

    long double total = 0;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        long double acc = 0;
        for (int g = 0; g < kGaussHalf; ++g) {
            const double dx = 0.5 * h * kGaussX[g];
            const double ta = mid - dx;
            const double tb = mid + dx;
            acc += kGaussW[g] * (ta * dpsi_at(qbar, ta) + tb * dpsi_at(qbar, tb));
        }
        total += acc * 0.5 * h;
    }
    return static_cast<double>(total);
}

std::optional<PeakEstimate> max_dpsi(std::span<const double> qbar, int grid_points) {
    check_qbar(qbar, "max_dpsi");
    if (grid_points < 3) throw std::invalid_argument("max_dpsi: grid needs >= 3 points");

    const auto [mn, mx] = std::minmax_element(qbar.begin(), qbar.end());
    if (*mn == *mx) return std::nullopt;  // flat psi, no peak

    const int g = grid_points;
    std::vector<double> vals(g);
    double best = -1.0;
    int best_j = 0;
    for (int j = 0; j < g; ++j) {
        const double t = static_cast<double>(j) / (g - 1);
        vals[j] = dpsi_at(qbar, t);
        if (vals[j] > best) {
            best = vals[j];
            best_j = j;
        }
    }

    double t_best = static_cast<double>(best_j) / (g - 1);
    if (best_j > 0 && best_j + 1 < g) {
        const double fm = vals[best_j - 1], f0 = vals[best_j], fp = vals[best_j + 1];
        const double denom = fm - 2.0 * f0 + fp;
        if (denom < 0.0) {  // proper local maximum of the fitted parabola
            const double h = 1.0 / (g - 1);
            const double shift = 0.5 * h * (fm - fp) / denom;
            if (std::abs(shift) <= h) {
                const double t_ref = t_best + shift;
                const double v_ref = dpsi_at(qbar, t_ref);
                if (v_ref > best) {
                    best = v_ref;
                    t_best = t_ref;
                }
            }
        }
    }
    return PeakEstimate{t_best, best};
}

std::vector<CurveSample> sample_curve(std::span<const double> qbar, int grid_points) {
    check_qbar(qbar, "sample_curve");
    if (grid_points < 2) throw std::invalid_argument("sample_curve: grid needs >= 2 points");

    constexpr double kSlack = 1e-12;
    std::vector<CurveSample> out;
    out.reserve(grid_points);
    double prev_psi = 0.0;
    for (int j = 0; j < grid_points; ++j) {
        const double t = static_cast<double>(j) / (grid_points - 1);
        CurveSample s{t, psi_at(qbar, t), dpsi_at(qbar, t)};
        if (s.dpsi < -kSlack)
            throw std::logic_error("sample_curve: negative slope beyond numerical slack at t = " + std::to_string(t));
        if (j > 0 && s.psi < prev_psi - kSlack)
            throw std::logic_error("sample_curve: psi not monotone at t = " + std::to_string(t));
        prev_psi = s.psi;
        out.push_back(s);
    }
    return out;
}

MeanSem xk_estimate(const XkHistogram& h) {
    if (h.runs == 0) throw std::invalid_argument("xk_estimate: histogram holds no runs");
    const long double n_bonds = static_cast<long double>(h.id.N);
    long double sum = 0, sum_sq = 0;
    for (std::size_t c = 0; c < h.counts.size(); ++c) {
        if (h.counts[c] == 0) continue;
        const long double f = static_cast<long double>(c) / n_bonds;
        sum += f * h.counts[c];
        sum_sq += f * f * h.counts[c];
    }
    const long double m = static_cast<long double>(h.runs);
    const long double mean = sum / m;
    if (h.runs == 1) return MeanSem{static_cast<double>(mean), 0.0};
    long double var = (sum_sq - m * mean * mean) / (m - 1);
    if (var < 0) var = 0;  // rounding when all counts identical
    return MeanSem{static_cast<double>(mean), static_cast<double>(std::sqrt(var / m))};
}

}  // namespace cdp
