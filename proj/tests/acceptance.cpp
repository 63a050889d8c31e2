// Acceptance gate for the constrained-degree percolation toolkit.  Each
// numbered criterion prints exactly one PASS/FAIL line with the measured
// numbers and the tolerance pinned here; the process exits nonzero if any
// criterion failed.  Everything runs in-process through the library so the
// whole gate is deterministic for a fixed master seed.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdp/estimator.hpp"
#include "cdp/experiment.hpp"
#include "cdp/fss.hpp"
#include "cdp/lattice.hpp"
#include "cdp/process.hpp"
#include "cdp/qhistogram.hpp"
#include "cdp/rng.hpp"
#include "cdp/wrap_union_find.hpp"

#include "oracles.hpp"

namespace {

constexpr std::uint64_t kMasterSeed = 7071982;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string str(const char* fmt, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

cdp::CellResult cell(int d, int L, int k, std::uint32_t batch, std::uint64_t runs,
                     bool measure_xk, unsigned workers) {
    return cdp::run_cell({.spec = cdp::LatticeSpec(d, L, k),
                          .batch = batch,
                          .runs = runs,
                          .master_seed = kMasterSeed,
                          .measure_xk = measure_xk,
                          .workers = workers});
}

double central_fd(std::span<const double> qbar, double t, double h) {
    return (cdp::psi_at(qbar, t + h) - cdp::psi_at(qbar, t - h)) / (2.0 * h);
}

// ---------------------------------------------------------------- d = 2 sweep
// Shared by criteria 1, 2 and 5: k in {3,4}, L in {16,32,64,128}, 2e4 runs,
// 5 batches.  The k = 4 pass is pinned to one worker because criterion 1
// carries the single-thread runtime cap.

struct SweepData {
    // [k][batch] -> (L, t_bar) and (L, peak slope) samples
    std::map<int, std::array<std::vector<cdp::ScalingSample>, 5>> tbar;
    std::map<int, std::array<std::vector<cdp::ScalingSample>, 5>> peak;
    std::vector<double> probe_qbar;  // d=2 k=3 L=16 batch 0, reused by criterion 10
    double k4_seconds = 0.0;
};

SweepData run_d2_sweep() {
    SweepData data;
    const std::array<int, 4> sides = {16, 32, 64, 128};
    constexpr std::uint64_t kRuns = 20000;
    for (const int k : {4, 3}) {
        const auto start = std::chrono::steady_clock::now();
        for (std::uint32_t batch = 0; batch < 5; ++batch) {
            for (const int L : sides) {
                const cdp::CellResult res =
                    cell(2, L, k, batch, kRuns, false, k == 4 ? 1u : 0u);
                const std::vector<double> qbar = cdp::q_bar(res.qhist);
                data.tbar[k][batch].push_back(
                    {double(L), cdp::mean_threshold(qbar).value()});
                data.peak[k][batch].push_back(
                    {double(L), cdp::max_dpsi(qbar).value().value});
                if (k == 3 && L == 16 && batch == 0) data.probe_qbar = qbar;
            }
        }
        if (k == 4)
            data.k4_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
    }
    return data;
}

cdp::MeanSem batched_tc(const std::array<std::vector<cdp::ScalingSample>, 5>& batches) {
    std::vector<double> tcs;
    for (const auto& samples : batches) tcs.push_back(cdp::fit_tc(samples).tc);
    return cdp::batch_stats(tcs);
}

cdp::MeanSem batched_rate(const std::array<std::vector<cdp::ScalingSample>, 5>& batches) {
    std::vector<double> rates;
    for (const auto& samples : batches) rates.push_back(cdp::fit_inv_nu(samples).rate);
    return cdp::batch_stats(rates);
}

// ------------------------------------------------------------- criterion 10
// Always-on property suite, one sub-check per clause; the criterion line
// aggregates them.

bool prop_qbar_monotone(std::span<const double> qbar) {
    for (std::size_t i = 1; i < qbar.size(); ++i)
        if (qbar[i] < qbar[i - 1]) return false;
    return qbar[0] == 0.0;
}

bool prop_psi_monotone(std::span<const double> qbar) {
    try {
        const std::vector<cdp::CurveSample> curve = cdp::sample_curve(qbar, 1001);
        for (std::size_t j = 1; j < curve.size(); ++j) {
            if (curve[j].psi < curve[j - 1].psi - 1e-12) return false;
            if (curve[j].psi < -1e-12 || curve[j].psi > 1.0 + 1e-12) return false;
        }
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

bool prop_derivative_fd(std::span<const double> qbar) {
    // Second-order convergence: halving h near the transition peak shrinks
    // the central-difference error by about 4.  Checked at the peak because
    // the third derivative (the leading error term) is largest there.
    const double t = cdp::max_dpsi(qbar).value().t;
    const double exact = cdp::dpsi_at(qbar, t);
    const double e1 = std::abs(central_fd(qbar, t, 2e-3) - exact);
    const double e2 = std::abs(central_fd(qbar, t, 1e-3) - exact);
    if (e2 > 1e-9) {
        const double ratio = e1 / e2;
        if (ratio < 2.8 || ratio > 5.5) return false;
    }
    return std::abs(central_fd(qbar, t, 1e-5) - exact) <
           1e-5 * std::max(1.0, std::abs(exact));
}

bool prop_tbar_quadrature(std::span<const double> qbar) {
    const double closed = cdp::mean_threshold(qbar).value();
    const double quad = cdp::mean_threshold_quadrature(qbar).value();
    return std::abs(closed - quad) < 1e-8;
}

bool prop_convolution_direct() {
    // The binomial mixture of the attempt-indexed wrap counts must agree with
    // simulating at fixed t directly (mark every bond with a uniform time,
    // attempt the marks <= t in time order).
    const cdp::LatticeSpec spec(2, 8, 3);
    constexpr std::uint64_t kRuns = 10000;
    const cdp::CellResult conv = cell(2, 8, 3, 1, kRuns, false, 0);
    const std::vector<double> qbar = cdp::q_bar(conv.qhist);

    cdp::ProcessContext ctx(spec);
    cdp::RunWorkspace ws(ctx);
    const std::uint64_t n = spec.bond_count();
    const std::array<double, 3> ts = {0.3, 0.5, 0.7};
    std::array<std::uint64_t, 3> wrapped = {0, 0, 0};
    std::vector<std::pair<double, std::uint32_t>> marks(n);
    std::vector<std::uint32_t> order;
    for (std::uint64_t r = 0; r < kRuns; ++r) {
        cdp::RunRng rng(cdp::SeedSpec{kMasterSeed ^ 0xD1EC7ull, r}.stream_seed());
        for (std::uint64_t b = 0; b < n; ++b)
            marks[b] = {rng.next_unit(), std::uint32_t(b)};
        std::sort(marks.begin(), marks.end());
        for (std::size_t m = 0; m < ts.size(); ++m) {
            order.clear();
            for (const auto& [mark, bond] : marks) {
                if (mark > ts[m]) break;
                order.push_back(bond);
            }
            const cdp::RunRecord rec = cdp::replay_order(ctx, 3, order, true, ws);
            if (rec.wrapped()) ++wrapped[m];
        }
    }
    for (std::size_t m = 0; m < ts.size(); ++m) {
        const double direct = double(wrapped[m]) / double(kRuns);
        const double mixture = cdp::psi_at(qbar, ts[m]);
        const double var = direct * (1.0 - direct) / double(kRuns) +
                           mixture * (1.0 - mixture) / double(kRuns);
        if (std::abs(direct - mixture) > 3.0 * std::sqrt(var) + 1e-9) return false;
    }
    return true;
}

bool prop_wrap_oracle() {
    // Randomized insertion orders on small tori, checked against the
    // brute-force lifted-cover walk after every single insertion.
    const std::array<std::pair<int, int>, 4> cases = {
        {{2, 3}, {2, 4}, {2, 5}, {3, 3}}};
    std::uint64_t salt = 0;
    for (const auto& [d, L] : cases) {
        const cdp::LatticeSpec spec(d, L, 2 * d);
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<cdp::BondId> bonds(spec.bond_count());
            for (std::uint64_t b = 0; b < bonds.size(); ++b) bonds[b] = b;
            cdp::RunRng rng(cdp::SeedSpec{kMasterSeed ^ 0x0AC1Eull, salt++}.stream_seed());
            for (std::size_t i = bonds.size(); i > 1; --i)
                std::swap(bonds[i - 1], bonds[rng.bounded(i)]);

            cdp::WrapUnionFind uf(spec.site_count(), spec.dim());
            for (std::size_t i = 0; i < bonds.size(); ++i) {
                const cdp::BondEnds ends = spec.endpoints(bonds[i]);
                uf.unite_axis(ends.u, ends.v, ends.axis);
                const oracle::CoverResult truth = oracle::cover_wrap_check(
                    spec, std::span<const cdp::BondId>(bonds.data(), i + 1));
                if (!truth.offsets_are_multiples_of_L) return false;
                if (uf.wrapped_any() != truth.wrapped) return false;
            }
            if (!uf.wrapped_any()) return false;  // full torus always wraps
        }
    }
    return true;
}

bool prop_worker_determinism() {
    const cdp::CellResult a = cell(2, 8, 3, 2, 600, true, 1);
    const cdp::CellResult b = cell(2, 8, 3, 2, 600, true, 5);
    return a.qhist.counts == b.qhist.counts && a.qhist.no_wrap == b.qhist.no_wrap &&
           a.xk.counts == b.xk.counts;
}

}  // namespace

int main() {
    try {
        // ---------------------------------------------------- criteria 1, 2, 5
        const SweepData d2 = run_d2_sweep();

        const cdp::MeanSem tc4 = batched_tc(d2.tbar.at(4));
        {
            const double dev = std::abs(tc4.mean - 0.5);
            const bool pass = dev < 0.004 && d2.k4_seconds < 300.0;
            report(1, pass,
                   str("d=2 k=4 tc = %.6f +/- %.6f, |tc - 0.5| = %.6f (tol 0.004); "
                       "single-thread k=4 sweep took %.1f s (cap 300)",
                       tc4.mean, tc4.sem, dev, d2.k4_seconds));
        }

        const cdp::MeanSem tc3 = batched_tc(d2.tbar.at(3));
        {
            const double dev = std::abs(tc3.mean - 0.532393);
            const bool pass = dev < 0.005 && tc3.mean > 0.5 && tc3.mean < 1.0;
            report(2, pass,
                   str("d=2 k=3 tc = %.6f +/- %.6f, |tc - 0.532393| = %.6f "
                       "(tol 0.005), inside (1/2, 1): %s",
                       tc3.mean, tc3.sem, dev, tc3.mean > 0.5 && tc3.mean < 1.0 ? "yes" : "no"));
        }

        // ------------------------------------------------------ criteria 3, 4
        std::map<int, double> tc_d3;
        for (const int k : {3, 4, 5, 6}) {
            std::vector<cdp::ScalingSample> samples;
            for (const int L : {8, 12, 16, 24}) {
                const cdp::CellResult res = cell(3, L, k, 0, 10000, false, 0);
                samples.push_back(
                    {double(L), cdp::mean_threshold(cdp::q_bar(res.qhist)).value()});
            }
            tc_d3[k] = cdp::fit_tc(samples).tc;
        }
        {
            const double dev = std::abs(tc_d3.at(6) - 0.248810);
            report(3, dev < 0.004,
                   str("d=3 k=6 tc = %.6f, |tc - 0.248810| = %.6f (tol 0.004)",
                       tc_d3.at(6), dev));
        }
        {
            const bool pass = tc_d3.at(3) > tc_d3.at(4) && tc_d3.at(4) > tc_d3.at(5) &&
                              tc_d3.at(5) > tc_d3.at(6);
            report(4, pass,
                   str("d=3 ordering tc(3)=%.6f > tc(4)=%.6f > tc(5)=%.6f > "
                       "tc(6)=%.6f: %s",
                       tc_d3.at(3), tc_d3.at(4), tc_d3.at(5), tc_d3.at(6),
                       pass ? "yes" : "no"));
        }

        // --------------------------------------------------------- criterion 5
        const cdp::MeanSem rate3 = batched_rate(d2.peak.at(3));
        const cdp::MeanSem rate4 = batched_rate(d2.peak.at(4));
        {
            const bool pass =
                std::abs(rate3.mean - 0.75) < 0.08 && std::abs(rate4.mean - 0.75) < 0.08;
            report(5, pass,
                   str("d=2 1/nu: k=3 %.4f +/- %.4f, k=4 %.4f +/- %.4f "
                       "(target 0.75, tol 0.08)",
                       rate3.mean, rate3.sem, rate4.mean, rate4.sem));
        }

        // --------------------------------------------------------- criterion 6
        std::map<int, std::map<int, cdp::MeanSem>> xk;  // [d][k]
        for (const int k : {1, 2, 3, 4})
            xk[2][k] = cdp::xk_estimate(cell(2, 128, k, 0, 200, true, 0).xk);
        for (const int k : {1, 2, 3, 4, 5})
            xk[3][k] = cdp::xk_estimate(cell(3, 32, k, 0, 200, true, 0).xk);
        {
            const std::array<double, 3> targets2 = {0.22670, 0.46578, 0.71094};
            double dev2 = 0.0;
            for (int k = 1; k <= 3; ++k)
                dev2 = std::max(dev2, std::abs(xk[2][k].mean - targets2[k - 1]));
            const bool full_exact = xk[2][4].mean == 1.0 && xk[2][4].sem == 0.0;
            const std::array<double, 5> targets3 = {0.15307, 0.31346, 0.47511,
                                                    0.63817, 0.80474};
            double dev3 = 0.0;
            for (int k = 1; k <= 5; ++k)
                dev3 = std::max(dev3, std::abs(xk[3][k].mean - targets3[k - 1]));
            const bool pass = dev2 < 0.001 && full_exact && dev3 < 0.002;
            report(6, pass,
                   str("x_k means: d=2 L=128 max|dev| = %.5f (tol 0.001), "
                       "x_4 = 1 exact: %s; d=3 L=32 max|dev| = %.5f (tol 0.002)",
                       dev2, full_exact ? "yes" : "no", dev3));
        }

        // --------------------------------------------------------- criterion 7
        // The full-capacity point is identically 1 and sits off the linear
        // trend, so each fit uses k < 2d, matching the measured-value range.
        for (const int k : {1, 2, 3, 4, 5, 6, 7})
            xk[4][k] = cdp::xk_estimate(cell(4, 16, k, 0, 200, true, 0).xk);
        {
            const std::array<std::pair<double, double>, 3> targets = {
                {{0.2419, 0.0016}, {0.1626, 0.0006}, {0.1225, 0.0003}}};
            bool pass = true;
            std::string parts;
            for (const int d : {2, 3, 4}) {
                std::vector<std::pair<double, double>> points;
                for (int k = 1; k < 2 * d; ++k) points.push_back({double(k), xk[d][k].mean});
                const cdp::LineFit fit = cdp::fit_line(points);
                const auto [target, target_err] = targets[d - 2];
                const double combined =
                    std::sqrt(fit.slope_err * fit.slope_err + target_err * target_err);
                const bool ok = std::abs(fit.slope - target) <= 2.0 * combined;
                pass = pass && ok;
                parts += str("%sd=%d %.4f vs %.4f +/- 2x%.4f", d == 2 ? "" : ", ", d,
                             fit.slope, target, combined);
            }
            report(7, pass, "x_k slope per dimension: " + parts);
        }

        // --------------------------------------------------------- criterion 8
        {
            const std::vector<cdp::CoupledRecord> rows = cdp::run_coupled_cell(
                {.dim = 4, .side = 8, .ks = {6, 7, 8}, .batch = 0, .runs = 10000,
                 .master_seed = kMasterSeed, .workers = 0});
            std::uint64_t weak = 0;
            std::map<std::pair<int, int>, std::uint64_t> strict;
            for (const cdp::CoupledRecord& row : rows) {
                for (std::size_t i = 0; i < row.ks.size(); ++i) {
                    for (std::size_t j = i + 1; j < row.ks.size(); ++j) {
                        const std::uint64_t t_less =
                            row.wrap_index[i] == 0 ? UINT64_MAX : row.wrap_index[i];
                        const std::uint64_t t_more =
                            row.wrap_index[j] == 0 ? UINT64_MAX : row.wrap_index[j];
                        if (t_more > t_less) ++weak;
                        if (t_more < t_less) ++strict[{row.ks[i], row.ks[j]}];
                    }
                }
            }
            const double m = double(rows.size());
            report(8, weak == 0,
                   str("d=4 L=8 ks={6,7,8} M=10000: weak ordering violations %llu "
                       "(must be 0); strict t(7)<t(6) %.2f%%, t(8)<t(7) %.2f%%, "
                       "t(8)<t(6) %.2f%%",
                       static_cast<unsigned long long>(weak),
                       100.0 * double(strict[{6, 7}]) / m,
                       100.0 * double(strict[{7, 8}]) / m,
                       100.0 * double(strict[{6, 8}]) / m));
        }

        // --------------------------------------------------------- criterion 9
        // The wrap rate collapses so fast with L that intermediate sizes are
        // statistically empty at 1e4 runs; the named endpoint sizes carry the
        // signature.
        {
            std::array<double, 2> q{};
            const std::array<int, 2> sides = {16, 64};
            for (std::size_t i = 0; i < sides.size(); ++i) {
                const cdp::CellResult res = cell(2, sides[i], 2, 0, 10000, false, 0);
                q[i] = double(res.qhist.runs - res.qhist.no_wrap) / double(res.qhist.runs);
            }
            const bool pass = q[0] > q[1];
            report(9, pass,
                   str("k=2 wrap probability at t=1 strictly decreases: "
                       "L=16 %.4f > L=64 %.4f (1e4 runs each): %s",
                       q[0], q[1], pass ? "yes" : "no"));
        }

        // -------------------------------------------------------- criterion 10
        {
            const std::span<const double> qbar(d2.probe_qbar);
            const std::array<std::pair<const char*, bool>, 7> props = {
                {{"qbar-monotone", prop_qbar_monotone(qbar)},
                 {"psi-monotone", prop_psi_monotone(qbar)},
                 {"derivative-fd", prop_derivative_fd(qbar)},
                 {"tbar-quadrature", prop_tbar_quadrature(qbar)},
                 {"convolution-direct", prop_convolution_direct()},
                 {"wrap-oracle", prop_wrap_oracle()},
                 {"worker-determinism", prop_worker_determinism()}}};
            bool pass = true;
            std::string parts;
            for (const auto& [name, ok] : props) {
                pass = pass && ok;
                parts += str("%s%s %s", parts.empty() ? "" : "; ", name, ok ? "ok" : "FAILED");
            }
            report(10, pass, "property suite: " + parts);
        }
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance: unhandled exception: %s\n", e.what());
        return 1;
    }

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
