#include "cdp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

#include "cdp/rng.hpp"

namespace cdp {

unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

CellResult run_cell(const CellConfig& config) {
    if (config.runs == 0) throw std::invalid_argument("run_cell: runs must be positive");
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(config.workers), config.runs));

    const ProcessContext ctx(config.spec);
    const std::uint64_t cell =
        cell_seed(config.master_seed, config.spec.dim(), config.spec.side(), config.batch);

    struct WorkerOut {
        std::vector<RunRecord> records;
    };
    std::vector<WorkerOut> outs(workers);
    std::atomic<std::uint64_t> next{0};

    auto work = [&](unsigned w) {
        RunWorkspace ws(ctx);
        auto& records = outs[w].records;
        for (;;) {
            const std::uint64_t r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= config.runs) break;
            SeedSpec seed{cell, r};
            records.push_back(run_once(ctx, config.spec.capacity(), seed, config.measure_xk, ws));
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }

    std::vector<RunRecord> all;
    all.reserve(config.runs);
    for (WorkerOut& o : outs)
        all.insert(all.end(), o.records.begin(), o.records.end());

    CellResult result;
    result.qhist = accumulate(config.spec, all);
    if (config.measure_xk) result.xk = accumulate_xk(config.spec, all);
    return result;
}

std::vector<CoupledRecord> run_coupled_cell(const CoupleConfig& config) {
    if (config.runs == 0) throw std::invalid_argument("run_coupled_cell: runs must be positive");
    if (config.ks.empty()) throw std::invalid_argument("run_coupled_cell: ks must be nonempty");
    // Validate every capacity against the cell geometry up front.
    for (int k : config.ks) (void)LatticeSpec(config.dim, config.side, k);

    const LatticeSpec spec(config.dim, config.side, config.ks.front());
    const ProcessContext ctx(spec);
    const std::uint64_t cell = cell_seed(config.master_seed, config.dim, config.side, config.batch);
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(resolve_workers(config.workers), config.runs));

    std::vector<CoupledRecord> rows(config.runs);
    std::atomic<std::uint64_t> next{0};

    auto work = [&]() {
        RunWorkspace ws(ctx);
        for (;;) {
            const std::uint64_t r = next.fetch_add(1, std::memory_order_relaxed);
            if (r >= config.runs) break;
            SeedSpec seed{cell, r};
            rows[r] = run_coupled(ctx, config.ks, seed, ws);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    return rows;
}

}  // namespace cdp
