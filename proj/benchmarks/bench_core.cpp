#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "cdp/estimator.hpp"
#include "cdp/experiment.hpp"
#include "cdp/lattice.hpp"
#include "cdp/process.hpp"
#include "cdp/rng.hpp"
#include "cdp/wrap_union_find.hpp"

namespace {

// Fixed shuffled bond order so every iteration does identical work.
std::vector<cdp::BondId> shuffled_bonds(const cdp::LatticeSpec& spec, std::uint64_t seed) {
    std::vector<cdp::BondId> bonds(spec.bond_count());
    for (std::uint64_t b = 0; b < bonds.size(); ++b) bonds[b] = b;
    cdp::RunRng rng(seed);
    for (std::size_t i = bonds.size(); i > 1; --i)
        std::swap(bonds[i - 1], bonds[rng.bounded(i)]);
    return bonds;
}

void BM_UniteFullLattice(benchmark::State& state) {
    const cdp::LatticeSpec spec(2, state.range(0), 4);
    const std::vector<cdp::BondId> bonds = shuffled_bonds(spec, 17);
    cdp::WrapUnionFind uf(spec.site_count(), spec.dim());
    for (auto _ : state) {
        uf.reset();
        for (const cdp::BondId b : bonds) {
            const cdp::BondEnds ends = spec.endpoints(b);
            benchmark::DoNotOptimize(uf.unite_axis(ends.u, ends.v, ends.axis));
        }
    }
    state.SetItemsProcessed(state.iterations() * int64_t(bonds.size()));
}
BENCHMARK(BM_UniteFullLattice)->Arg(64)->Arg(256);

void BM_RunToWrap(benchmark::State& state) {
    const cdp::LatticeSpec spec(2, state.range(0), 3);
    cdp::ProcessContext ctx(spec);
    cdp::RunWorkspace ws(ctx);
    std::uint64_t run = 0;
    for (auto _ : state) {
        const cdp::RunRecord rec =
            cdp::run_once(ctx, 3, cdp::SeedSpec{99, run++}, false, ws);
        benchmark::DoNotOptimize(rec.wrap_index);
    }
}
BENCHMARK(BM_RunToWrap)->Arg(32)->Arg(128);

// Full sweep to t = 1 (jamming measurement path): always N attempts.
void BM_RunFull(benchmark::State& state) {
    const cdp::LatticeSpec spec(2, state.range(0), 3);
    cdp::ProcessContext ctx(spec);
    cdp::RunWorkspace ws(ctx);
    std::uint64_t run = 0;
    for (auto _ : state) {
        const cdp::RunRecord rec =
            cdp::run_once(ctx, 3, cdp::SeedSpec{99, run++}, true, ws);
        benchmark::DoNotOptimize(rec.open_count);
    }
    state.SetItemsProcessed(state.iterations() * int64_t(spec.bond_count()));
}
BENCHMARK(BM_RunFull)->Arg(32)->Arg(128);

void BM_RunCoupled(benchmark::State& state) {
    const cdp::LatticeSpec spec(3, 8, 6);
    cdp::ProcessContext ctx(spec);
    cdp::RunWorkspace ws(ctx);
    const std::vector<int> ks = {4, 5, 6};
    std::uint64_t run = 0;
    for (auto _ : state) {
        const cdp::CoupledRecord rec =
            cdp::run_coupled(ctx, ks, cdp::SeedSpec{99, run++}, ws);
        benchmark::DoNotOptimize(rec.wrap_index.data());
    }
}
BENCHMARK(BM_RunCoupled);

// Single mixture evaluation; cost scales with the O(sqrt(N)) binomial window.
void BM_PsiEval(benchmark::State& state) {
    const std::uint64_t n = state.range(0);
    std::vector<double> qbar(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i)
        qbar[i] = double(i) / double(n);
    double t = 0.25;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cdp::psi_at(qbar, t));
        t = t < 0.75 ? t + 1e-4 : 0.25;
    }
}
BENCHMARK(BM_PsiEval)->Arg(4096)->Arg(32768);

}  // namespace

BENCHMARK_MAIN();
