#include "cdp/process.hpp"

#include <bit>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace cdp {

ProcessContext::ProcessContext(const LatticeSpec& spec) : spec_(spec) {
    const std::uint64_t n = spec_.bond_count();
    bond_u_.resize(n);
    bond_v_.resize(n);
    bond_axis_.resize(n);
    const int d = spec_.dim();
    std::uint64_t b = 0;
    for (std::uint64_t s = 0; s < spec_.site_count(); ++s) {
        for (int a = 0; a < d; ++a, ++b) {
            bond_u_[b] = static_cast<SiteId>(s);
            bond_v_[b] = spec_.neighbor(static_cast<SiteId>(s), a);
            bond_axis_[b] = static_cast<std::uint8_t>(a);
        }
    }
}

RunWorkspace::RunWorkspace(const ProcessContext& ctx)
    : dsu(ctx.site_count(), ctx.spec().dim()),
      perm(ctx.bond_count()),
      degree_(ctx.site_count(), 0),
      stamp_(ctx.site_count(), 0) {}

void RunWorkspace::begin_run() {
    dsu.reset();
    ++generation_;
    if (generation_ == 0) {  // stamp wrap-around after 2^32 runs
        std::fill(stamp_.begin(), stamp_.end(), 0u);
        generation_ = 1;
    }
}

namespace {

// Try bond b; returns true if the run is over (wrap with early stop).
inline bool attempt_bond(const ProcessContext& ctx, int k, RunWorkspace& ws,
                         std::uint32_t b, std::uint64_t attempt_index,
                         bool early_stop, RunRecord& rec) {
    const SiteId u = ctx.bond_u(b);
    const SiteId v = ctx.bond_v(b);
    if (ws.degree(u) >= k || ws.degree(v) >= k) return false;

    ws.bump_degree(u);
    ws.bump_degree(v);
    assert(ws.degree(u) <= k && ws.degree(v) <= k);
    ++rec.open_count;

    const UnionResult res = ws.dsu.unite_axis(u, v, ctx.bond_axis(b));
    if (res.kind == UnionKind::wrapped && rec.wrap_index == 0) {
        rec.wrap_index = attempt_index;
        rec.wrap_axis = std::countr_zero(res.wrapped_axes);
        if (early_stop) return true;
    }
    return false;
}

}  // namespace

RunRecord run_once(const ProcessContext& ctx, int k, const SeedSpec& seed,
                   bool measure_xk, RunWorkspace& ws) {
    if (k < 1 || k > 2 * ctx.spec().dim())
        throw std::invalid_argument("process: capacity out of [1, 2d]");
    ws.begin_run();
    RunRng rng(seed);

    const std::uint64_t n = ctx.bond_count();
    std::iota(ws.perm.begin(), ws.perm.end(), 0u);

    RunRecord rec;
    std::uint64_t i = 0;
    for (; i < n; ++i) {
        // Online Fisher-Yates: element i is finalized just before use, so a
        // run that stops early never draws for the unseen tail.
        const std::uint64_t j = i + rng.bounded(n - i);
        std::swap(ws.perm[i], ws.perm[j]);
        if (attempt_bond(ctx, k, ws, ws.perm[i], i + 1, !measure_xk, rec)) {
            ++i;
            break;
        }
    }
    rec.completed = (i == n);
    return rec;
}

RunRecord run_once(const LatticeSpec& spec, const SeedSpec& seed, bool measure_xk) {
    ProcessContext ctx(spec);
    RunWorkspace ws(ctx);
    return run_once(ctx, spec.capacity(), seed, measure_xk, ws);
}

RunRecord replay_order(const ProcessContext& ctx, int k,
                       std::span<const std::uint32_t> order, bool early_stop,
                       RunWorkspace& ws) {
    if (k < 1 || k > 2 * ctx.spec().dim())
        throw std::invalid_argument("process: capacity out of [1, 2d]");
    ws.begin_run();
    RunRecord rec;
    std::uint64_t i = 0;
    for (; i < order.size(); ++i) {
        if (attempt_bond(ctx, k, ws, order[i], i + 1, early_stop, rec)) {
            ++i;
            break;
        }
    }
    rec.completed = (i == order.size());
    return rec;
}

CoupledRecord run_coupled(const ProcessContext& ctx, std::span<const int> ks,
                          const SeedSpec& seed, RunWorkspace& ws) {
    if (ks.empty())
        throw std::invalid_argument("process: coupled run needs at least one capacity");
    for (int k : ks)
        if (k < 1 || k > 2 * ctx.spec().dim())
            throw std::invalid_argument("process: capacity out of [1, 2d]");

    // Materialize the same permutation run_once would consume lazily.
    RunRng rng(seed);
    const std::uint64_t n = ctx.bond_count();
    std::iota(ws.perm.begin(), ws.perm.end(), 0u);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t j = i + rng.bounded(n - i);
        std::swap(ws.perm[i], ws.perm[j]);
    }

    CoupledRecord rec;
    rec.ks.assign(ks.begin(), ks.end());
    rec.wrap_index.reserve(ks.size());
    for (int k : ks) {
        const RunRecord r = replay_order(ctx, k, ws.perm, /*early_stop=*/true, ws);
        rec.wrap_index.push_back(r.wrap_index);
    }
    return rec;
}

QHistogram accumulate(const LatticeSpec& spec, std::span<const RunRecord> records) {
    QHistogram h(HistIdentity{spec.dim(), spec.side(), spec.capacity(), spec.bond_count()});
    for (const RunRecord& r : records) {
        if (r.wrapped()) {
            if (r.wrap_index > h.id.N)
                throw std::invalid_argument("accumulate: wrap index exceeds bond count; record from another lattice?");
            h.add_wrap(r.wrap_index);
        } else if (r.completed) {
            h.add_no_wrap();
        } else {
            throw std::invalid_argument("accumulate: incomplete unwrapped record carries no wrap information");
        }
    }
    return h;
}

XkHistogram accumulate_xk(const LatticeSpec& spec, std::span<const RunRecord> records) {
    XkHistogram h(HistIdentity{spec.dim(), spec.side(), spec.capacity(), spec.bond_count()});
    for (const RunRecord& r : records) {
        if (!r.completed)
            throw std::invalid_argument("accumulate_xk: open counts need completed runs (measure_xk)");
        h.add(r.open_count);
    }
    return h;
}

}  // namespace cdp
