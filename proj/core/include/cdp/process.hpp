#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdp/lattice.hpp"
#include "cdp/qhistogram.hpp"
#include "cdp/rng.hpp"
#include "cdp/wrap_union_find.hpp"

namespace cdp {

// Outcome of one constrained-opening run.
//
// wrap_index counts bonds TRIED, not bonds opened: it is the 1-based attempt
// index at which a wrapping cluster first appeared (0 = the run never
// wrapped).  The attempt convention is what makes the Q histogram
// convolve against a binomial in N trials.
struct RunRecord {
    std::uint64_t wrap_index = 0;
    std::uint64_t open_count = 0;  // bonds opened before the run ended
    int wrap_axis = -1;            // lowest wrapping axis at the wrap event
    bool completed = false;        // all N attempts were made

    bool wrapped() const { return wrap_index != 0; }
};

// Wrap indices for several capacities replayed over one shared permutation.
// Comparing entries compares percolation times pathwise: both replays see
// the same opening order, so index order is time order.
struct CoupledRecord {
    std::vector<int> ks;
    std::vector<std::uint64_t> wrap_index;  // aligned with ks, 0 = none
};

// Immutable per-(d, L) bond endpoint tables shared by every worker; avoids
// div/mod decoding in the attempt loop.
class ProcessContext {
public:
    explicit ProcessContext(const LatticeSpec& spec);

    const LatticeSpec& spec() const { return spec_; }
    std::uint64_t bond_count() const { return spec_.bond_count(); }
    std::uint32_t site_count() const { return static_cast<std::uint32_t>(spec_.site_count()); }

    SiteId bond_u(std::uint32_t b) const { return bond_u_[b]; }
    SiteId bond_v(std::uint32_t b) const { return bond_v_[b]; }
    int bond_axis(std::uint32_t b) const { return bond_axis_[b]; }

private:
    LatticeSpec spec_;
    std::vector<SiteId> bond_u_;
    std::vector<SiteId> bond_v_;
    std::vector<std::uint8_t> bond_axis_;
};

// Per-worker scratch: union-find state, permutation buffer, and open-degree
// counters cleared between runs by a generation stamp instead of an O(S)
// sweep.
class RunWorkspace {
public:
    explicit RunWorkspace(const ProcessContext& ctx);

    void begin_run();

    int degree(SiteId s) const {
        return stamp_[s] == generation_ ? degree_[s] : 0;
    }
    void bump_degree(SiteId s) {
        if (stamp_[s] == generation_) {
            ++degree_[s];
        } else {
            stamp_[s] = generation_;
            degree_[s] = 1;
        }
    }

    WrapUnionFind dsu;
    std::vector<std::uint32_t> perm;

private:
    std::vector<std::uint8_t> degree_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
};

// One run: draw a uniform bond permutation from the seed's stream and try to
// open bonds in that order; a bond opens iff both endpoints have open degree
// < k.  With measure_xk the run always makes all N attempts and reports the
// final open count; otherwise it may stop at the first wrap.
RunRecord run_once(const ProcessContext& ctx, int k, const SeedSpec& seed,
                   bool measure_xk, RunWorkspace& ws);

// Convenience overload with self-owned scratch; k comes from the spec.
RunRecord run_once(const LatticeSpec& spec, const SeedSpec& seed, bool measure_xk);

// Replay an explicit bond order (need not be a full permutation).  Test hook
// and the building block for coupled runs.
RunRecord replay_order(const ProcessContext& ctx, int k,
                       std::span<const std::uint32_t> order, bool early_stop,
                       RunWorkspace& ws);

// Draw ONE permutation from the seed's stream (identical to the order
// run_once would use) and replay it independently for each capacity in ks.
CoupledRecord run_coupled(const ProcessContext& ctx, std::span<const int> ks,
                          const SeedSpec& seed, RunWorkspace& ws);

// Fold run outcomes into a first-wrap histogram.  All records must come from
// full-information runs: a record that neither wrapped nor completed is
// rejected since its wrap fate is unknown.
QHistogram accumulate(const LatticeSpec& spec, std::span<const RunRecord> records);

// Fold completed-run open counts into a jamming histogram (measure_xk runs).
XkHistogram accumulate_xk(const LatticeSpec& spec, std::span<const RunRecord> records);

}  // namespace cdp
