#pragma once

#include <cstdint>
#include <vector>

#include "cdp/lattice.hpp"

namespace cdp {

enum class UnionKind : std::uint8_t {
    merged,         // u and v were in different clusters
    redundant,      // same cluster, geometric mismatch zero (contractible cycle)
    wrapped,        // same cluster, mismatch nonzero: the cycle winds the torus
};

struct UnionResult {
    UnionKind kind;
    std::uint32_t wrapped_axes = 0;  // axis bitmask, nonzero only for `wrapped`
};

// Disjoint-set forest over torus sites carrying, per site, the unwrapped
// displacement to its parent.  A union of two sites already in one cluster
// compares the cluster-internal relative position with the bond's geometric
// step; a nonzero mismatch means the closing cycle winds the torus, and each
// nonzero mismatch component is a multiple of L.
//
// Displacement convention: disp[x] = pos(x) - pos(parent(x)) in unwrapped
// lattice steps, so the accumulated offset of a site is its position relative
// to its root.  Union by size, ties broken toward the smaller root id, full
// path compression.  One instance serves one run on one worker.
class WrapUnionFind {
public:
    WrapUnionFind(std::uint32_t sites, int dim);

    // Restore the all-singletons state.  Displacements are written before
    // they are read, so only parents, sizes and flags need clearing.
    void reset();

    struct FindResult {
        SiteId root;
        Disp offset;  // pos(s) - pos(root)
    };
    FindResult find(SiteId s);

    UnionResult unite(SiteId u, SiteId v, const Disp& step);
    // Unit step +1 along `axis` (the common case for lattice bonds).
    UnionResult unite_axis(SiteId u, SiteId v, int axis);

    bool wrapped_any() const { return wrapped_mask_ != 0; }
    std::uint32_t wrapped_axes() const { return wrapped_mask_; }

    std::uint32_t cluster_size(SiteId s);
    std::uint32_t site_count() const { return static_cast<std::uint32_t>(parent_.size()); }
    int dim() const { return dim_; }

private:
    // Walks to the root while accumulating displacement, then compresses the
    // path in a second pass.  Root offset is left in offset_buf_.
    SiteId find_compress(SiteId s);

    int dim_;
    std::uint32_t wrapped_mask_ = 0;
    std::vector<SiteId> parent_;
    std::vector<std::uint32_t> size_;
    std::vector<std::int64_t> disp_;      // site-major, dim_ components each
    std::vector<SiteId> path_;            // scratch for compression
    Disp offset_buf_{};
};

}  // namespace cdp
