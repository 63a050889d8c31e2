#include "cdp/wrap_union_find.hpp"

#include <cassert>
#include <numeric>

namespace cdp {

WrapUnionFind::WrapUnionFind(std::uint32_t sites, int dim)
    : dim_(dim),
      parent_(sites),
      size_(sites, 1),
      disp_(static_cast<std::size_t>(sites) * static_cast<std::size_t>(dim), 0) {
    assert(dim >= 1 && dim <= kMaxDim);
    std::iota(parent_.begin(), parent_.end(), SiteId{0});
    path_.reserve(64);
}

void WrapUnionFind::reset() {
    std::iota(parent_.begin(), parent_.end(), SiteId{0});
    std::fill(size_.begin(), size_.end(), 1u);
    wrapped_mask_ = 0;
}

SiteId WrapUnionFind::find_compress(SiteId s) {
    for (int j = 0; j < dim_; ++j) offset_buf_[j] = 0;

    SiteId x = s;
    path_.clear();
    while (parent_[x] != x) {
        path_.push_back(x);
        const std::int64_t* dx = &disp_[static_cast<std::size_t>(x) * dim_];
        for (int j = 0; j < dim_; ++j) offset_buf_[j] += dx[j];
        x = parent_[x];
    }
    const SiteId root = x;

    // Re-point every visited node at the root.  `running` starts as the full
    // offset of the first node and sheds each node's old displacement as the
    // walk advances, which is exactly that node's offset to the root.
    Disp running = offset_buf_;
    for (SiteId node : path_) {
        std::int64_t* dn = &disp_[static_cast<std::size_t>(node) * dim_];
        for (int j = 0; j < dim_; ++j) {
            const std::int64_t old = dn[j];
            dn[j] = running[j];
            running[j] -= old;
        }
        parent_[node] = root;
    }
    return root;
}

WrapUnionFind::FindResult WrapUnionFind::find(SiteId s) {
    const SiteId root = find_compress(s);
    FindResult r{root, Disp{}};
    for (int j = 0; j < dim_; ++j) r.offset[j] = offset_buf_[j];
    return r;
}

UnionResult WrapUnionFind::unite(SiteId u, SiteId v, const Disp& step) {
    assert(u != v);

    const SiteId ru = find_compress(u);
    Disp off_u;
    for (int j = 0; j < dim_; ++j) off_u[j] = offset_buf_[j];
    const SiteId rv = find_compress(v);

    // Mismatch between the cluster-internal relative position of u and v and
    // the geometric step asserted by this bond.
    Disp m;
    std::uint32_t nonzero = 0;
    for (int j = 0; j < dim_; ++j) {
        m[j] = off_u[j] - offset_buf_[j] + step[j];
        if (m[j] != 0) nonzero |= 1u << j;
    }

    if (ru == rv) {
        if (nonzero == 0) return UnionResult{UnionKind::redundant, 0};
        wrapped_mask_ |= nonzero;
        return UnionResult{UnionKind::wrapped, nonzero};
    }

    SiteId child = rv, parent = ru;
    bool attach_rv = true;
    if (size_[ru] < size_[rv] || (size_[ru] == size_[rv] && rv < ru)) {
        child = ru;
        parent = rv;
        attach_rv = false;
    }
    std::int64_t* dc = &disp_[static_cast<std::size_t>(child) * dim_];
    // disp[child] = pos(child) - pos(parent); equals +m when rv goes under
    // ru and -m in the opposite orientation.
    for (int j = 0; j < dim_; ++j) dc[j] = attach_rv ? m[j] : -m[j];
    parent_[child] = parent;
    size_[parent] += size_[child];
    return UnionResult{UnionKind::merged, 0};
}

UnionResult WrapUnionFind::unite_axis(SiteId u, SiteId v, int axis) {
    Disp step{};
    step[axis] = 1;
    return unite(u, v, step);
}

std::uint32_t WrapUnionFind::cluster_size(SiteId s) {
    return size_[find_compress(s)];
}

}  // namespace cdp
