#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace cdp {

using SiteId = std::uint32_t;
using BondId = std::uint64_t;

// Coordinates and displacements use a fixed-capacity array; only the first
// `d` entries are meaningful.
inline constexpr int kMaxDim = 16;

using Coord = std::array<std::int32_t, kMaxDim>;
using Disp = std::array<std::int64_t, kMaxDim>;

struct BondEnds {
    SiteId u;
    SiteId v;  // the +1 neighbor of u along `axis`, modulo L
    int axis;
};

// Periodic L x ... x L box in d dimensions with per-vertex capacity k.
//
// Sites are indexed row-major over coordinate vectors (c_0, ..., c_{d-1}),
// c_{d-1} varying fastest.  Bond b = site * d + axis joins `site` to its
// +1 neighbor along `axis` (wrapping mod L).  This indexing is part of the
// on-disk histogram contract and must not change.
class LatticeSpec {
public:
    LatticeSpec(int d, std::int64_t L, int k);

    int dim() const { return d_; }
    std::int64_t side() const { return L_; }
    int capacity() const { return k_; }

    std::uint64_t site_count() const { return sites_; }
    std::uint64_t bond_count() const { return bonds_; }

    SiteId encode(const Coord& c) const;
    Coord decode(SiteId s) const;

    // +1 neighbor along `axis`, periodic.
    SiteId neighbor(SiteId s, int axis) const {
        const std::uint64_t stride = stride_[axis];
        const std::uint64_t digit = (s / stride) % static_cast<std::uint64_t>(L_);
        if (digit + 1 == static_cast<std::uint64_t>(L_))
            return static_cast<SiteId>(s - (L_ - 1) * stride);
        return static_cast<SiteId>(s + stride);
    }

    BondEnds endpoints(BondId b) const;

    // Unwrapped geometric step of bond b: +1 on its axis, 0 elsewhere.
    Disp bond_offset(BondId b) const;

    bool operator==(const LatticeSpec& o) const {
        return d_ == o.d_ && L_ == o.L_ && k_ == o.k_;
    }

private:
    int d_;
    std::int64_t L_;
    int k_;
    std::uint64_t sites_;
    std::uint64_t bonds_;
    std::array<std::uint64_t, kMaxDim> stride_{};  // stride_[j] = L^(d-1-j)
};

}  // namespace cdp
