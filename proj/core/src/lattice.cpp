#include "cdp/lattice.hpp"

#include <limits>
#include <stdexcept>

namespace cdp {

LatticeSpec::LatticeSpec(int d, std::int64_t L, int k) : d_(d), L_(L), k_(k) {
    if (d < 2 || d > kMaxDim)
        throw std::invalid_argument("lattice: dimension must be in [2, " +
                                    std::to_string(kMaxDim) + "], got " + std::to_string(d));
    // L = 2 would give two parallel bonds between the same site pair,
    // breaking simple-graph degree counting.
    if (L < 3)
        throw std::invalid_argument("lattice: side length must be >= 3, got " + std::to_string(L));
    if (k < 1 || k > 2 * d)
        throw std::invalid_argument("lattice: capacity must be in [1, 2d], got " + std::to_string(k));

    std::uint64_t sites = 1;
    for (int j = 0; j < d; ++j) {
        if (sites > std::numeric_limits<std::uint32_t>::max() / static_cast<std::uint64_t>(L))
            throw std::invalid_argument("lattice: L^d exceeds the supported site range (2^32 - 1)");
        sites *= static_cast<std::uint64_t>(L);
    }
    sites_ = sites;
    bonds_ = static_cast<std::uint64_t>(d) * sites;

    std::uint64_t stride = 1;
    for (int j = d - 1; j >= 0; --j) {
        stride_[j] = stride;
        stride *= static_cast<std::uint64_t>(L);
    }
}

SiteId LatticeSpec::encode(const Coord& c) const {
    std::uint64_t idx = 0;
    for (int j = 0; j < d_; ++j)
        idx = idx * static_cast<std::uint64_t>(L_) + static_cast<std::uint64_t>(c[j]);
    return static_cast<SiteId>(idx);
}

Coord LatticeSpec::decode(SiteId s) const {
    Coord c{};
    std::uint64_t idx = s;
    for (int j = d_ - 1; j >= 0; --j) {
        c[j] = static_cast<std::int32_t>(idx % static_cast<std::uint64_t>(L_));
        idx /= static_cast<std::uint64_t>(L_);
    }
    return c;
}

BondEnds LatticeSpec::endpoints(BondId b) const {
    if (b >= bonds_)
        throw std::out_of_range("lattice: bond index " + std::to_string(b) + " out of range");
    const SiteId u = static_cast<SiteId>(b / static_cast<std::uint64_t>(d_));
    const int axis = static_cast<int>(b % static_cast<std::uint64_t>(d_));
    return BondEnds{u, neighbor(u, axis), axis};
}

Disp LatticeSpec::bond_offset(BondId b) const {
    if (b >= bonds_)
        throw std::out_of_range("lattice: bond index " + std::to_string(b) + " out of range");
    Disp step{};
    step[static_cast<int>(b % static_cast<std::uint64_t>(d_))] = 1;
    return step;
}

}  // namespace cdp
