#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cdp/lattice.hpp"

using cdp::LatticeSpec;

TEST_CASE("counts for small lattices") {
    const LatticeSpec sq(2, 4, 3);
    CHECK(sq.site_count() == 16);
    CHECK(sq.bond_count() == 32);

    const LatticeSpec cube(3, 5, 6);
    CHECK(cube.site_count() == 125);
    CHECK(cube.bond_count() == 375);

    const LatticeSpec tess(4, 3, 8);
    CHECK(tess.site_count() == 81);
    CHECK(tess.bond_count() == 324);
}

TEST_CASE("validation rejects out-of-range parameters") {
    CHECK_THROWS_AS(LatticeSpec(1, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(17, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(2, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(2, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(2, 4, 5), std::invalid_argument);
    CHECK_THROWS_AS(LatticeSpec(2, 70000, 4), std::invalid_argument);  // sites > 2^32 - 1
    CHECK_THROWS_AS(LatticeSpec(16, 4, 1), std::invalid_argument);     // 4^16 = 2^32
    CHECK_NOTHROW(LatticeSpec(16, 3, 32));                             // 3^16 fits
    CHECK_NOTHROW(LatticeSpec(2, 65535, 4));
}

TEST_CASE("encode and decode are inverse and row-major") {
    const LatticeSpec spec(3, 4, 2);
    for (std::uint64_t s = 0; s < spec.site_count(); ++s) {
        const cdp::Coord c = spec.decode(static_cast<cdp::SiteId>(s));
        CHECK(spec.encode(c) == s);
    }
    // Last coordinate varies fastest.
    cdp::Coord c{};
    c[2] = 1;
    CHECK(spec.encode(c) == 1);
    c[2] = 0;
    c[1] = 1;
    CHECK(spec.encode(c) == 4);
    c[1] = 0;
    c[0] = 1;
    CHECK(spec.encode(c) == 16);
}

TEST_CASE("neighbor wraps periodically") {
    const LatticeSpec spec(2, 3, 4);
    // Sites are (row, col) with id = 3 * row + col.
    CHECK(spec.neighbor(2, 1) == 0);  // (0,2) + e_1 -> (0,0)
    CHECK(spec.neighbor(1, 1) == 2);  // (0,1) + e_1 -> (0,2)
    CHECK(spec.neighbor(6, 0) == 0);  // (2,0) + e_0 -> (0,0)
    CHECK(spec.neighbor(0, 0) == 3);  // (0,0) + e_0 -> (1,0)
    // Stepping L times along one axis returns to the start.
    for (cdp::SiteId s = 0; s < spec.site_count(); ++s)
        for (int a = 0; a < spec.dim(); ++a) {
            cdp::SiteId walk = s;
            for (int step = 0; step < spec.side(); ++step) walk = spec.neighbor(walk, a);
            CHECK(walk == s);
        }
}

TEST_CASE("bond endpoints enumerate every edge exactly once") {
    const LatticeSpec spec(2, 3, 4);
    std::set<std::pair<cdp::SiteId, cdp::SiteId>> seen;
    for (cdp::BondId b = 0; b < spec.bond_count(); ++b) {
        const cdp::BondEnds e = spec.endpoints(b);
        CHECK(e.u < spec.site_count());
        CHECK(e.v < spec.site_count());
        CHECK(e.v == spec.neighbor(e.u, e.axis));
        CHECK(b == static_cast<cdp::BondId>(e.u) * spec.dim() + e.axis);
        const auto key = std::minmax(e.u, e.v);
        const bool inserted = seen.insert({key.first, key.second}).second;
        // L = 3 has no parallel edges, so every unordered pair is new.
        CHECK(inserted);
    }
    CHECK(seen.size() == spec.bond_count());
}

TEST_CASE("bond offset is a unit step on the bond's axis") {
    const LatticeSpec spec(3, 4, 6);
    for (cdp::BondId b = 0; b < spec.bond_count(); b += 7) {
        const cdp::BondEnds e = spec.endpoints(b);
        const cdp::Disp off = spec.bond_offset(b);
        for (int a = 0; a < spec.dim(); ++a) CHECK(off[a] == (a == e.axis ? 1 : 0));
    }
}

TEST_CASE("endpoints rejects out-of-range bond ids") {
    const LatticeSpec spec(2, 3, 4);
    CHECK_THROWS_AS(spec.endpoints(spec.bond_count()), std::out_of_range);
}
