#include <doctest.h>

#include <stdexcept>

#include "cdp/experiment.hpp"
#include "cdp/lattice.hpp"

using cdp::CellConfig;
using cdp::LatticeSpec;

TEST_CASE("cell results are identical for any worker count") {
    const LatticeSpec spec(2, 8, 3);
    cdp::CellResult reference;
    for (unsigned workers : {1u, 2u, 4u, 7u}) {
        const CellConfig cfg{.spec = spec,
                             .batch = 1,
                             .runs = 800,
                             .master_seed = 2024,
                             .measure_xk = true,
                             .workers = workers};
        const cdp::CellResult got = cdp::run_cell(cfg);
        if (workers == 1) {
            reference = got;
            CHECK(got.qhist.runs == 800);
            CHECK(got.xk.runs == 800);
        } else {
            CHECK(got.qhist.counts == reference.qhist.counts);
            CHECK(got.qhist.no_wrap == reference.qhist.no_wrap);
            CHECK(got.xk.counts == reference.xk.counts);
        }
    }
}

TEST_CASE("batches and seeds change the outcome, reruns do not") {
    const LatticeSpec spec(2, 6, 3);
    const CellConfig base{.spec = spec,
                          .batch = 0,
                          .runs = 400,
                          .master_seed = 5,
                          .measure_xk = false,
                          .workers = 2};
    const cdp::CellResult a = cdp::run_cell(base);
    const cdp::CellResult again = cdp::run_cell(base);
    CHECK(a.qhist.counts == again.qhist.counts);

    CellConfig other_batch = base;
    other_batch.batch = 1;
    CHECK(cdp::run_cell(other_batch).qhist.counts != a.qhist.counts);

    CellConfig other_seed = base;
    other_seed.master_seed = 6;
    CHECK(cdp::run_cell(other_seed).qhist.counts != a.qhist.counts);
}

TEST_CASE("empty cells are rejected") {
    const CellConfig cfg{.spec = LatticeSpec(2, 4, 2),
                         .batch = 0,
                         .runs = 0,
                         .master_seed = 0,
                         .measure_xk = false,
                         .workers = 1};
    CHECK_THROWS_AS(cdp::run_cell(cfg), std::invalid_argument);
}

TEST_CASE("coupled sweeps are deterministic and aligned") {
    cdp::CoupleConfig cfg;
    cfg.dim = 2;
    cfg.side = 6;
    cfg.ks = {2, 3, 4};
    cfg.runs = 300;
    cfg.master_seed = 77;
    cfg.workers = 3;
    const auto rows = cdp::run_coupled_cell(cfg);
    REQUIRE(rows.size() == 300);
    for (const cdp::CoupledRecord& rec : rows) {
        REQUIRE(rec.ks.size() == 3);
        REQUIRE(rec.wrap_index.size() == 3);
    }
    cfg.workers = 1;
    const auto rows1 = cdp::run_coupled_cell(cfg);
    for (std::size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].wrap_index == rows1[i].wrap_index);
}

TEST_CASE("coupled runs share the cell's permutations with plain runs") {
    // A coupled sweep over {k} must reproduce the plain sweep's histogram
    // because the per-run streams coincide (capacity is not in the seed).
    const LatticeSpec spec(2, 6, 3);
    const CellConfig plain{.spec = spec,
                           .batch = 0,
                           .runs = 200,
                           .master_seed = 31,
                           .measure_xk = false,
                           .workers = 2};
    const cdp::CellResult cell = cdp::run_cell(plain);

    cdp::CoupleConfig cfg;
    cfg.dim = 2;
    cfg.side = 6;
    cfg.ks = {3};
    cfg.runs = 200;
    cfg.master_seed = 31;
    cfg.batch = 0;
    cfg.workers = 2;
    const auto rows = cdp::run_coupled_cell(cfg);

    cdp::QHistogram rebuilt(cell.qhist.id);
    for (const auto& rec : rows) {
        if (rec.wrap_index[0] != 0)
            rebuilt.add_wrap(rec.wrap_index[0]);
        else
            rebuilt.add_no_wrap();
    }
    CHECK(rebuilt.counts == cell.qhist.counts);
    CHECK(rebuilt.no_wrap == cell.qhist.no_wrap);
}
