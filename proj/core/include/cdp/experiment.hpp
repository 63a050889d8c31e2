#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdp/lattice.hpp"
#include "cdp/process.hpp"
#include "cdp/qhistogram.hpp"

namespace cdp {

// Drives a batch of independent runs for one lattice cell and merges the
// per-run results into histograms.  Results are bitwise identical for any
// worker count: run r always consumes the stream seeded by
// stream_seed(cell_seed(master, d, L, batch), r), and histogram merging is
// order-free (integer counts).

struct CellResult {
    QHistogram qhist;
    XkHistogram xk;  // runs == 0 unless measure_xk was set
};

struct CellConfig {
    LatticeSpec spec;
    std::uint32_t batch = 0;
    std::uint64_t runs = 0;
    std::uint64_t master_seed = 0;
    bool measure_xk = false;
    unsigned workers = 1;  // 0 means hardware_concurrency
};

CellResult run_cell(const CellConfig& config);

// Runs the same bond permutation for each capacity in `ks` (pathwise
// coupling) and reports the wrap attempt index for each.  One row per run.
struct CoupleConfig {
    int dim = 2;
    int side = 8;
    std::vector<int> ks;
    std::uint32_t batch = 0;
    std::uint64_t runs = 0;
    std::uint64_t master_seed = 0;
    unsigned workers = 1;
};

std::vector<CoupledRecord> run_coupled_cell(const CoupleConfig& config);

unsigned resolve_workers(unsigned requested);

}  // namespace cdp
