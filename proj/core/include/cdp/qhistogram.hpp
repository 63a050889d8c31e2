#pragma once

#include <cstdint>
#include <vector>

namespace cdp {

// Identifies the ensemble a histogram was sampled from.  Merging histograms
// with different identities is rejected.
struct HistIdentity {
    int d = 0;
    std::int64_t L = 0;
    int k = 0;
    std::uint64_t N = 0;  // bond count d * L^d

    bool operator==(const HistIdentity&) const = default;
};

// Counts of first-wrap attempt indices over many runs.  counts[i] is the
// number of runs whose first wrap happened when the i-th bond (1-based,
// counting attempts) was tried; no_wrap counts runs that never wrapped.
// Merging is element-wise addition, so accumulation order is irrelevant.
struct QHistogram {
    HistIdentity id;
    std::uint64_t runs = 0;
    std::uint64_t no_wrap = 0;
    std::vector<std::uint64_t> counts;  // size N + 1, index 0 unused

    explicit QHistogram(const HistIdentity& ident)
        : id(ident), counts(ident.N + 1, 0) {}
    QHistogram() = default;

    void add_wrap(std::uint64_t attempt_index) {
        counts[attempt_index] += 1;
        runs += 1;
    }
    void add_no_wrap() {
        no_wrap += 1;
        runs += 1;
    }

    void merge(const QHistogram& other);
};

// Counts of final open-bond totals (t = 1 jamming states) over many runs.
struct XkHistogram {
    HistIdentity id;
    std::uint64_t runs = 0;
    std::vector<std::uint64_t> counts;  // size N + 1, indexed by open count

    explicit XkHistogram(const HistIdentity& ident)
        : id(ident), counts(ident.N + 1, 0) {}
    XkHistogram() = default;

    void add(std::uint64_t open_count) {
        counts[open_count] += 1;
        runs += 1;
    }

    void merge(const XkHistogram& other);
};

}  // namespace cdp
