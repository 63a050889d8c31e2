#include "cdp/qhistogram.hpp"

#include <stdexcept>

namespace cdp {

void QHistogram::merge(const QHistogram& other) {
    if (!(id == other.id))
        throw std::invalid_argument("qhistogram: merge of mismatched ensembles (d, L, k, N must agree)");
    runs += other.runs;
    no_wrap += other.no_wrap;
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

void XkHistogram::merge(const XkHistogram& other) {
    if (!(id == other.id))
        throw std::invalid_argument("xkhistogram: merge of mismatched ensembles (d, L, k, N must agree)");
    runs += other.runs;
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

}  // namespace cdp
