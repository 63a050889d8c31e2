#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "cdp/qhistogram.hpp"

namespace cdp {

// Thrown by the readers on malformed input (missing keys, count mismatch,
// out-of-range rows).  Callers use it to separate data problems from
// usage or I/O problems.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text container for histograms.  Layout:
//
//   # format=qhist
//   # d=2
//   # L=16
//   # k=3
//   # N=512
//   # M=20000
//   # seed=12345
//   # batch=0
//   3 1
//   17 4
//   ...
//   inf 12
//
// Header lines are `# key=value`, order free, unknown keys ignored.  Body
// lines are `index count` pairs with zero-count rows omitted; `inf` records
// runs that never wrapped.  Concentration histograms use `format=xk` and
// index by open-bond count with no `inf` row.  seed/batch are provenance
// echoes and not required on read.

struct QHistFile {
    QHistogram hist;
    std::uint64_t seed = 0;
    std::uint32_t batch = 0;
};

struct XkHistFile {
    XkHistogram hist;
    std::uint64_t seed = 0;
    std::uint32_t batch = 0;
};

void write_qhist(std::ostream& out, const QHistFile& file);
void write_qhist(const std::string& path, const QHistFile& file);
QHistFile read_qhist(std::istream& in);
QHistFile read_qhist(const std::string& path);

void write_xk_hist(std::ostream& out, const XkHistFile& file);
void write_xk_hist(const std::string& path, const XkHistFile& file);
XkHistFile read_xk_hist(std::istream& in);
XkHistFile read_xk_hist(const std::string& path);

}  // namespace cdp
