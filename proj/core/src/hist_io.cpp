#include "cdp/hist_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cdp {

namespace {

[[noreturn]] void fail(const std::string& what) { throw FormatError("histogram file: " + what); }

std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        fail(std::string("bad integer for ") + what + ": '" + s + "'");
    return v;
}

struct Header {
    std::map<std::string, std::string> kv;
    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::uint64_t u64(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) fail("missing header key '" + key + "'");
        return parse_u64(it->second, key.c_str());
    }
    std::uint64_t u64_or(const std::string& key, std::uint64_t dflt) const {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : parse_u64(it->second, key.c_str());
    }
};

// Reads header lines and leaves the stream positioned at the first body line.
Header read_header(std::istream& in, std::string& pending_line) {
    Header h;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') {
            pending_line = line;
            break;
        }
        std::size_t pos = 1;
        while (pos < line.size() && line[pos] == ' ') ++pos;
        const std::size_t eq = line.find('=', pos);
        if (eq == std::string::npos) fail("header line without '=': '" + line + "'");
        std::string key = line.substr(pos, eq - pos);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        if (key.empty()) fail("header line with empty key: '" + line + "'");
        h.kv[key] = value;
    }
    return h;
}

HistIdentity identity_from(const Header& h) {
    HistIdentity id;
    id.d = static_cast<int>(h.u64("d"));
    id.L = static_cast<std::int64_t>(h.u64("L"));
    id.k = static_cast<int>(h.u64("k"));
    id.N = h.u64("N");
    if (id.d < 2 || id.d > 16) fail("d out of range: " + std::to_string(id.d));
    if (id.L < 3) fail("L out of range: " + std::to_string(id.L));
    if (id.k < 1 || id.k > 2 * id.d) fail("k out of range: " + std::to_string(id.k));
    // N must equal d * L^d; also guards the counts allocation below.
    unsigned long long sites = 1;
    for (int i = 0; i < id.d; ++i) {
        if (sites > (1ULL << 32) / static_cast<unsigned long long>(id.L))
            fail("lattice too large for this histogram format");
        sites *= static_cast<unsigned long long>(id.L);
    }
    if (id.N != sites * static_cast<unsigned long long>(id.d))
        fail("N=" + std::to_string(id.N) + " inconsistent with d,L");
    return id;
}

void write_header(std::ostream& out, const char* format, const HistIdentity& id,
                  std::uint64_t runs, std::uint64_t seed, std::uint32_t batch) {
    out << "# format=" << format << '\n';
    out << "# d=" << id.d << '\n';
    out << "# L=" << id.L << '\n';
    out << "# k=" << id.k << '\n';
    out << "# N=" << id.N << '\n';
    out << "# M=" << runs << '\n';
    out << "# seed=" << seed << '\n';
    out << "# batch=" << batch << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

}  // namespace

void write_qhist(std::ostream& out, const QHistFile& file) {
    const QHistogram& h = file.hist;
    write_header(out, "qhist", h.id, h.runs, file.seed, file.batch);
    for (std::size_t i = 1; i < h.counts.size(); ++i)
        if (h.counts[i] != 0) out << i << ' ' << h.counts[i] << '\n';
    out << "inf " << h.no_wrap << '\n';
    if (!out) throw std::runtime_error("write failed for wrap histogram");
}

void write_qhist(const std::string& path, const QHistFile& file) {
    std::ofstream out = open_out(path);
    write_qhist(out, file);
}

QHistFile read_qhist(std::istream& in) {
    std::string pending;
    const Header header = read_header(in, pending);
    if (header.has("format") && header.kv.at("format") != "qhist")
        fail("expected format=qhist, got '" + header.kv.at("format") + "'");

    QHistFile file;
    file.hist.id = identity_from(header);
    const std::uint64_t runs = header.u64("M");
    file.seed = header.u64_or("seed", 0);
    file.batch = static_cast<std::uint32_t>(header.u64_or("batch", 0));
    file.hist.counts.assign(file.hist.id.N + 1, 0);

    bool saw_inf = false;
    std::uint64_t total = 0;
    std::string line = pending;
    bool have_line = !pending.empty();
    while (have_line || std::getline(in, line)) {
        have_line = false;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string index_token;
        std::uint64_t count = 0;
        if (!(row >> index_token >> count)) fail("bad body line: '" + line + "'");
        std::string trailing;
        if (row >> trailing) fail("trailing tokens on body line: '" + line + "'");
        if (index_token == "inf") {
            if (saw_inf) fail("duplicate 'inf' row");
            saw_inf = true;
            file.hist.no_wrap = count;
        } else {
            if (saw_inf) fail("body rows after 'inf'");
            const std::uint64_t idx = parse_u64(index_token, "attempt index");
            if (idx < 1 || idx > file.hist.id.N)
                fail("attempt index out of range [1,N]: '" + index_token + "'");
            if (file.hist.counts[idx] != 0) fail("duplicate row for index " + index_token);
            file.hist.counts[idx] = count;
        }
        total += count;
    }
    if (!saw_inf) fail("missing 'inf' row");
    if (total != runs)
        fail("counts sum to " + std::to_string(total) + " but M=" + std::to_string(runs));
    file.hist.runs = runs;
    return file;
}

QHistFile read_qhist(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_qhist(in);
}

void write_xk_hist(std::ostream& out, const XkHistFile& file) {
    const XkHistogram& h = file.hist;
    write_header(out, "xk", h.id, h.runs, file.seed, file.batch);
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        if (h.counts[i] != 0) out << i << ' ' << h.counts[i] << '\n';
    if (!out) throw std::runtime_error("write failed for concentration histogram");
}

void write_xk_hist(const std::string& path, const XkHistFile& file) {
    std::ofstream out = open_out(path);
    write_xk_hist(out, file);
}

XkHistFile read_xk_hist(std::istream& in) {
    std::string pending;
    const Header header = read_header(in, pending);
    if (header.has("format") && header.kv.at("format") != "xk")
        fail("expected format=xk, got '" + header.kv.at("format") + "'");

    XkHistFile file;
    file.hist.id = identity_from(header);
    const std::uint64_t runs = header.u64("M");
    file.seed = header.u64_or("seed", 0);
    file.batch = static_cast<std::uint32_t>(header.u64_or("batch", 0));
    file.hist.counts.assign(file.hist.id.N + 1, 0);

    std::uint64_t total = 0;
    std::string line = pending;
    bool have_line = !pending.empty();
    while (have_line || std::getline(in, line)) {
        have_line = false;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string index_token;
        std::uint64_t count = 0;
        if (!(row >> index_token >> count)) fail("bad body line: '" + line + "'");
        std::string trailing;
        if (row >> trailing) fail("trailing tokens on body line: '" + line + "'");
        const std::uint64_t idx = parse_u64(index_token, "open count");
        if (idx > file.hist.id.N) fail("open count beyond N: '" + index_token + "'");
        if (file.hist.counts[idx] != 0) fail("duplicate row for index " + index_token);
        file.hist.counts[idx] = count;
        total += count;
    }
    if (total != runs)
        fail("counts sum to " + std::to_string(total) + " but M=" + std::to_string(runs));
    file.hist.runs = runs;
    return file;
}

XkHistFile read_xk_hist(const std::string& path) {
    std::ifstream in = open_in(path);
    return read_xk_hist(in);
}

}  // namespace cdp
