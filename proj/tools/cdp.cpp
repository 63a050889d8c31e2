// cdp: drive constrained-degree percolation experiments from the shell.
//
// Subcommands:
//   simulate  run seeded sweeps, write wrap/concentration histograms
//   curve     evaluate (t, psi, dpsi) on a grid from one histogram
//   stats     summarize histograms (mean threshold, peak slope, psi(1), x_k)
//   fit       finite-size-scaling fits over a stats report
//   couple    replay shared permutations across capacities, report ordering
//
// Exit codes: 0 success, 1 usage or environment error, 2 data/format error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdp/estimator.hpp"
#include "cdp/experiment.hpp"
#include "cdp/fss.hpp"
#include "cdp/hist_io.hpp"
#include "cdp/lattice.hpp"
#include "cdp/process.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned default_workers() {
    if (const char* env = std::getenv("CDP_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0') return static_cast<unsigned>(v);
        throw UsageError(std::string("CDP_WORKERS is not an unsigned integer: '") + env + "'");
    }
    return 0;  // resolve_workers turns 0 into hardware concurrency
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit_text(const std::string& out_path, const std::string& body) {
    if (out_path == "-") {
        std::cout << body;
        if (!std::cout) throw std::runtime_error("write to stdout failed");
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw UsageError("cannot open for writing: " + out_path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + out_path);
}

void emit_json(const std::string& out_path, const json& j) {
    emit_text(out_path, j.dump(2) + "\n");
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open for reading: " + path);
    return json::parse(in);  // parse_error maps to the data exit code
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    int d = 0;
    std::vector<std::int64_t> Ls;
    std::vector<int> ks;
    std::uint64_t runs = 0;
    std::uint64_t seed = 0;
    std::uint32_t batches = 1;
    bool measure_xk = false;
    unsigned workers = 0;
    std::string out_dir = ".";
};

// Fields shared with the JSON config file; command-line flags win.
void apply_config(SimulateOptions& opt, const json& cfg) {
    if (cfg.contains("d")) opt.d = cfg.at("d").get<int>();
    if (cfg.contains("L")) opt.Ls = cfg.at("L").get<std::vector<std::int64_t>>();
    if (cfg.contains("k")) opt.ks = cfg.at("k").get<std::vector<int>>();
    if (cfg.contains("runs")) opt.runs = cfg.at("runs").get<std::uint64_t>();
    if (cfg.contains("seed")) opt.seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("batches")) opt.batches = cfg.at("batches").get<std::uint32_t>();
    if (cfg.contains("measure_xk")) opt.measure_xk = cfg.at("measure_xk").get<bool>();
    if (cfg.contains("workers")) opt.workers = cfg.at("workers").get<unsigned>();
    if (cfg.contains("out")) opt.out_dir = cfg.at("out").get<std::string>();
}

std::string cell_name(const char* prefix, int d, std::int64_t L, int k, std::uint32_t batch) {
    return std::string(prefix) + "_d" + std::to_string(d) + "_L" + std::to_string(L) + "_k" +
           std::to_string(k) + "_b" + std::to_string(batch) + ".txt";
}

int cmd_simulate(const SimulateOptions& opt) {
    if (opt.d == 0 || opt.Ls.empty() || opt.ks.empty() || opt.runs == 0)
        throw UsageError("simulate needs --d, --L, --k and --runs (flags or config file)");
    if (opt.batches == 0) throw UsageError("--batches must be at least 1");

    // Validate the whole sweep before any file is written.
    for (std::int64_t L : opt.Ls)
        for (int k : opt.ks) (void)cdp::LatticeSpec(opt.d, L, k);

    fs::create_directories(opt.out_dir);
    const unsigned workers = opt.workers;

    for (std::uint32_t batch = 0; batch < opt.batches; ++batch) {
        for (std::int64_t L : opt.Ls) {
            for (int k : opt.ks) {
                const cdp::CellConfig cell{.spec = cdp::LatticeSpec(opt.d, L, k),
                                           .batch = batch,
                                           .runs = opt.runs,
                                           .master_seed = opt.seed,
                                           .measure_xk = opt.measure_xk,
                                           .workers = workers};
                const cdp::CellResult result = cdp::run_cell(cell);

                const fs::path qpath =
                    fs::path(opt.out_dir) / cell_name("qhist", opt.d, L, k, batch);
                cdp::write_qhist(qpath.string(), {result.qhist, opt.seed, batch});
                std::cerr << "wrote " << qpath.string() << "\n";

                if (opt.measure_xk) {
                    const fs::path xpath =
                        fs::path(opt.out_dir) / cell_name("xk", opt.d, L, k, batch);
                    cdp::write_xk_hist(xpath.string(), {result.xk, opt.seed, batch});
                    std::cerr << "wrote " << xpath.string() << "\n";
                }
            }
        }
    }
    return 0;
}

// ------------------------------------------------------------------- curve

void require_readable(const std::string& path) {
    if (!fs::exists(path)) throw UsageError("no such file: " + path);
}

int cmd_curve(const std::string& input, int grid, const std::string& out_path) {
    if (grid < 2) throw UsageError("--grid must be at least 2");
    require_readable(input);
    const cdp::QHistFile file = cdp::read_qhist(input);
    const std::vector<double> qbar = cdp::q_bar(file.hist);
    const std::vector<cdp::CurveSample> rows = cdp::sample_curve(qbar, grid);

    std::string body;
    body += "# d=" + std::to_string(file.hist.id.d) + "\n";
    body += "# L=" + std::to_string(file.hist.id.L) + "\n";
    body += "# k=" + std::to_string(file.hist.id.k) + "\n";
    body += "# N=" + std::to_string(file.hist.id.N) + "\n";
    body += "# M=" + std::to_string(file.hist.runs) + "\n";
    body += "# seed=" + std::to_string(file.seed) + "\n";
    body += "t,psi,dpsi\n";
    for (const cdp::CurveSample& r : rows)
        body += num(r.t) + "," + num(r.psi) + "," + num(r.dpsi) + "\n";
    emit_text(out_path, body);
    return 0;
}

// ------------------------------------------------------------------- stats

// Histograms carry their format in the header; dispatch on it.
std::string sniff_format(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open for reading: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# format=", 0) == 0) return line.substr(9);
        if (!line.empty() && line[0] != '#') break;
    }
    return "qhist";
}

json identity_json(const cdp::HistIdentity& id) {
    return json{{"d", id.d}, {"L", id.L}, {"k", id.k}, {"N", id.N}};
}

int cmd_stats(const std::vector<std::string>& inputs, int grid, const std::string& out_path) {
    json cells = json::array();
    for (const std::string& path : inputs) {
        const std::string format = sniff_format(path);
        json cell;
        cell["file"] = path;
        cell["format"] = format;
        if (format == "xk") {
            const cdp::XkHistFile file = cdp::read_xk_hist(path);
            cell.update(identity_json(file.hist.id));
            cell["M"] = file.hist.runs;
            cell["seed"] = file.seed;
            cell["batch"] = file.batch;
            const cdp::MeanSem xk = cdp::xk_estimate(file.hist);
            cell["xk"] = {{"mean", xk.mean}, {"sem", xk.sem}};
        } else if (format == "qhist") {
            const cdp::QHistFile file = cdp::read_qhist(path);
            cell.update(identity_json(file.hist.id));
            cell["M"] = file.hist.runs;
            cell["seed"] = file.seed;
            cell["batch"] = file.batch;
            const std::vector<double> qbar = cdp::q_bar(file.hist);
            cell["psi1"] = qbar.back();
            if (const auto tbar = cdp::mean_threshold(qbar))
                cell["tbar"] = *tbar;
            else
                cell["tbar"] = nullptr;
            if (const auto peak = cdp::max_dpsi(qbar, grid))
                cell["max_dpsi"] = {{"t", peak->t}, {"value", peak->value}};
            else
                cell["max_dpsi"] = nullptr;
        } else {
            throw cdp::FormatError("unknown histogram format '" + format + "' in " + path);
        }
        cells.push_back(std::move(cell));
    }
    emit_json(out_path, json{{"cells", cells}});
    return 0;
}

// --------------------------------------------------------------------- fit

struct CellRow {
    int d = 0;
    std::int64_t L = 0;
    int k = 0;
    std::uint32_t batch = 0;
    std::optional<double> tbar;
    std::optional<double> peak_value;
    std::optional<cdp::MeanSem> xk;
};

std::vector<CellRow> parse_stats(const json& report) {
    if (!report.contains("cells") || !report.at("cells").is_array())
        throw cdp::FormatError("stats report: missing 'cells' array");
    std::vector<CellRow> rows;
    for (const json& cell : report.at("cells")) {
        CellRow row;
        row.d = cell.at("d").get<int>();
        row.L = cell.at("L").get<std::int64_t>();
        row.k = cell.at("k").get<int>();
        row.batch = cell.value("batch", 0u);
        if (cell.contains("tbar") && cell.at("tbar").is_number())
            row.tbar = cell.at("tbar").get<double>();
        if (cell.contains("max_dpsi") && cell.at("max_dpsi").is_object())
            row.peak_value = cell.at("max_dpsi").at("value").get<double>();
        if (cell.contains("xk") && cell.at("xk").is_object())
            row.xk = cdp::MeanSem{cell.at("xk").at("mean").get<double>(),
                                  cell.at("xk").at("sem").get<double>()};
        rows.push_back(row);
    }
    return rows;
}

json mean_sem_json(std::span<const double> per_batch) {
    if (per_batch.size() == 1) return json{{"mean", per_batch[0]}, {"sem", nullptr}};
    const cdp::MeanSem ms = cdp::batch_stats(per_batch);
    return json{{"mean", ms.mean}, {"sem", ms.sem}};
}

// Scaling fits follow the batch protocol: one fit per batch, then the mean
// and standard deviation of the mean across batches.
int cmd_fit(const std::string& stats_path, const std::string& mode, bool weighted,
            const std::string& out_path) {
    const std::vector<CellRow> rows = parse_stats(load_json(stats_path));
    json groups = json::array();

    if (mode == "tc" || mode == "nu") {
        std::map<std::pair<int, int>, std::map<std::uint32_t, std::vector<cdp::ScalingSample>>>
            by_group;
        for (const CellRow& row : rows) {
            std::optional<double> value = (mode == "tc") ? row.tbar : row.peak_value;
            if (!value) continue;
            by_group[{row.d, row.k}][row.batch].push_back(
                cdp::ScalingSample{static_cast<double>(row.L), *value, std::nullopt});
        }
        if (by_group.empty())
            throw cdp::FormatError("stats report has no usable cells for mode " + mode);

        for (auto& [key, batches] : by_group) {
            json group;
            group["d"] = key.first;
            group["k"] = key.second;
            json per_batch = json::array();
            if (mode == "tc") {
                std::vector<double> tcs, exponents;
                for (auto& [batch, samples] : batches) {
                    const cdp::TcFit fit = cdp::fit_tc(samples, weighted);
                    per_batch.push_back({{"batch", batch},
                                         {"tc", fit.tc},
                                         {"amplitude", fit.amplitude},
                                         {"exponent", fit.exponent},
                                         {"residual", fit.residual}});
                    tcs.push_back(fit.tc);
                    exponents.push_back(fit.exponent);
                }
                group["per_batch"] = per_batch;
                group["tc"] = mean_sem_json(tcs);
                group["exponent"] = mean_sem_json(exponents);
            } else {
                std::vector<double> rates;
                for (auto& [batch, samples] : batches) {
                    const cdp::LogLogFit fit = cdp::fit_inv_nu(samples);
                    per_batch.push_back({{"batch", batch},
                                         {"inv_nu", fit.rate},
                                         {"slope", fit.slope},
                                         {"slope_err", fit.slope_err},
                                         {"residual", fit.residual}});
                    rates.push_back(fit.rate);
                }
                group["per_batch"] = per_batch;
                group["inv_nu"] = mean_sem_json(rates);
            }
            groups.push_back(std::move(group));
        }
    } else if (mode == "xk-slope") {
        std::map<int, std::map<std::uint32_t, std::vector<std::pair<double, double>>>> by_dim;
        for (const CellRow& row : rows) {
            if (!row.xk) continue;
            by_dim[row.d][row.batch].push_back({static_cast<double>(row.k), row.xk->mean});
        }
        if (by_dim.empty())
            throw cdp::FormatError("stats report has no concentration cells for mode xk-slope");

        for (auto& [d, batches] : by_dim) {
            json group;
            group["d"] = d;
            json per_batch = json::array();
            std::vector<double> slopes;
            for (auto& [batch, points] : batches) {
                std::sort(points.begin(), points.end());
                const cdp::LineFit fit = cdp::fit_line(points);
                per_batch.push_back({{"batch", batch},
                                     {"slope", fit.slope},
                                     {"intercept", fit.intercept},
                                     {"slope_err", fit.slope_err},
                                     {"residual", fit.residual}});
                slopes.push_back(fit.slope);
            }
            group["per_batch"] = per_batch;
            group["slope"] = mean_sem_json(slopes);
            groups.push_back(std::move(group));
        }
    } else {
        throw UsageError("--mode must be tc, nu or xk-slope");
    }

    emit_json(out_path, json{{"mode", mode}, {"groups", groups}});
    return 0;
}

// ------------------------------------------------------------------ couple

int cmd_couple(const cdp::CoupleConfig& config, const std::string& out_path) {
    if (config.ks.empty()) throw UsageError("couple needs at least one capacity in --ks");
    std::vector<int> ks = config.ks;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    cdp::CoupleConfig run = config;
    run.ks = ks;
    const std::vector<cdp::CoupledRecord> rowsv = cdp::run_coupled_cell(run);

    // A run that never wrapped sorts after every wrapping run.
    const auto time_of = [](std::uint64_t wrap_index) {
        return wrap_index == 0 ? std::numeric_limits<std::uint64_t>::max() : wrap_index;
    };

    // Higher capacity = weaker constraint, so its wrap can only come earlier
    // on a shared permutation.  A later wrap is a weak-ordering violation.
    std::uint64_t weak_violations = 0;
    std::map<std::pair<int, int>, std::uint64_t> strict;
    for (const cdp::CoupledRecord& rec : rowsv) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            for (std::size_t j = i + 1; j < ks.size(); ++j) {
                const std::uint64_t t_less = time_of(rec.wrap_index[i]);   // smaller k
                const std::uint64_t t_more = time_of(rec.wrap_index[j]);   // larger k
                if (t_more > t_less) ++weak_violations;
                if (t_more < t_less) ++strict[{ks[i], ks[j]}];
            }
        }
    }

    json pairs = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        for (std::size_t j = i + 1; j < ks.size(); ++j) {
            const std::uint64_t s = strict.count({ks[i], ks[j]}) ? strict[{ks[i], ks[j]}] : 0;
            pairs.push_back({{"k_less", ks[i]},
                             {"k_more", ks[j]},
                             {"strict_count", s},
                             {"strict_pct", 100.0 * static_cast<double>(s) /
                                                static_cast<double>(config.runs)}});
        }
    }

    json report{{"d", config.dim},
                {"L", config.side},
                {"ks", ks},
                {"M", config.runs},
                {"seed", config.master_seed},
                {"batch", config.batch},
                {"weak_violations", weak_violations},
                {"pairs", pairs}};
    emit_json(out_path, report);
    return 0;
}

// -------------------------------------------------------------------- main

// CLI11 parses the flags, but the JSON config (if any) must be loaded first
// so flags can override it.  Scan argv for --config by hand.
std::optional<std::string> find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}

int run(int argc, char** argv) {
    CLI::App app{"constrained-degree percolation experiments"};
    app.require_subcommand(1);

    SimulateOptions sim;
    sim.workers = default_workers();
    std::string config_path;

    cdp::CoupleConfig couple;
    couple.workers = default_workers();

    if (const auto cfg_path = find_config_arg(argc, argv)) {
        const json cfg = load_json(*cfg_path);
        apply_config(sim, cfg);
        if (cfg.contains("d")) couple.dim = cfg.at("d").get<int>();
        if (cfg.contains("L")) {
            const auto Ls = cfg.at("L").get<std::vector<std::int64_t>>();
            if (!Ls.empty()) couple.side = static_cast<int>(Ls.front());
        }
        if (cfg.contains("k")) couple.ks = cfg.at("k").get<std::vector<int>>();
        if (cfg.contains("runs")) couple.runs = cfg.at("runs").get<std::uint64_t>();
        if (cfg.contains("seed")) couple.master_seed = cfg.at("seed").get<std::uint64_t>();
        if (cfg.contains("workers")) couple.workers = cfg.at("workers").get<unsigned>();
    }

    CLI::App* simulate = app.add_subcommand("simulate", "run seeded sweeps, write histograms");
    simulate->add_option("--config", config_path, "JSON experiment description");
    simulate->add_option("--d", sim.d, "lattice dimension");
    simulate->add_option("--L", sim.Ls, "lattice sides (repeatable)");
    simulate->add_option("--k", sim.ks, "capacities (repeatable)");
    simulate->add_option("--runs", sim.runs, "runs per (L, k) cell per batch");
    simulate->add_option("--seed", sim.seed, "master seed");
    simulate->add_option("--batches", sim.batches, "independent batches");
    simulate->add_flag("--measure-xk", sim.measure_xk,
                       "complete every run and record final open-bond counts");
    simulate->add_option("--workers", sim.workers, "worker threads (0 = all cores)");
    simulate->add_option("--out", sim.out_dir, "output directory");

    std::string curve_input, curve_out = "-";
    int curve_grid = 1001;
    CLI::App* curve = app.add_subcommand("curve", "evaluate (t, psi, dpsi) on a grid");
    curve->add_option("input", curve_input, "wrap histogram file")->required();
    curve->add_option("--grid", curve_grid, "number of grid points including t=0,1");
    curve->add_option("--out", curve_out, "output CSV path ('-' = stdout)");

    std::vector<std::string> stats_inputs;
    std::string stats_out = "-";
    int stats_grid = 2001;
    CLI::App* stats = app.add_subcommand("stats", "summarize histogram files as JSON");
    stats->add_option("inputs", stats_inputs, "histogram files")->required();
    stats->add_option("--grid", stats_grid, "scan grid for the slope peak");
    stats->add_option("--out", stats_out, "output JSON path ('-' = stdout)");

    std::string fit_stats, fit_mode, fit_out = "-";
    bool fit_weighted = false;
    CLI::App* fit = app.add_subcommand("fit", "finite-size-scaling fits over a stats report");
    fit->add_option("stats", fit_stats, "stats JSON file")->required();
    fit->add_option("--mode", fit_mode, "tc | nu | xk-slope")->required();
    fit->add_flag("--weighted", fit_weighted, "weight scaling fits by 1/err^2");
    fit->add_option("--out", fit_out, "output JSON path ('-' = stdout)");

    std::string couple_out = "-";
    CLI::App* couple_cmd =
        app.add_subcommand("couple", "compare capacities on shared permutations");
    couple_cmd->add_option("--config", config_path, "JSON experiment description");
    couple_cmd->add_option("--d", couple.dim, "lattice dimension");
    couple_cmd->add_option("--L", couple.side, "lattice side");
    couple_cmd->add_option("--ks", couple.ks, "capacities to couple (repeatable)");
    couple_cmd->add_option("--runs", couple.runs, "coupled runs");
    couple_cmd->add_option("--seed", couple.master_seed, "master seed");
    couple_cmd->add_option("--batch", couple.batch, "batch index");
    couple_cmd->add_option("--workers", couple.workers, "worker threads (0 = all cores)");
    couple_cmd->add_option("--out", couple_out, "output JSON path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (simulate->parsed()) return cmd_simulate(sim);
    if (curve->parsed()) return cmd_curve(curve_input, curve_grid, curve_out);
    if (stats->parsed()) return cmd_stats(stats_inputs, stats_grid, stats_out);
    if (fit->parsed()) return cmd_fit(fit_stats, fit_mode, fit_weighted, fit_out);
    if (couple_cmd->parsed()) {
        if (couple.runs == 0) throw UsageError("couple needs --runs");
        return cmd_couple(couple, couple_out);
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const cdp::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
