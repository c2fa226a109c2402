#include "gadaboost/cli/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

namespace gadaboost::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxGridPoints = 200;

std::vector<int> make_grid(int max_fp) {
    std::vector<int> grid;
    const int step = std::max(1, (max_fp + kMaxGridPoints - 1) / kMaxGridPoints);
    for (int fp = 0; fp < max_fp; fp += step) {
        grid.push_back(fp);
    }
    grid.push_back(std::max(max_fp, 0));
    return grid;
}

int final_fp(const std::vector<RocPoint>& roc) { return roc.empty() ? 0 : roc.back().false_positives; }

// Middle of a curve along the false-positive axis.
int mid_curve_fp(const std::vector<RocPoint>& roc) { return final_fp(roc) / 2; }

}  // namespace

std::vector<BenchCell> bench_cells(const RunConfig& cfg) {
    std::vector<BenchCell> cells;
    if (cfg.bench.include_baseline) {
        cells.push_back({"baseline", TrainingMode::Baseline, 0, 0});
    }
    std::vector<int> pops = cfg.bench.populations;
    std::vector<int> iters = cfg.bench.iterations;
    if (pops.empty()) {
        pops.push_back(cfg.train.ga.population_size);
    }
    if (iters.empty()) {
        iters.push_back(cfg.train.ga.max_iterations);
    }
    for (int p : pops) {
        for (int i : iters) {
            cells.push_back({"ga_p" + std::to_string(p) + "_i" + std::to_string(i), TrainingMode::Ga, p, i});
        }
    }
    return cells;
}

BenchResult run_bench(const RunConfig& cfg, const Dataset& data, const std::function<void(const BenchRow&)>& progress) {
    BenchResult result;
    std::vector<std::uint64_t> seeds = cfg.bench.seeds;
    if (seeds.empty()) {
        seeds.push_back(cfg.train.rng_seed);
    }
    const auto truths = truths_of(data.eval);
    const bool evaluate = !truths.empty();
    const auto cells = bench_cells(cfg);

    std::map<std::uint64_t, double> baseline_seconds;
    for (const auto& cell : cells) {
        for (std::uint64_t seed : seeds) {
            TrainConfig tc = cfg.train;
            tc.mode = cell.mode;
            tc.rng_seed = seed;
            if (cell.mode == TrainingMode::Ga) {
                tc.ga.population_size = cell.population;
                tc.ga.max_iterations = cell.iterations;
            }
            const auto start = std::chrono::steady_clock::now();
            const TrainedCascade trained = train_cascade(data.positives, data.negatives, tc);
            BenchRow row;
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            row.cell = cell;
            row.seed = seed;
            row.work = trained.report.total_work();
            row.stages = static_cast<int>(trained.cascade.stages.size());
            row.stopped_early = trained.report.stopped_early;
            if (cell.mode == TrainingMode::Baseline) {
                baseline_seconds[seed] = row.seconds;
            }
            const auto base = baseline_seconds.find(seed);
            row.speedup = base == baseline_seconds.end() ? kNaN : base->second / row.seconds;
            if (evaluate) {
                row.roc = roc_points(
                    detect_all(data.eval, trained.cascade, cfg.detect, cfg.min_neighbors, cfg.train.threads), truths);
            }
            row.tpr_at_reference = kNaN;
            if (progress) {
                progress(row);
            }
            result.rows.push_back(std::move(row));
        }
    }
    if (!evaluate || result.rows.empty()) {
        return result;
    }

    // Each seed is measured where the first cell's run for that seed (the
    // baseline when it is part of the plan) reaches the middle of its curve.
    const std::string& ref_cell = cells.front().name;
    std::map<std::uint64_t, int> reference;
    int max_fp = 0;
    for (const auto& r : result.rows) {
        max_fp = std::max(max_fp, final_fp(r.roc));
        if (r.cell.name == ref_cell) {
            reference[r.seed] = mid_curve_fp(r.roc);
        }
    }
    double total = 0.0;
    for (const auto& [seed, fp] : reference) {
        total += fp;
    }
    result.reference_fp = static_cast<int>(std::lround(total / static_cast<double>(reference.size())));
    for (auto& r : result.rows) {
        r.reference_fp = reference.at(r.seed);
        r.tpr_at_reference = tpr_at(r.roc, r.reference_fp);
    }
    result.fp_grid = make_grid(max_fp);
    for (const auto& cell : cells) {
        std::vector<std::vector<RocPoint>> curves;
        for (const auto& r : result.rows) {
            if (r.cell.name == cell.name) {
                curves.push_back(r.roc);
            }
        }
        result.envelopes.emplace_back(cell.name, aggregate_runs(curves, result.fp_grid));
    }
    return result;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
    out << "cell,mode,population,iterations,seed,seconds,features_evaluated,stump_fits,stages,stopped_early,"
           "speedup,final_fp,final_tpr,reference_fp,tpr_at_reference_fp\n";
    for (const auto& r : result.rows) {
        const double final_tpr = r.roc.empty() ? kNaN : r.roc.back().true_positive_rate;
        out << r.cell.name << ',' << to_string(r.cell.mode) << ',' << r.cell.population << ',' << r.cell.iterations
            << ',' << r.seed << ',' << format_double(r.seconds) << ',' << r.work.feature_evaluations << ','
            << r.work.stump_fits << ',' << r.stages << ',' << (r.stopped_early ? 1 : 0) << ','
            << format_double(r.speedup) << ',' << final_fp(r.roc) << ',' << format_double(final_tpr) << ','
            << r.reference_fp << ',' << format_double(r.tpr_at_reference) << '\n';
    }
}

std::vector<BenchRow> read_bench_csv(std::istream& in) {
    std::vector<BenchRow> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 15) {
            throw DataError("bench CSV: expected 15 fields");
        }
        BenchRow r;
        r.cell.name = f[0];
        r.cell.mode = f[1] == "ga" ? TrainingMode::Ga : TrainingMode::Baseline;
        r.cell.population = std::stoi(f[2]);
        r.cell.iterations = std::stoi(f[3]);
        r.seed = std::stoull(f[4]);
        r.seconds = parse_double(f[5]);
        r.work.feature_evaluations = std::stoll(f[6]);
        r.work.stump_fits = std::stoll(f[7]);
        r.stages = std::stoi(f[8]);
        r.stopped_early = f[9] == "1";
        r.speedup = parse_double(f[10]);
        r.reference_fp = std::stoi(f[13]);
        r.tpr_at_reference = parse_double(f[14]);
        out.push_back(std::move(r));
    }
    return out;
}

void print_bench_table(std::ostream& out, const BenchResult& result) {
    struct Acc {
        int runs = 0;
        double seconds = 0, speedup = 0, tpr = 0;
        double features = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> acc;
    for (const auto& r : result.rows) {
        if (!acc.contains(r.cell.name)) {
            order.push_back(r.cell.name);
        }
        Acc& a = acc[r.cell.name];
        ++a.runs;
        a.seconds += r.seconds;
        a.speedup += r.speedup;
        a.tpr += r.tpr_at_reference;
        a.features += static_cast<double>(r.work.feature_evaluations);
    }
    const auto flags = out.flags();
    out << std::left << std::setw(18) << "cell" << std::right << std::setw(6) << "runs" << std::setw(12)
        << "seconds" << std::setw(10) << "speedup" << std::setw(14) << "features" << std::setw(10) << "tpr@ref"
        << '\n';
    out << std::fixed;
    for (const auto& name : order) {
        const Acc& a = acc[name];
        out << std::left << std::setw(18) << name << std::right << std::setw(6) << a.runs << std::setw(12)
            << std::setprecision(3) << a.seconds / a.runs << std::setw(10) << std::setprecision(2)
            << a.speedup / a.runs << std::setw(14) << std::setprecision(0) << a.features / a.runs << std::setw(10)
            << std::setprecision(3) << a.tpr / a.runs << '\n';
    }
    if (result.reference_fp >= 0) {
        out << "reference false positives (mean over seeds): " << result.reference_fp << '\n';
    }
    out.flags(flags);
}

}  // namespace gadaboost::cli
