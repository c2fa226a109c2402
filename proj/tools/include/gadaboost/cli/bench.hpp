#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gadaboost/cli/config.hpp"
#include "gadaboost/cli/dataset.hpp"

namespace gadaboost::cli {

struct BenchCell {
    std::string name;
    TrainingMode mode = TrainingMode::Baseline;
    int population = 0;
    int iterations = 0;
};

struct BenchRow {
    BenchCell cell;
    std::uint64_t seed = 0;
    /// Wall-clock seconds for train_cascade.
    double seconds = 0.0;
    WorkCounters work;
    int stages = 0;
    bool stopped_early = false;
    /// Baseline seconds over these seconds for the same seed; NaN without a baseline.
    double speedup = 0.0;
    /// Held-out ROC; empty when there is no evaluation set.
    std::vector<RocPoint> roc;
    /// Half the final false-positive count of this seed's reference run (the
    /// first cell, normally the baseline); -1 without evaluation.
    int reference_fp = -1;
    /// TPR at reference_fp; NaN without evaluation.
    double tpr_at_reference = 0.0;
};

struct BenchResult {
    std::vector<BenchRow> rows;
    /// Mean of the per-seed reference counts, for display; -1 without evaluation.
    int reference_fp = -1;
    std::vector<int> fp_grid;
    /// Per-cell envelope across seeds over fp_grid, in cell order.
    std::vector<std::pair<std::string, std::vector<EnvelopePoint>>> envelopes;
};

/// The cells a plan expands to: the baseline (if enabled), then one GA
/// cell per (population, iterations) pair. Empty lists fall back to the
/// base GA settings.
std::vector<BenchCell> bench_cells(const RunConfig& cfg);

/// Trains every cell for every seed on the same data, then evaluates each
/// model on the held-out set.
BenchResult run_bench(const RunConfig& cfg, const Dataset& data,
                      const std::function<void(const BenchRow&)>& progress = {});

void write_bench_csv(std::ostream& out, const BenchResult& result);
std::vector<BenchRow> read_bench_csv(std::istream& in);

/// Per-cell means as an aligned text table.
void print_bench_table(std::ostream& out, const BenchResult& result);

}  // namespace gadaboost::cli
