#pragma once

#include <iosfwd>

#include "gadaboost/cascade.hpp"

namespace gadaboost::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `gadaboost` tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Per-stage rows: `stage,seconds,features_evaluated,stump_fits,weak_count,
/// hit_rate,false_alarm,goal_met,positives,negatives,harvest_attempts`.
void write_report_csv(std::ostream& out, const TrainReport& report);

/// GA trace rows: `stage,generation,best_fitness,mean_fitness,dedup_dropped,refilled`.
void write_trace_csv(std::ostream& out, const TrainReport& report);

}  // namespace gadaboost::cli
