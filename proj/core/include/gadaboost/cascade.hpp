#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gadaboost/boost.hpp"
#include "gadaboost/ga.hpp"
#include "gadaboost/haar.hpp"

namespace gadaboost {

/// Ordered stages over a fixed training window. A window is accepted only
/// when every stage accepts it.
struct Cascade {
    WindowSize window;
    std::vector<Stage> stages;

    friend bool operator==(const Cascade&, const Cascade&) = default;
};

struct CascadeScore {
    bool accepted = false;
    /// Zero-based index of the rejecting stage; -1 when accepted.
    int rejection_stage = -1;
    /// Score minus threshold of the last stage evaluated.
    double margin = 0.0;
};

CascadeScore cascade_score(const Cascade& c, const WindowView& window);
CascadeScore cascade_score(const Cascade& c, const IntegralImage& ii, int ox, int oy, double scale);
CascadeScore cascade_score(const Cascade& c, const Sample& sample);

enum class TrainingMode { Baseline, Ga };

std::string_view to_string(TrainingMode m) noexcept;

struct TrainConfig {
    int num_stages = 17;
    int pos_per_stage = 500;
    int neg_per_stage = 500;
    StageGoal stage_goal;
    TrainingMode mode = TrainingMode::Baseline;
    GaConfig ga;
    std::uint64_t rng_seed = 0;
    int threads = 1;
    /// Upper bound on random windows drawn while harvesting one stage's negatives.
    std::int64_t max_harvest_attempts = 2'000'000;
    std::size_t cache_budget_bytes = std::size_t{1} << 30;

    void validate() const;
};

struct StageReport {
    int stage = 0;
    double seconds = 0.0;
    WorkCounters work;
    int weak_count = 0;
    double hit_rate = 0.0;
    double false_alarm = 0.0;
    bool goal_met = false;
    int positives_used = 0;
    int negatives_harvested = 0;
    std::int64_t harvest_attempts = 0;
    std::vector<GenerationRecord> ga_trace;
};

struct TrainReport {
    TrainingMode mode = TrainingMode::Baseline;
    std::uint64_t seed = 0;
    std::vector<StageReport> stages;
    /// Set when training ended before num_stages because negatives ran out.
    bool stopped_early = false;
    std::string stop_reason;

    double total_seconds() const;
    WorkCounters total_work() const;
};

struct TrainedCascade {
    Cascade cascade;
    TrainReport report;
};

/// Raised when a stage cannot gather pos_per_stage surviving positives.
class InsufficientPositives : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using StageCallback = std::function<void(const StageReport&)>;

/// Trains stages in sequence: collect positives the current cascade still
/// accepts, harvest negatives it falsely accepts, pick candidates (full
/// enumeration, or the GA's final population), train the stage.
///
/// Negative harvesting and the GA draw from separate generators, both
/// seeded from cfg.rng_seed, so the negatives a stage sees depend only on
/// the cascade built so far.
TrainedCascade train_cascade(const std::vector<GrayImage>& positives,
                             const std::vector<GrayImage>& negative_images, const TrainConfig& cfg,
                             const StageCallback& on_stage = {});

/// Nearest-neighbour resample of the (x, y, w, h) region to out_w x out_h.
GrayImage crop_resize(const GrayImage& img, int x, int y, int w, int h, int out_w, int out_h);

}  // namespace gadaboost
