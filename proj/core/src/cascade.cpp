#include "gadaboost/cascade.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace gadaboost {

CascadeScore cascade_score(const Cascade& c, const WindowView& window) {
    CascadeScore out;
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const Stage& stage = c.stages[k];
        out.margin = stage.score(window) - stage.threshold;
        if (out.margin < 0.0) {
            out.rejection_stage = static_cast<int>(k);
            return out;
        }
    }
    out.accepted = true;
    return out;
}

CascadeScore cascade_score(const Cascade& c, const IntegralImage& ii, int ox, int oy, double scale) {
    return cascade_score(c, WindowView(ii, c.window, ox, oy, scale));
}

CascadeScore cascade_score(const Cascade& c, const Sample& sample) {
    CascadeScore out;
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const Stage& stage = c.stages[k];
        out.margin = stage.score(sample) - stage.threshold;
        if (out.margin < 0.0) {
            out.rejection_stage = static_cast<int>(k);
            return out;
        }
    }
    out.accepted = true;
    return out;
}

std::string_view to_string(TrainingMode m) noexcept {
    return m == TrainingMode::Baseline ? "baseline" : "ga";
}

void TrainConfig::validate() const {
    if (num_stages < 1) {
        throw std::invalid_argument("TrainConfig: num_stages must be >= 1");
    }
    if (pos_per_stage < 1 || neg_per_stage < 1) {
        throw std::invalid_argument("TrainConfig: per-stage sample counts must be >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("TrainConfig: threads must be >= 1");
    }
    if (max_harvest_attempts < 1) {
        throw std::invalid_argument("TrainConfig: max_harvest_attempts must be >= 1");
    }
    stage_goal.validate();
    if (mode == TrainingMode::Ga) {
        ga.validate();
    }
}

double TrainReport::total_seconds() const {
    double t = 0.0;
    for (const auto& s : stages) {
        t += s.seconds;
    }
    return t;
}

WorkCounters TrainReport::total_work() const {
    WorkCounters w;
    for (const auto& s : stages) {
        w += s.work;
    }
    return w;
}

GrayImage crop_resize(const GrayImage& img, int x, int y, int w, int h, int out_w, int out_h) {
    if (x < 0 || y < 0 || w < 1 || h < 1 || x + w > img.width() || y + h > img.height()) {
        throw std::out_of_range("crop_resize: region leaves the image");
    }
    GrayImage out(out_w, out_h);
    for (int j = 0; j < out_h; ++j) {
        const int sy = y + static_cast<int>((static_cast<std::int64_t>(2 * j + 1) * h) / (2 * out_h));
        for (int i = 0; i < out_w; ++i) {
            const int sx = x + static_cast<int>((static_cast<std::int64_t>(2 * i + 1) * w) / (2 * out_w));
            out.at(i, j) = img.at(sx, sy);
        }
    }
    return out;
}

namespace {

Rng make_stream(std::uint64_t seed, std::uint64_t salt, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32), tag};
    return Rng(seq);
}

constexpr std::uint32_t kHarvestStream = 0x68617276;  // "harv"
constexpr std::uint32_t kGaStream = 0x67615f5f;       // "ga__"

struct Harvest {
    std::vector<Sample> samples;
    std::int64_t attempts = 0;
};

// Draw order per attempt: image index, scale, x, y.
Harvest harvest_negatives(const Cascade& prefix, const std::vector<const GrayImage*>& pool, int wanted,
                          std::int64_t max_attempts, Rng& rng) {
    Harvest out;
    const WindowSize win = prefix.window;
    std::uniform_int_distribution<std::size_t> pick_image(0, pool.size() - 1);
    while (static_cast<int>(out.samples.size()) < wanted && out.attempts < max_attempts) {
        ++out.attempts;
        const GrayImage& img = *pool[pick_image(rng)];
        const double max_scale = std::min(static_cast<double>(img.width()) / win.width,
                                          static_cast<double>(img.height()) / win.height);
        const double scale = std::uniform_real_distribution<double>(1.0, max_scale)(rng);
        const int sw = std::clamp(static_cast<int>(win.width * scale), win.width, img.width());
        const int sh = std::clamp(static_cast<int>(win.height * scale), win.height, img.height());
        const int x = std::uniform_int_distribution<int>(0, img.width() - sw)(rng);
        const int y = std::uniform_int_distribution<int>(0, img.height() - sh)(rng);
        Sample s = make_sample(crop_resize(img, x, y, sw, sh, win.width, win.height), -1);
        if (cascade_score(prefix, s).accepted) {
            out.samples.push_back(std::move(s));
        }
    }
    return out;
}

}  // namespace

TrainedCascade train_cascade(const std::vector<GrayImage>& positives,
                             const std::vector<GrayImage>& negative_images, const TrainConfig& cfg,
                             const StageCallback& on_stage) {
    cfg.validate();
    if (positives.empty() || negative_images.empty()) {
        throw std::invalid_argument("train_cascade: positive and negative pools must be non-empty");
    }
    const WindowSize window{positives.front().width(), positives.front().height()};
    for (const auto& p : positives) {
        if (p.width() != window.width || p.height() != window.height) {
            throw std::invalid_argument("train_cascade: positives must all match the training window");
        }
    }
    std::vector<const GrayImage*> pool;
    for (const auto& img : negative_images) {
        if (img.width() >= window.width && img.height() >= window.height) {
            pool.push_back(&img);
        }
    }
    if (pool.empty()) {
        throw std::invalid_argument("train_cascade: no negative image is as large as the training window");
    }

    std::vector<Sample> positive_samples;
    positive_samples.reserve(positives.size());
    for (const auto& p : positives) {
        positive_samples.push_back(make_sample(p, 1));
    }

    TrainedCascade out;
    out.cascade.window = window;
    out.report.mode = cfg.mode;
    out.report.seed = cfg.rng_seed;

    Rng harvest_rng = make_stream(cfg.rng_seed, 0, kHarvestStream);
    Rng ga_rng = make_stream(cfg.rng_seed, cfg.ga.rng_seed, kGaStream);
    std::vector<HaarFeature> full_space;
    std::unique_ptr<UsedFeatureRegistry> registry;
    if (cfg.mode == TrainingMode::Baseline) {
        full_space = enumerate_features(window);
    } else {
        registry = std::make_unique<UsedFeatureRegistry>(window);
    }

    using Clock = std::chrono::steady_clock;
    for (int k = 0; k < cfg.num_stages; ++k) {
        const auto start = Clock::now();
        StageReport rep;
        rep.stage = k;

        std::vector<Sample> samples;
        samples.reserve(static_cast<std::size_t>(cfg.pos_per_stage + cfg.neg_per_stage));
        for (const auto& s : positive_samples) {
            if (static_cast<int>(samples.size()) == cfg.pos_per_stage) {
                break;
            }
            if (cascade_score(out.cascade, s).accepted) {
                samples.push_back(s);
            }
        }
        if (static_cast<int>(samples.size()) < cfg.pos_per_stage) {
            throw InsufficientPositives("stage " + std::to_string(k) + ": only " +
                                        std::to_string(samples.size()) + " of " +
                                        std::to_string(cfg.pos_per_stage) + " positives pass the cascade");
        }
        rep.positives_used = cfg.pos_per_stage;

        Harvest harvest =
            harvest_negatives(out.cascade, pool, cfg.neg_per_stage, cfg.max_harvest_attempts, harvest_rng);
        rep.harvest_attempts = harvest.attempts;
        rep.negatives_harvested = static_cast<int>(harvest.samples.size());
        if (rep.negatives_harvested < cfg.neg_per_stage) {
            out.report.stopped_early = true;
            out.report.stop_reason = "stage " + std::to_string(k) + ": harvested " +
                                     std::to_string(rep.negatives_harvested) + " of " +
                                     std::to_string(cfg.neg_per_stage) + " false-positive negatives in " +
                                     std::to_string(harvest.attempts) + " attempts";
            break;
        }
        std::move(harvest.samples.begin(), harvest.samples.end(), std::back_inserter(samples));

        const TrainingSet set(window, std::move(samples));
        FeatureEvaluator evaluator(set, cfg.threads, cfg.cache_budget_bytes);
        const WeightVector w0 = WeightVector::uniform(set.size());

        StageTraining trained;
        if (cfg.mode == TrainingMode::Baseline) {
            trained = train_stage(full_space, cfg.stage_goal, w0, evaluator);
        } else {
            if (cfg.ga.registry_scope == RegistryScope::Stage) {
                registry->clear();
            }
            EvolutionResult evo = evolve_stage_population(w0, cfg.ga, *registry, ga_rng, evaluator);
            rep.ga_trace = std::move(evo.trace);
            const WeightVector& start = cfg.ga.carry_weights_into_real_stage ? evo.weights : w0;
            trained = train_stage(evo.features, cfg.stage_goal, start, evaluator);
        }

        out.cascade.stages.push_back(trained.stage);
        rep.work = evaluator.counters();
        rep.weak_count = static_cast<int>(trained.stage.stumps.size());
        rep.hit_rate = trained.hit_rate;
        rep.false_alarm = trained.false_alarm;
        rep.goal_met = trained.goal_met;
        rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (on_stage) {
            on_stage(rep);
        }
        out.report.stages.push_back(std::move(rep));
    }
    if (out.cascade.stages.empty()) {
        throw std::runtime_error("train_cascade: no stage could be trained; " + out.report.stop_reason);
    }
    return out;
}

}  // namespace gadaboost
