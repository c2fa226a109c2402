#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "gadaboost/boost.hpp"
#include "gadaboost/haar.hpp"
#include "gadaboost/stump.hpp"

namespace gadaboost {

/// Single generator for every GA draw. Draw order is part of the
/// reproducibility contract; see evolve_stage_population.
using Rng = std::mt19937_64;

/// A chromosome is a Haar feature: (x, y, x1, y1, type).
using Chromosome = HaarFeature;

enum class RegistryScope { Cascade, Stage };

struct GaConfig {
    int population_size = 1000;
    int max_iterations = 50;
    int dummy_weak_count = 3;
    double dedup_iou_threshold = 0.4;
    bool dedup_enabled = true;
    /// Relative mean-fitness improvement below which a generation counts as stagnant.
    double saturation_epsilon = 0.005;
    /// Consecutive stagnant generations before stopping; 0 disables the check.
    int saturation_patience = 3;
    double crossover_fraction = 0.8;
    double mutation_probability = 0.2;
    int mutation_offset = 2;
    /// Carry boosting weights from one generation's dummy stage to the next.
    bool carry_dummy_weights = true;
    /// Seed the real stage with the dummy-chain weights instead of uniform.
    bool carry_weights_into_real_stage = false;
    RegistryScope registry_scope = RegistryScope::Cascade;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Raised when random generation asks for more unused features than remain.
class FeatureSpaceExhausted : public std::runtime_error {
public:
    FeatureSpaceExhausted(std::int64_t requested, std::int64_t remaining);
    std::int64_t requested() const noexcept { return requested_; }
    std::int64_t remaining() const noexcept { return remaining_; }

private:
    std::int64_t requested_;
    std::int64_t remaining_;
};

/// Canonical ids handed out by random generation. Ids are only ever added.
class UsedFeatureRegistry {
public:
    explicit UsedFeatureRegistry(WindowSize window);

    WindowSize window() const noexcept { return window_; }
    std::size_t size() const noexcept { return used_.size(); }
    std::int64_t space_size() const noexcept { return static_cast<std::int64_t>(space_.size()); }
    std::int64_t remaining() const noexcept { return space_size() - static_cast<std::int64_t>(size()); }
    bool contains(std::int64_t id) const { return used_.contains(id); }

    /// Draws n distinct unused features uniformly at random and marks them used.
    /// Sparse registries use rejection sampling over the enumeration index;
    /// dense ones shuffle the unused remainder.
    std::vector<HaarFeature> draw(std::size_t n, Rng& rng);

    void clear() { used_.clear(); }

private:
    WindowSize window_;
    std::vector<HaarFeature> space_;
    std::unordered_set<std::int64_t> used_;
};

struct Population {
    std::vector<Chromosome> members;
    std::vector<double> fitness;
    int generation = 0;
};

/// One row of the per-generation fitness trace.
struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    int dedup_dropped = 0;
    int refilled = 0;
};

Population init_population(const GaConfig& cfg, UsedFeatureRegistry& registry, Rng& rng);

struct ScoredPopulation {
    Population population;
    /// Weights after the dummy stage.
    WeightVector weights;
    /// Weights in effect at each dummy round, in order.
    std::vector<WeightVector> round_weights;
};

/// Runs a dummy stage of cfg.dummy_weak_count boosting rounds over the
/// members; each member's fitness is its best quality across the rounds.
ScoredPopulation score_population(Population pop, const WeightVector& w, const GaConfig& cfg,
                                  FeatureEvaluator& evaluator);

/// Picks member i with probability fitness_i / sum(fitness); uniform when
/// the total is not positive. Throws std::invalid_argument when empty.
const Chromosome& roulette_select(const Population& pop, Rng& rng);

/// One-point crossover at the lower-right corner. Each child keeps its
/// parent's (x, y) and type and takes the other parent's (x1, y1); a child
/// that cannot be repaired is replaced by its parent.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b);

/// Perturbs each corner coordinate with probability cfg.mutation_probability,
/// then reassigns the type among those suited to the new rectangle.
/// An untouched chromosome is returned as is.
Chromosome mutate(const Chromosome& c, Rng& rng, WindowSize window, const GaConfig& cfg);

/// Shrinks the rectangle so its sides satisfy t's divisibility, or returns
/// false when that leaves an empty side.
bool snap_to_type(Chromosome& c, HaarType t);

double rect_iou(const Rect& a, const Rect& b);

struct DedupResult {
    Population population;
    int dropped = 0;
    /// Refilled members are appended at the end with NaN fitness.
    int refilled = 0;
};

/// Keeps members greedily in descending fitness, dropping any whose
/// rectangle overlaps a kept one with IoU above the threshold, then refills
/// with fresh random features from the registry.
DedupResult dedup_spatial(const Population& pop, const GaConfig& cfg, UsedFeatureRegistry& registry,
                          Rng& rng);

struct EvolutionResult {
    std::vector<HaarFeature> features;
    WeightVector weights;
    Population final_population;
    std::vector<GenerationRecord> trace;
};

/// Called once per generation (the initial one included) with the scored
/// population and its trace row. Refilled members are the last
/// record.refilled entries.
using GenerationObserver = std::function<void(const Population&, const GenerationRecord&)>;

/// The per-stage GA: score, select, recombine, deduplicate, repeat.
EvolutionResult evolve_stage_population(const WeightVector& w0, const GaConfig& cfg,
                                        UsedFeatureRegistry& registry, Rng& rng,
                                        FeatureEvaluator& evaluator,
                                        const GenerationObserver& observer = {});

}  // namespace gadaboost
