#include "gadaboost/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gadaboost {

void GaConfig::validate() const {
    if (population_size < 2) {
        throw std::invalid_argument("GaConfig: population_size must be >= 2");
    }
    if (max_iterations < 0) {
        throw std::invalid_argument("GaConfig: max_iterations must be >= 0");
    }
    if (dummy_weak_count < 1) {
        throw std::invalid_argument("GaConfig: dummy_weak_count must be >= 1");
    }
    if (!(dedup_iou_threshold > 0.0 && dedup_iou_threshold < 1.0)) {
        throw std::invalid_argument("GaConfig: dedup_iou_threshold must be in (0, 1)");
    }
    if (saturation_patience < 0) {
        throw std::invalid_argument("GaConfig: saturation_patience must be >= 0");
    }
    if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
        throw std::invalid_argument("GaConfig: crossover_fraction must be in [0, 1]");
    }
    if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0)) {
        throw std::invalid_argument("GaConfig: mutation_probability must be in [0, 1]");
    }
    if (mutation_offset < 0) {
        throw std::invalid_argument("GaConfig: mutation_offset must be >= 0");
    }
}

FeatureSpaceExhausted::FeatureSpaceExhausted(std::int64_t requested, std::int64_t remaining)
    : std::runtime_error("feature space exhausted: requested " + std::to_string(requested) +
                         " unused features, " + std::to_string(remaining) + " remain"),
      requested_(requested),
      remaining_(remaining) {}

UsedFeatureRegistry::UsedFeatureRegistry(WindowSize window)
    : window_(window), space_(enumerate_features(window)) {}

std::vector<HaarFeature> UsedFeatureRegistry::draw(std::size_t n, Rng& rng) {
    const auto want = static_cast<std::int64_t>(n);
    if (want > remaining()) {
        throw FeatureSpaceExhausted(want, remaining());
    }
    std::vector<HaarFeature> out;
    out.reserve(n);
    if ((static_cast<std::int64_t>(used_.size()) + want) * 2 <= space_size()) {
        std::uniform_int_distribution<std::size_t> pick(0, space_.size() - 1);
        while (out.size() < n) {
            const HaarFeature& f = space_[pick(rng)];
            if (used_.insert(canonical_id(f, window_)).second) {
                out.push_back(f);
            }
        }
        return out;
    }
    std::vector<std::size_t> unused;
    unused.reserve(static_cast<std::size_t>(remaining()));
    for (std::size_t i = 0; i < space_.size(); ++i) {
        if (!used_.contains(canonical_id(space_[i], window_))) {
            unused.push_back(i);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, unused.size() - 1);
        std::swap(unused[k], unused[pick(rng)]);
        const HaarFeature& f = space_[unused[k]];
        used_.insert(canonical_id(f, window_));
        out.push_back(f);
    }
    return out;
}

Population init_population(const GaConfig& cfg, UsedFeatureRegistry& registry, Rng& rng) {
    Population pop;
    pop.members = registry.draw(static_cast<std::size_t>(cfg.population_size), rng);
    pop.fitness.assign(pop.members.size(), std::numeric_limits<double>::quiet_NaN());
    pop.generation = 0;
    return pop;
}

ScoredPopulation score_population(Population pop, const WeightVector& w, const GaConfig& cfg,
                                  FeatureEvaluator& evaluator) {
    if (pop.members.empty()) {
        throw std::invalid_argument("score_population: empty population");
    }
    ScoredPopulation out;
    std::vector<double> fitness(pop.members.size(), 0.0);
    WeightVector current = w;
    for (int r = 0; r < cfg.dummy_weak_count; ++r) {
        out.round_weights.push_back(current);
        BoostRound round = boost_round(pop.members, current, evaluator);
        for (std::size_t i = 0; i < fitness.size(); ++i) {
            fitness[i] = std::max(fitness[i], round.qualities[i]);
        }
        current = std::move(round.weights);
    }
    pop.fitness = std::move(fitness);
    out.population = std::move(pop);
    out.weights = std::move(current);
    return out;
}

const Chromosome& roulette_select(const Population& pop, Rng& rng) {
    if (pop.members.empty()) {
        throw std::invalid_argument("roulette_select: empty population");
    }
    double total = 0.0;
    for (double f : pop.fitness) {
        total += std::max(f, 0.0);
    }
    if (!(total > 0.0)) {
        std::uniform_int_distribution<std::size_t> pick(0, pop.members.size() - 1);
        return pop.members[pick(rng)];
    }
    std::uniform_real_distribution<double> spin(0.0, total);
    const double target = spin(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        acc += std::max(pop.fitness[i], 0.0);
        if (target < acc) {
            return pop.members[i];
        }
    }
    // Rounding can leave target == acc; fall back to the last member with mass.
    for (std::size_t i = pop.members.size(); i-- > 0;) {
        if (pop.fitness[i] > 0.0) {
            return pop.members[i];
        }
    }
    return pop.members.back();
}

bool snap_to_type(Chromosome& c, HaarType t) {
    int w = c.x1 - c.x;
    int h = c.y1 - c.y;
    w -= w % width_divisor(t);
    h -= h % height_divisor(t);
    if (w <= 0 || h <= 0) {
        return false;
    }
    c.x1 = c.x + w;
    c.y1 = c.y + h;
    c.type = t;
    return true;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b) {
    auto child = [](const Chromosome& keep, const Chromosome& other) {
        Chromosome c{keep.x, keep.y, other.x1, other.y1, keep.type};
        if (c.x1 <= c.x || c.y1 <= c.y || !snap_to_type(c, keep.type)) {
            return keep;
        }
        return c;
    };
    return {child(a, b), child(b, a)};
}

Chromosome mutate(const Chromosome& c, Rng& rng, WindowSize window, const GaConfig& cfg) {
    Chromosome out = c;
    bool changed = false;
    std::bernoulli_distribution fire(cfg.mutation_probability);
    std::uniform_int_distribution<int> offset(-cfg.mutation_offset, cfg.mutation_offset);
    for (int* coord : {&out.x, &out.y, &out.x1, &out.y1}) {
        if (fire(rng)) {
            const int d = offset(rng);
            if (d != 0) {
                *coord += d;
                changed = true;
            }
        }
    }
    if (!changed && is_valid(out, window)) {
        return out;
    }

    auto order_axis = [](int& lo, int& hi, int extent) {
        lo = std::clamp(lo, 0, extent - 1);
        hi = std::clamp(hi, 1, extent);
        if (hi < lo) {
            std::swap(lo, hi);
        }
        if (hi == lo) {
            if (hi < extent) {
                ++hi;
            } else {
                --lo;
            }
        }
    };
    order_axis(out.x, out.x1, window.width);
    order_axis(out.y, out.y1, window.height);

    // Tiny rectangles cannot host any type; grow one side to 2 pixels.
    if (out.width() < 2 && out.height() < 2) {
        if (window.width >= 2) {
            out.x1 = std::min(out.x + 2, window.width);
            out.x = out.x1 - 2;
        } else if (window.height >= 2) {
            out.y1 = std::min(out.y + 2, window.height);
            out.y = out.y1 - 2;
        } else {
            throw std::invalid_argument("mutate: window admits no Haar features");
        }
    }

    std::vector<HaarType> suited;
    for (HaarType t : kAllHaarTypes) {
        if (out.width() % width_divisor(t) == 0 && out.height() % height_divisor(t) == 0) {
            suited.push_back(t);
        }
    }
    if (suited.empty()) {
        for (HaarType t : kAllHaarTypes) {
            if (out.width() >= width_divisor(t) && out.height() >= height_divisor(t)) {
                suited.push_back(t);
            }
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, suited.size() - 1);
    snap_to_type(out, suited[pick(rng)]);
    return out;
}

double rect_iou(const Rect& a, const Rect& b) {
    const int ix = std::max(0, std::min(a.x1, b.x1) - std::max(a.x, b.x));
    const int iy = std::max(0, std::min(a.y1, b.y1) - std::max(a.y, b.y));
    const auto inter = static_cast<std::int64_t>(ix) * iy;
    const auto uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

std::vector<std::size_t> by_fitness_desc(const Population& pop) {
    std::vector<std::size_t> idx(pop.members.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return pop.fitness[a] > pop.fitness[b]; });
    return idx;
}

GenerationRecord summarize(const Population& pop, int dropped, int refilled) {
    GenerationRecord rec;
    rec.generation = pop.generation;
    rec.best_fitness = *std::max_element(pop.fitness.begin(), pop.fitness.end());
    rec.mean_fitness = std::accumulate(pop.fitness.begin(), pop.fitness.end(), 0.0) /
                       static_cast<double>(pop.fitness.size());
    rec.dedup_dropped = dropped;
    rec.refilled = refilled;
    return rec;
}

// Elitist reproduction: the fitter half survives with its stored fitness,
// roulette-selected parents fill the rest. Children carry NaN fitness.
Population breed(const Population& pop, const GaConfig& cfg, Rng& rng, WindowSize window,
                 std::size_t& survivors) {
    const auto size = static_cast<std::size_t>(cfg.population_size);
    survivors = std::max<std::size_t>(size / 2, 1);
    Population next;
    next.generation = pop.generation + 1;
    const auto ranked = by_fitness_desc(pop);
    for (std::size_t k = 0; k < survivors; ++k) {
        next.members.push_back(pop.members[ranked[k]]);
        next.fitness.push_back(pop.fitness[ranked[k]]);
    }
    std::bernoulli_distribution do_cross(cfg.crossover_fraction);
    while (next.members.size() < size) {
        const Chromosome a = roulette_select(pop, rng);
        const Chromosome b = roulette_select(pop, rng);
        auto [c1, c2] = do_cross(rng) ? crossover(a, b) : std::pair{a, b};
        c1 = mutate(c1, rng, window, cfg);
        c2 = mutate(c2, rng, window, cfg);
        next.members.push_back(c1);
        if (next.members.size() < size) {
            next.members.push_back(c2);
        }
    }
    next.fitness.resize(size, std::numeric_limits<double>::quiet_NaN());
    return next;
}

}  // namespace

DedupResult dedup_spatial(const Population& pop, const GaConfig& cfg, UsedFeatureRegistry& registry,
                          Rng& rng) {
    const auto ranked = by_fitness_desc(pop);
    std::vector<bool> keep(pop.members.size(), false);
    std::vector<Rect> kept_rects;
    int dropped = 0;
    for (std::size_t i : ranked) {
        const Rect r = pop.members[i].rect();
        const bool redundant = std::any_of(kept_rects.begin(), kept_rects.end(), [&](const Rect& k) {
            return rect_iou(r, k) > cfg.dedup_iou_threshold;
        });
        if (redundant) {
            ++dropped;
        } else {
            keep[i] = true;
            kept_rects.push_back(r);
        }
    }
    DedupResult out;
    out.population.generation = pop.generation;
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        if (keep[i]) {
            out.population.members.push_back(pop.members[i]);
            out.population.fitness.push_back(pop.fitness[i]);
        }
    }
    const std::size_t target = static_cast<std::size_t>(cfg.population_size);
    if (out.population.members.size() < target) {
        const auto fresh = registry.draw(target - out.population.members.size(), rng);
        for (const auto& f : fresh) {
            out.population.members.push_back(f);
            out.population.fitness.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        out.refilled = static_cast<int>(fresh.size());
    }
    out.dropped = dropped;
    return out;
}

EvolutionResult evolve_stage_population(const WeightVector& w0, const GaConfig& cfg,
                                        UsedFeatureRegistry& registry, Rng& rng,
                                        FeatureEvaluator& evaluator, const GenerationObserver& observer) {
    cfg.validate();
    const WindowSize window = evaluator.set().window();
    if (registry.window() != window) {
        throw std::invalid_argument("evolve_stage_population: registry window differs from samples");
    }

    EvolutionResult result;
    ScoredPopulation scored = score_population(init_population(cfg, registry, rng), w0, cfg, evaluator);
    Population pop = std::move(scored.population);
    WeightVector chain = cfg.carry_dummy_weights ? scored.weights : w0;
    WeightVector last_dummy = scored.weights;
    result.trace.push_back(summarize(pop, 0, 0));
    if (observer) {
        observer(pop, result.trace.back());
    }

    int stagnant = 0;
    while (pop.generation < cfg.max_iterations) {
        if (cfg.saturation_patience > 0 && stagnant >= cfg.saturation_patience) {
            break;
        }
        std::size_t survivors = 0;
        Population next = breed(pop, cfg, rng, window, survivors);
        const std::vector<double> carried(next.fitness.begin(), next.fitness.begin() + survivors);

        scored = score_population(std::move(next), cfg.carry_dummy_weights ? chain : w0, cfg, evaluator);
        next = std::move(scored.population);
        std::copy(carried.begin(), carried.end(), next.fitness.begin());
        last_dummy = scored.weights;
        if (cfg.carry_dummy_weights) {
            chain = scored.weights;
        }

        int dropped = 0;
        int refilled = 0;
        if (cfg.dedup_enabled && next.generation % 2 == 0) {
            DedupResult d = dedup_spatial(next, cfg, registry, rng);
            dropped = d.dropped;
            refilled = d.refilled;
            next = std::move(d.population);
            if (refilled > 0) {
                // Refills are scored against the same dummy rounds, without
                // touching the weight chain.
                const std::size_t first = next.members.size() - static_cast<std::size_t>(refilled);
                std::span<const HaarFeature> fresh(next.members.data() + first,
                                                   static_cast<std::size_t>(refilled));
                std::vector<std::int64_t> ids;
                for (const auto& f : fresh) {
                    ids.push_back(canonical_id(f, window));
                }
                const auto cols = evaluator.columns(fresh, ids);
                for (std::size_t k = 0; k < fresh.size(); ++k) {
                    double best = 0.0;
                    for (const auto& rw : scored.round_weights) {
                        best = std::max(best,
                                        fit_column(*cols[k], evaluator.set().labels(), rw.values()).quality);
                    }
                    next.fitness[first + k] = best;
                }
                evaluator.counters().stump_fits +=
                    static_cast<std::int64_t>(fresh.size() * scored.round_weights.size());
            }
        }

        const GenerationRecord rec = summarize(next, dropped, refilled);
        const double previous = result.trace.back().mean_fitness;
        const double gain = previous > 0.0 ? (rec.mean_fitness - previous) / previous
                                           : (rec.mean_fitness > previous ? 1.0 : 0.0);
        stagnant = gain < cfg.saturation_epsilon ? stagnant + 1 : 0;
        result.trace.push_back(rec);
        if (observer) {
            observer(next, rec);
        }
        pop = std::move(next);
    }

    result.features = pop.members;
    result.weights = std::move(last_dummy);
    result.final_population = std::move(pop);
    return result;
}

}  // namespace gadaboost
