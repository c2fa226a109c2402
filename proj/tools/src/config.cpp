#include "gadaboost/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "gadaboost/io.hpp"

namespace gadaboost::cli {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& v) {
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
        throw ConfigError("expected an integer, got '" + v + "'");
    }
    return out;
}

double parse_real(const std::string& v) {
    try {
        return parse_double(v);
    } catch (const DataError&) {
        throw ConfigError("expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("expected true/false, got '" + v + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& v) {
    std::vector<T> out;
    for (const auto& item : split_csv_line(v)) {
        const std::string t = trim(item);
        if (!t.empty()) {
            out.push_back(parse_integer<T>(t));
        }
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const fs::path&)>;

fs::path resolve(const fs::path& base, const std::string& v) {
    const fs::path p(v);
    return p.is_absolute() || base.empty() ? p : base / p;
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto integer = [&t](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& v, const fs::path&) {
                auto& field = member(c);
                field = parse_integer<std::remove_reference_t<decltype(field)>>(v);
            };
        };
        auto real = [&t](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& v, const fs::path&) { member(c) = parse_real(v); };
        };
        auto flag = [&t](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& v, const fs::path&) { member(c) = parse_bool(v); };
        };
        auto path = [&t](const char* key, auto member) {
            t[key] = [member](RunConfig& c, const std::string& v, const fs::path& base) {
                member(c) = resolve(base, v);
            };
        };

        t["mode"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            if (v == "baseline") {
                c.train.mode = TrainingMode::Baseline;
            } else if (v == "ga") {
                c.train.mode = TrainingMode::Ga;
            } else {
                throw ConfigError("mode must be baseline or ga, got '" + v + "'");
            }
        };
        integer("num_stages", [](RunConfig& c) -> int& { return c.train.num_stages; });
        integer("pos_per_stage", [](RunConfig& c) -> int& { return c.train.pos_per_stage; });
        integer("neg_per_stage", [](RunConfig& c) -> int& { return c.train.neg_per_stage; });
        real("min_hit_rate", [](RunConfig& c) -> double& { return c.train.stage_goal.min_hit_rate; });
        real("max_false_alarm", [](RunConfig& c) -> double& { return c.train.stage_goal.max_false_alarm; });
        integer("max_weak_count", [](RunConfig& c) -> int& { return c.train.stage_goal.max_weak_count; });
        integer("seed", [](RunConfig& c) -> std::uint64_t& { return c.train.rng_seed; });
        integer("threads", [](RunConfig& c) -> int& { return c.train.threads; });
        integer("max_harvest_attempts", [](RunConfig& c) -> std::int64_t& { return c.train.max_harvest_attempts; });
        t["cache_budget_mb"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            c.train.cache_budget_bytes = parse_integer<std::size_t>(v) << 20;
        };

        integer("ga_population_size", [](RunConfig& c) -> int& { return c.train.ga.population_size; });
        integer("ga_max_iterations", [](RunConfig& c) -> int& { return c.train.ga.max_iterations; });
        integer("ga_dummy_weak_count", [](RunConfig& c) -> int& { return c.train.ga.dummy_weak_count; });
        real("ga_dedup_iou_threshold", [](RunConfig& c) -> double& { return c.train.ga.dedup_iou_threshold; });
        flag("ga_dedup_enabled", [](RunConfig& c) -> bool& { return c.train.ga.dedup_enabled; });
        real("ga_saturation_epsilon", [](RunConfig& c) -> double& { return c.train.ga.saturation_epsilon; });
        integer("ga_saturation_patience", [](RunConfig& c) -> int& { return c.train.ga.saturation_patience; });
        real("ga_crossover_fraction", [](RunConfig& c) -> double& { return c.train.ga.crossover_fraction; });
        real("ga_mutation_probability", [](RunConfig& c) -> double& { return c.train.ga.mutation_probability; });
        integer("ga_mutation_offset", [](RunConfig& c) -> int& { return c.train.ga.mutation_offset; });
        flag("ga_carry_dummy_weights", [](RunConfig& c) -> bool& { return c.train.ga.carry_dummy_weights; });
        flag("ga_carry_weights_into_real_stage",
             [](RunConfig& c) -> bool& { return c.train.ga.carry_weights_into_real_stage; });
        t["ga_registry_scope"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            if (v == "cascade") {
                c.train.ga.registry_scope = RegistryScope::Cascade;
            } else if (v == "stage") {
                c.train.ga.registry_scope = RegistryScope::Stage;
            } else {
                throw ConfigError("ga_registry_scope must be cascade or stage, got '" + v + "'");
            }
        };
        integer("ga_seed", [](RunConfig& c) -> std::uint64_t& { return c.train.ga.rng_seed; });

        integer("window_width", [](RunConfig& c) -> int& { return c.window.width; });
        integer("window_height", [](RunConfig& c) -> int& { return c.window.height; });
        t["dataset"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            if (v == "synthetic") {
                c.dataset = DatasetKind::Synthetic;
            } else if (v == "directories") {
                c.dataset = DatasetKind::Directories;
            } else {
                throw ConfigError("dataset must be synthetic or directories, got '" + v + "'");
            }
        };
        path("positives_dir", [](RunConfig& c) -> fs::path& { return c.positives_dir; });
        path("negatives_dir", [](RunConfig& c) -> fs::path& { return c.negatives_dir; });
        path("eval_images_dir", [](RunConfig& c) -> fs::path& { return c.eval_images_dir; });
        path("eval_annotations", [](RunConfig& c) -> fs::path& { return c.eval_annotations; });

        integer("synth_positives", [](RunConfig& c) -> int& { return c.corpus.positives; });
        integer("synth_negative_images", [](RunConfig& c) -> int& { return c.corpus.negative_images; });
        integer("synth_negative_size", [](RunConfig& c) -> int& { return c.corpus.negative_size; });
        integer("synth_scenes", [](RunConfig& c) -> int& { return c.corpus.scenes; });
        integer("synth_scene_size", [](RunConfig& c) -> int& { return c.corpus.scene_size; });
        integer("synth_max_faces", [](RunConfig& c) -> int& { return c.corpus.max_faces_per_scene; });
        integer("synth_min_face", [](RunConfig& c) -> int& { return c.corpus.min_face; });
        integer("synth_max_face", [](RunConfig& c) -> int& { return c.corpus.max_face; });
        integer("synth_seed", [](RunConfig& c) -> std::uint64_t& { return c.corpus.seed; });

        real("detect_scale_factor", [](RunConfig& c) -> double& { return c.detect.scale_factor; });
        integer("detect_step", [](RunConfig& c) -> int& { return c.detect.step; });
        integer("detect_min_neighbors", [](RunConfig& c) -> int& { return c.min_neighbors; });

        flag("bench_baseline", [](RunConfig& c) -> bool& { return c.bench.include_baseline; });
        t["bench_populations"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            c.bench.populations = parse_list<int>(v);
        };
        t["bench_iterations"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            c.bench.iterations = parse_list<int>(v);
        };
        t["bench_seeds"] = [](RunConfig& c, const std::string& v, const fs::path&) {
            c.bench.seeds = parse_list<std::uint64_t>(v);
        };
        return t;
    }();
    return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& [k, _] : setters()) {
            out.push_back(k);
        }
        return out;
    }();
    return keys;
}

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) {
            throw ConfigError(where + "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError(where + "unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(where + "duplicate key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(where + "empty value for '" + key + "'");
        }
        try {
            it->second(cfg, value, base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError(where + key + ": " + e.what());
        }
    }
    cfg.corpus.window = cfg.window;
    validate(cfg);
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    return parse_config(in, path.parent_path());
}

void apply_seed_override(RunConfig& cfg, std::optional<std::uint64_t> flag_seed) {
    if (flag_seed) {
        cfg.train.rng_seed = *flag_seed;
        return;
    }
    if (const char* env = std::getenv("GADABOOST_SEED"); env != nullptr && *env != '\0') {
        try {
            cfg.train.rng_seed = parse_integer<std::uint64_t>(env);
        } catch (const ConfigError&) {
            throw ConfigError(std::string("GADABOOST_SEED must be a non-negative integer, got '") + env + "'");
        }
    }
}

void validate(const RunConfig& cfg) {
    try {
        cfg.train.validate();
        cfg.train.ga.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.window.width < 1 || cfg.window.height < 1) {
        throw ConfigError("window size must be positive");
    }
    if (!(cfg.detect.scale_factor > 1.0) || cfg.detect.step < 1 || cfg.min_neighbors < 1) {
        throw ConfigError("detect_scale_factor must be > 1, detect_step and detect_min_neighbors >= 1");
    }
    if (cfg.dataset == DatasetKind::Directories && (cfg.positives_dir.empty() || cfg.negatives_dir.empty())) {
        throw ConfigError("dataset = directories needs positives_dir and negatives_dir");
    }
    if (cfg.dataset == DatasetKind::Synthetic) {
        const auto& c = cfg.corpus;
        if (c.positives < 1 || c.negative_images < 1 || c.scenes < 0 || c.max_faces_per_scene < 1 ||
            c.negative_size < std::max(cfg.window.width, cfg.window.height) || c.min_face < cfg.window.width ||
            c.max_face < c.min_face || c.scene_size < c.max_face) {
            throw ConfigError("inconsistent synth_* sizes for the training window");
        }
    }
    for (int p : cfg.bench.populations) {
        if (p < 2) {
            throw ConfigError("bench_populations entries must be >= 2");
        }
    }
    for (int i : cfg.bench.iterations) {
        if (i < 0) {
            throw ConfigError("bench_iterations entries must be >= 0");
        }
    }
}

}  // namespace gadaboost::cli
