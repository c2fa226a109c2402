#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadaboost/cascade.hpp"
#include "gadaboost/detect.hpp"
#include "gadaboost/synth.hpp"

namespace gadaboost::cli {

/// Bad configuration: unknown key, malformed value, failed validation.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DatasetKind { Synthetic, Directories };

struct BenchPlan {
    bool include_baseline = true;
    std::vector<int> populations;
    std::vector<int> iterations;
    std::vector<std::uint64_t> seeds;
};

/// Everything a run needs, parsed from a flat `key = value` file.
struct RunConfig {
    TrainConfig train;
    WindowSize window{19, 19};

    DatasetKind dataset = DatasetKind::Synthetic;
    synth::CorpusConfig corpus;
    std::filesystem::path positives_dir;
    std::filesystem::path negatives_dir;
    std::filesystem::path eval_images_dir;
    std::filesystem::path eval_annotations;

    DetectParams detect;
    int min_neighbors = 2;

    BenchPlan bench;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown or repeated
/// keys are errors. Relative paths resolve against base_dir.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies the seed override: explicit flag first, then GADABOOST_SEED.
void apply_seed_override(RunConfig& cfg, std::optional<std::uint64_t> flag_seed);

/// Checks cross-field consistency; throws ConfigError.
void validate(const RunConfig& cfg);

/// Every recognised key, for help output and tests.
const std::vector<std::string>& config_keys();

}  // namespace gadaboost::cli
