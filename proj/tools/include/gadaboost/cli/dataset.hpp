#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gadaboost/cli/config.hpp"
#include "gadaboost/eval.hpp"
#include "gadaboost/io.hpp"

namespace gadaboost::cli {

struct EvalImage {
    std::string name;
    GrayImage image;
    std::vector<Box> truths;
};

struct Dataset {
    std::vector<GrayImage> positives;
    std::vector<GrayImage> negatives;
    std::vector<EvalImage> eval;
};

/// `.pgm` files directly inside dir, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Loads (or synthesizes) the training pools and the held-out set.
/// Directory positives are resampled to the training window.
/// Throws DataError for missing or malformed data.
Dataset load_dataset(const RunConfig& cfg);

/// Writes a synthetic corpus as PGM files plus an annotations file:
/// positives/, negatives/, scenes/ and scenes/annotations.txt.
void write_corpus(const synth::Corpus& corpus, const std::filesystem::path& out_dir);

/// Detection plus grouping for one image, tagged with its name.
std::vector<ScoredDetection> detect_image(const std::string& name, const GrayImage& img, const Cascade& cascade,
                                          const DetectParams& params, int min_neighbors);

/// Runs detection over the held-out set; images are processed in parallel
/// but results keep the input order.
std::vector<ScoredDetection> detect_all(const std::vector<EvalImage>& images, const Cascade& cascade,
                                        const DetectParams& params, int min_neighbors, int threads);

std::vector<GroundTruthBox> truths_of(const std::vector<EvalImage>& images);

}  // namespace gadaboost::cli
