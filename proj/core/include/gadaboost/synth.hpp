#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gadaboost/box.hpp"
#include "gadaboost/haar.hpp"

namespace gadaboost::synth {

// Procedural stand-in for a face corpus: upright "faces" (oval, eye band,
// brows, mouth) under random lighting and noise, textured clutter for
// negatives, and annotated scenes for held-out evaluation.

GrayImage render_face(int width, int height, std::mt19937_64& rng);
/// Draws a face over the existing pixels of dst inside `where`.
void draw_face(GrayImage& dst, const Box& where, std::mt19937_64& rng);
GrayImage render_background(int width, int height, std::mt19937_64& rng);

/// Copies src into dst with its top-left at (x, y); pixels outside dst are dropped.
void paste(GrayImage& dst, const GrayImage& src, int x, int y);

struct Scene {
    std::string name;
    GrayImage image;
    std::vector<Box> faces;
};

struct CorpusConfig {
    WindowSize window{19, 19};
    int positives = 600;
    int negative_images = 80;
    int negative_size = 96;
    int scenes = 30;
    int scene_size = 120;
    int max_faces_per_scene = 2;
    int min_face = 19;
    int max_face = 48;
    std::uint64_t seed = 7;
};

struct Corpus {
    std::vector<GrayImage> positives;
    std::vector<GrayImage> negatives;
    std::vector<Scene> scenes;
};

Corpus make_corpus(const CorpusConfig& cfg);

}  // namespace gadaboost::synth
