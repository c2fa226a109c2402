#include "gadaboost/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gadaboost::synth {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool in_ellipse(double u, double v, double cu, double cv, double ru, double rv) {
    const double du = (u - cu) / ru;
    const double dv = (v - cv) / rv;
    return du * du + dv * dv <= 1.0;
}

std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

struct FaceParams {
    double skin, eye_drop, brow_drop, mouth_drop, nose_lift;
    double cx, cy, rx, ry;
    double eye_dx, eye_y, eye_rx, eye_ry;
    double mouth_y, mouth_rx, mouth_ry;
    double tilt, noise;
};

// Face intensity at normalized (u, v), or NaN outside the head oval.
double face_value(const FaceParams& p, double u, double v) {
    if (!in_ellipse(u, v, p.cx, p.cy, p.rx, p.ry)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double val = p.skin;
    if (in_ellipse(u, v, p.cx - p.eye_dx, p.eye_y, p.eye_rx, p.eye_ry) ||
        in_ellipse(u, v, p.cx + p.eye_dx, p.eye_y, p.eye_rx, p.eye_ry)) {
        val -= p.eye_drop;
    } else if (std::abs(v - (p.eye_y - 2.0 * p.eye_ry)) < 0.03 &&
               std::abs(std::abs(u - p.cx) - p.eye_dx) < 0.12 * p.rx / 0.44) {
        val -= p.brow_drop;
    } else if (in_ellipse(u, v, p.cx, p.mouth_y, p.mouth_rx, p.mouth_ry)) {
        val -= p.mouth_drop;
    } else if (std::abs(u - p.cx) < 0.04 && v > p.eye_y + 0.05 && v < p.mouth_y - 0.1) {
        val += p.nose_lift;
    }
    return val * (1.0 + p.tilt * (u - 0.5));
}

FaceParams random_face(Rng& rng) {
    FaceParams p{};
    p.skin = uniform(rng, 90, 220);
    p.eye_drop = uniform(rng, 30, 95);
    p.brow_drop = uniform(rng, 10, 45);
    p.mouth_drop = uniform(rng, 20, 70);
    p.nose_lift = uniform(rng, 0, 20);
    // Alignment jitter: annotated boxes are never exact.
    const double s = uniform(rng, 0.88, 1.06);
    p.cx = 0.5 + uniform(rng, -0.05, 0.05);
    p.cy = 0.52 + uniform(rng, -0.05, 0.05);
    p.rx = s * uniform(rng, 0.40, 0.48);
    p.ry = s * uniform(rng, 0.46, 0.52);
    p.eye_dx = s * uniform(rng, 0.17, 0.22);
    p.eye_y = p.cy - s * (0.12 + uniform(rng, -0.03, 0.03));
    p.eye_rx = s * uniform(rng, 0.07, 0.11);
    p.eye_ry = s * uniform(rng, 0.045, 0.07);
    p.mouth_y = p.cy + s * (0.24 + uniform(rng, -0.03, 0.03));
    p.mouth_rx = s * uniform(rng, 0.10, 0.2);
    p.mouth_ry = s * uniform(rng, 0.035, 0.06);
    p.tilt = uniform(rng, -0.4, 0.4);
    p.noise = uniform(rng, 2, 12);
    return p;
}

}  // namespace

namespace {

void draw_params(GrayImage& dst, const Box& where, const FaceParams& p, bool flip, Rng& rng) {
    std::normal_distribution<double> noise(0.0, p.noise);
    for (int y = 0; y < where.height; ++y) {
        for (int x = 0; x < where.width; ++x) {
            const int dx = where.x + x;
            const int dy = where.y + y;
            if (dx < 0 || dy < 0 || dx >= dst.width() || dy >= dst.height()) {
                continue;
            }
            // 2x2 supersampling; samples outside the oval keep the backdrop.
            double acc = 0.0;
            int inside = 0;
            for (int sy = 0; sy < 2; ++sy) {
                for (int sx = 0; sx < 2; ++sx) {
                    const double u = (x + 0.25 + 0.5 * sx) / where.width;
                    const double v = (y + 0.25 + 0.5 * sy) / where.height;
                    const double val = face_value(p, u, flip ? 1.0 - v : v);
                    if (!std::isnan(val)) {
                        acc += val;
                        ++inside;
                    }
                }
            }
            if (inside == 0) {
                continue;
            }
            const double blended = (acc + (4 - inside) * dst.at(dx, dy)) / 4.0;
            dst.at(dx, dy) = to_pixel(blended + noise(rng));
        }
    }
}

// Face-shaped clutter that is not a face: bright eyes, a featureless
// oval with only a mouth, or an upside-down face.
void draw_decoy(GrayImage& dst, const Box& where, Rng& rng) {
    FaceParams p = random_face(rng);
    bool flip = false;
    switch (uniform_int(rng, 0, 2)) {
        case 0: p.eye_drop = -p.eye_drop * 0.6; break;
        case 1: p.eye_drop = 0.0; p.brow_drop = 0.0; break;
        default: flip = true; break;
    }
    draw_params(dst, where, p, flip, rng);
}

GrayImage render_backdrop(int width, int height, bool decoys, Rng& rng);

}  // namespace

void draw_face(GrayImage& dst, const Box& where, Rng& rng) {
    const FaceParams p = random_face(rng);
    draw_params(dst, where, p, false, rng);
}

GrayImage render_face(int width, int height, Rng& rng) {
    GrayImage img = render_backdrop(width, height, false, rng);
    draw_face(img, {0, 0, width, height}, rng);
    return img;
}

GrayImage render_background(int width, int height, Rng& rng) { return render_backdrop(width, height, true, rng); }

namespace {

GrayImage render_backdrop(int width, int height, bool decoys, Rng& rng) {
    std::vector<double> field(static_cast<std::size_t>(width) * height);
    const double base = uniform(rng, 30, 220);
    const double gx = uniform(rng, -1.0, 1.0);
    const double gy = uniform(rng, -1.0, 1.0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            field[static_cast<std::size_t>(y) * width + x] = base + gx * x + gy * y;
        }
    }
    // Smooth waves.
    const int waves = uniform_int(rng, 1, 4);
    for (int k = 0; k < waves; ++k) {
        const double amp = uniform(rng, 5, 40);
        const double fx = uniform(rng, 0.02, 0.4);
        const double fy = uniform(rng, 0.02, 0.4);
        const double phase = uniform(rng, 0, 2 * std::numbers::pi);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                field[static_cast<std::size_t>(y) * width + x] += amp * std::sin(fx * x + fy * y + phase);
            }
        }
    }
    // Clutter: rectangles, ellipses, bars, and occasional dark blob pairs.
    const int shapes = uniform_int(rng, 4, 16);
    for (int k = 0; k < shapes; ++k) {
        const int kind = uniform_int(rng, 0, 3);
        const double value = uniform(rng, 0, 255);
        const double cx = uniform(rng, 0, width);
        const double cy = uniform(rng, 0, height);
        const double rx = uniform(rng, 2, width / 4.0);
        const double ry = uniform(rng, 2, height / 4.0);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                bool inside = false;
                switch (kind) {
                    case 0: inside = std::abs(x - cx) <= rx && std::abs(y - cy) <= ry; break;
                    case 1: inside = in_ellipse(x, y, cx, cy, rx, ry); break;
                    case 2: inside = std::abs(y - cy) <= std::max(1.0, ry / 4.0); break;
                    default:
                        inside = in_ellipse(x, y, cx - rx, cy, rx / 2.5, ry / 4.0) ||
                                 in_ellipse(x, y, cx + rx, cy, rx / 2.5, ry / 4.0);
                        break;
                }
                if (inside) {
                    field[static_cast<std::size_t>(y) * width + x] = value;
                }
            }
        }
    }
    std::normal_distribution<double> noise(0.0, uniform(rng, 2, 20));
    GrayImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            img.at(x, y) = to_pixel(field[static_cast<std::size_t>(y) * width + x] + noise(rng));
        }
    }
    const int count = decoys ? uniform_int(rng, 0, std::max(1, width * height / 2500)) : 0;
    for (int k = 0; k < count; ++k) {
        const int lo = std::min(width, 12);
        const int side = uniform_int(rng, lo, std::max(lo, width / 2));
        const int h = std::min(height, side);
        const int x = uniform_int(rng, -side / 4, width - side * 3 / 4);
        const int y = uniform_int(rng, -h / 4, height - h * 3 / 4);
        draw_decoy(img, {x, y, side, h}, rng);
    }
    return img;
}

}  // namespace

void paste(GrayImage& dst, const GrayImage& src, int x, int y) {
    for (int sy = 0; sy < src.height(); ++sy) {
        for (int sx = 0; sx < src.width(); ++sx) {
            const int dx = x + sx;
            const int dy = y + sy;
            if (dx >= 0 && dy >= 0 && dx < dst.width() && dy < dst.height()) {
                dst.at(dx, dy) = src.at(sx, sy);
            }
        }
    }
}

Corpus make_corpus(const CorpusConfig& cfg) {
    Rng rng(cfg.seed);
    Corpus corpus;
    corpus.positives.reserve(static_cast<std::size_t>(cfg.positives));
    for (int i = 0; i < cfg.positives; ++i) {
        corpus.positives.push_back(render_face(cfg.window.width, cfg.window.height, rng));
    }
    for (int i = 0; i < cfg.negative_images; ++i) {
        corpus.negatives.push_back(render_background(cfg.negative_size, cfg.negative_size, rng));
    }
    for (int i = 0; i < cfg.scenes; ++i) {
        Scene scene;
        scene.name = "scene_" + std::to_string(i) + ".pgm";
        scene.image = render_background(cfg.scene_size, cfg.scene_size, rng);
        const int faces = uniform_int(rng, 1, cfg.max_faces_per_scene);
        for (int f = 0, tries = 0; f < faces && tries < 50; ++tries) {
            const int side = uniform_int(rng, cfg.min_face, std::min(cfg.max_face, cfg.scene_size));
            const int h = side * cfg.window.height / cfg.window.width;
            const Box r{uniform_int(rng, 0, cfg.scene_size - side), uniform_int(rng, 0, cfg.scene_size - h), side, h};
            const bool overlaps = std::any_of(scene.faces.begin(), scene.faces.end(), [&](const Box& o) {
                return r.x < o.x + o.width && o.x < r.x + r.width && r.y < o.y + o.height && o.y < r.y + r.height;
            });
            if (overlaps) {
                continue;
            }
            draw_face(scene.image, r, rng);
            scene.faces.push_back(r);
            ++f;
        }
        corpus.scenes.push_back(std::move(scene));
    }
    return corpus;
}

}  // namespace gadaboost::synth
