#include "gadaboost/cli/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "gadaboost/parallel.hpp"

namespace gadaboost::cli {

namespace fs = std::filesystem;

std::vector<fs::path> list_images(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw DataError("not a directory: " + dir.string());
    }
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (entry.is_regular_file() && ext == ".pgm") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return out;
}

namespace {

std::vector<GrayImage> load_all(const fs::path& dir) {
    std::vector<GrayImage> out;
    for (const auto& p : list_images(dir)) {
        out.push_back(read_pgm(p));
    }
    if (out.empty()) {
        throw DataError("no .pgm images in " + dir.string());
    }
    return out;
}

std::vector<EvalImage> load_eval(const RunConfig& cfg) {
    std::vector<EvalImage> out;
    if (cfg.eval_annotations.empty()) {
        return out;
    }
    const fs::path base = cfg.eval_images_dir.empty() ? cfg.eval_annotations.parent_path() : cfg.eval_images_dir;
    for (auto& rec : load_annotations(cfg.eval_annotations)) {
        EvalImage e;
        e.name = rec.image;
        e.image = read_pgm(fs::path(rec.image).is_absolute() ? fs::path(rec.image) : base / rec.image);
        for (const Box& b : rec.boxes) {
            if (b.x < 0 || b.y < 0 || b.x + b.width > e.image.width() || b.y + b.height > e.image.height()) {
                throw DataError(cfg.eval_annotations.string() + ": box outside image " + rec.image);
            }
        }
        e.truths = std::move(rec.boxes);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace

Dataset load_dataset(const RunConfig& cfg) {
    Dataset d;
    if (cfg.dataset == DatasetKind::Synthetic) {
        synth::Corpus corpus = synth::make_corpus(cfg.corpus);
        d.positives = std::move(corpus.positives);
        d.negatives = std::move(corpus.negatives);
        for (auto& s : corpus.scenes) {
            d.eval.push_back({s.name, std::move(s.image), std::move(s.faces)});
        }
        if (!cfg.eval_annotations.empty()) {
            d.eval = load_eval(cfg);
        }
        return d;
    }
    for (const auto& img : load_all(cfg.positives_dir)) {
        d.positives.push_back(img.width() == cfg.window.width && img.height() == cfg.window.height
                                  ? img
                                  : crop_resize(img, 0, 0, img.width(), img.height(), cfg.window.width,
                                                cfg.window.height));
    }
    d.negatives = load_all(cfg.negatives_dir);
    d.eval = load_eval(cfg);
    return d;
}

void write_corpus(const synth::Corpus& corpus, const fs::path& out_dir) {
    auto numbered = [](const char* prefix, std::size_t i) {
        std::string n = std::to_string(i);
        return prefix + std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n + ".pgm";
    };
    fs::create_directories(out_dir / "positives");
    fs::create_directories(out_dir / "negatives");
    fs::create_directories(out_dir / "scenes");
    for (std::size_t i = 0; i < corpus.positives.size(); ++i) {
        write_pgm(out_dir / "positives" / numbered("pos_", i), corpus.positives[i]);
    }
    for (std::size_t i = 0; i < corpus.negatives.size(); ++i) {
        write_pgm(out_dir / "negatives" / numbered("neg_", i), corpus.negatives[i]);
    }
    std::vector<AnnotationRecord> records;
    for (const auto& s : corpus.scenes) {
        write_pgm(out_dir / "scenes" / s.name, s.image);
        records.push_back({s.name, s.faces});
    }
    std::ofstream ann(out_dir / "scenes" / "annotations.txt");
    if (!ann) {
        throw DataError("cannot write " + (out_dir / "scenes" / "annotations.txt").string());
    }
    write_annotations(ann, records);
}

std::vector<ScoredDetection> detect_image(const std::string& name, const GrayImage& img, const Cascade& cascade,
                                          const DetectParams& params, int min_neighbors) {
    std::vector<ScoredDetection> out;
    for (const auto& d : group_detections(detect(img, cascade, params), min_neighbors)) {
        out.push_back({name, d.box, d.score});
    }
    return out;
}

std::vector<ScoredDetection> detect_all(const std::vector<EvalImage>& images, const Cascade& cascade,
                                        const DetectParams& params, int min_neighbors, int threads) {
    std::vector<std::vector<ScoredDetection>> per_image(images.size());
    parallel_for(images.size(), threads, [&](std::size_t i) {
        per_image[i] = detect_image(images[i].name, images[i].image, cascade, params, min_neighbors);
    });
    std::vector<ScoredDetection> out;
    for (auto& v : per_image) {
        std::move(v.begin(), v.end(), std::back_inserter(out));
    }
    return out;
}

std::vector<GroundTruthBox> truths_of(const std::vector<EvalImage>& images) {
    std::vector<GroundTruthBox> out;
    for (const auto& e : images) {
        for (const auto& b : e.truths) {
            out.push_back({e.name, b});
        }
    }
    return out;
}

}  // namespace gadaboost::cli
