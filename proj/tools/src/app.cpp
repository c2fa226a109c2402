#include "gadaboost/cli/app.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "gadaboost/cli/bench.hpp"
#include "gadaboost/cli/config.hpp"
#include "gadaboost/cli/dataset.hpp"
#include "gadaboost/io.hpp"
#include "gadaboost/parallel.hpp"

namespace gadaboost::cli {

namespace fs = std::filesystem;

void write_report_csv(std::ostream& out, const TrainReport& report) {
    out << "stage,seconds,features_evaluated,stump_fits,weak_count,hit_rate,false_alarm,goal_met,positives,"
           "negatives,harvest_attempts\n";
    for (const auto& s : report.stages) {
        out << s.stage << ',' << format_double(s.seconds) << ',' << s.work.feature_evaluations << ','
            << s.work.stump_fits << ',' << s.weak_count << ',' << format_double(s.hit_rate) << ','
            << format_double(s.false_alarm) << ',' << (s.goal_met ? 1 : 0) << ',' << s.positives_used << ','
            << s.negatives_harvested << ',' << s.harvest_attempts << '\n';
    }
}

void write_trace_csv(std::ostream& out, const TrainReport& report) {
    out << "stage,generation,best_fitness,mean_fitness,dedup_dropped,refilled\n";
    for (const auto& s : report.stages) {
        for (const auto& g : s.ga_trace) {
            out << s.stage << ',' << g.generation << ',' << format_double(g.best_fitness) << ','
                << format_double(g.mean_fitness) << ',' << g.dedup_dropped << ',' << g.refilled << '\n';
        }
    }
}

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw DataError("cannot write " + path.string());
    }
    return f;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw DataError("cannot open " + path.string());
    }
    return f;
}

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required, bool out_required) {
    auto* c = cmd->add_option("--config", f.config, "flat key = value configuration file");
    if (config_required) {
        c->required();
    }
    cmd->add_option("--seed", f.seed, "RNG seed (overrides config and GADABOOST_SEED)");
    cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
    auto* o = cmd->add_option("--out", f.out, "output path");
    if (out_required) {
        o->required();
    }
}

RunConfig config_from(const CommonFlags& f) {
    RunConfig cfg;
    if (!f.config.empty()) {
        cfg = load_config(f.config);
    }
    apply_seed_override(cfg, f.seed);
    if (f.threads) {
        cfg.train.threads = *f.threads;
    }
    validate(cfg);
    return cfg;
}

int cmd_train(const CommonFlags& flags, std::ostream& out) {
    const RunConfig cfg = config_from(flags);
    const Dataset data = load_dataset(cfg);
    out << "training " << to_string(cfg.train.mode) << " cascade: " << data.positives.size() << " positives, "
        << data.negatives.size() << " negative images, seed " << cfg.train.rng_seed << '\n';
    const TrainedCascade trained = train_cascade(data.positives, data.negatives, cfg.train, [&](const StageReport& r) {
        out << "stage " << r.stage << ": " << r.weak_count << " stumps, hit " << std::setprecision(4) << r.hit_rate
            << ", false alarm " << r.false_alarm << ", " << r.work.feature_evaluations << " features, "
            << r.seconds << " s\n";
    });
    const fs::path dir(flags.out);
    fs::create_directories(dir);
    save_cascade(dir / "model.txt", trained.cascade);
    {
        auto f = open_output(dir / "report.csv");
        write_report_csv(f, trained.report);
    }
    {
        auto f = open_output(dir / "fitness_trace.csv");
        write_trace_csv(f, trained.report);
    }
    const WorkCounters work = trained.report.total_work();
    std::ostringstream summary;
    summary << "mode " << to_string(trained.report.mode) << '\n'
            << "seed " << trained.report.seed << '\n'
            << "stages " << trained.cascade.stages.size() << '\n'
            << "seconds " << format_double(trained.report.total_seconds()) << '\n'
            << "features_evaluated " << work.feature_evaluations << '\n'
            << "stump_fits " << work.stump_fits << '\n'
            << "stopped_early " << (trained.report.stopped_early ? 1 : 0) << '\n';
    if (trained.report.stopped_early) {
        summary << "stop_reason " << trained.report.stop_reason << '\n';
    }
    auto f = open_output(dir / "summary.txt");
    f << summary.str();
    out << summary.str();
    return kExitOk;
}

int cmd_detect(const CommonFlags& flags, const std::string& model, const std::string& images, std::ostream& out,
               std::ostream& err) {
    const RunConfig cfg = config_from(flags);
    const Cascade cascade = load_cascade(model);
    std::vector<EvalImage> loaded;
    int skipped = 0;
    for (const auto& path : list_images(images)) {
        try {
            loaded.push_back({path.filename().string(), read_pgm(path), {}});
        } catch (const DataError& e) {
            err << "warning: skipping " << e.what() << '\n';
            ++skipped;
        }
    }
    const auto detections = detect_all(loaded, cascade, cfg.detect, cfg.min_neighbors, cfg.train.threads);
    auto f = open_output(flags.out);
    write_detections_csv(f, detections);
    out << "images " << loaded.size() << ", skipped " << skipped << ", detections " << detections.size() << '\n';
    return kExitOk;
}

std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> grid;
    for (const auto& item : split_csv_line(text)) {
        grid.push_back(static_cast<int>(parse_double(item)));
    }
    return grid;
}

int cmd_eval(const std::vector<std::string>& detection_files, const std::string& annotations, double iou_threshold,
             const std::string& grid_text, const std::string& out_dir, std::ostream& out) {
    auto ann = open_input(annotations);
    const auto truths = ground_truth(read_annotations(ann));
    if (truths.empty()) {
        throw DataError(annotations + ": no ground-truth boxes");
    }
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<std::vector<RocPoint>> runs;
    std::ostringstream summary;
    summary << "ground_truth " << truths.size() << '\n';
    for (std::size_t k = 0; k < detection_files.size(); ++k) {
        auto in = open_input(detection_files[k]);
        const auto dets = read_detections_csv(in);
        auto roc = roc_points(dets, truths, iou_threshold);
        const MatchResult m = match_detections(dets, truths, iou_threshold);
        const std::string name = detection_files.size() == 1 ? "roc.csv" : "roc_" + std::to_string(k + 1) + ".csv";
        auto f = open_output(dir / name);
        write_roc_csv(f, roc);
        summary << "run " << k + 1 << ' ' << detection_files[k] << ": detections " << dets.size()
                << ", true_positives " << m.true_positives << ", false_positives " << m.false_positives
                << ", tpr " << format_double(static_cast<double>(m.true_positives) / truths.size()) << '\n';
        runs.push_back(std::move(roc));
    }
    if (runs.size() > 1 || !grid_text.empty()) {
        std::vector<int> grid;
        if (grid_text.empty()) {
            int max_fp = 0;
            for (const auto& r : runs) {
                max_fp = std::max(max_fp, r.empty() ? 0 : r.back().false_positives);
            }
            for (int fp = 0; fp <= max_fp; ++fp) {
                grid.push_back(fp);
            }
        } else {
            grid = parse_grid(grid_text);
        }
        const auto env = aggregate_runs(runs, grid);
        auto f = open_output(dir / "envelope.csv");
        write_envelope_csv(f, env);
    }
    auto f = open_output(dir / "summary.txt");
    f << summary.str();
    out << summary.str();
    return kExitOk;
}

int cmd_bench(const CommonFlags& flags, std::ostream& out) {
    RunConfig cfg = config_from(flags);
    if (flags.seed) {
        cfg.bench.seeds = {*flags.seed};
    }
    const Dataset data = load_dataset(cfg);
    const BenchResult result = run_bench(cfg, data, [&](const BenchRow& r) {
        out << r.cell.name << " seed " << r.seed << ": " << std::setprecision(4) << r.seconds << " s, "
            << r.work.feature_evaluations << " features\n";
    });
    const fs::path dir(flags.out);
    fs::create_directories(dir);
    {
        auto f = open_output(dir / "bench.csv");
        write_bench_csv(f, result);
    }
    for (const auto& [cell, env] : result.envelopes) {
        auto f = open_output(dir / ("envelope_" + cell + ".csv"));
        write_envelope_csv(f, env);
    }
    std::ostringstream table;
    print_bench_table(table, result);
    auto f = open_output(dir / "table.txt");
    f << table.str();
    out << table.str();
    return kExitOk;
}

int cmd_enumerate(int width, int height, bool list, std::ostream& out) {
    const WindowSize w{width, height};
    if (list) {
        for (const auto& f : enumerate_features(w)) {
            out << to_string(f.type) << ' ' << f.x << ' ' << f.y << ' ' << f.x1 << ' ' << f.y1 << '\n';
        }
        return kExitOk;
    }
    out << feature_space_size(w) << '\n';
    return kExitOk;
}

int cmd_synth(const CommonFlags& flags, std::ostream& out) {
    RunConfig cfg = config_from(flags);
    if (flags.seed) {
        cfg.corpus.seed = *flags.seed;
    }
    const synth::Corpus corpus = synth::make_corpus(cfg.corpus);
    write_corpus(corpus, flags.out);
    out << "wrote " << corpus.positives.size() << " positives, " << corpus.negatives.size() << " negative images, "
        << corpus.scenes.size() << " scenes to " << flags.out << '\n';
    return kExitOk;
}

// Eye file lines: `path n lx ly rx ry [lx ly rx ry ...]`.
int cmd_eyes2boxes(const std::string& in_path, const std::string& out_path, std::ostream& out) {
    auto in = open_input(in_path);
    std::vector<AnnotationRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        AnnotationRecord rec;
        int n = 0;
        if (!(ls >> rec.image)) {
            continue;
        }
        if (!(ls >> n) || n < 0) {
            throw DataError(in_path + " line " + std::to_string(line_no) + ": bad eye count");
        }
        for (int i = 0; i < n; ++i) {
            double lx, ly, rx, ry;
            if (!(ls >> lx >> ly >> rx >> ry)) {
                throw DataError(in_path + " line " + std::to_string(line_no) + ": missing eye coordinates");
            }
            rec.boxes.push_back(box_from_eyes(lx, ly, rx, ry));
        }
        records.push_back(std::move(rec));
    }
    auto f = open_output(out_path);
    write_annotations(f, records);
    out << "converted " << records.size() << " images\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boosted Haar cascades with exhaustive or genetic feature selection", "gadaboost"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    auto* train = app.add_subcommand("train", "train a cascade; writes model.txt, report.csv, fitness_trace.csv");
    add_common(train, train_flags, true, true);

    CommonFlags detect_flags;
    std::string model, images;
    auto* det = app.add_subcommand("detect", "run a cascade over a directory of PGM images");
    add_common(det, detect_flags, false, true);
    det->add_option("--model", model, "model file")->required();
    det->add_option("--images", images, "directory of .pgm images")->required();

    std::vector<std::string> det_files;
    std::string annotations, grid, eval_out;
    double iou_threshold = kPascalThreshold;
    auto* ev = app.add_subcommand("eval", "ROC of detections against annotations");
    ev->add_option("--detections", det_files, "detections CSV; repeat for several runs")->required();
    ev->add_option("--annotations", annotations, "annotation file")->required();
    ev->add_option("--iou", iou_threshold, "IoU threshold for a match")->check(CLI::Range(0.0, 1.0));
    ev->add_option("--fp-grid", grid, "comma-separated false-positive counts for the envelope");
    ev->add_option("--out", eval_out, "output directory")->required();

    CommonFlags bench_flags;
    auto* bench = app.add_subcommand("bench", "train baseline and GA cells and compare time and accuracy");
    add_common(bench, bench_flags, true, true);

    int width = 24, height = 24;
    bool list = false;
    auto* en = app.add_subcommand("enumerate", "print the feature-space size of a window");
    en->add_option("--width", width, "window width")->check(CLI::PositiveNumber);
    en->add_option("--height", height, "window height")->check(CLI::PositiveNumber);
    en->add_flag("--list", list, "print every feature instead of the count");

    CommonFlags synth_flags;
    auto* sy = app.add_subcommand("synth", "write the synthetic corpus as PGM files");
    add_common(sy, synth_flags, false, true);

    std::string eyes_in, eyes_out;
    auto* eyes = app.add_subcommand("eyes2boxes", "convert eye coordinates to square face boxes");
    eyes->add_option("--in", eyes_in, "eye coordinate file")->required();
    eyes->add_option("--out", eyes_out, "annotation file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (train->parsed()) return cmd_train(train_flags, out);
        if (det->parsed()) return cmd_detect(detect_flags, model, images, out, err);
        if (ev->parsed()) return cmd_eval(det_files, annotations, iou_threshold, grid, eval_out, out);
        if (bench->parsed()) return cmd_bench(bench_flags, out);
        if (en->parsed()) return cmd_enumerate(width, height, list, out);
        if (sy->parsed()) return cmd_synth(synth_flags, out);
        if (eyes->parsed()) return cmd_eyes2boxes(eyes_in, eyes_out, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace gadaboost::cli
