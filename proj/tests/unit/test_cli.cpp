#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gadaboost/cli/app.hpp"
#include "gadaboost/cli/bench.hpp"
#include "gadaboost/cli/config.hpp"
#include "gadaboost/io.hpp"

using namespace gadaboost;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gadaboost");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gadaboost_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// A small 12x12 problem that trains in well under a second.
std::string small_config(const std::string& mode, const std::string& extra = {}) {
    return "mode = " + mode +
           "\n"
           "window_width = 12\nwindow_height = 12\n"
           "num_stages = 2\npos_per_stage = 80\nneg_per_stage = 80\n"
           "seed = 5\n"
           "ga_population_size = 100\nga_max_iterations = 3\n"
           "synth_positives = 120\nsynth_negative_images = 10\nsynth_negative_size = 48\n"
           "synth_scenes = 4\nsynth_scene_size = 60\nsynth_min_face = 12\nsynth_max_face = 24\n" +
           extra;
}

struct EnvGuard {
    explicit EnvGuard(const char* value) {
        if (value) ::setenv("GADABOOST_SEED", value, 1);
        else ::unsetenv("GADABOOST_SEED");
    }
    ~EnvGuard() { ::unsetenv("GADABOOST_SEED"); }
};

cli::RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return cli::parse_config(in);
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse("# comment\nmode = ga   # trailing\nnum_stages=4\nga_registry_scope = stage\n"
                           "bench_populations = 100, 200\nwindow_width = 24\nwindow_height = 24\nsynth_min_face = 24\n");
    CHECK(cfg.train.mode == TrainingMode::Ga);
    CHECK(cfg.train.num_stages == 4);
    CHECK(cfg.train.ga.registry_scope == RegistryScope::Stage);
    CHECK(cfg.bench.populations == std::vector<int>{100, 200});
    CHECK(cfg.window == WindowSize{24, 24});
    CHECK(cfg.corpus.window == WindowSize{24, 24});

    CHECK_THROWS_AS(parse("no_such_key = 1\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("num_stages = 1\nnum_stages = 2\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("num_stages = two\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("num_stages\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("mode = fast\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("min_hit_rate = 1.5\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("ga_population_size = 1\n"), cli::ConfigError);
    CHECK_THROWS_AS(parse("window_width = 30\n"), cli::ConfigError);  // synth faces smaller than the window
    CHECK(cli::config_keys().size() > 40);
}

TEST_CASE("relative paths resolve against the config directory") {
    std::istringstream in("dataset = directories\npositives_dir = pos\nnegatives_dir = /abs/neg\n");
    const auto cfg = cli::parse_config(in, "/data/run");
    CHECK(cfg.positives_dir == fs::path("/data/run/pos"));
    CHECK(cfg.negatives_dir == fs::path("/abs/neg"));
    CHECK_THROWS_AS(parse("dataset = directories\n"), cli::ConfigError);
}

TEST_CASE("seed precedence") {
    {
        EnvGuard env(nullptr);
        auto cfg = parse("seed = 3\n");
        cli::apply_seed_override(cfg, std::nullopt);
        CHECK(cfg.train.rng_seed == 3);
    }
    {
        EnvGuard env("17");
        auto cfg = parse("seed = 3\n");
        cli::apply_seed_override(cfg, std::nullopt);
        CHECK(cfg.train.rng_seed == 17);
        cli::apply_seed_override(cfg, 99);
        CHECK(cfg.train.rng_seed == 99);
    }
    {
        EnvGuard env("abc");
        auto cfg = parse("");
        CHECK_THROWS_AS(cli::apply_seed_override(cfg, std::nullopt), cli::ConfigError);
    }
}

TEST_CASE("usage errors exit 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"train"}).code == 1);
    CHECK(run_cli({"enumerate", "--width", "0"}).code == 1);
    CHECK(run_cli({"--help"}).code == 0);

    const fs::path dir = scratch("usage");
    spit(dir / "bad.cfg", "bogus = 1\n");
    const auto r = run_cli({"train", "--config", (dir / "bad.cfg").string(), "--out", (dir / "o").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown key") != std::string::npos);
}

TEST_CASE("data errors exit 2") {
    const fs::path dir = scratch("data_errors");
    const auto r = run_cli({"detect", "--model", (dir / "missing.txt").string(), "--images", dir.string(), "--out",
                            (dir / "d.csv").string()});
    CHECK(r.code == 2);
    spit(dir / "ann.txt", "a.pgm 1 0 0 5 5\n");
    spit(dir / "dets.csv", "wrong header\n");
    CHECK(run_cli({"eval", "--detections", (dir / "dets.csv").string(), "--annotations", (dir / "ann.txt").string(),
                   "--out", (dir / "ev").string()})
              .code == 2);
}

TEST_CASE("enumerate") {
    CHECK(run_cli({"enumerate"}).out == "162336\n");
    CHECK(run_cli({"enumerate", "--width", "19", "--height", "19"}).out == "63960\n");
    const auto listed = run_cli({"enumerate", "--width", "6", "--height", "6", "--list"});
    CHECK(listed.code == 0);
    CHECK(std::count(listed.out.begin(), listed.out.end(), '\n') == 669);
}

TEST_CASE("train, detect and eval end to end") {
    EnvGuard env(nullptr);
    const fs::path dir = scratch("e2e");
    spit(dir / "base.cfg", small_config("baseline"));
    spit(dir / "ga.cfg", small_config("ga"));

    const auto a = run_cli({"train", "--config", (dir / "base.cfg").string(), "--out", (dir / "a").string()});
    REQUIRE_MESSAGE(a.code == 0, a.err);
    const auto b = run_cli({"train", "--config", (dir / "base.cfg").string(), "--out", (dir / "b").string()});
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a" / "model.txt") == slurp(dir / "b" / "model.txt"));
    CHECK(slurp(dir / "a" / "model.txt").size() > 0);

    const Cascade model = load_cascade(dir / "a" / "model.txt");
    CHECK(model.window == WindowSize{12, 12});
    CHECK(model.stages.size() == 2);
    const std::string report = slurp(dir / "a" / "report.csv");
    CHECK(report.rfind("stage,seconds,features_evaluated,stump_fits,", 0) == 0);
    CHECK(std::count(report.begin(), report.end(), '\n') == 3);

    const auto g = run_cli({"train", "--config", (dir / "ga.cfg").string(), "--out", (dir / "g").string()});
    REQUIRE(g.code == 0);
    auto features = [&](const std::string& sub) {
        std::istringstream s(slurp(dir / sub / "summary.txt"));
        std::string k;
        long long v = -1;
        while (s >> k) {
            if (k == "features_evaluated") s >> v;
        }
        return v;
    };
    CHECK(features("g") > 0);
    CHECK(features("g") < features("a"));
    const std::string trace = slurp(dir / "g" / "fitness_trace.csv");
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 1 + 2 * 4);  // header + 2 stages x (initial + 3)

    const auto seeded = run_cli({"train", "--config", (dir / "base.cfg").string(), "--seed", "6", "--out",
                                 (dir / "c").string()});
    REQUIRE(seeded.code == 0);
    CHECK(slurp(dir / "c" / "summary.txt").find("seed 6\n") != std::string::npos);

    // Corpus on disk, then detection over its scenes and evaluation.
    REQUIRE(run_cli({"synth", "--config", (dir / "base.cfg").string(), "--out", (dir / "corpus").string()}).code == 0);
    CHECK(fs::exists(dir / "corpus" / "scenes" / "annotations.txt"));
    const auto d = run_cli({"detect", "--model", (dir / "a" / "model.txt").string(), "--images",
                            (dir / "corpus" / "scenes").string(), "--out", (dir / "dets.csv").string()});
    REQUIRE_MESSAGE(d.code == 0, d.err);
    CHECK(d.out.rfind("images 4, skipped 0", 0) == 0);
    const auto e = run_cli({"eval", "--detections", (dir / "dets.csv").string(), "--annotations",
                            (dir / "corpus" / "scenes" / "annotations.txt").string(), "--fp-grid", "0,5,10",
                            "--out", (dir / "ev").string()});
    REQUIRE_MESSAGE(e.code == 0, e.err);
    CHECK(fs::exists(dir / "ev" / "roc.csv"));
    CHECK(fs::exists(dir / "ev" / "envelope.csv"));

    // Window-sized positives with min_neighbors 1: the cascade keeps most of its own training faces.
    spit(dir / "detect.cfg", small_config("baseline", "detect_min_neighbors = 1\n"));
    const auto pd = run_cli({"detect", "--model", (dir / "a" / "model.txt").string(), "--config",
                             (dir / "detect.cfg").string(), "--images", (dir / "corpus" / "positives").string(),
                             "--out", (dir / "pos.csv").string()});
    REQUIRE(pd.code == 0);
    std::ifstream pin(dir / "pos.csv");
    CHECK(read_detections_csv(pin).size() >= 100);

    // Training from the directories written above.
    spit(dir / "dirs.cfg", "dataset = directories\npositives_dir = corpus/positives\nnegatives_dir = corpus/negatives\n"
                           "window_width = 12\nwindow_height = 12\nnum_stages = 1\npos_per_stage = 80\n"
                           "neg_per_stage = 80\nseed = 5\n");
    const auto fromdirs = run_cli({"train", "--config", (dir / "dirs.cfg").string(), "--out", (dir / "dirs").string()});
    CHECK_MESSAGE(fromdirs.code == 0, fromdirs.err);
}

TEST_CASE("detect skips unreadable images and handles empty directories") {
    const fs::path dir = scratch("detect");
    Cascade c;
    c.window = {4, 4};
    Stage s;
    s.stumps.push_back({{0, 0, 4, 4, HaarType::X2}, 0.0, -1.0, 1.0});
    s.threshold = -10.0;  // accept everything
    c.stages = {s};
    save_cascade(dir / "model.txt", c);

    fs::create_directories(dir / "empty");
    const auto none = run_cli({"detect", "--model", (dir / "model.txt").string(), "--images",
                               (dir / "empty").string(), "--out", (dir / "none.csv").string()});
    REQUIRE(none.code == 0);
    CHECK(slurp(dir / "none.csv") == "image,x,y,w,h,score\n");

    fs::create_directories(dir / "imgs");
    write_pgm(dir / "imgs" / "ok.pgm", GrayImage(8, 8, 100));
    spit(dir / "imgs" / "broken.pgm", "P5\n8 8\n255\nxx");
    const auto r = run_cli({"detect", "--model", (dir / "model.txt").string(), "--images", (dir / "imgs").string(),
                            "--out", (dir / "d.csv").string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: skipping") != std::string::npos);
    CHECK(r.out.rfind("images 1, skipped 1", 0) == 0);
    std::ifstream in(dir / "d.csv");
    const auto dets = read_detections_csv(in);
    REQUIRE_FALSE(dets.empty());
    for (const auto& d : dets) CHECK(d.image == "ok.pgm");
}

TEST_CASE("eval of perfect and shuffled detections") {
    const fs::path dir = scratch("eval");
    std::vector<AnnotationRecord> recs{{"a.pgm", {{0, 0, 20, 20}, {40, 40, 20, 20}}}, {"b.pgm", {{5, 5, 30, 30}}}};
    {
        std::ofstream f(dir / "ann.txt");
        write_annotations(f, recs);
    }
    std::vector<ScoredDetection> dets;
    for (const auto& r : recs)
        for (const auto& b : r.boxes) dets.push_back({r.image, b, 1.0});
    dets.push_back({"b.pgm", {80, 80, 10, 10}, 0.5});
    {
        std::ofstream f(dir / "perfect.csv");
        write_detections_csv(f, dets);
    }
    std::mt19937_64 rng(81);
    std::shuffle(dets.begin(), dets.end(), rng);
    {
        std::ofstream f(dir / "shuffled.csv");
        write_detections_csv(f, dets);
    }
    const auto r = run_cli({"eval", "--detections", (dir / "perfect.csv").string(), "--detections",
                            (dir / "shuffled.csv").string(), "--annotations", (dir / "ann.txt").string(), "--out",
                            (dir / "out").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const std::string roc1 = slurp(dir / "out" / "roc_1.csv");
    CHECK(roc1 == slurp(dir / "out" / "roc_2.csv"));
    std::istringstream in(roc1);
    const auto roc = read_roc_csv(in);
    REQUIRE(roc.size() == 2);
    CHECK(roc[0].false_positives == 0);
    CHECK(roc[0].true_positive_rate == 1.0);
    CHECK(roc[1].false_positives == 1);
    CHECK(fs::exists(dir / "out" / "envelope.csv"));
}

TEST_CASE("eyes2boxes") {
    const fs::path dir = scratch("eyes");
    spit(dir / "eyes.txt", "a.pgm 1 10 20 20 20\nb.pgm 0\n");
    REQUIRE(run_cli({"eyes2boxes", "--in", (dir / "eyes.txt").string(), "--out", (dir / "ann.txt").string()}).code == 0);
    CHECK(slurp(dir / "ann.txt") == "a.pgm 1 5 12 20 20\nb.pgm 0\n");
    spit(dir / "bad.txt", "a.pgm 2 1 2 3\n");
    CHECK(run_cli({"eyes2boxes", "--in", (dir / "bad.txt").string(), "--out", (dir / "x.txt").string()}).code == 2);
}

TEST_CASE("bench writes a table with speedups") {
    EnvGuard env(nullptr);
    const fs::path dir = scratch("bench");
    spit(dir / "bench.cfg", small_config("baseline", "bench_populations = 60\nbench_iterations = 2\nbench_seeds = 1,2\n"));
    const auto r = run_cli({"bench", "--config", (dir / "bench.cfg").string(), "--out", (dir / "out").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::ifstream in(dir / "out" / "bench.csv");
    const auto rows = cli::read_bench_csv(in);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].cell.name == "baseline");
    CHECK(rows[0].speedup == doctest::Approx(1.0));
    CHECK(rows[2].cell.name == "ga_p60_i2");
    CHECK(rows[2].work.feature_evaluations < rows[0].work.feature_evaluations);
    CHECK(fs::exists(dir / "out" / "envelope_baseline.csv"));
    CHECK(fs::exists(dir / "out" / "envelope_ga_p60_i2.csv"));
    CHECK(fs::exists(dir / "out" / "table.txt"));
}
