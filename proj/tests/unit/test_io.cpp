#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gadaboost/io.hpp"
#include "oracles.hpp"

using namespace gadaboost;

namespace {

Cascade sample_cascade() {
    Cascade c;
    c.window = {19, 19};
    Stage s0;
    s0.stumps.push_back({{0, 0, 4, 6, HaarType::X2}, 12.625, -0.75, 0.3333333333333333});
    s0.stumps.push_back({{3, 2, 12, 5, HaarType::X3}, -1e-7, 0.1, -0.9});
    s0.threshold = -0.1 + 0.2;
    Stage s1;
    s1.stumps.push_back({{1, 1, 19, 19, HaarType::X2Y2}, std::numeric_limits<double>::infinity(), 0.02, 0.02});
    s1.threshold = 1.0 / 3.0;
    c.stages = {s0, s1};
    return c;
}

}  // namespace

TEST_CASE("pgm round trip") {
    std::mt19937_64 rng(71);
    const GrayImage img = oracle::random_image(23, 17, rng);
    std::stringstream ss;
    write_pgm(ss, img);
    CHECK(read_pgm(ss) == img);
}

TEST_CASE("pgm header comments and whitespace") {
    std::string data = "P5\n# made by hand\n3 # width\n2\n255\n";
    data += std::string{'\x01', '\x02', '\x03', '\x04', '\x05', '\xff'};
    std::istringstream in(data);
    const GrayImage img = read_pgm(in);
    REQUIRE(img.width() == 3);
    REQUIRE(img.height() == 2);
    CHECK(img.at(0, 0) == 1);
    CHECK(img.at(2, 1) == 255);
}

TEST_CASE("corrupt pgm input") {
    auto parse = [](std::string s) {
        std::istringstream in(s);
        return read_pgm(in);
    };
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("P2\n2 2\n255\n1 2 3 4"), DataError);
    CHECK_THROWS_AS(parse("P5\n2 2\n255\nabc"), DataError);
    CHECK_THROWS_AS(parse("P5\n2 2\n65535\n"), DataError);
    CHECK_THROWS_AS(parse("P5\n-2 2\n255\n"), DataError);
    CHECK_THROWS_AS(parse("P5\nx 2\n255\n"), DataError);
    CHECK_THROWS_AS(read_pgm("/nonexistent/none.pgm"), DataError);
}

TEST_CASE("double formatting round trips") {
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) / 7.0;
        CHECK(parse_double(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(std::isinf(parse_double("inf")));
    CHECK(parse_double("-inf") < 0);
    CHECK(format_double(0.5) == "0.5");
    CHECK_THROWS_AS(parse_double("1.5x"), DataError);
    CHECK_THROWS_AS(parse_double(""), DataError);
}

TEST_CASE("cascade round trip is exact") {
    const Cascade c = sample_cascade();
    std::stringstream ss;
    write_cascade(ss, c);
    const std::string text = ss.str();
    CHECK(text.rfind("gadaboost-cascade 1\nwindow 19 19\nstages 2\n", 0) == 0);
    const Cascade back = read_cascade(ss);
    CHECK(back == c);
    std::ostringstream again;
    write_cascade(again, back);
    CHECK(again.str() == text);
}

TEST_CASE("malformed model files") {
    const Cascade c = sample_cascade();
    std::ostringstream good;
    write_cascade(good, c);
    const std::string text = good.str();
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_cascade(in);
    };
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("gadaboost-cascade 2\n"), DataError);
    CHECK_THROWS_AS(parse(text.substr(0, text.size() / 2)), DataError);
    std::string bad_window = text;
    bad_window.replace(bad_window.find("window 19 19"), 12, "window 0 19");
    CHECK_THROWS_AS(parse(bad_window), DataError);
    // A feature that does not fit the window.
    std::string bad_feature = text;
    bad_feature.replace(bad_feature.find("4 1 1 19 19"), 11, "4 1 1 20 19");
    CHECK_THROWS_AS(parse(bad_feature), DataError);
    CHECK_THROWS_AS(parse("gadaboost-cascade 1\nwindow 19 19\nstages 0\n"), DataError);
}

TEST_CASE("annotations") {
    const std::string text = "a.pgm 2 1 2 3 4 10 20 30 40\n\nb.pgm 0\nc.pgm 1 5 5 19 19\n";
    std::istringstream in(text);
    const auto recs = read_annotations(in);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].image == "a.pgm");
    CHECK(recs[0].boxes == std::vector<Box>{{1, 2, 3, 4}, {10, 20, 30, 40}});
    CHECK(recs[1].boxes.empty());

    std::ostringstream out;
    write_annotations(out, recs);
    std::istringstream back(out.str());
    CHECK(read_annotations(back) == recs);

    const auto gt = ground_truth(recs);
    REQUIRE(gt.size() == 3);
    CHECK(gt[2].image == "c.pgm");
    CHECK(gt[2].box == Box{5, 5, 19, 19});

    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return read_annotations(is);
    };
    CHECK_THROWS_AS(parse("a.pgm 2 1 2 3 4\n"), DataError);
    CHECK_THROWS_AS(parse("a.pgm 1 1 2 0 4\n"), DataError);
    CHECK_THROWS_AS(parse("a.pgm -1\n"), DataError);
    CHECK_THROWS_AS(parse("a.pgm x\n"), DataError);
}

TEST_CASE("face box from eye centres") {
    // Eyes 10 apart at y = 20: side 20, centred on x = 15, eyes 8 rows down.
    CHECK(box_from_eyes(10, 20, 20, 20) == Box{5, 12, 20, 20});
    const Box tilted = box_from_eyes(0, 0, 6, 8);  // distance 10
    CHECK(tilted.width == 20);
    CHECK(tilted.height == 20);
    CHECK(tilted.x == -7);  // lround(3 - 10)
    CHECK(tilted.y == -4);  // lround(4 - 8)
    CHECK_THROWS_AS(box_from_eyes(3, 3, 3, 3), DataError);
}

TEST_CASE("detections csv round trip") {
    const std::vector<ScoredDetection> dets{{"x.pgm", {1, 2, 19, 19}, 0.125}, {"y.pgm", {0, 0, 24, 24}, -3.5}};
    std::stringstream ss;
    write_detections_csv(ss, dets);
    CHECK(ss.str().rfind("image,x,y,w,h,score\n", 0) == 0);
    const auto back = read_detections_csv(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].image == "x.pgm");
    CHECK(back[1].box == Box{0, 0, 24, 24});
    CHECK(back[1].score == -3.5);

    std::ostringstream bad;
    CHECK_THROWS_AS(write_detections_csv(bad, {{"a,b", {0, 0, 1, 1}, 0}}), DataError);
    std::istringstream wrong_header("image,x,y,w,h\n");
    CHECK_THROWS_AS(read_detections_csv(wrong_header), DataError);
    std::istringstream short_row("image,x,y,w,h,score\na,1,2,3\n");
    CHECK_THROWS_AS(read_detections_csv(short_row), DataError);
}

TEST_CASE("roc and envelope csv round trip") {
    const std::vector<RocPoint> roc{{0, 0.25, 3.5}, {4, 0.75, -0.125}};
    std::stringstream ss;
    write_roc_csv(ss, roc);
    CHECK(ss.str().rfind("threshold,false_positives,true_positive_rate\n", 0) == 0);
    CHECK(read_roc_csv(ss) == roc);

    const std::vector<EnvelopePoint> env{{0, 0.1, 0.2, 0.3}, {10, 0.5, 0.6, 0.7}};
    std::stringstream es;
    write_envelope_csv(es, env);
    CHECK(es.str().rfind("fp,min_tpr,mean_tpr,max_tpr\n", 0) == 0);
    const auto back = read_envelope_csv(es);
    REQUIRE(back.size() == 2);
    CHECK(back[1].false_positives == 10);
    CHECK(back[1].mean_tpr == 0.6);
}

TEST_CASE("csv splitting") {
    CHECK(split_csv_line("a,b,,c") == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(split_csv_line("") == std::vector<std::string>{""});
}
