#include "gadaboost/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gadaboost {

namespace {

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

int parse_int(std::string_view text, const char* what) {
    int v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw DataError(std::string("expected integer for ") + what + ", got '" + std::string(text) + "'");
    }
    return v;
}

template <class T>
T read_value(std::istringstream& line, const char* what) {
    std::string tok;
    if (!(line >> tok)) {
        throw DataError(std::string("missing ") + what);
    }
    if constexpr (std::is_same_v<T, double>) {
        return parse_double(tok);
    } else {
        return parse_int(tok, what);
    }
}

void expect_word(std::istringstream& line, std::string_view word) {
    std::string tok;
    if (!(line >> tok) || tok != word) {
        throw DataError("model file: expected '" + std::string(word) + "'");
    }
}

std::istringstream next_line(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.find_first_not_of(" \t\r") != std::string::npos) {
            return std::istringstream(line);
        }
    }
    throw DataError(std::string("unexpected end of input reading ") + what);
}

void check_name(const std::string& name) {
    if (name.find_first_of(",\n") != std::string::npos) {
        throw DataError("image name contains a comma or newline: " + name);
    }
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
    if (pgm_token(in) != "P5") {
        throw DataError("not a binary PGM (P5) image");
    }
    const int width = parse_int(pgm_token(in), "PGM width");
    const int height = parse_int(pgm_token(in), "PGM height");
    const int maxval = parse_int(pgm_token(in), "PGM maxval");
    if (width < 1 || height < 1 || width > 1 << 15 || height > 1 << 15) {
        throw DataError("PGM dimensions out of range");
    }
    if (maxval < 1 || maxval > 255) {
        throw DataError("only 8-bit PGM images are supported");
    }
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (in.gcount() != static_cast<std::streamsize>(data.size())) {
        throw DataError("truncated PGM pixel data");
    }
    if (maxval != 255) {
        for (auto& p : data) {
            p = static_cast<std::uint8_t>(std::min(255, p * 255 / maxval));
        }
    }
    return GrayImage(width, height, std::move(data));
}

GrayImage read_pgm(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    try {
        return read_pgm(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_pgm(std::ostream& out, const GrayImage& img) {
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    const auto px = img.pixels();
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    auto out = open_out(path, std::ios::binary);
    write_pgm(out, img);
}

std::string format_double(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw DataError("expected number, got '" + std::string(text) + "'");
    }
    return v;
}

void write_cascade(std::ostream& out, const Cascade& c) {
    out << "gadaboost-cascade 1\n";
    out << "window " << c.window.width << ' ' << c.window.height << '\n';
    out << "stages " << c.stages.size() << '\n';
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const Stage& s = c.stages[k];
        out << "stage " << k << ' ' << s.stumps.size() << ' ' << format_double(s.threshold) << '\n';
        for (const auto& st : s.stumps) {
            const HaarFeature& f = st.feature;
            out << type_code(f.type) << ' ' << f.x << ' ' << f.y << ' ' << f.x1 << ' ' << f.y1 << ' '
                << format_double(st.threshold) << ' ' << format_double(st.left_value) << ' '
                << format_double(st.right_value) << '\n';
        }
    }
}

Cascade read_cascade(std::istream& in) {
    Cascade c;
    {
        auto line = next_line(in, "model header");
        expect_word(line, "gadaboost-cascade");
        if (read_value<int>(line, "format version") != 1) {
            throw DataError("model file: unsupported format version");
        }
    }
    {
        auto line = next_line(in, "window");
        expect_word(line, "window");
        c.window.width = read_value<int>(line, "window width");
        c.window.height = read_value<int>(line, "window height");
        if (c.window.width < 1 || c.window.height < 1) {
            throw DataError("model file: bad window size");
        }
    }
    int stage_count = 0;
    {
        auto line = next_line(in, "stage count");
        expect_word(line, "stages");
        stage_count = read_value<int>(line, "stage count");
        if (stage_count < 1) {
            throw DataError("model file: a cascade needs at least one stage");
        }
    }
    for (int k = 0; k < stage_count; ++k) {
        auto line = next_line(in, "stage");
        expect_word(line, "stage");
        if (read_value<int>(line, "stage index") != k) {
            throw DataError("model file: stages out of order");
        }
        const int count = read_value<int>(line, "stump count");
        Stage stage;
        stage.threshold = read_value<double>(line, "stage threshold");
        if (count < 1) {
            throw DataError("model file: a stage needs at least one stump");
        }
        for (int j = 0; j < count; ++j) {
            auto sl = next_line(in, "stump");
            DecisionStump st;
            try {
                st.feature.type = haar_type_from_code(read_value<int>(sl, "type code"));
            } catch (const std::invalid_argument& e) {
                throw DataError(std::string("model file: ") + e.what());
            }
            st.feature.x = read_value<int>(sl, "x");
            st.feature.y = read_value<int>(sl, "y");
            st.feature.x1 = read_value<int>(sl, "x1");
            st.feature.y1 = read_value<int>(sl, "y1");
            st.threshold = read_value<double>(sl, "stump threshold");
            st.left_value = read_value<double>(sl, "left value");
            st.right_value = read_value<double>(sl, "right value");
            if (!is_valid(st.feature, c.window)) {
                throw DataError("model file: stump feature is not valid for the window");
            }
            stage.stumps.push_back(st);
        }
        c.stages.push_back(std::move(stage));
    }
    return c;
}

void save_cascade(const std::filesystem::path& path, const Cascade& c) {
    auto out = open_out(path);
    write_cascade(out, c);
}

Cascade load_cascade(const std::filesystem::path& path) {
    auto in = open_in(path);
    try {
        return read_cascade(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
    std::vector<AnnotationRecord> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (raw.empty() || raw.find_first_not_of(" \t\r") == std::string::npos || raw[0] == '#') {
            continue;
        }
        std::istringstream line(raw);
        AnnotationRecord rec;
        try {
            line >> rec.image;
            const int n = read_value<int>(line, "box count");
            if (n < 0) {
                throw DataError("negative box count");
            }
            for (int i = 0; i < n; ++i) {
                Box b;
                b.x = read_value<int>(line, "box x");
                b.y = read_value<int>(line, "box y");
                b.width = read_value<int>(line, "box width");
                b.height = read_value<int>(line, "box height");
                if (b.width <= 0 || b.height <= 0) {
                    throw DataError("box with non-positive size");
                }
                rec.boxes.push_back(b);
            }
        } catch (const DataError& e) {
            throw DataError("annotations line " + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_annotations(in);
}

void write_annotations(std::ostream& out, const std::vector<AnnotationRecord>& records) {
    for (const auto& r : records) {
        out << r.image << ' ' << r.boxes.size();
        for (const auto& b : r.boxes) {
            out << ' ' << b.x << ' ' << b.y << ' ' << b.width << ' ' << b.height;
        }
        out << '\n';
    }
}

std::vector<GroundTruthBox> ground_truth(const std::vector<AnnotationRecord>& records) {
    std::vector<GroundTruthBox> out;
    for (const auto& r : records) {
        for (const auto& b : r.boxes) {
            out.push_back({r.image, b});
        }
    }
    return out;
}

Box box_from_eyes(double left_x, double left_y, double right_x, double right_y) {
    const double eye_distance = std::hypot(right_x - left_x, right_y - left_y);
    if (!(eye_distance > 0.0)) {
        throw DataError("box_from_eyes: coincident eye coordinates");
    }
    const double side = 2.0 * eye_distance;
    const double cx = (left_x + right_x) / 2.0;
    const double cy = (left_y + right_y) / 2.0;
    const int s = static_cast<int>(std::lround(side));
    return {static_cast<int>(std::lround(cx - side / 2.0)), static_cast<int>(std::lround(cy - 0.4 * side)), s, s};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

namespace {

// Reads rows after a required header, each with `columns` fields.
template <class Fn>
void read_csv(std::istream& in, std::string_view header, std::size_t columns, Fn&& row) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("empty CSV: expected header '" + std::string(header) + "'");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw DataError("CSV header mismatch: expected '" + std::string(header) + "', got '" + line + "'");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != columns) {
            throw DataError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                            " fields");
        }
        try {
            row(fields);
        } catch (const DataError& e) {
            throw DataError("CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

}  // namespace

void write_detections_csv(std::ostream& out, const std::vector<ScoredDetection>& detections) {
    out << "image,x,y,w,h,score\n";
    for (const auto& d : detections) {
        check_name(d.image);
        out << d.image << ',' << d.box.x << ',' << d.box.y << ',' << d.box.width << ',' << d.box.height << ','
            << format_double(d.score) << '\n';
    }
}

std::vector<ScoredDetection> read_detections_csv(std::istream& in) {
    std::vector<ScoredDetection> out;
    read_csv(in, "image,x,y,w,h,score", 6, [&](const std::vector<std::string>& f) {
        ScoredDetection d;
        d.image = f[0];
        d.box = {parse_int(f[1], "x"), parse_int(f[2], "y"), parse_int(f[3], "w"), parse_int(f[4], "h")};
        d.score = parse_double(f[5]);
        out.push_back(std::move(d));
    });
    return out;
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points) {
    out << "threshold,false_positives,true_positive_rate\n";
    for (const auto& p : points) {
        out << format_double(p.threshold) << ',' << p.false_positives << ',' << format_double(p.true_positive_rate)
            << '\n';
    }
}

std::vector<RocPoint> read_roc_csv(std::istream& in) {
    std::vector<RocPoint> out;
    read_csv(in, "threshold,false_positives,true_positive_rate", 3, [&](const std::vector<std::string>& f) {
        out.push_back({parse_int(f[1], "false_positives"), parse_double(f[2]), parse_double(f[0])});
    });
    return out;
}

void write_envelope_csv(std::ostream& out, const std::vector<EnvelopePoint>& points) {
    out << "fp,min_tpr,mean_tpr,max_tpr\n";
    for (const auto& p : points) {
        out << p.false_positives << ',' << format_double(p.min_tpr) << ',' << format_double(p.mean_tpr) << ','
            << format_double(p.max_tpr) << '\n';
    }
}

std::vector<EnvelopePoint> read_envelope_csv(std::istream& in) {
    std::vector<EnvelopePoint> out;
    read_csv(in, "fp,min_tpr,mean_tpr,max_tpr", 4, [&](const std::vector<std::string>& f) {
        out.push_back({parse_int(f[0], "fp"), parse_double(f[1]), parse_double(f[2]), parse_double(f[3])});
    });
    return out;
}

}  // namespace gadaboost
