#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gadaboost/box.hpp"
#include "gadaboost/cascade.hpp"
#include "gadaboost/detect.hpp"
#include "gadaboost/eval.hpp"
#include "gadaboost/haar.hpp"

namespace gadaboost {

/// Malformed or unreadable input data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary 8-bit PGM (P5).
GrayImage read_pgm(const std::filesystem::path& path);
GrayImage read_pgm(std::istream& in);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);
void write_pgm(std::ostream& out, const GrayImage& img);

/// Shortest decimal form that parses back to the same double; "inf"/"-inf".
std::string format_double(double v);
double parse_double(std::string_view text);

// Model file, format "gadaboost-cascade 1":
//   gadaboost-cascade 1
//   window <width> <height>
//   stages <count>
//   stage <index> <stump count> <threshold>
//   <type code> <x> <y> <x1> <y1> <threshold> <left value> <right value>   (one line per stump)
void write_cascade(std::ostream& out, const Cascade& c);
Cascade read_cascade(std::istream& in);
void save_cascade(const std::filesystem::path& path, const Cascade& c);
Cascade load_cascade(const std::filesystem::path& path);

/// One annotated image: `path n x y w h [x y w h ...]`.
struct AnnotationRecord {
    std::string image;
    std::vector<Box> boxes;

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

std::vector<AnnotationRecord> read_annotations(std::istream& in);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const std::vector<AnnotationRecord>& records);
std::vector<GroundTruthBox> ground_truth(const std::vector<AnnotationRecord>& records);

/// Square face box from eye centres, taking the eye distance as half the
/// face width and the eyes at 40% of the box height.
Box box_from_eyes(double left_x, double left_y, double right_x, double right_y);

// Detections CSV: header `image,x,y,w,h,score`.
void write_detections_csv(std::ostream& out, const std::vector<ScoredDetection>& detections);
std::vector<ScoredDetection> read_detections_csv(std::istream& in);

// ROC CSV: header `threshold,false_positives,true_positive_rate`.
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points);
std::vector<RocPoint> read_roc_csv(std::istream& in);

// Aggregate CSV: header `fp,min_tpr,mean_tpr,max_tpr`.
void write_envelope_csv(std::ostream& out, const std::vector<EnvelopePoint>& points);
std::vector<EnvelopePoint> read_envelope_csv(std::istream& in);

/// Splits one CSV line on commas; no quoting.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace gadaboost
