#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trackadapt/trajectory.hpp"

namespace trackadapt::eval {

enum class AnnotationFormat { lasot, antiuav };

std::string to_string(AnnotationFormat f);
AnnotationFormat parse_format(const std::string& name);  // ConfigError

// LaSOT layout: "<seq>/groundtruth.txt" with one "x,y,w,h" (top-left) line per
// frame, plus optional single-line comma-separated full_occlusion.txt and
// out_of_view.txt flags. A frame is absent if either flag is 1 or its box has
// zero area. `path` may be the sequence directory or its groundtruth.txt.
TrajectoryAnnotation parse_lasot(const std::filesystem::path& path);

// Anti-UAV layout: a JSON object with "exist" (0/1 per frame) and "gt_rect"
// ([x, y, w, h] top-left, or [] when absent). `path` is the JSON file or a
// directory holding IR_label.json / RGB_label.json / a single *.json file.
TrajectoryAnnotation parse_antiuav(const std::filesystem::path& path);

// ParseError naming the line for malformed content; ConfigError for missing files.
TrajectoryAnnotation parse_annotations(const std::filesystem::path& path, AnnotationFormat format);

// Every sequence under a directory, sorted by id. Sequence ids are directory
// names (or JSON file stems for top-level Anti-UAV files). The image size is
// taken from the box extents since neither format stores it.
std::vector<TrajectoryAnnotation> load_annotation_dir(const std::filesystem::path& dir, AnnotationFormat format);

// Writes "<dir>/<id>/groundtruth.txt" (+ full_occlusion.txt, out_of_view.txt) atomically.
void write_lasot(const std::filesystem::path& dir, const TrajectoryAnnotation& traj);

// Prediction files: one "x,y,w,h" top-left line per frame; "0,0,0,0" (any
// zero-area box) or "nan,nan,nan,nan" stands for an empty prediction.
std::vector<MaybeBox> read_predictions(const std::filesystem::path& path);
std::string format_predictions(std::span<const MaybeBox> boxes);

}  // namespace trackadapt::eval
