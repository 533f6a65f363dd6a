#include "trackadapt/eval/annotations.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "trackadapt/errors.hpp"
#include "trackadapt/fileio.hpp"

namespace fs = std::filesystem;

namespace trackadapt::eval {

std::string to_string(AnnotationFormat f) { return f == AnnotationFormat::lasot ? "lasot" : "antiuav"; }

AnnotationFormat parse_format(const std::string& name) {
  if (name == "lasot") return AnnotationFormat::lasot;
  if (name == "antiuav") return AnnotationFormat::antiuav;
  throw ConfigError("unknown annotation format '" + name + "' (expected lasot|antiuav)");
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
  return lines;
}

std::vector<double> parse_numbers(const std::string& line, std::size_t line_no, const std::string& file) {
  std::vector<double> out;
  std::string field;
  std::istringstream ls(line);
  const char sep = line.find(',') != std::string::npos ? ',' : (line.find('\t') != std::string::npos ? '\t' : ' ');
  while (std::getline(ls, field, sep)) {
    const auto b = field.find_first_not_of(" \t");
    if (b == std::string::npos) {
      if (sep == ' ') continue;
      throw ParseError(file + ": empty field", line_no);
    }
    const auto e = field.find_last_not_of(" \t");
    const std::string f = field.substr(b, e - b + 1);
    char* end = nullptr;
    const double v = std::strtod(f.c_str(), &end);
    if (end == f.c_str() || *end != '\0') throw ParseError(file + ": not a number '" + f + "'", line_no);
    out.push_back(v);
  }
  return out;
}

MaybeBox box_from_top_left(const std::vector<double>& v, std::size_t line_no, const std::string& file) {
  if (v.size() != 4) {
    throw ParseError(file + ": expected 4 values (x,y,w,h), got " + std::to_string(v.size()), line_no);
  }
  if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) return std::nullopt;
  if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2]) || !std::isfinite(v[3])) {
    throw ParseError(file + ": non-finite box value", line_no);
  }
  if (v[2] < 0.0 || v[3] < 0.0) throw ParseError(file + ": negative box size", line_no);
  if (v[2] == 0.0 || v[3] == 0.0) return std::nullopt;
  return BoundingBox::from_top_left(v[0], v[1], v[2], v[3]);
}

std::vector<int> read_flags(const fs::path& path) {
  const std::string text = read_file(path);
  std::vector<int> flags;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    for (double v : parse_numbers(lines[i], i + 1, path.filename().string())) {
      if (v != 0.0 && v != 1.0) throw ParseError(path.filename().string() + ": flags must be 0 or 1", i + 1);
      flags.push_back(static_cast<int>(v));
    }
  }
  return flags;
}

void finish(TrajectoryAnnotation& t) {
  if (std::none_of(t.frames.begin(), t.frames.end(), [](const MaybeBox& b) { return b.has_value(); })) {
    throw ParseError("sequence '" + t.id + "' has no visible frame");
  }
  t.image = extent_of(t.frames);
}

}  // namespace

TrajectoryAnnotation parse_lasot(const fs::path& path) {
  const fs::path dir = fs::is_directory(path) ? path : path.parent_path();
  const fs::path gt = fs::is_directory(path) ? path / "groundtruth.txt" : path;
  if (!fs::exists(gt)) throw ConfigError("missing " + gt.string());
  TrajectoryAnnotation t;
  t.id = fs::is_directory(path) ? path.filename().string() : dir.filename().string();
  const auto lines = split_lines(read_file(gt));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    t.frames.push_back(box_from_top_left(parse_numbers(lines[i], i + 1, "groundtruth.txt"), i + 1, "groundtruth.txt"));
  }
  for (const char* name : {"full_occlusion.txt", "out_of_view.txt"}) {
    const fs::path fp = dir / name;
    if (!fs::exists(fp)) continue;
    const auto flags = read_flags(fp);
    if (flags.size() != t.frames.size()) {
      throw ParseError(std::string(name) + " has " + std::to_string(flags.size()) + " flags for " +
                       std::to_string(t.frames.size()) + " boxes");
    }
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i]) t.frames[i].reset();
    }
  }
  finish(t);
  return t;
}

TrajectoryAnnotation parse_antiuav(const fs::path& path) {
  fs::path file = path;
  if (fs::is_directory(path)) {
    file.clear();
    for (const char* name : {"IR_label.json", "RGB_label.json", "label.json"}) {
      if (fs::exists(path / name)) {
        file = path / name;
        break;
      }
    }
    if (file.empty()) {
      std::vector<fs::path> jsons;
      for (const auto& e : fs::directory_iterator(path)) {
        if (e.path().extension() == ".json") jsons.push_back(e.path());
      }
      if (jsons.size() != 1) throw ConfigError("no unique label JSON in " + path.string());
      file = jsons.front();
    }
  }
  if (!fs::exists(file)) throw ConfigError("missing " + file.string());
  TrajectoryAnnotation t;
  t.id = fs::is_directory(path) ? path.filename().string() : file.stem().string();
  const std::string text = read_file(file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte offset -> line number
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n')) + 1;
    throw ParseError(file.filename().string() + ": malformed JSON", line);
  }
  if (!j.is_object() || !j.contains("exist") || !j.contains("gt_rect") || !j["exist"].is_array() ||
      !j["gt_rect"].is_array()) {
    throw ParseError(file.filename().string() + ": expected arrays 'exist' and 'gt_rect'");
  }
  const auto& exist = j["exist"];
  const auto& rects = j["gt_rect"];
  if (exist.size() != rects.size()) {
    throw ParseError(file.filename().string() + ": " + std::to_string(exist.size()) + " exist flags for " +
                     std::to_string(rects.size()) + " boxes");
  }
  for (std::size_t i = 0; i < exist.size(); ++i) {
    const std::string where = file.filename().string() + " record " + std::to_string(i);
    if (!exist[i].is_number()) throw ParseError(where + ": exist flag is not a number");
    const bool present = exist[i].get<double>() != 0.0;
    const auto& r = rects[i];
    if (!r.is_array()) throw ParseError(where + ": gt_rect entry is not an array");
    if (!present || r.empty()) {
      t.frames.emplace_back(std::nullopt);
      continue;
    }
    std::vector<double> v;
    for (const auto& x : r) {
      if (!x.is_number()) throw ParseError(where + ": gt_rect holds a non-number");
      v.push_back(x.get<double>());
    }
    t.frames.push_back(box_from_top_left(v, 0, where));
  }
  finish(t);
  return t;
}

TrajectoryAnnotation parse_annotations(const fs::path& path, AnnotationFormat format) {
  return format == AnnotationFormat::lasot ? parse_lasot(path) : parse_antiuav(path);
}

std::vector<TrajectoryAnnotation> load_annotation_dir(const fs::path& dir, AnnotationFormat format) {
  if (!fs::is_directory(dir)) throw ConfigError("annotation directory " + dir.string() + " does not exist");
  std::vector<fs::path> items;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) {
      items.push_back(e.path());
    } else if (format == AnnotationFormat::antiuav && e.path().extension() == ".json") {
      items.push_back(e.path());
    }
  }
  std::sort(items.begin(), items.end());
  std::vector<TrajectoryAnnotation> out;
  for (const auto& p : items) out.push_back(parse_annotations(p, format));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string flag_line(const TrajectoryAnnotation& t) {
  std::string s;
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    if (i) s += ',';
    s += t.frames[i] ? '0' : '1';
  }
  return s + "\n";
}

}  // namespace

void write_lasot(const fs::path& dir, const TrajectoryAnnotation& traj) {
  const fs::path seq = dir / traj.id;
  write_file_atomic(seq / "groundtruth.txt", format_predictions(traj.frames));
  write_file_atomic(seq / "full_occlusion.txt", flag_line(traj));
  std::string zeros;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) zeros += i ? ",0" : "0";
  write_file_atomic(seq / "out_of_view.txt", zeros + "\n");
}

std::vector<MaybeBox> read_predictions(const fs::path& path) {
  const std::string name = path.filename().string();
  const auto lines = split_lines(read_file(path));
  std::vector<MaybeBox> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.push_back(box_from_top_left(parse_numbers(lines[i], i + 1, name), i + 1, name));
  }
  return out;
}

std::string format_predictions(std::span<const MaybeBox> boxes) {
  std::string out;
  for (const auto& b : boxes) {
    if (!b) {
      out += "0,0,0,0\n";
      continue;
    }
    out += fmt(b->left()) + "," + fmt(b->top()) + "," + fmt(b->w()) + "," + fmt(b->h()) + "\n";
  }
  return out;
}

}  // namespace trackadapt::eval
