#include "trackadapt/weights_io.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trackadapt/errors.hpp"
#include "trackadapt/fileio.hpp"

namespace trackadapt {

namespace {

constexpr const char* kMagic = "TRKW";
constexpr int kVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::istream& is) : is_(is) {}

  // Next "key value" line; ParseError if the key differs.
  std::string field(const std::string& key) {
    std::string line = next();
    std::istringstream ls(line);
    std::string k, v;
    ls >> k >> v;
    if (k != key || v.empty()) throw ParseError("expected '" + key + " <value>', got '" + line + "'", line_);
    return v;
  }

  int int_field(const std::string& key) {
    const std::string v = field(key);
    char* end = nullptr;
    const long n = std::strtol(v.c_str(), &end, 10);
    if (*end != '\0') throw ParseError("'" + key + "' is not an integer: " + v, line_);
    return static_cast<int>(n);
  }

  double number() {
    const std::string line = next();
    char* end = nullptr;
    const double d = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0') throw ParseError("bad parameter value '" + line + "'", line_);
    return d;
  }

  std::string next() {
    std::string line;
    if (!std::getline(is_, line)) throw ParseError("unexpected end of weights file", line_ + 1);
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  int line() const { return line_; }

 private:
  std::istream& is_;
  int line_ = 0;
};

}  // namespace

void write_weights(std::ostream& os, const WeightsFile& w) {
  os << kMagic << ' ' << kVersion << '\n';
  os << "arch " << to_string(w.arch) << '\n';
  os << "context " << w.context << '\n';
  os << "normalized " << (w.normalized ? 1 : 0) << '\n';
  if (w.arch == PredictorArch::kf || w.arch == PredictorArch::ekf) {
    os << "params 0\n";
    return;
  }
  if (!w.net || w.net->arch() != w.arch) throw ConfigError("weights file arch does not match the network");
  if (const auto* lstm = dynamic_cast<const LstmPredictor*>(w.net.get())) {
    os << "layers " << lstm->layers() << '\n' << "hidden " << lstm->hidden() << '\n';
  } else if (const auto* mlp = dynamic_cast<const MlpPredictor*>(w.net.get())) {
    os << "hidden1 " << mlp->hidden1() << '\n' << "hidden2 " << mlp->hidden2() << '\n';
  }
  const auto p = w.net->parameters();
  os << "params " << p.size() << '\n';
  os << std::hexfloat;
  for (double v : p) os << v << '\n';
  os << std::defaultfloat;
}

WeightsFile read_weights(std::istream& is) {
  LineReader r(is);
  {
    const std::string header = r.next();
    if (header != std::string(kMagic) + " " + std::to_string(kVersion)) {
      throw ParseError("not a version " + std::to_string(kVersion) + " weights file: '" + header + "'", r.line());
    }
  }
  WeightsFile w;
  try {
    w.arch = parse_arch(r.field("arch"));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), r.line());
  }
  w.context = r.int_field("context");
  if (w.context < 1) throw ParseError("context must be positive", r.line());
  w.normalized = r.int_field("normalized") != 0;

  std::size_t expected = 0;
  switch (w.arch) {
    case PredictorArch::kf:
    case PredictorArch::ekf: break;
    case PredictorArch::lstm: {
      const int layers = r.int_field("layers");
      const int hidden = r.int_field("hidden");
      if (layers < 1 || hidden < 1) throw ParseError("LSTM dimensions must be positive", r.line());
      w.net = std::make_shared<LstmPredictor>(w.context, layers, hidden);
      break;
    }
    case PredictorArch::mlp: {
      const int h1 = r.int_field("hidden1");
      const int h2 = r.int_field("hidden2");
      if (h1 < 1 || h2 < 1) throw ParseError("MLP dimensions must be positive", r.line());
      w.net = std::make_shared<MlpPredictor>(w.context, h1, h2);
      break;
    }
  }
  if (w.net) expected = w.net->parameter_count();
  const int n = r.int_field("params");
  if (n < 0 || static_cast<std::size_t>(n) != expected) {
    throw ParseError("expected " + std::to_string(expected) + " parameters, file declares " + std::to_string(n),
                     r.line());
  }
  if (w.net) {
    std::vector<double> p(expected);
    for (auto& v : p) v = r.number();
    w.net->set_parameters(p);
  }
  return w;
}

void save_weights(const std::filesystem::path& path, const WeightsFile& w) {
  std::ostringstream os;
  write_weights(os, w);
  write_file_atomic(path, os.str());
}

WeightsFile load_weights(const std::filesystem::path& path) {
  std::istringstream is(read_file(path));
  return read_weights(is);
}

}  // namespace trackadapt
