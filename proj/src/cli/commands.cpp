#include "trackadapt/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "trackadapt/config.hpp"
#include "trackadapt/errors.hpp"
#include "trackadapt/eval/annotations.hpp"
#include "trackadapt/eval/metrics.hpp"
#include "trackadapt/eval/report.hpp"
#include "trackadapt/fileio.hpp"
#include "trackadapt/nonlinearity.hpp"
#include "trackadapt/parallel.hpp"
#include "trackadapt/predictor.hpp"
#include "trackadapt/sim/motion_script.hpp"
#include "trackadapt/sim/suite.hpp"
#include "trackadapt/sim/tracker.hpp"
#include "trackadapt/training.hpp"
#include "trackadapt/weights_io.hpp"

namespace fs = std::filesystem;

namespace trackadapt {

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
  auto log = spdlog::get("trackadapt");
  if (!log) log = spdlog::stderr_color_mt("trackadapt");
  log->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("TRACKADAPT_LOG_LEVEL")) level = spdlog::level::from_str(env);
  log->set_level(level);
  return log;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- train-mp ----

struct TrainArgs {
  std::string data;
  std::string format = "lasot";
  std::string config;
  std::string out;
  std::optional<std::string> arch, box_loss;
  std::optional<int> context, epochs, batch_size;
  std::optional<double> lambda1, lambda2, lr;
  std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a, spdlog::logger& log) {
  TrainingConfig cfg;
  if (!a.config.empty()) cfg = parse_training_config(read_file(a.config));
  if (a.arch) cfg.arch = parse_arch(*a.arch);
  if (a.box_loss) cfg.box_loss = parse_box_loss(*a.box_loss);
  if (a.context) cfg.context = *a.context;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.lambda1) cfg.lambda1 = *a.lambda1;
  if (a.lambda2) cfg.lambda2 = *a.lambda2;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();

  const auto trajs = eval::load_annotation_dir(a.data, eval::parse_format(a.format));
  const auto samples = build_training_set(trajs, cfg.context);
  log.info("training {} on {} windows from {} sequences", to_string(cfg.arch), samples.size(), trajs.size());
  TrainingResult r = train_mp(samples, cfg);

  std::string table = "epoch\tloss\n";
  for (std::size_t e = 0; e < r.epoch_loss.size(); ++e) {
    table += std::to_string(e + 1) + "\t" + fixed(r.epoch_loss[e], 8) + "\n";
    log.debug("epoch {} loss {:.8f}", e + 1, r.epoch_loss[e]);
  }
  std::shared_ptr<SequenceNet> net = std::move(r.net);
  WeightsFile w{cfg.arch, cfg.context, true, net};
  save_weights(a.out, w);
  write_file_atomic(a.out + ".loss.tsv", table);

  LearnedPredictor pred(net);
  const OneStepStats s = one_step_accuracy(pred, trajs);
  log.info("final loss {:.6f}, mean one-step IoU {:.4f} over {} frames", r.epoch_loss.back(), s.mean_iou, s.frames);
  return kExitOk;
}

// ---- simulate ----

struct SimArgs {
  std::string scenario;
  bool standard = false;
  std::string config;
  std::string out;
  std::optional<std::string> predictor, weights;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool no_mp = false, no_edrm = false, no_tamb = false;
  bool dump_config = false;
  std::string dump_suite;
};

std::vector<sim::Scenario> load_scenarios(const SimArgs& a) {
  std::vector<sim::Scenario> out;
  if (a.standard) {
    out = sim::standard_suite(a.seed.value_or(7));
    return out;
  }
  if (a.scenario.empty()) throw ConfigError("give --scenario or --standard-suite");
  std::vector<fs::path> files;
  if (fs::is_directory(a.scenario)) {
    for (const auto& e : fs::directory_iterator(a.scenario)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(a.scenario)) {
    files.push_back(a.scenario);
  } else {
    throw ConfigError("scenario path " + a.scenario + " does not exist");
  }
  for (const auto& f : files) {
    sim::Scenario sc = sim::load_scenario(f);
    if (a.seed) {
      sc.seed = *a.seed;
      sc.build();
    }
    out.push_back(std::move(sc));
  }
  return out;
}

int cmd_simulate(const SimArgs& a, std::ostream& out, spdlog::logger& log) {
  TrackerConfig cfg;
  if (!a.config.empty()) cfg = parse_tracker_config(read_file(a.config));
  if (a.predictor) cfg.predictor = parse_arch(*a.predictor);
  if (a.weights) cfg.weights = *a.weights;
  if (a.no_mp) cfg.enable.mp = false;
  if (a.no_edrm) cfg.enable.edrm = false;
  if (a.no_tamb) cfg.enable.tamb = false;
  cfg.validate();

  if (a.dump_config) {
    out << to_json_string(cfg);
    return kExitOk;
  }
  if (!a.dump_suite.empty()) {
    for (const auto& sc : sim::standard_suite(a.seed.value_or(7))) {
      write_file_atomic(fs::path(a.dump_suite) / (sc.id + ".json"), sim::scenario_to_string(sc));
    }
    log.info("wrote the standard suite to {}", a.dump_suite);
    return kExitOk;
  }
  if (a.out.empty()) throw ConfigError("--out is required");

  std::shared_ptr<const SequenceNet> net;
  if (cfg.enable.mp && (cfg.predictor == PredictorArch::mlp || cfg.predictor == PredictorArch::lstm)) {
    WeightsFile w = load_weights(cfg.weights);
    if (w.arch != cfg.predictor) {
      throw ConfigError("weights file holds " + to_string(w.arch) + ", config asks for " + to_string(cfg.predictor));
    }
    net = w.net;
  }

  const auto scenarios = load_scenarios(a);
  std::set<std::string> ids;
  for (const auto& sc : scenarios) {
    if (!ids.insert(sc.id).second) throw ConfigError("duplicate scenario id '" + sc.id + "'");
  }
  std::vector<sim::TrackResult> results(scenarios.size());
  parallel_for(scenarios.size(), a.jobs, [&](std::size_t i) { results[i] = sim::run_tracker(scenarios[i], cfg, net); });

  const fs::path root(a.out);
  std::vector<eval::SequenceMetrics> metrics;
  std::string summary = "id\tmean_iou\tflags\tframes\n";
  double iou_sum = 0.0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& sc = scenarios[i];
    const auto& r = results[i];
    write_file_atomic(root / "traces" / (sc.id + ".jsonl"), sim::trace_to_jsonl(r));
    write_file_atomic(root / "predictions" / (sc.id + ".txt"), eval::format_predictions(r.outputs));
    eval::write_lasot(root / "annotations", sc.ground_truth);
    metrics.push_back(eval::evaluate({sc.id, r.outputs, sc.ground_truth.frames}));
    const double m = sim::mean_output_iou(r, sc);
    iou_sum += m;
    summary += sc.id + "\t" + fixed(m) + "\t" + std::to_string(r.flag_count()) + "\t" + std::to_string(sc.frames) + "\n";
    log.info("{}: mean IoU {:.4f}, {} EDRM flags", sc.id, m, r.flag_count());
  }
  if (!scenarios.empty()) {
    summary += "ALL\t" + fixed(iou_sum / static_cast<double>(scenarios.size())) + "\t-\t-\n";
  }
  write_file_atomic(root / "summary.tsv", summary);
  write_file_atomic(root / "metrics.tsv", eval::format_metrics_table(metrics));
  write_file_atomic(root / "config.json", to_json_string(cfg));
  return kExitOk;
}

// ---- eval ----

struct EvalArgs {
  std::string predictions;
  std::string annotations;
  std::string format = "lasot";
  std::string split;
  std::string out;
  int jobs = 1;
};

std::vector<std::string> read_id_list(const fs::path& path) {
  std::vector<std::string> ids;
  std::istringstream is(read_file(path));
  std::string line;
  while (std::getline(is, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(b, e - b + 1));
  }
  return ids;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, spdlog::logger& log) {
  if (!fs::is_directory(a.predictions)) throw ConfigError("prediction directory " + a.predictions + " does not exist");
  auto annotations = eval::load_annotation_dir(a.annotations, eval::parse_format(a.format));
  if (!a.split.empty()) {
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < annotations.size(); ++i) by_id[annotations[i].id] = i;
    std::vector<TrajectoryAnnotation> kept;
    for (const auto& id : read_id_list(a.split)) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        log.warn("split lists unknown sequence '{}', skipped", id);
        continue;
      }
      kept.push_back(annotations[it->second]);
    }
    annotations = std::move(kept);
  }

  std::vector<eval::SequenceResult> seqs;
  for (const auto& ann : annotations) {
    const fs::path pf = fs::path(a.predictions) / (ann.id + ".txt");
    if (!fs::exists(pf)) {
      log.warn("no predictions for '{}', skipped", ann.id);
      continue;
    }
    eval::SequenceResult r{ann.id, eval::read_predictions(pf), ann.frames};
    if (r.predictions.size() != r.ground_truth.size()) {
      throw ParseError(pf.string() + " has " + std::to_string(r.predictions.size()) + " lines for " +
                       std::to_string(r.ground_truth.size()) + " frames");
    }
    if (r.visible_count() == 0) {
      log.warn("sequence '{}' has no visible frame, skipped", ann.id);
      continue;
    }
    seqs.push_back(std::move(r));
  }

  std::vector<eval::SequenceMetrics> rows(seqs.size());
  parallel_for(seqs.size(), a.jobs, [&](std::size_t i) { rows[i] = eval::evaluate(seqs[i]); });
  const std::string table = eval::format_metrics_table(rows);
  const std::string plot = eval::format_success_plot(eval::mean_success_curve(seqs));
  if (a.out.empty()) {
    out << table;
  } else {
    write_file_atomic(fs::path(a.out) / "metrics.tsv", table);
    write_file_atomic(fs::path(a.out) / "success_plot.csv", plot);
  }
  log.info("evaluated {} sequences", seqs.size());
  return kExitOk;
}

// ---- split ----

struct SplitArgs {
  std::string annotations;
  std::string format = "lasot";
  std::string config;
  std::string out_linear, out_nonlinear;
  std::optional<double> accel, angle, jerk, frac;
};

int cmd_split(const SplitArgs& a, spdlog::logger& log) {
  NonlinConfig cfg;
  if (!a.config.empty()) cfg = parse_nonlin_config(read_file(a.config));
  if (a.accel) cfg.accel_mag_thresh = *a.accel;
  if (a.angle) cfg.angle_dev_thresh = *a.angle;
  if (a.jerk) cfg.jerk_thresh = *a.jerk;
  if (a.frac) cfg.video_frac_thresh = *a.frac;
  cfg.validate();
  const auto trajs = eval::load_annotation_dir(a.annotations, eval::parse_format(a.format));
  const DatasetSplit s = split_dataset(trajs, cfg);
  auto lines = [](const std::vector<std::string>& ids) {
    std::string t;
    for (const auto& id : ids) t += id + "\n";
    return t;
  };
  write_file_atomic(a.out_linear, lines(s.linear));
  write_file_atomic(a.out_nonlinear, lines(s.nonlinear));
  log.info("{} linear, {} nonlinear sequences", s.linear.size(), s.nonlinear.size());
  return kExitOk;
}

// ---- synth-corpus ----

struct CorpusArgs {
  std::string kind = "mixed";
  int count = 20;
  int frames = 120;
  std::uint64_t seed = 1;
  std::string out;
  std::string prefix = "seq";
};

int cmd_corpus(const CorpusArgs& a, spdlog::logger& log) {
  sim::CorpusKind kind = sim::CorpusKind::mixed;
  if (a.kind == "linear") {
    kind = sim::CorpusKind::linear;
  } else if (a.kind == "nonlinear") {
    kind = sim::CorpusKind::nonlinear;
  } else if (a.kind != "mixed") {
    throw ConfigError("unknown corpus kind '" + a.kind + "' (expected linear|nonlinear|mixed)");
  }
  if (a.count < 0 || a.frames < 4) throw ConfigError("corpus needs count >= 0 and frames >= 4");
  for (const auto& t : sim::synthetic_corpus(kind, a.count, a.frames, a.seed, {256.0, 256.0}, a.prefix)) {
    eval::write_lasot(a.out, t);
  }
  log.info("wrote {} {} trajectories to {}", a.count, a.kind, a.out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out) {
  auto log = make_logger();
  CLI::App app{"Motion-aware tracking adaptation toolkit", "trackadapt"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train-mp", "Train a learned motion predictor on box trajectories");
  train->add_option("--data", ta.data, "Annotation directory")->required()->check(CLI::ExistingDirectory);
  train->add_option("--format", ta.format, "Annotation format: lasot|antiuav")->capture_default_str();
  train->add_option("--config", ta.config, "Training config JSON")->check(CLI::ExistingFile);
  train->add_option("--out", ta.out, "Output weights file")->required();
  train->add_option("--arch", ta.arch, "Override: mlp|lstm");
  train->add_option("--context", ta.context, "Override: context length k");
  train->add_option("--epochs", ta.epochs, "Override: epoch count");
  train->add_option("--batch-size", ta.batch_size, "Override: mini-batch size");
  train->add_option("--lambda1", ta.lambda1, "Override: MSE weight");
  train->add_option("--lambda2", ta.lambda2, "Override: box-loss weight");
  train->add_option("--box-loss", ta.box_loss, "Override: iou|diou|ciou");
  train->add_option("--lr", ta.lr, "Override: learning rate");
  train->add_option("--seed", ta.seed, "Override: random seed");

  SimArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run the tracker on simulated scenarios");
  simulate->add_option("--scenario", sa.scenario, "Scenario JSON file or directory of them");
  simulate->add_flag("--standard-suite", sa.standard, "Use the built-in 13-scenario suite");
  simulate->add_option("--config", sa.config, "Tracker config JSON")->check(CLI::ExistingFile);
  simulate->add_option("--out", sa.out, "Output directory for traces and metrics");
  simulate->add_option("--predictor", sa.predictor, "Override: kf|ekf|mlp|lstm");
  simulate->add_option("--weights", sa.weights, "Override: weights file for mlp|lstm");
  simulate->add_option("--seed", sa.seed, "Seed of the standard suite, or override for scenario files");
  simulate->add_option("--jobs", sa.jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  simulate->add_flag("--no-mp", sa.no_mp, "Disable the motion predictor (pure S_IoU selection)");
  simulate->add_flag("--no-edrm", sa.no_edrm, "Disable error detection and recovery");
  simulate->add_flag("--no-tamb", sa.no_tamb, "Use FIFO memory instead of the target-aware bank");
  simulate->add_flag("--dump-config", sa.dump_config, "Print the effective tracker config and exit");
  simulate->add_option("--dump-suite", sa.dump_suite, "Write the standard suite scenarios to this directory and exit");

  EvalArgs ea;
  auto* evaluate = app.add_subcommand("eval", "Score predictions against annotations");
  evaluate->add_option("--predictions", ea.predictions, "Directory of <id>.txt prediction files")->required();
  evaluate->add_option("--annotations", ea.annotations, "Annotation directory")->required();
  evaluate->add_option("--format", ea.format, "Annotation format: lasot|antiuav")->capture_default_str();
  evaluate->add_option("--split", ea.split, "Restrict to the ids listed in this file")->check(CLI::ExistingFile);
  evaluate->add_option("--out", ea.out, "Write metrics.tsv and success_plot.csv here instead of stdout");
  evaluate->add_option("--jobs", ea.jobs, "Sequences scored in parallel")->check(CLI::PositiveNumber);

  SplitArgs pa;
  auto* split = app.add_subcommand("split", "Split sequences into linear and nonlinear motion subsets");
  split->add_option("--annotations", pa.annotations, "Annotation directory")->required();
  split->add_option("--format", pa.format, "Annotation format: lasot|antiuav")->capture_default_str();
  split->add_option("--config", pa.config, "Threshold config JSON")->check(CLI::ExistingFile);
  split->add_option("--out-linear", pa.out_linear, "Output id list of linear sequences")->required();
  split->add_option("--out-nonlinear", pa.out_nonlinear, "Output id list of nonlinear sequences")->required();
  split->add_option("--accel", pa.accel, "Override: acceleration threshold, px/frame^2");
  split->add_option("--angle", pa.angle, "Override: angle deviation threshold, rad/frame");
  split->add_option("--jerk", pa.jerk, "Override: jerk threshold, px/frame^3");
  split->add_option("--frac", pa.frac, "Override: nonlinear frame fraction for a nonlinear video");

  CorpusArgs ca;
  auto* corpus = app.add_subcommand("synth-corpus", "Write synthetic trajectories in LaSOT layout");
  corpus->add_option("--kind", ca.kind, "linear|nonlinear|mixed")->capture_default_str();
  corpus->add_option("--count", ca.count, "Number of sequences")->capture_default_str();
  corpus->add_option("--frames", ca.frames, "Frames per sequence")->capture_default_str();
  corpus->add_option("--seed", ca.seed, "Random seed")->capture_default_str();
  corpus->add_option("--prefix", ca.prefix, "Sequence id prefix")->capture_default_str();
  corpus->add_option("--out", ca.out, "Output directory")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream err;
    const int code = app.exit(e, out, err);
    if (!err.str().empty()) log->error("{}", err.str());
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(ta, *log);
    if (*simulate) return cmd_simulate(sa, out, *log);
    if (*evaluate) {
      if (!fs::is_directory(ea.annotations)) throw ConfigError("annotation directory " + ea.annotations + " does not exist");
      return cmd_eval(ea, out, *log);
    }
    if (*split) return cmd_split(pa, *log);
    if (*corpus) return cmd_corpus(ca, *log);
  } catch (const ConfigError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace trackadapt
