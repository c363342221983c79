#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gaitpipe/evaluation.hpp"
#include "gaitpipe/ingestion.hpp"
#include "gaitpipe/pipeline.hpp"
#include "gaitpipe/report_io.hpp"
#include "gaitpipe/synth.hpp"

namespace fs = std::filesystem;
using namespace gaitpipe;

namespace {

struct Overrides {
  std::string config;
  std::string format;
  std::optional<double> alpha;
  std::optional<int> kernel_width;
  std::string plane;
  std::optional<int> min_steps;
  std::string camera;
  std::string out;
  bool plots = false;
  std::optional<double> frame_rate;
  std::string track;
  std::string width_source;
  std::optional<double> min_confidence;
  bool no_dimension_filter = false;
  bool no_temporal_filter = false;
  std::optional<int> min_track_frames;
  std::optional<int> max_gap_frames;
  std::optional<int> period_days;
  std::optional<int> jobs;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "key = value config file; flags override it");
  app->add_option("--format", o.format, "auto | kinect | jsonl");
  app->add_option("--alpha", o.alpha, "false-extremum threshold fraction");
  app->add_option("--kernel-width", o.kernel_width, "odd smoothing window, frames");
  app->add_option("--plane", o.plane, "horizontal plane: xy | xz | yz");
  app->add_option("--min-steps", o.min_steps, "fewest steps that count as walking");
  app->add_option("--camera", o.camera, "camera config; input x,y,z are read as u,v,depth");
  app->add_option("--out", o.out, "output directory");
  app->add_flag("--plots", o.plots, "write <name>.distance.svg");
  app->add_option("--frame-rate", o.frame_rate, "frame rate override, Hz");
  app->add_option("--track", o.track, "analyze only this track id");
  app->add_option("--width-source", o.width_source, "raw | smoothed");
  app->add_option("--min-confidence", o.min_confidence, "joint confidence floor");
  app->add_flag("--no-dimension-filter", o.no_dimension_filter);
  app->add_flag("--no-temporal-filter", o.no_temporal_filter);
  app->add_option("--min-track-frames", o.min_track_frames);
  app->add_option("--max-gap-frames", o.max_gap_frames);
}

RunConfig build_config(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  KeyValueDoc flags;
  std::ostringstream kv;
  if (!o.format.empty()) kv << "format = " << o.format << '\n';
  if (o.alpha) kv << "alpha = " << format_double(*o.alpha) << '\n';
  if (o.kernel_width) kv << "kernel_width = " << *o.kernel_width << '\n';
  if (!o.plane.empty()) kv << "plane = " << o.plane << '\n';
  if (o.min_steps) kv << "min_steps = " << *o.min_steps << '\n';
  if (!o.camera.empty()) kv << "camera = " << o.camera << '\n';
  if (!o.out.empty()) kv << "out = " << o.out << '\n';
  if (o.plots) kv << "plots = true\n";
  if (o.frame_rate) kv << "frame_rate_hz = " << format_double(*o.frame_rate) << '\n';
  if (!o.track.empty()) kv << "track = " << o.track << '\n';
  if (!o.width_source.empty()) kv << "width_source = " << o.width_source << '\n';
  if (o.min_confidence) kv << "min_confidence = " << format_double(*o.min_confidence) << '\n';
  if (o.no_dimension_filter) kv << "dimension_filter = false\n";
  if (o.no_temporal_filter) kv << "temporal_filter = false\n";
  if (o.min_track_frames) kv << "min_track_frames = " << *o.min_track_frames << '\n';
  if (o.max_gap_frames) kv << "max_gap_frames = " << *o.max_gap_frames << '\n';
  if (o.period_days) kv << "period_days = " << *o.period_days << '\n';
  if (o.jobs) kv << "jobs = " << *o.jobs << '\n';
  std::istringstream in(kv.str());
  apply_config(cfg, KeyValueDoc::parse(in, "<flags>"));
  return cfg;
}

int run_analyze(const std::string& input, const Overrides& o) {
  RunConfig cfg;
  try {
    cfg = build_config(o);
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const fs::path path(input);
    const auto clip = analyze_file(path, cfg);
    write_clip_outputs(clip, cfg, path.stem().string());
    const auto& g = clip.report.gait;
    std::cout << clip.report.source << ": " << clip.report.status << ", " << g.n_steps << " steps";
    if (g.speed_mps) std::cout << ", speed " << format_double(*g.speed_mps) << " m/s";
    std::cout << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return kExitAllFailed;
  }
}

int run_batch_cmd(const std::vector<std::string>& patterns, const Overrides& o) {
  RunConfig cfg;
  try {
    cfg = build_config(o);
    if (!patterns.empty()) cfg.inputs = patterns;
    cfg.validate();
    if (cfg.inputs.empty()) throw Error(ErrorCode::InvalidArgument, "no inputs given");
    if (expand_inputs(cfg.inputs).empty()) throw Error(ErrorCode::InvalidArgument, "no inputs matched");
  } catch (const std::exception& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const auto res = run_batch(cfg);
    for (const auto& f : res.summary.failures) std::cerr << "failed: " << f.error << '\n';
    std::cout << res.summary.clips.size() << " clips analyzed, " << res.summary.failures.size() << " failed, "
              << res.summary.periods.size() << " periods\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return kExitAllFailed;
  }
}

int run_synth(const std::string& scenario_path, const std::string& out, const std::string& format) {
  try {
    const auto sc = scenario_from_json(load_json_file(scenario_path));
    const auto clip = generate(sc);
    fs::create_directories(out);
    std::ostringstream body;
    fs::path skel;
    if (format == "kinect") {
      write_kinect_skeleton(body, clip.sequence);
      skel = fs::path(out) / (sc.id + ".txt");
    } else if (format == "jsonl") {
      write_pose_jsonl(body, {clip.sequence});
      skel = fs::path(out) / (sc.id + ".jsonl");
    } else {
      std::cerr << "gaitpipe: --format must be kinect or jsonl\n";
      return kExitUsage;
    }
    write_text_file(skel, body.str());
    write_text_file(fs::path(out) / (sc.id + ".truth.json"), to_json(clip.truth).dump(2) + "\n");
    std::cout << skel.string() << ": " << clip.sequence.size() << " frames, " << clip.truth.step_frames.size()
              << " steps\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return e.code() == ErrorCode::IoError ? kExitAllFailed : kExitUsage;
  }
}

int run_eval(const std::vector<std::string>& pairs, const std::string& out) {
  try {
    std::vector<EvalClip> clips;
    for (const auto& p : pairs) {
      const auto comma = p.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected <report.json>,<truth.json>: " + p);
      const auto report = load_report_json(p.substr(0, comma));
      const auto truth = truth_from_json(load_json_file(p.substr(comma + 1)));
      EvalClip c;
      c.id = report.source;
      c.frame_rate_hz = truth.frame_rate_hz;
      for (const auto& s : report.gait.steps) c.predicted.push_back(static_cast<long long>(s.frame));
      for (auto f : truth.step_frames) c.truth.push_back(static_cast<long long>(f));
      clips.push_back(std::move(c));
    }
    const auto res = evaluate(clips);
    if (!out.empty()) {
      fs::create_directories(out);
      write_text_file(fs::path(out) / "eval.json", to_json(res).dump(2) + "\n");
      std::ostringstream csv;
      write_eval_csv(csv, res);
      write_text_file(fs::path(out) / "eval.csv", csv.str());
    }
    std::cout << "clips " << res.n_clips << ", count_accuracy " << format_double(res.count_accuracy)
              << ", mean_frame_error " << format_double(res.mean_frame_error) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "gaitpipe: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait analysis from skeleton keypoint sequences"};
  app.require_subcommand(1);

  Overrides analyze_o;
  std::string analyze_input;
  auto* analyze = app.add_subcommand("analyze", "analyze one skeleton file");
  analyze->add_option("input", analyze_input, "skeleton file")->required();
  add_common(analyze, analyze_o);

  Overrides batch_o;
  std::vector<std::string> batch_inputs;
  auto* batch = app.add_subcommand("batch", "analyze many files and aggregate by day");
  batch->add_option("inputs", batch_inputs, "files or glob patterns");
  add_common(batch, batch_o);
  batch->add_option("--period-days", batch_o.period_days, "aggregation bucket in days");
  batch->add_option("--jobs", batch_o.jobs, "worker threads (0 = all cores)");

  std::string scenario, synth_out, synth_format = "kinect";
  auto* synth = app.add_subcommand("synth", "generate a synthetic walking clip");
  synth->add_option("scenario", scenario, "scenario JSON")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--format", synth_format, "kinect | jsonl");

  std::vector<std::string> eval_pairs;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "score reports against ground truth");
  eval->add_option("pairs", eval_pairs, "<report.json>,<truth.json> pairs")->required();
  eval->add_option("--out", eval_out, "write eval.json and eval.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (*analyze) return run_analyze(analyze_input, analyze_o);
  if (*batch) return run_batch_cmd(batch_inputs, batch_o);
  if (*synth) return run_synth(scenario, synth_out, synth_format);
  return run_eval(eval_pairs, eval_out);
}
