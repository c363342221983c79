#include "gaitpipe/pipeline.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gaitpipe/ingestion.hpp"
#include "gaitpipe/svg_plot.hpp"

namespace gaitpipe {

using json = nlohmann::json;
namespace fs = std::filesystem;

InputFormat parse_input_format(const std::string& s) {
  if (s == "auto") return InputFormat::Auto;
  if (s == "kinect" || s == "kinect-skeleton") return InputFormat::Kinect;
  if (s == "jsonl" || s == "pose-jsonl") return InputFormat::Jsonl;
  throw Error(ErrorCode::InvalidArgument, "unknown input format '" + s + "'");
}

InputFormat detect_format(const fs::path& path, InputFormat requested) {
  if (requested != InputFormat::Auto) return requested;
  const auto ext = path.extension().string();
  if (ext == ".txt" || ext == ".skeleton") return InputFormat::Kinect;
  if (ext == ".jsonl" || ext == ".json") return InputFormat::Jsonl;
  throw Error(ErrorCode::FormatError, path.string() + ": cannot infer format from extension; pass --format");
}

void RunConfig::validate() const {
  detector.validate();
  filter.validate();
  if (frame_rate_hz && !(*frame_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame rate must be > 0");
  if (period_days < 1) throw Error(ErrorCode::InvalidArgument, "period_days must be >= 1");
  if (jobs < 0) throw Error(ErrorCode::InvalidArgument, "jobs must be >= 0");
  if (feet.min_confidence < 0.0 || feet.min_confidence > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "min_confidence must lie in [0, 1]");
  }
}

namespace {

WidthSource parse_width_source(const std::string& s) {
  if (s == "raw") return WidthSource::Raw;
  if (s == "smoothed") return WidthSource::Smoothed;
  throw Error(ErrorCode::InvalidArgument, "width_source must be raw or smoothed");
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void apply_config(RunConfig& cfg, const KeyValueDoc& doc) {
  auto as_int = [&](const std::string& k) { return static_cast<int>(*doc.get_int(k)); };
  for (const auto& [key, value] : doc.entries()) {
    if (key == "inputs" || key == "input") {
      cfg.inputs = split_words(value);
    } else if (key == "format") {
      cfg.format = parse_input_format(value);
    } else if (key == "alpha") {
      cfg.detector.alpha = *doc.get_double(key);
    } else if (key == "kernel_width") {
      cfg.detector.kernel_width = as_int(key);
    } else if (key == "plane") {
      cfg.detector.plane = Plane::parse(value);
    } else if (key == "min_steps") {
      cfg.detector.min_steps = as_int(key);
    } else if (key == "min_track_frames") {
      cfg.filter.min_track_frames = as_int(key);
    } else if (key == "max_gap_frames") {
      cfg.filter.max_gap_frames = as_int(key);
    } else if (key == "min_height_m") {
      cfg.filter.min_height_m = *doc.get_double(key);
    } else if (key == "max_height_m") {
      cfg.filter.max_height_m = *doc.get_double(key);
    } else if (key == "max_width_m") {
      cfg.filter.max_width_m = *doc.get_double(key);
    } else if (key == "max_centroid_jump_m") {
      cfg.filter.max_centroid_jump_m = *doc.get_double(key);
    } else if (key == "dimension_filter") {
      cfg.dimension_filter = *doc.get_bool(key);
    } else if (key == "temporal_filter") {
      cfg.temporal_filter = *doc.get_bool(key);
    } else if (key == "min_confidence") {
      cfg.feet.min_confidence = *doc.get_double(key);
    } else if (key == "foot_left") {
      cfg.feet.left = JointKind::from_name(value);
    } else if (key == "foot_right") {
      cfg.feet.right = JointKind::from_name(value);
    } else if (key == "camera") {
      cfg.camera = fs::path(value);
    } else if (key == "out" || key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "plots" || key == "emit_plots") {
      cfg.emit_plots = *doc.get_bool(key);
    } else if (key == "frame_rate_hz" || key == "frame_rate") {
      cfg.frame_rate_hz = *doc.get_double(key);
    } else if (key == "track") {
      cfg.track = value;
    } else if (key == "width_source") {
      cfg.width_source = parse_width_source(value);
    } else if (key == "period_days") {
      cfg.period_days = as_int(key);
    } else if (key == "jobs") {
      cfg.jobs = as_int(key);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  }
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig cfg;
  apply_config(cfg, KeyValueDoc::load(path));
  return cfg;
}

std::vector<PoseSequence> load_input(const fs::path& path, const RunConfig& cfg) {
  const auto fmt = detect_format(path, cfg.format);
  std::vector<PoseSequence> seqs;
  if (fmt == InputFormat::Kinect) {
    seqs.push_back(parse_kinect_skeleton_file(path, cfg.frame_rate_hz.value_or(kDefaultFrameRateHz)));
  } else {
    seqs = parse_pose_jsonl_file(path, JsonlOptions{cfg.frame_rate_hz});
  }
  if (cfg.camera) {
    const auto cam = load_camera_config(*cfg.camera);
    for (auto& s : seqs) s = back_project_sequence(s, cam);
  }
  return seqs;
}

namespace {

PoseSequence drop_low_confidence(const PoseSequence& seq, double min_conf) {
  if (min_conf <= 0.0) return seq;
  std::vector<SkeletonFrame> frames;
  frames.reserve(seq.size());
  for (const auto& f : seq.frames()) {
    std::vector<Joint> kept;
    for (const auto& j : f.joints()) {
      if (j.confidence >= min_conf) kept.push_back(j);
    }
    frames.emplace_back(f.frame_index(), f.timestamp(), std::move(kept));
  }
  return PoseSequence(std::move(frames), seq.frame_rate_hz(), seq.source_id());
}

AnalysisReport base_report(const RunConfig& cfg, const std::string& source) {
  AnalysisReport r;
  r.source = source;
  r.detector.alpha = cfg.detector.alpha;
  r.detector.kernel_width = cfg.detector.kernel_width;
  return r;
}

}  // namespace

ClipAnalysis analyze_sequences(std::vector<PoseSequence> tracks, const RunConfig& cfg, const std::string& source) {
  if (tracks.empty()) throw Error(ErrorCode::EmptyInput, source + ": no pose tracks");
  if (cfg.track) {
    std::erase_if(tracks, [&](const PoseSequence& s) { return s.source_id() != *cfg.track; });
    if (tracks.empty()) throw Error(ErrorCode::EmptyInput, source + ": no track '" + *cfg.track + "'");
  }
  if (cfg.dimension_filter) {
    for (auto& t : tracks) t = filter_dimensions(t, cfg.filter, cfg.detector.plane);
    std::erase_if(tracks, [](const PoseSequence& s) { return s.empty(); });
    if (tracks.empty()) throw Error(ErrorCode::EmptyInput, source + ": every frame rejected by the dimension filter");
  }
  PoseSequence seq;
  if (cfg.temporal_filter) {
    auto kept = filter_temporal(tracks, cfg.filter);
    if (kept.empty()) throw Error(ErrorCode::EmptyInput, source + ": no track survived the temporal filter");
    seq = std::move(kept.front());
  } else {
    auto longest = std::max_element(tracks.begin(), tracks.end(), [](const PoseSequence& a, const PoseSequence& b) {
      return a.size() < b.size();
    });
    seq = std::move(*longest);
  }
  seq = drop_low_confidence(seq, cfg.feet.min_confidence);

  const auto [left_kind, right_kind] = resolve_foot_joints(seq, cfg.feet);
  const JointKind required[] = {left_kind, right_kind};
  auto interp = interpolate_gaps(seq, cfg.filter, required);
  seq = std::move(interp.sequence);

  FootChoice exact = cfg.feet;
  exact.left = exact.left_fallback = left_kind;
  exact.right = exact.right_fallback = right_kind;
  const auto [left, right] = complete_feet(foot_positions(seq, exact));
  const auto raw = feet_distance(left, right, cfg.detector.plane);
  const auto ts = seq.timestamps();

  ClipAnalysis out;
  out.interpolation_splits = interp.splits;
  out.interpolated_entries = interp.interpolated_entries;
  out.report = base_report(cfg, source);
  out.report.frame_rate_hz = seq.frame_rate_hz();
  out.report.start_time_s = ts.front();

  auto det = detect_steps_from_signal(raw, ts, cfg.detector);
  out.report.detector.range_r = det.range_r;
  out.report.detector.threshold_theta = det.threshold_theta;
  if (static_cast<int>(det.step_frames.size()) < cfg.detector.min_steps) {
    out.report.status = "no_steps";
  } else {
    const auto events = assign_feet(det, left, right, cfg.detector.plane);
    const auto minima = det.minima();
    out.report.gait = compute_gait_report(events, minima, MetricsOptions{cfg.detector.plane, cfg.width_source});
    // report frame numbers as they appear in the input
    for (auto& row : out.report.gait.steps) {
      row.frame = static_cast<std::size_t>(seq.frames()[row.frame].frame_index());
    }
  }
  out.detection = std::move(det);
  return out;
}

ClipAnalysis analyze_file(const fs::path& path, const RunConfig& cfg) {
  try {
    return analyze_sequences(load_input(path, cfg), cfg, path.filename().string());
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.find(path.string()) != std::string::npos) throw;
    throw Error(e.code(), path.string() + ": " + msg.substr(msg.find(": ") + 2));
  }
}

void write_clip_outputs(const ClipAnalysis& clip, const RunConfig& cfg, const std::string& stem) {
  fs::create_directories(cfg.out_dir);
  write_report_json(cfg.out_dir / (stem + ".report.json"), clip.report);
  std::ostringstream csv;
  write_steps_csv(csv, clip.report.gait);
  write_text_file(cfg.out_dir / (stem + ".steps.csv"), csv.str());
  if (cfg.emit_plots && clip.detection) {
    PlotOptions po;
    po.title = clip.report.source + " feet distance";
    write_text_file(cfg.out_dir / (stem + ".distance.svg"), render_distance_svg(*clip.detection, po));
  }
}

std::optional<double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "slope inputs differ in length");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

std::string iso_date(long long day_index) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

double mean_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

LongTermSummary summarize(std::vector<ClipOutcome> clips, std::vector<ClipFailure> failures, int period_days) {
  if (period_days < 1) throw Error(ErrorCode::InvalidArgument, "period_days must be >= 1");
  std::sort(clips.begin(), clips.end(), [](const ClipOutcome& a, const ClipOutcome& b) {
    return std::tie(a.input, a.start_time_s) < std::tie(b.input, b.start_time_s);
  });
  std::sort(failures.begin(), failures.end(),
            [](const ClipFailure& a, const ClipFailure& b) { return std::tie(a.input, a.error) < std::tie(b.input, b.error); });

  struct Bucket {
    int n_clips = 0;
    int n_steps = 0;
    std::vector<double> speeds;
    std::vector<double> asym;
  };
  std::map<long long, Bucket> buckets;
  for (const auto& c : clips) {
    const auto day = static_cast<long long>(std::floor(c.start_time_s / 86400.0));
    const long long key = day - (((day % period_days) + period_days) % period_days);
    auto& b = buckets[key];
    ++b.n_clips;
    b.n_steps += c.n_steps;
    if (c.speed_mps) b.speeds.push_back(*c.speed_mps);
    if (c.asymmetry_index) b.asym.push_back(*c.asymmetry_index);
  }

  LongTermSummary s;
  s.period_days = period_days;
  std::vector<double> xs, ys;
  for (const auto& [day, b] : buckets) {
    PeriodSummary p;
    p.day_index = day;
    p.date = iso_date(day);
    p.n_clips = b.n_clips;
    p.n_steps = b.n_steps;
    if (!b.speeds.empty()) {
      p.mean_speed_mps = mean_of(b.speeds);
      p.median_speed_mps = median_of(b.speeds);
      xs.push_back(static_cast<double>(day));
      ys.push_back(*p.mean_speed_mps);
    }
    if (!b.asym.empty()) p.mean_asymmetry_index = mean_of(b.asym);
    s.periods.push_back(std::move(p));
  }
  s.speed_trend_mps_per_day = least_squares_slope(xs, ys);
  s.clips = std::move(clips);
  s.failures = std::move(failures);
  return s;
}

json to_json(const LongTermSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json periods = json::array();
  for (const auto& p : s.periods) {
    periods.push_back({{"date", p.date},
                       {"day_index", p.day_index},
                       {"n_clips", p.n_clips},
                       {"n_steps", p.n_steps},
                       {"mean_speed_mps", opt(p.mean_speed_mps)},
                       {"median_speed_mps", opt(p.median_speed_mps)},
                       {"mean_asymmetry_index", opt(p.mean_asymmetry_index)}});
  }
  json clips = json::array();
  for (const auto& c : s.clips) {
    clips.push_back({{"input", c.input},
                     {"report", c.stem + ".report.json"},
                     {"status", c.status},
                     {"start_time_s", c.start_time_s},
                     {"n_steps", c.n_steps},
                     {"speed_mps", opt(c.speed_mps)},
                     {"asymmetry_index", opt(c.asymmetry_index)}});
  }
  json failures = json::array();
  for (const auto& f : s.failures) failures.push_back({{"input", f.input}, {"error", f.error}});
  return json{{"schema", kReportSchemaVersion},
              {"period_days", s.period_days},
              {"periods", std::move(periods)},
              {"speed_trend_mps_per_day", opt(s.speed_trend_mps_per_day)},
              {"clips", std::move(clips)},
              {"failures", std::move(failures)}};
}

void write_summary_csv(std::ostream& out, const LongTermSummary& s) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  out << "date,day_index,n_clips,n_steps,mean_speed_mps,median_speed_mps,mean_asymmetry_index\n";
  for (const auto& p : s.periods) {
    out << p.date << ',' << p.day_index << ',' << p.n_clips << ',' << p.n_steps << ',' << opt(p.mean_speed_mps) << ','
        << opt(p.median_speed_mps) << ',' << opt(p.mean_asymmetry_index) << '\n';
  }
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& patterns) {
  std::set<fs::path> found;
  for (const auto& pat : patterns) {
    if (pat.find_first_of("*?[") == std::string::npos) {
      found.insert(fs::path(pat));
      continue;
    }
    glob_t g{};
    const int rc = ::glob(pat.c_str(), 0, nullptr, &g);
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) found.insert(fs::path(g.gl_pathv[i]));
    }
    ::globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) throw Error(ErrorCode::IoError, "cannot expand '" + pat + "'");
  }
  return {found.begin(), found.end()};
}

BatchResult run_batch(const RunConfig& cfg) {
  cfg.validate();
  const auto inputs = expand_inputs(cfg.inputs);
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "no inputs matched");

  // stems must be unique within one output directory
  std::vector<std::string> stems;
  std::map<std::string, int> seen;
  for (const auto& p : inputs) {
    std::string stem = p.stem().string();
    const int n = ++seen[stem];
    if (n > 1) stem += "_" + std::to_string(n);
    stems.push_back(stem);
  }

  struct Slot {
    std::optional<ClipOutcome> ok;
    std::optional<ClipFailure> failed;
  };
  std::vector<Slot> slots(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        const auto clip = analyze_file(inputs[i], cfg);
        write_clip_outputs(clip, cfg, stems[i]);
        const auto& g = clip.report.gait;
        slots[i].ok = ClipOutcome{inputs[i].string(), stems[i], clip.report.status, clip.report.start_time_s,
                                  g.n_steps,          g.speed_mps, g.asymmetry_index};
      } catch (const std::exception& e) {
        slots[i].failed = ClipFailure{inputs[i].string(), e.what()};
      }
    }
  };
  unsigned n_threads = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(inputs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<ClipOutcome> ok;
  std::vector<ClipFailure> failed;
  for (auto& s : slots) {
    if (s.ok) ok.push_back(std::move(*s.ok));
    if (s.failed) failed.push_back(std::move(*s.failed));
  }
  BatchResult res;
  res.exit_code = ok.empty() ? kExitAllFailed : kExitOk;
  res.summary = summarize(std::move(ok), std::move(failed), cfg.period_days);

  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir / "summary.json", to_json(res.summary).dump(2) + "\n");
  std::ostringstream csv;
  write_summary_csv(csv, res.summary);
  write_text_file(cfg.out_dir / "summary.csv", csv.str());
  return res;
}

}  // namespace gaitpipe
