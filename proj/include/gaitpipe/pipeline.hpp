#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gaitpipe/camera.hpp"
#include "gaitpipe/gait_metrics.hpp"
#include "gaitpipe/keyvalue.hpp"
#include "gaitpipe/pose_filter.hpp"
#include "gaitpipe/report_io.hpp"
#include "gaitpipe/step_detection.hpp"

namespace gaitpipe {

enum class InputFormat { Auto, Kinect, Jsonl };

InputFormat parse_input_format(const std::string& s);
/// `.txt` and `.skeleton` are Kinect text; `.jsonl` and `.json` are pose JSONL.
InputFormat detect_format(const std::filesystem::path& path, InputFormat requested = InputFormat::Auto);

struct RunConfig {
  std::vector<std::string> inputs;
  InputFormat format = InputFormat::Auto;
  DetectorParams detector;
  FilterParams filter;
  FootChoice feet;
  bool dimension_filter = true;
  bool temporal_filter = true;
  std::optional<std::filesystem::path> camera;
  std::filesystem::path out_dir = ".";
  bool emit_plots = false;
  std::optional<double> frame_rate_hz;
  /// Restrict a multi-track input to this track id before filtering.
  std::optional<std::string> track;
  WidthSource width_source = WidthSource::Raw;
  /// Aggregation bucket, in calendar days.
  int period_days = 1;
  /// 0 picks the hardware concurrency.
  int jobs = 0;

  void validate() const;
};

/// Applies every recognised key of `doc` onto `cfg`; unknown keys throw.
void apply_config(RunConfig& cfg, const KeyValueDoc& doc);
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<PoseSequence> load_input(const std::filesystem::path& path, const RunConfig& cfg);

struct ClipAnalysis {
  AnalysisReport report;
  /// Absent when the clip never reached the detector.
  std::optional<StepDetectionResult> detection;
  int interpolation_splits = 0;
  int interpolated_entries = 0;
};

/// Filters, detects and measures. A clip with fewer than min_steps retained
/// maxima yields status "no_steps" and absent gait fields.
ClipAnalysis analyze_sequences(std::vector<PoseSequence> tracks, const RunConfig& cfg, const std::string& source);
ClipAnalysis analyze_file(const std::filesystem::path& path, const RunConfig& cfg);

/// Writes `<stem>.report.json`, `<stem>.steps.csv` and, with emit_plots,
/// `<stem>.distance.svg` into cfg.out_dir.
void write_clip_outputs(const ClipAnalysis& clip, const RunConfig& cfg, const std::string& stem);

struct PeriodSummary {
  /// ISO date of the first day of the bucket (UTC).
  std::string date;
  long long day_index = 0;
  int n_clips = 0;
  int n_steps = 0;
  std::optional<double> mean_speed_mps;
  std::optional<double> median_speed_mps;
  std::optional<double> mean_asymmetry_index;
};

struct ClipFailure {
  std::string input;
  std::string error;
};

struct ClipOutcome {
  std::string input;
  std::string stem;
  std::string status;
  double start_time_s = 0.0;
  int n_steps = 0;
  std::optional<double> speed_mps;
  std::optional<double> asymmetry_index;
};

struct LongTermSummary {
  int period_days = 1;
  std::vector<PeriodSummary> periods;
  /// Least-squares slope of per-period mean speed over day index, m/s per day.
  std::optional<double> speed_trend_mps_per_day;
  std::vector<ClipOutcome> clips;
  std::vector<ClipFailure> failures;
};

/// Calendar-day bucketing of clip start times (seconds since the Unix epoch,
/// UTC). Deterministic for any ordering of `clips`.
LongTermSummary summarize(std::vector<ClipOutcome> clips, std::vector<ClipFailure> failures, int period_days = 1);

std::optional<double> least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const LongTermSummary& s);
void write_summary_csv(std::ostream& out, const LongTermSummary& s);

/// Expands shell-style patterns; literal paths pass through. Sorted, unique.
std::vector<std::filesystem::path> expand_inputs(const std::vector<std::string>& patterns);

struct BatchResult {
  LongTermSummary summary;
  int exit_code = 0;
};

/// Analyzes every input (in parallel), writes per-clip outputs plus
/// `summary.json` and `summary.csv`.
BatchResult run_batch(const RunConfig& cfg);

/// Exit codes shared by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAllFailed = 2;

}  // namespace gaitpipe
