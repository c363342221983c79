#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitpipe/evaluation.hpp"
#include "gaitpipe/gait_metrics.hpp"
#include "gaitpipe/synth.hpp"

namespace gaitpipe {

inline constexpr int kReportSchemaVersion = 1;

struct DetectorSummary {
  double alpha = 0.2;
  int kernel_width = 5;
  std::optional<double> range_r;
  std::optional<double> threshold_theta;

  bool operator==(const DetectorSummary&) const = default;
};

/// One analyzed clip as written to `<name>.report.json`.
struct AnalysisReport {
  std::string source;
  /// "ok" or "no_steps"
  std::string status = "ok";
  double frame_rate_hz = 30.0;
  double start_time_s = 0.0;
  GaitReport gait;
  DetectorSummary detector;

  bool operator==(const AnalysisReport&) const = default;
};

nlohmann::json to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);
void write_report_json(const std::filesystem::path& path, const AnalysisReport& report);
AnalysisReport load_report_json(const std::filesystem::path& path);

/// Columns: event_index, frame, time_s, foot, stride_m, swing_time_s.
void write_steps_csv(std::ostream& out, const GaitReport& report);
std::vector<StepRow> read_steps_csv(std::istream& in);

/// Full detector audit trail: signal, extrema at each stage, removals.
nlohmann::json to_json(const StepDetectionResult& result);

nlohmann::json to_json(const SyntheticGroundTruth& truth);
SyntheticGroundTruth truth_from_json(const nlohmann::json& j);

nlohmann::json to_json(const GaitScenario& sc);
/// Missing keys keep their defaults; `step_length_m` sets both feet.
GaitScenario scenario_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EvalResult& result);
void write_eval_csv(std::ostream& out, const EvalResult& result);

nlohmann::json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace gaitpipe
