#include "gaitpipe/report_io.hpp"

#include <fstream>
#include <sstream>

#include "gaitpipe/ingestion.hpp"
#include "gaitpipe/keyvalue.hpp"

namespace gaitpipe {

using json = nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorCode::FormatError, std::string("report field '") + key + "' is not a number");
  return it->get<double>();
}

template <class T>
T need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::FormatError, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::FormatError, std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<double> doubles(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<std::vector<double>>();
}

}  // namespace

json to_json(const AnalysisReport& r) {
  const auto& g = r.gait;
  json steps = json::array();
  for (const auto& s : g.steps) {
    steps.push_back({{"event_index", s.event_index},
                     {"frame", s.frame},
                     {"time_s", s.time_s},
                     {"foot", std::string(to_string(s.foot))},
                     {"stride_m", s.stride_m},
                     {"swing_time_s", opt(s.swing_time_s)},
                     {"forced", s.forced}});
  }
  return json{
      {"schema", kReportSchemaVersion},
      {"source", r.source},
      {"status", r.status},
      {"frame_rate_hz", r.frame_rate_hz},
      {"start_time_s", r.start_time_s},
      {"n_steps", g.n_steps},
      {"speed_mps", opt(g.speed_mps)},
      {"stride_left_m", opt(g.stride_left_m)},
      {"stride_right_m", opt(g.stride_right_m)},
      {"step_length_m", opt(g.step_length_m)},
      {"step_width_m", opt(g.step_width_m)},
      {"swing_time_s", opt(g.swing_time_s)},
      {"asymmetry_index", opt(g.asymmetry_index)},
      {"steps", std::move(steps)},
      {"samples",
       {{"stride_left_m", g.samples.stride_left},
        {"stride_right_m", g.samples.stride_right},
        {"step_length_m", g.samples.step_length},
        {"step_width_m", g.samples.step_width},
        {"swing_time_s", g.samples.swing_time}}},
      {"detector",
       {{"alpha", r.detector.alpha},
        {"kernel_width", r.detector.kernel_width},
        {"range_r", opt(r.detector.range_r)},
        {"threshold_theta", opt(r.detector.threshold_theta)}}},
  };
}

AnalysisReport report_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::FormatError, "report is not a JSON object");
  if (need<int>(j, "schema") != kReportSchemaVersion) {
    throw Error(ErrorCode::FormatError, "unsupported report schema " + j.at("schema").dump());
  }
  AnalysisReport r;
  r.source = need<std::string>(j, "source");
  if (j.contains("status")) r.status = need<std::string>(j, "status");
  if (j.contains("frame_rate_hz")) r.frame_rate_hz = need<double>(j, "frame_rate_hz");
  if (j.contains("start_time_s")) r.start_time_s = need<double>(j, "start_time_s");
  auto& g = r.gait;
  g.n_steps = need<int>(j, "n_steps");
  g.speed_mps = opt_from(j, "speed_mps");
  g.stride_left_m = opt_from(j, "stride_left_m");
  g.stride_right_m = opt_from(j, "stride_right_m");
  g.step_length_m = opt_from(j, "step_length_m");
  g.step_width_m = opt_from(j, "step_width_m");
  g.swing_time_s = opt_from(j, "swing_time_s");
  g.asymmetry_index = opt_from(j, "asymmetry_index");
  if (auto it = j.find("steps"); it != j.end()) {
    for (const auto& s : *it) {
      StepRow row;
      row.event_index = need<std::size_t>(s, "event_index");
      row.frame = need<std::size_t>(s, "frame");
      row.time_s = need<double>(s, "time_s");
      row.foot = parse_foot(need<std::string>(s, "foot"));
      row.stride_m = need<double>(s, "stride_m");
      row.swing_time_s = opt_from(s, "swing_time_s");
      if (s.contains("forced")) row.forced = need<bool>(s, "forced");
      g.steps.push_back(row);
    }
  }
  if (auto it = j.find("samples"); it != j.end() && it->is_object()) {
    g.samples.stride_left = doubles(*it, "stride_left_m");
    g.samples.stride_right = doubles(*it, "stride_right_m");
    g.samples.step_length = doubles(*it, "step_length_m");
    g.samples.step_width = doubles(*it, "step_width_m");
    g.samples.swing_time = doubles(*it, "swing_time_s");
  }
  if (auto it = j.find("detector"); it != j.end() && it->is_object()) {
    r.detector.alpha = need<double>(*it, "alpha");
    r.detector.kernel_width = need<int>(*it, "kernel_width");
    r.detector.range_r = opt_from(*it, "range_r");
    r.detector.threshold_theta = opt_from(*it, "threshold_theta");
  }
  return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

void write_report_json(const std::filesystem::path& path, const AnalysisReport& report) {
  write_text_file(path, to_json(report).dump(2) + "\n");
}

AnalysisReport load_report_json(const std::filesystem::path& path) { return report_from_json(load_json_file(path)); }

namespace {
constexpr std::string_view kStepsHeader = "event_index,frame,time_s,foot,stride_m,swing_time_s";
}  // namespace

void write_steps_csv(std::ostream& out, const GaitReport& report) {
  out << kStepsHeader << '\n';
  for (const auto& s : report.steps) {
    out << s.event_index << ',' << s.frame << ',' << format_double(s.time_s) << ',' << to_string(s.foot) << ','
        << format_double(s.stride_m) << ',' << (s.swing_time_s ? format_double(*s.swing_time_s) : "") << '\n';
  }
}

std::vector<StepRow> read_steps_csv(std::istream& in) {
  std::vector<StepRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1) {
      if (line != kStepsHeader) throw Error(ErrorCode::FormatError, "steps csv: unexpected header '" + line + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw Error(ErrorCode::FormatError, "steps csv line " + std::to_string(lineno) + ": 6 columns expected");
    auto num = [&](const std::string& s) {
      auto v = parse_double(s);
      if (!v) throw Error(ErrorCode::FormatError, "steps csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
      return *v;
    };
    StepRow r;
    r.event_index = static_cast<std::size_t>(num(f[0]));
    r.frame = static_cast<std::size_t>(num(f[1]));
    r.time_s = num(f[2]);
    r.foot = parse_foot(f[3]);
    r.stride_m = num(f[4]);
    if (!f[5].empty()) r.swing_time_s = num(f[5]);
    rows.push_back(r);
  }
  return rows;
}

namespace {

json extremum_json(const Extremum& e) {
  return json{{"frame", e.frame},
              {"kind", e.kind == ExtremumKind::Max ? "max" : "min"},
              {"value", e.value},
              {"smoothed_value", e.smoothed_value}};
}

json extrema_json(const std::vector<Extremum>& v) {
  json out = json::array();
  for (const auto& e : v) out.push_back(extremum_json(e));
  return out;
}

}  // namespace

json to_json(const StepDetectionResult& r) {
  json removed = json::array();
  for (const auto& [a, b] : r.removed_pairs) removed.push_back({extremum_json(a), extremum_json(b)});
  return json{{"range_r", r.range_r},
              {"threshold_theta", r.threshold_theta},
              {"step_frames", r.step_frames},
              {"extrema", extrema_json(r.extrema)},
              {"filtered_extrema", extrema_json(r.filtered_extrema)},
              {"candidates", extrema_json(r.candidates)},
              {"removed_pairs", std::move(removed)},
              {"merged_out", extrema_json(r.merged_out)},
              {"dropped_first", r.dropped_first ? extremum_json(*r.dropped_first) : json(nullptr)},
              {"signal", {{"raw", r.signal.raw}, {"smoothed", r.signal.smoothed}, {"timestamps", r.signal.timestamps}}}};
}

json to_json(const SyntheticGroundTruth& t) {
  json feet = json::array();
  for (Foot f : t.swing_foot) feet.push_back(std::string(to_string(f)));
  return json{{"step_frames", t.step_frames},
              {"swing_foot", std::move(feet)},
              {"frame_rate_hz", t.frame_rate_hz},
              {"true",
               {{"speed_mps", t.true_speed_mps},
                {"step_length_m", t.true_step_length_m},
                {"stride_left_m", t.true_stride_left_m},
                {"stride_right_m", t.true_stride_right_m},
                {"swing_time_s", t.true_swing_time_s},
                {"step_width_m", t.true_step_width_m},
                {"asymmetry_index", t.true_asymmetry_index}}}};
}

SyntheticGroundTruth truth_from_json(const json& j) {
  SyntheticGroundTruth t;
  t.step_frames = need<std::vector<std::size_t>>(j, "step_frames");
  if (auto it = j.find("swing_foot"); it != j.end()) {
    for (const auto& f : *it) t.swing_foot.push_back(parse_foot(f.get<std::string>()));
  }
  if (j.contains("frame_rate_hz")) t.frame_rate_hz = need<double>(j, "frame_rate_hz");
  if (auto it = j.find("true"); it != j.end() && it->is_object()) {
    const auto& v = *it;
    t.true_speed_mps = v.value("speed_mps", 0.0);
    t.true_step_length_m = v.value("step_length_m", 0.0);
    t.true_stride_left_m = v.value("stride_left_m", 0.0);
    t.true_stride_right_m = v.value("stride_right_m", 0.0);
    t.true_swing_time_s = v.value("swing_time_s", 0.0);
    t.true_step_width_m = v.value("step_width_m", 0.0);
    t.true_asymmetry_index = v.value("asymmetry_index", 0.0);
  }
  return t;
}

json to_json(const GaitScenario& sc) {
  return json{{"id", sc.id},
              {"step_length_left_m", sc.step_length_left_m},
              {"step_length_right_m", sc.step_length_right_m},
              {"cadence_hz", sc.cadence_hz},
              {"duration_s", sc.duration_s},
              {"stance_width_m", sc.stance_width_m},
              {"noise_sigma_m", sc.noise_sigma_m},
              {"dropout_prob", sc.dropout_prob},
              {"heading_deg", sc.heading_deg},
              {"frame_rate_hz", sc.frame_rate_hz},
              {"seed", sc.seed},
              {"first_swing", std::string(to_string(sc.first_swing))},
              {"start_time_s", sc.start_time_s}};
}

GaitScenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ScenarioInvalid, "scenario must be a JSON object");
  GaitScenario sc;
  try {
    if (j.contains("step_length_m")) sc.step_length_left_m = sc.step_length_right_m = j.at("step_length_m").get<double>();
    sc.step_length_left_m = j.value("step_length_left_m", sc.step_length_left_m);
    sc.step_length_right_m = j.value("step_length_right_m", sc.step_length_right_m);
    sc.cadence_hz = j.value("cadence_hz", sc.cadence_hz);
    sc.duration_s = j.value("duration_s", sc.duration_s);
    sc.stance_width_m = j.value("stance_width_m", sc.stance_width_m);
    sc.noise_sigma_m = j.value("noise_sigma_m", sc.noise_sigma_m);
    sc.dropout_prob = j.value("dropout_prob", sc.dropout_prob);
    sc.heading_deg = j.value("heading_deg", sc.heading_deg);
    sc.frame_rate_hz = j.value("frame_rate_hz", sc.frame_rate_hz);
    sc.seed = j.value("seed", sc.seed);
    sc.start_time_s = j.value("start_time_s", sc.start_time_s);
    sc.id = j.value("id", sc.id);
    if (j.contains("first_swing")) sc.first_swing = parse_foot(j.at("first_swing").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ScenarioInvalid, std::string("bad scenario field: ") + e.what());
  }
  sc.validate();
  return sc;
}

json to_json(const EvalResult& r) {
  json clips = json::array();
  for (const auto& c : r.per_clip) {
    json pairs = json::array();
    for (const auto& [p, t] : c.matched) pairs.push_back({p, t});
    clips.push_back({{"id", c.id},
                     {"predicted_count", c.predicted_count},
                     {"true_count", c.true_count},
                     {"frame_rate_hz", c.frame_rate_hz},
                     {"matched", std::move(pairs)},
                     {"frame_errors", c.frame_errors},
                     {"unmatched_predicted", c.unmatched_predicted},
                     {"unmatched_truth", c.unmatched_truth}});
  }
  return json{{"n_clips", r.n_clips},
              {"count_accuracy", r.count_accuracy},
              {"mean_frame_error", r.mean_frame_error},
              {"mean_time_error_s", r.mean_time_error_s},
              {"n_matched", r.n_matched},
              {"per_clip", std::move(clips)}};
}

void write_eval_csv(std::ostream& out, const EvalResult& r) {
  out << "clip_id,predicted_count,true_count,count_correct,n_matched,mean_frame_error\n";
  for (const auto& c : r.per_clip) {
    double mean = 0.0;
    for (long long e : c.frame_errors) mean += static_cast<double>(e);
    if (!c.frame_errors.empty()) mean /= static_cast<double>(c.frame_errors.size());
    out << c.id << ',' << c.predicted_count << ',' << c.true_count << ','
        << (c.predicted_count == c.true_count ? 1 : 0) << ',' << c.matched.size() << ',' << format_double(mean) << '\n';
  }
}

}  // namespace gaitpipe
