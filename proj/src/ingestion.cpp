#include "gaitpipe/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "gaitpipe/keyvalue.hpp"

namespace gaitpipe {

using json = nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

namespace {

std::string line_ref(const std::string& origin, int lineno) {
  return origin + ":" + std::to_string(lineno);
}

}  // namespace

PoseSequence parse_kinect_skeleton(std::istream& in, const std::string& source_id, double frame_rate_hz) {
  if (!(frame_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame rate must be positive");
  std::vector<SkeletonFrame> frames;
  std::string line;
  int lineno = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++lineno;
    fields.clear();
    std::string_view rest(line);
    while (true) {
      auto b = rest.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) break;
      rest.remove_prefix(b);
      auto e = rest.find_first_of(" \t\r");
      fields.push_back(rest.substr(0, e));
      if (e == std::string_view::npos) break;
      rest.remove_prefix(e);
    }
    if (fields.empty()) continue;
    constexpr std::size_t kExpected = 1 + 3 * kKinectJointCount;
    if (fields.size() != kExpected) {
      throw Error(ErrorCode::FormatError, line_ref(source_id, lineno) + ": expected " + std::to_string(kExpected) +
                                              " fields, got " + std::to_string(fields.size()));
    }
    long long index = 0;
    {
      auto f = fields[0];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), index);
      if (ec != std::errc() || ptr != f.data() + f.size() || index < 0) {
        throw Error(ErrorCode::FormatError, line_ref(source_id, lineno) + ": bad frame index '" + std::string(f) + "'");
      }
    }
    if (!frames.empty() && index <= frames.back().frame_index()) {
      throw Error(ErrorCode::FormatError, line_ref(source_id, lineno) + ": frame index " + std::to_string(index) +
                                              " does not increase");
    }
    std::vector<Joint> joints;
    joints.reserve(kKinectJointCount);
    for (int j = 0; j < kKinectJointCount; ++j) {
      double xyz[3];
      for (int c = 0; c < 3; ++c) {
        const auto tok = fields[static_cast<std::size_t>(1 + 3 * j + c)];
        auto v = parse_double(tok);
        if (!v || !std::isfinite(*v)) {
          throw Error(ErrorCode::FormatError,
                      line_ref(source_id, lineno) + ": unparsable number '" + std::string(tok) + "'");
        }
        xyz[c] = *v;
      }
      joints.push_back(Joint{JointKind(static_cast<JointId>(j)), Point3(xyz[0], xyz[1], xyz[2]), 1.0, false});
    }
    frames.emplace_back(index, static_cast<double>(index) / frame_rate_hz, std::move(joints));
  }
  if (frames.empty()) throw Error(ErrorCode::EmptyInput, source_id + ": no frames");
  return PoseSequence(std::move(frames), frame_rate_hz, source_id);
}

PoseSequence parse_kinect_skeleton_file(const std::filesystem::path& path, double frame_rate_hz) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_kinect_skeleton(in, path.string(), frame_rate_hz);
}

void write_kinect_skeleton(std::ostream& out, const PoseSequence& seq) {
  for (const auto& f : seq.frames()) {
    out << f.frame_index();
    for (int j = 0; j < kKinectJointCount; ++j) {
      const Joint* joint = f.find(JointKind(static_cast<JointId>(j)));
      if (joint == nullptr) {
        throw Error(ErrorCode::FormatError, "frame " + std::to_string(f.frame_index()) + " lacks joint " +
                                                JointKind(static_cast<JointId>(j)).name() +
                                                "; the Kinect format cannot encode missing joints");
      }
      const Point3& p = joint->position;
      out << ' ' << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    }
    out << '\n';
  }
}

namespace {

struct Record {
  double t = 0.0;
  std::optional<long long> frame;
  std::optional<double> fps;
  std::vector<Joint> joints;
  int lineno = 0;
};

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::FormatError, where + ": missing numeric field '" + key + "'");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::FormatError, where + ": non-finite '" + key + "'");
  return v;
}

double estimate_frame_rate(const std::vector<Record>& recs) {
  std::vector<double> dts;
  for (std::size_t i = 1; i < recs.size(); ++i) dts.push_back(recs[i].t - recs[i - 1].t);
  if (dts.empty()) return kDefaultFrameRateHz;
  std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
  const double median = dts[dts.size() / 2];
  return median > 0.0 ? 1.0 / median : kDefaultFrameRateHz;
}

}  // namespace

std::vector<PoseSequence> parse_pose_jsonl(std::istream& in, const std::string& origin, const JsonlOptions& options) {
  std::map<std::string, std::vector<Record>> tracks;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = line_ref(origin, lineno);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::FormatError, where + ": invalid JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(ErrorCode::FormatError, where + ": record is not an object");
    Record rec;
    rec.lineno = lineno;
    rec.t = require_number(obj, "t", where);
    std::string track = "0";
    if (auto it = obj.find("track"); it != obj.end()) {
      if (it->is_string()) {
        track = it->get<std::string>();
      } else if (it->is_number_integer()) {
        track = std::to_string(it->get<long long>());
      } else {
        throw Error(ErrorCode::FormatError, where + ": 'track' must be a string");
      }
    }
    if (auto it = obj.find("frame"); it != obj.end()) {
      if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw Error(ErrorCode::FormatError, where + ": 'frame' must be a nonnegative integer");
      }
      rec.frame = it->get<long long>();
    }
    if (auto it = obj.find("fps"); it != obj.end()) {
      if (!it->is_number() || !(it->get<double>() > 0.0)) {
        throw Error(ErrorCode::FormatError, where + ": 'fps' must be positive");
      }
      rec.fps = it->get<double>();
    }
    auto jit = obj.find("joints");
    if (jit == obj.end() || !jit->is_array()) throw Error(ErrorCode::FormatError, where + ": missing 'joints' array");
    for (const auto& jo : *jit) {
      if (!jo.is_object()) throw Error(ErrorCode::FormatError, where + ": joint entry is not an object");
      auto nit = jo.find("name");
      if (nit == jo.end() || !nit->is_string()) throw Error(ErrorCode::FormatError, where + ": joint without 'name'");
      Joint joint;
      joint.kind = JointKind::from_name(nit->get<std::string>());
      joint.position = Point3(require_number(jo, "x", where), require_number(jo, "y", where),
                              require_number(jo, "z", where));
      if (jo.contains("conf")) joint.confidence = require_number(jo, "conf", where);
      if (!(joint.confidence >= 0.0 && joint.confidence <= 1.0)) {
        throw Error(ErrorCode::FormatError, where + ": 'conf' outside [0,1]");
      }
      if (auto iit = jo.find("interp"); iit != jo.end() && iit->is_boolean()) joint.interpolated = iit->get<bool>();
      rec.joints.push_back(std::move(joint));
    }
    tracks[track].push_back(std::move(rec));
  }
  if (tracks.empty()) throw Error(ErrorCode::EmptyInput, origin + ": no records");

  std::vector<PoseSequence> out;
  for (auto& [track, recs] : tracks) {
    std::stable_sort(recs.begin(), recs.end(), [](const Record& a, const Record& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < recs.size(); ++i) {
      if (recs[i].t == recs[i - 1].t) {
        throw Error(ErrorCode::DuplicateTimestamp, line_ref(origin, recs[i].lineno) + ": track '" + track +
                                                       "' repeats t=" + format_double(recs[i].t));
      }
    }
    double fps = 0.0;
    if (options.frame_rate_hz) {
      fps = *options.frame_rate_hz;
    } else if (recs.front().fps) {
      fps = *recs.front().fps;
    } else {
      fps = estimate_frame_rate(recs);
    }
    std::vector<SkeletonFrame> frames;
    frames.reserve(recs.size());
    const double t0 = recs.front().t;
    long long prev = -1;
    for (auto& r : recs) {
      long long idx = r.frame ? *r.frame : std::llround((r.t - t0) * fps);
      if (idx <= prev) {
        if (r.frame) {
          throw Error(ErrorCode::FormatError, line_ref(origin, r.lineno) + ": 'frame' does not increase with t");
        }
        idx = prev + 1;
      }
      prev = idx;
      try {
        frames.emplace_back(idx, r.t, std::move(r.joints));
      } catch (const Error& e) {
        throw Error(ErrorCode::FormatError, line_ref(origin, r.lineno) + ": " + e.what());
      }
    }
    out.emplace_back(std::move(frames), fps, track);
  }
  return out;
}

std::vector<PoseSequence> parse_pose_jsonl_file(const std::filesystem::path& path, const JsonlOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_pose_jsonl(in, path.string(), options);
}

void write_pose_jsonl(std::ostream& out, const std::vector<PoseSequence>& seqs) {
  for (const auto& seq : seqs) {
    for (const auto& f : seq.frames()) {
      json rec = json::object();
      rec["t"] = f.timestamp();
      rec["track"] = seq.source_id();
      rec["frame"] = f.frame_index();
      rec["fps"] = seq.frame_rate_hz();
      json joints = json::array();
      for (const auto& j : f.joints()) {
        json jo = {{"name", j.kind.name()},
                   {"x", j.position.x()},
                   {"y", j.position.y()},
                   {"z", j.position.z()},
                   {"conf", j.confidence}};
        if (j.interpolated) jo["interp"] = true;
        joints.push_back(std::move(jo));
      }
      rec["joints"] = std::move(joints);
      out << rec.dump() << '\n';
    }
  }
}

}  // namespace gaitpipe
