// Acceptance runner: one line per criterion, nonzero exit when a gating
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "gaitpipe/evaluation.hpp"
#include "gaitpipe/ingestion.hpp"
#include "gaitpipe/pipeline.hpp"
#include "gaitpipe/report_io.hpp"
#include "gaitpipe/step_detection.hpp"
#include "gaitpipe/synth.hpp"
#include "scenario_grid.hpp"

using namespace gaitpipe;
using namespace gaitpipe::testing;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

constexpr int kGridSize = 50;

struct GridRun {
  GaitScenario scenario;
  SyntheticGroundTruth truth;
  AnalysisReport report;
};

std::vector<GridRun> run_grid(double noise, double* seconds = nullptr) {
  std::vector<GridRun> runs;
  const auto t0 = std::chrono::steady_clock::now();
  for (int seed = 0; seed < kGridSize; ++seed) {
    const auto sc = grid_scenario(static_cast<std::uint64_t>(seed), noise);
    auto clip = generate(sc);
    auto analysis = analyze_sequences({std::move(clip.sequence)}, RunConfig{}, sc.id);
    runs.push_back({sc, std::move(clip.truth), std::move(analysis.report)});
  }
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return runs;
}

EvalResult score(const std::vector<GridRun>& runs) {
  std::vector<EvalClip> clips;
  for (const auto& r : runs) {
    EvalClip c;
    c.id = r.scenario.id;
    c.frame_rate_hz = r.truth.frame_rate_hz;
    for (const auto& s : r.report.gait.steps) c.predicted.push_back(static_cast<long long>(s.frame));
    for (auto f : r.truth.step_frames) c.truth.push_back(static_cast<long long>(f));
    clips.push_back(std::move(c));
  }
  return evaluate(clips);
}

Outcome criterion1(const std::vector<GridRun>& runs, double seconds) {
  const auto ev = score(runs);
  long long worst = 0;
  for (const auto& c : ev.per_clip) {
    for (auto e : c.frame_errors) worst = std::max(worst, e);
  }
  const bool ok = ev.count_accuracy == 1.0 && worst <= 1 && seconds < 5.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "count_accuracy " + fmt(ev.count_accuracy, 2) + ", max frame error " + std::to_string(worst) + ", " +
              fmt(seconds, 2) + " s for " + std::to_string(kGridSize) + " clips"};
}

Outcome criterion2() {
  const auto ev = score(run_grid(0.01));
  const bool ok = ev.count_accuracy >= 0.85 && ev.mean_frame_error <= 4.4;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "count_accuracy " + fmt(ev.count_accuracy, 2) + " (need >= 0.85), mean frame error " +
              fmt(ev.mean_frame_error, 3) + " (need <= 4.4)"};
}

Outcome criterion3(const std::vector<GridRun>& runs) {
  double worst = 0;
  int missing = 0;
  for (const auto& r : runs) {
    const auto& g = r.report.gait;
    if (!g.step_length_m || !g.stride_left_m || !g.stride_right_m) {
      ++missing;
      continue;
    }
    worst = std::max(worst, std::abs(*g.step_length_m - (*g.stride_left_m + *g.stride_right_m)) / *g.step_length_m);
  }
  const bool ok = missing == 0 && worst <= 0.02;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "max relative gap " + fmt(100 * worst, 2) + "% (need <= 2%), clips without fields " + std::to_string(missing)};
}

Outcome criterion4(const std::vector<GridRun>& runs) {
  double worst = 0;
  int missing = 0;
  for (const auto& r : runs) {
    if (!r.report.gait.speed_mps) {
      ++missing;
      continue;
    }
    worst = std::max(worst, std::abs(*r.report.gait.speed_mps - r.truth.true_speed_mps) / r.truth.true_speed_mps);
  }
  const bool ok = missing == 0 && worst <= 0.05;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "max relative speed error " + fmt(100 * worst, 2) + "% (need <= 5%), clips without speed " +
              std::to_string(missing)};
}

// Invariances

constexpr int kCases = 100;

GaitScenario varied(Rng& rng, std::uint64_t seed, double noise) {
  GaitScenario sc;
  sc.cadence_hz = rng.uniform(1.0, 2.5);
  sc.step_length_left_m = rng.uniform(0.2, 0.7);
  sc.step_length_right_m = sc.step_length_left_m * rng.uniform(0.9, 1.1);
  sc.stance_width_m = rng.uniform(0.02, 0.2);
  sc.duration_s = rng.uniform(3, 6);
  sc.heading_deg = rng.uniform(0, 360);
  sc.noise_sigma_m = noise;
  sc.seed = seed;
  return sc;
}

struct Measured {
  StepDetectionResult det;
  GaitReport report;
};

Measured measure(const std::vector<Point3>& l, const std::vector<Point3>& r, const std::vector<double>& ts) {
  Measured m;
  m.det = detect_steps_from_signal(feet_distance(l, r), ts, DetectorParams{});
  m.report = compute_gait_report(assign_feet(m.det, l, r), m.det.minima());
  return m;
}

Measured measure(const PoseSequence& seq) {
  const auto [l, r] = complete_feet(foot_positions(seq));
  return measure(l, r, seq.timestamps());
}

bool near_opt(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) <= tol;
}

bool reports_near(const GaitReport& a, const GaitReport& b, double tol) {
  return a.n_steps == b.n_steps && near_opt(a.speed_mps, b.speed_mps, tol) &&
         near_opt(a.stride_left_m, b.stride_left_m, tol) && near_opt(a.stride_right_m, b.stride_right_m, tol) &&
         near_opt(a.step_length_m, b.step_length_m, tol) && near_opt(a.step_width_m, b.step_width_m, tol) &&
         near_opt(a.swing_time_s, b.swing_time_s, tol) && near_opt(a.asymmetry_index, b.asymmetry_index, tol);
}

int scale_failures() {
  Rng rng(501);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(i), 0.005));
    const double c = rng.uniform(0.2, 5.0);
    const auto a = measure(clip.sequence);
    const auto b = measure(map_positions(clip.sequence, [c](const Point3& p) { return p * c; }));
    bool ok = a.det.step_frames == b.det.step_frames && std::abs(b.det.threshold_theta - c * a.det.threshold_theta) <= 1e-12 * c;
    for (std::size_t t = 0; ok && t < a.det.signal.smoothed.size(); ++t) {
      ok = std::abs(b.det.signal.smoothed[t] - c * a.det.signal.smoothed[t]) <= 1e-12 * c;
    }
    if (ok && a.report.stride_left_m) ok = std::abs(*b.report.stride_left_m - c * *a.report.stride_left_m) <= 1e-9 * c;
    if (ok && a.report.speed_mps) ok = std::abs(*b.report.speed_mps - c * *a.report.speed_mps) <= 1e-9 * c;
    bad += ok ? 0 : 1;
  }
  return bad;
}

int rigid_failures() {
  Rng rng(502);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(i), 0.005));
    const auto motion = rigid_motion(rng.uniform(0, 6.3), Point3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 1)));
    const auto a = measure(clip.sequence);
    const auto b = measure(map_positions(clip.sequence, motion));
    bad += (a.det.step_frames == b.det.step_frames && reports_near(a.report, b.report, 1e-9)) ? 0 : 1;
  }
  return bad;
}

int time_shift_failures() {
  Rng rng(503);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(i), 0.0));
    const auto k = static_cast<std::size_t>(rng.integer(1, 20));
    const auto [l, r] = complete_feet(foot_positions(clip.sequence));
    std::vector<Point3> l2(k, l.front()), r2(k, r.front());
    l2.insert(l2.end(), l.begin(), l.end());
    r2.insert(r2.end(), r.begin(), r.end());
    const auto a = measure(feet_sequence(l, r));
    const auto b = measure(feet_sequence(l2, r2));
    bool ok = a.det.step_frames.size() == b.det.step_frames.size();
    for (std::size_t j = 0; ok && j < a.det.step_frames.size(); ++j) ok = b.det.step_frames[j] == a.det.step_frames[j] + k;
    ok = ok && reports_near(a.report, b.report, 1e-9);
    bad += ok ? 0 : 1;
  }
  return bad;
}

int time_scale_failures() {
  Rng rng(504);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(i), 0.005));
    const auto [l, r] = complete_feet(foot_positions(clip.sequence));
    auto ts = clip.sequence.timestamps();
    const auto a = measure(l, r, ts);
    const double c = rng.uniform(0.25, 4.0);
    for (auto& t : ts) t *= c;
    const auto b = measure(l, r, ts);
    const auto& ra = a.report;
    const auto& rb = b.report;
    bool ok = a.det.step_frames == b.det.step_frames && ra.speed_mps && rb.speed_mps;
    ok = ok && std::abs(*rb.speed_mps - *ra.speed_mps / c) <= 1e-12 * *ra.speed_mps;
    ok = ok && std::abs(*rb.swing_time_s - *ra.swing_time_s * c) <= 1e-12 * *rb.swing_time_s;
    ok = ok && rb.stride_left_m == ra.stride_left_m && rb.stride_right_m == ra.stride_right_m &&
         rb.step_length_m == ra.step_length_m && rb.step_width_m == ra.step_width_m;
    bad += ok ? 0 : 1;
  }
  return bad;
}

int smoothing_linearity_failures() {
  Rng rng(505);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    const auto n = static_cast<std::size_t>(rng.integer(1, 300));
    const int k = 2 * static_cast<int>(rng.integer(0, static_cast<long long>((n - 1) / 2))) + 1;
    std::vector<double> f(n), g(n), h(n);
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    for (std::size_t t = 0; t < n; ++t) {
      f[t] = rng.normal(1.0);
      g[t] = rng.normal(1.0);
      h[t] = a * f[t] + b * g[t];
    }
    const auto sf = smooth_uniform(f, k), sg = smooth_uniform(g, k), sh = smooth_uniform(h, k);
    bool ok = true;
    for (std::size_t t = 0; ok && t < n; ++t) ok = std::abs(sh[t] - (a * sf[t] + b * sg[t])) <= 1e-12;
    bad += ok ? 0 : 1;
  }
  return bad;
}

int determinism_failures() {
  Rng rng(506);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    auto sc = varied(rng, static_cast<std::uint64_t>(i), 0.01);
    sc.dropout_prob = 0.02;
    const auto a = analyze_sequences({generate(sc).sequence}, RunConfig{}, "d");
    const auto b = analyze_sequences({generate(sc).sequence}, RunConfig{}, "d");
    const bool ok = to_json(a.report).dump() == to_json(b.report).dump() &&
                    (!a.detection || to_json(*a.detection).dump() == to_json(*b.detection).dump());
    bad += ok ? 0 : 1;
  }
  return bad;
}

Outcome criterion5() {
  const std::vector<std::pair<std::string, std::function<int()>>> suite{
      {"scale", scale_failures},          {"rigid", rigid_failures},
      {"time-shift", time_shift_failures}, {"time-scale", time_scale_failures},
      {"smoothing-linearity", smoothing_linearity_failures}, {"determinism", determinism_failures}};
  std::string detail;
  bool ok = true;
  for (const auto& [name, run] : suite) {
    const int bad = run();
    ok = ok && bad == 0;
    if (!detail.empty()) detail += ", ";
    detail += name + " " + std::to_string(kCases - bad) + "/" + std::to_string(kCases);
  }
  return {ok ? Verdict::Pass : Verdict::Fail, detail};
}

// Minimum cost over all order-preserving injections of the shorter list.
long long brute_force_min(const std::vector<long long>& a, const std::vector<long long>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& l = a.size() <= b.size() ? b : a;
  if (s.empty()) return 0;
  long long best = std::numeric_limits<long long>::max();
  for (unsigned mask = 0; mask < (1u << l.size()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != s.size()) continue;
    long long cost = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < l.size(); ++j) {
      if (mask & (1u << j)) cost += std::llabs(s[k++] - l[j]);
    }
    best = std::min(best, cost);
  }
  return best;
}

bool matches_oracle(const std::vector<long long>& p, const std::vector<long long>& t) {
  const auto pairs = match_events(p, t);
  if (pairs.size() != std::min(p.size(), t.size())) return false;
  long long cost = 0;
  for (const auto& [a, b] : pairs) cost += std::llabs(a - b);
  return cost == brute_force_min(p, t);
}

Outcome criterion6() {
  // every pair of subsets of an irregular 8-frame domain, so all lengths 0..8
  const long long domain[8] = {0, 2, 3, 7, 11, 12, 18, 25};
  auto subset = [&](unsigned mask) {
    std::vector<long long> v;
    for (int i = 0; i < 8; ++i) {
      if (mask & (1u << i)) v.push_back(domain[i]);
    }
    return v;
  };
  const auto t0 = std::chrono::steady_clock::now();
  long long checked = 0, bad = 0;
  for (unsigned a = 0; a < 256; ++a) {
    const auto p = subset(a);
    for (unsigned b = 0; b < 256; ++b) {
      bad += matches_oracle(p, subset(b)) ? 0 : 1;
      ++checked;
    }
  }
  Rng rng(601);
  for (int n = 0; n <= 8; ++n) {
    for (int m = 0; m <= 8; ++m) {
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<long long> p(static_cast<std::size_t>(n)), t(static_cast<std::size_t>(m));
        for (auto& v : p) v = rng.integer(0, 200);
        for (auto& v : t) v = rng.integer(0, 200);
        std::sort(p.begin(), p.end());
        std::sort(t.begin(), t.end());
        bad += matches_oracle(p, t) ? 0 : 1;
        ++checked;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {bad == 0 ? Verdict::Pass : Verdict::Fail,
          std::to_string(checked - bad) + "/" + std::to_string(checked) + " list pairs agree with brute force, " +
              fmt(secs, 2) + " s"};
}

// Walk segments from UTKinect actionLabel.txt: "<seq>" lines followed by
// "<action>: <start> <end>" lines.
std::map<std::string, std::pair<long long, long long>> walk_segments(const fs::path& labels) {
  std::map<std::string, std::pair<long long, long long>> out;
  std::ifstream in(labels);
  std::string line, current;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      current = line;
      continue;
    }
    if (line.substr(0, colon) != "walk") continue;
    std::istringstream rest(line.substr(colon + 1));
    long long a = 0, b = 0;
    if (rest >> a >> b) out[current] = {a, b};
  }
  return out;
}

Outcome criterion7() {
  const char* dir_env = std::getenv("GAITPIPE_UTKINECT_DIR");
  if (!dir_env || !*dir_env) return {Verdict::Skip, "GAITPIPE_UTKINECT_DIR not set"};
  const fs::path dir(dir_env);
  const auto labels = dir / "actionLabel.txt";
  const auto notes = dir / "step_annotations.json";
  if (!fs::exists(labels) || !fs::exists(notes)) {
    return {Verdict::Skip, "needs actionLabel.txt and step_annotations.json in " + dir.string()};
  }
  try {
    const auto segments = walk_segments(labels);
    const auto annotated = load_json_file(notes);
    RunConfig cfg;
    // Kinect camera space is y-up
    cfg.detector.plane = Plane::parse("xz");
    cfg.filter.min_height_m = 0.0;
    int clips = 0, agree = 0, implausible = 0;
    for (const auto& [seq, range] : segments) {
      if (!annotated.contains(seq)) continue;
      const auto path = dir / ("joints_" + seq + ".txt");
      if (!fs::exists(path)) continue;
      const auto full = parse_kinect_skeleton_file(path);
      std::vector<SkeletonFrame> frames;
      for (const auto& f : full.frames()) {
        if (f.frame_index() >= range.first && f.frame_index() <= range.second) frames.push_back(f);
      }
      if (frames.empty()) continue;
      ++clips;
      const auto res = analyze_sequences({PoseSequence(frames, full.frame_rate_hz(), seq)}, cfg, seq);
      const auto& g = res.report.gait;
      if (g.n_steps == annotated[seq].get<int>()) ++agree;
      auto in = [](const std::optional<double>& v, double lo, double hi) { return v && *v >= lo && *v <= hi; };
      if (res.report.status == "ok" && !(in(g.speed_mps, 0.1, 2.0) && in(g.stride_left_m, 0.05, 1.2) &&
                                         in(g.stride_right_m, 0.05, 1.2) && in(g.step_length_m, 0.05, 1.2))) {
        ++implausible;
      }
    }
    if (clips == 0) return {Verdict::Skip, "no annotated walk clips found"};
    const double rate = static_cast<double>(agree) / clips;
    const bool ok = rate >= 0.75 && implausible == 0;
    return {ok ? Verdict::Pass : Verdict::Fail, "count agreement " + fmt(rate, 2) + " over " + std::to_string(clips) +
                                                    " clips, implausible reports " + std::to_string(implausible)};
  } catch (const std::exception& e) {
    return {Verdict::Fail, e.what()};
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_points(const PoseSequence& a, const PoseSequence& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& fa = a.frames()[i];
    const auto& fb = b.frames()[i];
    if (fa.frame_index() != fb.frame_index() || fa.joints().size() != fb.joints().size()) return false;
    for (const auto& j : fa.joints()) {
      const auto* o = fb.find(j.kind);
      if (!o || !(o->position == j.position)) return false;
    }
  }
  return true;
}

Outcome criterion8() {
  Rng rng(801);
  int bad = 0;
  for (int i = 0; i < kCases; ++i) {
    auto sc = varied(rng, static_cast<std::uint64_t>(i), rng.uniform(0, 0.02));
    sc.duration_s = 1.5;
    const auto clip = generate(sc);
    std::ostringstream k1, k2;
    write_kinect_skeleton(k1, clip.sequence);
    std::istringstream kin(k1.str());
    const auto kback = parse_kinect_skeleton(kin, "k", sc.frame_rate_hz);
    write_kinect_skeleton(k2, kback);
    bool ok = k1.str() == k2.str() && same_points(kback, clip.sequence);

    sc.dropout_prob = 0.1;
    const auto holes = generate(sc);
    std::ostringstream j1, j2;
    write_pose_jsonl(j1, {holes.sequence});
    std::istringstream jin(j1.str());
    const auto jback = parse_pose_jsonl(jin);
    ok = ok && jback.size() == 1 && same_points(jback[0], holes.sequence);
    if (ok) {
      write_pose_jsonl(j2, jback);
      ok = j1.str() == j2.str();
    }
    bad += ok ? 0 : 1;
  }

  const fs::path data(GAITPIPE_TEST_DATA);
  const auto out = fs::temp_directory_path() / "gaitpipe_acceptance_golden";
  fs::remove_all(out);
  fs::create_directories(out);
  std::vector<std::string> mismatched;
  for (const std::string input : {"walk_fixture.jsonl", "walk_kinect.txt"}) {
    const std::string cmd = std::string(GAITPIPE_CLI) + " analyze " + (data / input).string() + " --plots --out " +
                            out.string() + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0) {
      mismatched.push_back(input + " (analyze failed)");
      continue;
    }
    const auto stem = fs::path(input).stem().string();
    for (const std::string ext : {".report.json", ".distance.svg"}) {
      const auto golden = data / "golden" / (stem + ext);
      if (!fs::exists(golden) || slurp(golden) != slurp(out / (stem + ext))) mismatched.push_back(stem + ext);
    }
  }
  std::string detail = "parser round trips " + std::to_string(kCases - bad) + "/" + std::to_string(kCases) +
                       ", golden files " + (mismatched.empty() ? "identical" : "differ:");
  for (const auto& m : mismatched) detail += " " + m;
  return {bad == 0 && mismatched.empty() ? Verdict::Pass : Verdict::Fail, detail};
}

}  // namespace

int main() {
  double seconds = 0;
  std::vector<GridRun> clean;
  std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] {
         clean = run_grid(0.0, &seconds);
         return criterion1(clean, seconds);
       }},
      {2, criterion2},
      {3, [&] { return criterion3(clean); }},
      {4, [&] { return criterion4(clean); }},
      {5, criterion5},
      {6, criterion6},
      {7, criterion7},
      {8, criterion8}};
  bool gating_failed = false;
  for (const auto& [n, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* word = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Skip ? "SKIP" : "FAIL";
    std::cout << "criterion " << n << ": " << word << " - " << o.detail << std::endl;
    // criterion 7 depends on external data and never gates
    if (o.verdict == Verdict::Fail && n != 7) gating_failed = true;
  }
  return gating_failed ? 1 : 0;
}
