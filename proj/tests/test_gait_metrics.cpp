#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "gaitpipe/gait_metrics.hpp"
#include "gaitpipe/synth.hpp"
#include "test_support.hpp"

using namespace gaitpipe;
using namespace gaitpipe::testing;

namespace {

StepEvent event(std::size_t frame, double t, Foot foot, double separation, Point3 l = {}, Point3 r = {}) {
  StepEvent e;
  e.frame = frame;
  e.time = t;
  e.foot = foot;
  e.separation = separation;
  e.left_pos = l;
  e.right_pos = r;
  return e;
}

struct Analyzed {
  StepDetectionResult det;
  std::vector<StepEvent> events;
  GaitReport report;
};

Analyzed analyze(const PoseSequence& seq) {
  Analyzed a;
  const auto [l, r] = complete_feet(foot_positions(seq));
  a.det = detect_steps_from_signal(feet_distance(l, r), seq.timestamps(), DetectorParams{});
  a.events = assign_feet(a.det, l, r);
  a.report = compute_gait_report(a.events, a.det.minima());
  return a;
}

// Hand-made detection result over given foot tracks with maxima at `maxima`
// and minima at `minima`.
StepDetectionResult handmade(const std::vector<Point3>& l, const std::vector<Point3>& r,
                             const std::vector<std::size_t>& maxima, const std::vector<std::size_t>& minima) {
  StepDetectionResult res;
  res.signal.raw = feet_distance(l, r);
  res.signal.smoothed = res.signal.raw;
  for (std::size_t i = 0; i < l.size(); ++i) res.signal.timestamps.push_back(static_cast<double>(i) / 30.0);
  for (auto f : minima) res.filtered_extrema.push_back({f, res.signal.raw[f], res.signal.raw[f], ExtremumKind::Min});
  for (auto f : maxima) res.filtered_extrema.push_back({f, res.signal.raw[f], res.signal.raw[f], ExtremumKind::Max});
  std::sort(res.filtered_extrema.begin(), res.filtered_extrema.end(),
            [](const Extremum& a, const Extremum& b) { return a.frame < b.frame; });
  res.extrema = res.filtered_extrema;
  res.step_frames = maxima;
  return res;
}

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

void expect_reports_near(const GaitReport& a, const GaitReport& b, double tol) {
  auto near = [tol](const std::optional<double>& x, const std::optional<double>& y, const char* what) {
    ASSERT_EQ(x.has_value(), y.has_value()) << what;
    if (x) EXPECT_NEAR(*x, *y, tol) << what;
  };
  EXPECT_EQ(a.n_steps, b.n_steps);
  near(a.speed_mps, b.speed_mps, "speed");
  near(a.stride_left_m, b.stride_left_m, "stride_left");
  near(a.stride_right_m, b.stride_right_m, "stride_right");
  near(a.step_length_m, b.step_length_m, "step_length");
  near(a.step_width_m, b.step_width_m, "step_width");
  near(a.swing_time_s, b.swing_time_s, "swing_time");
  near(a.asymmetry_index, b.asymmetry_index, "asymmetry");
}

}  // namespace

TEST(AsymmetryIndex, Examples) {
  EXPECT_EQ(asymmetry_index(0.4, 0.4), 0.0);
  EXPECT_DOUBLE_EQ(asymmetry_index(0.4, 0.0), 2.0);
  // |0.399 - 0.339| / 0.369 = 0.16260...
  const double expected = 0.06 / 0.369;
  EXPECT_NEAR(asymmetry_index(0.399, 0.339), expected, 1e-12);
  EXPECT_EQ(std::round(asymmetry_index(0.399, 0.339) * 1e4) / 1e4, 0.1626);
}

TEST(AsymmetryIndex, Errors) {
  EXPECT_GP_ERROR(BothZero, asymmetry_index(0.0, 0.0));
  EXPECT_GP_ERROR(InvalidArgument, asymmetry_index(-0.1, 0.2));
}

TEST(GaitReport, SpeedSpansOneSwingPerStride) {
  const std::vector<StepEvent> ev{event(0, 0.0, Foot::Left, 0.4), event(27, 0.9, Foot::Right, 0.34),
                                  event(54, 1.8, Foot::Left, 0.4)};
  const auto rep = compute_gait_report(ev, {});
  ASSERT_TRUE(rep.speed_mps);
  // 1.14 m of strides over 1.8 s between maxima plus one 0.9 s swing.
  EXPECT_NEAR(*rep.speed_mps, 1.14 / 2.7, 1e-12);
  EXPECT_NEAR(*rep.swing_time_s, 0.9, 1e-12);
  EXPECT_NEAR(*rep.stride_left_m, 0.4, 1e-12);
  EXPECT_NEAR(*rep.stride_right_m, 0.34, 1e-12);
  EXPECT_EQ(rep.n_steps, 3);
}

TEST(GaitReport, SingleEventLeavesTimeFieldsAbsent) {
  const std::vector<StepEvent> ev{event(5, 0.2, Foot::Right, 0.3)};
  const auto rep = compute_gait_report(ev, {});
  EXPECT_FALSE(rep.speed_mps);
  EXPECT_FALSE(rep.swing_time_s);
  EXPECT_FALSE(rep.step_length_m);
  EXPECT_FALSE(rep.step_width_m);
  EXPECT_FALSE(rep.stride_left_m);
  EXPECT_FALSE(rep.asymmetry_index);
  ASSERT_TRUE(rep.stride_right_m);
  EXPECT_EQ(*rep.stride_right_m, 0.3);
  ASSERT_EQ(rep.steps.size(), 1u);
  EXPECT_FALSE(rep.steps[0].swing_time_s);
}

TEST(GaitReport, StepLengthFromSameFootPlacements) {
  const std::vector<StepEvent> ev{
      event(10, 1.0, Foot::Left, 0.5, {0.5, 0, 0}, {0, 0.1, 0}),
      event(20, 2.0, Foot::Right, 0.5, {0.5, 0, 0}, {1.0, 0.1, 0}),
      event(30, 3.0, Foot::Left, 0.5, {1.5, 0, 0}, {1.0, 0.1, 0}),
      event(40, 4.0, Foot::Right, 0.5, {1.5, 0, 0}, {2.0, 0.1, 0}),
  };
  const std::vector<Extremum> minima{{15, 0.1, 0.12, ExtremumKind::Min}, {25, 0.2, 0.22, ExtremumKind::Min}};
  const auto rep = compute_gait_report(ev, minima);
  EXPECT_EQ(rep.samples.step_length, (std::vector<double>{1.0, 1.0}));
  EXPECT_NEAR(*rep.step_width_m, 0.15, 1e-15);
  MetricsOptions smoothed;
  smoothed.width_source = WidthSource::Smoothed;
  EXPECT_NEAR(*compute_gait_report(ev, minima, smoothed).step_width_m, 0.17, 1e-15);
}

TEST(GaitReport, RejectsUnorderedEvents) {
  const std::vector<StepEvent> ev{event(10, 1.0, Foot::Left, 0.5), event(5, 1.0, Foot::Right, 0.5)};
  EXPECT_GP_ERROR(InvalidArgument, compute_gait_report(ev, {}));
}

TEST(AssignFeet, LargerDisplacementSwings) {
  std::vector<Point3> l(10), r(10);
  for (std::size_t i = 0; i < 10; ++i) {
    l[i] = Point3(0.4 * static_cast<double>(i) / 9.0, 0.1, 0);
    r[i] = Point3(0.02 * static_cast<double>(i) / 9.0, -0.1, 0);
  }
  const auto det = handmade(l, r, {9}, {});
  const auto ev = assign_feet(det, l, r);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].foot, Foot::Left);
  EXPECT_FALSE(ev[0].forced);
  EXPECT_EQ(ev[0].separation, det.signal.raw[9]);
}

TEST(AssignFeet, AlternationOverridesAndFlags) {
  // The left foot moves in both intervals.
  std::vector<Point3> l(21), r(21, Point3(0, -0.1, 0));
  for (std::size_t i = 0; i < 21; ++i) l[i] = Point3(0.04 * static_cast<double>(i), 0.1, 0);
  const auto det = handmade(l, r, {10, 20}, {5, 15});
  const auto ev = assign_feet(det, l, r);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].foot, Foot::Left);
  EXPECT_FALSE(ev[0].forced);
  EXPECT_EQ(ev[1].foot, Foot::Right);
  EXPECT_TRUE(ev[1].forced);
}

TEST(AssignFeet, SymmetricSynthAlternatesFromRight) {
  GaitScenario sc;
  sc.first_swing = Foot::Right;
  const auto clip = generate(sc);
  const auto a = analyze(clip.sequence);
  ASSERT_EQ(a.events.size(), clip.truth.swing_foot.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    EXPECT_EQ(a.events[i].foot, clip.truth.swing_foot[i]) << i;
    EXPECT_FALSE(a.events[i].forced);
  }
}

TEST(AssignFeet, MatchesGeneratorSwingFoot) {
  Rng rng(81);
  for (int trial = 0; trial < 100; ++trial) {
    auto sc = varied(rng, static_cast<std::uint64_t>(trial), 0.0);
    sc.first_swing = rng.coin() ? Foot::Left : Foot::Right;
    const auto clip = generate(sc);
    const auto a = analyze(clip.sequence);
    ASSERT_EQ(a.events.size(), clip.truth.swing_foot.size()) << trial;
    for (std::size_t i = 0; i < a.events.size(); ++i) EXPECT_EQ(a.events[i].foot, clip.truth.swing_foot[i]);
  }
}

TEST(GaitReport, SymmetricGaitAdditivityAndZeroAsymmetry) {
  GaitScenario sc;
  sc.step_length_left_m = sc.step_length_right_m = 0.35;
  sc.stance_width_m = 0.035;
  const auto a = analyze(generate(sc).sequence);
  const auto& r = a.report;
  ASSERT_TRUE(r.stride_left_m && r.stride_right_m && r.step_length_m && r.asymmetry_index);
  EXPECT_NEAR(*r.stride_left_m, *r.stride_right_m, 1e-12);
  EXPECT_NEAR(*r.asymmetry_index, 0.0, 1e-12);
  const double sum = *r.stride_left_m + *r.stride_right_m;
  EXPECT_LE(std::abs(*r.step_length_m - sum) / *r.step_length_m, 0.02);
}

TEST(GaitReport, MeansEqualSampleMeansAndSamplesNonnegative) {
  Rng rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = analyze(generate(varied(rng, static_cast<std::uint64_t>(trial), 0.01)).sequence);
    const auto& r = a.report;
    const auto& s = r.samples;
    auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    for (const auto* v : {&s.stride_left, &s.stride_right, &s.step_length, &s.step_width, &s.swing_time}) {
      for (double x : *v) EXPECT_GE(x, 0.0);
    }
    if (r.stride_left_m) EXPECT_EQ(*r.stride_left_m, mean(s.stride_left));
    if (r.stride_right_m) EXPECT_EQ(*r.stride_right_m, mean(s.stride_right));
    if (r.step_length_m) EXPECT_EQ(*r.step_length_m, mean(s.step_length));
    if (r.step_width_m) EXPECT_EQ(*r.step_width_m, mean(s.step_width));
    if (r.swing_time_s) EXPECT_EQ(*r.swing_time_s, mean(s.swing_time));
    EXPECT_EQ(r.n_steps, static_cast<int>(a.events.size()));
    for (std::size_t i = 1; i < a.events.size(); ++i) EXPECT_NE(a.events[i].foot, a.events[i - 1].foot);
  }
}

TEST(GaitReport, RigidMotionInvariance) {
  Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(trial), 0.005));
    const auto moved = map_positions(
        clip.sequence, rigid_motion(rng.uniform(0, 6.3), Point3(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-1, 1))));
    const auto a = analyze(clip.sequence);
    const auto b = analyze(moved);
    ASSERT_EQ(a.det.step_frames, b.det.step_frames) << trial;
    expect_reports_near(a.report, b.report, 1e-9);
  }
}

TEST(GaitReport, TimeScaleCovariance) {
  Rng rng(84);
  for (int trial = 0; trial < 100; ++trial) {
    const auto clip = generate(varied(rng, static_cast<std::uint64_t>(trial), 0.005));
    const auto [l, r] = complete_feet(foot_positions(clip.sequence));
    const auto raw = feet_distance(l, r);
    auto ts = clip.sequence.timestamps();
    const auto det1 = detect_steps_from_signal(raw, ts, DetectorParams{});
    for (auto& t : ts) t *= 2.0;
    const auto det2 = detect_steps_from_signal(raw, ts, DetectorParams{});
    const auto r1 = compute_gait_report(assign_feet(det1, l, r), det1.minima());
    const auto r2 = compute_gait_report(assign_feet(det2, l, r), det2.minima());
    ASSERT_TRUE(r1.speed_mps && r2.speed_mps);
    EXPECT_EQ(*r2.speed_mps, *r1.speed_mps / 2.0);
    EXPECT_EQ(*r2.swing_time_s, *r1.swing_time_s * 2.0);
    EXPECT_EQ(r2.stride_left_m, r1.stride_left_m);
    EXPECT_EQ(r2.stride_right_m, r1.stride_right_m);
    EXPECT_EQ(r2.step_length_m, r1.step_length_m);
    EXPECT_EQ(r2.step_width_m, r1.step_width_m);
    EXPECT_EQ(r2.asymmetry_index, r1.asymmetry_index);
  }
}
