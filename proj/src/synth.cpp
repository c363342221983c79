#include "gaitpipe/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "gaitpipe/gait_metrics.hpp"

namespace gaitpipe {

void GaitScenario::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::ScenarioInvalid, what); };
  const double finite_check[] = {step_length_left_m, step_length_right_m, cadence_hz, duration_s, stance_width_m,
                                 noise_sigma_m,      dropout_prob,        heading_deg, frame_rate_hz, start_time_s};
  for (double v : finite_check) {
    if (!std::isfinite(v)) bad("non-finite scenario parameter");
  }
  if (step_length_left_m < 0 || step_length_right_m < 0) bad("step lengths must be >= 0");
  if (stance_width_m < 0 || noise_sigma_m < 0 || duration_s < 0) bad("magnitudes must be >= 0");
  if (!(cadence_hz > 0)) bad("cadence_hz must be > 0");
  if (!(frame_rate_hz > 0)) bad("frame_rate_hz must be > 0");
  if (!(dropout_prob >= 0 && dropout_prob < 1)) bad("dropout_prob must lie in [0, 1)");
  if (std::floor(duration_s * cadence_hz + 1e-9) < 1) bad("duration too short for one step at this cadence");
}

namespace {

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

struct FeetForward {
  double left = 0.0;
  double right = 0.0;
};

// Forward coordinate of each foot at time tau, measured from the uncounted
// lead-in maximum (event 0). Swing k spans [(k-1) T, k T] and ends at event k.
FeetForward feet_forward(const GaitScenario& sc, double tau) {
  const double period = 1.0 / sc.cadence_hz;
  const Foot f1 = sc.first_swing;
  const double a = f1 == Foot::Left ? sc.step_length_left_m : sc.step_length_right_m;
  const double b = f1 == Foot::Left ? sc.step_length_right_m : sc.step_length_left_m;
  const double cycle = a + b;

  const double x = tau / period;
  const auto k = static_cast<long long>(std::floor(x)) + 1;
  const double phase = x - static_cast<double>(k - 1);
  const double s = smoothstep(std::clamp(phase, 0.0, 1.0));

  double pos_f1 = 0.0;
  double pos_s0 = 0.0;
  if (k % 2 != 0) {
    // f1 swings into event k = 2m + 1
    const auto m = static_cast<double>((k - 1) / 2);
    pos_f1 = m * cycle + cycle * s;
    pos_s0 = m * cycle + b;
  } else {
    // s0 swings into event k = 2m
    const double m = static_cast<double>(k / 2);
    pos_f1 = m * cycle;
    pos_s0 = (m - 1.0) * cycle + b + cycle * s;
  }
  return f1 == Foot::Left ? FeetForward{pos_f1, pos_s0} : FeetForward{pos_s0, pos_f1};
}

struct BodyOffset {
  JointId id;
  double lateral;
  double up;
};

// Upper body rides on the midpoint between the feet.
constexpr std::array<BodyOffset, 12> kUpperBody{{
    {JointId::HipCenter, 0.0, 0.95},
    {JointId::Spine, 0.0, 1.20},
    {JointId::ShoulderCenter, 0.0, 1.45},
    {JointId::Head, 0.0, 1.65},
    {JointId::ShoulderLeft, 0.18, 1.42},
    {JointId::ElbowLeft, 0.20, 1.15},
    {JointId::WristLeft, 0.21, 0.92},
    {JointId::HandLeft, 0.21, 0.84},
    {JointId::ShoulderRight, -0.18, 1.42},
    {JointId::ElbowRight, -0.20, 1.15},
    {JointId::WristRight, -0.21, 0.92},
    {JointId::HandRight, -0.21, 0.84},
}};

std::size_t counted_steps(const GaitScenario& sc) {
  return static_cast<std::size_t>(std::floor(sc.duration_s * sc.cadence_hz + 1e-9));
}

double clip_start_tau(const GaitScenario& sc) { return -kLeadInSwings / sc.cadence_hz; }

}  // namespace

double synthetic_feet_distance(const GaitScenario& sc, double t) {
  const auto f = feet_forward(sc, clip_start_tau(sc) + t);
  const double df = f.left - f.right;
  return std::sqrt(df * df + sc.stance_width_m * sc.stance_width_m);
}

SyntheticClip generate(const GaitScenario& sc) {
  sc.validate();
  const double period = 1.0 / sc.cadence_hz;
  const std::size_t n_steps = counted_steps(sc);
  const double tau0 = clip_start_tau(sc);
  const double clip_len = (static_cast<double>(n_steps) + kLeadInSwings + kLeadOutSwings) * period;
  const auto n_frames = static_cast<std::size_t>(std::floor(clip_len * sc.frame_rate_hz + 1e-9)) + 1;

  const double heading = sc.heading_deg * std::numbers::pi / 180.0;
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  auto to_world = [&](double forward, double lateral, double up) {
    return Point3(forward * ch - lateral * sh, forward * sh + lateral * ch, up);
  };
  const double half_w = 0.5 * sc.stance_width_m;

  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::bernoulli_distribution drop(sc.dropout_prob);

  std::vector<SkeletonFrame> frames;
  frames.reserve(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const double t_rel = static_cast<double>(i) / sc.frame_rate_hz;
    const auto f = feet_forward(sc, tau0 + t_rel);
    const double mid = 0.5 * (f.left + f.right);

    std::vector<Joint> joints;
    joints.reserve(kKinectJointCount);
    auto add = [&](JointId id, const Point3& p) { joints.push_back(Joint{JointKind(id), p, 1.0, false}); };
    for (const auto& o : kUpperBody) add(o.id, to_world(mid, o.lateral, o.up));
    add(JointId::HipLeft, to_world(mid, 0.1, 0.92));
    add(JointId::KneeLeft, to_world(0.5 * (mid + f.left), 0.5 * (0.1 + half_w), 0.5));
    add(JointId::AnkleLeft, to_world(f.left, half_w, 0.08));
    add(JointId::FootLeft, to_world(f.left, half_w, 0.02));
    add(JointId::HipRight, to_world(mid, -0.1, 0.92));
    add(JointId::KneeRight, to_world(0.5 * (mid + f.right), -0.5 * (0.1 + half_w), 0.5));
    add(JointId::AnkleRight, to_world(f.right, -half_w, 0.08));
    add(JointId::FootRight, to_world(f.right, -half_w, 0.02));

    std::vector<Joint> kept;
    kept.reserve(joints.size());
    for (auto& j : joints) {
      if (sc.noise_sigma_m > 0.0) {
        const double nx = sc.noise_sigma_m * jitter(rng);
        const double ny = sc.noise_sigma_m * jitter(rng);
        const double nz = sc.noise_sigma_m * jitter(rng);
        j.position = j.position + Point3(nx, ny, nz);
      }
      if (sc.dropout_prob > 0.0 && drop(rng)) continue;
      kept.push_back(std::move(j));
    }
    frames.emplace_back(static_cast<std::int64_t>(i), sc.start_time_s + t_rel, std::move(kept));
  }

  SyntheticClip clip{PoseSequence(std::move(frames), sc.frame_rate_hz, sc.id), {}};
  auto& gt = clip.truth;
  gt.frame_rate_hz = sc.frame_rate_hz;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double t_event = static_cast<double>(k) * period - tau0;
    gt.step_frames.push_back(static_cast<std::size_t>(std::llround(t_event * sc.frame_rate_hz)));
    gt.swing_foot.push_back(k % 2 == 1 ? sc.first_swing : opposite(sc.first_swing));
  }
  const double w = sc.stance_width_m;
  gt.true_stride_left_m = std::hypot(sc.step_length_left_m, w);
  gt.true_stride_right_m = std::hypot(sc.step_length_right_m, w);
  gt.true_step_length_m = sc.step_length_left_m + sc.step_length_right_m;
  gt.true_speed_mps = 0.5 * gt.true_step_length_m * sc.cadence_hz;
  gt.true_swing_time_s = period;
  gt.true_step_width_m = w;
  if (gt.true_stride_left_m + gt.true_stride_right_m > 0.0) {
    gt.true_asymmetry_index = asymmetry_index(gt.true_stride_left_m, gt.true_stride_right_m);
  }
  return clip;
}

}  // namespace gaitpipe
