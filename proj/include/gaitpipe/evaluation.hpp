#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gaitpipe {

using FramePair = std::pair<long long, long long>;  // (predicted, truth)

/// Order-preserving assignment of the shorter list into the longer one with
/// minimum total |pred - truth|. Equal lengths pair in order. Both inputs
/// must be sorted ascending.
std::vector<FramePair> match_events(std::span<const long long> predicted, std::span<const long long> truth);

struct EvalClip {
  std::string id;
  std::vector<long long> predicted;
  std::vector<long long> truth;
  double frame_rate_hz = 30.0;
};

struct ClipEval {
  std::string id;
  std::size_t predicted_count = 0;
  std::size_t true_count = 0;
  std::vector<FramePair> matched;
  std::vector<long long> frame_errors;
  std::vector<long long> unmatched_predicted;
  std::vector<long long> unmatched_truth;
  double frame_rate_hz = 30.0;
};

struct EvalResult {
  std::size_t n_clips = 0;
  double count_accuracy = 0.0;
  /// Mean L1 frame error over all matched pairs of all clips.
  double mean_frame_error = 0.0;
  double mean_time_error_s = 0.0;
  std::size_t n_matched = 0;
  /// Sorted by clip id.
  std::vector<ClipEval> per_clip;
};

/// Throws EmptyEvaluation for no clips.
EvalResult evaluate(std::span<const EvalClip> clips);

}  // namespace gaitpipe
