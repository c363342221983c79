#include "gaitpipe/evaluation.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <tuple>

#include "gaitpipe/error.hpp"

namespace gaitpipe {

std::vector<FramePair> match_events(std::span<const long long> predicted, std::span<const long long> truth) {
  if (!std::is_sorted(predicted.begin(), predicted.end()) || !std::is_sorted(truth.begin(), truth.end())) {
    throw Error(ErrorCode::InvalidArgument, "event lists must be sorted ascending");
  }
  const bool pred_shorter = predicted.size() <= truth.size();
  const auto shorter = pred_shorter ? predicted : truth;
  const auto longer = pred_shorter ? truth : predicted;
  const std::size_t n = shorter.size();
  const std::size_t m = longer.size();
  std::vector<FramePair> pairs;
  if (n == 0) return pairs;

  // cost[i][j]: best total for the first i of `shorter` inside the first j of `longer`.
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<std::vector<long long>> cost(n + 1, std::vector<long long>(m + 1, kInf));
  for (std::size_t j = 0; j <= m; ++j) cost[0][j] = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i; j <= m; ++j) {
      const long long skip = cost[i][j - 1];
      const long long take = cost[i - 1][j - 1] + std::llabs(shorter[i - 1] - longer[j - 1]);
      cost[i][j] = std::min(skip, take);
    }
  }
  std::size_t i = n, j = m;
  while (i > 0) {
    const long long take = cost[i - 1][j - 1] + std::llabs(shorter[i - 1] - longer[j - 1]);
    if (cost[i][j] == take) {
      pairs.push_back(pred_shorter ? FramePair{shorter[i - 1], longer[j - 1]} : FramePair{longer[j - 1], shorter[i - 1]});
      --i;
    }
    --j;
  }
  std::reverse(pairs.begin(), pairs.end());
  return pairs;
}

EvalResult evaluate(std::span<const EvalClip> clips) {
  if (clips.empty()) throw Error(ErrorCode::EmptyEvaluation, "no clips to evaluate");
  EvalResult res;
  res.n_clips = clips.size();
  std::size_t exact = 0;
  long long total_frames = 0;
  std::vector<double> time_errors;
  for (const auto& c : clips) {
    if (!(c.frame_rate_hz > 0.0)) throw Error(ErrorCode::InvalidArgument, "clip '" + c.id + "' has no frame rate");
    ClipEval ce;
    ce.id = c.id;
    ce.predicted_count = c.predicted.size();
    ce.true_count = c.truth.size();
    ce.frame_rate_hz = c.frame_rate_hz;
    ce.matched = match_events(c.predicted, c.truth);
    for (const auto& [p, t] : ce.matched) {
      const long long e = std::llabs(p - t);
      ce.frame_errors.push_back(e);
      total_frames += e;
      time_errors.push_back(static_cast<double>(e) / c.frame_rate_hz);
    }
    auto unmatched = [](const std::vector<long long>& all, auto proj, const std::vector<FramePair>& pairs) {
      std::vector<long long> used;
      for (const auto& pr : pairs) used.push_back(proj(pr));
      std::vector<long long> out;
      std::size_t k = 0;
      for (long long v : all) {
        if (k < used.size() && used[k] == v) ++k;
        else out.push_back(v);
      }
      return out;
    };
    ce.unmatched_predicted = unmatched(c.predicted, [](const FramePair& p) { return p.first; }, ce.matched);
    ce.unmatched_truth = unmatched(c.truth, [](const FramePair& p) { return p.second; }, ce.matched);
    if (ce.predicted_count == ce.true_count) ++exact;
    res.n_matched += ce.matched.size();
    res.per_clip.push_back(std::move(ce));
  }
  res.count_accuracy = static_cast<double>(exact) / static_cast<double>(res.n_clips);
  if (res.n_matched > 0) {
    res.mean_frame_error = static_cast<double>(total_frames) / static_cast<double>(res.n_matched);
    const bool uniform_rate = std::all_of(clips.begin(), clips.end(), [&](const EvalClip& c) {
      return c.frame_rate_hz == clips.front().frame_rate_hz;
    });
    if (uniform_rate) {
      res.mean_time_error_s = res.mean_frame_error / clips.front().frame_rate_hz;
    } else {
      // summed in sorted order so the result does not depend on clip order
      std::sort(time_errors.begin(), time_errors.end());
      res.mean_time_error_s =
          std::accumulate(time_errors.begin(), time_errors.end(), 0.0) / static_cast<double>(res.n_matched);
    }
  }
  std::sort(res.per_clip.begin(), res.per_clip.end(), [](const ClipEval& a, const ClipEval& b) {
    return std::tie(a.id, a.matched, a.predicted_count, a.true_count) <
           std::tie(b.id, b.matched, b.predicted_count, b.true_count);
  });
  return res;
}

}  // namespace gaitpipe
