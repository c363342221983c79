#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <limits>

#include "gaitpipe/evaluation.hpp"
#include "test_support.hpp"

using namespace gaitpipe;
using namespace gaitpipe::testing;

namespace {

long long total_l1(const std::vector<FramePair>& pairs) {
  long long s = 0;
  for (const auto& [p, t] : pairs) s += std::llabs(p - t);
  return s;
}

// Minimum over every order-preserving injection of the shorter list into the
// longer one, by enumerating index subsets of the longer list.
long long brute_force_min(const std::vector<long long>& a, const std::vector<long long>& b) {
  const auto& s = a.size() <= b.size() ? a : b;
  const auto& l = a.size() <= b.size() ? b : a;
  if (s.empty()) return 0;
  long long best = std::numeric_limits<long long>::max();
  const std::size_t m = l.size();
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != s.size()) continue;
    long long cost = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask & (1u << j)) cost += std::llabs(s[k++] - l[j]);
    }
    best = std::min(best, cost);
  }
  return best;
}

void check_against_oracle(const std::vector<long long>& pred, const std::vector<long long>& truth) {
  const auto pairs = match_events(pred, truth);
  ASSERT_EQ(pairs.size(), std::min(pred.size(), truth.size()));
  ASSERT_EQ(total_l1(pairs), brute_force_min(pred, truth));
  // pairs use each element once, in order, and come from the right lists
  std::size_t ip = 0, it = 0;
  for (const auto& [p, t] : pairs) {
    while (ip < pred.size() && pred[ip] != p) ++ip;
    while (it < truth.size() && truth[it] != t) ++it;
    ASSERT_LT(ip, pred.size());
    ASSERT_LT(it, truth.size());
    ++ip;
    ++it;
  }
}

std::vector<long long> from_mask(unsigned mask, int domain) {
  std::vector<long long> v;
  for (int i = 0; i < domain; ++i) {
    if (mask & (1u << i)) v.push_back(3 * i);
  }
  return v;
}

}  // namespace

TEST(MatchEvents, EqualCountsPairInOrder) {
  const std::vector<long long> p{10, 20, 30}, t{12, 19, 31};
  const auto pairs = match_events(p, t);
  EXPECT_EQ(pairs, (std::vector<FramePair>{{10, 12}, {20, 19}, {30, 31}}));
  EXPECT_EQ(total_l1(pairs), 4);
}

TEST(MatchEvents, SkipsUnmatchedTruth) {
  const std::vector<long long> p{10, 30}, t{10, 20, 30};
  EXPECT_EQ(match_events(p, t), (std::vector<FramePair>{{10, 10}, {30, 30}}));
  EXPECT_EQ(brute_force_min(p, t), 0);
}

TEST(MatchEvents, EmptyListHasNoPairs) {
  const std::vector<long long> none, some{1, 2};
  EXPECT_TRUE(match_events(none, some).empty());
  EXPECT_TRUE(match_events(some, none).empty());
}

TEST(MatchEvents, RejectsUnsorted) {
  const std::vector<long long> p{3, 1}, t{1};
  EXPECT_GP_ERROR(InvalidArgument, match_events(p, t));
}

TEST(MatchEvents, ExhaustiveSmallDomainAgainstBruteForce) {
  // every pair of strictly increasing lists drawn from 7 candidate frames
  constexpr int kDomain = 7;
  for (unsigned a = 0; a < (1u << kDomain); ++a) {
    for (unsigned b = 0; b < (1u << kDomain); ++b) {
      check_against_oracle(from_mask(a, kDomain), from_mask(b, kDomain));
    }
  }
}

TEST(MatchEvents, RandomListsUpToEightAgainstBruteForce) {
  Rng rng(101);
  for (int n = 0; n <= 8; ++n) {
    for (int m = 0; m <= 8; ++m) {
      for (int trial = 0; trial < 60; ++trial) {
        std::vector<long long> p(static_cast<std::size_t>(n)), t(static_cast<std::size_t>(m));
        for (auto& v : p) v = rng.integer(0, 60);
        for (auto& v : t) v = rng.integer(0, 60);
        std::sort(p.begin(), p.end());
        std::sort(t.begin(), t.end());
        check_against_oracle(p, t);
      }
    }
  }
}

TEST(Evaluate, SeventeenOfTwentyExact) {
  std::vector<EvalClip> clips;
  for (int i = 0; i < 20; ++i) {
    EvalClip c;
    c.id = "clip" + std::to_string(i);
    c.truth = {10, 25, 40, 55};
    c.predicted = c.truth;
    if (i < 3) c.predicted.push_back(70);
    clips.push_back(c);
  }
  const auto res = evaluate(clips);
  EXPECT_EQ(res.n_clips, 20u);
  EXPECT_DOUBLE_EQ(res.count_accuracy, 0.85);
  EXPECT_EQ(res.mean_frame_error, 0.0);
  EXPECT_EQ(res.per_clip[0].unmatched_predicted, (std::vector<long long>{70}));
}

TEST(Evaluate, PerfectClips) {
  std::vector<EvalClip> clips{{"a", {1, 5}, {1, 5}, 30.0}, {"b", {}, {}, 30.0}};
  const auto res = evaluate(clips);
  EXPECT_EQ(res.count_accuracy, 1.0);
  EXPECT_EQ(res.mean_frame_error, 0.0);
  EXPECT_EQ(res.mean_time_error_s, 0.0);
}

TEST(Evaluate, FrameAndTimeErrors) {
  std::vector<EvalClip> clips{{"a", {10, 20, 30}, {12, 19, 31}, 30.0}, {"b", {10, 30}, {10, 20, 30}, 30.0}};
  const auto res = evaluate(clips);
  EXPECT_EQ(res.n_matched, 5u);
  EXPECT_DOUBLE_EQ(res.mean_frame_error, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(res.mean_time_error_s, 4.0 / 5.0 / 30.0);
  EXPECT_DOUBLE_EQ(res.count_accuracy, 0.5);
  EXPECT_EQ(res.per_clip[1].unmatched_truth, (std::vector<long long>{20}));
}

TEST(Evaluate, MixedFrameRates) {
  std::vector<EvalClip> clips{{"a", {10}, {13}, 30.0}, {"b", {10}, {16}, 60.0}};
  const auto res = evaluate(clips);
  EXPECT_DOUBLE_EQ(res.mean_frame_error, 4.5);
  EXPECT_DOUBLE_EQ(res.mean_time_error_s, (0.1 + 0.1) / 2);
}

TEST(Evaluate, Empty) { EXPECT_GP_ERROR(EmptyEvaluation, evaluate({})); }

TEST(Evaluate, PermutationInvariantAndTimeConsistent) {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EvalClip> clips;
    const double fps = rng.coin() ? 30.0 : 60.0;
    const auto n = rng.integer(1, 12);
    for (long long i = 0; i < n; ++i) {
      EvalClip c;
      c.id = "c" + std::to_string(i);
      c.frame_rate_hz = fps;
      for (long long k = 0, f = 0; k < rng.integer(0, 10); ++k) c.truth.push_back(f += rng.integer(5, 20));
      for (long long k = 0, f = 0; k < rng.integer(0, 10); ++k) c.predicted.push_back(f += rng.integer(5, 20));
      clips.push_back(c);
    }
    const auto a = evaluate(clips);
    std::shuffle(clips.begin(), clips.end(), rng.engine());
    const auto b = evaluate(clips);
    EXPECT_EQ(a.count_accuracy, b.count_accuracy);
    EXPECT_EQ(a.mean_frame_error, b.mean_frame_error);
    EXPECT_EQ(a.mean_time_error_s, b.mean_time_error_s);
    ASSERT_EQ(a.per_clip.size(), b.per_clip.size());
    for (std::size_t i = 0; i < a.per_clip.size(); ++i) EXPECT_EQ(a.per_clip[i].matched, b.per_clip[i].matched);
    EXPECT_GE(a.count_accuracy, 0.0);
    EXPECT_LE(a.count_accuracy, 1.0);
    EXPECT_GE(a.mean_frame_error, 0.0);
    EXPECT_DOUBLE_EQ(a.mean_time_error_s * fps, a.mean_frame_error);
  }
}
