#include "gaitpipe/pose_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

namespace gaitpipe {

void FilterParams::validate() const {
  if (min_track_frames < 1) throw Error(ErrorCode::InvalidArgument, "min_track_frames must be >= 1");
  if (max_gap_frames < 0) throw Error(ErrorCode::InvalidArgument, "max_gap_frames must be >= 0");
  if (!(min_height_m > 0.0) || !(max_height_m > 0.0) || !(max_width_m > 0.0) || !(max_centroid_jump_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "filter bounds must be positive");
  }
  if (!(min_height_m < max_height_m)) throw Error(ErrorCode::InvalidArgument, "min_height_m must be < max_height_m");
}

PoseSequence filter_dimensions(const PoseSequence& seq, const FilterParams& p, Plane plane) {
  p.validate();
  const int up = static_cast<int>(plane.vertical());
  const int h0 = static_cast<int>(plane.first);
  const int h1 = static_cast<int>(plane.second);
  std::vector<SkeletonFrame> kept;
  for (const auto& f : seq.frames()) {
    if (f.joints().empty()) continue;
    double lo[3];
    double hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::numeric_limits<double>::infinity();
      hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (const auto& j : f.joints()) {
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], j.position[a]);
        hi[a] = std::max(hi[a], j.position[a]);
      }
    }
    const double height = hi[up] - lo[up];
    const double width = std::max(hi[h0] - lo[h0], hi[h1] - lo[h1]);
    if (height < p.min_height_m || height > p.max_height_m || width > p.max_width_m) continue;
    kept.push_back(f);
  }
  return PoseSequence(std::move(kept), seq.frame_rate_hz(), seq.source_id());
}

namespace {

Point3 centroid(const SkeletonFrame& f) {
  double s[3] = {0, 0, 0};
  for (const auto& j : f.joints()) {
    for (int a = 0; a < 3; ++a) s[a] += j.position[a];
  }
  const double n = static_cast<double>(f.joints().size());
  return {s[0] / n, s[1] / n, s[2] / n};
}

double distance3(const Point3& a, const Point3& b) {
  const Point3 d = a - b;
  return std::sqrt(d.x() * d.x() + d.y() * d.y() + d.z() * d.z());
}

struct Detection {
  const SkeletonFrame* frame;
  const PoseSequence* source;
  Point3 centroid;
};

// Content order for tie-breaking, independent of input order.
bool content_less(const Detection& a, const Detection& b) {
  const auto ka = std::make_tuple(a.centroid.x(), a.centroid.y(), a.centroid.z(), a.frame->joints().size());
  const auto kb = std::make_tuple(b.centroid.x(), b.centroid.y(), b.centroid.z(), b.frame->joints().size());
  if (ka != kb) return ka < kb;
  return a.source->source_id() < b.source->source_id();
}

struct Track {
  std::vector<const SkeletonFrame*> frames;
  std::vector<const PoseSequence*> sources;
  Point3 last_centroid;
  std::int64_t last_index = 0;
  std::size_t order = 0;
  bool closed = false;
};

}  // namespace

std::vector<PoseSequence> filter_temporal(std::span<const PoseSequence> detections, const FilterParams& p) {
  p.validate();
  std::map<double, std::vector<Detection>> by_time;
  for (const auto& seq : detections) {
    for (const auto& f : seq.frames()) {
      if (f.joints().empty()) continue;
      by_time[f.timestamp()].push_back({&f, &seq, centroid(f)});
    }
  }

  std::vector<Track> tracks;
  for (auto& [t, dets] : by_time) {
    std::sort(dets.begin(), dets.end(), content_less);
    const std::int64_t idx = dets.front().frame->frame_index();
    for (auto& tr : tracks) {
      if (!tr.closed && idx - tr.last_index - 1 > p.max_gap_frames) tr.closed = true;
    }
    struct Candidate {
      double dist;
      std::size_t track;
      std::size_t det;
    };
    std::vector<Candidate> cands;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      const auto& tr = tracks[ti];
      if (tr.closed) continue;
      for (std::size_t di = 0; di < dets.size(); ++di) {
        if (dets[di].frame->frame_index() <= tr.last_index) continue;
        const auto gap = static_cast<double>(dets[di].frame->frame_index() - tr.last_index);
        const double d = distance3(tr.last_centroid, dets[di].centroid);
        if (d <= p.max_centroid_jump_m * gap) cands.push_back({d, ti, di});
      }
    }
    std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
      return std::tie(a.dist, tracks[a.track].order, a.det) < std::tie(b.dist, tracks[b.track].order, b.det);
    });
    std::vector<bool> track_used(tracks.size(), false);
    std::vector<bool> det_used(dets.size(), false);
    for (const auto& c : cands) {
      if (track_used[c.track] || det_used[c.det]) continue;
      track_used[c.track] = true;
      det_used[c.det] = true;
      auto& tr = tracks[c.track];
      tr.frames.push_back(dets[c.det].frame);
      tr.sources.push_back(dets[c.det].source);
      tr.last_centroid = dets[c.det].centroid;
      tr.last_index = dets[c.det].frame->frame_index();
    }
    for (std::size_t di = 0; di < dets.size(); ++di) {
      if (det_used[di]) continue;
      Track tr;
      tr.frames.push_back(dets[di].frame);
      tr.sources.push_back(dets[di].source);
      tr.last_centroid = dets[di].centroid;
      tr.last_index = dets[di].frame->frame_index();
      tr.order = tracks.size();
      tracks.push_back(std::move(tr));
    }
  }

  std::vector<const Track*> kept;
  for (const auto& tr : tracks) {
    if (static_cast<int>(tr.frames.size()) >= p.min_track_frames) kept.push_back(&tr);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Track* a, const Track* b) {
    if (a->frames.size() != b->frames.size()) return a->frames.size() > b->frames.size();
    return a->order < b->order;
  });

  std::vector<PoseSequence> out;
  for (const Track* tr : kept) {
    std::vector<SkeletonFrame> frames;
    frames.reserve(tr->frames.size());
    for (const auto* f : tr->frames) frames.push_back(*f);
    const PoseSequence* src = tr->sources.front();
    const bool single_source = std::all_of(tr->sources.begin(), tr->sources.end(),
                                           [&](const PoseSequence* s) { return s == src; });
    std::string id = single_source ? src->source_id() : "track" + std::to_string(tr->order);
    out.emplace_back(std::move(frames), src->frame_rate_hz(), std::move(id));
  }
  return out;
}

InterpolationResult interpolate_gaps(const PoseSequence& seq, const FilterParams& p,
                                     std::span<const JointKind> required) {
  p.validate();
  InterpolationResult result;
  if (seq.empty()) {
    result.sequence = seq;
    return result;
  }
  const auto frames = seq.frames();
  const std::int64_t first = frames.front().frame_index();
  const std::int64_t last = frames.back().frame_index();
  const auto n_slots = static_cast<std::size_t>(last - first + 1);

  // slot -> original frame
  std::vector<const SkeletonFrame*> original(n_slots, nullptr);
  for (const auto& f : frames) original[static_cast<std::size_t>(f.frame_index() - first)] = &f;

  std::vector<JointKind> kinds;
  for (const auto& f : frames) {
    for (const auto& j : f.joints()) kinds.push_back(j.kind);
  }
  std::sort(kinds.begin(), kinds.end());
  kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

  std::vector<JointKind> req(required.begin(), required.end());
  if (req.empty()) req = kinds;

  // slot -> joints (observed or filled)
  std::vector<std::vector<Joint>> slot_joints(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s) {
    if (original[s] != nullptr) slot_joints[s].assign(original[s]->joints().begin(), original[s]->joints().end());
  }
  auto find_in = [](const std::vector<Joint>& js, const JointKind& k) -> const Joint* {
    for (const auto& j : js) {
      if (j.kind == k) return &j;
    }
    return nullptr;
  };

  for (const auto& kind : kinds) {
    std::vector<const Joint*> present(n_slots, nullptr);
    for (std::size_t s = 0; s < n_slots; ++s) {
      if (original[s] != nullptr) present[s] = original[s]->find(kind);
    }
    std::optional<std::size_t> prev;
    for (std::size_t s = 0; s < n_slots; ++s) {
      if (present[s] == nullptr) continue;
      if (prev && s - *prev > 1 && static_cast<int>(s - *prev - 1) <= p.max_gap_frames) {
        const Joint& a = *present[*prev];
        const Joint& b = *present[s];
        const double span = static_cast<double>(s - *prev);
        for (std::size_t m = *prev + 1; m < s; ++m) {
          const double w = static_cast<double>(m - *prev) / span;
          Joint j;
          j.kind = kind;
          j.position = a.position + (b.position - a.position) * w;
          j.confidence = a.confidence + (b.confidence - a.confidence) * w;
          j.interpolated = true;
          slot_joints[m].push_back(std::move(j));
          ++result.interpolated_entries;
        }
      }
      prev = s;
    }
  }

  std::vector<bool> valid(n_slots, false);
  for (std::size_t s = 0; s < n_slots; ++s) {
    valid[s] = std::all_of(req.begin(), req.end(),
                           [&](const JointKind& k) { return find_in(slot_joints[s], k) != nullptr; });
    if (original[s] == nullptr && slot_joints[s].empty()) valid[s] = false;
  }

  // Longest run of valid slots; ties go to the earliest.
  std::size_t best_begin = 0, best_len = 0, pieces = 0;
  for (std::size_t s = 0; s < n_slots;) {
    if (!valid[s]) {
      ++s;
      continue;
    }
    std::size_t e = s;
    while (e < n_slots && valid[e]) ++e;
    ++pieces;
    if (e - s > best_len) {
      best_begin = s;
      best_len = e - s;
    }
    s = e;
  }
  result.splits = pieces > 0 ? static_cast<int>(pieces) - 1 : 0;

  // Timestamps of filled slots interpolate between the surrounding originals.
  std::vector<SkeletonFrame> out;
  out.reserve(best_len);
  std::optional<std::size_t> left_orig;
  for (std::size_t s = 0; s < best_begin + best_len; ++s) {
    if (original[s] != nullptr) left_orig = s;
    if (s < best_begin) continue;
    if (original[s] != nullptr) {
      if (slot_joints[s].size() == original[s]->joints().size()) {
        out.push_back(*original[s]);
      } else {
        out.emplace_back(original[s]->frame_index(), original[s]->timestamp(), slot_joints[s]);
      }
      continue;
    }
    std::size_t right = s + 1;
    while (original[right] == nullptr) ++right;
    const auto& a = *original[*left_orig];
    const auto& b = *original[right];
    const double w = static_cast<double>(s - *left_orig) / static_cast<double>(right - *left_orig);
    const double ts = a.timestamp() + (b.timestamp() - a.timestamp()) * w;
    out.emplace_back(first + static_cast<std::int64_t>(s), ts, slot_joints[s]);
  }
  result.sequence = PoseSequence(std::move(out), seq.frame_rate_hz(), seq.source_id());
  return result;
}

}  // namespace gaitpipe
