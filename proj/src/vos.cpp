// Copyright 2026 The Gazeloop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gazeloop/vos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace gazeloop {

const char* region_source_name(RegionSource source) {
  return source == RegionSource::kUser ? "user" : "propagated";
}

RegionSource region_source_from_name(const std::string& name) {
  if (name == "user") return RegionSource::kUser;
  if (name == "propagated") return RegionSource::kPropagated;
  throw std::invalid_argument("unknown region source: " + name);
}

void validate(const VosConfig& config) {
  if (!(config.gate_sigma_fraction > 0.0)) throw std::invalid_argument("gate sigma must be > 0");
  if (!(config.match_threshold >= -1.0 && config.match_threshold <= 1.0)) {
    throw std::invalid_argument("match threshold must lie in [-1, 1]");
  }
  if (!(config.memory_decay > 0.0 && config.memory_decay <= 1.0)) {
    throw std::invalid_argument("memory decay must lie in (0, 1]");
  }
  if (!(config.velocity_smoothing > 0.0 && config.velocity_smoothing <= 1.0)) {
    throw std::invalid_argument("velocity smoothing must lie in (0, 1]");
  }
  if (config.capacity == 0) throw std::invalid_argument("memory capacity must be >= 1");
  if (!(config.seed_iou > 0.0 && config.seed_iou <= 1.0)) {
    throw std::invalid_argument("seed iou must lie in (0, 1]");
  }
}

VosMemory::VosMemory(VosConfig config, FrameSize frame_size)
    : config_(config), frame_size_(frame_size) {
  validate(config_);
  if (!(frame_size.width > 0.0 && frame_size.height > 0.0)) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
}

void VosMemory::upsert(MemoryEntry entry) {
  for (const auto& e : entries_) {
    if (e.instance_id != entry.instance_id && e.key.size() != entry.key.size()) {
      throw std::invalid_argument("memory key dimension mismatch");
    }
  }
  next_id_ = std::max(next_id_, entry.instance_id + 1);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const MemoryEntry& e) { return e.instance_id == entry.instance_id; });
  if (it != entries_.end()) {
    *it = std::move(entry);
  } else {
    entries_.push_back(std::move(entry));
  }
  evict_to_capacity();
}

std::int64_t VosMemory::next_provisional_id() { return next_id_++; }

void VosMemory::evict_to_capacity() {
  while (entries_.size() > config_.capacity) {
    auto oldest = std::max_element(entries_.begin(), entries_.end(),
                                   [](const MemoryEntry& a, const MemoryEntry& b) {
                                     return std::tie(a.age, b.instance_id) <
                                            std::tie(b.age, a.instance_id);
                                   });
    entries_.erase(oldest);
  }
}

BoundingBox predicted_box(const MemoryEntry& entry) {
  const double steps = static_cast<double>(entry.age + 1);
  return entry.box.translated(entry.velocity_x * steps, entry.velocity_y * steps);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine of vectors of different length");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

DenseMatrix memory_read(std::span<const DetectionRecord> detections, const VosMemory& memory) {
  const auto& entries = memory.entries();
  DenseMatrix c(detections.size(), entries.size());
  const double sigma = memory.config().gate_sigma_fraction * memory.frame_size().diagonal();
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const BoundingBox expected = predicted_box(entries[k]);
    for (std::size_t i = 0; i < detections.size(); ++i) {
      const auto& det = detections[i];
      if (det.descriptor.size() != entries[k].key.size()) {
        throw std::invalid_argument("descriptor dimension differs from memory keys");
      }
      const double dx = det.box.center_x() - expected.center_x();
      const double dy = det.box.center_y() - expected.center_y();
      c(i, k) = cosine_similarity(det.descriptor, entries[k].key) *
                std::exp(-(dx * dx + dy * dy) / denom);
    }
  }
  return c;
}

Assignment assign_labels(std::span<const DetectionRecord> detections, VosMemory& memory,
                         const DenseMatrix& correlation) {
  const auto& entries = memory.entries();
  if (correlation.rows() != detections.size() || correlation.cols() != entries.size()) {
    throw std::invalid_argument("correlation matrix does not match detections and memory");
  }
  struct Candidate {
    double value;
    std::size_t det;
    std::size_t entry;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < correlation.rows(); ++i)
    for (std::size_t k = 0; k < correlation.cols(); ++k)
      if (correlation(i, k) >= memory.config().match_threshold)
        candidates.push_back({correlation(i, k), i, k});
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  Assignment out;
  std::vector<bool> det_used(detections.size(), false), entry_used(entries.size(), false);
  for (const auto& c : candidates) {
    if (det_used[c.det] || entry_used[c.entry]) continue;
    det_used[c.det] = entry_used[c.entry] = true;
    out.matches.emplace_back(c.det, c.entry);
  }
  std::sort(out.matches.begin(), out.matches.end());

  out.regions.resize(detections.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    out.regions[i].frame = detections[i].frame;
    out.regions[i].box = detections[i].box;
    out.regions[i].source = RegionSource::kPropagated;
  }
  for (const auto& [i, k] : out.matches) {
    out.regions[i].label = entries[k].label;
    out.regions[i].instance_id = entries[k].instance_id;
  }
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (det_used[i]) continue;
    out.regions[i].label = kBackground;
    out.regions[i].instance_id = memory.next_provisional_id();
  }
  return out;
}

void memory_write(std::span<const DetectionRecord> detections, VosMemory& memory,
                  const DenseMatrix& correlation, const MatchList& matches) {
  auto& entries = memory.mutable_entries();
  if (correlation.rows() != detections.size() || correlation.cols() != entries.size()) {
    throw std::invalid_argument("correlation matrix does not match detections and memory");
  }
  std::vector<bool> det_used(detections.size(), false), entry_used(entries.size(), false);
  for (const auto& [i, k] : matches) {
    if (i >= detections.size() || k >= entries.size()) {
      throw std::invalid_argument("match index out of range");
    }
    if (det_used[i] || entry_used[k]) throw std::invalid_argument("matches are not injective");
    det_used[i] = entry_used[k] = true;
  }

  const double alpha = memory.config().memory_decay;
  const double beta = memory.config().velocity_smoothing;
  for (const auto& [i, k] : matches) {
    auto& e = entries[k];
    const auto& det = detections[i];
    if (det.descriptor.size() != e.key.size()) {
      throw std::invalid_argument("descriptor dimension differs from memory keys");
    }
    for (std::size_t j = 0; j < e.key.size(); ++j) {
      e.key[j] = (1.0 - alpha) * e.key[j] + alpha * det.descriptor[j];
    }
    const double steps = static_cast<double>(e.age + 1);
    const double vx = (det.box.center_x() - e.box.center_x()) / steps;
    const double vy = (det.box.center_y() - e.box.center_y()) / steps;
    e.velocity_x = (1.0 - beta) * e.velocity_x + beta * vx;
    e.velocity_y = (1.0 - beta) * e.velocity_y + beta * vy;
    e.box = det.box;
    e.age = 0;
  }
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!entry_used[k]) ++entries[k].age;
  }
  const std::size_t max_age = memory.config().max_age;
  std::erase_if(entries, [&](const MemoryEntry& e) { return e.age > max_age; });
}

std::size_t seed_memory(VosMemory& memory, std::span<const AnnotatedRegion> regions,
                        std::span<const DetectionRecord> detections) {
  std::size_t written = 0;
  std::vector<bool> used(detections.size(), false);
  for (const auto& region : regions) {
    require_valid(region.box, "seed region");
    if (region.label == kBackground) continue;
    std::optional<std::size_t> best;
    double best_iou = memory.config().seed_iou;
    for (std::size_t i = 0; i < detections.size(); ++i) {
      if (used[i]) continue;
      const double o = iou(region.box, detections[i].box);
      if (o >= best_iou) {
        best_iou = o;
        best = i;
      }
    }
    if (!best) continue;
    used[*best] = true;
    MemoryEntry entry;
    entry.key = detections[*best].descriptor;
    entry.label = region.label;
    entry.instance_id = region.instance_id;
    entry.box = detections[*best].box;
    for (const auto& e : memory.entries()) {
      if (e.instance_id == region.instance_id) {
        entry.velocity_x = e.velocity_x;
        entry.velocity_y = e.velocity_y;
      }
    }
    memory.upsert(std::move(entry));
    ++written;
  }
  return written;
}

std::vector<AnnotatedRegion> propagate_frame(VosMemory& memory, std::size_t frame,
                                             std::span<const DetectionRecord> detections) {
  const DenseMatrix c = memory_read(detections, memory);
  Assignment a = assign_labels(detections, memory, c);
  memory_write(detections, memory, c, a.matches);
  for (auto& r : a.regions) r.frame = frame;
  return std::move(a.regions);
}

std::vector<std::vector<AnnotatedRegion>> propagate_annotations(
    std::span<const AnnotatedRegion> seed, std::size_t t0, std::size_t t1,
    std::span<const std::vector<DetectionRecord>> detections, const VosConfig& config,
    FrameSize frame_size) {
  if (t1 < t0) throw std::invalid_argument("propagation range is empty");
  if (t1 >= detections.size()) throw std::invalid_argument("frame range exceeds detections");
  for (const auto& r : seed) {
    if (r.frame != t0) throw std::invalid_argument("seed region is not on the seed frame");
  }
  VosMemory memory(config, frame_size);
  seed_memory(memory, seed, detections[t0]);
  std::vector<std::vector<AnnotatedRegion>> out;
  out.emplace_back(seed.begin(), seed.end());
  for (std::size_t t = t0 + 1; t <= t1; ++t) {
    out.push_back(propagate_frame(memory, t, detections[t]));
  }
  return out;
}

}  // namespace gazeloop
