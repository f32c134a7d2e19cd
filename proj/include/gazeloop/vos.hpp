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

#pragma once

// Region-level annotation propagation. A memory holds one entry per tracked
// instance; each frame is processed as read (correlate detections with the
// memory), assign (greedy labelling) and write (update matched entries).

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gazeloop/geometry.hpp"
#include "gazeloop/numerics.hpp"
#include "gazeloop/proposals.hpp"

namespace gazeloop {

enum class RegionSource { kUser, kPropagated };

const char* region_source_name(RegionSource source);
RegionSource region_source_from_name(const std::string& name);

struct AnnotatedRegion {
  std::size_t frame = 0;
  BoundingBox box;
  std::string label;
  std::int64_t instance_id = 0;
  RegionSource source = RegionSource::kPropagated;
  friend bool operator==(const AnnotatedRegion&, const AnnotatedRegion&) = default;
};

struct MemoryEntry {
  FeatureVector key;  // running mean of matched descriptors
  std::string label;
  std::int64_t instance_id = 0;
  BoundingBox box;    // last observed
  double velocity_x = 0.0;  // px per frame
  double velocity_y = 0.0;
  std::size_t age = 0;  // frames since the last update
  friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

struct VosConfig {
  double gate_sigma_fraction = 0.25;  // sigma_g as a fraction of the frame diagonal
  double match_threshold = 0.5;       // tau_match
  double memory_decay = 0.3;          // alpha_mem in (0, 1]
  double velocity_smoothing = 0.5;    // EMA weight of the newest displacement
  std::size_t capacity = 64;
  std::size_t max_age = 30;           // entries unseen for longer are dropped
  double seed_iou = 0.3;              // minimum overlap to attach a seed box to a detection
};

void validate(const VosConfig& config);

class VosMemory {
 public:
  VosMemory(VosConfig config, FrameSize frame_size);

  const VosConfig& config() const { return config_; }
  FrameSize frame_size() const { return frame_size_; }
  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Inserts or replaces the entry with the same instance id, then evicts
  /// oldest-first down to capacity. Throws std::invalid_argument on a
  /// descriptor length that differs from existing keys.
  void upsert(MemoryEntry entry);

  /// Provisional ids for unmatched detections; never collide with ids that
  /// have been inserted.
  std::int64_t next_provisional_id();

  std::vector<MemoryEntry>& mutable_entries() { return entries_; }

 private:
  void evict_to_capacity();

  VosConfig config_;
  FrameSize frame_size_;
  std::vector<MemoryEntry> entries_;
  std::int64_t next_id_ = 1;
};

/// Where entry k is expected in the next frame: last box shifted by its
/// velocity over (age + 1) frames.
BoundingBox predicted_box(const MemoryEntry& entry);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// C[i][k] = cosine(descriptor_i, key_k) * exp(-d^2 / (2 sigma_g^2)), with d the
/// distance from detection i's center to entry k's predicted center. Rows
/// follow the detections, columns the memory entries. Empty memory gives an
/// n x 0 matrix.
DenseMatrix memory_read(std::span<const DetectionRecord> detections, const VosMemory& memory);

/// (detection index, entry index) pairs.
using MatchList = std::vector<std::pair<std::size_t, std::size_t>>;

struct Assignment {
  std::vector<AnnotatedRegion> regions;  // one per detection, input order
  MatchList matches;
};

/// Greedy: repeatedly takes the highest remaining correlation at or above
/// tau_match, using each detection and each entry once. Unmatched detections
/// become background with fresh provisional ids.
Assignment assign_labels(std::span<const DetectionRecord> detections, VosMemory& memory,
                         const DenseMatrix& correlation);

/// Updates matched entries (key blend, velocity EMA, age reset), ages the rest
/// and drops entries older than max_age. Throws std::invalid_argument when a
/// detection or entry appears in more than one match or an index is out of
/// range.
void memory_write(std::span<const DetectionRecord> detections, VosMemory& memory,
                  const DenseMatrix& correlation, const MatchList& matches);

/// Attaches each non-background region to the detection of best IoU (at least
/// seed_iou) and upserts an entry keyed by that detection's descriptor.
/// Regions with no overlapping detection are skipped. Returns the number of
/// entries written.
std::size_t seed_memory(VosMemory& memory, std::span<const AnnotatedRegion> regions,
                        std::span<const DetectionRecord> detections);

/// read, assign and write for one frame.
std::vector<AnnotatedRegion> propagate_frame(VosMemory& memory, std::size_t frame,
                                             std::span<const DetectionRecord> detections);

/// Seeds the memory on frame t0 and propagates through t1 inclusive. Output
/// element j holds frame t0 + j; the seed frame carries the seed regions.
/// Throws std::invalid_argument when a seed region is not on t0, t1 < t0, or
/// a frame in range is missing from `detections`.
std::vector<std::vector<AnnotatedRegion>> propagate_annotations(
    std::span<const AnnotatedRegion> seed, std::size_t t0, std::size_t t1,
    std::span<const std::vector<DetectionRecord>> detections, const VosConfig& config,
    FrameSize frame_size);

}  // namespace gazeloop
