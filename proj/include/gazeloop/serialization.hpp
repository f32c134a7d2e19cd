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

// nlohmann::json adapters for the value types that appear in files and HTTP
// payloads. Boxes are written as [x_min, y_min, x_max, y_max].

#include "gazeloop/hil.hpp"
#include "gazeloop/impn.hpp"
#include "gazeloop/jsonl.hpp"
#include "gazeloop/metrics.hpp"
#include "gazeloop/proposals.hpp"
#include "gazeloop/scene.hpp"
#include "gazeloop/vos.hpp"

namespace gazeloop {

void to_json(Json& j, const BoundingBox& box);
void from_json(const Json& j, BoundingBox& box);

void to_json(Json& j, const DenseMatrix& m);
void from_json(const Json& j, DenseMatrix& m);

void to_json(Json& j, const Motion& m);
void from_json(const Json& j, Motion& m);
void to_json(Json& j, const ObjectSpec& o);
void from_json(const Json& j, ObjectSpec& o);
void to_json(Json& j, const MirroredPair& p);
void from_json(const Json& j, MirroredPair& p);
void to_json(Json& j, const GazeConfig& g);
void from_json(const Json& j, GazeConfig& g);
void to_json(Json& j, const SceneConfig& c);
void from_json(const Json& j, SceneConfig& c);
void to_json(Json& j, const GtObject& o);
void from_json(const Json& j, GtObject& o);
void to_json(Json& j, const FixationPoint& f);
void from_json(const Json& j, FixationPoint& f);

void to_json(Json& j, const DetectorConfig& c);
void from_json(const Json& j, DetectorConfig& c);
void to_json(Json& j, const DetectorSchedule& s);
void from_json(const Json& j, DetectorSchedule& s);
void to_json(Json& j, const VosConfig& c);
void from_json(const Json& j, VosConfig& c);
void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);

/// Width, depth and aggregator only; input width and classes come from data.
void to_json(Json& j, const ImpnArchitecture& a);
void from_json(const Json& j, ImpnArchitecture& a);

void to_json(Json& j, const AnnotatedRegion& r);
void from_json(const Json& j, AnnotatedRegion& r);

void to_json(Json& j, const MetricsReport& m);
void from_json(const Json& j, MetricsReport& m);

void to_json(Json& j, const HilConfig& c);
void from_json(const Json& j, HilConfig& c);

/// Single "hil_config" record files.
void save_hil_config(const HilConfig& config, const std::filesystem::path& path);
HilConfig load_hil_config(const std::filesystem::path& path);

}  // namespace gazeloop
