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

#include <cstdint>

#include "gazeloop/hil.hpp"
#include "gazeloop/scene.hpp"

namespace gazeloop {

/// The bundled synthetic benchmark: 300 frames at 30 fps with a book, a
/// table, a tablet that enters at frame 20, and a mirrored pair of devices.
/// The camera pans slowly and appearances drift over the clip.
SceneConfig benchmark_scene(std::uint64_t seed);

/// Same layout without appearance noise or drift, so the two devices are
/// indistinguishable by appearance alone.
SceneConfig mirrored_pair_scene(std::uint64_t seed);

/// Detector noise, schedule and training settings used with the benchmark.
/// Windows are half a second long so three feedback rounds stay well under a
/// quarter of the clip.
HilConfig benchmark_hil_config(std::uint64_t seed);

}  // namespace gazeloop
