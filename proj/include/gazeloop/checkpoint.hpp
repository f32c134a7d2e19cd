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

#include <filesystem>
#include <string>

#include "gazeloop/impn.hpp"
#include "gazeloop/jsonl.hpp"

namespace gazeloop {

/// Text container: one "impn_checkpoint" record holding the aggregator, class
/// labels and every matrix. Doubles are written in shortest round-trip form,
/// so save followed by load reproduces the model bit for bit.
Json model_to_json(const ImpnModel& model);
ImpnModel model_from_json(const Json& record);

std::string model_to_string(const ImpnModel& model);
ImpnModel model_from_string(const std::string& text);

void save_model(const ImpnModel& model, const std::filesystem::path& path);

/// Throws ParseError on malformed content and std::invalid_argument when the
/// matrices do not form a consistent model.
ImpnModel load_model(const std::filesystem::path& path);

}  // namespace gazeloop
