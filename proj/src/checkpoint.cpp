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

#include "gazeloop/checkpoint.hpp"

#include "gazeloop/errors.hpp"
#include "gazeloop/serialization.hpp"

namespace gazeloop {

Json model_to_json(const ImpnModel& model) {
  Json j = make_record("impn_checkpoint");
  j["aggregator"] = aggregator_name(model.aggregator);
  j["class_labels"] = model.class_labels;
  Json layers = Json::array();
  for (const auto& layer : model.layers) {
    Json l;
    l["weight"] = layer.weight;
    l["bias"] = layer.bias;
    if (layer.lstm) {
      l["lstm"] = {{"input_weight", layer.lstm->input_weight},
                   {"hidden_weight", layer.lstm->hidden_weight},
                   {"bias", layer.lstm->bias}};
    }
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  j["head_weight"] = model.head_weight;
  j["head_bias"] = model.head_bias;
  return j;
}

ImpnModel model_from_json(const Json& record) {
  if (record.value("record", "") != "impn_checkpoint") {
    throw ParseError("not an impn_checkpoint record", 0);
  }
  ImpnModel model;
  try {
    model.aggregator = aggregator_from_name(record.at("aggregator").get<std::string>());
    model.class_labels = record.at("class_labels").get<std::vector<std::string>>();
    for (const auto& l : record.at("layers")) {
      ImpnLayer layer;
      layer.weight = l.at("weight").get<DenseMatrix>();
      layer.bias = l.at("bias").get<DenseMatrix>();
      if (l.contains("lstm")) {
        const auto& p = l.at("lstm");
        layer.lstm = LstmParams{p.at("input_weight").get<DenseMatrix>(),
                                p.at("hidden_weight").get<DenseMatrix>(),
                                p.at("bias").get<DenseMatrix>()};
      }
      model.layers.push_back(std::move(layer));
    }
    model.head_weight = record.at("head_weight").get<DenseMatrix>();
    model.head_bias = record.at("head_bias").get<DenseMatrix>();
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 0);
  }
  model.check();
  return model;
}

std::string model_to_string(const ImpnModel& model) { return to_jsonl({model_to_json(model)}); }

ImpnModel model_from_string(const std::string& text) {
  const auto lines = parse_jsonl(text);
  if (lines.size() != 1) throw ParseError("checkpoint must hold exactly one record", 0);
  try {
    return model_from_json(lines[0].record);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), lines[0].line);
  }
}

void save_model(const ImpnModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_string(model));
}

ImpnModel load_model(const std::filesystem::path& path) {
  return model_from_string(read_text_file(path));
}

}  // namespace gazeloop
