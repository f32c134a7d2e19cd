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

#include "gazeloop/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <set>

#include "gazeloop/benchmark.hpp"
#include "gazeloop/errors.hpp"
#include "gazeloop/serialization.hpp"
#include "gazeloop/service.hpp"

namespace gazeloop {

namespace {

namespace fs = std::filesystem;

HilConfig resolve_config(const std::string& path, std::uint64_t seed) {
  return path.empty() ? benchmark_hil_config(seed) : load_hil_config(path);
}

void print_rounds(const SessionReport& report) {
  for (const auto& r : report.rounds) {
    std::cout << report.method << " round " << r.round << ": data " << r.percent_data * 100.0
              << "%, mAP@50 " << r.whole.map50 << " (test " << r.test.map50 << "), mAP "
              << r.whole.map << ", fixation "
              << (r.whole.fixation_accuracy ? std::to_string(*r.whole.fixation_accuracy) : "n/a")
              << ", actions " << r.user_actions << "\n";
  }
}

void save_timings(std::span<const double> seconds, const fs::path& path) {
  std::vector<Json> records;
  for (std::size_t i = 0; i < seconds.size(); ++i) {
    Json j = make_record("training_time");
    j["round"] = i;
    j["seconds"] = seconds[i];
    records.push_back(std::move(j));
  }
  write_text_file(path, to_jsonl(records));
}

std::vector<FramePrediction> load_predictions(const fs::path& path, std::size_t frame_count) {
  std::vector<FramePrediction> frames(frame_count);
  for (std::size_t f = 0; f < frame_count; ++f) frames[f].frame = f;
  for (const auto& l : parse_jsonl(read_text_file(path))) {
    if (l.record.value("record", "") != "prediction") {
      throw ParseError("expected a prediction record", l.line);
    }
    const auto frame = field<std::size_t>(l, "frame");
    if (frame >= frame_count) throw ParseError("prediction frame out of range", l.line);
    NodePrediction node;
    node.box = field<BoundingBox>(l, "box");
    if (!node.box.valid()) throw ParseError("prediction box is not valid", l.line);
    node.label = field<std::string>(l, "label");
    node.score = field<double>(l, "score");
    frames[frame].predictions.nodes.push_back(std::move(node));
  }
  return frames;
}

}  // namespace

int cli_run(int argc, char** argv) {
  CLI::App app{"Human-in-the-loop object recognition for eye-tracking video"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir, dataset_path, config_path, scene_path, trace_path, predictions_path;
  bool mirrored = false;
  std::size_t round = 0;
  double split = 0.7;
  double oracle_noise = 0.0;

  auto* gen = app.add_subcommand("gen-scene", "Generate a synthetic dataset");
  gen->add_option("--seed", seed, "Scene seed");
  gen->add_option("--scene", scene_path, "Scene config JSON (default: the bundled benchmark)")
      ->check(CLI::ExistingFile);
  gen->add_flag("--mirrored", mirrored, "Benchmark variant without appearance noise or drift");
  gen->add_option("--out", out_dir, "Output directory")->required();

  auto* detect = app.add_subcommand("detect", "Run the simulated detector over a dataset");
  detect->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  detect->add_option("--config", config_path, "HiL config")->check(CLI::ExistingFile);
  detect->add_option("--seed", seed);
  detect->add_option("--round", round, "Detector schedule round");
  detect->add_option("--out", out_dir)->required();

  auto* cml = app.add_subcommand("train-cml", "Train on a fixed split and report");
  cml->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  cml->add_option("--config", config_path)->check(CLI::ExistingFile);
  cml->add_option("--seed", seed, "Model seed");
  cml->add_option("--split", split, "Training fraction")->check(CLI::Range(0.0, 1.0));
  cml->add_option("--out", out_dir)->required();

  auto* hil = app.add_subcommand("run-hil", "Run a session with the simulated user");
  hil->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  hil->add_option("--config", config_path)->check(CLI::ExistingFile);
  hil->add_option("--seed", seed, "Model seed");
  hil->add_option("--oracle-noise", oracle_noise, "Box noise of oracle corrections (px)")
      ->check(CLI::NonNegativeNumber);
  hil->add_option("--out", out_dir)->required();

  auto* eval = app.add_subcommand("eval", "Score a predictions file against a dataset");
  eval->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--predictions", predictions_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir)->required();

  auto* replay = app.add_subcommand("replay-trace", "Re-run a session from a recorded trace");
  replay->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--config", config_path)->check(CLI::ExistingFile);
  replay->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--seed", seed, "Model seed");
  replay->add_option("--out", out_dir)->required();

  std::string bind, data_dir;
  if (const char* env = std::getenv("GAZELOOP_BIND")) bind = env;
  if (const char* env = std::getenv("GAZELOOP_DATA_DIR")) data_dir = env;
  if (bind.empty()) bind = "127.0.0.1:8080";
  auto* srv = app.add_subcommand("serve", "Serve live sessions over HTTP");
  srv->add_option("--bind", bind, "host:port (env GAZELOOP_BIND)");
  srv->add_option("--data-dir", data_dir, "Data directory (env GAZELOOP_DATA_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const fs::path out = out_dir;
    if (gen->parsed()) {
      SceneConfig scene;
      if (!scene_path.empty()) {
        const auto lines = parse_jsonl(read_text_file(scene_path));
        if (lines.size() != 1) throw ParseError("scene file must hold one record", 0);
        scene = field<SceneConfig>(lines[0], "config");
        scene.seed = seed;
      } else {
        scene = mirrored ? mirrored_pair_scene(seed) : benchmark_scene(seed);
      }
      const SceneDataset dataset = generate_scene(scene);
      save_dataset(dataset, out / "dataset.jsonl");
      save_hil_config(benchmark_hil_config(seed), out / "hil_config.jsonl");
      std::cout << "wrote " << dataset.frames.size() << " frames to " << (out / "dataset.jsonl")
                << "\n";
    } else if (detect->parsed()) {
      const SceneDataset dataset = load_dataset(dataset_path);
      const HilConfig config = resolve_config(config_path, seed);
      const auto table =
          detect_all(dataset, detector_for_round(config.detector, config.schedule, round));
      save_detections(table, out / "detections.jsonl");
      std::size_t count = 0;
      for (const auto& f : table) count += f.size();
      std::cout << "wrote " << count << " detections to " << (out / "detections.jsonl") << "\n";
    } else if (cml->parsed()) {
      const SceneDataset dataset = load_dataset(dataset_path);
      const auto report = run_cml_baseline(dataset, resolve_config(config_path, seed), split, seed);
      save_report(report, out / "report.jsonl");
      print_rounds(report);
    } else if (hil->parsed()) {
      auto dataset = std::make_shared<const SceneDataset>(load_dataset(dataset_path));
      OracleUser user(*dataset, {oracle_noise, derive_seed(seed, 5), false});
      const auto outcome = run_hil_session(dataset, resolve_config(config_path, seed), user, seed);
      save_report(outcome.report, out / "report.jsonl");
      save_trace(outcome.trace, out / "trace.jsonl");
      save_timings(outcome.training_seconds, out / "timings.jsonl");
      print_rounds(outcome.report);
      const auto engagement = count_user_actions(outcome.trace, *dataset);
      std::cout << "user actions " << engagement.actions << " vs per-frame "
                << engagement.per_frame_baseline << " (ratio " << engagement.ratio << ")\n";
    } else if (eval->parsed()) {
      const SceneDataset dataset = load_dataset(dataset_path);
      const auto preds = load_predictions(predictions_path, dataset.frames.size());
      const MetricsReport metrics = evaluate(dataset, preds);
      Json j = make_record("metrics");
      j["metrics"] = metrics;
      write_text_file(out / "metrics.jsonl", to_jsonl({j}));
      std::cout << "mAP@50 " << metrics.map50 << ", mAP@75 " << metrics.map75 << ", mAP "
                << metrics.map << "\n";
    } else if (replay->parsed()) {
      auto dataset = std::make_shared<const SceneDataset>(load_dataset(dataset_path));
      const auto trace = load_trace(trace_path);
      const auto outcome = replay_trace(dataset, resolve_config(config_path, seed), trace, seed);
      save_report(outcome.report, out / "report.jsonl");
      print_rounds(outcome.report);
    } else if (srv->parsed()) {
      return serve(bind, {data_dir});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gazeloop
