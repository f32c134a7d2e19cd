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

#include <httplib.h>

#include <fstream>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "gazeloop/checkpoint.hpp"
#include "gazeloop/cli.hpp"
#include "gazeloop/errors.hpp"
#include "gazeloop/hil.hpp"
#include "gazeloop/jsonl.hpp"
#include "gazeloop/raster.hpp"
#include "gazeloop/serialization.hpp"
#include "gazeloop/service.hpp"

using namespace gazeloop;
using namespace gazeloop::testing;

namespace {

HilConfig quick_config() {
  HilConfig c;
  c.t_initial_s = 0.5;
  c.t_update_s = 0.3;
  c.max_update = 2;
  c.architecture.hidden_dim = 8;
  c.train.epochs = 30;
  c.train.learning_rate = 0.05;
  c.detector.localization_jitter = 2.0;
  c.detector.spurious_rate = 0.5;
  c.detector.descriptor_noise = 0.3;
  c.detector.seed = 9;
  return c;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gazeloop");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_run(static_cast<int>(argv.size()), argv.data());
}

std::string create_body(std::size_t frames, std::uint64_t seed) {
  Json body;
  body["dataset"] = {{"scene", Json(small_scene(frames))}};
  body["config"] = Json(quick_config());
  body["model_seed"] = seed;
  return body.dump();
}

Json parse(const ApiResponse& r) { return Json::parse(r.body); }

}  // namespace

TEST_SUITE("app") {

TEST_CASE("checkpoints round trip bit-exactly") {
  Rng rng = make_rng(17, {1});
  for (auto agg : {AggregatorKind::kMaxPool, AggregatorKind::kLstm}) {
    auto model = random_model(rng, 7, 5, 2, 3, agg);
    for (auto* p : model.parameters())
      for (auto& v : p->values()) v *= 1.0 / 3.0;
    CHECK(model_from_string(model_to_string(model)) == model);
    TempDir dir("checkpoint");
    save_model(model, dir.path / "m.jsonl");
    CHECK(load_model(dir.path / "m.jsonl") == model);
  }
  CHECK_THROWS_AS(model_from_string("{\"schema_version\":1,\"record\":\"model\"}\n"), ParseError);
}

TEST_CASE("hil config round trips") {
  auto c = quick_config();
  c.architecture.aggregator = AggregatorKind::kLstm;
  c.architecture.class_labels = {"a", "b"};
  c.vos.capacity = 7;
  c.warm_start = true;
  TempDir dir("config");
  save_hil_config(c, dir.path / "c.jsonl");
  const auto back = load_hil_config(dir.path / "c.jsonl");
  CHECK(Json(back) == Json(c));
  CHECK(back.detector == c.detector);
}

TEST_CASE("frames render to png") {
  auto ds = generate_scene(small_scene(1));
  const std::vector<std::string> labels{kBackground, "cup", "lamp", "pen"};
  auto img = render_frame(ds.frames[0], ds.frame_size(), labels);
  CHECK(img.width == 200);
  CHECK(img.height == 100);
  REQUIRE(img.pixels.size() == 200 * 100 * 3);
  const auto px = [&](std::size_t x, std::size_t y) {
    const auto* p = &img.pixels[(y * img.width + x) * 3];
    return std::array<std::uint8_t, 3>{p[0], p[1], p[2]};
  };
  CHECK(px(30, 30) == class_color(1));
  CHECK(px(100, 40) == class_color(3));
  CHECK(px(30, 30) != px(5, 5));
  const auto png = encode_png(img);
  CHECK(png.substr(0, 8) == std::string("\x89PNG\r\n\x1a\n", 8));
  CHECK(png == encode_png(img));
}

TEST_CASE("cli runs are deterministic and replayable") {
  TempDir dir("cli");
  const auto d = dir.path.string();
  Json scene = make_record("scene");
  scene["config"] = Json(small_scene(40, 3));
  write_text_file(dir.path / "scene.jsonl", to_jsonl({scene}));
  REQUIRE(run_cli({"gen-scene", "--seed", "3", "--scene", d + "/scene.jsonl", "--out", d}) == 0);
  save_hil_config(quick_config(), dir.path / "config.jsonl");
  const auto dataset = d + "/dataset.jsonl";
  const auto config = d + "/config.jsonl";
  REQUIRE(run_cli({"run-hil", "--dataset", dataset, "--config", config, "--seed", "4", "--out", d + "/a"}) == 0);
  REQUIRE(run_cli({"run-hil", "--dataset", dataset, "--config", config, "--seed", "4", "--out", d + "/b"}) == 0);
  const auto report_a = read_text_file(dir.path / "a/report.jsonl");
  CHECK(report_a == read_text_file(dir.path / "b/report.jsonl"));
  CHECK(read_text_file(dir.path / "a/trace.jsonl") == read_text_file(dir.path / "b/trace.jsonl"));
  REQUIRE(run_cli({"replay-trace", "--dataset", dataset, "--config", config, "--trace",
                   d + "/a/trace.jsonl", "--seed", "4", "--out", d + "/r"}) == 0);
  CHECK(read_text_file(dir.path / "r/report.jsonl") == report_a);
  CHECK(!read_text_file(dir.path / "a/timings.jsonl").empty());

  REQUIRE(run_cli({"detect", "--dataset", dataset, "--config", config, "--out", d + "/det"}) == 0);
  CHECK(!load_detections(dir.path / "det/detections.jsonl").empty());
  REQUIRE(run_cli({"train-cml", "--dataset", dataset, "--config", config, "--split", "0.5", "--out",
                   d + "/cml"}) == 0);
  CHECK(load_report(dir.path / "cml/report.jsonl").method == "cml");

  CHECK(run_cli({"run-hil", "--dataset", d + "/missing.jsonl", "--out", d}) != 0);
  write_text_file(dir.path / "bad.jsonl", "{\"schema_version\":1,\"record\":\"dataset\"\n");
  CHECK(run_cli({"replay-trace", "--dataset", dataset, "--trace", d + "/bad.jsonl", "--out", d}) == 1);
}

TEST_CASE("service rejects unknown sessions and bad bodies") {
  SessionService service({});
  CHECK(service.healthz().status == 200);
  CHECK(parse(service.healthz())["status"] == "ok");
  CHECK(service.get_frame("nope", "0").status == 404);
  CHECK(service.post_advance("nope").status == 404);
  CHECK(service.post_feedback("nope", "{}").status == 404);
  CHECK(service.get_metrics("nope").status == 404);
  CHECK(service.get_report("nope").status == 404);
  CHECK_FALSE(service.wait_idle("nope"));
  CHECK(service.create_session("{").status == 400);
  CHECK(service.create_session("{}").status == 400);
  CHECK(service.create_session(R"({"dataset":{"path":"/no/such/file.jsonl"}})").status == 400);

  auto created = service.create_session(create_body(40, 1));
  REQUIRE(created.status == 201);
  const std::string id = parse(created)["session_id"];
  CHECK(service.get_frame(id, "x").status == 400);
  CHECK(service.get_frame(id, "40").status == 404);
  CHECK(service.post_feedback(id, "[").status == 400);
  CHECK(service.post_feedback(id, R"({"frame":0})").status == 400);
  CHECK(service.post_feedback(id, R"({"frame":-1,"regions":[]})").status == 400);
  CHECK(service.post_feedback(id, R"({"frame":3,"regions":[]})").status == 400);
  CHECK(service.post_feedback(id, R"({"frame":0,"regions":[{"box":[0,0,5,5],"label":"dragon"}]})")
            .status == 400);
}

TEST_CASE("service frames before the first model") {
  SessionService service({});
  auto created = service.create_session(create_body(40, 1));
  const std::string id = parse(created)["session_id"];
  auto frame = service.get_frame(id, "0");
  REQUIRE(frame.status == 200);
  const auto j = parse(frame);
  const auto ds = generate_scene(small_scene(40));
  const auto table = detect_all(ds, quick_config().detector);
  CHECK(j["predictions"].size() == table[0].size());
  for (const auto& p : j["predictions"]) CHECK(p["label"] == kBackground);
  CHECK(j["model_round"].is_null());
  CHECK(j["stage"] == "annotation");
  CHECK(j["ground_truth"].size() == 3);
  CHECK(j["image"]["format"] == "png");
  CHECK(j["image"]["width"] == 200);
  CHECK(parse(service.get_metrics(id))["rounds"].empty());
}

TEST_CASE("service replays a recorded session to the same report") {
  auto ds = std::make_shared<const SceneDataset>(generate_scene(small_scene(60)));
  OracleUser user(*ds, {1.0, 4, false});
  const auto outcome = run_hil_session(ds, quick_config(), user, 6);

  TempDir dir("service");
  SessionService service({dir.path});
  Json body;
  body["dataset"] = {{"scene", Json(small_scene(60))}};
  body["config"] = Json(quick_config());
  body["model_seed"] = 6;
  const std::string id = parse(service.create_session(body.dump()))["session_id"];
  for (const auto& e : outcome.trace) {
    ApiResponse r;
    if (e.type == EventType::kFeedback) {
      Json fb;
      fb["frame"] = e.frame;
      fb["regions"] = e.regions;
      r = service.post_feedback(id, fb.dump());
    } else {
      r = service.post_advance(id);
    }
    REQUIRE(r.status == 200);
    CHECK(parse(r)["frame_index"] != nullptr);
  }
  REQUIRE(service.wait_idle(id));
  const auto report = service.get_report(id);
  CHECK(report.status == 200);
  CHECK(report.content_type == "application/x-ndjson");
  CHECK(report.body == report_to_string(outcome.report));
  const auto metrics = parse(service.get_metrics(id));
  CHECK(metrics["stage"] == "done");
  CHECK(metrics["rounds"].size() == outcome.report.rounds.size());
  const auto after = service.post_advance(id);
  CHECK(after.status == 200);
  CHECK(parse(after)["accepted"] == false);
  CHECK(read_text_file(dir.path / "sessions" / id / "report.jsonl") == report.body);
}

TEST_CASE("http routes") {
  SessionService service({});
  httplib::Server server;
  register_routes(server, service);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  auto missing = client.Get("/sessions/zzz/metrics");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body).contains("error"));
  auto created = client.Post("/sessions", create_body(40, 2), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = Json::parse(created->body)["session_id"];
  auto adv = client.Post("/sessions/" + id + "/advance", "", "application/json");
  REQUIRE(adv);
  CHECK(adv->status == 200);
  CHECK(Json::parse(adv->body)["frame_index"] == 1);
  auto frame = client.Get("/sessions/" + id + "/frames/1");
  REQUIRE(frame);
  CHECK(frame->status == 200);
  auto bad = client.Post("/sessions/" + id + "/feedback", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  server.stop();
  worker.join();
}

TEST_CASE("bind addresses") {
  CHECK(parse_bind_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK_THROWS_AS(parse_bind_address("localhost"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bind_address("host:99999"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bind_address("host:abc"), std::invalid_argument);
}

}
