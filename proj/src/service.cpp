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

#include "gazeloop/service.hpp"

#include <httplib.h>

#include <condition_variable>
#include <iostream>
#include <thread>

#include "gazeloop/benchmark.hpp"
#include "gazeloop/errors.hpp"
#include "gazeloop/raster.hpp"
#include "gazeloop/serialization.hpp"

namespace gazeloop {

namespace {

ApiResponse json_response(int status, const Json& body) { return {status, body.dump(), "application/json"}; }

ApiResponse error_response(int status, const std::string& kind, const std::string& message) {
  Json j = make_record("error");
  j["error"] = kind;
  j["message"] = message;
  return json_response(status, j);
}

ApiResponse not_found(const std::string& id) {
  return error_response(404, "not_found", "unknown session '" + id + "'");
}

Json parse_body(const std::string& body) {
  try {
    Json j = Json::parse(body);
    if (!j.is_object()) throw std::invalid_argument("request body must be a JSON object");
    return j;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("request body is not valid JSON: ") + e.what());
  }
}

const char* stage_name(HilSession::Stage stage) {
  switch (stage) {
    case HilSession::Stage::kAnnotation:
      return "annotation";
    case HilSession::Stage::kTraining:
      return "training";
    case HilSession::Stage::kInference:
      return "inference";
    case HilSession::Stage::kDone:
      return "done";
  }
  return "done";
}

/// Payload regions: {box, label, instance?}; the frame defaults to the
/// feedback frame.
std::vector<AnnotatedRegion> parse_regions(const Json& payload, std::size_t frame) {
  const auto it = payload.find("regions");
  if (it == payload.end() || !it->is_array()) {
    throw std::invalid_argument("field 'regions' must be an array");
  }
  std::vector<AnnotatedRegion> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const Json& r = (*it)[i];
    const std::string where = "regions[" + std::to_string(i) + "]";
    try {
      AnnotatedRegion region;
      region.frame = r.value("frame", frame);
      region.box = r.at("box").get<BoundingBox>();
      region.label = r.at("label").get<std::string>();
      region.instance_id = r.value("instance", std::int64_t{0});
      region.source = RegionSource::kUser;
      out.push_back(std::move(region));
    } catch (const std::exception& e) {
      throw std::invalid_argument(where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

struct SessionService::Snapshot {
  std::uint64_t id = 0;
  std::shared_ptr<const ImpnModel> model;
  std::size_t model_round = 0;
  std::shared_ptr<const DetectionTable> detections;
  SessionReport report;
  std::size_t frame_index = 0;
  std::string stage;
  std::vector<AnnotatedRegion> shown;
  bool training = false;
  std::size_t updates_used = 0;
};

struct SessionService::Live {
  Live(std::string id_in, std::shared_ptr<const SceneDataset> data, HilConfig config,
       std::uint64_t seed)
      : id(std::move(id_in)), dataset(data), session(data, std::move(config), seed),
        labels(session.class_labels()) {}

  std::string id;
  std::shared_ptr<const SceneDataset> dataset;
  std::mutex mutex;  // serializes mutations
  std::condition_variable idle;
  HilSession session;
  std::vector<std::string> labels;
  bool training = false;
  std::thread trainer;
  std::uint64_t next_snapshot = 1;
  std::filesystem::path out_dir;

  std::mutex view_mutex;
  std::shared_ptr<const Snapshot> view;

  std::shared_ptr<const Snapshot> snapshot() {
    std::lock_guard lock(view_mutex);
    return view;
  }
};

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}

SessionService::~SessionService() {
  std::lock_guard lock(sessions_mutex_);
  for (auto& [id, live] : sessions_) {
    std::unique_lock l(live->mutex);
    live->idle.wait(l, [&] { return !live->training; });
    if (live->trainer.joinable()) live->trainer.join();
  }
}

std::shared_ptr<SessionService::Live> SessionService::find(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionService::publish(Live& live) {
  auto snap = std::make_shared<Snapshot>();
  snap->id = live.next_snapshot++;
  snap->model = live.session.model();
  snap->model_round = live.session.model_round();
  snap->detections = live.session.detection_table();
  snap->report = live.session.report();
  snap->frame_index = live.session.frame_index();
  snap->stage = live.training ? "training" : stage_name(live.session.stage());
  snap->shown = live.session.shown();
  snap->training = live.training;
  snap->updates_used = live.session.updates_used();
  {
    std::lock_guard lock(live.view_mutex);
    live.view = std::move(snap);
  }
  if (!live.out_dir.empty()) {
    save_report(live.session.report(), live.out_dir / "report.jsonl");
    save_trace(live.session.trace(), live.out_dir / "trace.jsonl");
  }
}

void SessionService::start_training(const std::shared_ptr<Live>& live) {
  live->training = true;
  TrainingJob job = live->session.take_training_job();
  if (live->trainer.joinable()) live->trainer.join();
  live->trainer = std::thread([this, live, job = std::move(job)]() mutable {
    TrainingResult result = run_training(job);
    {
      std::lock_guard lock(live->mutex);
      live->session.finish_training(std::move(result));
      live->training = false;
      publish(*live);
    }
    live->idle.notify_all();
  });
}

ApiResponse SessionService::create_session(const std::string& body) {
  try {
    const Json payload = parse_body(body);
    const auto model_seed = payload.value("model_seed", std::uint64_t{0});
    const auto ds_it = payload.find("dataset");
    if (ds_it == payload.end() || !ds_it->is_object()) {
      throw std::invalid_argument("field 'dataset' must be an object");
    }
    std::shared_ptr<const SceneDataset> dataset;
    if (auto p = ds_it->find("path"); p != ds_it->end()) {
      std::filesystem::path path = p->get<std::string>();
      if (path.is_relative() && !options_.data_dir.empty()) path = options_.data_dir / path;
      if (!std::filesystem::is_regular_file(path)) {
        throw std::invalid_argument("dataset file " + path.string() + " does not exist");
      }
      dataset = std::make_shared<const SceneDataset>(load_dataset(path));
    } else if (auto s = ds_it->find("scene"); s != ds_it->end()) {
      dataset = std::make_shared<const SceneDataset>(generate_scene(s->get<SceneConfig>()));
    } else if (auto b = ds_it->find("benchmark_seed"); b != ds_it->end()) {
      dataset = std::make_shared<const SceneDataset>(
          generate_scene(benchmark_scene(b->get<std::uint64_t>())));
    } else {
      throw std::invalid_argument("field 'dataset' needs one of 'path', 'scene', 'benchmark_seed'");
    }
    HilConfig config = benchmark_hil_config(model_seed);
    if (auto c = payload.find("config"); c != payload.end()) config = c->get<HilConfig>();

    std::string id;
    {
      std::lock_guard lock(sessions_mutex_);
      id = "s" + std::to_string(next_id_++);
    }
    auto live = std::make_shared<Live>(id, dataset, std::move(config), model_seed);
    if (!options_.data_dir.empty()) live->out_dir = options_.data_dir / "sessions" / id;
    {
      std::lock_guard lock(live->mutex);
      publish(*live);
    }
    {
      std::lock_guard lock(sessions_mutex_);
      sessions_[id] = live;
    }
    Json j = make_record("session");
    j["session_id"] = id;
    j["frame_count"] = dataset->frames.size();
    j["labels"] = live->labels;
    j["frame_index"] = 0;
    j["stage"] = "annotation";
    return json_response(201, j);
  } catch (const ParseError& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const InvalidDataset& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::invalid_argument& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const Json::exception& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

ApiResponse SessionService::get_frame(const std::string& id, const std::string& frame_text) {
  auto live = find(id);
  if (!live) return not_found(id);
  std::size_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoull(frame_text, &used);
    if (used != frame_text.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    return error_response(400, "bad_request", "frame index '" + frame_text + "' is not a number");
  }
  const SceneDataset& dataset = *live->dataset;
  if (k >= dataset.frames.size()) {
    return error_response(404, "not_found", "frame " + std::to_string(k) + " is out of range");
  }
  const auto snap = live->snapshot();
  const auto& detections = (*snap->detections)[k];
  const FrameSize size = dataset.frame_size();

  Json preds = Json::array();
  std::optional<PredictionSet> set;
  if (snap->model) set = forward(build_frame_graph(detections, size), *snap->model);
  if (set) {
    for (const auto& node : set->nodes) {
      preds.push_back({{"box", node.box},
                       {"label", node.label},
                       {"score", node.score},
                       {"probabilities", node.probabilities}});
    }
  } else {
    for (const auto& det : detections) {
      preds.push_back({{"box", det.box},
                       {"label", kBackground},
                       {"score", nullptr},
                       {"probabilities", Json::array()}});
    }
  }

  Json truth = Json::array();
  for (const auto& o : dataset.frames[k].objects) {
    truth.push_back({{"box", o.box}, {"label", o.class_label}, {"instance", o.instance_id}});
  }
  Json fixation = nullptr;
  if (k < dataset.fixations.size()) {
    const auto& f = dataset.fixations[k];
    fixation = {{"x", f.x}, {"y", f.y}, {"aoi_truth", f.aoi_label}};
    fixation["aoi_predicted"] = set ? Json(fixation_to_aoi(f, *set)) : Json(nullptr);
  }
  const std::string png = encode_png(render_frame(dataset.frames[k], size, live->labels));

  Json j = make_record("frame");
  j["frame"] = k;
  j["session_frame_index"] = snap->frame_index;
  j["stage"] = snap->stage;
  j["model_round"] = snap->model ? Json(snap->model_round) : Json(nullptr);
  j["snapshot_id"] = snap->id;
  j["labels"] = live->labels;
  j["image"] = {{"format", "png"},
                {"width", static_cast<std::size_t>(size.width)},
                {"height", static_cast<std::size_t>(size.height)},
                {"data", httplib::detail::base64_encode(png)}};
  j["predictions"] = std::move(preds);
  j["shown"] = k == snap->frame_index ? Json(snap->shown) : Json::array();
  j["fixation"] = std::move(fixation);
  j["ground_truth_visible"] = !dataset.frames[k].objects.empty();
  j["ground_truth"] = std::move(truth);
  return json_response(200, j);
}

template <typename F>
ApiResponse SessionService::mutate(const std::string& id, F&& apply) {
  auto live = find(id);
  if (!live) return not_found(id);
  try {
    std::unique_lock lock(live->mutex);
    live->idle.wait(lock, [&] { return !live->training; });
    const StepResult r = apply(*live);
    if (live->session.training_pending()) start_training(live);
    publish(*live);
    Json j = make_record("step");
    j["accepted"] = r.accepted;
    j["retrain_scheduled"] = r.retrain_scheduled;
    j["frame_index"] = r.frame_index;
    j["stage"] = live->training ? "training" : stage_name(live->session.stage());
    return json_response(200, j);
  } catch (const std::invalid_argument& e) {
    return error_response(400, "bad_request", e.what());
  } catch (const std::logic_error& e) {
    return error_response(409, "conflict", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

ApiResponse SessionService::post_feedback(const std::string& id, const std::string& body) {
  if (!find(id)) return not_found(id);
  Json payload;
  std::size_t frame = 0;
  std::vector<AnnotatedRegion> regions;
  try {
    payload = parse_body(body);
    const auto f = payload.find("frame");
    if (f == payload.end() || !f->is_number_unsigned()) {
      throw std::invalid_argument("field 'frame' must be a non-negative integer");
    }
    frame = f->get<std::size_t>();
    regions = parse_regions(payload, frame);
  } catch (const std::exception& e) {
    return error_response(400, "bad_request", e.what());
  }
  return mutate(id, [&](Live& live) { return live.session.feedback(frame, std::move(regions)); });
}

ApiResponse SessionService::post_advance(const std::string& id) {
  return mutate(id, [](Live& live) { return live.session.advance(); });
}

ApiResponse SessionService::get_metrics(const std::string& id) {
  auto live = find(id);
  if (!live) return not_found(id);
  const auto snap = live->snapshot();
  Json rounds = Json::array();
  for (const auto& r : snap->report.rounds) {
    rounds.push_back({{"round", r.round},
                      {"frames_annotated", r.frames_annotated},
                      {"percent_data", r.percent_data},
                      {"user_actions", r.user_actions},
                      {"whole", r.whole},
                      {"test", r.test}});
  }
  Json j = make_record("metrics");
  j["session_id"] = id;
  j["snapshot_id"] = snap->id;
  j["model_round"] = snap->model ? Json(snap->model_round) : Json(nullptr);
  j["training"] = snap->training;
  j["frame_index"] = snap->frame_index;
  j["stage"] = snap->stage;
  j["updates_used"] = snap->updates_used;
  j["rounds"] = std::move(rounds);
  return json_response(200, j);
}

ApiResponse SessionService::get_report(const std::string& id) {
  auto live = find(id);
  if (!live) return not_found(id);
  return {200, report_to_string(live->snapshot()->report), "application/x-ndjson"};
}

ApiResponse SessionService::healthz() const {
  Json j = make_record("health");
  j["status"] = "ok";
  return json_response(200, j);
}

bool SessionService::wait_idle(const std::string& id) {
  auto live = find(id);
  if (!live) return false;
  std::unique_lock lock(live->mutex);
  live->idle.wait(lock, [&] { return !live->training; });
  return true;
}

void register_routes(httplib::Server& server, SessionService& service) {
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, api.content_type);
  };
  server.Get("/healthz", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.healthz());
  });
  server.Post("/sessions", [&, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.create_session(req.body));
  });
  server.Get(R"(/sessions/([^/]+)/frames/([^/]+))",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_frame(req.matches[1], req.matches[2]));
             });
  server.Post(R"(/sessions/([^/]+)/feedback)",
              [&, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.post_feedback(req.matches[1], req.body));
              });
  server.Post(R"(/sessions/([^/]+)/advance)",
              [&, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, service.post_advance(req.matches[1]));
              });
  server.Get(R"(/sessions/([^/]+)/metrics)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_metrics(req.matches[1]));
             });
  server.Get(R"(/sessions/([^/]+)/report)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_report(req.matches[1]));
             });
}

std::pair<std::string, int> parse_bind_address(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size()) {
    throw std::invalid_argument("bind address must look like host:port, got '" + bind + "'");
  }
  std::size_t used = 0;
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1), &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != bind.size() - colon - 1 || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port in bind address '" + bind + "'");
  }
  return {bind.substr(0, colon), port};
}

int serve(const std::string& bind, ServiceOptions options) {
  const auto [host, port] = parse_bind_address(bind);
  SessionService service(std::move(options));
  httplib::Server server;
  register_routes(server, service);
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << bind << "\n";
    return 2;
  }
  return 0;
}

}  // namespace gazeloop
