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

// HTTP front end for live sessions. Each session serializes its mutations
// (feedback, advance) on one mutex; retraining runs on a worker thread and the
// model seen by readers is swapped in one step when it finishes. Reads work
// from the last published snapshot and never wait for training.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "gazeloop/hil.hpp"

namespace httplib {
class Server;
}

namespace gazeloop {

struct ServiceOptions {
  /// Relative dataset paths resolve here; session reports and traces are
  /// written under <data_dir>/sessions/<id>/ when set.
  std::filesystem::path data_dir;
};

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

class SessionService {
 public:
  explicit SessionService(ServiceOptions options);
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  ApiResponse create_session(const std::string& body);
  ApiResponse get_frame(const std::string& id, const std::string& frame);
  ApiResponse post_feedback(const std::string& id, const std::string& body);
  ApiResponse post_advance(const std::string& id);
  ApiResponse get_metrics(const std::string& id);
  ApiResponse get_report(const std::string& id);
  ApiResponse healthz() const;

  /// Blocks until the session has no training in flight. False for an
  /// unknown id.
  bool wait_idle(const std::string& id);

 private:
  struct Snapshot;
  struct Live;

  std::shared_ptr<Live> find(const std::string& id);
  template <typename F>
  ApiResponse mutate(const std::string& id, F&& apply);
  void publish(Live& live);
  void start_training(const std::shared_ptr<Live>& live);

  ServiceOptions options_;
  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Installs the endpoints on `server`.
void register_routes(httplib::Server& server, SessionService& service);

/// Splits "host:port". Throws std::invalid_argument on a malformed address.
std::pair<std::string, int> parse_bind_address(const std::string& bind);

/// Runs the service until the process is stopped. Returns a non-zero code
/// when the address cannot be bound.
int serve(const std::string& bind, ServiceOptions options);

}  // namespace gazeloop
