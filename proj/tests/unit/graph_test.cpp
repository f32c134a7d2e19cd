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

#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "gazeloop/graph.hpp"

using namespace gazeloop;
using gazeloop::testing::detection;

TEST_SUITE("graph") {

TEST_CASE("node feature normalizes box coordinates") {
  auto f = node_feature(detection({10, 20, 30, 40}, {7, -1}), 100, 200);
  REQUIRE(f.size() == 6);
  CHECK(f[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(f[3] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f[4] == 7.0);
  CHECK(f[5] == -1.0);

  auto full = node_feature(detection({0, 0, 64, 48}, {0, 0, 0}), 64, 48);
  CHECK(full == FeatureVector{0, 0, 1, 1, 0, 0, 0});
  CHECK_THROWS_AS(node_feature(detection({0, 0, 1, 1}, {}), 0, 10), std::invalid_argument);
}

TEST_CASE("complete graph structure") {
  std::vector<DetectionRecord> dets{detection({0, 0, 10, 10}, {1}), detection({20, 0, 30, 10}, {2}),
                                    detection({40, 0, 50, 10}, {3})};
  auto g = build_frame_graph(dets, {100, 100});
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 6);
  CHECK(g.edges().size() == 6);
  CHECK(g.feature_dim() == 5);
  CHECK(g.features().rows() == 3);
  for (std::size_t v = 0; v < 3; ++v) {
    auto n = g.neighbors(v);
    CHECK(n.size() == 2);
    CHECK(std::find(n.begin(), n.end(), v) == n.end());
  }
  for (auto [u, v] : g.edges()) CHECK(u != v);

  auto single = build_frame_graph(std::vector<DetectionRecord>{dets[0]}, {100, 100});
  CHECK(single.edge_count() == 0);
  CHECK(single.neighbors(0).empty());

  auto empty = build_frame_graph(std::vector<DetectionRecord>{}, {100, 100});
  CHECK(empty.node_count() == 0);
  CHECK(empty.edge_count() == 0);
}

TEST_CASE("graph construction is invariant to input permutation") {
  auto rng = make_rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    auto dets = gazeloop::testing::random_detections(rng, 1 + trial % 7, 3, {320, 240});
    auto permuted = dets;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    auto a = build_frame_graph(dets, {320, 240});
    auto b = build_frame_graph(permuted, {320, 240});
    CHECK(a.features() == b.features());
    CHECK(a.nodes() == b.nodes());
    for (std::size_t v = 0; v < a.node_count(); ++v) {
      CHECK(permuted[b.source_index(v)] == b.nodes()[v]);
      for (std::size_t j = 0; j < kCoordinateFeatures; ++j) {
        CHECK(a.feature(v)[j] >= 0.0);
        CHECK(a.feature(v)[j] <= 1.0);
      }
    }
  }
}

TEST_CASE("equal boxes are ordered by descriptor") {
  std::vector<DetectionRecord> dets{detection({0, 0, 10, 10}, {2, 0}), detection({0, 0, 10, 10}, {1, 5})};
  auto g = build_frame_graph(dets, {100, 100});
  CHECK(g.source_index(0) == 1);
  CHECK(g.source_index(1) == 0);
}

TEST_CASE("mixed descriptor lengths are rejected") {
  std::vector<DetectionRecord> dets{detection({0, 0, 10, 10}, {1}), detection({20, 0, 30, 10}, {1, 2})};
  CHECK_THROWS_AS(build_frame_graph(dets, {100, 100}), std::invalid_argument);
  CHECK_THROWS_AS(build_frame_graph(std::vector<DetectionRecord>{}, {0, 100}), std::invalid_argument);
}

}
