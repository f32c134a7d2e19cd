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

#include <cmath>
#include <stdexcept>

#include "ap_oracle.hpp"
#include "doctest.h"
#include "gazeloop/errors.hpp"
#include "gazeloop/metrics.hpp"

using namespace gazeloop;
using gazeloop::testing::random_ap_case;
using gazeloop::testing::reference_ap;

TEST_SUITE("metrics") {

TEST_CASE("coco thresholds") {
  auto t = coco_thresholds();
  REQUIRE(t.size() == 10);
  CHECK(t.front() == 0.5);
  CHECK(t[5] == doctest::Approx(0.75));
  CHECK(t.back() == doctest::Approx(0.95));
}

TEST_CASE("average precision boundary cases") {
  std::vector<TruthBox> truth{{0, {0, 0, 10, 10}, "a"}, {1, {5, 5, 20, 20}, "a"}};
  std::vector<ScoredBox> exact{{0, {0, 0, 10, 10}, "a", 0.9}, {1, {5, 5, 20, 20}, "a", 0.4}};
  CHECK(average_precision(exact, truth, "a", 0.5) == 1.0);
  CHECK(average_precision({}, truth, "a", 0.5) == 0.0);
  CHECK(average_precision(exact, truth, "b", 0.5) == std::nullopt);
  std::vector<ScoredBox> stray{{0, {0, 0, 10, 10}, "b", 0.9}};
  CHECK(average_precision(stray, truth, "b", 0.5) == 0.0);
  CHECK_THROWS_AS(average_precision(exact, truth, "a", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(average_precision(exact, truth, "a", 1.5), std::invalid_argument);
  CHECK_NOTHROW(average_precision(exact, truth, "a", 1.0));
}

TEST_CASE("three predictions and two truth boxes") {
  // Ranked: TP (p = 1, r = .5), FP (p = .5), TP (p = 2/3, r = 1).
  // Interpolated: .5 * 1 + .5 * 2/3 = 5/6.
  std::vector<TruthBox> truth{{0, {0, 0, 10, 10}, "a"}, {0, {20, 20, 30, 30}, "a"}};
  std::vector<ScoredBox> preds{{0, {0, 0, 10, 10}, "a", 0.9},
                               {0, {50, 50, 60, 60}, "a", 0.8},
                               {0, {21, 20, 31, 30}, "a", 0.7}};
  const double ap = *average_precision(preds, truth, "a", 0.5);
  CHECK(std::abs(ap - 5.0 / 6.0) <= 1e-12);
  CHECK(std::abs(ap - reference_ap(preds, truth, "a", 0.5)) <= 1e-12);
  // At IoU 0.9 the shifted box (IoU 9/11) no longer matches: .5 * 1 = .5.
  CHECK(std::abs(*average_precision(preds, truth, "a", 0.9) - 0.5) <= 1e-12);
}

TEST_CASE("predictions only match truth on the same frame") {
  std::vector<TruthBox> truth{{0, {0, 0, 10, 10}, "a"}};
  std::vector<ScoredBox> preds{{1, {0, 0, 10, 10}, "a", 0.9}};
  CHECK(average_precision(preds, truth, "a", 0.5) == 0.0);
}

TEST_CASE("average precision agrees with the exhaustive reference") {
  auto rng = make_rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = random_ap_case(rng);
    for (const char* label : {"a", "b"}) {
      for (double alpha : {0.3, 0.5, 0.75}) {
        auto ap = average_precision(c.predictions, c.truth, label, alpha);
        const double ref = reference_ap(c.predictions, c.truth, label, alpha);
        if (ref < 0) {
          CHECK_FALSE(ap.has_value());
        } else {
          REQUIRE(ap.has_value());
          CHECK(std::abs(*ap - ref) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("average precision depends only on score ranking") {
  auto rng = make_rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = random_ap_case(rng);
    auto transformed = c.predictions;
    for (auto& p : transformed) p.score = std::exp(3.0 * p.score) - 7.0;
    for (const char* label : {"a", "b"})
      CHECK(average_precision(c.predictions, c.truth, label, 0.5) ==
            average_precision(transformed, c.truth, label, 0.5));
  }
}

TEST_CASE("average precision is at most one and a duplicate false positive never helps") {
  auto rng = make_rng(79);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = random_ap_case(rng);
    if (c.truth.empty()) continue;
    const std::string label = c.truth.front().label;
    const double before = average_precision(c.predictions, c.truth, label, 0.5).value();
    CHECK(before <= 1.0);
    CHECK(before >= 0.0);
    auto extra = c.predictions;
    ScoredBox fp{c.truth.front().frame, {500, 500, 510, 510}, label, 0.1 * (trial % 10)};
    extra.push_back(fp);
    extra.push_back(fp);
    CHECK(average_precision(extra, c.truth, label, 0.5).value() <= before + 1e-12);
  }
}

TEST_CASE("mean AP") {
  std::vector<TruthBox> truth{{0, {0, 0, 10, 10}, "a"}, {0, {20, 20, 30, 30}, "b"}};
  std::vector<ScoredBox> preds{{0, {0, 0, 10, 10}, "a", 0.9}, {0, {60, 60, 70, 70}, "b", 0.9}};
  std::vector<double> alphas{0.5, 0.75};
  CHECK(mean_ap(preds, truth, alphas) == std::vector<double>{0.5, 0.5});

  // One class: mean AP equals that class's AP per threshold.
  auto rng = make_rng(80);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_ap_case(rng);
    std::erase_if(c.truth, [](const TruthBox& t) { return t.label != "a"; });
    std::erase_if(c.predictions, [](const ScoredBox& p) { return p.label != "a"; });
    if (c.truth.empty()) continue;
    auto thresholds = coco_thresholds();
    auto maps = mean_ap(c.predictions, c.truth, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      CHECK(maps[i] == average_precision(c.predictions, c.truth, "a", thresholds[i]).value());
  }

  std::vector<TruthBox> only_background{{0, {0, 0, 1, 1}, kBackground}};
  CHECK_THROWS_AS(mean_ap(preds, only_background, alphas), UndefinedResult);
  CHECK_THROWS_AS(mean_ap(preds, std::vector<TruthBox>{}, alphas), UndefinedResult);
}

TEST_CASE("balanced accuracy") {
  std::vector<std::string> truth{"a", "a", "b", "b"};
  CHECK(balanced_accuracy(truth, truth) == 1.0);
  std::vector<std::string> half{"a", "a", "b", "a"};
  CHECK(balanced_accuracy(half, truth) == 0.75);
  std::vector<std::string> constant{"a", "a", "a", "a"};
  CHECK(balanced_accuracy(constant, truth) == 0.5);
  std::vector<std::string> only_b{"b"};
  CHECK(balanced_accuracy(half, truth, only_b) == 0.5);
  CHECK_THROWS_AS(balanced_accuracy(std::vector<std::string>{}, std::vector<std::string>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(balanced_accuracy(half, std::vector<std::string>{"a"}), std::invalid_argument);
  std::vector<std::string> missing{"z"};
  CHECK_THROWS_AS(balanced_accuracy(half, truth, missing), std::invalid_argument);
}

TEST_CASE("fixation to AOI") {
  PredictionSet preds;
  auto node = [](BoundingBox box, std::string label) {
    NodePrediction n;
    n.box = box;
    n.label = std::move(label);
    return n;
  };
  preds.nodes = {node({0, 0, 100, 100}, "table"), node({40, 40, 60, 60}, "cup"),
                 node({0, 0, 200, 200}, kBackground)};
  CHECK(fixation_to_aoi({0, 50, 50, ""}, preds) == "cup");
  CHECK(fixation_to_aoi({0, 10, 10, ""}, preds) == "table");
  CHECK(fixation_to_aoi({0, 150, 150, ""}, preds) == kBackground);
  CHECK(fixation_to_aoi({0, 150, 150, ""}, PredictionSet{}) == kBackground);

  // Enumerate every ordering of three nested boxes: the innermost wins.
  std::vector<NodePrediction> nested{node({0, 0, 90, 90}, "outer"), node({10, 10, 80, 80}, "middle"),
                                     node({20, 20, 30, 30}, "inner")};
  std::sort(nested.begin(), nested.end(), [](auto& a, auto& b) { return a.label < b.label; });
  do {
    CHECK(fixation_to_aoi({0, 25, 25, ""}, PredictionSet{nested}) == "inner");
    CHECK(fixation_to_aoi({0, 50, 50, ""}, PredictionSet{nested}) == "middle");
  } while (std::next_permutation(nested.begin(), nested.end(),
                                 [](auto& a, auto& b) { return a.label < b.label; }));
}

TEST_CASE("evaluate pools frames") {
  SceneDataset ds;
  ds.config.width = 100;
  ds.config.height = 100;
  ds.frames = {{0, 0.0, {{"a", 1, {0, 0, 10, 10}, {}}}}, {1, 0.1, {{"a", 1, {0, 0, 10, 10}, {}}}}};
  ds.fixations = {{0, 5, 5, "a"}, {1, 50, 50, kBackground}};
  auto node = [](BoundingBox box, std::string label, double score) {
    NodePrediction n;
    n.box = box;
    n.label = std::move(label);
    n.score = score;
    return n;
  };
  std::vector<FramePrediction> preds{
      {0, {{node({0, 0, 10, 10}, "a", 0.9), node({60, 60, 70, 70}, kBackground, 0.8)}}},
      {1, {{node({40, 40, 60, 60}, "a", 0.7)}}}};
  auto report = evaluate(ds, preds);
  CHECK(report.frames == 2);
  CHECK(report.map50 == 0.5);
  CHECK(report.per_class_ap.at("a")[0] == 0.5);
  // Node labels vs overlapped truth: a/a, background/background, a/background.
  CHECK(report.balanced_accuracy == doctest::Approx(0.75));
  CHECK(report.fixation_accuracy == doctest::Approx(0.5));
  std::vector<FramePrediction> out_of_range{{5, {}}};
  CHECK_THROWS_AS(evaluate(ds, out_of_range), std::invalid_argument);
}

}
