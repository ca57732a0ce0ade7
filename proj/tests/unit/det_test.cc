// Copyright (c) 2026 The endpoint-rt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include "doctest.h"
#include "endpoint_rt/det.h"
#include "endpoint_rt/error.h"
#include "oracles.h"

namespace endpoint_rt {
namespace {

constexpr FrameLabel S = FrameLabel::kSpeech;
constexpr FrameLabel N = FrameLabel::kNonSpeech;

TEST_SUITE("det") {

TEST_CASE("perfectly separable scores reach zero error") {
  const std::vector<double> p = {0.9, 0.8, 0.3, 0.2};
  const std::vector<FrameLabel> l = {S, S, N, N};
  const DetCurve c = ComputeDetCurve(p, l);
  bool found = false;
  for (const DetPoint& pt : c.points)
    if (pt.threshold > 0.3 && pt.threshold <= 0.8 && pt.fpr == 0 && pt.fnr == 0) found = true;
  CHECK(found);
  CHECK(EqualErrorRate(c).eer == 0.0);
}

TEST_CASE("interleaved scores give an EER of one half") {
  const std::vector<double> p = {0.9, 0.4, 0.6, 0.2};
  const std::vector<FrameLabel> l = {S, S, N, N};
  const OperatingPoint op = EqualErrorRate(ComputeDetCurve(p, l));
  CHECK(op.eer == doctest::Approx(0.5));
  CHECK(op.fpr == doctest::Approx(0.5));
  CHECK(op.fnr == doctest::Approx(0.5));
}

TEST_CASE("symmetric two-point curve interpolates to 0.2") {
  DetCurve c;
  c.points = {{0.0, 1.0, 0.0}, {0.4, 0.3, 0.1}, {0.6, 0.1, 0.3}, {1.0, 0.0, 1.0}};
  const OperatingPoint op = EqualErrorRate(c);
  CHECK(op.eer == doctest::Approx(0.2));
  CHECK(op.threshold == doctest::Approx(0.5));
}

TEST_CASE("equal scores collapse to the two corners") {
  const std::vector<double> p(6, 0.5);
  const std::vector<FrameLabel> l = {S, N, S, N, S, N};
  for (const DetPoint& pt : ComputeDetCurve(p, l).points) {
    const bool corner = (pt.fpr == 1 && pt.fnr == 0) || (pt.fpr == 0 && pt.fnr == 1);
    CHECK(corner);
  }
}

TEST_CASE("bad inputs are rejected") {
  const std::vector<double> p = {0.1, 0.2};
  const std::vector<FrameLabel> one = {S, S};
  const std::vector<FrameLabel> short_labels = {S};
  CHECK_THROWS_AS(ComputeDetCurve(p, one), DataError);
  CHECK_THROWS_AS(ComputeDetCurve(p, short_labels), DataError);
  DetCurve bad;
  bad.points = {{0.0, 0.2, 0.5}, {1.0, 0.4, 0.1}};
  CHECK_THROWS_AS(EqualErrorRate(bad), DataError);
}

TEST_CASE("curve and EER match exhaustive enumeration") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 11;
    std::vector<double> p(n);
    std::vector<FrameLabel> l(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<double>(rng() % 6) / 5.0;
      l[i] = rng() % 2 ? S : N;
    }
    l[0] = S;
    l[1] = N;
    const DetCurve c = ComputeDetCurve(p, l);
    const auto rates = oracle::EnumerateDet(p, l);
    REQUIRE(c.points.size() == rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
      CHECK(c.points[i].fpr == doctest::Approx(rates[i].fpr));
      CHECK(c.points[i].fnr == doctest::Approx(rates[i].fnr));
      if (i > 0) {
        CHECK(c.points[i].fpr <= c.points[i - 1].fpr);
        CHECK(c.points[i].fnr >= c.points[i - 1].fnr);
      }
    }
    CHECK(EqualErrorRate(c).eer == doctest::Approx(oracle::BisectEer(rates)).epsilon(1e-9));
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace endpoint_rt
