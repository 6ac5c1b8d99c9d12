// Copyright 2026 The qroute Authors
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

#include <catch2/catch_amalgamated.hpp>

#include "qroute/characterize.hpp"
#include "test_support.hpp"

using namespace qroute;
using Catch::Approx;

namespace {

const std::set<Gate> kDefaultGates = {Gate::Cnot12, Gate::Cnot21, Gate::Swap};

std::size_t gate_circuits(const CharacterizationPlan& plan) {
  std::size_t n = 0;
  for (const auto& e : plan.experiments)
    if (e.gate != Gate::Meas) ++n;
  return n;
}

}  // namespace

TEST_CASE("plan arithmetic on the 5-register line") {
  const DeviceModel device = make_line(5, 1);
  const CharacterizationPlan plan = build_plan(device, kDefaultGates);
  // 4 pairs x 3 gates x 4 preps + 5 registers x 2 preps
  REQUIRE(plan.circuits() == 58);
  REQUIRE(plan.total_shots() == 475136);
  // cnots count 1, swaps count 3 native gates
  REQUIRE(plan.gate_count() == 4 * (4 + 4 + 4 * 3));
}

TEST_CASE("plan covers every preparation exactly once") {
  const DeviceModel device = make_line(4, 2);
  const CharacterizationPlan plan = build_plan(device, kDefaultGates);
  std::set<std::tuple<Gate, std::vector<int>, int>> seen;
  for (const auto& e : plan.experiments) {
    const auto key = std::make_tuple(e.gate, e.pair, e.prep);
    REQUIRE(!seen.count(key));
    seen.insert(key);
  }
  REQUIRE(seen.size() == plan.circuits());
  // linear scaling: 4*(gate,pair) + 2*registers
  REQUIRE(plan.circuits() ==
          4 * 3 * device.coupled_pairs().size() + 2 * device.n_qubits);
}

TEST_CASE("single-pair swap-only plan") {
  const DeviceModel device = make_line(2, 3);
  const CharacterizationPlan plan = build_plan(device, {Gate::Swap});
  REQUIRE(gate_circuits(plan) == 4);
  REQUIRE(plan.circuits() == 4 + 2 * 2);
  REQUIRE_THROWS_AS(build_plan(device, {}), ValidationError);
}

TEST_CASE("estimate_table column placement follows the post-gate state") {
  // Identity gate, prepared |00>: the corrected Prob(b1, b2) lands in
  // p((b1, b2), 0).
  std::map<int, ShotCounts> by_prep;
  for (int prep = 0; prep < 4; ++prep) {
    ShotCounts counts;
    counts.total_shots = 1000;
    if (prep == 0) {
      counts.counts["00"] = 700;
      counts.counts["10"] = 200;  // first register flipped: k = (1, 0)
      counts.counts["01"] = 60;
      counts.counts["11"] = 40;
    } else {
      counts.counts[index_to_bits(static_cast<std::uint64_t>(prep), 2)] = 1000;
    }
    by_prep[prep] = counts;
  }
  const TransitionTable table = estimate_table(
      Gate::Ident, {0, 1}, by_prep, ConfusionModel::perfect(2));
  REQUIRE(table.p(0, 0) == Approx(0.70).margin(1e-12));
  REQUIRE(table.p(pair_index(1, 0), 0) == Approx(0.20).margin(1e-12));
  REQUIRE(table.p(pair_index(0, 1), 0) == Approx(0.06).margin(1e-12));
  REQUIRE(table.p(pair_index(1, 1), 0) == Approx(0.04).margin(1e-12));

  SECTION("missing preparation is reported") {
    by_prep.erase(2);
    REQUIRE_THROWS_WITH(
        estimate_table(Gate::Ident, {0, 1}, by_prep, ConfusionModel::perfect(2)),
        Catch::Matchers::ContainsSubstring("preparation 2"));
  }
}

TEST_CASE("estimate_table on a gate permutes columns") {
  // A noiseless SWAP prepared in |10> must fill column G(1) = 2.
  std::map<int, ShotCounts> by_prep;
  for (int prep = 0; prep < 4; ++prep) {
    ShotCounts counts;
    counts.total_shots = 100;
    counts.counts[index_to_bits(
        static_cast<std::uint64_t>(gate_classical(Gate::Swap, prep)), 2)] = 100;
    by_prep[prep] = counts;
  }
  const TransitionTable table =
      estimate_table(Gate::Swap, {0, 1}, by_prep, ConfusionModel::perfect(2));
  for (int j = 0; j < 4; ++j) REQUIRE(table.p(0, j) == Approx(1.0).margin(1e-12));
}

TEST_CASE("noiseless synthetic device estimates a noiseless table") {
  const DeviceModel device = make_noiseless_line(2);
  const CharacterizationPlan plan = build_plan(device, {Gate::Swap});
  const auto results = run_plan(device, plan, 9);
  const CalibrationSet calib = calibrate(device, results);
  const TransitionTable& table = calib.tables.at(GatePairKey{Gate::Swap, 0, 1});
  for (int j = 0; j < 4; ++j)
    REQUIRE(table.p(0, j) > 1.0 - 3.0 / std::sqrt(8192.0));
}

TEST_CASE("calibration recovers ground truth on a noisy line") {
  const DeviceModel device = make_line(3, 21);
  const CharacterizationPlan plan = build_plan(device, kDefaultGates);
  const auto results = run_plan(device, plan, 31);
  const CalibrationSet calib = calibrate(device, results);

  REQUIRE(calib.tables.size() == device.ground_truth.size());
  for (const auto& [key, truth] : device.ground_truth) {
    const TransitionTable& fitted = calib.tables.at(key);
    REQUIRE((fitted.probabilities() - truth.probabilities())
                .cwiseAbs()
                .maxCoeff() < 0.02);
  }
  for (int q = 0; q < device.n_qubits; ++q)
    REQUIRE((calib.confusion.qubit_matrix(q) - device.readout.qubit_matrix(q))
                .cwiseAbs()
                .maxCoeff() < 0.015);

  SECTION("estimated tables satisfy completeness exactly") {
    for (const auto& [key, fitted] : calib.tables)
      for (int j = 0; j < 4; ++j)
        REQUIRE(fitted.probabilities().col(j).sum() == Approx(1.0).margin(1e-15));
  }

  SECTION("calibration is deterministic over identical inputs") {
    const CalibrationSet again = calibrate(device, results);
    for (const auto& [key, fitted] : calib.tables)
      REQUIRE((again.tables.at(key).probabilities() - fitted.probabilities())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
  }

  SECTION("truncated results enumerate the missing experiments") {
    auto partial = results;
    partial.erase(partial.begin(), partial.begin() + 3);
    try {
      calibrate(device, partial);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      REQUIRE(what.find("prep") != std::string::npos);
      // the dropped records are the first three preparations of one entry
      REQUIRE(what.find("prep 0") != std::string::npos);
      REQUIRE(what.find("prep 2") != std::string::npos);
    }
  }
}

TEST_CASE("estimation bias vanishes with shots") {
  Rng rng(83);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Gate gate = testing::random_gate(rng);
    const TransitionTable truth = testing::random_table(gate, rng);
    const BinaryNoiseChannel channel(truth);
    std::map<int, ShotCounts> by_prep;
    for (int prep = 0; prep < 4; ++prep) {
      const DensityMatrix out =
          apply(channel, DensityMatrix::basis(2, static_cast<std::uint64_t>(prep)),
                {0, 1});
      by_prep[prep] =
          sample_shots(out.diagonal(), 1000000, mix_seed(991, 4 * trial + prep));
    }
    const TransitionTable fitted =
        estimate_table(gate, {0, 1}, by_prep, ConfusionModel::perfect(2));
    worst = std::max(worst, (fitted.probabilities() - truth.probabilities())
                                .cwiseAbs()
                                .maxCoeff());
  }
  REQUIRE(worst < 0.005);
}
