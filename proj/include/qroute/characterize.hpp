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

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qroute/device.hpp"

namespace qroute {

inline constexpr std::uint64_t kDefaultShots = 8192;

/// Corrected probabilities below this signal a broken measurement model
/// rather than sampling noise; smaller negatives are clipped.
inline constexpr double kModelMismatchFloor = -0.05;

// ---------------------------------------------------------------------------
// Characterization plan
// ---------------------------------------------------------------------------

/// One characterization circuit. Gate experiments prepare the two-bit input
/// `prep` on the canonical pair and measure; readout experiments (gate ==
/// Meas) prepare a single register in `prep` in {0, 1}.
struct Experiment {
  Gate gate = Gate::Ident;
  std::vector<int> pair;  // {a, b} with a < b, or {q} for readout
  int prep = 0;
  std::uint64_t shots = kDefaultShots;
};

struct ExperimentResult {
  Experiment experiment;
  ShotCounts counts;  // outcome keys over all device registers
};

/// Four basis preparations per (gate, pair) plus two per register for the
/// readout model; circuits = 4*|gate,pair| + 2*|registers|.
struct CharacterizationPlan {
  std::vector<Experiment> experiments;

  std::size_t circuits() const { return experiments.size(); }

  std::uint64_t total_shots() const {
    std::uint64_t total = 0;
    for (const auto& e : experiments) total += e.shots;
    return total;
  }

  /// Native-gate budget: a SWAP executes as three CNOTs, other two-register
  /// gates as one; readout circuits apply no gates.
  std::uint64_t gate_count() const {
    std::uint64_t total = 0;
    for (const auto& e : experiments) {
      if (e.gate == Gate::Meas) continue;
      total += e.gate == Gate::Swap ? 3 : 1;
    }
    return total;
  }
};

/// Circuit for one experiment: prepare, barrier, gate, barrier, measure.
/// Spectator registers are left in 0 and marginalized out downstream.
inline Program experiment_program(const Experiment& e) {
  Program program;
  if (e.gate == Gate::Meas) {
    if (e.pair.size() != 1)
      throw ValidationError("readout experiment addresses one register");
    program.instructions.push_back(Instruction::prepare(e.pair[0], e.prep));
  } else {
    if (e.pair.size() != 2 || e.pair[0] >= e.pair[1])
      throw ValidationError("gate experiment needs a canonical pair");
    program.instructions.push_back(
        Instruction::prepare(e.pair[0], pair_bit1(e.prep)));
    program.instructions.push_back(
        Instruction::prepare(e.pair[1], pair_bit2(e.prep)));
    program.instructions.push_back(Instruction::barrier());
    Instruction gate;
    gate.kind = Instruction::Kind::ApplyGate;
    gate.gate = e.gate;
    gate.a = e.pair[0];
    gate.b = e.pair[1];
    program.instructions.push_back(gate);
    program.instructions.push_back(Instruction::barrier());
  }
  program.instructions.push_back(Instruction::measure_all());
  return program;
}

/// Enumerate the experiments that characterize `gates` on every coupled pair
/// of the device, plus the per-register readout preparations.
inline CharacterizationPlan build_plan(const DeviceModel& device,
                                       const std::set<Gate>& gates,
                                       std::uint64_t shots = kDefaultShots) {
  if (gates.empty()) throw ValidationError("build_plan: empty gate set");
  for (Gate g : gates)
    if (g == Gate::Meas)
      throw ValidationError("build_plan: readout circuits are implicit");
  const auto pairs = device.coupled_pairs();
  if (pairs.empty()) throw ValidationError("build_plan: device has no coupled pairs");
  CharacterizationPlan plan;
  for (const auto& [a, b] : pairs)
    for (Gate g : gates)
      for (int prep = 0; prep < 4; ++prep)
        plan.experiments.push_back(Experiment{g, {a, b}, prep, shots});
  for (int q = 0; q < device.n_qubits; ++q)
    for (int prep = 0; prep < 2; ++prep)
      plan.experiments.push_back(Experiment{Gate::Meas, {q}, prep, shots});
  return plan;
}

// ---------------------------------------------------------------------------
// Table estimation
// ---------------------------------------------------------------------------

/// Fit one transition table from the four basis preparations of a gate.
/// Each observed pair distribution is mitigated through the confusion model,
/// then p(k, G(j)) = corrected Prob(G(j) ^ k); columns are renormalized.
/// `counts_by_prep` maps the prepared two-bit input to counts over the
/// pair's two bits (pair element a is bit 0).
inline TransitionTable estimate_table(
    Gate gate, std::pair<int, int> pair,
    const std::map<int, ShotCounts>& counts_by_prep,
    const ConfusionModel& pair_confusion) {
  if (pair.first >= pair.second)
    throw ValidationError("estimate_table: pair must be canonical (a < b)");
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  for (int prep = 0; prep < 4; ++prep) {
    const auto it = counts_by_prep.find(prep);
    if (it == counts_by_prep.end())
      throw ValidationError("estimate_table: missing preparation " +
                            std::to_string(prep) + " for " + to_string(gate) +
                            " (" + std::to_string(pair.first) + "," +
                            std::to_string(pair.second) + ")");
    const MitigationResult mit =
        mitigate(it->second.distribution(2), pair_confusion);
    if (mit.raw.minCoeff() < kModelMismatchFloor)
      throw ValidationError(
          "estimate_table: corrected probability below mismatch floor; "
          "measurement model does not describe the data");
    const int post = gate_classical(gate, prep);
    for (int k = 0; k < 4; ++k) p(k, post) = mit.corrected(post ^ k);
  }
  for (int j = 0; j < 4; ++j) p.col(j) /= p.col(j).sum();
  return TransitionTable(gate, p);
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

/// Everything the router needs about a device at one point in time.
/// `timestamp` is caller-supplied metadata so identical inputs calibrate to
/// identical sets.
struct CalibrationSet {
  std::string device_id;
  std::string timestamp;
  ConfusionModel confusion = ConfusionModel::perfect(1);
  std::map<GatePairKey, TransitionTable> tables;

  const TransitionTable* find_table(Gate g, int a, int b) const {
    const auto it = tables.find(GatePairKey{g, a, b});
    return it == tables.end() ? nullptr : &it->second;
  }

  /// SWAP channel for a canonical pair: the direct SWAP table when present,
  /// otherwise the composition of the pair's CNOT tables.
  PairChannel swap_channel(int a, int b) const {
    if (const TransitionTable* t = find_table(Gate::Swap, a, b))
      return as_pair_channel(BinaryNoiseChannel(*t));
    const TransitionTable* t12 = find_table(Gate::Cnot12, a, b);
    const TransitionTable* t21 = find_table(Gate::Cnot21, a, b);
    if (t12 && t21)
      return swap_from_cnots(BinaryNoiseChannel(*t12),
                             BinaryNoiseChannel(*t21));
    throw ValidationError("no SWAP or CNOT calibration for pair (" +
                          std::to_string(a) + "," + std::to_string(b) + ")");
  }
};

/// Fit the readout model, then every gate table with mitigation applied.
/// Results must cover two preparations per register and four per (gate,
/// pair); every missing experiment is listed in the error.
inline CalibrationSet calibrate(const DeviceModel& device,
                                const std::vector<ExperimentResult>& results,
                                const std::string& timestamp = "") {
  ConfusionFitter fitter = ConfusionFitter::for_qubits(device.n_qubits);
  std::map<std::pair<GatePairKey, int>, ShotCounts> gate_counts;
  std::set<std::pair<int, int>> readout_seen;

  for (const auto& result : results) {
    const Experiment& e = result.experiment;
    if (e.gate == Gate::Meas) {
      const int q = e.pair.at(0);
      fitter.add_qubit(q, e.prep, result.counts.marginal({q}));
      readout_seen.insert({q, e.prep});
    } else {
      const GatePairKey key{e.gate, e.pair.at(0), e.pair.at(1)};
      gate_counts[{key, e.prep}] =
          result.counts.marginal({e.pair.at(0), e.pair.at(1)});
    }
  }

  std::string missing;
  for (int q = 0; q < device.n_qubits; ++q)
    for (int prep = 0; prep < 2; ++prep)
      if (!readout_seen.count({q, prep}))
        missing += " (meas, register " + std::to_string(q) + ", prep " +
                   std::to_string(prep) + ")";

  std::set<GatePairKey> keys;
  for (const auto& [kp, counts] : gate_counts) keys.insert(kp.first);
  for (const GatePairKey& key : keys)
    for (int prep = 0; prep < 4; ++prep)
      if (!gate_counts.count({key, prep}))
        missing += " (" + to_string(key.gate) + ", pair " +
                   std::to_string(key.a) + "-" + std::to_string(key.b) +
                   ", prep " + std::to_string(prep) + ")";
  if (!missing.empty())
    throw ValidationError("calibrate: missing experiments:" + missing);

  CalibrationSet calib;
  calib.device_id = device.name;
  calib.timestamp = timestamp;
  calib.confusion = fitter.finalize();

  for (const GatePairKey& key : keys) {
    std::map<int, ShotCounts> by_prep;
    for (int prep = 0; prep < 4; ++prep)
      by_prep[prep] = gate_counts.at({key, prep});
    calib.tables.emplace(
        key, estimate_table(key.gate, {key.a, key.b}, by_prep,
                            calib.confusion.restrict({key.a, key.b})));
  }
  return calib;
}

/// Calibration whose tables are the device's ground truth (perfect
/// characterization), for prediction-versus-simulation checks.
inline CalibrationSet calibration_from_ground_truth(const DeviceModel& device) {
  CalibrationSet calib;
  calib.device_id = device.name;
  calib.confusion = device.readout;
  calib.tables = device.ground_truth;
  return calib;
}

/// Execute a whole plan on the synthetic device. Per-circuit seeds are
/// derived from the base seed by stream index, so runs are reproducible and
/// records are independent.
inline std::vector<ExperimentResult> run_plan(const DeviceModel& device,
                                              const CharacterizationPlan& plan,
                                              std::uint64_t seed) {
  std::vector<ExperimentResult> results;
  results.reserve(plan.experiments.size());
  for (std::size_t i = 0; i < plan.experiments.size(); ++i) {
    const Experiment& e = plan.experiments[i];
    results.push_back(ExperimentResult{
        e, run_shots(device, experiment_program(e), e.shots, mix_seed(seed, i))});
  }
  return results;
}

}  // namespace qroute
