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

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qroute/channel.hpp"
#include "qroute/readout.hpp"

namespace qroute {

// ---------------------------------------------------------------------------
// Ground-truth table keys
// ---------------------------------------------------------------------------

/// Tables are stored in the canonical frame of the pair (a, b) with a < b,
/// i.e. the smaller register id is the first pair element (the low bit).
struct GatePairKey {
  Gate gate;
  int a = 0;
  int b = 0;

  auto operator<=>(const GatePairKey&) const = default;
};

inline std::pair<int, int> canonical_pair(int x, int y) {
  return {std::min(x, y), std::max(x, y)};
}

// ---------------------------------------------------------------------------
// Program
// ---------------------------------------------------------------------------

struct Instruction {
  enum class Kind { Prepare, ApplyGate, Barrier, MeasureAll };

  Kind kind = Kind::Barrier;
  int qubit = 0;   // Prepare
  int bit = 0;     // Prepare
  Gate gate = Gate::Ident;  // ApplyGate
  int a = 0, b = 0;         // ApplyGate: cnot is (control, target)

  static Instruction prepare(int qubit, int bit) {
    Instruction i;
    i.kind = Kind::Prepare;
    i.qubit = qubit;
    i.bit = bit;
    return i;
  }
  static Instruction cnot(int control, int target) {
    Instruction i;
    i.kind = Kind::ApplyGate;
    i.gate = control < target ? Gate::Cnot12 : Gate::Cnot21;
    i.a = std::min(control, target);
    i.b = std::max(control, target);
    return i;
  }
  static Instruction swap(int x, int y) {
    Instruction i;
    i.kind = Kind::ApplyGate;
    i.gate = Gate::Swap;
    std::tie(i.a, i.b) = canonical_pair(x, y);
    return i;
  }
  static Instruction ident(int x, int y) {
    Instruction i;
    i.kind = Kind::ApplyGate;
    i.gate = Gate::Ident;
    std::tie(i.a, i.b) = canonical_pair(x, y);
    return i;
  }
  static Instruction barrier() { return Instruction{}; }
  static Instruction measure_all() {
    Instruction i;
    i.kind = Kind::MeasureAll;
    return i;
  }
};

/// Straight-line program: preparations, two-register gates, barriers and a
/// final measure-all. Barriers are compilation fences; the simulator only
/// checks their placement.
struct Program {
  std::vector<Instruction> instructions;

  bool has_measure() const {
    for (const auto& i : instructions)
      if (i.kind == Instruction::Kind::MeasureAll) return true;
    return false;
  }

  /// Registers named by any prepare or gate instruction, ascending.
  std::vector<int> touched_qubits() const {
    std::set<int> s;
    for (const auto& i : instructions) {
      if (i.kind == Instruction::Kind::Prepare) s.insert(i.qubit);
      if (i.kind == Instruction::Kind::ApplyGate) {
        s.insert(i.a);
        s.insert(i.b);
      }
    }
    return {s.begin(), s.end()};
  }
};

// ---------------------------------------------------------------------------
// DeviceModel
// ---------------------------------------------------------------------------

/// Synthetic device: directed connectivity, ground-truth noise tables per
/// (gate, pair), and a readout confusion model. When swap_via_cnots is set,
/// SWAP instructions execute as the composition of the pair's CNOT channels
/// instead of reading a direct SWAP table.
struct DeviceModel {
  std::string name;
  int n_qubits = 0;
  std::vector<std::pair<int, int>> edges;  // directed
  std::map<GatePairKey, TransitionTable> ground_truth;
  ConfusionModel readout = ConfusionModel::perfect(1);
  bool swap_via_cnots = false;

  bool has_directed_edge(int x, int y) const {
    return std::find(edges.begin(), edges.end(), std::make_pair(x, y)) !=
           edges.end();
  }

  bool connected(int x, int y) const {
    return has_directed_edge(x, y) || has_directed_edge(y, x);
  }

  /// Coupled pairs in canonical (a < b) order, each listed once.
  std::vector<std::pair<int, int>> coupled_pairs() const {
    std::set<std::pair<int, int>> s;
    for (const auto& [x, y] : edges) s.insert(canonical_pair(x, y));
    return {s.begin(), s.end()};
  }

  void validate() const {
    if (n_qubits < 1) throw ValidationError("device needs >= 1 register");
    for (const auto& [x, y] : edges)
      if (x < 0 || y < 0 || x >= n_qubits || y >= n_qubits || x == y)
        throw ValidationError("edge (" + std::to_string(x) + "," +
                              std::to_string(y) + ") references bad registers");
    for (const auto& [key, table] : ground_truth) {
      if (key.a >= key.b)
        throw ValidationError("ground-truth pair must be canonical (a < b)");
      if (!connected(key.a, key.b))
        throw ValidationError("ground-truth entry (" + std::to_string(key.a) +
                              "," + std::to_string(key.b) +
                              ") is not a coupled pair");
      if (table.gate() != key.gate)
        throw ValidationError("ground-truth table gate label mismatch");
    }
    if (readout.scope() == ConfusionModel::Scope::PerQubit &&
        readout.n_qubits() != n_qubits)
      throw ValidationError("readout model does not cover the register");
  }

  const TransitionTable* find_table(Gate g, int a, int b) const {
    const auto it = ground_truth.find(GatePairKey{g, a, b});
    return it == ground_truth.end() ? nullptr : &it->second;
  }

  /// Channel executed for a gate instruction on canonical pair (a, b).
  /// Instructions with no ground-truth entry run noiselessly.
  PairChannel channel_for(Gate g, int a, int b) const {
    if (g == Gate::Swap && swap_via_cnots) {
      const TransitionTable* t12 = find_table(Gate::Cnot12, a, b);
      const TransitionTable* t21 = find_table(Gate::Cnot21, a, b);
      if (t12 == nullptr || t21 == nullptr)
        throw ValidationError("swap_via_cnots needs both CNOT tables for (" +
                              std::to_string(a) + "," + std::to_string(b) + ")");
      return swap_from_cnots(BinaryNoiseChannel(*t12),
                             BinaryNoiseChannel(*t21));
    }
    if (const TransitionTable* t = find_table(g, a, b))
      return as_pair_channel(BinaryNoiseChannel(*t));
    return as_pair_channel(BinaryNoiseChannel::noiseless(g));
  }
};

// ---------------------------------------------------------------------------
// Program validation and execution
// ---------------------------------------------------------------------------

inline void validate_program(const DeviceModel& device, const Program& program) {
  bool gates_started = false;
  bool measured = false;
  for (std::size_t idx = 0; idx < program.instructions.size(); ++idx) {
    const Instruction& ins = program.instructions[idx];
    const std::string at = "instruction " + std::to_string(idx);
    if (measured && ins.kind != Instruction::Kind::Barrier)
      throw ValidationError(at + ": nothing may follow measure-all");
    switch (ins.kind) {
      case Instruction::Kind::Prepare:
        if (gates_started)
          throw ValidationError(at + ": preparation must precede gates");
        if (ins.qubit < 0 || ins.qubit >= device.n_qubits)
          throw ValidationError(at + ": prepare register out of range");
        if (ins.bit != 0 && ins.bit != 1)
          throw ValidationError(at + ": prepare bit must be 0 or 1");
        break;
      case Instruction::Kind::ApplyGate: {
        gates_started = true;
        if (ins.a < 0 || ins.b < 0 || ins.a >= device.n_qubits ||
            ins.b >= device.n_qubits || ins.a == ins.b)
          throw ValidationError(at + ": gate registers out of range");
        const bool ok =
            (ins.gate == Gate::Cnot12)   ? device.has_directed_edge(ins.a, ins.b)
            : (ins.gate == Gate::Cnot21) ? device.has_directed_edge(ins.b, ins.a)
                                         : device.connected(ins.a, ins.b);
        if (!ok)
          throw ValidationError(at + ": " + to_string(ins.gate) + " on (" +
                                std::to_string(ins.a) + "," +
                                std::to_string(ins.b) +
                                ") violates device connectivity");
        break;
      }
      case Instruction::Kind::Barrier:
        break;
      case Instruction::Kind::MeasureAll:
        measured = true;
        break;
    }
  }
}

/// Exact final register state of a program (pre-measurement), on the listed
/// support registers. support[i] is the device register of local bit i.
struct ExactResult {
  DensityMatrix state;
  std::vector<int> support;
};

/// Evolve the program against the device's ground-truth channels. The state
/// is represented on the program's support: the touched registers, or the
/// whole register when the device fits the dense cap. Untouched registers
/// stay exactly |0> and factor out.
inline ExactResult run_exact(const DeviceModel& device, const Program& program) {
  validate_program(device, program);
  std::vector<int> support = program.touched_qubits();
  if (device.n_qubits <= kMaxQubits) {
    support.resize(static_cast<std::size_t>(device.n_qubits));
    for (int q = 0; q < device.n_qubits; ++q)
      support[static_cast<std::size_t>(q)] = q;
  }
  if (support.empty() || static_cast<int>(support.size()) > kMaxQubits)
    throw ValidationError("program touches " + std::to_string(support.size()) +
                          " registers; dense simulation supports 1.." +
                          std::to_string(kMaxQubits));
  std::map<int, int> local;
  for (std::size_t i = 0; i < support.size(); ++i)
    local[support[i]] = static_cast<int>(i);

  const int n = static_cast<int>(support.size());
  std::uint64_t init = 0;
  for (const auto& ins : program.instructions)
    if (ins.kind == Instruction::Kind::Prepare) {
      const int q = local.at(ins.qubit);
      if (ins.bit)
        init |= 1ULL << q;
      else
        init &= ~(1ULL << q);
    }
  DensityMatrix rho = DensityMatrix::basis(n, init);
  for (const auto& ins : program.instructions) {
    if (ins.kind != Instruction::Kind::ApplyGate) continue;
    const PairChannel ch = device.channel_for(ins.gate, ins.a, ins.b);
    rho = apply(ch, rho, {local.at(ins.a), local.at(ins.b)});
  }
  return ExactResult{std::move(rho), std::move(support)};
}

/// Run and sample: exact evolution on the support, readout confusion on
/// every register, multinomial sampling. Outcome keys cover all device
/// registers (character i = register i).
inline ShotCounts run_shots(const DeviceModel& device, const Program& program,
                            std::uint64_t shots, std::uint64_t seed) {
  if (!program.has_measure())
    throw ValidationError("run_shots requires a measure-all instruction");
  const ExactResult exact = run_exact(device, program);
  const int n_support = static_cast<int>(exact.support.size());

  std::vector<bool> in_support(static_cast<std::size_t>(device.n_qubits), false);
  for (int q : exact.support) in_support[static_cast<std::size_t>(q)] = true;
  std::vector<int> rest;
  for (int q = 0; q < device.n_qubits; ++q)
    if (!in_support[static_cast<std::size_t>(q)]) rest.push_back(q);

  Eigen::VectorXd support_dist;
  if (device.readout.scope() == ConfusionModel::Scope::PerQubit) {
    support_dist = measure_probs(exact.state,
                                 device.readout.restrict(exact.support));
  } else {
    if (!rest.empty())
      throw ValidationError(
          "per-pair readout cannot cover untouched registers");
    support_dist = measure_probs(exact.state, device.readout);
  }

  // P(observe 1 | true 0) per untouched register.
  std::vector<double> rest_flip;
  rest_flip.reserve(rest.size());
  for (int q : rest)
    rest_flip.push_back(device.readout.qubit_matrix(q)(1, 0));

  Eigen::VectorXd cdf(support_dist.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < support_dist.size(); ++i) {
    acc += std::max(support_dist(i), 0.0);
    cdf(i) = acc;
  }

  Rng rng(seed);
  ShotCounts out;
  out.total_shots = shots;
  std::map<std::string, std::uint64_t> hist;
  std::string key(static_cast<std::size_t>(device.n_qubits), '0');
  for (std::uint64_t s = 0; s < shots; ++s) {
    std::fill(key.begin(), key.end(), '0');
    const double u = uniform01(rng) * acc;
    Eigen::Index lo = 0, hi = support_dist.size() - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (u < cdf(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    for (int i = 0; i < n_support; ++i)
      if (bit_of(static_cast<std::uint64_t>(lo), i))
        key[static_cast<std::size_t>(exact.support[static_cast<std::size_t>(i)])] = '1';
    for (std::size_t i = 0; i < rest.size(); ++i)
      if (uniform01(rng) < rest_flip[i])
        key[static_cast<std::size_t>(rest[i])] = '1';
    ++hist[key];
  }
  out.counts = std::move(hist);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic device generators
// ---------------------------------------------------------------------------

namespace detail {

/// Decay-flavored table: per-column error mass scaled up for post-gate
/// states with more 1 bits, so p-error(j=3) >= p-error(j=0) always holds.
inline TransitionTable draw_decay_biased_table(Gate gate, Rng& rng) {
  const double base = uniform(rng, 0.005, 0.05);
  static constexpr double kBias[3] = {1.0, 1.5, 2.0};
  Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j) {
    const double mass =
        base * kBias[popcount2(j)] * uniform(rng, 0.9, 1.1);
    double split[3];
    double total = 0.0;
    for (double& s : split) {
      s = uniform(rng, 0.1, 1.0);
      total += s;
    }
    for (int k = 1; k < 4; ++k) p(k, j) = mass * split[k - 1] / total;
    p(0, j) = 1.0 - mass;
  }
  return TransitionTable(gate, p);
}

inline Eigen::Matrix2d draw_readout_matrix(Rng& rng) {
  // 1-state readout is worse than 0-state readout, strictly.
  const double e0 = uniform(rng, 0.005, 0.02);
  const double e1 = std::min(e0 * uniform(rng, 1.5, 3.0), 0.08);
  Eigen::Matrix2d m;
  m << 1.0 - e0, e1, e0, 1.0 - e1;
  return m;
}

inline void fill_ground_truth(DeviceModel& device, Rng& rng) {
  for (const auto& [a, b] : device.coupled_pairs()) {
    for (Gate g : {Gate::Cnot12, Gate::Cnot21, Gate::Swap})
      device.ground_truth.emplace(GatePairKey{g, a, b},
                                  draw_decay_biased_table(g, rng));
  }
  std::vector<Eigen::Matrix2d> readout;
  readout.reserve(static_cast<std::size_t>(device.n_qubits));
  for (int q = 0; q < device.n_qubits; ++q) readout.push_back(draw_readout_matrix(rng));
  device.readout = ConfusionModel::per_qubit(std::move(readout));
}

}  // namespace detail

/// 20-register device with the hexagonal-lattice connectivity of the IBM
/// 20-qubit family (46 directed edges; registers 0..4 form a path), with
/// randomly drawn decay-biased gate tables and asymmetric readout.
inline DeviceModel make_boeblingen_like(std::uint64_t seed) {
  DeviceModel device;
  device.name = "boeblingen-like-" + std::to_string(seed);
  device.n_qubits = 20;
  static constexpr int kPairs[23][2] = {
      {0, 1},   {1, 2},   {2, 3},   {3, 4},   {1, 6},   {3, 8},
      {5, 6},   {6, 7},   {7, 8},   {8, 9},   {5, 10},  {7, 12},
      {9, 14},  {10, 11}, {11, 12}, {12, 13}, {13, 14}, {11, 16},
      {13, 18}, {15, 16}, {16, 17}, {17, 18}, {18, 19}};
  for (const auto& [a, b] : kPairs) {
    device.edges.emplace_back(a, b);
    device.edges.emplace_back(b, a);
  }
  Rng rng(mix_seed(seed, 0xb0eb));
  detail::fill_ground_truth(device, rng);
  device.validate();
  return device;
}

/// Linear chain of n registers, all adjacent pairs coupled both ways.
inline DeviceModel make_line(int n_qubits, std::uint64_t seed) {
  if (n_qubits < 2) throw ValidationError("line device needs >= 2 registers");
  DeviceModel device;
  device.name = "line-" + std::to_string(n_qubits) + "-" + std::to_string(seed);
  device.n_qubits = n_qubits;
  for (int q = 0; q + 1 < n_qubits; ++q) {
    device.edges.emplace_back(q, q + 1);
    device.edges.emplace_back(q + 1, q);
  }
  Rng rng(mix_seed(seed, 0x11e));
  detail::fill_ground_truth(device, rng);
  device.validate();
  return device;
}

/// Same topology, noiseless tables and perfect readout.
inline DeviceModel make_noiseless_line(int n_qubits) {
  DeviceModel device = make_line(n_qubits, 0);
  for (auto& [key, table] : device.ground_truth)
    table = TransitionTable::noiseless(key.gate);
  device.readout = ConfusionModel::perfect(n_qubits);
  return device;
}

}  // namespace qroute
