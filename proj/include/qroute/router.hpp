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
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "qroute/characterize.hpp"

namespace qroute {

// ---------------------------------------------------------------------------
// Requests and routes
// ---------------------------------------------------------------------------

enum class WeightMode { StateIndependent, StateDependent };

/// Move the contents of `source` to `destination`. The routed inputs are
/// the classical bits (b0 at the source, b1 at its route neighbour); an
/// explicit single-qubit routed state is accepted by predict_fidelity's
/// density path instead of b0.
struct RouteRequest {
  int source = 0;
  int destination = 0;
  int b0 = 0;
  int b1 = 0;
  WeightMode mode = WeightMode::StateIndependent;

  void validate(int n_qubits) const {
    if (source == destination)
      throw ValidationError("route source equals destination");
    if (source < 0 || destination < 0 || source >= n_qubits ||
        destination >= n_qubits)
      throw ValidationError("route endpoints out of range");
    if ((b0 != 0 && b0 != 1) || (b1 != 0 && b1 != 1))
      throw ValidationError("routed bits must be 0 or 1");
  }
};

struct HopCost {
  std::pair<int, int> pair;  // traversal order (from, to)
  double weight = 0.0;
  double success = 1.0;
};

struct Route {
  std::vector<int> path;                      // registers, source..destination
  std::vector<std::pair<int, int>> pairs;     // SWAP pairs in traversal order
  double predicted_fidelity = 1.0;
  std::vector<HopCost> per_hop;

  double total_weight() const {
    double total = 0.0;
    for (const auto& hop : per_hop) total += hop.weight;
    return total;
  }
};

// ---------------------------------------------------------------------------
// Edge weights
// ---------------------------------------------------------------------------

/// Success probability of one SWAP hop given the distribution of the pair's
/// two-bit state: s = sum_j dist(j) * M(G(j), j), the mass that lands on the
/// noiseless outcome.
inline double hop_success(const MarkovMatrix& swap_markov,
                          const Eigen::Vector4d& state_dist) {
  double s = 0.0;
  for (int j = 0; j < 4; ++j)
    s += state_dist(j) * swap_markov(gate_classical(Gate::Swap, j), j);
  return s;
}

/// Weight = -ln(success): additive along a path while success multiplies.
inline double edge_weight(const CalibrationSet& calib, std::pair<int, int> pair,
                          const Eigen::Vector4d& state_dist) {
  const auto [a, b] = canonical_pair(pair.first, pair.second);
  const MarkovMatrix m = markov_matrix(calib.swap_channel(a, b));
  const double s = hop_success(m, state_dist);
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(std::min(s, 1.0));
}

inline Eigen::Vector4d uniform_pair_distribution() {
  return Eigen::Vector4d::Constant(0.25);
}

/// Reindex a pair distribution between (from, to) order and (to, from) order.
inline Eigen::Vector4d flip_pair_distribution(const Eigen::Vector4d& dist) {
  Eigen::Vector4d out;
  for (int j = 0; j < 4; ++j)
    out(pair_index(pair_bit2(j), pair_bit1(j))) = dist(j);
  return out;
}

/// One state-dependent tracking step. `dist` is the two-bit distribution of
/// the hop's pair in traversal order (from, to); returns the next hop's
/// distribution: the routed bit (now on `to`) in the first slot and a fresh
/// |0> register in the second. The Markov matrix lives in the canonical
/// (min, max) frame.
inline Eigen::Vector4d advance_routed_distribution(const MarkovMatrix& swap_markov,
                                                   const Eigen::Vector4d& dist,
                                                   bool frame_flipped) {
  const Eigen::Vector4d canonical =
      frame_flipped ? flip_pair_distribution(dist) : dist;
  Eigen::Vector4d after = swap_markov * canonical;
  if (frame_flipped) after = flip_pair_distribution(after);
  // Marginal of the traversal pair's second element, where the SWAP lands
  // the routed bit.
  const double p1 = after(pair_index(0, 1)) + after(pair_index(1, 1));
  Eigen::Vector4d next = Eigen::Vector4d::Zero();
  next(pair_index(0, 0)) = 1.0 - p1;
  next(pair_index(1, 0)) = p1;
  return next;
}

// ---------------------------------------------------------------------------
// Shortest route
// ---------------------------------------------------------------------------

/// Minimal total-weight simple path by label-setting best-first search.
/// Labels are partial paths because state-dependent hop weights depend on
/// the distribution accumulated along the path; with state-independent
/// weights the settle order coincides with Dijkstra's. Ties break on the
/// lexicographically smallest register sequence.
inline Route shortest_route(const DeviceModel& device,
                            const CalibrationSet& calib,
                            const RouteRequest& request) {
  request.validate(device.n_qubits);

  struct Label {
    double cost;
    std::vector<int> path;
    Eigen::Vector4d dist;  // routed-pair distribution in traversal order
    std::vector<HopCost> hops;

    bool operator>(const Label& other) const {
      if (cost != other.cost) return cost > other.cost;
      return path > other.path;
    }
  };

  // Per-pair SWAP Markov matrices, fetched lazily.
  std::map<std::pair<int, int>, MarkovMatrix> markov_cache;
  auto markov_for = [&](int a, int b) -> const MarkovMatrix& {
    const auto key = std::make_pair(a, b);
    auto it = markov_cache.find(key);
    if (it == markov_cache.end())
      it = markov_cache.emplace(key, markov_matrix(calib.swap_channel(a, b)))
               .first;
    return it->second;
  };

  // Traversal-frame distribution of the first hop's pair (from, to):
  // b0 rides on `from`, b1 on `to`.
  Eigen::Vector4d initial = Eigen::Vector4d::Zero();
  initial(pair_index(request.b0, request.b1)) = 1.0;

  std::priority_queue<Label, std::vector<Label>, std::greater<Label>> frontier;
  frontier.push(Label{0.0, {request.source}, initial, {}});

  while (!frontier.empty()) {
    Label label = frontier.top();
    frontier.pop();
    const int here = label.path.back();
    if (here == request.destination) {
      Route route;
      route.path = label.path;
      for (std::size_t i = 0; i + 1 < label.path.size(); ++i)
        route.pairs.emplace_back(label.path[i], label.path[i + 1]);
      route.per_hop = label.hops;
      return route;
    }
    for (int next = 0; next < device.n_qubits; ++next) {
      if (!device.connected(here, next)) continue;
      if (std::find(label.path.begin(), label.path.end(), next) !=
          label.path.end())
        continue;
      const auto [a, b] = canonical_pair(here, next);
      const MarkovMatrix& m = markov_for(a, b);
      const bool flipped = here > next;

      Eigen::Vector4d dist_used =
          request.mode == WeightMode::StateDependent
              ? (flipped ? flip_pair_distribution(label.dist) : label.dist)
              : uniform_pair_distribution();
      const double s = hop_success(m, dist_used);
      const double w = s <= 0.0 ? std::numeric_limits<double>::infinity()
                                : -std::log(std::min(s, 1.0));

      Label child;
      child.cost = label.cost + w;
      child.path = label.path;
      child.path.push_back(next);
      child.hops = label.hops;
      child.hops.push_back(HopCost{{here, next}, w, s});
      child.dist = advance_routed_distribution(m, label.dist, flipped);
      frontier.push(std::move(child));
    }
  }
  throw ValidationError("no route from " + std::to_string(request.source) +
                        " to " + std::to_string(request.destination));
}

// ---------------------------------------------------------------------------
// Program synthesis
// ---------------------------------------------------------------------------

/// SWAP cascade along the route: prepare b0 at the source and b1 at the
/// next register, zero the rest of the path, then one SWAP per hop with
/// barriers between hops, then measure.
inline Program synthesize_program(const Route& route, int b0, int b1) {
  if (route.path.size() < 2)
    throw ValidationError("route must contain at least one hop");
  Program program;
  program.instructions.push_back(Instruction::prepare(route.path[0], b0));
  program.instructions.push_back(Instruction::prepare(route.path[1], b1));
  for (std::size_t i = 2; i < route.path.size(); ++i)
    program.instructions.push_back(Instruction::prepare(route.path[i], 0));
  for (std::size_t i = 0; i < route.pairs.size(); ++i) {
    program.instructions.push_back(Instruction::barrier());
    program.instructions.push_back(
        Instruction::swap(route.pairs[i].first, route.pairs[i].second));
  }
  program.instructions.push_back(Instruction::barrier());
  program.instructions.push_back(Instruction::measure_all());
  return program;
}

// ---------------------------------------------------------------------------
// Fidelity prediction
// ---------------------------------------------------------------------------

/// Hop sequence extended past the route length by reflecting along the path
/// (the only in-topology continuation on a chain), so variable-length series
/// N = 1..2L stay well defined.
inline std::vector<std::pair<int, int>> swap_chain_pairs(
    const std::vector<int>& path, int n_hops) {
  if (path.size() < 2)
    throw ValidationError("swap chain needs a path with >= 2 registers");
  if (n_hops < 1) throw ValidationError("swap chain needs >= 1 hop");
  std::vector<std::pair<int, int>> hops;
  hops.reserve(static_cast<std::size_t>(n_hops));
  int pos = 0;
  int dir = 1;
  const int last = static_cast<int>(path.size()) - 1;
  for (int i = 0; i < n_hops; ++i) {
    if (pos + dir < 0 || pos + dir > last) dir = -dir;
    hops.emplace_back(path[static_cast<std::size_t>(pos)],
                      path[static_cast<std::size_t>(pos + dir)]);
    pos += dir;
  }
  return hops;
}

namespace detail {

/// Ideal basis state after the hop sequence: track where each prepared bit
/// ends up under noiseless SWAPs.
inline std::uint64_t ideal_final_bits(const std::vector<int>& path,
                                      const std::vector<std::pair<int, int>>& hops,
                                      int b0, int b1,
                                      const std::map<int, int>& local) {
  std::map<int, int> value;
  for (int q : path) value[q] = 0;
  value[path[0]] = b0;
  value[path[1]] = b1;
  for (const auto& [x, y] : hops) std::swap(value[x], value[y]);
  std::uint64_t bits = 0;
  for (const auto& [q, v] : value)
    if (v) bits |= 1ULL << local.at(q);
  return bits;
}

}  // namespace detail

/// Classical positions of the routed bits after n hops of the chain:
/// (register holding b0, register holding b1).
inline std::pair<int, int> routed_positions(const std::vector<int>& path,
                                            int n_hops) {
  std::map<int, int> holder;  // register -> logical tag (1 = b0, 2 = b1)
  for (int q : path) holder[q] = 0;
  holder[path[0]] = 1;
  holder[path[1]] = 2;
  for (const auto& [x, y] : swap_chain_pairs(path, n_hops))
    std::swap(holder[x], holder[y]);
  int p0 = -1, p1 = -1;
  for (const auto& [q, tag] : holder) {
    if (tag == 1) p0 = q;
    if (tag == 2) p1 = q;
  }
  return {p0, p1};
}

/// Classical register distribution over the route path after `n_hops`
/// calibrated SWAPs, indexed by path position (path[i] is bit i). This is
/// the Markov fast path: classical inputs keep the register diagonal, so the
/// full channel model reduces to 4-state updates per hop.
inline std::vector<double> predicted_distribution(const CalibrationSet& calib,
                                                  const std::vector<int>& path,
                                                  int b0, int b1, int n_hops) {
  if (path.size() < 2)
    throw ValidationError("route must contain at least one hop");
  const std::vector<std::pair<int, int>> hops = swap_chain_pairs(path, n_hops);

  std::map<int, int> local;
  for (std::size_t i = 0; i < path.size(); ++i)
    local[path[i]] = static_cast<int>(i);
  const int n = static_cast<int>(path.size());

  std::vector<double> dist(std::size_t(1) << n, 0.0);
  std::uint64_t init = 0;
  if (b0) init |= 1ULL << local.at(path[0]);
  if (b1) init |= 1ULL << local.at(path[1]);
  dist[init] = 1.0;

  for (const auto& [x, y] : hops) {
    const auto [a, b] = canonical_pair(x, y);
    const MarkovMatrix m = markov_matrix(calib.swap_channel(a, b));
    const int qa = local.at(a);
    const int qb = local.at(b);
    std::vector<double> next(dist.size(), 0.0);
    for (std::size_t idx = 0; idx < dist.size(); ++idx) {
      if (dist[idx] == 0.0) continue;
      const int j = pair_index(bit_of(idx, qa), bit_of(idx, qb));
      const std::size_t base =
          idx & ~((std::size_t(1) << qa) | (std::size_t(1) << qb));
      for (int out = 0; out < 4; ++out) {
        const double w = m(out, j);
        if (w == 0.0) continue;
        const std::size_t tgt = base |
                                (std::size_t(pair_bit1(out)) << qa) |
                                (std::size_t(pair_bit2(out)) << qb);
        next[tgt] += w * dist[idx];
      }
    }
    dist.swap(next);
  }
  return dist;
}

/// Predicted fidelity of the routed state after `n_hops` SWAPs along the
/// route, from the calibrated per-pair channels.
inline double predict_fidelity(const CalibrationSet& calib, const Route& route,
                               int b0, int b1, int n_hops) {
  const std::vector<double> dist =
      predicted_distribution(calib, route.path, b0, b1, n_hops);
  std::map<int, int> local;
  for (std::size_t i = 0; i < route.path.size(); ++i)
    local[route.path[i]] = static_cast<int>(i);
  const std::uint64_t ideal = detail::ideal_final_bits(
      route.path, swap_chain_pairs(route.path, n_hops), b0, b1, local);
  const double p = std::max(dist[ideal], 0.0);
  return std::min(std::sqrt(p), 1.0);
}

/// Density-matrix path for explicit routed states (superposition inputs):
/// psi rides on the source, b1 on the next register. Register cap applies.
inline double predict_fidelity_state(const CalibrationSet& calib,
                                     const Route& route,
                                     const Eigen::Vector2cd& psi, int b1,
                                     int n_hops) {
  const int n = static_cast<int>(route.path.size());
  check_register_size(n);
  const std::vector<std::pair<int, int>> hops =
      swap_chain_pairs(route.path, n_hops);
  std::map<int, int> local;
  for (std::size_t i = 0; i < route.path.size(); ++i)
    local[route.path[i]] = static_cast<int>(i);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(dim_of(n));
  const std::uint64_t rest = b1 ? (1ULL << local.at(route.path[1])) : 0;
  const int q0 = local.at(route.path[0]);
  amps(static_cast<Eigen::Index>(rest)) = psi(0);
  amps(static_cast<Eigen::Index>(rest | (1ULL << q0))) = psi(1);
  const PureState initial(n, amps);

  DensityMatrix rho = DensityMatrix::from_pure(initial);
  Eigen::MatrixXcd ideal_u =
      Eigen::MatrixXcd::Identity(rho.dim(), rho.dim());
  for (const auto& [x, y] : hops) {
    const auto [a, b] = canonical_pair(x, y);
    rho = apply(calib.swap_channel(a, b), rho, {local.at(a), local.at(b)});
    ideal_u = embed_two_qubit_op(gates::swap(), {local.at(a), local.at(b)}, n) *
              ideal_u;
  }
  const PureState ideal(n, (ideal_u * initial.amplitudes()).eval());
  return fidelity(ideal, rho);
}

}  // namespace qroute
