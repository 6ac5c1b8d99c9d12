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

// Minimal library walkthrough: synthesize a noisy 20-register device,
// characterize it from simulated shot counts, pick a route, and compare the
// model's prediction with the device's actual state.

#include <cstdio>

#include "qroute/qroute.hpp"

using namespace qroute;

int main() {
  const DeviceModel device = make_boeblingen_like(7);
  std::printf("device %s: %d registers, %zu directed edges\n",
              device.name.c_str(), device.n_qubits, device.edges.size());

  // Characterize both CNOT directions and SWAP on every coupled pair.
  const CharacterizationPlan plan =
      build_plan(device, {Gate::Cnot12, Gate::Cnot21, Gate::Swap});
  std::printf("plan: %zu circuits, %llu native gates, %llu shots\n",
              plan.circuits(),
              static_cast<unsigned long long>(plan.gate_count()),
              static_cast<unsigned long long>(plan.total_shots()));
  const CalibrationSet calib = calibrate(device, run_plan(device, plan, 42));

  // Route a |1> from register 0 to register 9, weighting hops by the
  // routed state's own error exposure.
  RouteRequest request;
  request.source = 0;
  request.destination = 9;
  request.b0 = 1;
  request.b1 = 0;
  request.mode = WeightMode::StateDependent;
  const Route route = shortest_route(device, calib, request);

  std::printf("route:");
  for (int q : route.path) std::printf(" q%d", q);
  std::printf("\n");
  for (const HopCost& hop : route.per_hop)
    std::printf("  hop q%d-q%d  success %.4f  weight %.5f\n", hop.pair.first,
                hop.pair.second, hop.success, hop.weight);

  const int hops = static_cast<int>(route.pairs.size());
  const double predicted =
      predict_fidelity(calib, route, request.b0, request.b1, hops);

  // Ground truth: run the synthesized program on the device itself.
  const Program program = synthesize_program(route, request.b0, request.b1);
  Program no_measure = program;
  std::erase_if(no_measure.instructions, [](const Instruction& ins) {
    return ins.kind == Instruction::Kind::MeasureAll;
  });
  const ExactResult exact = run_exact(device, no_measure);
  std::map<int, int> local;
  for (std::size_t i = 0; i < exact.support.size(); ++i)
    local[exact.support[i]] = static_cast<int>(i);
  std::uint64_t ideal_bits = 0;
  if (request.b1) ideal_bits |= 1ULL << local.at(route.path.front());
  if (request.b0) ideal_bits |= 1ULL << local.at(route.path.back());
  const double actual = fidelity(
      PureState::basis(exact.state.n_qubits(), ideal_bits), exact.state);

  std::printf("predicted fidelity %.4f, exact device fidelity %.4f\n",
              predicted, actual);
  return 0;
}
