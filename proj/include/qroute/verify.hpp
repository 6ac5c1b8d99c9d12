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

#include <sstream>
#include <string>
#include <vector>

#include "qroute/device.hpp"
#include "qroute/router.hpp"
#include "qroute/tomography.hpp"

namespace qroute {

// Route verification: execute variable-length SWAP chains on the device,
// reconstruct the information-carrying pair tomographically, and compare
// against the calibrated model's prediction.

struct VerifyPoint {
  int b0 = 0;
  int b1 = 0;
  int n_hops = 0;
  std::pair<int, int> pair;  // registers holding (b0, b1) after the hops
  double predicted_full = 0.0;
  double predicted_reduced = 0.0;
  double tomographic_reduced = 0.0;
};

/// One series entry per N = 1..max_hops for a fixed input. Tomography reads
/// through the device's physical readout; expectations are mitigated with
/// the calibration's confusion model when `mitigate` is set.
inline std::vector<VerifyPoint> verify_route(
    const DeviceModel& device, const CalibrationSet& calib,
    const std::vector<int>& path, int b0, int b1, int max_hops,
    std::uint64_t shots, std::uint64_t seed, bool mitigate = true) {
  if (path.size() < 2)
    throw ValidationError("verify_route: path needs at least one hop");
  Route route;
  route.path = path;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    route.pairs.emplace_back(path[i], path[i + 1]);

  std::map<int, int> local;
  for (std::size_t i = 0; i < path.size(); ++i)
    local[path[i]] = static_cast<int>(i);

  std::vector<VerifyPoint> series;
  for (int n = 1; n <= max_hops; ++n) {
    VerifyPoint point;
    point.b0 = b0;
    point.b1 = b1;
    point.n_hops = n;
    point.pair = routed_positions(path, n);
    point.predicted_full = predict_fidelity(calib, route, b0, b1, n);

    // Reduced prediction: marginal of the model distribution on the pair.
    const std::vector<double> dist =
        predicted_distribution(calib, path, b0, b1, n);
    const int lo = std::min(point.pair.first, point.pair.second);
    const int hi = std::max(point.pair.first, point.pair.second);
    const int bit_lo = point.pair.first == lo ? b0 : b1;
    const int bit_hi = point.pair.first == lo ? b1 : b0;
    double p_reduced = 0.0;
    for (std::size_t idx = 0; idx < dist.size(); ++idx) {
      if (bit_of(idx, local.at(lo)) == bit_lo &&
          bit_of(idx, local.at(hi)) == bit_hi)
        p_reduced += dist[idx];
    }
    point.predicted_reduced = std::sqrt(std::max(p_reduced, 0.0));

    // Device execution and reduced tomography of the same pair.
    Program program;
    program.instructions.push_back(Instruction::prepare(path[0], b0));
    program.instructions.push_back(Instruction::prepare(path[1], b1));
    for (std::size_t i = 2; i < path.size(); ++i)
      program.instructions.push_back(Instruction::prepare(path[i], 0));
    for (const auto& [x, y] : swap_chain_pairs(path, n)) {
      program.instructions.push_back(Instruction::barrier());
      program.instructions.push_back(Instruction::swap(x, y));
    }
    const ExactResult exact = run_exact(device, program);
    std::map<int, int> support_local;
    for (std::size_t i = 0; i < exact.support.size(); ++i)
      support_local[exact.support[i]] = static_cast<int>(i);
    const DensityMatrix reduced = partial_trace(
        exact.state, {support_local.at(lo), support_local.at(hi)});

    const ConfusionModel readout = device.readout.restrict({lo, hi});
    const auto counts = sample_tomography(
        reduced, shots, mix_seed(seed, static_cast<std::uint64_t>(4 * n + 2 * b0 + b1)),
        &readout);
    const ConfusionModel correction = calib.confusion.restrict({lo, hi});
    const auto expectations =
        expectations_from_counts(2, counts, mitigate ? &correction : nullptr);
    const ReconstructedState recon = reconstruct(2, expectations, shots);
    const PureState ideal_reduced =
        PureState::basis(2, static_cast<std::uint64_t>(pair_index(bit_lo, bit_hi)));
    point.tomographic_reduced = tomographic_fidelity(ideal_reduced, recon);
    series.push_back(point);
  }
  return series;
}

/// CSV report, one row per (input, N).
inline std::string verify_report_csv(const std::vector<VerifyPoint>& series) {
  std::ostringstream out;
  out << "b0,b1,n_hops,b0_register,b1_register,predicted_full,"
         "predicted_reduced,tomographic_reduced,abs_difference\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const VerifyPoint& p : series) {
    out << p.b0 << "," << p.b1 << "," << p.n_hops << "," << p.pair.first << ","
        << p.pair.second << "," << p.predicted_full << ","
        << p.predicted_reduced << "," << p.tomographic_reduced << ","
        << std::abs(p.predicted_reduced - p.tomographic_reduced) << "\n";
  }
  return out.str();
}

}  // namespace qroute
