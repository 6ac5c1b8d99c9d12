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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qroute/readout.hpp"

namespace qroute {

inline constexpr int kMaxTomographyQubits = 5;

// ---------------------------------------------------------------------------
// Measurement settings
// ---------------------------------------------------------------------------

/// All 3^n measurement settings, letters from {X, Y, Z}, character i =
/// register i, enumerated base-3 with register 0 fastest.
inline std::vector<std::string> build_settings(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxTomographyQubits)
    throw ValidationError("tomography supports 1.." +
                          std::to_string(kMaxTomographyQubits) + " registers");
  static constexpr char kLetters[3] = {'X', 'Y', 'Z'};
  std::size_t total = 1;
  for (int q = 0; q < n_qubits; ++q) total *= 3;
  std::vector<std::string> settings;
  settings.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    std::string s(static_cast<std::size_t>(n_qubits), 'Z');
    std::size_t rem = code;
    for (int q = 0; q < n_qubits; ++q) {
      s[static_cast<std::size_t>(q)] = kLetters[rem % 3];
      rem /= 3;
    }
    settings.push_back(std::move(s));
  }
  return settings;
}

/// Tomography of one program variant's output on the listed registers.
struct TomographyJob {
  std::vector<int> qubits;
  std::string program_ref;
  std::vector<std::string> settings;
  std::uint64_t shots_per_setting = 8192;

  static TomographyJob for_qubits(std::vector<int> qubits,
                                  std::string program_ref = "",
                                  std::uint64_t shots = 8192) {
    TomographyJob job;
    job.qubits = std::move(qubits);
    job.program_ref = std::move(program_ref);
    job.settings = build_settings(static_cast<int>(job.qubits.size()));
    job.shots_per_setting = shots;
    return job;
  }

  std::size_t circuits() const { return settings.size(); }
};

/// Circuits for a full experiment campaign: 3^n settings per variant.
inline std::uint64_t tomography_circuit_budget(int n_qubits, int n_variants) {
  std::uint64_t per_variant = 1;
  for (int q = 0; q < n_qubits; ++q) per_variant *= 3;
  return per_variant * static_cast<std::uint64_t>(n_variants);
}

/// Pre-measurement basis rotation for one letter: X -> H, Y -> H S^dag,
/// Z -> identity, so a computational-basis readout samples the letter's
/// eigenbasis.
inline Eigen::Matrix2cd setting_rotation(char letter) {
  switch (letter) {
    case 'X':
      return gates::hadamard();
    case 'Y':
      return gates::hadamard() * gates::s_dagger();
    case 'Z':
      return gates::identity2();
    default:
      throw ValidationError(std::string("bad setting letter: ") + letter);
  }
}

/// rho rotated so that measuring Z^n realizes the setting.
inline DensityMatrix rotate_for_setting(const DensityMatrix& rho,
                                        const std::string& setting) {
  if (static_cast<int>(setting.size()) != rho.n_qubits())
    throw ValidationError("setting length does not match register size");
  DensityMatrix out = rho;
  for (int q = 0; q < rho.n_qubits(); ++q) {
    const Eigen::Matrix2cd r = setting_rotation(setting[static_cast<std::size_t>(q)]);
    if (setting[static_cast<std::size_t>(q)] != 'Z')
      out = apply_unitary_on_qubit(out, r, q);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expectation estimation
// ---------------------------------------------------------------------------

/// Estimate <P> for every Pauli label from per-setting counts. A label's
/// value is the +-1 parity over its non-identity registers, averaged over
/// every setting compatible with the label (all data is used); <I..I> = 1
/// exactly. When `mitigate_with` is supplied each setting's distribution is
/// corrected through the confusion model first.
inline std::map<std::string, double> expectations_from_counts(
    int n_qubits, const std::map<std::string, ShotCounts>& by_setting,
    const ConfusionModel* mitigate_with = nullptr) {
  const std::vector<std::string> settings = build_settings(n_qubits);
  for (const auto& s : settings)
    if (!by_setting.count(s))
      throw ValidationError("expectations: missing setting " + s);

  std::map<std::string, Eigen::VectorXd> dists;
  for (const auto& s : settings) {
    Eigen::VectorXd dist = by_setting.at(s).distribution(n_qubits);
    if (mitigate_with != nullptr) dist = mitigate(dist, *mitigate_with).corrected;
    dists.emplace(s, std::move(dist));
  }

  std::map<std::string, double> expectations;
  for (const PauliLabel& label : all_pauli_labels(n_qubits)) {
    double sum = 0.0;
    int used = 0;
    for (const auto& s : settings) {
      bool compatible = true;
      for (int q = 0; q < n_qubits && compatible; ++q) {
        const char l = label.letter(q);
        if (l != 'I' && l != s[static_cast<std::size_t>(q)]) compatible = false;
      }
      if (!compatible) continue;
      const Eigen::VectorXd& dist = dists.at(s);
      double value = 0.0;
      for (Eigen::Index idx = 0; idx < dist.size(); ++idx) {
        int parity = 0;
        for (int q = 0; q < n_qubits; ++q)
          if (label.letter(q) != 'I')
            parity ^= bit_of(static_cast<std::uint64_t>(idx), q);
        value += (parity ? -1.0 : 1.0) * dist(idx);
      }
      sum += value;
      ++used;
    }
    expectations[label.letters()] = sum / static_cast<double>(used);
  }
  return expectations;
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

struct ReconstructedState {
  DensityMatrix rho;
  double clipped_mass = 0.0;  // total negative eigenvalue mass removed
  int settings_used = 0;
  std::uint64_t shots_per_setting = 0;
};

/// Linear inversion rho = 2^-n sum_P <P> P followed by projection to the
/// physical set: negative eigenvalues are zeroed and the trace renormalized.
/// Always yields a valid state; the clipped mass is reported.
inline ReconstructedState reconstruct(
    int n_qubits, const std::map<std::string, double>& expectations,
    std::uint64_t shots_per_setting = 0) {
  const Eigen::Index d = dim_of(n_qubits);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  for (const PauliLabel& label : all_pauli_labels(n_qubits)) {
    const auto it = expectations.find(label.letters());
    if (it == expectations.end())
      throw ValidationError("reconstruct: missing expectation for " +
                            label.letters());
    acc += it->second * label.matrix();
  }
  acc /= static_cast<double>(d);
  acc = ((acc + acc.adjoint()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(acc);
  Eigen::VectorXd evals = es.eigenvalues();
  double clipped = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    if (evals(i) < 0.0) {
      clipped += -evals(i);
      evals(i) = 0.0;
    }
  const double total = evals.sum();
  if (total <= 0.0)
    throw ValidationError("reconstruct: no positive eigenvalue mass");
  evals /= total;
  const Eigen::MatrixXcd rho =
      es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().adjoint();

  ReconstructedState out{DensityMatrix(n_qubits, rho), clipped,
                         static_cast<int>(expectations.size()),
                         shots_per_setting};
  return out;
}

inline double tomographic_fidelity(const PureState& ideal,
                                   const ReconstructedState& recon) {
  return fidelity(ideal, recon.rho);
}

// ---------------------------------------------------------------------------
// Sampling glue
// ---------------------------------------------------------------------------

/// Sample per-setting counts for a known state. When `readout` is given the
/// counts pass through it (a physical readout); mitigation is a separate
/// choice made at expectation time.
inline std::map<std::string, ShotCounts> sample_tomography(
    const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed,
    const ConfusionModel* readout = nullptr) {
  std::map<std::string, ShotCounts> by_setting;
  const std::vector<std::string> settings = build_settings(rho.n_qubits());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    const DensityMatrix rotated = rotate_for_setting(rho, settings[i]);
    Eigen::VectorXd dist = readout
                               ? measure_probs(rotated, *readout)
                               : Eigen::VectorXd(rotated.diagonal());
    dist = dist.cwiseMax(0.0).eval();
    dist /= dist.sum();
    by_setting.emplace(settings[i], sample_shots(dist, shots, mix_seed(seed, i)));
  }
  return by_setting;
}

/// Exact per-setting outcome distributions (infinite-shot limit).
inline std::map<std::string, Eigen::VectorXd> exact_tomography_distributions(
    const DensityMatrix& rho, const ConfusionModel* readout = nullptr) {
  std::map<std::string, Eigen::VectorXd> by_setting;
  for (const auto& s : build_settings(rho.n_qubits())) {
    const DensityMatrix rotated = rotate_for_setting(rho, s);
    by_setting.emplace(s, readout ? measure_probs(rotated, *readout)
                                  : rotated.diagonal());
  }
  return by_setting;
}

}  // namespace qroute
