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

#include <Eigen/SVD>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qroute/state.hpp"

namespace qroute {

inline constexpr double kMaxConditionNumber = 1e6;
inline constexpr double kStochasticTol = 1e-9;

// ---------------------------------------------------------------------------
// ConfusionModel
// ---------------------------------------------------------------------------

/// Classical readout-error model, C(observed, true) column-stochastic.
/// Per-qubit scope keeps one 2x2 matrix per register (independent errors);
/// per-pair scope keeps a single 4x4 matrix and can express correlated
/// errors between the two registers.
class ConfusionModel {
 public:
  enum class Scope { PerQubit, PerPair };

  static ConfusionModel per_qubit(std::vector<Eigen::Matrix2d> matrices) {
    if (matrices.empty())
      throw ValidationError("per-qubit confusion model needs >= 1 register");
    for (const auto& m : matrices) validate_stochastic(m);
    ConfusionModel model;
    model.scope_ = Scope::PerQubit;
    model.qubit_mats_ = std::move(matrices);
    return model;
  }

  static ConfusionModel per_pair(Eigen::Matrix4d matrix) {
    validate_stochastic(matrix);
    ConfusionModel model;
    model.scope_ = Scope::PerPair;
    model.pair_mat_ = std::move(matrix);
    return model;
  }

  static ConfusionModel perfect(int n_qubits) {
    return per_qubit(std::vector<Eigen::Matrix2d>(
        static_cast<std::size_t>(n_qubits), Eigen::Matrix2d::Identity()));
  }

  Scope scope() const { return scope_; }

  int n_qubits() const {
    return scope_ == Scope::PerQubit ? static_cast<int>(qubit_mats_.size()) : 2;
  }

  const std::vector<Eigen::Matrix2d>& qubit_matrices() const {
    if (scope_ != Scope::PerQubit)
      throw ValidationError("confusion model is not per-qubit");
    return qubit_mats_;
  }

  const Eigen::Matrix2d& qubit_matrix(int q) const {
    return qubit_matrices().at(static_cast<std::size_t>(q));
  }

  const Eigen::Matrix4d& pair_matrix() const {
    if (scope_ != Scope::PerPair)
      throw ValidationError("confusion model is not per-pair");
    return pair_mat_;
  }

  /// Joint confusion matrix over all covered registers (register i is bit i).
  Eigen::MatrixXd joint_matrix() const {
    if (scope_ == Scope::PerPair) return pair_mat_;
    const int n = n_qubits();
    check_register_size(n);
    const Eigen::Index d = dim_of(n);
    Eigen::MatrixXd joint = Eigen::MatrixXd::Ones(d, d);
    for (Eigen::Index obs = 0; obs < d; ++obs)
      for (Eigen::Index tru = 0; tru < d; ++tru)
        for (int q = 0; q < n; ++q)
          joint(obs, tru) *= qubit_mats_[static_cast<std::size_t>(q)](
              bit_of(static_cast<std::uint64_t>(obs), q),
              bit_of(static_cast<std::uint64_t>(tru), q));
    return joint;
  }

  /// Per-qubit model restricted to the listed registers, in list order.
  ConfusionModel restrict(const std::vector<int>& qubits) const {
    if (scope_ != Scope::PerQubit)
      throw ValidationError("restrict requires a per-qubit confusion model");
    std::vector<Eigen::Matrix2d> mats;
    mats.reserve(qubits.size());
    for (int q : qubits) {
      if (q < 0 || q >= n_qubits())
        throw ValidationError("restrict: register " + std::to_string(q) +
                              " not covered by confusion model");
      mats.push_back(qubit_mats_[static_cast<std::size_t>(q)]);
    }
    return per_qubit(std::move(mats));
  }

 private:
  ConfusionModel() = default;

  template <typename M>
  static void validate_stochastic(const M& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m.col(j).sum() - 1.0) > kStochasticTol)
        throw ValidationError("confusion matrix column does not sum to 1");
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) < -kStochasticTol || m(i, j) > 1.0 + kStochasticTol)
          throw ValidationError("confusion matrix entry out of [0,1]");
    }
  }

  Scope scope_ = Scope::PerQubit;
  std::vector<Eigen::Matrix2d> qubit_mats_;
  Eigen::Matrix4d pair_mat_ = Eigen::Matrix4d::Identity();
};

// ---------------------------------------------------------------------------
// ShotCounts
// ---------------------------------------------------------------------------

/// Outcome histogram; keys are bitstrings with character i = register i.
struct ShotCounts {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total_shots = 0;

  void validate() const {
    std::uint64_t sum = 0;
    for (const auto& [bits, c] : counts) {
      bits_to_index(bits);  // throws on malformed keys
      sum += c;
    }
    if (sum != total_shots)
      throw ValidationError("shot counts sum to " + std::to_string(sum) +
                            ", expected " + std::to_string(total_shots));
  }

  /// Empirical distribution over basis indices of an n-register outcome.
  Eigen::VectorXd distribution(int n_qubits) const {
    Eigen::VectorXd dist = Eigen::VectorXd::Zero(dim_of(n_qubits));
    if (total_shots == 0) return dist;
    for (const auto& [bits, c] : counts) {
      if (static_cast<int>(bits.size()) != n_qubits)
        throw ValidationError("outcome key '" + bits + "' is not " +
                              std::to_string(n_qubits) + " bits");
      dist(static_cast<Eigen::Index>(bits_to_index(bits))) +=
          static_cast<double>(c);
    }
    return dist / static_cast<double>(total_shots);
  }

  /// Histogram over a subset of registers (marginalizing the rest).
  ShotCounts marginal(const std::vector<int>& qubits) const {
    ShotCounts out;
    out.total_shots = total_shots;
    for (const auto& [bits, c] : counts) {
      std::string key(qubits.size(), '0');
      for (std::size_t i = 0; i < qubits.size(); ++i) {
        const auto q = static_cast<std::size_t>(qubits[i]);
        if (q >= bits.size())
          throw ValidationError("marginal register out of range");
        key[i] = bits[q];
      }
      out.counts[key] += c;
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Outcome distribution of a computational-basis measurement of every
/// register, read through the confusion model.
inline Eigen::VectorXd measure_probs(const DensityMatrix& rho,
                                     const ConfusionModel& model) {
  if (model.scope() == ConfusionModel::Scope::PerPair && rho.n_qubits() != 2)
    throw ValidationError("per-pair confusion model covers 2 registers, state has " +
                          std::to_string(rho.n_qubits()));
  if (model.scope() == ConfusionModel::Scope::PerQubit &&
      model.n_qubits() != rho.n_qubits())
    throw ValidationError("confusion model covers " +
                          std::to_string(model.n_qubits()) +
                          " registers, state has " +
                          std::to_string(rho.n_qubits()));
  return model.joint_matrix() * rho.diagonal();
}

/// Multinomial sample of a distribution; reproducible for a fixed seed.
inline ShotCounts sample_shots(const Eigen::VectorXd& dist,
                               std::uint64_t shots, std::uint64_t seed) {
  const double total = dist.sum();
  if (std::abs(total - 1.0) > 1e-9 || dist.minCoeff() < -1e-12)
    throw ValidationError("sample_shots: input is not a distribution");
  int n_qubits = 0;
  while ((Eigen::Index(1) << n_qubits) < dist.size()) ++n_qubits;
  if ((Eigen::Index(1) << n_qubits) != dist.size())
    throw ValidationError("sample_shots: distribution size is not a power of 2");

  Eigen::VectorXd cdf(dist.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    acc += std::max(dist(i), 0.0);
    cdf(i) = acc;
  }
  Rng rng(seed);
  ShotCounts out;
  out.total_shots = shots;
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * acc;
    // Binary search the CDF.
    Eigen::Index lo = 0, hi = dist.size() - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (u < cdf(mid))
        hi = mid;
      else
        lo = mid + 1;
    }
    ++hist[static_cast<std::uint64_t>(lo)];
  }
  for (const auto& [idx, c] : hist) out.counts[index_to_bits(idx, n_qubits)] = c;
  return out;
}

struct MitigationResult {
  Eigen::VectorXd corrected;  // clipped to >= 0 and renormalized
  Eigen::VectorXd raw;        // unconstrained least-squares solution
  double condition_number = 0.0;
};

/// Least-squares inversion of the confusion map: solve C x = observed, clip
/// negatives, renormalize. Errors out when C is numerically singular.
inline MitigationResult mitigate(const Eigen::VectorXd& observed,
                                 const ConfusionModel& model) {
  const Eigen::MatrixXd c = model.joint_matrix();
  if (c.rows() != observed.size())
    throw ValidationError("mitigate: distribution size does not match model");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxConditionNumber))
    throw ValidationError(
        "mitigate: confusion matrix is ill-conditioned (condition number " +
        std::to_string(cond) + ")");
  MitigationResult result;
  result.condition_number = cond;
  result.raw = svd.solve(observed);
  result.corrected = result.raw.cwiseMax(0.0);
  const double total = result.corrected.sum();
  if (total <= 0.0)
    throw ValidationError("mitigate: corrected distribution has no mass");
  result.corrected /= total;
  return result;
}

// ---------------------------------------------------------------------------
// Confusion fitting
// ---------------------------------------------------------------------------

/// Accumulates basis-state preparation results and fits a confusion model;
/// column j of C is the empirical outcome frequency given preparation j.
/// State preparation is treated as noiseless.
class ConfusionFitter {
 public:
  static ConfusionFitter for_qubits(int n_qubits) {
    ConfusionFitter f;
    f.scope_ = ConfusionModel::Scope::PerQubit;
    f.n_qubits_ = n_qubits;
    f.qubit_cols_.assign(static_cast<std::size_t>(n_qubits) * 2, {});
    return f;
  }

  static ConfusionFitter for_pair() {
    ConfusionFitter f;
    f.scope_ = ConfusionModel::Scope::PerPair;
    f.n_qubits_ = 2;
    f.pair_cols_.assign(4, {});
    return f;
  }

  /// Per-qubit scope: outcome counts for register q prepared in `bit`.
  /// `counts` is the 1-bit marginal histogram of that register.
  void add_qubit(int q, int bit, const ShotCounts& counts) {
    if (scope_ != ConfusionModel::Scope::PerQubit)
      throw ValidationError("fitter is per-pair, use add_pair");
    if (q < 0 || q >= n_qubits_ || (bit != 0 && bit != 1))
      throw ValidationError("confusion fit: bad register or preparation");
    qubit_cols_[static_cast<std::size_t>(2 * q + bit)] =
        counts.distribution(1);
  }

  /// Per-pair scope: outcome counts for the pair prepared in two-bit state j.
  void add_pair(int prepared, const ShotCounts& counts) {
    if (scope_ != ConfusionModel::Scope::PerPair)
      throw ValidationError("fitter is per-qubit, use add_qubit");
    if (prepared < 0 || prepared >= 4)
      throw ValidationError("confusion fit: preparation out of [0,4)");
    pair_cols_[static_cast<std::size_t>(prepared)] = counts.distribution(2);
  }

  ConfusionModel finalize() const {
    if (scope_ == ConfusionModel::Scope::PerQubit) {
      std::vector<Eigen::Matrix2d> mats;
      std::string missing;
      for (int q = 0; q < n_qubits_; ++q) {
        Eigen::Matrix2d m;
        for (int bit = 0; bit < 2; ++bit) {
          const auto& col = qubit_cols_[static_cast<std::size_t>(2 * q + bit)];
          if (!col.has_value()) {
            missing += " (register " + std::to_string(q) + ", prep " +
                       std::to_string(bit) + ")";
            continue;
          }
          m.col(bit) = *col;
        }
        mats.push_back(m);
      }
      if (!missing.empty())
        throw ValidationError("confusion fit missing preparations:" + missing);
      return ConfusionModel::per_qubit(std::move(mats));
    }
    Eigen::Matrix4d m;
    std::string missing;
    for (int j = 0; j < 4; ++j) {
      if (!pair_cols_[static_cast<std::size_t>(j)].has_value()) {
        missing += " (prep " + std::to_string(j) + ")";
        continue;
      }
      m.col(j) = *pair_cols_[static_cast<std::size_t>(j)];
    }
    if (!missing.empty())
      throw ValidationError("confusion fit missing preparations:" + missing);
    return ConfusionModel::per_pair(m);
  }

 private:
  ConfusionFitter() = default;

  ConfusionModel::Scope scope_ = ConfusionModel::Scope::PerQubit;
  int n_qubits_ = 0;
  std::vector<std::optional<Eigen::Vector2d>> qubit_cols_;
  std::vector<std::optional<Eigen::Vector4d>> pair_cols_;
};

}  // namespace qroute
