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

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qroute/state.hpp"

namespace qroute {

// ---------------------------------------------------------------------------
// Gate labels
// ---------------------------------------------------------------------------

/// Two-register gates the noise model covers. Cnot12 has the first pair
/// element as control; Cnot21 the second. Meas labels the measurement
/// channel (ideal part is the identity).
enum class Gate { Ident, Cnot12, Cnot21, Swap, Meas };

inline std::string to_string(Gate g) {
  switch (g) {
    case Gate::Ident:
      return "ident";
    case Gate::Cnot12:
      return "cnot12";
    case Gate::Cnot21:
      return "cnot21";
    case Gate::Swap:
      return "swap";
    case Gate::Meas:
      return "meas";
  }
  throw ValidationError("unknown gate");
}

inline Gate gate_from_string(const std::string& s) {
  if (s == "ident") return Gate::Ident;
  if (s == "cnot12") return Gate::Cnot12;
  if (s == "cnot21") return Gate::Cnot21;
  if (s == "swap") return Gate::Swap;
  if (s == "meas") return Gate::Meas;
  throw DataFormatError("unknown gate label: " + s);
}

/// Classical action of the ideal gate on a pair basis index.
inline int gate_classical(Gate g, int j) {
  const int j1 = pair_bit1(j);
  const int j2 = pair_bit2(j);
  switch (g) {
    case Gate::Ident:
    case Gate::Meas:
      return j;
    case Gate::Cnot12:
      return pair_index(j1, j2 ^ j1);
    case Gate::Cnot21:
      return pair_index(j1 ^ j2, j2);
    case Gate::Swap:
      return pair_index(j2, j1);
  }
  throw ValidationError("unknown gate");
}

inline Eigen::Matrix4cd gate_unitary(Gate g) {
  switch (g) {
    case Gate::Ident:
    case Gate::Meas:
      return gates::identity4();
    case Gate::Cnot12:
      return gates::cnot12();
    case Gate::Cnot21:
      return gates::cnot21();
    case Gate::Swap:
      return gates::swap();
  }
  throw ValidationError("unknown gate");
}

// ---------------------------------------------------------------------------
// TransitionTable
// ---------------------------------------------------------------------------

inline constexpr double kProbTol = 1e-9;

/// State-dependent transition probabilities for one noisy gate:
/// p(k, j) is the probability of the k-th binary noise term (k = k1 + 2*k2,
/// X on pair element i iff ki = 1) given post-gate basis state j.
class TransitionTable {
 public:
  TransitionTable(Gate gate, Eigen::Matrix4d p) : gate_(gate), p_(std::move(p)) {
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j)
        if (p_(k, j) < -kProbTol || p_(k, j) > 1.0 + kProbTol)
          throw ValidationError("transition probability out of [0,1]");
    for (int j = 0; j < 4; ++j)
      if (std::abs(p_.col(j).sum() - 1.0) > kProbTol)
        throw ValidationError("transition table column " + std::to_string(j) +
                              " does not sum to 1");
  }

  static TransitionTable noiseless(Gate gate) {
    Eigen::Matrix4d p = Eigen::Matrix4d::Zero();
    p.row(0).setOnes();
    return TransitionTable(gate, p);
  }

  Gate gate() const { return gate_; }
  const Eigen::Matrix4d& probabilities() const { return p_; }
  double p(int k, int j) const { return p_(k, j); }

  /// Probability that the post-gate state is left unchanged, given state j.
  double success(int j) const { return p_(0, j); }

  /// Total error mass per post-gate state j.
  double error_mass(int j) const { return 1.0 - p_(0, j); }

  bool state_independent(double tol = 1e-12) const {
    for (int k = 0; k < 4; ++k)
      for (int j = 1; j < 4; ++j)
        if (std::abs(p_(k, j) - p_(k, 0)) > tol) return false;
    return true;
  }

 private:
  Gate gate_;
  Eigen::Matrix4d p_;
};

/// Column-stochastic 4x4 matrix over pair basis states, M(out, in).
using MarkovMatrix = Eigen::Matrix4d;

inline bool is_column_stochastic(const MarkovMatrix& m, double tol = 1e-9) {
  for (int j = 0; j < 4; ++j) {
    if (std::abs(m.col(j).sum() - 1.0) > tol) return false;
    for (int i = 0; i < 4; ++i)
      if (m(i, j) < -tol || m(i, j) > 1.0 + tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// BinaryNoiseChannel
// ---------------------------------------------------------------------------

/// Noisy two-register gate: ideal unitary followed by the four binary noise
/// operators E_k = X1^k1 X2^k2 diag_j(q_k(j)) with q_k(j) = +sqrt(p(k, j)).
class BinaryNoiseChannel {
 public:
  /// Characterization observes only |q|^2; amplitudes are fixed nonnegative
  /// real and the convention travels with every serialized table.
  static constexpr const char* kAmplitudeConvention = "nonnegative-real";

  explicit BinaryNoiseChannel(TransitionTable table) : table_(std::move(table)) {}

  static BinaryNoiseChannel noiseless(Gate gate) {
    return BinaryNoiseChannel(TransitionTable::noiseless(gate));
  }

  Gate gate() const { return table_.gate(); }
  const TransitionTable& table() const { return table_; }
  Eigen::Matrix4cd ideal() const { return gate_unitary(gate()); }

  std::array<Eigen::Matrix4cd, 4> kraus_operators() const {
    std::array<Eigen::Matrix4cd, 4> ops;
    for (int k = 0; k < 4; ++k) {
      Eigen::Matrix4cd amp = Eigen::Matrix4cd::Zero();
      for (int j = 0; j < 4; ++j) amp(j, j) = std::sqrt(table_.p(k, j));
      ops[k] = gates::x_flips(pair_bit1(k), pair_bit2(k)) * amp;
    }
    return ops;
  }

  /// Closed-form four-state Markov chain: M(out, in) = p(out ^ G(in), G(in)).
  MarkovMatrix markov_matrix() const {
    MarkovMatrix m;
    for (int in = 0; in < 4; ++in) {
      const int g = gate_classical(gate(), in);
      for (int out = 0; out < 4; ++out) m(out, in) = table_.p(out ^ g, g);
    }
    return m;
  }

 private:
  TransitionTable table_;
};

// ---------------------------------------------------------------------------
// PairChannel: general two-register channel (ideal gate + post-gate Kraus set)
// ---------------------------------------------------------------------------

/// rho -> sum_k E_k U rho U^dag E_k^dag on the addressed pair. Compositions
/// carry the full aggregate Kraus set (4^depth operators); no re-projection
/// to a four-term binary model is offered.
struct PairChannel {
  Eigen::Matrix4cd ideal;
  std::vector<Eigen::Matrix4cd> kraus;

  /// max-abs deviation of sum_k E_k^dag E_k from the identity.
  double completeness_defect() const {
    Eigen::Matrix4cd acc = Eigen::Matrix4cd::Zero();
    for (const auto& e : kraus) acc += e.adjoint() * e;
    return (acc - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
  }
};

inline PairChannel as_pair_channel(const BinaryNoiseChannel& ch) {
  const auto ops = ch.kraus_operators();
  return PairChannel{ch.ideal(), {ops.begin(), ops.end()}};
}

/// Apply a channel to the registers `targets` of an n-register state.
inline DensityMatrix apply(const PairChannel& ch, const DensityMatrix& rho,
                           std::pair<int, int> targets) {
  const Eigen::MatrixXcd u =
      embed_two_qubit_op(ch.ideal, targets, rho.n_qubits());
  const Eigen::MatrixXcd rotated = u * rho.matrix() * u.adjoint();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
  for (const auto& e : ch.kraus) {
    const Eigen::MatrixXcd big = embed_two_qubit_op(e, targets, rho.n_qubits());
    out += big * rotated * big.adjoint();
  }
  return DensityMatrix(rho.n_qubits(), std::move(out));
}

inline DensityMatrix apply(const BinaryNoiseChannel& ch,
                           const DensityMatrix& rho,
                           std::pair<int, int> targets) {
  return apply(as_pair_channel(ch), rho, targets);
}

/// Markov matrix of a general channel via its action on basis projectors.
/// For binary channels this agrees with the closed form; for compositions of
/// binary channels the action stays diagonal-to-diagonal, so the columns
/// remain exact outcome distributions.
inline MarkovMatrix markov_matrix(const PairChannel& ch) {
  MarkovMatrix m;
  for (int in = 0; in < 4; ++in) {
    const DensityMatrix rho =
        apply(ch, DensityMatrix::basis(2, static_cast<std::uint64_t>(in)),
              {0, 1});
    m.col(in) = rho.diagonal();
  }
  return m;
}

inline MarkovMatrix markov_matrix(const BinaryNoiseChannel& ch) {
  return ch.markov_matrix();
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// Conjugate a post-gate noise operator through the unitary that follows it,
/// so the noise can be commuted to act after both ideal gates.
inline Eigen::Matrix4cd conjugate_kraus(const Eigen::Matrix4cd& e,
                                        const Eigen::Matrix4cd& following) {
  return following * e * following.adjoint();
}

/// Conjugation used when a CNOT(1,2) channel is followed by CNOT(2,1), the
/// step that turns three chained CNOT channels into a SWAP channel:
/// E'_k = U_cnot(2,1) E_k U_cnot(2,1)^dag
///      = X1^(k1^k2) X2^k2 (U_cnot(2,1) q_k U_cnot(2,1)^dag).
inline Eigen::Matrix4cd conjugate_cnot_noise(const Eigen::Matrix4cd& e) {
  return conjugate_kraus(e, gates::cnot21());
}

/// Channel composition, a then b: ideal U_b U_a followed by the aggregate
/// noise set { E_l^(b) U_b E_k^(a) U_b^dag }.
inline PairChannel compose(const PairChannel& a, const PairChannel& b) {
  PairChannel out;
  out.ideal = b.ideal * a.ideal;
  out.kraus.reserve(a.kraus.size() * b.kraus.size());
  for (const auto& eb : b.kraus)
    for (const auto& ea : a.kraus)
      out.kraus.push_back(eb * conjugate_kraus(ea, b.ideal));
  return out;
}

inline PairChannel compose(const BinaryNoiseChannel& a,
                           const BinaryNoiseChannel& b) {
  return compose(as_pair_channel(a), as_pair_channel(b));
}

/// SWAP channel assembled from the pair's two CNOT characterizations,
/// cnot(1,2) then cnot(2,1) then cnot(1,2). The ideal part is exactly the
/// SWAP gate; the noise is the aggregate of the three binary models.
inline PairChannel swap_from_cnots(const BinaryNoiseChannel& c12,
                                   const BinaryNoiseChannel& c21) {
  if (c12.gate() != Gate::Cnot12)
    throw ValidationError("swap_from_cnots: first channel must be cnot12");
  if (c21.gate() != Gate::Cnot21)
    throw ValidationError("swap_from_cnots: second channel must be cnot21");
  PairChannel out =
      compose(compose(as_pair_channel(c12), as_pair_channel(c21)),
              as_pair_channel(c12));
  // The permutation product is exact up to representation; pin it.
  out.ideal = gates::swap();
  return out;
}

}  // namespace qroute
