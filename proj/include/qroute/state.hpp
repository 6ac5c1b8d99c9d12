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

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qroute/common.hpp"

namespace qroute {

using Complex = std::complex<double>;

/// Dense representation keeps things exact but caps the register size.
inline constexpr int kMaxQubits = 6;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenFloor = -1e-9;

inline void check_register_size(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ValidationError("register size must be in [1, " +
                          std::to_string(kMaxQubits) + "], got " +
                          std::to_string(n_qubits));
}

inline Eigen::Index dim_of(int n_qubits) {
  return Eigen::Index(1) << n_qubits;
}

// ---------------------------------------------------------------------------
// PureState
// ---------------------------------------------------------------------------

/// Normalized state vector over n <= 6 registers. Register 0 is the
/// least-significant bit of the amplitude index.
class PureState {
 public:
  PureState(int n_qubits, Eigen::VectorXcd amplitudes)
      : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
    check_register_size(n_qubits_);
    if (amps_.size() != dim_of(n_qubits_))
      throw ValidationError("amplitude vector length " +
                            std::to_string(amps_.size()) +
                            " does not match 2^" + std::to_string(n_qubits_));
    if (std::abs(amps_.squaredNorm() - 1.0) > kNormTol)
      throw ValidationError("state vector is not normalized");
  }

  static PureState basis(int n_qubits, std::uint64_t index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_of(n_qubits));
    if (index >= static_cast<std::uint64_t>(v.size()))
      throw ValidationError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return PureState(n_qubits, std::move(v));
  }

  /// Product state from a bitstring (character i is register i).
  static PureState from_bits(const std::string& bits) {
    return basis(static_cast<int>(bits.size()), bits_to_index(bits));
  }

  int n_qubits() const { return n_qubits_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }

 private:
  int n_qubits_;
  Eigen::VectorXcd amps_;
};

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Mixed state over n <= 6 registers. Hermiticity and unit trace are enforced
/// on construction; the PSD floor (eigenvalues >= -1e-9) is checked by
/// validate(), which boundary code calls on untrusted input.
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, Eigen::MatrixXcd matrix)
      : n_qubits_(n_qubits), mat_(std::move(matrix)) {
    check_register_size(n_qubits_);
    const Eigen::Index d = dim_of(n_qubits_);
    if (mat_.rows() != d || mat_.cols() != d)
      throw ValidationError("density matrix dimension does not match 2^n");
    if ((mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
      throw ValidationError("density matrix is not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > kTraceTol ||
        std::abs(mat_.trace().imag()) > kTraceTol)
      throw ValidationError("density matrix trace is not 1");
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.n_qubits(),
                         psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityMatrix basis(int n_qubits, std::uint64_t index) {
    return from_pure(PureState::basis(n_qubits, index));
  }

  static DensityMatrix maximally_mixed(int n_qubits) {
    check_register_size(n_qubits);
    const Eigen::Index d = dim_of(n_qubits);
    return DensityMatrix(
        n_qubits, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
  }

  int n_qubits() const { return n_qubits_; }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  /// Real diagonal: the computational-basis outcome distribution.
  Eigen::VectorXd diagonal() const { return mat_.diagonal().real(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat_);
    return es.eigenvalues().minCoeff();
  }

  /// Full invariant check including the PSD floor.
  void validate() const {
    if (min_eigenvalue() < kEigenFloor)
      throw ValidationError("density matrix has eigenvalue below floor " +
                            std::to_string(kEigenFloor));
  }

 private:
  int n_qubits_;
  Eigen::MatrixXcd mat_;
};

// ---------------------------------------------------------------------------
// Elementary gates
// ---------------------------------------------------------------------------

namespace gates {

inline Eigen::Matrix2cd identity2() { return Eigen::Matrix2cd::Identity(); }

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

inline Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

inline Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

inline Eigen::Matrix2cd s_dagger() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, Complex(0, -1);
  return m;
}

inline Eigen::Matrix4cd identity4() { return Eigen::Matrix4cd::Identity(); }

/// Pair-frame permutation gate from the classical map on j = j1 + 2*j2.
inline Eigen::Matrix4cd permutation4(const int (&map)[4]) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < 4; ++j) m(map[j], j) = 1.0;
  return m;
}

/// CNOT with the first pair element as control.
inline Eigen::Matrix4cd cnot12() { return permutation4({0, 3, 2, 1}); }

/// CNOT with the second pair element as control.
inline Eigen::Matrix4cd cnot21() { return permutation4({0, 1, 3, 2}); }

inline Eigen::Matrix4cd swap() { return permutation4({0, 2, 1, 3}); }

/// X on the first (k1) and/or second (k2) pair element.
inline Eigen::Matrix4cd x_flips(int k1, int k2) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < 4; ++j) m(j ^ pair_index(k1, k2), j) = 1.0;
  return m;
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Operator embedding
// ---------------------------------------------------------------------------

/// Embed a single-register operator on register q of an n-register space.
inline Eigen::MatrixXcd embed_one_qubit_op(const Eigen::Matrix2cd& op, int q,
                                           int n_qubits) {
  check_register_size(n_qubits);
  if (q < 0 || q >= n_qubits)
    throw ValidationError("target register out of range");
  const Eigen::Index d = dim_of(n_qubits);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const int jin = bit_of(static_cast<std::uint64_t>(col), q);
    for (int jout = 0; jout < 2; ++jout) {
      const Complex v = op(jout, jin);
      if (v == Complex(0, 0)) continue;
      const Eigen::Index row =
          (col & ~(Eigen::Index(1) << q)) | (Eigen::Index(jout) << q);
      out(row, col) += v;
    }
  }
  return out;
}

/// Embed a pair-frame operator on the ordered registers (first, second) of an
/// n-register space; the first register maps to the pair's low bit.
inline Eigen::MatrixXcd embed_two_qubit_op(const Eigen::Matrix4cd& op,
                                           std::pair<int, int> targets,
                                           int n_qubits) {
  check_register_size(n_qubits);
  const auto [a, b] = targets;
  if (a == b) throw ValidationError("pair registers must be distinct");
  if (a < 0 || a >= n_qubits || b < 0 || b >= n_qubits)
    throw ValidationError("pair register out of range");
  const Eigen::Index d = dim_of(n_qubits);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  const Eigen::Index mask = (Eigen::Index(1) << a) | (Eigen::Index(1) << b);
  for (Eigen::Index col = 0; col < d; ++col) {
    const int jin = pair_index(bit_of(static_cast<std::uint64_t>(col), a),
                               bit_of(static_cast<std::uint64_t>(col), b));
    for (int jout = 0; jout < 4; ++jout) {
      const Complex v = op(jout, jin);
      if (v == Complex(0, 0)) continue;
      const Eigen::Index row = (col & ~mask) |
                               (Eigen::Index(pair_bit1(jout)) << a) |
                               (Eigen::Index(pair_bit2(jout)) << b);
      out(row, col) += v;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PauliLabel
// ---------------------------------------------------------------------------

/// Per-register Pauli letters; character i addresses register i.
class PauliLabel {
 public:
  explicit PauliLabel(std::string letters) : letters_(std::move(letters)) {
    if (letters_.empty() || letters_.size() > kMaxQubits)
      throw ValidationError("Pauli label length must be in [1, 6]");
    for (char c : letters_)
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        throw ValidationError("Pauli letters must be I/X/Y/Z, got: " +
                              letters_);
  }

  int n_qubits() const { return static_cast<int>(letters_.size()); }
  const std::string& letters() const { return letters_; }
  char letter(int q) const { return letters_[static_cast<std::size_t>(q)]; }

  Eigen::MatrixXcd matrix() const {
    const Eigen::Index d = dim_of(n_qubits());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(d, d);
    for (int q = 0; q < n_qubits(); ++q) {
      switch (letter(q)) {
        case 'I':
          continue;
        case 'X':
          out = embed_one_qubit_op(gates::pauli_x(), q, n_qubits()) * out;
          break;
        case 'Y':
          out = embed_one_qubit_op(gates::pauli_y(), q, n_qubits()) * out;
          break;
        case 'Z':
          out = embed_one_qubit_op(gates::pauli_z(), q, n_qubits()) * out;
          break;
      }
    }
    return out;
  }

 private:
  std::string letters_;
};

/// All 4^n labels in base-4 order (I < X < Y < Z), register 0 fastest.
inline std::vector<PauliLabel> all_pauli_labels(int n_qubits) {
  check_register_size(n_qubits);
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  std::vector<PauliLabel> labels;
  const std::uint64_t total = 1ULL << (2 * n_qubits);
  labels.reserve(total);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    for (int q = 0; q < n_qubits; ++q)
      s[static_cast<std::size_t>(q)] = kLetters[(code >> (2 * q)) & 3];
    labels.emplace_back(std::move(s));
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

/// sqrt(<psi|rho|psi>), the routed-state success measure. Inner products in
/// [-1e-12, 0) are clamped to 0; anything lower violates the PSD floor.
inline double fidelity(const PureState& ideal, const DensityMatrix& actual) {
  if (ideal.n_qubits() != actual.n_qubits())
    throw ValidationError("fidelity: register sizes differ (" +
                          std::to_string(ideal.n_qubits()) + " vs " +
                          std::to_string(actual.n_qubits()) + ")");
  const Complex overlap =
      (ideal.amplitudes().adjoint() * actual.matrix() * ideal.amplitudes())(0);
  double value = overlap.real();
  if (value < 0.0) {
    if (value < -1e-12)
      throw ValidationError("fidelity: negative overlap beyond tolerance");
    value = 0.0;
  }
  return std::min(std::sqrt(value), 1.0);
}

/// Partial trace keeping the listed registers. Kept registers are reindexed
/// in ascending order of their original index.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  if (keep.empty()) throw ValidationError("partial_trace: empty keep set");
  std::vector<int> kept = keep;
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  for (int q : kept)
    if (q < 0 || q >= rho.n_qubits())
      throw ValidationError("partial_trace: register " + std::to_string(q) +
                            " out of range");
  const int n = rho.n_qubits();
  const int m = static_cast<int>(kept.size());
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(kept.begin(), kept.end(), q)) traced.push_back(q);

  auto expand = [&](std::uint64_t kept_bits, std::uint64_t traced_bits) {
    std::uint64_t full = 0;
    for (int i = 0; i < m; ++i)
      full |= static_cast<std::uint64_t>(bit_of(kept_bits, i)) << kept[i];
    for (std::size_t i = 0; i < traced.size(); ++i)
      full |= static_cast<std::uint64_t>(bit_of(traced_bits, static_cast<int>(i)))
              << traced[i];
    return full;
  };

  const Eigen::Index dm = dim_of(m);
  const std::uint64_t dt = 1ULL << traced.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dm, dm);
  for (Eigen::Index r = 0; r < dm; ++r)
    for (Eigen::Index c = 0; c < dm; ++c)
      for (std::uint64_t t = 0; t < dt; ++t)
        out(r, c) += rho.matrix()(
            static_cast<Eigen::Index>(expand(static_cast<std::uint64_t>(r), t)),
            static_cast<Eigen::Index>(expand(static_cast<std::uint64_t>(c), t)));
  return DensityMatrix(m, std::move(out));
}

/// Tr(P rho); the imaginary residue (< 1e-10 for valid inputs) is dropped.
inline double pauli_expectation(const DensityMatrix& rho,
                                const PauliLabel& label) {
  if (label.n_qubits() != rho.n_qubits())
    throw ValidationError("pauli_expectation: label length != register size");
  const Complex tr = (label.matrix() * rho.matrix()).trace();
  return tr.real();
}

/// Evolve by a unitary embedded on a register pair.
inline DensityMatrix apply_unitary_on_pair(const DensityMatrix& rho,
                                           const Eigen::Matrix4cd& u,
                                           std::pair<int, int> targets) {
  const Eigen::MatrixXcd big = embed_two_qubit_op(u, targets, rho.n_qubits());
  return DensityMatrix(rho.n_qubits(), big * rho.matrix() * big.adjoint());
}

inline DensityMatrix apply_unitary_on_qubit(const DensityMatrix& rho,
                                            const Eigen::Matrix2cd& u, int q) {
  const Eigen::MatrixXcd big = embed_one_qubit_op(u, q, rho.n_qubits());
  return DensityMatrix(rho.n_qubits(), big * rho.matrix() * big.adjoint());
}

}  // namespace qroute
