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

#include "qroute/tomography.hpp"
#include "test_support.hpp"

using namespace qroute;
using Catch::Approx;

namespace {

/// Integer counts matching an exact distribution (the rounding remainder
/// goes to the largest bucket so the total stays exact).
ShotCounts counts_from_distribution(const Eigen::VectorXd& dist,
                                    std::uint64_t shots, int n_qubits) {
  ShotCounts counts;
  counts.total_shots = shots;
  std::uint64_t used = 0;
  Eigen::Index argmax = 0;
  for (Eigen::Index i = 0; i < dist.size(); ++i) {
    if (dist(i) > dist(argmax)) argmax = i;
    const auto c = static_cast<std::uint64_t>(
        std::llround(dist(i) * static_cast<double>(shots)));
    if (c > 0) counts.counts[index_to_bits(static_cast<std::uint64_t>(i), n_qubits)] = c;
    used += c;
  }
  auto& top = counts.counts[index_to_bits(static_cast<std::uint64_t>(argmax), n_qubits)];
  top += shots - used;
  return counts;
}

std::map<std::string, ShotCounts> exact_counts(const DensityMatrix& rho,
                                               std::uint64_t shots) {
  std::map<std::string, ShotCounts> out;
  for (const auto& [setting, dist] : exact_tomography_distributions(rho))
    out.emplace(setting, counts_from_distribution(dist, shots, rho.n_qubits()));
  return out;
}

std::map<std::string, double> exact_expectations(const DensityMatrix& rho) {
  std::map<std::string, double> out;
  for (const PauliLabel& label : all_pauli_labels(rho.n_qubits()))
    out[label.letters()] = pauli_expectation(rho, label);
  return out;
}

}  // namespace

TEST_CASE("setting enumeration") {
  REQUIRE(build_settings(1).size() == 3);
  REQUIRE(build_settings(2).size() == 9);
  REQUIRE(build_settings(5).size() == 243);
  REQUIRE_THROWS_AS(build_settings(0), ValidationError);
  REQUIRE_THROWS_AS(build_settings(6), ValidationError);

  const auto settings = build_settings(2);
  const std::set<std::string> unique(settings.begin(), settings.end());
  REQUIRE(unique.size() == 9);
  for (const auto& s : settings)
    for (char c : s) REQUIRE((c == 'X' || c == 'Y' || c == 'Z'));

  // 31 program variants at 5 registers: the full campaign budget
  REQUIRE(tomography_circuit_budget(5, 31) == 7533);
  const TomographyJob job = TomographyJob::for_qubits({0, 1, 2, 3, 4});
  REQUIRE(job.circuits() == 243);
}

TEST_CASE("expectations from exact counts") {
  SECTION("|0> state") {
    const auto exp = expectations_from_counts(
        1, exact_counts(DensityMatrix::basis(1, 0), 8192));
    REQUIRE(exp.at("Z") == Approx(1.0).margin(1e-12));
    REQUIRE(exp.at("X") == Approx(0.0).margin(1e-12));
    REQUIRE(exp.at("Y") == Approx(0.0).margin(1e-12));
    REQUIRE(exp.at("I") == 1.0);
  }

  SECTION("Bell state parities") {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const DensityMatrix rho = DensityMatrix::from_pure(PureState(2, bell));
    const auto exp = expectations_from_counts(2, exact_counts(rho, 8192));
    REQUIRE(exp.at("XX") == Approx(1.0).margin(1e-12));
    REQUIRE(exp.at("ZZ") == Approx(1.0).margin(1e-12));
    REQUIRE(exp.at("YY") == Approx(-1.0).margin(1e-12));
    REQUIRE(exp.at("ZI") == Approx(0.0).margin(1e-12));
    REQUIRE(exp.at("II") == 1.0);
  }

  SECTION("missing settings are rejected") {
    auto counts = exact_counts(DensityMatrix::basis(1, 0), 64);
    counts.erase("Y");
    REQUIRE_THROWS_WITH(expectations_from_counts(1, counts),
                        Catch::Matchers::ContainsSubstring("Y"));
  }
}

TEST_CASE("finite-shot expectations track the truth") {
  Rng rng(101);
  const DensityMatrix rho =
      DensityMatrix::from_pure(testing::random_pure_state(2, rng));
  const std::uint64_t shots = 8192;
  const auto counts = sample_tomography(rho, shots, 555);
  const auto exp = expectations_from_counts(2, counts);
  const double bound = 5.0 / std::sqrt(static_cast<double>(shots));
  for (const PauliLabel& label : all_pauli_labels(2))
    REQUIRE(std::abs(exp.at(label.letters()) -
                     pauli_expectation(rho, label)) < bound);
}

TEST_CASE("reconstruction") {
  Rng rng(103);

  SECTION("exact expectations of a pure state reproduce it") {
    const PureState psi = testing::random_pure_state(2, rng);
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    const ReconstructedState recon = reconstruct(2, exact_expectations(rho));
    REQUIRE((recon.rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE(recon.clipped_mass < 1e-10);
  }

  SECTION("exact expectations of the maximally mixed state") {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    const ReconstructedState recon = reconstruct(2, exact_expectations(rho));
    REQUIRE((recon.rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }

  SECTION("linear inversion identity on random mixed states") {
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho = testing::random_density_matrix(2, rng);
      const ReconstructedState recon = reconstruct(2, exact_expectations(rho));
      REQUIRE((recon.rho.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SECTION("noisy reconstruction keeps high fidelity and unit trace") {
    for (int trial = 0; trial < 5; ++trial) {
      const PureState psi = testing::random_pure_state(2, rng);
      const DensityMatrix rho = DensityMatrix::from_pure(psi);
      const auto counts = sample_tomography(rho, 8192, mix_seed(777, trial));
      const ReconstructedState recon =
          reconstruct(2, expectations_from_counts(2, counts), 8192);
      REQUIRE(std::abs(recon.rho.matrix().trace().real() - 1.0) < 1e-12);
      REQUIRE(tomographic_fidelity(psi, recon) > 0.99);
      recon.rho.validate();
    }
  }

  SECTION("missing labels are rejected") {
    auto exp = exact_expectations(DensityMatrix::basis(2, 0));
    exp.erase("XY");
    REQUIRE_THROWS_AS(reconstruct(2, exp), ValidationError);
  }
}

TEST_CASE("tomographic fidelity") {
  Rng rng(107);

  SECTION("reconstructing the ideal state scores ~1 at 8192 shots") {
    const PureState psi = PureState::from_bits("10");
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    const auto counts = sample_tomography(rho, 8192, 31337);
    const ReconstructedState recon =
        reconstruct(2, expectations_from_counts(2, counts), 8192);
    // The clip-and-renormalize projection costs a few parts in 1e3 on a
    // rank-1 state at these shots (median deficit ~3.4e-3 over seeds).
    REQUIRE(tomographic_fidelity(psi, recon) == Approx(1.0).margin(5e-3));
  }

  SECTION("orthogonal states score ~0") {
    const DensityMatrix rho = DensityMatrix::basis(2, 0);
    const ReconstructedState recon = reconstruct(2, exact_expectations(rho));
    REQUIRE(tomographic_fidelity(PureState::from_bits("11"), recon) < 1e-5);
  }
}

TEST_CASE("noiseless round trip through sampling machinery") {
  // Exact distributions -> exact counts -> reconstruction -> fidelity 1.
  Rng rng(109);
  const PureState psi = testing::random_pure_state(2, rng);
  const DensityMatrix rho = DensityMatrix::from_pure(psi);
  // 2^13 shots keep dyadic probabilities exact; generic amplitudes round to
  // within 1/shots, so allow the rounding in the tolerance.
  const auto counts = exact_counts(rho, 1 << 20);
  const ReconstructedState recon =
      reconstruct(2, expectations_from_counts(2, counts));
  REQUIRE(tomographic_fidelity(psi, recon) == Approx(1.0).margin(1e-4));
}

TEST_CASE("mitigated tomography removes readout bias") {
  Rng rng(113);
  Eigen::Matrix2d c;
  c << 0.97, 0.06, 0.03, 0.94;
  const ConfusionModel model = ConfusionModel::per_qubit({c, c});
  const PureState psi = testing::random_pure_state(2, rng);
  const DensityMatrix rho = DensityMatrix::from_pure(psi);

  // Sampled through readout, reconstructed raw vs mitigated.
  const auto counts = sample_tomography(rho, 1 << 16, 2024, &model);
  const ReconstructedState raw =
      reconstruct(2, expectations_from_counts(2, counts));
  const ReconstructedState mitigated =
      reconstruct(2, expectations_from_counts(2, counts, &model));
  REQUIRE(tomographic_fidelity(psi, mitigated) >
          tomographic_fidelity(psi, raw));
  REQUIRE(tomographic_fidelity(psi, mitigated) > 0.995);
}
