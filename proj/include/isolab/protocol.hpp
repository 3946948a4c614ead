// Copyright 2026 The isolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ISOLAB_PROTOCOL_HPP
#define ISOLAB_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isolab/channel.hpp"
#include "isolab/linalg.hpp"

namespace isolab {

// Swap-test verification of non-isometry.
//
// The verifier receives a witness on (H (x) R)^2, runs a swap test and rejects
// on the antisymmetric outcome, applies (Phi (x) 1_R) to both copies, then runs
// a second swap test. It accepts when the first test is symmetric and the
// second antisymmetric: a mixed channel output makes the antisymmetric outcome
// likely, while an isometry keeps symmetric states symmetric.

struct SwapTestResult {
    double p_symmetric = 0.0;
    double p_antisymmetric = 0.0;
    /// Normalized projections; empty when the outcome has probability < 1e-12.
    std::optional<DensityMatrix> post_symmetric;
    std::optional<DensityMatrix> post_antisymmetric;
};

/// Swap test on a state over X (x) X. Throws DimensionError when the
/// dimension is not a perfect square.
SwapTestResult swap_test(const DensityMatrix &rho);

/// Witness on (H (x) R)^2 for a channel with input dimension dim_in.
struct WitnessState {
    DensityMatrix state;
};

/// |psi><psi| (x) |psi><psi| for psi on H (x) R.
WitnessState honest_witness(const ChannelHandle &ch, const PureState &psi);

struct ShotRecord {
    std::size_t n = 0;
    std::size_t accepts = 0;
    std::uint64_t seed = 0;
};

struct ProtocolResult {
    double p_step1_symmetric = 0.0;
    /// Zero when step 1 never passes.
    double p_step3_antisymmetric_given_step1 = 0.0;
    double p_accept = 0.0;
    std::optional<ShotRecord> shots;
};

/// (Phi (x) 1_R) applied to each copy of a state on (H (x) R)^2.
ComplexMatrix apply_to_both_copies(const ChannelHandle &ch, const ComplexMatrix &rho);

ProtocolResult run_protocol_exact(const ChannelHandle &ch, const WitnessState &w);

/// Samples both measurement outcomes shot by shot. The shot budget is split
/// over a fixed number of seeded streams, so counts depend only on
/// (witness, shots, seed).
ProtocolResult run_protocol_sampled(const ChannelHandle &ch, const WitnessState &w, std::size_t shots,
                                    std::uint64_t seed);

struct WitnessFamilyOptions {
    std::size_t haar_witnesses = 20;
    bool basis_grid = true;
    std::uint64_t seed = 0;
};

/// Seeded symmetric witnesses: Haar states projected onto the symmetric
/// subspace, then |kk> for every basis state k of H (x) R when basis_grid is set.
std::vector<WitnessState> symmetric_witness_family(const ChannelHandle &ch, const WitnessFamilyOptions &options);

struct ProtocolBoundsOptions {
    SearchOptions search;
    WitnessFamilyOptions witnesses;
};

struct ProtocolBoundsReport {
    double epsilon = 0.0;
    /// epsilon < 1/19, where (1 - eps)/2 > 9 eps separates the two sides.
    bool meaningful_gap = false;

    // Yes side: honest witness on the search minimizer.
    double eps_found = 1.0;
    double yes_p_accept = 0.0;
    double yes_bound = 0.0;  // (1 - eps_found)/2
    bool yes_holds = false;

    // No side, on the sampled witness family.
    bool exact_isometry = false;
    /// The no-side bound is claimed only for exact isometries or when the
    /// search found nothing below 1 - epsilon.
    bool no_side_applicable = false;
    std::size_t witness_count = 0;
    double no_max_p_accept = 0.0;
    double no_bound = 0.0;  // 1e-9 for exact isometries, else 9 eps + 1e-6
    bool no_holds = false;
    std::string no_side_evidence = "sampled evidence";
};

ProtocolBoundsReport protocol_bounds_check(const ChannelHandle &ch, double epsilon, const ProtocolBoundsOptions &options);

}  // namespace isolab

#endif
