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

#include "isolab/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "isolab/random.hpp"

namespace isolab {

namespace {

constexpr double kNegligible = 1e-12;
constexpr std::size_t kShotStreams = 16;

std::size_t integer_sqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (r * r != n) {
        throw DimensionError("swap test needs a square bipartition, got dimension " + std::to_string(n));
    }
    return r;
}

// swapped[a] = W a for basis index a of C^d (x) C^d.
std::vector<Eigen::Index> swap_permutation(std::size_t d) {
    std::vector<Eigen::Index> out(d * d);
    for (std::size_t a = 0; a < d * d; ++a) {
        out[a] = static_cast<Eigen::Index>((a % d) * d + a / d);
    }
    return out;
}

double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::optional<DensityMatrix> normalized_projection(const ComplexMatrix &m, double p) {
    if (p < kNegligible) {
        return std::nullopt;
    }
    ComplexMatrix h = m / p;
    h = (h + h.adjoint()) / 2.0;
    return DensityMatrix(std::move(h));
}

void check_witness(const ChannelHandle &ch, const WitnessState &w) {
    const std::size_t d = ch.dim_in() * ch.dim_in();
    if (w.state.dim() != d * d) {
        throw DimensionError("witness dimension " + std::to_string(w.state.dim()) + " does not match (dim_in^2)^2 = " +
                             std::to_string(d * d));
    }
}

}  // namespace

SwapTestResult swap_test(const DensityMatrix &rho) {
    const std::size_t d = integer_sqrt(rho.dim());
    const auto perm = swap_permutation(d);
    const ComplexMatrix &m = rho.matrix();
    const ComplexMatrix wm = m(perm, Eigen::all);      // W rho
    const ComplexMatrix mw = m(Eigen::all, perm);      // rho W
    const ComplexMatrix wmw = m(perm, perm);           // W rho W
    const double overlap = wm.trace().real();           // tr(W rho)

    SwapTestResult out;
    out.p_symmetric = std::clamp((1.0 + overlap) / 2.0, 0.0, 1.0);
    out.p_antisymmetric = std::clamp((1.0 - overlap) / 2.0, 0.0, 1.0);
    out.post_symmetric = normalized_projection((m + wm + mw + wmw) / 4.0, out.p_symmetric);
    out.post_antisymmetric = normalized_projection((m - wm - mw + wmw) / 4.0, out.p_antisymmetric);
    return out;
}

WitnessState honest_witness(const ChannelHandle &ch, const PureState &psi) {
    if (psi.dim() != ch.dim_in() * ch.dim_in()) {
        throw DimensionError("honest_witness: state dimension " + std::to_string(psi.dim()) +
                             " is not dim_in^2 = " + std::to_string(ch.dim_in() * ch.dim_in()));
    }
    return WitnessState{tensor(psi, psi).density()};
}

ComplexMatrix apply_to_both_copies(const ChannelHandle &ch, const ComplexMatrix &rho) {
    const std::size_t n_in = ch.input_qubits();
    const std::size_t n_out = ch.output_qubits();
    const std::size_t peak = ch.circuit().peak_qubits();
    const std::size_t widest = std::max(peak + 3 * n_in, n_out + peak + 2 * n_in);
    const std::size_t cap = max_total_dim();
    if (widest >= 63 || (std::size_t{1} << widest) > cap) {
        throw DimensionCapError("protocol needs dimension 2^" + std::to_string(widest) + ", above the cap of " +
                                std::to_string(cap));
    }
    // Register: H1 R1 H2 R2 -> K1 R1 H2 R2 -> K1 R1 K2 R2.
    ComplexMatrix first = apply_circuit_embedded(ch.circuit(), rho, 0, 3 * n_in);
    return apply_circuit_embedded(ch.circuit(), first, n_out + n_in, n_in);
}

ProtocolResult run_protocol_exact(const ChannelHandle &ch, const WitnessState &w) {
    check_witness(ch, w);
    ProtocolResult out;
    const SwapTestResult step1 = swap_test(w.state);
    out.p_step1_symmetric = step1.p_symmetric;
    if (!step1.post_symmetric) {
        return out;
    }
    ComplexMatrix sigma = apply_to_both_copies(ch, step1.post_symmetric->matrix());
    sigma = (sigma + sigma.adjoint()) / 2.0;
    const SwapTestResult step3 = swap_test(DensityMatrix(std::move(sigma)));
    out.p_step3_antisymmetric_given_step1 = step3.p_antisymmetric;
    out.p_accept = out.p_step1_symmetric * out.p_step3_antisymmetric_given_step1;
    return out;
}

ProtocolResult run_protocol_sampled(const ChannelHandle &ch, const WitnessState &w, std::size_t shots,
                                    std::uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("run_protocol_sampled: shots must be at least 1");
    }
    ProtocolResult out = run_protocol_exact(ch, w);
    // Every shot that passes step 1 leaves the same post-measurement state, so
    // step 3 is sampled from its conditional probability.
    std::size_t accepts = 0;
    for (std::size_t s = 0; s < kShotStreams; ++s) {
        const std::size_t budget = shots / kShotStreams + (s < shots % kShotStreams ? 1 : 0);
        Rng rng = stream_rng(seed, s);
        for (std::size_t k = 0; k < budget; ++k) {
            const bool symmetric = uniform01(rng) < out.p_step1_symmetric;
            if (!symmetric) {
                continue;
            }
            if (uniform01(rng) < out.p_step3_antisymmetric_given_step1) {
                ++accepts;
            }
        }
    }
    out.shots = ShotRecord{shots, accepts, seed};
    return out;
}

std::vector<WitnessState> symmetric_witness_family(const ChannelHandle &ch, const WitnessFamilyOptions &options) {
    const std::size_t d = ch.dim_in() * ch.dim_in();
    const auto perm = swap_permutation(d);
    std::vector<WitnessState> family;
    Rng rng = stream_rng(options.seed, 0);
    for (std::size_t k = 0; k < options.haar_witnesses; ++k) {
        ComplexVector v = haar_pure_state(d * d, rng).amplitudes();
        ComplexVector sym = (v + ComplexVector(v(perm))) / 2.0;
        family.push_back(WitnessState{PureState::normalized(sym).density()});
    }
    if (options.basis_grid) {
        for (std::size_t k = 0; k < d; ++k) {
            const PureState b = PureState::basis(d, k);
            family.push_back(WitnessState{tensor(b, b).density()});
        }
    }
    return family;
}

ProtocolBoundsReport protocol_bounds_check(const ChannelHandle &ch, double epsilon, const ProtocolBoundsOptions &options) {
    ProtocolBoundsReport report;
    report.epsilon = epsilon;
    report.meaningful_gap = epsilon > 0.0 && epsilon < 1.0 / 19.0;

    const MinOutputResult search = min_output_opnorm(ch, options.search);
    report.eps_found = search.value;
    report.yes_p_accept = run_protocol_exact(ch, honest_witness(ch, search.minimizer)).p_accept;
    report.yes_bound = (1.0 - search.value) / 2.0;
    report.yes_holds = report.yes_p_accept >= report.yes_bound - 1e-6;

    report.exact_isometry = exact_isometry_test(ch).exact_isometry;
    report.no_side_applicable = report.exact_isometry || search.value >= 1.0 - epsilon;
    report.no_bound = report.exact_isometry ? 1e-9 : 9.0 * epsilon + 1e-6;
    const auto family = symmetric_witness_family(ch, options.witnesses);
    report.witness_count = family.size();
    for (const auto &w : family) {
        report.no_max_p_accept = std::max(report.no_max_p_accept, run_protocol_exact(ch, w).p_accept);
    }
    report.no_holds = !report.no_side_applicable || report.no_max_p_accept <= report.no_bound;
    return report;
}

}  // namespace isolab
