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

#ifndef ISOLAB_CHANNEL_HPP
#define ISOLAB_CHANNEL_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isolab/circuit.hpp"
#include "isolab/linalg.hpp"

namespace isolab {

/// A quantum channel from 2^n_in to 2^n_out dimensions, backed by a validated
/// circuit. The reference system R used by the extended channel Phi (x) 1_R
/// always has the input dimension.
class ChannelHandle {
   public:
    /// Throws CircuitError if the circuit does not validate.
    explicit ChannelHandle(Circuit circuit);

    const Circuit &circuit() const { return circuit_; }
    std::size_t input_qubits() const { return circuit_.input_qubits(); }
    std::size_t output_qubits() const { return circuit_.output_qubits(); }
    std::size_t dim_in() const { return std::size_t{1} << input_qubits(); }
    std::size_t dim_out() const { return std::size_t{1} << output_qubits(); }

    DensityMatrix apply(const DensityMatrix &rho) const;

    /// Phi (x) 1 on a matrix over H (x) [trailing qubits]. Unvalidated.
    ComplexMatrix apply_raw(const ComplexMatrix &rho, std::size_t trailing_qubits = 0) const;

    /// Throws DimensionCapError unless dim_in times the widest intermediate
    /// register fits under max_total_dim().
    void check_extended_cap() const;

   private:
    Circuit circuit_;
};

/// Normalized Choi matrix (Phi (x) 1)(|phi+><phi+|) on K (x) H.
struct ChoiMatrix {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    DensityMatrix matrix;
};

struct KrausSet {
    std::size_t dim_in = 0;
    std::size_t dim_out = 0;
    std::vector<ComplexMatrix> operators;  // each dim_out x dim_in

    /// sum_i A_i x A_i*, for any dim_in x dim_in matrix x.
    ComplexMatrix apply(const ComplexMatrix &x) const;
    /// Max-entry deviation of sum_i A_i* A_i from the identity.
    double completeness_error() const;
};

ChoiMatrix choi_of(const ChannelHandle &ch);

/// Descending Choi spectrum.
RealVector choi_eigenvalues(const ChoiMatrix &c);
std::size_t choi_rank(const ChoiMatrix &c, double rank_tol = tol::kRank);

/// One Kraus operator per Choi eigenvalue above rank_tol, largest first.
KrausSet kraus_from_choi(const ChoiMatrix &c, double rank_tol = tol::kRank);

/// Max-entry residual between the Kraus action and the circuit on every
/// matrix unit |i><j|.
double kraus_reconstruction_residual(const ChannelHandle &ch, const KrausSet &k);

struct ExactIsometryResult {
    std::size_t choi_rank = 0;
    bool exact_isometry = false;
    /// Present when the Choi rank is 1 and A*A = I holds within 1e-9.
    std::optional<ComplexMatrix> isometry_operator;
    /// Max-entry deviation of A*A from I for the single Kraus operator
    /// (NaN when the rank is not 1).
    double isometry_residual = 0.0;
};

ExactIsometryResult exact_isometry_test(const ChannelHandle &ch, double rank_tol = tol::kRank);

/// (Phi (x) 1_R)(|psi><psi|), psi on H (x) R with dim R = dim H.
DensityMatrix apply_extended(const ChannelHandle &ch, const PureState &psi);

struct SearchOptions {
    std::size_t restarts = 16;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 2000;
    /// A local search stops once an accepted step improves the objective by
    /// less than this.
    double improvement_tolerance = 1e-10;
    /// 0 = hardware concurrency. The result does not depend on this value.
    std::size_t threads = 0;
};

struct MinOutputResult {
    double value = 1.0;
    PureState minimizer = PureState::basis(1, 0);
    /// Final objective of each restart, indexed by restart.
    std::vector<double> restart_values;
};

/// Upper bound on min_psi ||(Phi (x) 1_R)(psi psi*)||_inf by projected gradient
/// descent on the unit sphere of H (x) R from seeded random starts. Each
/// restart descends a sequence of Schatten p-norms (p = 2 .. 1024) before the
/// largest eigenvalue itself, keeping the best point seen. Restart k
/// depends only on (seed, k), so more restarts never raise the value.
MinOutputResult min_output_opnorm(const ChannelHandle &ch, const SearchOptions &options);
MinOutputResult min_output_opnorm(const ChannelHandle &ch, std::size_t restarts, std::uint64_t seed);

/// Largest eigenvalue of the extended output at psi, and its gradient with
/// respect to the amplitudes (complex form, 2 H psi).
struct ExtendedObjective {
    explicit ExtendedObjective(const KrausSet &kraus);
    double value(const ComplexVector &psi) const;
    double value_and_gradient(const ComplexVector &psi, ComplexVector &gradient) const;
    /// Schatten p-norm of the extended output, an upper bound on the largest
    /// eigenvalue that is smooth away from zero. Gradient is optional.
    double schatten(const ComplexVector &psi, double p, ComplexVector *gradient) const;

   private:
    std::size_t dim_in_;
    std::size_t dim_out_;
    std::size_t rank_;
    ComplexMatrix stacked_;  // rank*dim_out x dim_in, Kraus operators stacked vertically
    ComplexMatrix stacked_t_;
    std::vector<ComplexMatrix> conj_ops_;

    ComplexMatrix outputs(const ComplexVector &psi) const;
};

enum class Classification { YesInstance, NoInstance, Indeterminate };
std::string to_string(Classification c);

struct ClassificationResult {
    Classification classification = Classification::Indeterminate;
    double min_found = 1.0;
    /// Lower bound on the true minimum, when one is known.
    std::optional<double> certified_lower_bound;
    bool exact_isometry = false;
};

/// Decides the promise problem at `epsilon` in [0, 1/2). A no-instance needs a
/// certified lower bound >= 1 - epsilon: an exact isometry gives 1, and a
/// caller may pass one (for example from a reduction's acceptance
/// probability). Otherwise a value above epsilon is reported indeterminate.
ClassificationResult classify_nonisometry(const ChannelHandle &ch, double epsilon, const SearchOptions &options,
                                          std::optional<double> certified_lower_bound = std::nullopt);

struct IsometryReport {
    std::size_t choi_rank = 0;
    bool exact_isometry = false;
    std::optional<ComplexMatrix> isometry_operator;
    double min_output_opnorm = 1.0;
    PureState minimizing_state = PureState::basis(1, 0);
    Classification classification = Classification::Indeterminate;
    double epsilon = 0.0;
};

IsometryReport analyze_isometry(const ChannelHandle &ch, double epsilon, const SearchOptions &options);

class NotNearIsometryError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct ApproxIsometry {
    ComplexMatrix operator_a;               // dim_out x dim_in, column i = c_i |psi_i>
    std::vector<Complex> phases;            // c_i, c_0 = 1
    std::vector<PureState> column_states;   // |psi_i>
    double min_probe_opnorm = 1.0;          // over |ii> and (|ii>+|jj>)/sqrt 2 on H (x) R
    double eps_measured = 0.0;              // 1 - min_probe_opnorm
    double max_probe_distance = 0.0;        // max ||Phi(rho) - A rho A*||_tr over probes on H
    std::size_t probe_count = 0;
};

/// Builds A|i> = c_i |psi_i> from the top eigenvectors of Phi(|i><i|), fixing
/// each phase c_i against the top singular pair of Phi(|0><i|). Throws
/// NotNearIsometryError if a basis or pair probe output has opnorm below 1/2.
ApproxIsometry extract_approx_isometry(const ChannelHandle &ch, std::uint64_t seed = 0,
                                       std::size_t random_probes = 50);

}  // namespace isolab

#endif
