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

#ifndef ISOLAB_LINALG_HPP
#define ISOLAB_LINALG_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace isolab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
// Structural invariants of states, unitaries and Kraus sets.
inline constexpr double kStructural = 1e-9;
// Eigenvalues of a density matrix in [-kClamp, 0) are treated as rounding.
inline constexpr double kClamp = 1e-9;
// Choi eigenvalues above this count toward the Kraus rank.
inline constexpr double kRank = 1e-7;
}  // namespace tol

/// Raised when operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a requested computation exceeds the configured size cap.
class DimensionCapError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// Largest total matrix dimension the analysis routines will build.
/// Defaults to 2^12; the ISOLAB_MAX_DIM environment variable overrides it.
std::size_t max_total_dim();

bool all_finite(const ComplexMatrix &m);
bool is_hermitian(const ComplexMatrix &m, double tolerance = tol::kStructural);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order.
struct HermitianEigen {
    RealVector values;
    ComplexMatrix vectors;  // column k pairs with values[k]
};
HermitianEigen hermitian_eigen(const ComplexMatrix &m);

/// Largest eigenvalue and its eigenvector. Ties go to the lowest index of the
/// ascending spectrum, which keeps the choice deterministic.
std::pair<double, ComplexVector> top_eigenpair(const ComplexMatrix &hermitian);

/// Kronecker product. Factor 0 (`a`) occupies the most significant slot.
ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b);
ComplexVector tensor(const ComplexVector &a, const ComplexVector &b);

/// Traces out every factor not listed in `keep`. Kept factors stay in their
/// original relative order.
ComplexMatrix partial_trace(const ComplexMatrix &m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// Reorders tensor factors: factor k of the result is factor perm[k] of `m`.
ComplexMatrix permute_factors(const ComplexMatrix &m, std::span<const std::size_t> dims,
                              std::span<const std::size_t> perm);

double operator_norm(const ComplexMatrix &m);
double trace_norm(const ComplexMatrix &m);

/// Principal square root of a positive semidefinite matrix (negative
/// eigenvalues from rounding are clipped).
ComplexMatrix psd_sqrt(const ComplexMatrix &m);

/// Unit-trace positive semidefinite Hermitian matrix.
class DensityMatrix {
   public:
    /// Validates `m`. Hermitian deviation above 1e-9, eigenvalues below -1e-9
    /// or a trace off by more than 1e-9 are rejected with std::invalid_argument.
    /// Small negative eigenvalues are clamped to zero and the trace renormalized.
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix maximally_mixed(std::size_t dim);
    static DensityMatrix basis(std::size_t dim, std::size_t index);

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const ComplexMatrix &matrix() const { return matrix_; }

   private:
    struct Trusted {};
    DensityMatrix(ComplexMatrix m, Trusted) : matrix_(std::move(m)) {}
    friend class PureState;

    ComplexMatrix matrix_;
};

/// Unit vector in a finite-dimensional Hilbert space.
class PureState {
   public:
    /// Rejects vectors whose norm differs from 1 by more than 1e-9.
    explicit PureState(ComplexVector amplitudes);

    /// Normalizes `v`; throws when `v` is zero.
    static PureState normalized(const ComplexVector &v);
    static PureState basis(std::size_t dim, std::size_t index);
    /// (1/sqrt(d)) sum_i |i>|i>, on a d*d dimensional space.
    static PureState maximally_entangled(std::size_t d);

    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const ComplexVector &amplitudes() const { return amplitudes_; }
    ComplexMatrix projector() const;
    DensityMatrix density() const;

   private:
    ComplexVector amplitudes_;
};

/// Product of two states, first factor in the most significant slot.
DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b);
PureState tensor(const PureState &a, const PureState &b);

/// tr sqrt( sqrt(rho) sigma sqrt(rho) ), clipped to [0, 1].
double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

struct PurityMetrics {
    double purity;         // tr(rho^2)
    double opnorm;         // largest eigenvalue
    double tdist_to_pure;  // min over pure psi of ||rho - psi psi*||_tr = 2(1 - opnorm)
};
PurityMetrics purity_metrics(const DensityMatrix &rho);

/// The pure state closest to `rho` in trace distance: its top eigenvector.
PureState closest_pure_state(const DensityMatrix &rho);

/// Swap operator W on C^dim (x) C^dim: W|ij> = |ji>.
ComplexMatrix swap_operator(std::size_t dim);

struct SwapProjectors {
    ComplexMatrix symmetric;      // (I + W) / 2
    ComplexMatrix antisymmetric;  // (I - W) / 2
};
SwapProjectors sym_antisym_projectors(std::size_t dim);

/// Integer base-2 logarithm of `dim`; throws DimensionError if `dim` is not a
/// power of two.
std::size_t qubit_count(std::size_t dim);

}  // namespace isolab

#endif
