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

#include "isolab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <string>

namespace isolab {

namespace {

std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// Mixed-radix digits of `index`, most significant factor first.
void split_index(std::size_t index, std::span<const std::size_t> dims, std::vector<std::size_t> &digits) {
    digits.resize(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
}

double max_abs_entry(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

std::size_t max_total_dim() {
    if (const char *env = std::getenv("ISOLAB_MAX_DIM")) {
        char *end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::size_t{1} << 12;
}

bool all_finite(const ComplexMatrix &m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
                return false;
            }
        }
    }
    return true;
}

bool is_hermitian(const ComplexMatrix &m, double tolerance) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return max_abs_entry(m - m.adjoint()) <= tolerance;
}

HermitianEigen hermitian_eigen(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("hermitian_eigen: matrix is not square");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigen: eigensolver did not converge");
    }
    HermitianEigen out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

std::pair<double, ComplexVector> top_eigenpair(const ComplexMatrix &hermitian) {
    if (hermitian.rows() == 0) {
        throw DimensionError("top_eigenpair: empty matrix");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("top_eigenpair: eigensolver did not converge");
    }
    const auto &values = solver.eigenvalues();
    Eigen::Index k = values.size() - 1;
    while (k > 0 && values[k - 1] == values[values.size() - 1]) {
        --k;
    }
    return {values[values.size() - 1], solver.eigenvectors().col(k)};
}

ComplexMatrix tensor(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

ComplexVector tensor(const ComplexVector &a, const ComplexVector &b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a[i] * b;
    }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix &m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
    const std::size_t total = product(dims);
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
        throw DimensionError("partial_trace: factor dimensions do not match the matrix (" +
                             std::to_string(total) + " vs " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + ")");
    }
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= dims.size()) {
            throw DimensionError("partial_trace: kept factor index out of range");
        }
        kept[k] = true;
    }
    std::size_t kept_dim = 1;
    std::size_t traced_dim = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        (kept[k] ? kept_dim : traced_dim) *= dims[k];
    }

    // groups[t][i] is the full index whose traced digits encode t and kept digits encode i.
    std::vector<std::vector<Eigen::Index>> groups(traced_dim, std::vector<Eigen::Index>(kept_dim));
    std::vector<std::size_t> digits;
    for (std::size_t full = 0; full < total; ++full) {
        split_index(full, dims, digits);
        std::size_t ki = 0;
        std::size_t ti = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (kept[k]) {
                ki = ki * dims[k] + digits[k];
            } else {
                ti = ti * dims[k] + digits[k];
            }
        }
        groups[ti][ki] = static_cast<Eigen::Index>(full);
    }

    ComplexMatrix out = ComplexMatrix::Zero(kept_dim, kept_dim);
    for (const auto &g : groups) {
        out += m(g, g);
    }
    return out;
}

ComplexMatrix permute_factors(const ComplexMatrix &m, std::span<const std::size_t> dims,
                              std::span<const std::size_t> perm) {
    const std::size_t total = product(dims);
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total) {
        throw DimensionError("permute_factors: factor dimensions do not match the matrix");
    }
    if (perm.size() != dims.size()) {
        throw DimensionError("permute_factors: permutation has the wrong length");
    }
    std::vector<bool> seen(dims.size(), false);
    std::vector<std::size_t> new_dims(dims.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] >= dims.size() || seen[perm[k]]) {
            throw DimensionError("permute_factors: not a permutation");
        }
        seen[perm[k]] = true;
        new_dims[k] = dims[perm[k]];
    }

    // source[new_index] = old_index
    std::vector<Eigen::Index> source(total);
    std::vector<std::size_t> digits;
    std::vector<std::size_t> old_digits(dims.size());
    for (std::size_t idx = 0; idx < total; ++idx) {
        split_index(idx, new_dims, digits);
        for (std::size_t k = 0; k < perm.size(); ++k) {
            old_digits[perm[k]] = digits[k];
        }
        std::size_t old = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            old = old * dims[k] + old_digits[k];
        }
        source[idx] = static_cast<Eigen::Index>(old);
    }
    return m(source, source);
}

double operator_norm(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    if (is_hermitian(m, 1e-14 * std::max(1.0, max_abs_entry(m)))) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    return svd.singularValues()[0];
}

double trace_norm(const ComplexMatrix &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    if (is_hermitian(m, 1e-14 * std::max(1.0, max_abs_entry(m)))) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().cwiseAbs().sum();
    }
    Eigen::BDCSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

ComplexMatrix psd_sqrt(const ComplexMatrix &m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    RealVector roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const auto &v = solver.eigenvectors();
    return v * roots.asDiagonal() * v.adjoint();
}

DensityMatrix::DensityMatrix(ComplexMatrix m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument("density matrix must be square and non-empty");
    }
    if (!all_finite(m)) {
        throw std::invalid_argument("density matrix has non-finite entries");
    }
    if (!is_hermitian(m, tol::kStructural)) {
        throw std::invalid_argument("density matrix is not Hermitian");
    }
    ComplexMatrix h = (m + m.adjoint()) / 2.0;
    const double trace = h.trace().real();
    if (std::abs(trace - 1.0) > tol::kStructural) {
        throw std::invalid_argument("density matrix trace " + std::to_string(trace) + " is not 1");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    const double min_eig = solver.eigenvalues()[0];
    if (min_eig < -tol::kClamp) {
        throw std::invalid_argument("density matrix has negative eigenvalue " + std::to_string(min_eig));
    }
    if (min_eig < 0.0) {
        RealVector clamped = solver.eigenvalues().cwiseMax(0.0);
        clamped /= clamped.sum();
        const auto &v = solver.eigenvectors();
        h = v * clamped.asDiagonal() * v.adjoint();
    } else {
        h /= trace;
    }
    matrix_ = std::move(h);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("maximally_mixed: dimension must be positive");
    }
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), Trusted{});
}

DensityMatrix DensityMatrix::basis(std::size_t dim, std::size_t index) {
    return PureState::basis(dim, index).density();
}

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw std::invalid_argument("pure state must be non-empty");
    }
    if (!all_finite(amplitudes_)) {
        throw std::invalid_argument("pure state has non-finite amplitudes");
    }
    if (std::abs(amplitudes_.norm() - 1.0) > tol::kStructural) {
        throw std::invalid_argument("pure state is not normalized");
    }
}

PureState PureState::normalized(const ComplexVector &v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    return PureState(v / n);
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw std::invalid_argument("basis index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v[index] = 1.0;
    return PureState(std::move(v));
}

PureState PureState::maximally_entangled(std::size_t d) {
    if (d == 0) {
        throw std::invalid_argument("maximally_entangled: dimension must be positive");
    }
    ComplexVector v = ComplexVector::Zero(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        v[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return PureState(std::move(v));
}

ComplexMatrix PureState::projector() const {
    return amplitudes_ * amplitudes_.adjoint();
}

DensityMatrix PureState::density() const {
    return DensityMatrix(projector(), DensityMatrix::Trusted{});
}

DensityMatrix tensor(const DensityMatrix &a, const DensityMatrix &b) {
    return DensityMatrix(tensor(a.matrix(), b.matrix()));
}

PureState tensor(const PureState &a, const PureState &b) {
    return PureState::normalized(tensor(a.amplitudes(), b.amplitudes()));
}

double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DimensionError("fidelity: states have different dimensions");
    }
    // tr|sqrt(rho) sqrt(sigma)| from both spectra. Eigenvalues at the rounding
    // floor are dropped so their square roots do not leak into the result.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(rho.dim());
    auto root_factor = [floor](const ComplexMatrix &m) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
        RealVector values = solver.eigenvalues();
        for (Eigen::Index k = 0; k < values.size(); ++k) {
            values[k] = values[k] > floor ? std::sqrt(values[k]) : 0.0;
        }
        return ComplexMatrix(solver.eigenvectors() * values.cast<Complex>().asDiagonal());
    };
    const ComplexMatrix product = root_factor(rho.matrix()).adjoint() * root_factor(sigma.matrix());
    Eigen::BDCSVD<ComplexMatrix> svd(product);
    return std::clamp(svd.singularValues().sum(), 0.0, 1.0);
}

PurityMetrics purity_metrics(const DensityMatrix &rho) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho.matrix(), Eigen::EigenvaluesOnly);
    const RealVector &values = solver.eigenvalues();
    const double opnorm = values.maxCoeff();
    // tr(rho^2) from the spectrum keeps the sandwich opnorm^2 <= purity <= opnorm exact
    // up to the rounding of a single eigensolve.
    const double purity = values.squaredNorm();
    return {purity, opnorm, 2.0 * (1.0 - opnorm)};
}

PureState closest_pure_state(const DensityMatrix &rho) {
    return PureState::normalized(top_eigenpair(rho.matrix()).second);
}

ComplexMatrix swap_operator(std::size_t dim) {
    const std::size_t n = dim * dim;
    ComplexMatrix w = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            w(j * dim + i, i * dim + j) = 1.0;
        }
    }
    return w;
}

SwapProjectors sym_antisym_projectors(std::size_t dim) {
    if (dim == 0) {
        throw std::invalid_argument("sym_antisym_projectors: dimension must be positive");
    }
    const ComplexMatrix id = ComplexMatrix::Identity(dim * dim, dim * dim);
    const ComplexMatrix w = swap_operator(dim);
    return {(id + w) / 2.0, (id - w) / 2.0};
}

std::size_t qubit_count(std::size_t dim) {
    if (dim == 0 || (dim & (dim - 1)) != 0) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) {
        ++n;
    }
    return n;
}

}  // namespace isolab
