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

#include "isolab/random.hpp"

#include <cmath>

namespace isolab {

Rng stream_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            g(i, j) = Complex(re, im);
        }
    }
    return g;
}

PureState haar_pure_state(std::size_t dim, Rng &rng) {
    ComplexMatrix g = ginibre(dim, 1, rng);
    return PureState::normalized(g.col(0));
}

ComplexMatrix haar_unitary(std::size_t dim, Rng &rng) {
    ComplexMatrix g = ginibre(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const Complex d = r(k, k);
        const double mag = std::abs(d);
        if (mag > 0.0) {
            q.col(k) *= d / mag;
        }
    }
    return q;
}

DensityMatrix random_density_matrix(std::size_t dim, Rng &rng, std::size_t rank) {
    if (rank == 0) {
        std::uniform_int_distribution<std::size_t> pick(1, dim);
        rank = pick(rng);
    }
    ComplexMatrix g = ginibre(dim, rank, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (rho + rho.adjoint()) / 2.0;
    return DensityMatrix(std::move(rho));
}

}  // namespace isolab
