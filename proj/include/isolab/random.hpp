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

#ifndef ISOLAB_RANDOM_HPP
#define ISOLAB_RANDOM_HPP

#include <cstdint>
#include <random>

#include "isolab/linalg.hpp"

namespace isolab {

using Rng = std::mt19937_64;

/// Independent generator for sub-stream `stream` of `seed`. Stream k of a
/// given seed never depends on how many other streams are drawn.
Rng stream_rng(std::uint64_t seed, std::uint64_t stream);

/// Standard complex Gaussian matrix.
ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng &rng);

PureState haar_pure_state(std::size_t dim, Rng &rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix haar_unitary(std::size_t dim, Rng &rng);

/// G G* / tr(G G*) for a dim x rank Ginibre G. rank = 0 picks a rank uniformly
/// in [1, dim].
DensityMatrix random_density_matrix(std::size_t dim, Rng &rng, std::size_t rank = 0);

}  // namespace isolab

#endif
