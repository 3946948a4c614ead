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

#ifndef ISOLAB_TOOLS_REPORT_HPP
#define ISOLAB_TOOLS_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "isolab/linalg.hpp"
#include "json.hpp"

namespace isolab::cli {

using Json = nlohmann::ordered_json;

struct Report {
    std::string command;
    Json inputs = Json::object();
    Json results = Json::object();
    std::optional<std::uint64_t> seed;
};

/// JSON text with two-space indentation. Floating-point values carry 17
/// significant digits; non-finite values become null. Arrays of scalars are
/// kept on one line.
std::string render(const Report &report);
std::string render_json(const Json &value);

/// Complex numbers are [re, im] pairs.
Json to_json(Complex z);
Json to_json(const ComplexVector &v);
Json to_json(const ComplexMatrix &m);
Json to_json(const RealVector &v);

ComplexVector vector_from_json(const Json &j);
ComplexMatrix matrix_from_json(const Json &j);

}  // namespace isolab::cli

#endif
