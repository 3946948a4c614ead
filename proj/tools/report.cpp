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

#include "report.hpp"

#include <cmath>
#include <sstream>

#include "isolab/circuit.hpp"

namespace isolab::cli {

namespace {

bool is_scalar(const Json &j) {
    return !j.is_array() && !j.is_object();
}

void write_scalar(std::ostream &out, const Json &j) {
    if (j.is_number_float()) {
        const double x = j.get<double>();
        if (std::isfinite(x)) {
            out << format_double(x);
        } else {
            out << "null";
        }
    } else {
        out << j.dump();
    }
}

void write(std::ostream &out, const Json &j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out << ",\n";
            }
            first = false;
            out << pad << Json(it.key()).dump() << ": ";
            write(out, it.value(), indent + 2);
        }
        out << "\n" << close << "}";
    } else if (j.is_array()) {
        if (j.empty()) {
            out << "[]";
            return;
        }
        bool flat = true;
        for (const auto &e : j) {
            flat = flat && is_scalar(e);
        }
        if (flat) {
            out << "[";
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) {
                    out << ", ";
                }
                write_scalar(out, j[k]);
            }
            out << "]";
            return;
        }
        out << "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
            if (k) {
                out << ",\n";
            }
            out << pad;
            write(out, j[k], indent + 2);
        }
        out << "\n" << close << "]";
    } else {
        write_scalar(out, j);
    }
}

}  // namespace

std::string render_json(const Json &value) {
    std::ostringstream out;
    write(out, value, 0);
    out << "\n";
    return out.str();
}

std::string render(const Report &report) {
    Json j = Json::object();
    j["command"] = report.command;
    j["version"] = ISOLAB_VERSION;
    j["inputs"] = report.inputs;
    if (report.seed) {
        j["seed"] = *report.seed;
    }
    j["results"] = report.results;
    return render_json(j);
}

Json to_json(Complex z) {
    return Json::array({z.real(), z.imag()});
}

Json to_json(const ComplexVector &v) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(to_json(v[k]));
    }
    return out;
}

Json to_json(const ComplexMatrix &m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(to_json(m(i, j)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const RealVector &v) {
    Json out = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v[k]);
    }
    return out;
}

namespace {

Complex complex_from_json(const Json &j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("complex values must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ComplexVector vector_from_json(const Json &j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("expected a non-empty array of complex values");
    }
    ComplexVector v(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        v[static_cast<Eigen::Index>(k)] = complex_from_json(j[k]);
    }
    return v;
}

ComplexMatrix matrix_from_json(const Json &j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        throw std::invalid_argument("expected a matrix as an array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw std::invalid_argument("matrix rows have different lengths");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
        }
    }
    return m;
}

}  // namespace isolab::cli
