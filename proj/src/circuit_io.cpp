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

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "isolab/circuit.hpp"

namespace isolab {

namespace detail {
std::optional<CircuitParseError> validate_with_lines(const Circuit &c, std::span<const std::size_t> lines);
}

namespace {

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (std::isspace(static_cast<unsigned char>(line[i])) || line[i] == ',')) {
            ++i;
        }
        if (i >= line.size()) {
            break;
        }
        if (line[i] == ':') {
            out.emplace_back(":");
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ',' &&
               line[j] != ':') {
            ++j;
        }
        out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, std::string message) {
    throw CircuitError(CircuitParseError{line, std::move(message)});
}

std::size_t parse_index(const std::string &tok, std::size_t line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        fail(line, "invalid qubit index '" + tok + "'");
    }
    return v;
}

std::vector<std::size_t> parse_indices(const std::vector<std::string> &toks, std::size_t begin, std::size_t end,
                                       std::size_t line) {
    std::vector<std::size_t> out;
    for (std::size_t k = begin; k < end; ++k) {
        out.push_back(parse_index(toks[k], line));
    }
    return out;
}

double parse_real(std::string_view text) {
    std::string s(text);
    if (s.empty()) {
        throw std::invalid_argument("empty number");
    }
    char *end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        throw std::invalid_argument("invalid number '" + s + "'");
    }
    // strtod also accepts hex floats, inf and nan; the format is plain decimal.
    for (char ch : s) {
        if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == 'e' || ch == 'E' || ch == '+' ||
              ch == '-')) {
            throw std::invalid_argument("invalid number '" + s + "'");
        }
    }
    return v;
}

}  // namespace

Complex parse_complex(std::string_view text) {
    if (text.empty()) {
        throw std::invalid_argument("empty complex literal");
    }
    if (text.back() != 'i') {
        return {parse_real(text), 0.0};
    }
    std::string_view body = text.substr(0, text.size() - 1);
    // The split is the last sign that is neither leading nor part of an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string_view::npos) {
        if (body.empty() || body == "+" || body == "-") {
            return {0.0, body == "-" ? -1.0 : 1.0};
        }
        return {0.0, parse_real(body)};
    }
    std::string_view re = body.substr(0, split);
    std::string_view im = body.substr(split);
    double im_value = (im == "+") ? 1.0 : (im == "-") ? -1.0 : parse_real(im);
    return {parse_real(re), im_value};
}

std::string format_double(double x) {
    if (x == 0.0) {
        x = 0.0;  // drop the sign of negative zero
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_complex(Complex z) {
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    std::string out = format_double(z.real());
    if (im < 0.0) {
        out += "-" + format_double(-im);
    } else {
        out += "+" + format_double(im);
    }
    out += "i";
    return out;
}

Circuit parse_circuit(std::string_view source) {
    std::optional<std::size_t> qubits;
    std::vector<Gate> gates;
    std::vector<std::size_t> lines;
    std::size_t width = 0;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= source.size()) {
        std::size_t nl = source.find('\n', pos);
        std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? source.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        auto toks = tokenize(raw);
        if (toks.empty()) {
            continue;
        }
        const std::string &head = toks.front();
        if (!qubits) {
            if (head != "qubits") {
                fail(line_no, "missing qubits header");
            }
            if (toks.size() != 2) {
                fail(line_no, "qubits header takes one count");
            }
            qubits = parse_index(toks[1], line_no);
            if (*qubits == 0) {
                fail(line_no, "qubits must be at least 1");
            }
            width = *qubits;
            continue;
        }

        if (width == 0) {
            fail(lines.back(), "qubit count drops to zero before the final gate");
        }
        Gate gate;
        if (head == "qubits") {
            fail(line_no, "duplicate qubits header");
        } else if (head == "gate") {
            if (toks.size() < 2) {
                fail(line_no, "gate name missing");
            }
            const std::string &name = toks[1];
            std::size_t arity = 0;
            try {
                arity = builtin_gate_arity(name);
            } catch (const std::invalid_argument &) {
                fail(line_no, "unknown gate '" + name + "'");
            }
            if (toks.size() - 2 != arity) {
                fail(line_no, "gate " + name + " expects " + std::to_string(arity) + " target(s)");
            }
            gate = Gate::builtin(name, parse_indices(toks, 2, toks.size(), line_no));
        } else if (head == "umatrix") {
            auto colon = std::find(toks.begin(), toks.end(), ":");
            if (colon == toks.end()) {
                fail(line_no, "umatrix requires ':' before its entries");
            }
            const std::size_t split = static_cast<std::size_t>(colon - toks.begin());
            auto targets = parse_indices(toks, 1, split, line_no);
            if (targets.empty()) {
                fail(line_no, "umatrix has no targets");
            }
            if (targets.size() > 12) {
                fail(line_no, "umatrix has too many targets");
            }
            const std::size_t dim = std::size_t{1} << targets.size();
            if (toks.size() - split - 1 != dim * dim) {
                fail(line_no, "umatrix on " + std::to_string(targets.size()) + " qubit(s) expects " +
                                  std::to_string(dim * dim) + " entries");
            }
            ComplexMatrix u(dim, dim);
            for (std::size_t k = 0; k < dim * dim; ++k) {
                try {
                    u(k / dim, k % dim) = parse_complex(toks[split + 1 + k]);
                } catch (const std::invalid_argument &) {
                    fail(line_no, "invalid complex literal '" + toks[split + 1 + k] + "'");
                }
            }
            gate = Gate::umatrix(std::move(u), std::move(targets));
        } else if (head == "ancilla") {
            if (toks.size() != 1) {
                fail(line_no, "ancilla takes no arguments");
            }
            gate = Gate::ancilla();
        } else if (head == "traceout") {
            if (toks.size() != 2) {
                fail(line_no, "traceout takes exactly one target");
            }
            gate = Gate::trace_out(parse_index(toks[1], line_no));
        } else if (head == "channel") {
            if (toks.size() < 2) {
                fail(line_no, "channel name missing");
            }
            const std::string &name = toks[1];
            if (name == "depolarize") {
                auto targets = parse_indices(toks, 2, toks.size(), line_no);
                if (targets.empty() || targets.size() > 12) {
                    fail(line_no, "depolarize needs between 1 and 12 targets");
                }
                gate = Gate::depolarize(std::move(targets));
            } else if (name == "dephase") {
                if (toks.size() != 3) {
                    fail(line_no, "dephase takes exactly one target");
                }
                gate = Gate::dephase(parse_index(toks[2], line_no));
            } else if (name == "cdepolarize") {
                if (toks.size() < 5 || toks[3] != ":") {
                    fail(line_no, "expected 'channel cdepolarize <control> : <targets>'");
                }
                auto targets = parse_indices(toks, 4, toks.size(), line_no);
                if (targets.size() > 11) {
                    fail(line_no, "cdepolarize has too many targets");
                }
                gate = Gate::cdepolarize(parse_index(toks[2], line_no), std::move(targets));
            } else {
                fail(line_no, "unknown channel '" + name + "'");
            }
        } else {
            fail(line_no, "unknown instruction '" + head + "'");
        }

        std::vector<std::size_t> one_line = {line_no};
        Circuit single(width, {gate});
        if (auto err = detail::validate_with_lines(single, one_line)) {
            fail(err->line, err->message);
        }
        if (gate.kind == GateKind::AddAncilla) {
            ++width;
        } else if (gate.kind == GateKind::TraceOut) {
            --width;
        }
        gates.push_back(std::move(gate));
        lines.push_back(line_no);
    }
    if (!qubits) {
        fail(1, "missing qubits header");
    }
    Circuit circuit(*qubits, std::move(gates));
    if (auto err = detail::validate_with_lines(circuit, lines)) {
        fail(err->line, err->message);
    }
    return circuit;
}

std::string serialize_circuit(const Circuit &c) {
    std::ostringstream out;
    out << "qubits " << c.input_qubits() << "\n";
    auto write_targets = [&out](auto begin, auto end) {
        for (auto it = begin; it != end; ++it) {
            out << " " << *it;
        }
    };
    for (const auto &g : c.gates()) {
        switch (g.kind) {
            case GateKind::AddAncilla:
                out << "ancilla\n";
                break;
            case GateKind::TraceOut:
                out << "traceout " << g.targets.front() << "\n";
                break;
            case GateKind::Unitary:
                if (g.name == "umatrix") {
                    out << "umatrix";
                    write_targets(g.targets.begin(), g.targets.end());
                    out << " :";
                    const auto &u = g.operators.front();
                    for (Eigen::Index i = 0; i < u.rows(); ++i) {
                        for (Eigen::Index j = 0; j < u.cols(); ++j) {
                            out << " " << format_complex(u(i, j));
                        }
                    }
                    out << "\n";
                } else {
                    out << "gate " << g.name;
                    write_targets(g.targets.begin(), g.targets.end());
                    out << "\n";
                }
                break;
            case GateKind::Channel: {
                Gate canonical;
                if (g.name == "depolarize" && !g.targets.empty()) {
                    canonical = Gate::depolarize(g.targets);
                } else if (g.name == "dephase" && g.targets.size() == 1) {
                    canonical = Gate::dephase(g.targets.front());
                } else if (g.name == "cdepolarize" && g.targets.size() >= 2) {
                    canonical = Gate::cdepolarize(g.targets.front(), {g.targets.begin() + 1, g.targets.end()});
                }
                if (!(canonical == g)) {
                    throw std::invalid_argument("serialize_circuit: channel '" + g.name +
                                                "' has a custom Kraus set and no text form");
                }
                out << "channel " << g.name;
                if (g.name == "cdepolarize") {
                    out << " " << g.targets.front() << " :";
                    write_targets(g.targets.begin() + 1, g.targets.end());
                } else {
                    write_targets(g.targets.begin(), g.targets.end());
                }
                out << "\n";
                break;
            }
        }
    }
    return out.str();
}

}  // namespace isolab
