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

#include "isolab/channel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "isolab/random.hpp"

namespace isolab {

namespace {

double max_abs_entry(const ComplexMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

ChannelHandle::ChannelHandle(Circuit circuit) : circuit_(std::move(circuit)) {
    if (auto err = validate_circuit(circuit_)) {
        throw CircuitError(*err);
    }
}

DensityMatrix ChannelHandle::apply(const DensityMatrix &rho) const {
    return apply_circuit(circuit_, rho);
}

ComplexMatrix ChannelHandle::apply_raw(const ComplexMatrix &rho, std::size_t trailing_qubits) const {
    return apply_circuit_embedded(circuit_, rho, 0, trailing_qubits);
}

void ChannelHandle::check_extended_cap() const {
    const std::size_t cap = max_total_dim();
    const std::size_t bits = circuit_.peak_qubits() + input_qubits();
    if (bits >= 63 || (std::size_t{1} << bits) > cap) {
        throw DimensionCapError("extended channel needs dimension 2^" + std::to_string(bits) +
                                ", above the cap of " + std::to_string(cap));
    }
}

ComplexMatrix KrausSet::apply(const ComplexMatrix &x) const {
    ComplexMatrix out = ComplexMatrix::Zero(dim_out, dim_out);
    for (const auto &a : operators) {
        out += a * x * a.adjoint();
    }
    return out;
}

double KrausSet::completeness_error() const {
    ComplexMatrix sum = ComplexMatrix::Zero(dim_in, dim_in);
    for (const auto &a : operators) {
        sum += a.adjoint() * a;
    }
    return max_abs_entry(sum - ComplexMatrix::Identity(dim_in, dim_in));
}

ChoiMatrix choi_of(const ChannelHandle &ch) {
    ch.check_extended_cap();
    const std::size_t n = ch.input_qubits();
    const ComplexMatrix phi = PureState::maximally_entangled(ch.dim_in()).projector();
    return ChoiMatrix{ch.dim_in(), ch.dim_out(), DensityMatrix(ch.apply_raw(phi, n))};
}

RealVector choi_eigenvalues(const ChoiMatrix &c) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(c.matrix.matrix(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().reverse();
}

std::size_t choi_rank(const ChoiMatrix &c, double rank_tol) {
    const RealVector values = choi_eigenvalues(c);
    return static_cast<std::size_t>((values.array() > rank_tol).count());
}

KrausSet kraus_from_choi(const ChoiMatrix &c, double rank_tol) {
    const HermitianEigen eig = hermitian_eigen(c.matrix.matrix());
    KrausSet out{c.dim_in, c.dim_out, {}};
    const double scale = static_cast<double>(c.dim_in);
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
        const double lambda = eig.values[k];
        if (!(lambda > rank_tol)) {
            break;
        }
        // The eigenvector is indexed (out, in) with the input index fastest.
        ComplexMatrix a(c.dim_out, c.dim_in);
        for (std::size_t o = 0; o < c.dim_out; ++o) {
            for (std::size_t i = 0; i < c.dim_in; ++i) {
                a(o, i) = eig.vectors(o * c.dim_in + i, k);
            }
        }
        out.operators.push_back(std::sqrt(scale * lambda) * a);
    }
    return out;
}

double kraus_reconstruction_residual(const ChannelHandle &ch, const KrausSet &k) {
    double worst = 0.0;
    const std::size_t d = ch.dim_in();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            ComplexMatrix unit = ComplexMatrix::Zero(d, d);
            unit(i, j) = 1.0;
            worst = std::max(worst, max_abs_entry(k.apply(unit) - ch.apply_raw(unit)));
        }
    }
    return worst;
}

ExactIsometryResult exact_isometry_test(const ChannelHandle &ch, double rank_tol) {
    const ChoiMatrix choi = choi_of(ch);
    ExactIsometryResult out;
    out.choi_rank = choi_rank(choi, rank_tol);
    out.isometry_residual = std::numeric_limits<double>::quiet_NaN();
    if (out.choi_rank == 1) {
        KrausSet kraus = kraus_from_choi(choi, rank_tol);
        const ComplexMatrix &a = kraus.operators.front();
        out.isometry_residual = max_abs_entry(a.adjoint() * a - ComplexMatrix::Identity(ch.dim_in(), ch.dim_in()));
        if (out.isometry_residual <= tol::kStructural) {
            out.exact_isometry = true;
            out.isometry_operator = a;
        }
    }
    return out;
}

DensityMatrix apply_extended(const ChannelHandle &ch, const PureState &psi) {
    if (psi.dim() != ch.dim_in() * ch.dim_in()) {
        throw DimensionError("apply_extended: state dimension " + std::to_string(psi.dim()) + " is not dim_in^2 = " +
                             std::to_string(ch.dim_in() * ch.dim_in()));
    }
    ch.check_extended_cap();
    return DensityMatrix(ch.apply_raw(psi.projector(), ch.input_qubits()));
}

ExtendedObjective::ExtendedObjective(const KrausSet &kraus)
    : dim_in_(kraus.dim_in), dim_out_(kraus.dim_out), rank_(kraus.operators.size()) {
    stacked_.resize(rank_ * dim_out_, dim_in_);
    for (std::size_t k = 0; k < rank_; ++k) {
        stacked_.middleRows(k * dim_out_, dim_out_) = kraus.operators[k];
        conj_ops_.push_back(kraus.operators[k].conjugate());
    }
    stacked_t_ = stacked_.transpose();
}

// Column k holds (A_k (x) 1_R) psi, indexed (out, ref) with ref fastest.
ComplexMatrix ExtendedObjective::outputs(const ComplexVector &psi) const {
    Eigen::Map<const ComplexMatrix> psi_t(psi.data(), dim_in_, dim_in_);
    ComplexMatrix w_all = psi_t * stacked_t_;
    return Eigen::Map<ComplexMatrix>(w_all.data(), dim_out_ * dim_in_, rank_);
}

double ExtendedObjective::value(const ComplexVector &psi) const {
    const ComplexMatrix w = outputs(psi);
    if (static_cast<std::size_t>(w.cols()) <= static_cast<std::size_t>(w.rows())) {
        ComplexMatrix gram = w.adjoint() * w;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(gram, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().maxCoeff();
    }
    ComplexMatrix out = w * w.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(out, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

double ExtendedObjective::value_and_gradient(const ComplexVector &psi, ComplexVector &gradient) const {
    const ComplexMatrix w = outputs(psi);
    double lambda = 0.0;
    ComplexVector v;
    ComplexVector coeff;  // <v|w_k>
    if (static_cast<std::size_t>(w.cols()) <= static_cast<std::size_t>(w.rows())) {
        auto [top, u] = top_eigenpair(ComplexMatrix(w.adjoint() * w));
        lambda = top;
        if (lambda <= 0.0) {
            gradient = ComplexVector::Zero(psi.size());
            return 0.0;
        }
        v = w * u / std::sqrt(lambda);
        coeff = std::sqrt(lambda) * u;
    } else {
        auto [top, vec] = top_eigenpair(ComplexMatrix(w * w.adjoint()));
        lambda = top;
        v = vec;
        coeff = w.adjoint() * v;
    }
    ComplexMatrix m = ComplexMatrix::Zero(dim_out_, dim_in_);
    for (std::size_t k = 0; k < rank_; ++k) {
        m += coeff[k] * conj_ops_[k];
    }
    Eigen::Map<const ComplexMatrix> v_t(v.data(), dim_in_, dim_out_);
    ComplexMatrix g = 2.0 * v_t * m;
    gradient = Eigen::Map<ComplexVector>(g.data(), g.size());
    return lambda;
}

double ExtendedObjective::schatten(const ComplexVector &psi, double p, ComplexVector *gradient) const {
    const ComplexMatrix w = outputs(psi);
    const bool gram = w.cols() <= w.rows();
    const ComplexMatrix m = gram ? ComplexMatrix(w.adjoint() * w) : ComplexMatrix(w * w.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
    const RealVector mu = solver.eigenvalues().cwiseMax(0.0);
    const double top = mu.maxCoeff();
    if (top <= 0.0) {
        if (gradient) {
            *gradient = ComplexVector::Zero(psi.size());
        }
        return 0.0;
    }
    const Eigen::ArrayXd scaled = mu.array() / top;
    const double s = scaled.pow(p).sum();
    const double value = top * std::pow(s, 1.0 / p);
    if (gradient) {
        const RealVector h = scaled.pow(p - 1.0).matrix() * std::pow(s, 1.0 / p - 1.0);
        const ComplexMatrix &vecs = solver.eigenvectors();
        const ComplexMatrix hm = vecs * h.cast<Complex>().asDiagonal() * vecs.adjoint();
        const ComplexMatrix u = gram ? ComplexMatrix(w * hm) : ComplexMatrix(hm * w);
        ComplexMatrix g = ComplexMatrix::Zero(dim_in_, dim_in_);
        for (std::size_t k = 0; k < rank_; ++k) {
            Eigen::Map<const ComplexMatrix> u_t(u.col(k).data(), dim_in_, dim_out_);
            g += u_t * conj_ops_[k];
        }
        g *= 2.0;
        *gradient = Eigen::Map<ComplexVector>(g.data(), g.size());
    }
    return value;
}

namespace {

constexpr double kSchattenSchedule[] = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

struct LocalResult {
    double value;
    ComplexVector state;
};

// Armijo projected gradient descent on the sphere. `eval(psi, grad)` returns
// the objective and fills grad when it is non-null.
template <typename Eval>
ComplexVector descend(const Eval &eval, ComplexVector psi, const SearchOptions &options) {
    ComplexVector grad;
    double f = eval(psi, &grad);
    double step = 0.5;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const double radial = psi.dot(grad).real();
        ComplexVector tangent = grad - radial * psi;
        const double slope = tangent.squaredNorm();
        if (slope < 1e-24) {
            break;
        }
        step = std::min(1.0, 2.0 * step);
        bool accepted = false;
        ComplexVector candidate;
        double f_new = f;
        while (step > 1e-14) {
            candidate = psi - step * tangent;
            candidate.normalize();
            f_new = eval(candidate, nullptr);
            if (f_new <= f - 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
        const double improvement = f - f_new;
        psi = std::move(candidate);
        f = eval(psi, &grad);
        if (improvement < options.improvement_tolerance) {
            break;
        }
    }
    return psi;
}

LocalResult local_search(const ExtendedObjective &objective, ComplexVector psi, const SearchOptions &options) {
    LocalResult best{objective.value(psi), psi};
    auto keep = [&](const ComplexVector &candidate) {
        const double v = objective.value(candidate);
        if (v < best.value) {
            best = {v, candidate};
        }
    };
    for (double p : kSchattenSchedule) {
        psi = descend(
            [&](const ComplexVector &x, ComplexVector *g) { return objective.schatten(x, p, g); }, std::move(psi),
            options);
        keep(psi);
    }
    psi = descend(
        [&](const ComplexVector &x, ComplexVector *g) {
            if (g) {
                return objective.value_and_gradient(x, *g);
            }
            return objective.value(x);
        },
        best.state, options);
    keep(psi);
    return best;
}

}  // namespace

MinOutputResult min_output_opnorm(const ChannelHandle &ch, const SearchOptions &options) {
    if (options.restarts == 0) {
        throw std::invalid_argument("min_output_opnorm: at least one restart is required");
    }
    ch.check_extended_cap();
    const KrausSet kraus = kraus_from_choi(choi_of(ch));
    const ExtendedObjective objective(kraus);
    const std::size_t dim = ch.dim_in() * ch.dim_in();

    std::vector<LocalResult> results(options.restarts);
    auto run = [&](std::size_t k) {
        Rng rng = stream_rng(options.seed, k);
        ComplexVector start = haar_pure_state(dim, rng).amplitudes();
        results[k] = local_search(objective, std::move(start), options);
    };

    std::size_t threads = options.threads;
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, options.restarts);
    if (threads <= 1) {
        for (std::size_t k = 0; k < options.restarts; ++k) {
            run(k);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < options.restarts; k = next++) {
                    run(k);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }

    MinOutputResult out;
    std::size_t best = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        out.restart_values.push_back(results[k].value);
        if (results[k].value < results[best].value) {
            best = k;
        }
    }
    out.value = results[best].value;
    out.minimizer = PureState::normalized(results[best].state);
    return out;
}

MinOutputResult min_output_opnorm(const ChannelHandle &ch, std::size_t restarts, std::uint64_t seed) {
    SearchOptions options;
    options.restarts = restarts;
    options.seed = seed;
    return min_output_opnorm(ch, options);
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::YesInstance:
            return "yes-instance";
        case Classification::NoInstance:
            return "no-instance";
        case Classification::Indeterminate:
            return "indeterminate";
    }
    return "indeterminate";
}

ClassificationResult classify_nonisometry(const ChannelHandle &ch, double epsilon, const SearchOptions &options,
                                          std::optional<double> certified_lower_bound) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("epsilon must lie in [0, 1/2)");
    }
    ClassificationResult out;
    out.exact_isometry = exact_isometry_test(ch).exact_isometry;
    if (out.exact_isometry) {
        certified_lower_bound = 1.0;
    }
    out.certified_lower_bound = certified_lower_bound;
    out.min_found = min_output_opnorm(ch, options).value;
    if (out.min_found <= epsilon) {
        out.classification = Classification::YesInstance;
    } else if (certified_lower_bound && *certified_lower_bound >= 1.0 - epsilon) {
        out.classification = Classification::NoInstance;
    } else {
        out.classification = Classification::Indeterminate;
    }
    return out;
}

IsometryReport analyze_isometry(const ChannelHandle &ch, double epsilon, const SearchOptions &options) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) {
        throw std::invalid_argument("epsilon must lie in [0, 1/2)");
    }
    IsometryReport report;
    report.epsilon = epsilon;
    const ExactIsometryResult exact = exact_isometry_test(ch);
    report.choi_rank = exact.choi_rank;
    report.exact_isometry = exact.exact_isometry;
    report.isometry_operator = exact.isometry_operator;
    const MinOutputResult search = min_output_opnorm(ch, options);
    report.min_output_opnorm = search.value;
    report.minimizing_state = search.minimizer;
    if (search.value <= epsilon) {
        report.classification = Classification::YesInstance;
    } else if (exact.exact_isometry) {
        report.classification = Classification::NoInstance;
    } else {
        report.classification = Classification::Indeterminate;
    }
    return report;
}

ApproxIsometry extract_approx_isometry(const ChannelHandle &ch, std::uint64_t seed, std::size_t random_probes) {
    ch.check_extended_cap();
    const std::size_t d = ch.dim_in();
    const std::size_t k_dim = ch.dim_out();
    const KrausSet kraus = kraus_from_choi(choi_of(ch));

    // Phi(|a><b|) via the Kraus operators.
    auto image = [&](std::size_t a, std::size_t b) {
        ComplexMatrix out = ComplexMatrix::Zero(k_dim, k_dim);
        for (const auto &op : kraus.operators) {
            out += op.col(a) * op.col(b).adjoint();
        }
        return out;
    };

    ApproxIsometry out;
    double min_opnorm = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
        auto [top, vec] = top_eigenpair(image(i, i));
        min_opnorm = std::min(min_opnorm, top);
        out.column_states.push_back(PureState::normalized(vec));
    }
    // (|ii> + |jj>)/sqrt 2 on H (x) R: the output is the 2x2 block matrix of
    // Phi(|a><b|)/2 for a, b in {i, j}.
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            ComplexMatrix block(2 * k_dim, 2 * k_dim);
            block.topLeftCorner(k_dim, k_dim) = image(i, i);
            block.topRightCorner(k_dim, k_dim) = image(i, j);
            block.bottomLeftCorner(k_dim, k_dim) = image(j, i);
            block.bottomRightCorner(k_dim, k_dim) = image(j, j);
            block /= 2.0;
            min_opnorm = std::min(min_opnorm, top_eigenpair(block).first);
        }
    }
    if (min_opnorm < 0.5) {
        throw NotNearIsometryError("not near an isometry: a probe output has opnorm " + format_double(min_opnorm) +
                                   " < 0.5");
    }
    out.min_probe_opnorm = min_opnorm;
    out.eps_measured = std::max(0.0, 1.0 - min_opnorm);

    out.phases.assign(d, Complex(1.0, 0.0));
    const ComplexVector &psi0 = out.column_states.front().amplitudes();
    for (std::size_t i = 1; i < d; ++i) {
        Eigen::JacobiSVD<ComplexMatrix> svd(image(0, i), Eigen::ComputeFullU | Eigen::ComputeFullV);
        const double s = svd.singularValues()[0];
        const ComplexVector u = svd.matrixU().col(0);
        const ComplexVector w = svd.matrixV().col(0);
        // Overlap of c_0 c_i* |psi_0><psi_i| with s |u><w| is c_i <psi_0|u> s <w|psi_i>.
        const Complex z = psi0.dot(u) * s * w.dot(out.column_states[i].amplitudes());
        if (std::abs(z) > 1e-12) {
            out.phases[i] = std::conj(z) / std::abs(z);
        }
    }
    out.operator_a.resize(k_dim, d);
    for (std::size_t i = 0; i < d; ++i) {
        out.operator_a.col(i) = out.phases[i] * out.column_states[i].amplitudes();
    }

    std::vector<PureState> probes;
    for (std::size_t i = 0; i < d; ++i) {
        probes.push_back(PureState::basis(d, i));
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            ComplexVector v = ComplexVector::Zero(d);
            v[i] = v[j] = 1.0 / std::sqrt(2.0);
            probes.emplace_back(v);
        }
    }
    Rng rng = stream_rng(seed, 0);
    for (std::size_t k = 0; k < random_probes; ++k) {
        probes.push_back(haar_pure_state(d, rng));
    }
    for (const auto &p : probes) {
        const ComplexMatrix rho = p.projector();
        const ComplexMatrix diff = ch.apply_raw(rho) - out.operator_a * rho * out.operator_a.adjoint();
        out.max_probe_distance = std::max(out.max_probe_distance, trace_norm((diff + diff.adjoint()) / 2.0));
    }
    out.probe_count = probes.size();
    return out;
}

}  // namespace isolab
