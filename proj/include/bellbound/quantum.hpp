#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr int kMaxTotalDimension = 1 << 10;

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Mat pauli_y() {
    Mat m(2, 2);
    m << Cplx(0, 0), Cplx(0, -1), Cplx(0, 1), Cplx(0, 0);
    return m;
}

inline Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

struct DensityMatrix {
    Mat rho;

    explicit DensityMatrix(Mat m) : rho(std::move(m)) {
        if (rho.rows() != rho.cols() || rho.rows() < 1) {
            throw InvalidInputError("density matrix must be square");
        }
        if (rho.rows() > kMaxTotalDimension) {
            throw CapacityError("density matrix dimension exceeds cap " +
                                std::to_string(kMaxTotalDimension));
        }
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw InvalidInputError("density matrix is not Hermitian");
        }
        if (std::abs(rho.trace().real() - 1.0) > 1e-10 ||
            std::abs(rho.trace().imag()) > 1e-10) {
            throw InvalidInputError("density matrix trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()),
                                              Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9) {
            throw InvalidInputError("density matrix has a negative eigenvalue");
        }
    }

    int dim() const { return static_cast<int>(rho.rows()); }
};

// Positive operators per (party, setting, outcome); each setting's operators
// sum to the identity.
struct MeasurementAssemblage {
    std::vector<std::vector<std::vector<Mat>>> ops;

    void validate() const {
        if (ops.empty()) throw InvalidInputError("assemblage has no parties");
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (ops[i].empty()) {
                throw InvalidInputError("party " + std::to_string(i) +
                                        " has no settings");
            }
            Eigen::Index d = ops[i][0][0].rows();
            for (const auto& setting : ops[i]) {
                if (setting.size() < 2) {
                    throw InvalidInputError("each setting needs at least 2 outcomes");
                }
                Mat sum = Mat::Zero(d, d);
                for (const Mat& op : setting) {
                    if (op.rows() != d || op.cols() != d) {
                        throw InvalidInputError("operator dimensions differ within a party");
                    }
                    if ((op - op.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
                        throw InvalidInputError("measurement operator is not Hermitian");
                    }
                    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op + op.adjoint()),
                                                          Eigen::EigenvaluesOnly);
                    if (es.eigenvalues().minCoeff() < -1e-9) {
                        throw InvalidInputError("measurement operator is not positive");
                    }
                    sum += op;
                }
                if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-9) {
                    throw InvalidInputError(
                        "setting operators do not sum to the identity");
                }
            }
        }
    }

    int parties() const { return static_cast<int>(ops.size()); }
    int dim(int party) const { return static_cast<int>(ops[party][0][0].rows()); }

    Scenario scenario() const {
        std::vector<int> settings(ops.size());
        std::vector<std::vector<int>> outcomes(ops.size());
        for (std::size_t i = 0; i < ops.size(); ++i) {
            settings[i] = static_cast<int>(ops[i].size());
            for (const auto& setting : ops[i]) {
                outcomes[i].push_back(static_cast<int>(setting.size()));
            }
        }
        return Scenario(std::move(settings), std::move(outcomes));
    }
};

// p(a|m) = Tr(rho . tensor_i Pi_{a_i|m_i}).
inline Behavior behavior_from_quantum(const DensityMatrix& rho,
                                      const MeasurementAssemblage& assemblage,
                                      const Scenario& scenario) {
    assemblage.validate();
    if (assemblage.scenario() != scenario) {
        throw InvalidInputError("assemblage shape does not match the scenario");
    }
    long total = 1;
    for (int i = 0; i < assemblage.parties(); ++i) total *= assemblage.dim(i);
    if (total != rho.dim()) {
        throw InvalidInputError("state dimension " + std::to_string(rho.dim()) +
                                " does not match assemblage product " +
                                std::to_string(total));
    }

    std::vector<double> table(scenario.flat_dimension(), 0.0);
    for (std::size_t m = 0; m < scenario.joint_setting_count(); ++m) {
        auto mt = scenario.setting_tuple(m);
        for (std::size_t o = 0; o < scenario.outcome_count(m); ++o) {
            auto at = scenario.outcome_tuple(mt, o);
            Mat joint = assemblage.ops[0][mt[0]][at[0]];
            for (int i = 1; i < scenario.parties(); ++i) {
                joint = kron(joint, assemblage.ops[i][mt[i]][at[i]]);
            }
            table[scenario.flat_offset(m) + o] = (rho.rho * joint).trace().real();
        }
    }
    Behavior b(scenario, std::move(table));
    require_valid(b);
    auto ns = is_no_signaling(b, 1e-8);
    if (!ns.ok) {
        throw std::logic_error("quantum behavior failed the no-signaling check: " +
                               ns.detail);
    }
    return b;
}

// Closed-form behavior of the n-qubit maximally entangled state under the
// two-setting dichotomic assemblage below: uniform at even-parity settings,
// (1 + (-1)^(sum a + Gamma(m))) / 2^n at odd-parity settings.
inline Behavior ghz_mabk_behavior(int n) {
    if (n < 3 || n % 2 == 0 || n > 9) {
        throw InvalidInputError("closed form restricted to odd n in [3, 9]");
    }
    Scenario s = Scenario::homogeneous(n, 2, 2);
    std::vector<double> table(s.flat_dimension(), 0.0);
    double cell = std::ldexp(1.0, -n);
    for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
        auto mt = s.setting_tuple(m);
        int ones = 0;
        for (int v : mt) ones += v;
        std::size_t off = s.flat_offset(m);
        if (ones % 2 == 0) {
            for (std::size_t o = 0; o < s.outcome_count(m); ++o) {
                table[off + o] = cell;
            }
            continue;
        }
        int gamma = (ones * (ones - 1) / 2) % 2;
        for (std::size_t o = 0; o < s.outcome_count(m); ++o) {
            auto at = s.outcome_tuple(mt, o);
            int asum = 0;
            for (int v : at) asum += v;
            table[off + o] = (asum + gamma) % 2 == 0 ? 2.0 * cell : 0.0;
        }
    }
    return Behavior(s, std::move(table));
}

// Graph state of the complete graph on n qubits: amplitudes
// (-1)^(Gamma(x)) / sqrt(2^n) over computational basis states x.
inline DensityMatrix complete_graph_state(int n) {
    if (n < 1 || n > 10) throw InvalidInputError("qubit count out of range");
    Eigen::Index d = Eigen::Index(1) << n;
    Eigen::VectorXcd psi(d);
    double amp = std::pow(2.0, -0.5 * n);
    for (Eigen::Index x = 0; x < d; ++x) {
        int ones = __builtin_popcountll(static_cast<unsigned long long>(x));
        int gamma = (ones * (ones - 1) / 2) % 2;
        psi(x) = gamma ? -amp : amp;
    }
    return DensityMatrix(psi * psi.adjoint());
}

// Projectors (I + (-1)^a O) / 2 of a dichotomic observable O.
inline std::vector<Mat> dichotomic_projectors(const Mat& observable) {
    Mat id = Mat::Identity(observable.rows(), observable.cols());
    return {0.5 * (id + observable), 0.5 * (id - observable)};
}

// Setting 0 measures Z, setting 1 measures X on every party; this is the
// assemblage whose statistics on the complete-graph state take the closed
// form above.
inline MeasurementAssemblage ghz_mabk_assemblage(int n) {
    MeasurementAssemblage out;
    out.ops.resize(n);
    for (int i = 0; i < n; ++i) {
        out.ops[i] = {dichotomic_projectors(pauli_z()),
                      dichotomic_projectors(pauli_x())};
    }
    return out;
}

inline DensityMatrix bell_phi_plus() {
    Eigen::VectorXcd psi(4);
    psi << 1.0 / std::numbers::sqrt2, 0, 0, 1.0 / std::numbers::sqrt2;
    return DensityMatrix(psi * psi.adjoint());
}

// visibility * phi_plus + (1 - visibility) * I/4.
inline DensityMatrix werner_state(double visibility) {
    if (visibility < 0.0 || visibility > 1.0) {
        throw InvalidInputError("visibility must lie in [0, 1]");
    }
    Mat phi = bell_phi_plus().rho;
    return DensityMatrix(visibility * phi +
                         (1.0 - visibility) * 0.25 * Mat::Identity(4, 4));
}

// A_0 = Z, A_1 = X, B_0 = (Z+X)/sqrt2, B_1 = (Z-X)/sqrt2: the assemblage
// that maximally violates the two-setting correlation inequality on phi_plus.
inline MeasurementAssemblage chsh_optimal_assemblage() {
    MeasurementAssemblage out;
    out.ops.resize(2);
    Mat z = pauli_z(), x = pauli_x();
    out.ops[0] = {dichotomic_projectors(z), dichotomic_projectors(x)};
    out.ops[1] = {dichotomic_projectors((z + x) / std::numbers::sqrt2),
                  dichotomic_projectors((z - x) / std::numbers::sqrt2)};
    return out;
}

namespace detail {

inline Mat hermitian_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() *
           es.eigenvectors().adjoint();
}

}  // namespace detail

// Spin-flipped overlap spectrum: C = max(0, l1 - l2 - l3 - l4) with l_i the
// decreasing square roots of the eigenvalues of sqrt(rho) rho~ sqrt(rho).
inline double wootters_concurrence(const DensityMatrix& state) {
    if (state.dim() != 4) {
        throw InvalidInputError("concurrence formula needs a two-qubit state");
    }
    Mat yy = kron(pauli_y(), pauli_y());
    Mat tilde = yy * state.rho.conjugate() * yy;
    Mat root = detail::hermitian_sqrt(state.rho);
    Mat inner = root * tilde * root;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.adjoint()),
                                          Eigen::EigenvaluesOnly);
    Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    std::sort(lambda.data(), lambda.data() + lambda.size(),
              std::greater<double>());
    return std::max(0.0, lambda(0) - lambda(1) - lambda(2) - lambda(3));
}

// Uhlmann fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma)), in [0, 1].
inline double state_fidelity(const DensityMatrix& rho,
                             const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw InvalidInputError("states differ in dimension");
    }
    Mat root = detail::hermitian_sqrt(sigma.rho);
    Mat inner = root * rho.rho * root;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (inner + inner.adjoint()),
                                          Eigen::EigenvaluesOnly);
    double f = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(f, 0.0, 1.0);
}

// (1/2) Tr |rho - sigma|, in [0, 1].
inline double state_trace_distance(const DensityMatrix& rho,
                                   const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw InvalidInputError("states differ in dimension");
    }
    Mat diff = rho.rho - sigma.rho;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (diff + diff.adjoint()),
                                          Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace bellbound
