#pragma once

// Seeded random generators shared by the test binaries.  Randomness is built
// from std::mt19937_64 plus explicit bit-to-double conversions only, so every
// draw is bit-stable across standard libraries.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "bellbound/divergence.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

namespace test_support {

using bellbound::Mat;

inline double uniform01(std::mt19937_64& rng) {
    return bellbound::detail::uniform_unit(rng);
}

// Box-Muller with explicit uniforms; u is pushed away from 0 so the log is
// finite.
inline double gaussian(std::mt19937_64& rng) {
    const double u = std::max(uniform01(rng), 0x1.0p-53);
    const double v = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
}

inline Mat ginibre(std::mt19937_64& rng, int d) {
    Mat g(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            g(r, c) = bellbound::Cplx(gaussian(rng), gaussian(rng));
        }
    }
    return g;
}

inline bellbound::DensityMatrix random_density(std::mt19937_64& rng, int d) {
    const Mat g = ginibre(rng, d);
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());
    return bellbound::DensityMatrix(rho);
}

// Random POVM: positive operators A_i = G_i G_i^dagger whitened by the
// inverse square root of their sum.
inline std::vector<Mat> random_povm(std::mt19937_64& rng, int d, int outcomes) {
    std::vector<Mat> raw;
    Mat sum = Mat::Zero(d, d);
    for (int i = 0; i < outcomes; ++i) {
        const Mat g = ginibre(rng, d);
        raw.push_back(g * g.adjoint());
        sum += raw.back();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sum + sum.adjoint()));
    Mat inv_sqrt = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        inv_sqrt += 1.0 / std::sqrt(es.eigenvalues()(i)) *
                    es.eigenvectors().col(i) *
                    es.eigenvectors().col(i).adjoint();
    }
    std::vector<Mat> povm;
    for (const Mat& a : raw) {
        Mat e = inv_sqrt * a * inv_sqrt;
        povm.push_back(0.5 * (e + e.adjoint()));
    }
    return povm;
}

// Flat-Dirichlet random distribution.
inline std::vector<double> random_distribution(std::mt19937_64& rng, int k) {
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) {
        v = -std::log1p(-uniform01(rng));
        total += v;
    }
    for (double& v : p) v /= total;
    return p;
}

// Column-stochastic map: out[i] = sum_j t[i][j] in[j], each column a
// distribution.
inline std::vector<std::vector<double>> random_stochastic_map(
    std::mt19937_64& rng, int rows, int cols) {
    std::vector<std::vector<double>> t(rows, std::vector<double>(cols, 0.0));
    for (int j = 0; j < cols; ++j) {
        const std::vector<double> col = random_distribution(rng, rows);
        for (int i = 0; i < rows; ++i) t[i][j] = col[i];
    }
    return t;
}

inline std::vector<double> apply_stochastic_map(
    const std::vector<std::vector<double>>& t, const std::vector<double>& p) {
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) out[i] += t[i][j] * p[j];
    }
    return out;
}

}  // namespace test_support
