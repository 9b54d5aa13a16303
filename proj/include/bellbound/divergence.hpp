#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

enum class DivergenceKind { tv, kl_bits, infidelity };

inline const char* divergence_name(DivergenceKind k) {
    switch (k) {
        case DivergenceKind::tv: return "tv";
        case DivergenceKind::kl_bits: return "kl_bits";
        case DivergenceKind::infidelity: return "infidelity";
    }
    return "?";
}

namespace detail {

inline void require_distribution(std::span<const double> p, const char* label) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) {
            throw InvalidInputError(std::string(label) +
                                    " has a negative entry: " + std::to_string(v));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kNormalizationTolerance) {
        throw InvalidInputError(std::string(label) +
                                " does not sum to 1: " + std::to_string(sum));
    }
}

}  // namespace detail

// Per-distribution divergences. KL is oriented D(p || q) with p the tested
// distribution, in bits; p_a > 0 with q_a = 0 yields +infinity, 0 log(0/q)
// counts as 0. Infidelity is sqrt(1 - F^2) with the Bhattacharyya fidelity
// F = sum sqrt(p q).
inline double divergence(DivergenceKind kind, std::span<const double> p,
                         std::span<const double> q) {
    if (p.size() != q.size()) {
        throw InvalidInputError("distributions differ in length: " +
                                std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()));
    }
    detail::require_distribution(p, "first distribution");
    detail::require_distribution(q, "second distribution");
    switch (kind) {
        case DivergenceKind::tv: {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
            return 0.5 * s;
        }
        case DivergenceKind::kl_bits: {
            double s = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (p[i] <= 0.0) continue;
                if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
                s += p[i] * std::log2(p[i] / q[i]);
            }
            return std::max(0.0, s);
        }
        case DivergenceKind::infidelity: {
            double f = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) f += std::sqrt(p[i] * q[i]);
            f = std::min(f, 1.0);
            return std::sqrt(std::max(0.0, 1.0 - f * f));
        }
    }
    throw InvalidInputError("unknown divergence kind");
}

// Setting-averaged behavior distance: the arithmetic mean over all joint
// settings of the per-setting divergence.
inline double aggregate_distance(DivergenceKind kind, const Behavior& p,
                                 const Behavior& q) {
    if (p.scenario() != q.scenario()) {
        throw InvalidInputError("behaviors live on different scenarios");
    }
    std::size_t tau = p.scenario().joint_setting_count();
    double total = 0.0;
    for (std::size_t m = 0; m < tau; ++m) {
        total += divergence(kind, p.setting_block(m), q.setting_block(m));
    }
    return total / static_cast<double>(tau);
}

}  // namespace bellbound
