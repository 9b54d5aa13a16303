#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bellbound/divergence.hpp"
#include "bellbound/errors.hpp"
#include "bellbound/frank_wolfe.hpp"
#include "bellbound/scenario.hpp"
#include "bellbound/simplex_lp.hpp"

namespace bellbound {

struct DistanceOptions {
    double tol = 1e-7;
    std::size_t max_iter = 200000;
    std::size_t vertex_cap = kDefaultVertexCap;
};

// Certified projection result. certified_lower <= true minimum <= primal;
// downstream entanglement bounds consume certified_lower only.
struct DistanceResult {
    DivergenceKind kind = DivergenceKind::tv;
    double primal = 0.0;
    double certified_lower = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> weights;  // simplex vector over the vertex set
};

namespace detail {

inline std::vector<std::pair<std::size_t, double>> sparse_weights(
    const std::vector<double>& w) {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t v = 0; v < w.size(); ++v) {
        if (w[v] > 0.0) out.emplace_back(v, w[v]);
    }
    return out;
}

inline void normalize_weights(std::vector<double>& w) {
    double total = 0.0;
    for (double& wi : w) {
        if (wi < 0.0) wi = 0.0;
        total += wi;
    }
    if (total <= 0.0) throw std::logic_error("weight vector collapsed to zero");
    for (double& wi : w) wi /= total;
}

// Exact linear program for the setting-averaged total variation distance:
// variables (w, t, s1, s2), slack rows t - s1 = p - Vw and -t + s2 = p - Vw
// force t >= |p - Vw|; objective sum(t) / (2 tau).
inline DistanceResult tv_distance(const Behavior& p, const VertexSet& vertices,
                                  const DistanceOptions& opt) {
    const Scenario& s = p.scenario();
    const std::size_t nv = vertices.size();
    const std::size_t dim = s.flat_dimension();
    const std::size_t tau = s.joint_setting_count();
    const std::size_t rows = 2 * dim + 1;
    const std::size_t cols = nv + 3 * dim;

    LpProblem lp;
    lp.rows = rows;
    lp.cols = cols;
    lp.a.assign(rows * cols, 0.0);
    lp.b.assign(rows, 0.0);
    lp.c.assign(cols, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        for (std::size_t idx : vertices.support(v)) {
            lp.a[idx * cols + v] = 1.0;
            lp.a[(dim + idx) * cols + v] = 1.0;
        }
        lp.a[2 * dim * cols + v] = 1.0;
    }
    for (std::size_t r = 0; r < dim; ++r) {
        lp.a[r * cols + (nv + r)] = 1.0;            // +t
        lp.a[r * cols + (nv + dim + r)] = -1.0;     // -s1
        lp.a[(dim + r) * cols + (nv + r)] = -1.0;   // -t
        lp.a[(dim + r) * cols + (nv + 2 * dim + r)] = 1.0;  // +s2
        lp.b[r] = p.flat()[r];
        lp.b[dim + r] = p.flat()[r];
        lp.c[nv + r] = 1.0 / (2.0 * static_cast<double>(tau));
    }
    lp.b[2 * dim] = 1.0;

    LpResult sol = solve_lp(lp, opt.max_iter);
    if (sol.status == LpResult::Status::infeasible ||
        sol.status == LpResult::Status::unbounded) {
        throw std::logic_error("total variation program lost feasibility");
    }

    DistanceResult result;
    result.kind = DivergenceKind::tv;
    result.iterations = sol.iterations;
    result.converged = sol.status == LpResult::Status::optimal;
    result.weights.assign(sol.x.begin(), sol.x.begin() + nv);
    normalize_weights(result.weights);
    auto sw = sparse_weights(result.weights);
    Behavior q = mix_vertices(vertices, sw);
    result.primal = aggregate_distance(DivergenceKind::tv, p, q);

    double x_l1 = 0.0;
    for (double v : sol.x) x_l1 += std::abs(v);
    double y_inf = 0.0;
    for (double v : sol.dual) y_inf = std::max(y_inf, std::abs(v));
    result.gap = std::abs(sol.objective - sol.dual_objective) +
                 sol.dual_residual * (1.0 + x_l1) +
                 sol.primal_residual * (1.0 + y_inf) * static_cast<double>(rows) +
                 std::abs(result.primal - sol.objective);
    result.certified_lower = std::max(0.0, result.primal - result.gap);
    return result;
}

struct SmoothObjective {
    // Guarded evaluations tolerate the float noise of intermediate iterates;
    // at clean simplex points they coincide with the public divergences.
    static double kl_bits(const Behavior& p, const std::vector<double>& q,
                          const Scenario& s) {
        double total = 0.0;
        const auto& pf = p.flat();
        for (std::size_t i = 0; i < pf.size(); ++i) {
            if (pf[i] <= 0.0) continue;
            total += pf[i] * std::log2(pf[i] / std::max(q[i], 1e-300));
        }
        return std::max(0.0, total) / static_cast<double>(s.joint_setting_count());
    }

    static void kl_bits_grad(const Behavior& p, const std::vector<double>& q,
                             const Scenario& s, std::vector<double>& g) {
        const auto& pf = p.flat();
        const double scale =
            1.0 / (std::numbers::ln2 * static_cast<double>(s.joint_setting_count()));
        for (std::size_t i = 0; i < pf.size(); ++i) {
            g[i] = pf[i] <= 0.0 ? 0.0 : -pf[i] / std::max(q[i], 1e-300) * scale;
        }
    }

    static double infidelity(const Behavior& p, const std::vector<double>& q,
                             const Scenario& s) {
        double total = 0.0;
        for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
            auto block = p.setting_block(m);
            std::size_t off = s.flat_offset(m);
            double f = 0.0;
            for (std::size_t o = 0; o < block.size(); ++o) {
                f += std::sqrt(block[o] * std::max(q[off + o], 0.0));
            }
            f = std::min(f, 1.0);
            total += std::sqrt(std::max(0.0, 1.0 - f * f));
        }
        return total / static_cast<double>(s.joint_setting_count());
    }

    static void infidelity_grad(const Behavior& p, const std::vector<double>& q,
                                const Scenario& s, std::vector<double>& g) {
        const double tau = static_cast<double>(s.joint_setting_count());
        for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
            auto block = p.setting_block(m);
            std::size_t off = s.flat_offset(m);
            double f = 0.0;
            for (std::size_t o = 0; o < block.size(); ++o) {
                f += std::sqrt(block[o] * std::max(q[off + o], 0.0));
            }
            f = std::min(f, 1.0);
            double inf = std::sqrt(std::max(0.0, 1.0 - f * f));
            double factor = f / std::max(inf, 1e-12);
            for (std::size_t o = 0; o < block.size(); ++o) {
                if (block[o] <= 0.0) {
                    g[off + o] = 0.0;
                    continue;
                }
                double ratio = std::sqrt(block[o] / std::max(q[off + o], 1e-300));
                g[off + o] = -factor * 0.5 * ratio / tau;
            }
        }
    }
};

inline DistanceResult smooth_distance(const Behavior& p,
                                      const VertexSet& vertices,
                                      DivergenceKind kind,
                                      const DistanceOptions& opt) {
    const Scenario& s = p.scenario();
    auto kl_obj = [&](const std::vector<double>& q) {
        return SmoothObjective::kl_bits(p, q, s);
    };
    auto kl_grad = [&](const std::vector<double>& q, std::vector<double>& g) {
        SmoothObjective::kl_bits_grad(p, q, s, g);
    };
    auto if_obj = [&](const std::vector<double>& q) {
        return SmoothObjective::infidelity(p, q, s);
    };
    auto if_grad = [&](const std::vector<double>& q, std::vector<double>& g) {
        SmoothObjective::infidelity_grad(p, q, s, g);
    };

    {
        // The hull contains the uniform behavior, so the objective is finite
        // at the start point by construction.
        Behavior u = Behavior::uniform(s);
        double at_uniform = kind == DivergenceKind::kl_bits ? kl_obj(u.flat())
                                                            : if_obj(u.flat());
        if (!std::isfinite(at_uniform)) {
            throw std::logic_error("objective infinite at the uniform behavior");
        }
    }

    FwOptions fw;
    fw.tol = opt.tol;
    fw.max_iter = opt.max_iter;

    auto finish = [&](FwResult run, std::size_t extra_iterations) {
        DistanceResult result;
        result.kind = kind;
        result.iterations = run.iterations + extra_iterations;
        result.converged = run.converged;
        result.weights = std::move(run.weights);
        normalize_weights(result.weights);
        auto sw = sparse_weights(result.weights);
        Behavior q = mix_vertices(vertices, sw);
        result.primal = aggregate_distance(kind, p, q);
        result.gap = run.gap;
        if (std::isfinite(result.primal)) {
            result.certified_lower = std::max(0.0, result.primal - result.gap);
        } else {
            result.certified_lower = 0.0;
            result.converged = false;
        }
        return result;
    };

    if (kind == DivergenceKind::kl_bits) {
        return finish(frank_wolfe_minimize(vertices, kl_obj, kl_grad, {}, fw),
                      0);
    }

    // The infidelity objective is not convex over the hull, so a single
    // descent run can stall in a shallow local minimum. Run twice -- once
    // from uniform weights and once from the relative-entropy projection,
    // whose minimizer is unique and sits near every divergence's optimum --
    // and keep the better stationary point. The reported gap then certifies
    // first-order stationarity; on convex instances it also certifies
    // optimality.
    FwResult anchor = frank_wolfe_minimize(vertices, kl_obj, kl_grad, {}, fw);
    DistanceResult from_uniform =
        finish(frank_wolfe_minimize(vertices, if_obj, if_grad, {}, fw),
               anchor.iterations);
    DistanceResult from_anchor = finish(
        frank_wolfe_minimize(vertices, if_obj, if_grad, anchor.weights, fw), 0);
    const bool prefer_uniform =
        std::isfinite(from_uniform.primal) &&
        (!std::isfinite(from_anchor.primal) ||
         from_uniform.primal <= from_anchor.primal);
    const std::size_t total_iterations =
        from_uniform.iterations + from_anchor.iterations;
    DistanceResult best = prefer_uniform ? std::move(from_uniform)
                                         : std::move(from_anchor);
    best.iterations = total_iterations;
    return best;
}

}  // namespace detail

// Minimal setting-averaged divergence from a behavior to the local polytope.
// TV runs an exact linear program; KL and infidelity run away-step
// conditional gradient with a duality-gap stopping rule (infidelity from two
// start points, since its objective need not be convex over the hull).
inline DistanceResult distance_to_local(const Behavior& p, DivergenceKind kind,
                                        DistanceOptions opt = {}) {
    if (opt.tol <= 0.0) throw InvalidInputError("tolerance must be positive");
    require_valid(p);
    VertexSet vertices(p.scenario(), opt.vertex_cap);
    if (kind == DivergenceKind::tv) {
        return detail::tv_distance(p, vertices, opt);
    }
    return detail::smooth_distance(p, vertices, kind, opt);
}

}  // namespace bellbound
