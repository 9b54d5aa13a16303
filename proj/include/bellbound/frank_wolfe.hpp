#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

struct FwOptions {
    double tol = 1e-7;
    std::size_t max_iter = 200000;
};

struct FwResult {
    std::vector<double> weights;  // over the vertex set, sums to 1
    double primal = 0.0;
    double gap = 0.0;  // linear-minimization duality gap at the final point
    std::size_t iterations = 0;
    bool converged = false;
};

// Away-step conditional gradient over the convex hull of the deterministic
// vertices. The objective and gradient act on the flat behavior vector; the
// linear minimization oracle is the best vertex against the current gradient.
// The reported gap upper-bounds primal minus the true minimum for convex
// objectives.
template <class Objective, class Gradient>
FwResult frank_wolfe_minimize(const VertexSet& vertices, Objective&& objective,
                              Gradient&& gradient,
                              std::vector<double> start_weights = {},
                              FwOptions opt = {}) {
    const Scenario& s = vertices.scenario();
    const std::size_t nv = vertices.size();
    const std::size_t tau = s.joint_setting_count();
    const std::size_t dim = s.flat_dimension();
    if (opt.tol <= 0.0) throw InvalidInputError("tolerance must be positive");

    std::vector<std::uint32_t> sup = vertices.support_matrix();
    auto vertex_score = [&](std::size_t v, const std::vector<double>& g) {
        double acc = 0.0;
        const std::uint32_t* row = &sup[v * tau];
        for (std::size_t m = 0; m < tau; ++m) acc += g[row[m]];
        return acc;
    };

    std::vector<double> w = std::move(start_weights);
    if (w.empty()) {
        w.assign(nv, 1.0 / static_cast<double>(nv));
    } else if (w.size() != nv) {
        throw InvalidInputError("start weights do not match the vertex count");
    }

    std::vector<double> q(dim, 0.0);
    auto rebuild = [&]() {
        double total = 0.0;
        for (double& wi : w) {
            if (wi < 0.0) wi = 0.0;
            total += wi;
        }
        if (total <= 0.0) throw std::logic_error("vertex weights collapsed to zero");
        for (double& wi : w) wi /= total;
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t v = 0; v < nv; ++v) {
            if (w[v] == 0.0) continue;
            const std::uint32_t* row = &sup[v * tau];
            for (std::size_t m = 0; m < tau; ++m) q[row[m]] += w[v];
        }
    };
    rebuild();

    std::vector<double> g(dim), d(dim), trial(dim);
    auto eval_at = [&](double step) {
        for (std::size_t i = 0; i < dim; ++i) trial[i] = q[i] + step * d[i];
        return objective(trial);
    };

    FwResult result;
    double f_cur = objective(q);
    std::size_t stall = 0;
    bool mixed_once = false;

    while (result.iterations < opt.max_iter) {
        gradient(q, g);
        bool finite = true;
        for (double v : g) {
            if (!std::isfinite(v)) {
                finite = false;
                break;
            }
        }
        if (!finite) {
            // One rescue: nudge toward the uniform mixture and retry.
            if (mixed_once) throw std::logic_error("non-finite gradient twice");
            mixed_once = true;
            double u = 1e-12 / static_cast<double>(nv);
            for (double& wi : w) wi = (1.0 - 1e-12) * wi + u;
            rebuild();
            f_cur = objective(q);
            continue;
        }

        std::size_t best = 0, away = nv;
        double best_score = std::numeric_limits<double>::infinity();
        double away_score = -std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < nv; ++v) {
            double sc = vertex_score(v, g);
            if (sc < best_score) {
                best_score = sc;
                best = v;
            }
            if (w[v] > 0.0 && sc > away_score) {
                away_score = sc;
                away = v;
            }
        }
        double gq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) gq += g[i] * q[i];
        double fw_gap = gq - best_score;
        result.gap = std::max(0.0, fw_gap);
        if (fw_gap <= opt.tol) {
            result.converged = true;
            break;
        }

        double away_gap = away == nv ? -1.0 : away_score - gq;
        double step_max;
        bool away_step = false;
        if (away != nv && away_gap > fw_gap && w[away] < 1.0) {
            away_step = true;
            step_max = w[away] / (1.0 - w[away]);
        } else {
            step_max = 1.0;
        }

        if (away_step) {
            const std::uint32_t* row = &sup[away * tau];
            for (std::size_t i = 0; i < dim; ++i) d[i] = q[i];
            for (std::size_t m = 0; m < tau; ++m) d[row[m]] -= 1.0;
        } else {
            const std::uint32_t* row = &sup[best * tau];
            for (std::size_t i = 0; i < dim; ++i) d[i] = -q[i];
            for (std::size_t m = 0; m < tau; ++m) d[row[m]] += 1.0;
        }

        // Golden-section search, then a halving fallback that keeps the
        // primal monotone even if the slice is not unimodal.
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = 0.0, hi = step_max;
        double m1 = hi - kInvPhi * (hi - lo), m2 = lo + kInvPhi * (hi - lo);
        double f1 = eval_at(m1), f2 = eval_at(m2);
        double step_best = step_max, f_best = eval_at(step_max);
        for (int it = 0; it < 64 && hi - lo > 1e-18; ++it) {
            if (f1 <= f2) {
                hi = m2;
                m2 = m1;
                f2 = f1;
                m1 = hi - kInvPhi * (hi - lo);
                f1 = eval_at(m1);
            } else {
                lo = m1;
                m1 = m2;
                f1 = f2;
                m2 = lo + kInvPhi * (hi - lo);
                f2 = eval_at(m2);
            }
        }
        if (f1 < f_best) {
            f_best = f1;
            step_best = m1;
        }
        if (f2 < f_best) {
            f_best = f2;
            step_best = m2;
        }
        if (f_best > f_cur) {
            step_best = 0.0;
            for (int k = 1; k <= 70; ++k) {
                double stp = std::ldexp(step_max, -k);
                double fv = eval_at(stp);
                if (fv < f_cur) {
                    step_best = stp;
                    f_best = fv;
                    break;
                }
            }
        }
        if (step_best == 0.0) {
            if (++stall >= 2) break;  // flat at float resolution; keep certificate
            ++result.iterations;
            continue;
        }
        stall = 0;

        double step = step_best;
        if (away_step) {
            double scale = 1.0 + step;
            for (double& wi : w) wi *= scale;
            w[away] -= step;
            if (w[away] < 1e-15) w[away] = 0.0;
            const std::uint32_t* row = &sup[away * tau];
            for (std::size_t i = 0; i < dim; ++i) q[i] *= scale;
            for (std::size_t m = 0; m < tau; ++m) q[row[m]] -= step;
        } else {
            double scale = 1.0 - step;
            for (double& wi : w) wi *= scale;
            w[best] += step;
            const std::uint32_t* row = &sup[best * tau];
            for (std::size_t i = 0; i < dim; ++i) q[i] *= scale;
            for (std::size_t m = 0; m < tau; ++m) q[row[m]] += step;
        }
        f_cur = f_best;
        ++result.iterations;
        if (result.iterations % 256 == 0) {
            rebuild();
            f_cur = objective(q);
        }
    }

    rebuild();
    result.primal = objective(q);
    // Final certificate at the exactly rebuilt point.
    gradient(q, g);
    bool finite = true;
    for (double v : g) finite = finite && std::isfinite(v);
    if (finite) {
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < nv; ++v) {
            best_score = std::min(best_score, vertex_score(v, g));
        }
        double gq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) gq += g[i] * q[i];
        result.gap = std::max(0.0, gq - best_score);
    }
    result.weights = std::move(w);
    return result;
}

}  // namespace bellbound
