#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "bellbound/errors.hpp"

namespace bellbound {

// Equality-form linear program: min c.x subject to A x = b, x >= 0.
struct LpProblem {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;  // row-major, rows x cols
    std::vector<double> b;
    std::vector<double> c;
};

struct LpResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };
    Status status = Status::iteration_limit;
    std::vector<double> x;
    std::vector<double> dual;  // row multipliers for the original row signs
    double objective = 0.0;
    double dual_objective = 0.0;
    double primal_residual = 0.0;  // max |Ax - b|
    double dual_residual = 0.0;    // max(0, -min reduced cost) over real columns
    std::size_t iterations = 0;
};

// Dense two-phase revised simplex with Bland's rule and periodic basis
// refactorization. Intended for the small, well-scaled programs produced by
// the polytope distance formulation; no external solver dependency.
class SimplexSolver {
public:
    explicit SimplexSolver(const LpProblem& lp, std::size_t max_iter = 0)
        : m_(lp.rows), n_(lp.cols), b_(lp.b), cost_(lp.c) {
        if (lp.a.size() != m_ * n_ || lp.b.size() != m_ || lp.c.size() != n_) {
            throw InvalidInputError("linear program shape mismatch");
        }
        max_iter_ = max_iter ? max_iter : 1000 + 50 * (m_ + n_);
        // Column-major copy; artificial column i is e_i after row sign flips.
        col_.assign(n_ * m_, 0.0);
        flip_.assign(m_, false);
        for (std::size_t i = 0; i < m_; ++i) {
            if (b_[i] < 0.0) {
                flip_[i] = true;
                b_[i] = -b_[i];
            }
        }
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t i = 0; i < m_; ++i) {
                double v = lp.a[i * n_ + j];
                col_[j * m_ + i] = flip_[i] ? -v : v;
            }
        }
    }

    LpResult solve() {
        basis_.resize(m_);
        is_basic_.assign(n_ + m_, false);
        for (std::size_t i = 0; i < m_; ++i) {
            basis_[i] = n_ + i;
            is_basic_[n_ + i] = true;
        }
        binv_.assign(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;

        LpResult result;
        // Phase 1: minimize the artificial sum from the all-artificial basis.
        phase1_ = true;
        Status st = iterate(result);
        if (st == Status::iteration_limit) return finish(result, st);
        double infeas = 0.0;
        std::vector<double> xb = basic_values();
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= n_) infeas += std::max(0.0, xb[i]);
        }
        if (infeas > kFeasTol) return finish(result, Status::infeasible);
        drive_out_artificials();

        phase1_ = false;
        st = iterate(result);
        return finish(result, st);
    }

private:
    using Status = LpResult::Status;

    static constexpr double kReducedCostTol = 1e-9;
    static constexpr double kPivotTol = 1e-11;
    static constexpr double kFeasTol = 1e-8;
    static constexpr std::size_t kRefactorInterval = 64;

    double column(std::size_t j, std::size_t i) const {
        return j < n_ ? col_[j * m_ + i] : (j - n_ == i ? 1.0 : 0.0);
    }

    double cost_of(std::size_t j) const {
        if (phase1_) return j >= n_ ? 1.0 : 0.0;
        return j < n_ ? cost_[j] : 0.0;
    }

    std::vector<double> basic_values() const {
        std::vector<double> xb(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
            xb[i] = s;
        }
        return xb;
    }

    std::vector<double> multipliers() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            double ck = cost_of(basis_[k]);
            if (ck == 0.0) continue;
            for (std::size_t i = 0; i < m_; ++i) y[i] += ck * binv_[k * m_ + i];
        }
        return y;
    }

    double reduced_cost(std::size_t j, const std::vector<double>& y) const {
        double r = cost_of(j);
        if (j < n_) {
            const double* cj = &col_[j * m_];
            for (std::size_t i = 0; i < m_; ++i) r -= y[i] * cj[i];
        } else {
            r -= y[j - n_];
        }
        return r;
    }

    Status iterate(LpResult& result) {
        std::size_t since_refactor = 0;
        for (;;) {
            if (result.iterations >= max_iter_) return Status::iteration_limit;
            std::vector<double> y = multipliers();
            // Bland: pick the lowest-index improving column. Artificials may
            // not re-enter in phase 2.
            std::size_t limit = phase1_ ? n_ + m_ : n_;
            std::size_t entering = limit;
            for (std::size_t j = 0; j < limit; ++j) {
                if (is_basic_[j]) continue;
                if (reduced_cost(j, y) < -kReducedCostTol) {
                    entering = j;
                    break;
                }
            }
            if (entering == limit) return Status::optimal;

            std::vector<double> d(m_, 0.0);
            for (std::size_t i = 0; i < m_; ++i) {
                double s = 0.0;
                for (std::size_t k = 0; k < m_; ++k) {
                    s += binv_[i * m_ + k] * column(entering, k);
                }
                d[i] = s;
            }
            std::vector<double> xb = basic_values();
            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (d[i] <= kPivotTol) continue;
                double ratio = std::max(xb[i], 0.0) / d[i];
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     (leave == m_ || basis_[i] < basis_[leave]))) {
                    best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return Status::unbounded;

            pivot(entering, leave, d);
            ++result.iterations;
            if (++since_refactor >= kRefactorInterval) {
                refactorize();
                since_refactor = 0;
            }
        }
    }

    void pivot(std::size_t entering, std::size_t leave,
               const std::vector<double>& d) {
        is_basic_[basis_[leave]] = false;
        basis_[leave] = entering;
        is_basic_[entering] = true;
        double piv = d[leave];
        for (std::size_t k = 0; k < m_; ++k) binv_[leave * m_ + k] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == leave || d[i] == 0.0) continue;
            double f = d[i];
            for (std::size_t k = 0; k < m_; ++k) {
                binv_[i * m_ + k] -= f * binv_[leave * m_ + k];
            }
        }
    }

    // Rebuild binv from the basis by Gauss-Jordan with partial pivoting.
    void refactorize() {
        std::vector<double> work(m_ * m_, 0.0);
        for (std::size_t k = 0; k < m_; ++k) {
            for (std::size_t i = 0; i < m_; ++i) {
                work[i * m_ + k] = column(basis_[k], i);
            }
        }
        std::vector<double> inv(m_ * m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
        for (std::size_t k = 0; k < m_; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < m_; ++i) {
                if (std::abs(work[i * m_ + k]) > std::abs(work[piv * m_ + k])) piv = i;
            }
            if (std::abs(work[piv * m_ + k]) < 1e-14) continue;  // singular guard
            if (piv != k) {
                for (std::size_t j = 0; j < m_; ++j) {
                    std::swap(work[piv * m_ + j], work[k * m_ + j]);
                    std::swap(inv[piv * m_ + j], inv[k * m_ + j]);
                }
            }
            double pv = work[k * m_ + k];
            for (std::size_t j = 0; j < m_; ++j) {
                work[k * m_ + j] /= pv;
                inv[k * m_ + j] /= pv;
            }
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == k) continue;
                double f = work[i * m_ + k];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < m_; ++j) {
                    work[i * m_ + j] -= f * work[k * m_ + j];
                    inv[i * m_ + j] -= f * inv[k * m_ + j];
                }
            }
        }
        binv_ = std::move(inv);
    }

    // Replace zero-level basic artificials with real columns where possible;
    // rows that admit none are redundant and keep their artificial at zero.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            std::size_t entering = n_;
            std::vector<double> d(m_, 0.0);
            for (std::size_t j = 0; j < n_; ++j) {
                if (is_basic_[j]) continue;
                double entry = 0.0;
                const double* cj = &col_[j * m_];
                for (std::size_t k = 0; k < m_; ++k) {
                    entry += binv_[i * m_ + k] * cj[k];
                }
                if (std::abs(entry) > 1e-9) {
                    entering = j;
                    for (std::size_t r = 0; r < m_; ++r) {
                        double s = 0.0;
                        for (std::size_t k = 0; k < m_; ++k) {
                            s += binv_[r * m_ + k] * cj[k];
                        }
                        d[r] = s;
                    }
                    break;
                }
            }
            if (entering < n_) pivot(entering, i, d);
        }
    }

    LpResult finish(LpResult& result, Status st) {
        result.status = st;
        std::vector<double> xb = basic_values();
        result.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) result.x[basis_[i]] = std::max(0.0, xb[i]);
        }
        phase1_ = false;
        std::vector<double> y = multipliers();
        result.objective = 0.0;
        for (std::size_t j = 0; j < n_; ++j) result.objective += cost_[j] * result.x[j];
        result.dual_objective = 0.0;
        for (std::size_t i = 0; i < m_; ++i) result.dual_objective += y[i] * b_[i];
        result.dual_residual = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            double r = reduced_cost(j, y);
            result.dual_residual = std::max(result.dual_residual, -r);
        }
        result.primal_residual = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                ax += col_[j * m_ + i] * result.x[j];
            }
            result.primal_residual =
                std::max(result.primal_residual, std::abs(ax - b_[i]));
        }
        result.dual.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            result.dual[i] = flip_[i] ? -y[i] : y[i];
        }
        return result;
    }

    std::size_t m_, n_;
    std::vector<double> b_;
    std::vector<double> cost_;
    std::vector<double> col_;  // column-major constraint matrix, sign-flipped
    std::vector<bool> flip_;
    std::vector<std::size_t> basis_;
    std::vector<bool> is_basic_;
    std::vector<double> binv_;
    std::size_t max_iter_ = 0;
    bool phase1_ = true;
};

inline LpResult solve_lp(const LpProblem& lp, std::size_t max_iter = 0) {
    return SimplexSolver(lp, max_iter).solve();
}

}  // namespace bellbound
