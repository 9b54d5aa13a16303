#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bellbound/errors.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

// Linear functional beta(P) = sum alpha_{a|m} p(a|m) with sparse
// coefficients and an optional declared classical bound.
class BellFunctional {
public:
    BellFunctional(Scenario scenario, std::string name,
                   std::optional<double> declared_bound = std::nullopt)
        : scenario_(std::move(scenario)),
          name_(std::move(name)),
          declared_bound_(declared_bound),
          coeffs_(scenario_.joint_setting_count()) {}

    const Scenario& scenario() const { return scenario_; }
    const std::string& name() const { return name_; }
    const std::optional<double>& declared_bound() const { return declared_bound_; }

    void set_coefficient(std::span<const int> setting_tuple,
                         std::span<const int> outcome_tuple, double value) {
        std::size_t m = scenario_.setting_index(setting_tuple);
        std::size_t o = scenario_.outcome_index(setting_tuple, outcome_tuple);
        set_coefficient_by_index(m, o, value);
    }

    void set_coefficient_by_index(std::size_t m, std::size_t o, double value) {
        if (m >= coeffs_.size() || o >= scenario_.outcome_count(m)) {
            throw InvalidInputError("coefficient index out of range");
        }
        auto& list = coeffs_[m];
        auto it = std::lower_bound(
            list.begin(), list.end(), o,
            [](const auto& e, std::size_t key) { return e.first < key; });
        if (it != list.end() && it->first == o) {
            it->second = value;
        } else {
            list.insert(it, {o, value});
        }
    }

    double coefficient(std::size_t m, std::size_t o) const {
        const auto& list = coeffs_[m];
        auto it = std::lower_bound(
            list.begin(), list.end(), o,
            [](const auto& e, std::size_t key) { return e.first < key; });
        return it != list.end() && it->first == o ? it->second : 0.0;
    }

    // Sorted (outcome index, coefficient) pairs per joint setting.
    const std::vector<std::vector<std::pair<std::size_t, double>>>& coefficients()
        const {
        return coeffs_;
    }

    std::size_t nonzero_count() const {
        std::size_t n = 0;
        for (const auto& list : coeffs_) {
            for (const auto& [o, v] : list) {
                if (v != 0.0) ++n;
            }
        }
        return n;
    }

private:
    Scenario scenario_;
    std::string name_;
    std::optional<double> declared_bound_;
    std::vector<std::vector<std::pair<std::size_t, double>>> coeffs_;
};

inline double evaluate(const BellFunctional& f, const Behavior& b) {
    if (f.scenario() != b.scenario()) {
        throw InvalidInputError("functional and behavior live on different scenarios");
    }
    double total = 0.0;
    const auto& coeffs = f.coefficients();
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        for (const auto& [o, v] : coeffs[m]) total += v * b.value(m, o);
    }
    return total;
}

inline double evaluate_on_vertex(const BellFunctional& f,
                                 const VertexSet& vertices, std::size_t v) {
    const Scenario& s = f.scenario();
    auto sup = vertices.support(v);
    double total = 0.0;
    for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
        total += f.coefficient(m, sup[m] - s.flat_offset(m));
    }
    return total;
}

// Maximum of the functional over the local polytope; attained at a vertex.
inline double classical_bound(const BellFunctional& f,
                              std::size_t cap = kDefaultVertexCap) {
    VertexSet vertices(f.scenario(), cap);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        best = std::max(best, evaluate_on_vertex(f, vertices, v));
    }
    return best;
}

// Normalizer for violation-based bounds: the sum over joint settings of the
// coefficient range at that setting. Outcomes missing from a partially
// populated setting count as coefficient 0.
inline double alpha_normalizer(const BellFunctional& f) {
    const Scenario& s = f.scenario();
    double alpha = 0.0;
    const auto& coeffs = f.coefficients();
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        const auto& list = coeffs[m];
        if (list.empty()) continue;
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& [o, v] : list) {
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
        if (list.size() < s.outcome_count(m)) {
            hi = std::max(hi, 0.0);
            lo = std::min(lo, 0.0);
        }
        alpha += hi - lo;
    }
    if (alpha <= 0.0) {
        throw UndefinedNormalizationError(
            "functional is constant on every setting; violation normalizer undefined");
    }
    return alpha;
}

enum class ClassicalBoundSource { computed, declared, override_value };

inline const char* classical_bound_source_name(ClassicalBoundSource s) {
    switch (s) {
        case ClassicalBoundSource::computed: return "computed";
        case ClassicalBoundSource::declared: return "declared";
        case ClassicalBoundSource::override_value: return "override";
    }
    return "?";
}

struct ViolationReport {
    double beta = 0.0;
    double c_used = 0.0;
    double alpha = 0.0;
    double beta_alpha = 0.0;  // max(0, (beta - c_used) / alpha)
    ClassicalBoundSource c_source = ClassicalBoundSource::computed;
};

inline ViolationReport normalized_violation(
    const BellFunctional& f, const Behavior& b,
    std::optional<double> c_override = std::nullopt,
    std::size_t cap = kDefaultVertexCap) {
    ViolationReport report;
    report.beta = evaluate(f, b);
    report.alpha = alpha_normalizer(f);
    if (c_override) {
        report.c_used = *c_override;
        report.c_source = ClassicalBoundSource::override_value;
    } else if (f.declared_bound()) {
        report.c_used = *f.declared_bound();
        report.c_source = ClassicalBoundSource::declared;
    } else {
        report.c_used = classical_bound(f, cap);
        report.c_source = ClassicalBoundSource::computed;
    }
    report.beta_alpha = std::max(0.0, (report.beta - report.c_used) / report.alpha);
    return report;
}

// Two parties, two dichotomic settings each; coefficients (-1)^(a+b+xy);
// classical bound 2, maximal quantum value 2 sqrt(2).
inline BellFunctional chsh() {
    BellFunctional f(Scenario::homogeneous(2, 2, 2), "chsh", 2.0);
    int m[2], a[2];
    for (m[0] = 0; m[0] < 2; ++m[0]) {
        for (m[1] = 0; m[1] < 2; ++m[1]) {
            for (a[0] = 0; a[0] < 2; ++a[0]) {
                for (a[1] = 0; a[1] < 2; ++a[1]) {
                    double v = (a[0] + a[1] + m[0] * m[1]) % 2 == 0 ? 1.0 : -1.0;
                    f.set_coefficient(std::span<const int>(m, 2),
                                      std::span<const int>(a, 2), v);
                }
            }
        }
    }
    return f;
}

namespace detail {

// Parity of the pair count among the set bits: sum_{j>k} m_j m_k mod 2.
inline int pair_parity(std::span<const int> m) {
    int ones = 0;
    for (int v : m) ones += v;
    return (ones * (ones - 1) / 2) % 2;
}

}  // namespace detail

// n-party generalization of the two-setting correlation inequality for odd n:
// settings of odd parity carry coefficients (-1)^(Gamma(m) + sum a); classical
// bound 2^((n-1)/2), maximal quantum value 2^(n-1).
inline BellFunctional mabk(int n) {
    if (n < 3 || n % 2 == 0) {
        throw InvalidInputError("this inequality family is defined for odd n >= 3");
    }
    Scenario s = Scenario::homogeneous(n, 2, 2);
    BellFunctional f(s, "mabk-" + std::to_string(n),
                     std::ldexp(1.0, (n - 1) / 2));
    for (std::size_t mi = 0; mi < s.joint_setting_count(); ++mi) {
        auto m = s.setting_tuple(mi);
        int ones = 0;
        for (int v : m) ones += v;
        if (ones % 2 == 0) continue;
        int gamma = detail::pair_parity(m);
        for (std::size_t oi = 0; oi < s.outcome_count(mi); ++oi) {
            auto a = s.outcome_tuple(m, oi);
            int asum = 0;
            for (int v : a) asum += v;
            f.set_coefficient_by_index(mi, oi,
                                       (gamma + asum) % 2 == 0 ? 1.0 : -1.0);
        }
    }
    return f;
}

// Two-party inequality with classical bound 0: Alice has d dichotomic
// settings, Bob two settings with d outcomes each (dichotomic use of Bob's
// second setting is the zero-padded special case). Coefficients:
// +p(00|01), -p(0k|k0) for k < d, -p(10|k1) for 0 < k < d.
inline BellFunctional yu_oh(int d) {
    if (d < 2) throw InvalidInputError("d must be at least 2");
    std::vector<int> settings = {d, 2};
    std::vector<std::vector<int>> outcomes = {std::vector<int>(d, 2),
                                              std::vector<int>{d, d}};
    BellFunctional f(Scenario(std::move(settings), std::move(outcomes)),
                     "yu-oh-" + std::to_string(d), 0.0);
    {
        int m[2] = {0, 1}, a[2] = {0, 0};
        f.set_coefficient(std::span<const int>(m, 2), std::span<const int>(a, 2),
                          1.0);
    }
    for (int k = 0; k < d; ++k) {
        int m[2] = {k, 0}, a[2] = {0, k};
        f.set_coefficient(std::span<const int>(m, 2), std::span<const int>(a, 2),
                          -1.0);
    }
    for (int k = 1; k < d; ++k) {
        int m[2] = {k, 1}, a[2] = {1, 0};
        f.set_coefficient(std::span<const int>(m, 2), std::span<const int>(a, 2),
                          -1.0);
    }
    return f;
}

// Synthetic behavior scoring 1 against yu_oh(d): it collects the lone
// positive coefficient at joint setting (0,1) and dodges every negative one.
// It is a valid probability table but not no-signaling; its purpose is to
// exercise the normalized-violation formula beta / (2d) above the zero
// classical bound.
inline Behavior yu_oh_witness_behavior(int d) {
    if (d < 2) throw InvalidInputError("d must be at least 2");
    const Scenario s = yu_oh(d).scenario();
    std::vector<double> flat(s.flat_dimension(), 0.0);
    for (int x = 0; x < d; ++x) {
        for (int y = 0; y < 2; ++y) {
            const int mt[2] = {x, y};
            int at[2];
            if (y == 0) {
                at[0] = 1;  // Alice outputs 1: avoids -p(0k|k0)
                at[1] = 0;
            } else if (x == 0) {
                at[0] = 0;  // the +p(00|01) cell
                at[1] = 0;
            } else {
                at[0] = 0;  // Bob outputs 1: avoids -p(10|k1)
                at[1] = 1;
            }
            const std::size_t m = s.setting_index(mt);
            flat[s.flat_offset(m) + s.outcome_index(mt, at)] = 1.0;
        }
    }
    return Behavior(s, std::move(flat));
}

}  // namespace bellbound
