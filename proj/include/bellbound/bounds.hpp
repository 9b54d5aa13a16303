#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bellbound/distance.hpp"
#include "bellbound/errors.hpp"
#include "bellbound/inequality.hpp"

namespace bellbound {

// Entanglement measures that admit device-independent lower bounds here.
enum class MeasureKind {
    trace_distance,    // E_Tr
    relative_entropy,  // E_Re
    formation,         // E_F
    concurrence,       // E_C
    geometric,         // E_G
    robustness,        // E_Rob
};

inline const char* measure_name(MeasureKind m) {
    switch (m) {
        case MeasureKind::trace_distance: return "E_Tr";
        case MeasureKind::relative_entropy: return "E_Re";
        case MeasureKind::formation: return "E_F";
        case MeasureKind::concurrence: return "E_C";
        case MeasureKind::geometric: return "E_G";
        case MeasureKind::robustness: return "E_Rob";
    }
    return "?";
}

enum class BoundMethod { distance_based, violation_based, chsh_refined };

// Interface strings for the CLI and report serialization.
inline const char* bound_method_name(BoundMethod m) {
    switch (m) {
        case BoundMethod::distance_based: return "theorem1";
        case BoundMethod::violation_based: return "theorem2";
        case BoundMethod::chsh_refined: return "chsh-refined";
    }
    return "?";
}

struct BoundEntry {
    MeasureKind measure;
    double value = 0.0;
    std::string note;
};

struct BoundReport {
    BoundMethod method = BoundMethod::distance_based;
    std::vector<BoundEntry> entries;
    std::vector<std::string> notes;
    std::optional<DistanceResult> input_tv, input_kl, input_if;
    std::optional<ViolationReport> input_violation;

    std::optional<double> value(MeasureKind m) const {
        for (const auto& e : entries) {
            if (e.measure == m) return e.value;
        }
        return std::nullopt;
    }
};

namespace detail {

inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

}  // namespace detail

// Converts certified distances to the local polytope into entanglement lower
// bounds. Consumes certified_lower only, so the output stays a valid lower
// bound even when a solver stopped early.
inline BoundReport distance_based_bounds(const DistanceResult& d_tv,
                                         const DistanceResult& d_kl,
                                         const DistanceResult& d_if) {
    if (d_tv.kind != DivergenceKind::tv || d_kl.kind != DivergenceKind::kl_bits ||
        d_if.kind != DivergenceKind::infidelity) {
        throw InvalidInputError(
            "distance results must be (tv, kl_bits, infidelity) in that order");
    }
    double tv = d_tv.certified_lower;
    double kl = d_kl.certified_lower;
    double inf = d_if.certified_lower;

    BoundReport report;
    report.method = BoundMethod::distance_based;
    report.input_tv = d_tv;
    report.input_kl = d_kl;
    report.input_if = d_if;
    report.entries.push_back({MeasureKind::trace_distance, tv, ""});
    report.entries.push_back({MeasureKind::relative_entropy, kl, ""});
    report.entries.push_back({MeasureKind::formation, kl, ""});
    report.entries.push_back(
        {MeasureKind::concurrence, inf,
         "conservative form; strengthened variant sqrt(2) * distance = " +
             detail::format_number(std::numbers::sqrt2 * inf)});
    report.entries.push_back({MeasureKind::geometric, inf * inf, ""});
    if (tv < 1.0) {
        report.entries.push_back({MeasureKind::robustness, tv / (1.0 - tv), ""});
    } else {
        report.notes.push_back(
            "E_Rob omitted: trace-distance input reaches 1, denominator vanishes");
    }
    return report;
}

// Converts a normalized violation into entanglement lower bounds.
inline BoundReport violation_based_bounds(const ViolationReport& v) {
    double ba = v.beta_alpha;
    if (ba < 0.0) throw InvalidInputError("normalized violation must be >= 0");

    BoundReport report;
    report.method = BoundMethod::violation_based;
    report.input_violation = v;
    report.entries.push_back({MeasureKind::trace_distance, ba, ""});
    double re = 2.0 / std::numbers::ln2 * ba * ba;
    report.entries.push_back({MeasureKind::relative_entropy, re, ""});
    report.entries.push_back({MeasureKind::formation, re, ""});
    report.entries.push_back(
        {MeasureKind::concurrence, std::numbers::sqrt2 * ba, ""});
    report.entries.push_back({MeasureKind::geometric, ba * ba, ""});
    if (ba < 1.0) {
        report.entries.push_back({MeasureKind::robustness, ba / (1.0 - ba), ""});
    } else {
        report.notes.push_back(
            "E_Rob omitted: normalized violation reaches 1, denominator vanishes");
    }
    return report;
}

struct ChshRefinedBounds {
    double concurrence = 0.0;
    double geometric = 0.0;
};

inline constexpr double kChshQuantumMax = 2.0 * std::numbers::sqrt2;

// Two-qubit-scenario refinement valid for the minimal (2,2,2) scenario:
// concurrence from the violation, then the geometric measure through the
// two-qubit relation E_G = (1 - sqrt(1 - C^2)) / 2.
inline ChshRefinedBounds chsh_refined_bounds(double beta) {
    ChshRefinedBounds out;
    if (beta <= 2.0) return out;
    if (beta > kChshQuantumMax + 1e-9) {
        throw InvalidInputError("violation exceeds the maximal quantum value");
    }
    beta = std::min(beta, kChshQuantumMax);
    out.concurrence = (beta - 2.0) / (kChshQuantumMax - 2.0);
    double c2 = std::min(1.0, out.concurrence * out.concurrence);
    out.geometric = 0.5 * (1.0 - std::sqrt(1.0 - c2));
    return out;
}

// Device-dependent refinement: assumes a two-qubit realization.
inline double two_qubit_concurrence_bound(double beta) {
    if (beta < 2.0) return 0.0;
    return 0.5 * std::sqrt(beta * beta - 4.0);
}

}  // namespace bellbound
