#pragma once

// Regression tables comparing freshly computed quantities against the
// published reference values they are expected to reproduce.  Rows whose
// published value is known not to match a careful re-derivation are marked
// "flagged": for those rows the check asserts that our computation still
// agrees with the independently re-derived value, and the note explains the
// discrepancy.  Everything else must match within the stated tolerance.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bellbound/bounds.hpp"
#include "bellbound/distance.hpp"
#include "bellbound/divergence.hpp"
#include "bellbound/inequality.hpp"
#include "bellbound/presets.hpp"
#include "bellbound/quantum.hpp"

namespace bellbound {

enum class RowStatus { pass, flagged, mismatch };

inline const char* row_status_name(RowStatus s) {
    switch (s) {
        case RowStatus::pass: return "pass";
        case RowStatus::flagged: return "flagged";
        case RowStatus::mismatch: return "MISMATCH";
    }
    return "?";
}

struct ReproduceRow {
    std::string section;
    std::string label;
    double computed = 0.0;
    double published = 0.0;
    double tolerance = 0.0;
    RowStatus status = RowStatus::pass;
    std::string note;
};

struct ReproduceReport {
    std::vector<ReproduceRow> rows;

    std::size_t count(RowStatus s) const {
        std::size_t n = 0;
        for (const ReproduceRow& r : rows) {
            if (r.status == s) ++n;
        }
        return n;
    }

    // Flagged rows are expected discrepancies: they fail the run only in
    // strict mode.  A mismatch always fails the run.
    int exit_code(bool strict) const {
        if (count(RowStatus::mismatch) > 0) return 1;
        if (strict && count(RowStatus::flagged) > 0) return 1;
        return 0;
    }
};

namespace detail {

inline ReproduceRow checked_row(std::string section, std::string label,
                                double computed, double published,
                                double tolerance, std::string note = "") {
    ReproduceRow row{std::move(section), std::move(label), computed, published,
                     tolerance,          RowStatus::pass,  std::move(note)};
    if (!(std::abs(computed - published) <= tolerance)) {
        row.status = RowStatus::mismatch;
    }
    return row;
}

// A row whose published value is known not to be reproducible.  The row is
// healthy ("flagged") when the computation agrees with the re-derived value;
// any drift from that value is a genuine mismatch.
inline ReproduceRow flagged_row(std::string section, std::string label,
                                double computed, double published,
                                double rederived, std::string note) {
    constexpr double kRederivedTol = 1e-4;
    ReproduceRow row{std::move(section),  std::move(label), computed,
                     published,           kRederivedTol,    RowStatus::flagged,
                     std::move(note)};
    if (!(std::abs(computed - rederived) <= kRederivedTol)) {
        row.status = RowStatus::mismatch;
    }
    return row;
}

}  // namespace detail

inline ReproduceReport run_reproduce() {
    ReproduceReport rep;
    const Behavior p = tsirelson_behavior();

    // -- Section A: distance-based bounds for the two-setting quantum-optimal
    //    behavior.
    {
        const std::string sec = "A: distance-based bounds";
        const DistanceResult tv = distance_to_local(p, DivergenceKind::tv);
        const DistanceResult kl = distance_to_local(p, DivergenceKind::kl_bits);
        const Behavior q = symmetric_local_behavior(0.5);
        const double if_candidate =
            aggregate_distance(DivergenceKind::infidelity, p, q);
        rep.rows.push_back(detail::checked_row(
            sec, "E_Tr (certified trace-distance bound)", tv.certified_lower,
            0.104, 5e-4));
        rep.rows.push_back(detail::checked_row(
            sec, "E_Re (certified relative-entropy bound)", kl.certified_lower,
            0.046, 5e-4));
        rep.rows.push_back(detail::checked_row(
            sec, "E_G at the symmetric boundary point",
            if_candidate * if_candidate, 0.02, 5e-3,
            "evaluated at the nearest symmetric local point; the infidelity "
            "objective over the local set is not convex"));
        rep.rows.push_back(detail::checked_row(
            sec, "E_Rob (certified robustness bound)",
            tv.certified_lower / (1.0 - tv.certified_lower), 0.12, 5e-3));
        rep.rows.push_back(detail::flagged_row(
            sec, "E_C strengthened variant at the symmetric point",
            std::sqrt(2.0) * if_candidate, 0.30, 0.184591911282514525,
            "published 0.30 is not reproduced: sqrt(2) x infidelity = 0.184592 "
            "(plain variant 0.130526)"));
    }

    // -- Section B: violation-based bounds for the same behavior.
    {
        const std::string sec = "B: violation-based bounds";
        const BellFunctional f = chsh();
        const BoundReport t2 =
            violation_based_bounds(normalized_violation(f, p));
        rep.rows.push_back(detail::checked_row(
            sec, "E_Tr", *t2.value(MeasureKind::trace_distance), 0.104, 5e-4));
        rep.rows.push_back(detail::checked_row(
            sec, "E_Re", *t2.value(MeasureKind::relative_entropy), 0.031, 5e-4));
        rep.rows.push_back(detail::checked_row(
            sec, "E_G", *t2.value(MeasureKind::geometric), 0.01, 5e-3));
        rep.rows.push_back(detail::checked_row(
            sec, "E_C", *t2.value(MeasureKind::concurrence), 0.15, 5e-3));
    }

    // -- Section C: violation-based bounds with the separable threshold
    //    overridden to sqrt(2), plus divergences at the matching local point.
    {
        const std::string sec = "C: separable-threshold override";
        const BellFunctional f = chsh();
        const BoundReport t2 =
            violation_based_bounds(normalized_violation(f, p, std::sqrt(2.0)));
        const Behavior q = symmetric_local_behavior(std::sqrt(2.0) / 4.0);
        const double kl_q = aggregate_distance(DivergenceKind::kl_bits, p, q);
        const double if_q = aggregate_distance(DivergenceKind::infidelity, p, q);
        rep.rows.push_back(detail::flagged_row(
            sec, "E_Tr with threshold sqrt(2)",
            *t2.value(MeasureKind::trace_distance), 0.125, 0.176776695296636881,
            "published 0.125 is not reproduced: (beta - c)/alpha with "
            "c = sqrt(2) gives sqrt(2)/8 = 0.176777"));
        rep.rows.push_back(detail::flagged_row(
            sec, "E_Re at the correlator-sqrt(2)/4 point", kl_q, 0.33,
            0.118506025539802870,
            "published 0.33 is not reproduced: the relative-entropy divergence "
            "at the matching local point is 0.118506"));
        rep.rows.push_back(detail::checked_row(
            sec, "E_G at the correlator-sqrt(2)/4 point", if_q * if_q, 0.04,
            5e-3));
        rep.rows.push_back(detail::checked_row(
            sec, "E_C at the correlator-sqrt(2)/4 point", std::sqrt(2.0) * if_q,
            0.30, 5e-3));
    }

    // -- Section D: odd-party parity inequality and its maximal quantum
    //    violation.
    {
        const std::string sec = "D: multipartite parity inequality";
        for (const int n : {3, 5}) {
            const BellFunctional f = mabk(n);
            rep.rows.push_back(detail::checked_row(
                sec, "enumerated classical bound, n=" + std::to_string(n),
                classical_bound(f), std::ldexp(1.0, (n - 1) / 2), 1e-9));
            rep.rows.push_back(detail::checked_row(
                sec, "maximally entangled score, n=" + std::to_string(n),
                evaluate(f, ghz_mabk_behavior(n)), std::ldexp(1.0, n - 1),
                1e-9));
        }
        for (const int n : {3, 5, 7}) {
            const BellFunctional f = mabk(n);
            const ViolationReport v =
                normalized_violation(f, ghz_mabk_behavior(n));
            const double expected = 0.5 - std::ldexp(1.0, -(n + 1) / 2);
            rep.rows.push_back(detail::checked_row(
                sec, "normalized violation, n=" + std::to_string(n),
                v.beta_alpha, expected, 1e-12,
                n == 7 ? "approaches 1/2 as the party count grows" : ""));
        }
    }

    // -- Section E: two-party inequality with many outcomes and a zero
    //    classical bound.
    {
        const std::string sec = "E: many-outcome inequality";
        for (const int d : {2, 3, 4}) {
            const BellFunctional f = yu_oh(d);
            rep.rows.push_back(detail::checked_row(
                sec, "coefficient-range normalizer, d=" + std::to_string(d),
                alpha_normalizer(f), 2.0 * d, 1e-9));
            rep.rows.push_back(detail::checked_row(
                sec, "enumerated classical bound, d=" + std::to_string(d),
                classical_bound(f), 0.0, 1e-9));
        }
        const int d = 3;
        const BellFunctional f = yu_oh(d);
        const Scenario& s = f.scenario();
        const Behavior witness = yu_oh_witness_behavior(d);
        const double beta = evaluate(f, witness);
        const BoundReport t2 =
            violation_based_bounds(normalized_violation(f, witness));
        rep.rows.push_back(detail::checked_row(
            sec, "witness behavior score, d=3", beta, 1.0, 1e-12));
        rep.rows.push_back(detail::checked_row(
            sec, "E_Tr equals score over normalizer, d=3",
            *t2.value(MeasureKind::trace_distance), beta / (2.0 * d), 1e-12));
        rep.rows.push_back(detail::checked_row(
            sec, "uniform-behavior score, d=3",
            evaluate(f, Behavior::uniform(s)), (1.0 - d) / static_cast<double>(d),
            1e-12, "strictly below the zero classical bound"));
    }

    return rep;
}

inline std::string render_reproduce(const ReproduceReport& rep) {
    std::ostringstream out;
    std::size_t label_width = 5;
    std::string last_section;
    for (const ReproduceRow& r : rep.rows) {
        label_width = std::max(label_width, r.label.size());
    }
    for (const ReproduceRow& r : rep.rows) {
        if (r.section != last_section) {
            out << r.section << "\n";
            last_section = r.section;
        }
        std::ostringstream line;
        line << "  " << std::left << std::setw(static_cast<int>(label_width + 2))
             << r.label << std::right;
        line << std::setw(15) << detail::format_number(r.computed);
        line << std::setw(12) << r.published;
        line << std::setw(10) << std::scientific << std::setprecision(0)
             << r.tolerance;
        out << line.str() << "  " << row_status_name(r.status) << "\n";
        if (!r.note.empty()) {
            out << "      note: " << r.note << "\n";
        }
    }
    out << "summary: " << rep.count(RowStatus::pass) << " pass, "
        << rep.count(RowStatus::flagged) << " flagged, "
        << rep.count(RowStatus::mismatch) << " mismatch\n";
    return out.str();
}

}  // namespace bellbound
