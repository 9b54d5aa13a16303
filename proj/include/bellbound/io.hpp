#pragma once

// JSON input/output for behaviors, functionals, quantum inputs, and result
// reports, plus plain-text rendering of bound reports.  All writers emit a
// stable field order so repeated runs produce byte-identical output.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bellbound/bounds.hpp"
#include "bellbound/distance.hpp"
#include "bellbound/errors.hpp"
#include "bellbound/inequality.hpp"
#include "bellbound/quantum.hpp"
#include "bellbound/scenario.hpp"

namespace bellbound {

using Json = nlohmann::ordered_json;

namespace detail {

inline int parse_index(std::string_view text) {
    int value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || value < 0) {
        throw InvalidInputError("expected a non-negative integer, got \"" +
                                std::string(text) + "\"");
    }
    return value;
}

inline std::vector<int> parse_index_list(std::string_view text) {
    std::vector<int> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        const std::string_view piece = text.substr(
            start,
            comma == std::string_view::npos ? std::string_view::npos : comma - start);
        out.push_back(parse_index(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double require_number(const Json& j, const std::string& what) {
    if (!j.is_number()) {
        throw InvalidInputError(what + " must be a number");
    }
    return j.get<double>();
}

inline int require_int(const Json& j, const std::string& what) {
    if (j.is_number_unsigned()) {
        if (j.get<std::uint64_t>() >
            static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
            throw InvalidInputError(what + " must be a non-negative integer");
        }
        return static_cast<int>(j.get<std::uint64_t>());
    }
    if (j.is_number_integer()) {
        const std::int64_t v = j.get<std::int64_t>();
        if (v < 0 || v > std::numeric_limits<int>::max()) {
            throw InvalidInputError(what + " must be a non-negative integer");
        }
        return static_cast<int>(v);
    }
    throw InvalidInputError(what + " must be a non-negative integer");
}

inline const Json& require_field(const Json& j, const char* key) {
    if (!j.is_object()) {
        throw InvalidInputError("expected a JSON object with field \"" +
                                std::string(key) + "\"");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        throw InvalidInputError("missing required field \"" + std::string(key) +
                                "\"");
    }
    return *it;
}

// Non-finite doubles are not representable as JSON numbers; encode them as
// strings so reports stay machine-readable.
inline Json json_number(double v) {
    if (std::isfinite(v)) return Json(v);
    if (std::isnan(v)) return Json("nan");
    return Json(v > 0 ? "infinity" : "-infinity");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

inline Json scenario_to_json(const Scenario& s) {
    Json j;
    j["parties"] = s.parties();
    Json settings = Json::array();
    for (int i = 0; i < s.parties(); ++i) settings.push_back(s.settings(i));
    j["settings"] = std::move(settings);
    Json outcomes = Json::array();
    for (int i = 0; i < s.parties(); ++i) {
        Json per_party = Json::array();
        for (int m = 0; m < s.settings(i); ++m) {
            per_party.push_back(s.outcomes(i, m));
        }
        outcomes.push_back(std::move(per_party));
    }
    j["outcomes"] = std::move(outcomes);
    return j;
}

inline Scenario scenario_from_json(const Json& j) {
    const int parties =
        detail::require_int(detail::require_field(j, "parties"), "\"parties\"");
    const Json& settings = detail::require_field(j, "settings");
    const Json& outcomes = detail::require_field(j, "outcomes");
    if (!settings.is_array() ||
        settings.size() != static_cast<std::size_t>(parties)) {
        throw InvalidInputError(
            "\"settings\" must be an array with one entry per party");
    }
    if (!outcomes.is_array() ||
        outcomes.size() != static_cast<std::size_t>(parties)) {
        throw InvalidInputError(
            "\"outcomes\" must be an array with one entry per party");
    }
    std::vector<int> m(parties);
    std::vector<std::vector<int>> k(parties);
    for (int i = 0; i < parties; ++i) {
        m[i] = detail::require_int(settings[i], "\"settings\" entry");
        if (!outcomes[i].is_array() ||
            outcomes[i].size() != static_cast<std::size_t>(m[i])) {
            throw InvalidInputError("\"outcomes\" for party " + std::to_string(i) +
                                    " must list one outcome count per setting");
        }
        k[i].resize(m[i]);
        for (int mm = 0; mm < m[i]; ++mm) {
            k[i][mm] = detail::require_int(outcomes[i][mm], "\"outcomes\" entry");
        }
    }
    return Scenario(std::move(m), std::move(k));
}

// ---------------------------------------------------------------------------
// Behavior
// ---------------------------------------------------------------------------

inline std::string probability_key(const Scenario& s, std::size_t m,
                                   std::size_t outcome) {
    const std::vector<int> ms = s.setting_tuple(m);
    const std::vector<int> as = s.outcome_tuple(ms, outcome);
    std::string key;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (i > 0) key += ',';
        key += std::to_string(ms[i]);
    }
    key += '|';
    for (std::size_t i = 0; i < as.size(); ++i) {
        if (i > 0) key += ',';
        key += std::to_string(as[i]);
    }
    return key;
}

inline Json behavior_to_json(const Behavior& b) {
    const Scenario& s = b.scenario();
    Json j = scenario_to_json(s);
    Json probs = Json::object();
    for (std::size_t m = 0; m < s.joint_setting_count(); ++m) {
        const auto block = b.setting_block(m);
        for (std::size_t a = 0; a < block.size(); ++a) {
            if (block[a] != 0.0) probs[probability_key(s, m, a)] = block[a];
        }
    }
    j["probabilities"] = std::move(probs);
    return j;
}

// Parses a behavior file.  Entries absent from "probabilities" are zero.
// The parsed table is validated (normalization and non-negativity).
inline Behavior behavior_from_json(const Json& j) {
    const Scenario s = scenario_from_json(j);
    const Json& probs = detail::require_field(j, "probabilities");
    if (!probs.is_object()) {
        throw InvalidInputError("\"probabilities\" must be an object");
    }
    std::vector<double> flat(s.flat_dimension(), 0.0);
    for (const auto& [key, value] : probs.items()) {
        try {
            const std::string_view key_view(key);
            const std::size_t bar = key_view.find('|');
            if (bar == std::string_view::npos) {
                throw InvalidInputError("key must have the form \"settings|outcomes\"");
            }
            const std::vector<int> ms =
                detail::parse_index_list(key_view.substr(0, bar));
            const std::vector<int> as =
                detail::parse_index_list(key_view.substr(bar + 1));
            if (ms.size() != static_cast<std::size_t>(s.parties()) ||
                as.size() != static_cast<std::size_t>(s.parties())) {
                throw InvalidInputError(
                    "key must list one setting and one outcome per party");
            }
            const std::size_t m = s.setting_index(ms);
            const std::size_t a = s.outcome_index(ms, as);
            flat[s.flat_offset(m) + a] =
                detail::require_number(value, "probability value");
        } catch (const Error& e) {
            throw InvalidInputError("probabilities entry \"" + key +
                                    "\": " + e.what());
        }
    }
    Behavior b(s, std::move(flat));
    require_valid(b);
    return b;
}

// ---------------------------------------------------------------------------
// Bell functional
// ---------------------------------------------------------------------------

inline Json functional_to_json(const BellFunctional& f) {
    const Scenario& s = f.scenario();
    Json j;
    j["name"] = f.name();
    j["scenario"] = scenario_to_json(s);
    Json coeffs = Json::array();
    const auto& table = f.coefficients();
    for (std::size_t m = 0; m < table.size(); ++m) {
        const std::vector<int> mt = s.setting_tuple(m);
        for (const auto& [outcome, alpha] : table[m]) {
            Json entry;
            entry["m"] = mt;
            entry["a"] = s.outcome_tuple(mt, outcome);
            entry["alpha"] = alpha;
            coeffs.push_back(std::move(entry));
        }
    }
    j["coefficients"] = std::move(coeffs);
    if (f.declared_bound().has_value()) {
        j["classical_bound"] = *f.declared_bound();
    }
    return j;
}

struct LoadedFunctional {
    BellFunctional functional;
    std::vector<std::string> warnings;
};

// Parses a functional file.  When a declared classical bound is present and
// the scenario is small enough to enumerate, the bound is re-derived and a
// warning is recorded on disagreement (the declared value is kept).
inline LoadedFunctional functional_from_json(
    const Json& j, std::size_t vertex_cap = kDefaultVertexCap) {
    const Scenario s = scenario_from_json(detail::require_field(j, "scenario"));
    std::string name = "functional";
    if (const auto it = j.find("name"); it != j.end()) {
        if (!it->is_string()) {
            throw InvalidInputError("\"name\" must be a string");
        }
        name = it->get<std::string>();
    }
    std::optional<double> declared;
    if (const auto it = j.find("classical_bound"); it != j.end()) {
        declared = detail::require_number(*it, "\"classical_bound\"");
    }
    BellFunctional f(s, std::move(name), declared);
    const Json& coeffs = detail::require_field(j, "coefficients");
    if (!coeffs.is_array()) {
        throw InvalidInputError("\"coefficients\" must be an array");
    }
    for (const Json& entry : coeffs) {
        const Json& ms = detail::require_field(entry, "m");
        const Json& as = detail::require_field(entry, "a");
        const double alpha = detail::require_number(
            detail::require_field(entry, "alpha"), "coefficient \"alpha\"");
        if (!ms.is_array() || !as.is_array()) {
            throw InvalidInputError("coefficient \"m\" and \"a\" must be arrays");
        }
        std::vector<int> m_tuple;
        std::vector<int> a_tuple;
        for (const Json& v : ms) {
            m_tuple.push_back(detail::require_int(v, "coefficient setting"));
        }
        for (const Json& v : as) {
            a_tuple.push_back(detail::require_int(v, "coefficient outcome"));
        }
        if (m_tuple.size() != static_cast<std::size_t>(s.parties()) ||
            a_tuple.size() != static_cast<std::size_t>(s.parties())) {
            throw InvalidInputError(
                "coefficient \"m\" and \"a\" must list one entry per party");
        }
        f.set_coefficient(m_tuple, a_tuple, alpha);
    }
    LoadedFunctional out{std::move(f), {}};
    if (declared.has_value()) {
        if (s.vertex_count_capped(vertex_cap) > vertex_cap) {
            out.warnings.push_back(
                "declared classical bound not verified: deterministic strategy "
                "count exceeds the enumeration cap");
        } else {
            const double recomputed = classical_bound(out.functional, vertex_cap);
            if (std::abs(recomputed - *declared) > 1e-9) {
                out.warnings.push_back(
                    "declared classical bound " + detail::format_number(*declared) +
                    " differs from the enumerated value " +
                    detail::format_number(recomputed) +
                    "; keeping the declared value");
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quantum inputs
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat matrix_from_json(const Json& j, int dim, const std::string& what) {
    const std::size_t n = static_cast<std::size_t>(dim);
    if (!j.is_array() || j.size() != n) {
        throw InvalidInputError(what + " must be a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " matrix");
    }
    Mat m(dim, dim);
    for (std::size_t r = 0; r < n; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.size() != n) {
            throw InvalidInputError(what + " row " + std::to_string(r) +
                                    " must have " + std::to_string(dim) +
                                    " entries");
        }
        for (std::size_t c = 0; c < n; ++c) {
            const Json& cell = row[c];
            if (!cell.is_array() || cell.size() != 2) {
                throw InvalidInputError(what + " entries must be [re, im] pairs");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Cplx(detail::require_number(cell[0], what + " real part"),
                     detail::require_number(cell[1], what + " imaginary part"));
        }
    }
    return m;
}

struct QuantumInput {
    DensityMatrix state;
    MeasurementAssemblage assemblage;
};

inline Json quantum_input_to_json(const QuantumInput& input) {
    Json j;
    Json dims = Json::array();
    for (int i = 0; i < input.assemblage.parties(); ++i) {
        dims.push_back(input.assemblage.dim(i));
    }
    j["dimensions"] = std::move(dims);
    j["rho"] = matrix_to_json(input.state.rho);
    Json parties = Json::array();
    for (const auto& settings : input.assemblage.ops) {
        Json per_party = Json::array();
        for (const auto& outcomes : settings) {
            Json per_setting = Json::array();
            for (const Mat& op : outcomes) {
                per_setting.push_back(matrix_to_json(op));
            }
            per_party.push_back(std::move(per_setting));
        }
        parties.push_back(std::move(per_party));
    }
    j["assemblage"] = std::move(parties);
    return j;
}

inline QuantumInput quantum_input_from_json(const Json& j) {
    const Json& dims_json = detail::require_field(j, "dimensions");
    if (!dims_json.is_array() || dims_json.empty()) {
        throw InvalidInputError("\"dimensions\" must be a non-empty array");
    }
    std::vector<int> dims;
    std::size_t total = 1;
    for (const Json& d : dims_json) {
        const int dim = detail::require_int(d, "\"dimensions\" entry");
        if (dim < 2) {
            throw InvalidInputError("local dimensions must be at least 2");
        }
        dims.push_back(dim);
        if (total > static_cast<std::size_t>(kMaxTotalDimension) /
                        static_cast<std::size_t>(dim)) {
            throw CapacityError("total Hilbert-space dimension exceeds " +
                                std::to_string(kMaxTotalDimension));
        }
        total *= static_cast<std::size_t>(dim);
    }
    DensityMatrix state(matrix_from_json(detail::require_field(j, "rho"),
                                         static_cast<int>(total), "\"rho\""));
    const Json& asm_json = detail::require_field(j, "assemblage");
    if (!asm_json.is_array() || asm_json.size() != dims.size()) {
        throw InvalidInputError(
            "\"assemblage\" must list measurements for every party");
    }
    MeasurementAssemblage assemblage;
    assemblage.ops.resize(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const Json& settings = asm_json[i];
        if (!settings.is_array() || settings.empty()) {
            throw InvalidInputError("party " + std::to_string(i) +
                                    " must have at least one setting");
        }
        assemblage.ops[i].resize(settings.size());
        for (std::size_t m = 0; m < settings.size(); ++m) {
            const Json& outcomes = settings[m];
            if (!outcomes.is_array() || outcomes.size() < 2) {
                throw InvalidInputError("party " + std::to_string(i) + " setting " +
                                        std::to_string(m) +
                                        " must have at least two outcome operators");
            }
            for (std::size_t a = 0; a < outcomes.size(); ++a) {
                assemblage.ops[i][m].push_back(matrix_from_json(
                    outcomes[a], dims[i],
                    "assemblage operator (" + std::to_string(i) + "," +
                        std::to_string(m) + "," + std::to_string(a) + ")"));
            }
        }
    }
    assemblage.validate();
    return QuantumInput{std::move(state), std::move(assemblage)};
}

// ---------------------------------------------------------------------------
// Result reports
// ---------------------------------------------------------------------------

inline Json distance_result_to_json(const DistanceResult& r) {
    Json j;
    j["kind"] = divergence_name(r.kind);
    j["primal"] = detail::json_number(r.primal);
    j["certified_lower"] = detail::json_number(r.certified_lower);
    j["gap"] = detail::json_number(r.gap);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    Json weights = Json::object();
    for (const auto& [index, weight] : detail::sparse_weights(r.weights)) {
        weights[std::to_string(index)] = weight;
    }
    j["weights"] = std::move(weights);
    return j;
}

inline Json violation_report_to_json(const ViolationReport& r) {
    Json j;
    j["beta"] = r.beta;
    j["classical_bound"] = r.c_used;
    j["classical_bound_source"] = classical_bound_source_name(r.c_source);
    j["alpha"] = r.alpha;
    j["beta_alpha"] = r.beta_alpha;
    return j;
}

inline Json bound_report_to_json(const BoundReport& r) {
    Json j;
    j["method"] = bound_method_name(r.method);
    Json entries = Json::array();
    for (const BoundEntry& e : r.entries) {
        Json entry;
        entry["measure"] = measure_name(e.measure);
        entry["value"] = detail::json_number(e.value);
        if (!e.note.empty()) entry["note"] = e.note;
        entries.push_back(std::move(entry));
    }
    j["entries"] = std::move(entries);
    if (!r.notes.empty()) j["notes"] = r.notes;
    Json inputs = Json::object();
    if (r.input_tv.has_value()) {
        inputs["tv"] = distance_result_to_json(*r.input_tv);
    }
    if (r.input_kl.has_value()) {
        inputs["kl_bits"] = distance_result_to_json(*r.input_kl);
    }
    if (r.input_if.has_value()) {
        inputs["infidelity"] = distance_result_to_json(*r.input_if);
    }
    if (r.input_violation.has_value()) {
        inputs["violation"] = violation_report_to_json(*r.input_violation);
    }
    if (!inputs.empty()) j["inputs"] = std::move(inputs);
    return j;
}

inline std::string render_bound_report(const BoundReport& r) {
    std::ostringstream out;
    out << "entanglement bounds (" << bound_method_name(r.method) << ")\n";
    std::size_t width = 0;
    for (const BoundEntry& e : r.entries) {
        width = std::max(width, std::string(measure_name(e.measure)).size());
    }
    for (const BoundEntry& e : r.entries) {
        const std::string name = measure_name(e.measure);
        out << "  " << name << std::string(width - name.size(), ' ') << " >= "
            << detail::format_number(e.value);
        if (!e.note.empty()) out << "   [" << e.note << "]";
        out << "\n";
    }
    for (const std::string& note : r.notes) {
        out << "  note: " << note << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline Json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open file: " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidInputError("cannot parse " + path + ": " + e.what());
    }
}

}  // namespace bellbound
