// Command-line surface: distances to the local polytope, entanglement
// bounds, inequality evaluation, vertex enumeration, quantum-to-behavior
// conversion, and the published-value regression tables.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bellbound/bellbound.hpp"

namespace bb = bellbound;

namespace {

// The computation kernels are deterministic and single-threaded; the
// variable is still validated so misconfigured environments fail loudly.
void validate_threads_env() {
    const char* raw = std::getenv("BELLBOUND_THREADS");
    if (raw == nullptr) return;
    int value = 0;
    const std::string text(raw);
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
        throw bb::InvalidInputError(
            "BELLBOUND_THREADS must be a positive integer, got \"" + text +
            "\"");
    }
}

struct ExampleOptions {
    std::string name;
    int n = 3;           // party count for the multipartite example
    int d = 3;           // outcome parameter for the many-outcome example
    double alpha = 0.5;  // correlator for the symmetric two-setting example
    std::uint64_t seed = 1;
    std::size_t support = 6;  // vertex support of the random local example
};

void add_example_flags(CLI::App* cmd, ExampleOptions& ex) {
    cmd->add_option("--example", ex.name,
                    "built-in input: chsh-tsirelson, chsh-correlated, mabk, "
                    "yu-oh, random-local");
    cmd->add_option("--n", ex.n, "party count for --example mabk (odd, >= 3)");
    cmd->add_option("--d", ex.d, "outcome parameter for --example yu-oh (>= 2)");
    cmd->add_option("--alpha", ex.alpha,
                    "correlator for --example chsh-correlated");
    cmd->add_option("--seed", ex.seed, "seed for --example random-local");
    cmd->add_option("--support", ex.support,
                    "vertex support size for --example random-local");
}

bb::Behavior example_behavior(const ExampleOptions& ex) {
    if (ex.name == "chsh-tsirelson") return bb::tsirelson_behavior();
    if (ex.name == "chsh-correlated") return bb::correlated_behavior(ex.alpha);
    if (ex.name == "mabk") return bb::ghz_mabk_behavior(ex.n);
    if (ex.name == "yu-oh") return bb::yu_oh_witness_behavior(ex.d);
    if (ex.name == "random-local") {
        return bb::random_local_behavior(bb::chsh_scenario(), ex.seed,
                                         ex.support)
            .behavior;
    }
    throw bb::InvalidInputError(
        "unknown example \"" + ex.name +
        "\"; expected chsh-tsirelson, chsh-correlated, mabk, yu-oh, or "
        "random-local");
}

bb::BellFunctional example_functional(const ExampleOptions& ex) {
    if (ex.name == "chsh-tsirelson" || ex.name == "chsh-correlated" ||
        ex.name == "random-local") {
        return bb::chsh();
    }
    if (ex.name == "mabk") return bb::mabk(ex.n);
    if (ex.name == "yu-oh") return bb::yu_oh(ex.d);
    throw bb::InvalidInputError(
        "unknown example \"" + ex.name +
        "\"; expected chsh-tsirelson, chsh-correlated, mabk, yu-oh, or "
        "random-local");
}

bb::Behavior load_behavior(const std::string& behavior_path,
                           const ExampleOptions& ex) {
    if (!behavior_path.empty() && !ex.name.empty()) {
        throw bb::InvalidInputError(
            "pass either --behavior or --example, not both");
    }
    if (!behavior_path.empty()) {
        return bb::behavior_from_json(bb::parse_json_file(behavior_path));
    }
    if (!ex.name.empty()) return example_behavior(ex);
    throw bb::InvalidInputError("an input behavior is required: pass "
                                "--behavior FILE or --example NAME");
}

bb::BellFunctional load_functional(const std::string& functional_path,
                                   const ExampleOptions& ex) {
    if (!functional_path.empty()) {
        bb::LoadedFunctional loaded =
            bb::functional_from_json(bb::parse_json_file(functional_path));
        for (const std::string& w : loaded.warnings) {
            std::cerr << "warning: " << w << "\n";
        }
        return std::move(loaded.functional);
    }
    if (!ex.name.empty()) return example_functional(ex);
    throw bb::InvalidInputError("a functional is required: pass "
                                "--functional FILE or --example NAME");
}

bb::DivergenceKind parse_kind(const std::string& kind) {
    if (kind == "tv") return bb::DivergenceKind::tv;
    if (kind == "kl") return bb::DivergenceKind::kl_bits;
    if (kind == "if") return bb::DivergenceKind::infidelity;
    throw bb::InvalidInputError("unknown divergence kind \"" + kind +
                                "\"; expected tv, kl, or if");
}

void print_json(const bb::Json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_distance(const std::string& behavior_path, const ExampleOptions& ex,
                 const std::string& kind_name, double tol, bool json) {
    const bb::Behavior behavior = load_behavior(behavior_path, ex);
    bb::DistanceOptions opt;
    opt.tol = tol;
    const bb::DistanceResult result =
        bb::distance_to_local(behavior, parse_kind(kind_name), opt);
    if (json) {
        print_json(bb::distance_result_to_json(result));
        return 0;
    }
    std::cout << "kind: " << bb::divergence_name(result.kind) << "\n"
              << "primal: " << bb::detail::format_number(result.primal) << "\n"
              << "certified_lower: "
              << bb::detail::format_number(result.certified_lower) << "\n"
              << "gap: " << bb::detail::format_number(result.gap) << "\n"
              << "iterations: " << result.iterations << "\n"
              << "converged: " << (result.converged ? "yes" : "no") << "\n"
              << "support: " << bb::detail::sparse_weights(result.weights).size()
              << " vertices\n";
    return 0;
}

int cmd_bound(const std::string& behavior_path, const ExampleOptions& ex,
              const std::string& method, const std::string& functional_path,
              std::optional<double> c_override, std::optional<double> beta_opt,
              double tol, bool json) {
    if (c_override.has_value() && method != "theorem2") {
        throw bb::InvalidInputError(
            "--c-override applies only to --method theorem2");
    }
    bb::BoundReport report;
    if (method == "theorem1") {
        const bb::Behavior behavior = load_behavior(behavior_path, ex);
        bb::DistanceOptions opt;
        opt.tol = tol;
        const bb::DistanceResult tv =
            bb::distance_to_local(behavior, bb::DivergenceKind::tv, opt);
        const bb::DistanceResult kl =
            bb::distance_to_local(behavior, bb::DivergenceKind::kl_bits, opt);
        const bb::DistanceResult inf =
            bb::distance_to_local(behavior, bb::DivergenceKind::infidelity, opt);
        report = bb::distance_based_bounds(tv, kl, inf);
    } else if (method == "theorem2") {
        const bb::Behavior behavior = load_behavior(behavior_path, ex);
        const bb::BellFunctional functional =
            load_functional(functional_path, ex);
        const bb::ViolationReport violation =
            bb::normalized_violation(functional, behavior, c_override);
        report = bb::violation_based_bounds(violation);
        if (functional.name() == "chsh" && c_override.has_value() &&
            std::abs(*c_override - std::sqrt(2.0)) <= 1e-6) {
            report.notes.push_back(
                "computed E_Tr differs from the published reference value "
                "0.125 for this configuration; see `reproduce` section C");
        }
    } else if (method == "chsh-refined") {
        double beta = 0.0;
        if (beta_opt.has_value()) {
            beta = *beta_opt;
        } else {
            const bb::Behavior behavior = load_behavior(behavior_path, ex);
            if (behavior.scenario() != bb::chsh_scenario()) {
                throw bb::InvalidInputError(
                    "--method chsh-refined needs the two-party two-setting "
                    "two-outcome scenario (or an explicit --beta)");
            }
            beta = bb::evaluate(bb::chsh(), behavior);
        }
        const bb::ChshRefinedBounds refined = bb::chsh_refined_bounds(beta);
        report.method = bb::BoundMethod::chsh_refined;
        report.entries.push_back(
            {bb::MeasureKind::concurrence, refined.concurrence, ""});
        report.entries.push_back(
            {bb::MeasureKind::geometric, refined.geometric, ""});
        if (beta > 2.0) {
            report.notes.push_back(
                "direct two-qubit concurrence estimate sqrt(beta^2 - 4)/2 = " +
                bb::detail::format_number(bb::two_qubit_concurrence_bound(beta)));
        }
        report.input_violation = bb::ViolationReport{beta, 2.0, 8.0,
                                                     std::max(0.0, (beta - 2.0) / 8.0),
                                                     bb::ClassicalBoundSource::declared};
    } else {
        throw bb::InvalidInputError(
            "unknown method \"" + method +
            "\"; expected theorem1, theorem2, or chsh-refined");
    }
    if (json) {
        print_json(bb::bound_report_to_json(report));
    } else {
        std::cout << bb::render_bound_report(report);
    }
    return 0;
}

int cmd_bell_value(const std::string& behavior_path, const ExampleOptions& ex,
                   const std::string& functional_path,
                   std::optional<double> c_override, bool json) {
    const bb::Behavior behavior = load_behavior(behavior_path, ex);
    const bb::BellFunctional functional = load_functional(functional_path, ex);
    const bb::ViolationReport report =
        bb::normalized_violation(functional, behavior, c_override);
    if (json) {
        bb::Json j = bb::violation_report_to_json(report);
        j["functional"] = functional.name();
        print_json(j);
        return 0;
    }
    std::cout << "functional: " << functional.name() << "\n"
              << "beta: " << bb::detail::format_number(report.beta) << "\n"
              << "classical_bound: " << bb::detail::format_number(report.c_used)
              << " (" << bb::classical_bound_source_name(report.c_source)
              << ")\n"
              << "alpha: " << bb::detail::format_number(report.alpha) << "\n"
              << "normalized_violation: "
              << bb::detail::format_number(report.beta_alpha) << "\n";
    return 0;
}

int cmd_classical_bound(const std::string& functional_path,
                        const ExampleOptions& ex, bool json) {
    const bb::BellFunctional functional = load_functional(functional_path, ex);
    const double enumerated = bb::classical_bound(functional);
    if (json) {
        bb::Json j;
        j["functional"] = functional.name();
        j["enumerated"] = enumerated;
        if (functional.declared_bound().has_value()) {
            j["declared"] = *functional.declared_bound();
        }
        print_json(j);
        return 0;
    }
    std::cout << "functional: " << functional.name() << "\n"
              << "enumerated classical bound: "
              << bb::detail::format_number(enumerated) << "\n";
    if (functional.declared_bound().has_value()) {
        std::cout << "declared classical bound: "
                  << bb::detail::format_number(*functional.declared_bound())
                  << "\n";
    }
    return 0;
}

int cmd_vertices(const std::string& behavior_path, const ExampleOptions& ex,
                 const std::string& functional_path, bool list,
                 std::size_t limit, bool json) {
    bb::Scenario scenario = [&]() {
        if (!functional_path.empty()) {
            return load_functional(functional_path, ex).scenario();
        }
        return load_behavior(behavior_path, ex).scenario();
    }();
    const bb::VertexSet vertices(scenario);
    if (json) {
        bb::Json j;
        j["scenario"] = bb::scenario_to_json(scenario);
        j["count"] = vertices.size();
        if (list) {
            bb::Json all = bb::Json::array();
            for (std::size_t v = 0; v < vertices.size() && v < limit; ++v) {
                all.push_back(vertices.strategy(v).choice);
            }
            j["strategies"] = std::move(all);
        }
        print_json(j);
        return 0;
    }
    std::cout << "parties: " << scenario.parties() << "\n"
              << "deterministic strategies: " << vertices.size() << "\n";
    if (list) {
        for (std::size_t v = 0; v < vertices.size() && v < limit; ++v) {
            const bb::DeterministicStrategy st = vertices.strategy(v);
            std::cout << "  vertex " << v << ":";
            for (int i = 0; i < scenario.parties(); ++i) {
                std::cout << " party" << i << "=(";
                for (int m = 0; m < scenario.settings(i); ++m) {
                    if (m > 0) std::cout << ",";
                    std::cout << st.choice[i][m];
                }
                std::cout << ")";
            }
            std::cout << "\n";
        }
        if (vertices.size() > limit) {
            std::cout << "  ... " << vertices.size() - limit << " more\n";
        }
    }
    return 0;
}

int cmd_behavior_from_quantum(const std::string& state_path) {
    const bb::QuantumInput input =
        bb::quantum_input_from_json(bb::parse_json_file(state_path));
    const bb::Behavior behavior = bb::behavior_from_quantum(
        input.state, input.assemblage, input.assemblage.scenario());
    print_json(bb::behavior_to_json(behavior));
    return 0;
}

int cmd_reproduce(bool strict, bool json) {
    const bb::ReproduceReport report = bb::run_reproduce();
    if (json) {
        bb::Json j;
        bb::Json rows = bb::Json::array();
        for (const bb::ReproduceRow& r : report.rows) {
            bb::Json row;
            row["section"] = r.section;
            row["label"] = r.label;
            row["computed"] = bb::detail::json_number(r.computed);
            row["published"] = r.published;
            row["tolerance"] = r.tolerance;
            row["status"] = bb::row_status_name(r.status);
            if (!r.note.empty()) row["note"] = r.note;
            rows.push_back(std::move(row));
        }
        j["rows"] = std::move(rows);
        j["pass"] = report.count(bb::RowStatus::pass);
        j["flagged"] = report.count(bb::RowStatus::flagged);
        j["mismatch"] = report.count(bb::RowStatus::mismatch);
        print_json(j);
    } else {
        std::cout << bb::render_reproduce(report);
    }
    return report.exit_code(strict);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"device-independent entanglement bounds from Bell "
                 "correlations"};
    app.require_subcommand(1);

    std::string behavior_path, functional_path, state_path;
    std::string kind_name = "tv";
    std::string method;
    double tol = 1e-7;
    std::optional<double> c_override, beta_opt;
    bool json = false, strict = false, list = false;
    std::size_t limit = 64;
    ExampleOptions ex;

    CLI::App* distance =
        app.add_subcommand("distance", "divergence from a behavior to the "
                                       "local polytope, with a certificate");
    distance->add_option("--behavior", behavior_path, "behavior JSON file");
    add_example_flags(distance, ex);
    distance->add_option("--kind", kind_name, "divergence: tv, kl, or if");
    distance->add_option("--tol", tol, "duality-gap stopping tolerance");
    distance->add_flag("--json", json, "machine-readable output");

    CLI::App* bound =
        app.add_subcommand("bound", "entanglement lower bounds from a "
                                    "behavior or a violation");
    bound->add_option("--behavior", behavior_path, "behavior JSON file");
    add_example_flags(bound, ex);
    bound->add_option("--method", method,
                      "theorem1 (distance based), theorem2 (violation "
                      "based), or chsh-refined")
        ->required();
    bound->add_option("--functional", functional_path,
                      "functional JSON file (theorem2)");
    bound->add_option("--c-override", c_override,
                      "override the separable threshold (theorem2)");
    bound->add_option("--beta", beta_opt, "game value (chsh-refined)");
    bound->add_option("--tol", tol, "distance tolerance (theorem1)");
    bound->add_flag("--json", json, "machine-readable output");

    CLI::App* bell_value =
        app.add_subcommand("bell-value", "evaluate a functional on a "
                                         "behavior and normalize");
    bell_value->add_option("--behavior", behavior_path, "behavior JSON file");
    add_example_flags(bell_value, ex);
    bell_value->add_option("--functional", functional_path,
                           "functional JSON file");
    bell_value->add_option("--c-override", c_override,
                           "override the separable threshold");
    bell_value->add_flag("--json", json, "machine-readable output");

    CLI::App* classical =
        app.add_subcommand("classical-bound", "enumerate deterministic "
                                              "strategies for the exact "
                                              "classical bound");
    classical->add_option("--functional", functional_path,
                          "functional JSON file");
    add_example_flags(classical, ex);
    classical->add_flag("--json", json, "machine-readable output");

    CLI::App* vertices =
        app.add_subcommand("vertices", "deterministic strategies of a "
                                       "scenario");
    vertices->add_option("--behavior", behavior_path, "behavior JSON file");
    vertices->add_option("--functional", functional_path,
                         "functional JSON file");
    add_example_flags(vertices, ex);
    vertices->add_flag("--list", list, "print individual strategies");
    vertices->add_option("--limit", limit, "maximum strategies to print");
    vertices->add_flag("--json", json, "machine-readable output");

    CLI::App* from_quantum = app.add_subcommand(
        "behavior-from-quantum",
        "behavior of a density matrix under a measurement assemblage");
    from_quantum
        ->add_option("--state", state_path, "state + assemblage JSON file")
        ->required();

    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "recompute the published reference tables");
    reproduce->add_flag("--strict", strict,
                        "fail on the known flagged discrepancies too");
    reproduce->add_flag("--json", json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return static_cast<int>(bb::ErrorCode::invalid_input);
    }

    try {
        validate_threads_env();
        if (distance->parsed()) {
            return cmd_distance(behavior_path, ex, kind_name, tol, json);
        }
        if (bound->parsed()) {
            return cmd_bound(behavior_path, ex, method, functional_path,
                             c_override, beta_opt, tol, json);
        }
        if (bell_value->parsed()) {
            return cmd_bell_value(behavior_path, ex, functional_path,
                                  c_override, json);
        }
        if (classical->parsed()) {
            return cmd_classical_bound(functional_path, ex, json);
        }
        if (vertices->parsed()) {
            return cmd_vertices(behavior_path, ex, functional_path, list,
                                limit, json);
        }
        if (from_quantum->parsed()) {
            return cmd_behavior_from_quantum(state_path);
        }
        if (reproduce->parsed()) {
            return cmd_reproduce(strict, json);
        }
        throw bb::InvalidInputError("no command given");
    } catch (const bb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
