// Subprocess battery for the command-line binary: every command, every exit
// code, golden output fragments, and byte-determinism of --json output.
// argv[1] is the path to the binary under test.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "bellbound/bellbound.hpp"

namespace bb = bellbound;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_command(const std::string& command) {
    RunResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

int g_checks = 0;
int g_failures = 0;

void expect(bool ok, const std::string& what, const RunResult& r) {
    ++g_checks;
    if (!ok) {
        ++g_failures;
        std::cout << "FAILED: " << what << "\n  exit code: " << r.exit_code
                  << "\n  output:\n"
                  << r.output << "\n";
    }
}

bool contains(const RunResult& r, const std::string& needle) {
    return r.output.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_driver <path-to-binary>\n";
        return 2;
    }
    const std::string cli = std::string("'") + argv[1] + "'";
    const std::filesystem::path tmp = "cli_driver_tmp";
    std::filesystem::create_directories(tmp);

    // ---- fixture files ---------------------------------------------------
    const std::string behavior_file = (tmp / "behavior.json").string();
    {
        std::ofstream out(behavior_file);
        out << bb::behavior_to_json(bb::tsirelson_behavior()).dump(2);
    }
    const std::string bad_behavior_file = (tmp / "bad_behavior.json").string();
    {
        bb::Json j = bb::behavior_to_json(bb::tsirelson_behavior());
        j["probabilities"]["0,0|0,0"] = 0.9;  // breaks normalization
        std::ofstream out(bad_behavior_file);
        out << j.dump(2);
    }
    const std::string functional_file = (tmp / "functional.json").string();
    {
        std::ofstream out(functional_file);
        out << bb::functional_to_json(bb::chsh()).dump(2);
    }
    const std::string flat_functional_file =
        (tmp / "flat_functional.json").string();
    {
        // Constant on every setting: the violation normalizer is undefined.
        bb::BellFunctional flat(bb::chsh_scenario(), "flat");
        for (std::size_t m = 0; m < 4; ++m) {
            for (std::size_t o = 0; o < 4; ++o) {
                flat.set_coefficient_by_index(m, o, 1.0);
            }
        }
        std::ofstream out(flat_functional_file);
        out << bb::functional_to_json(flat).dump(2);
    }
    const std::string big_functional_file =
        (tmp / "big_functional.json").string();
    {
        // 4^12 deterministic strategies: far over the enumeration cap.
        bb::BellFunctional big(bb::Scenario::homogeneous(12, 2, 2), "big");
        big.set_coefficient_by_index(0, 0, 1.0);
        std::ofstream out(big_functional_file);
        out << bb::functional_to_json(big).dump(2);
    }
    const std::string quantum_file = (tmp / "quantum.json").string();
    {
        bb::QuantumInput input{bb::bell_phi_plus(),
                               bb::chsh_optimal_assemblage()};
        std::ofstream out(quantum_file);
        out << bb::quantum_input_to_json(input).dump(2);
    }

    // ---- help and parse errors ------------------------------------------
    RunResult r = run_command(cli + " --help 2>&1");
    expect(r.exit_code == 0 && contains(r, "distance") && contains(r, "bound"),
           "--help exits 0 and lists subcommands", r);

    r = run_command(cli + " 2>&1");
    expect(r.exit_code == 2, "no subcommand exits 2", r);

    r = run_command(cli + " frobnicate 2>&1");
    expect(r.exit_code == 2, "unknown subcommand exits 2", r);

    r = run_command(cli + " bound --example chsh-tsirelson 2>&1");
    expect(r.exit_code == 2, "missing required --method exits 2", r);

    // ---- distance --------------------------------------------------------
    r = run_command(cli + " distance --example chsh-tsirelson --kind tv 2>&1");
    expect(r.exit_code == 0 && contains(r, "certified_lower: 0.103553391") &&
               contains(r, "converged: yes"),
           "exact distance at the quantum-optimal point", r);

    r = run_command(cli + " distance --example chsh-tsirelson --kind kl 2>&1");
    expect(r.exit_code == 0 && contains(r, "primal: 0.0462738"),
           "relative-entropy distance value", r);

    r = run_command(cli + " distance --example chsh-tsirelson --kind if 2>&1");
    expect(r.exit_code == 0 && contains(r, "primal: 0.130526"),
           "infidelity distance value", r);

    r = run_command(cli + " distance --behavior " + behavior_file +
                    " --kind tv 2>&1");
    expect(r.exit_code == 0 && contains(r, "certified_lower: 0.103553391"),
           "distance from a behavior file", r);

    r = run_command(cli + " distance --example chsh-correlated --alpha 0.3 "
                          "--kind tv --json 2>/dev/null");
    expect(r.exit_code == 0, "local example distance run", r);
    if (r.exit_code == 0) {
        const bb::Json j = bb::Json::parse(r.output);
        expect(j["primal"].get<double>() <= 1e-9,
               "local example projects to zero", r);
    }

    r = run_command(cli + " distance --example chsh-tsirelson --kind nonsense "
                          "2>&1");
    expect(r.exit_code == 2 && contains(r, "unknown divergence kind"),
           "bad divergence kind exits 2", r);

    r = run_command(cli + " distance --kind tv 2>&1");
    expect(r.exit_code == 2 && contains(r, "behavior is required"),
           "missing input behavior exits 2", r);

    r = run_command(cli + " distance --behavior " + behavior_file +
                    " --example chsh-tsirelson 2>&1");
    expect(r.exit_code == 2 && contains(r, "not both"),
           "behavior file and example together exit 2", r);

    r = run_command(cli + " distance --behavior " + bad_behavior_file +
                    " 2>&1");
    expect(r.exit_code == 2 && contains(r, "fails validation"),
           "invalid behavior file exits 2 with diagnostics", r);

    r = run_command(cli + " distance --behavior " + (tmp / "nope.json").string() +
                    " 2>&1");
    expect(r.exit_code == 2 && contains(r, "cannot open"),
           "missing behavior file exits 2", r);

    r = run_command(cli + " distance --example chsh-tsirelson --tol 0 2>&1");
    expect(r.exit_code == 2 && contains(r, "tolerance"),
           "non-positive tolerance exits 2", r);

    // ---- bound: the three methods ---------------------------------------
    r = run_command(cli + " bound --method theorem1 --example chsh-tsirelson "
                          "2>&1");
    expect(r.exit_code == 0 && contains(r, "entanglement bounds (theorem1)") &&
               contains(r, "E_Tr") && contains(r, ">= 0.103553391") &&
               contains(r, ">= 0.115515402"),
           "distance-based bound table", r);

    r = run_command(cli + " bound --method theorem2 --example chsh-tsirelson "
                          "2>&1");
    expect(r.exit_code == 0 && contains(r, "entanglement bounds (theorem2)") &&
               contains(r, ">= 0.103553391") && contains(r, ">= 0.030940917") &&
               contains(r, ">= 0.146446609") && contains(r, ">= 0.0107233047"),
           "violation-based bound table", r);

    r = run_command(cli + " bound --method theorem2 --example chsh-tsirelson "
                          "--c-override 1.41421356237 2>&1");
    expect(r.exit_code == 0 && contains(r, ">= 0.176776") &&
               contains(r, "published reference value 0.125"),
           "threshold override with its discrepancy note", r);

    r = run_command(cli + " bound --method theorem2 --example mabk --n 5 2>&1");
    expect(r.exit_code == 0 && contains(r, ">= 0.375"),
           "violation-based bound for the five-party example", r);

    r = run_command(cli + " bound --method theorem2 --example yu-oh --d 2 "
                          "2>&1");
    expect(r.exit_code == 0 && contains(r, ">= 0.25"),
           "violation-based bound for the unbalanced-outcome example", r);

    r = run_command(cli + " bound --method chsh-refined --beta 2.5 2>&1");
    expect(r.exit_code == 0 && contains(r, ">= 0.603553391") &&
               contains(r, ">= 0.101338707") &&
               contains(r, "direct two-qubit concurrence estimate"),
           "refined bound from an explicit game value", r);

    r = run_command(cli + " bound --method chsh-refined --example "
                          "chsh-tsirelson --json 2>/dev/null");
    expect(r.exit_code == 0, "refined bound from a behavior", r);
    if (r.exit_code == 0) {
        const bb::Json j = bb::Json::parse(r.output);
        double e_c = -1.0;
        double e_g = -1.0;
        for (const bb::Json& entry : j["entries"]) {
            if (entry["measure"] == "E_C") e_c = entry["value"].get<double>();
            if (entry["measure"] == "E_G") e_g = entry["value"].get<double>();
        }
        expect(std::abs(e_c - 1.0) <= 1e-6 && std::abs(e_g - 0.5) <= 1e-6,
               "refined bound saturates at the quantum-optimal behavior", r);
    }

    r = run_command(cli + " bound --method chsh-refined --beta 3.0 2>&1");
    expect(r.exit_code == 2 && contains(r, "maximal quantum value"),
           "game value above the quantum maximum exits 2", r);

    r = run_command(cli + " bound --method theorem1 --example chsh-tsirelson "
                          "--c-override 2.0 2>&1");
    expect(r.exit_code == 2 && contains(r, "--c-override"),
           "threshold override outside theorem2 exits 2", r);

    r = run_command(cli + " bound --method nonsense --example chsh-tsirelson "
                          "2>&1");
    expect(r.exit_code == 2 && contains(r, "unknown method"),
           "unknown method exits 2", r);

    // ---- bell-value and classical-bound ----------------------------------
    r = run_command(cli + " bell-value --example mabk --n 5 2>&1");
    expect(r.exit_code == 0 && contains(r, "beta: 16") &&
               contains(r, "normalized_violation: 0.375"),
           "functional evaluation for the five-party example", r);

    r = run_command(cli + " bell-value --behavior " + behavior_file +
                    " --functional " + functional_file + " 2>&1");
    expect(r.exit_code == 0 && contains(r, "beta: 2.82842712") &&
               contains(r, "(declared)"),
           "functional evaluation from files", r);

    r = run_command(cli + " bell-value --example chsh-tsirelson --functional " +
                    flat_functional_file + " 2>&1");
    expect(r.exit_code == 3 && contains(r, "normalizer undefined"),
           "constant functional exits 3", r);

    r = run_command(cli + " classical-bound --example yu-oh --d 3 2>&1");
    expect(r.exit_code == 0 && contains(r, "enumerated classical bound: 0"),
           "classical bound of the unbalanced-outcome family", r);

    r = run_command(cli + " classical-bound --functional " + big_functional_file +
                    " 2>&1");
    expect(r.exit_code == 4 && contains(r, "exceeds"),
           "over-cap enumeration exits 4", r);

    // ---- vertices --------------------------------------------------------
    r = run_command(cli + " vertices --example chsh-tsirelson 2>&1");
    expect(r.exit_code == 0 && contains(r, "deterministic strategies: 16"),
           "vertex count of the two-setting scenario", r);

    r = run_command(cli + " vertices --example chsh-tsirelson --list --limit 3 "
                          "2>&1");
    expect(r.exit_code == 0 && contains(r, "vertex 0:") &&
               contains(r, "... 13 more"),
           "vertex listing respects the limit", r);

    r = run_command(cli + " vertices --functional " + functional_file +
                    " --json 2>/dev/null");
    expect(r.exit_code == 0, "vertex JSON output", r);
    if (r.exit_code == 0) {
        const bb::Json j = bb::Json::parse(r.output);
        expect(j["count"] == 16, "vertex JSON count field", r);
    }

    // ---- behavior-from-quantum -------------------------------------------
    r = run_command(cli + " behavior-from-quantum --state " + quantum_file +
                    " 2>/dev/null");
    expect(r.exit_code == 0, "quantum conversion succeeds", r);
    if (r.exit_code == 0) {
        const bb::Behavior parsed =
            bb::behavior_from_json(bb::Json::parse(r.output));
        const bb::Behavior expected = bb::tsirelson_behavior();
        double worst = 0.0;
        for (std::size_t i = 0; i < parsed.flat().size(); ++i) {
            worst = std::max(worst,
                             std::abs(parsed.flat()[i] - expected.flat()[i]));
        }
        expect(worst <= 1e-10, "quantum conversion matches the closed form", r);
    }

    r = run_command(cli + " behavior-from-quantum --state " +
                    (tmp / "nope.json").string() + " 2>&1");
    expect(r.exit_code == 2, "missing quantum input exits 2", r);

    // ---- reproduce -------------------------------------------------------
    r = run_command(cli + " reproduce 2>&1");
    expect(r.exit_code == 0 && contains(r, "3 flagged") &&
               contains(r, "0 mismatch"),
           "reference replay passes with the known flags", r);

    r = run_command(cli + " reproduce --strict 2>&1");
    expect(r.exit_code == 1, "strict replay fails on the known flags", r);

    // ---- environment validation ------------------------------------------
    r = run_command("env BELLBOUND_THREADS=abc " + cli +
                    " distance --example chsh-tsirelson 2>&1");
    expect(r.exit_code == 2 && contains(r, "BELLBOUND_THREADS"),
           "non-numeric thread count exits 2", r);

    r = run_command("env BELLBOUND_THREADS=0 " + cli +
                    " distance --example chsh-tsirelson 2>&1");
    expect(r.exit_code == 2, "zero thread count exits 2", r);

    r = run_command("env BELLBOUND_THREADS=4 " + cli +
                    " distance --example chsh-tsirelson --kind tv 2>&1");
    expect(r.exit_code == 0 && contains(r, "certified_lower: 0.103553391"),
           "valid thread count is accepted", r);

    // ---- determinism ------------------------------------------------------
    const RunResult json_a =
        run_command(cli + " reproduce --json 2>/dev/null");
    const RunResult json_b =
        run_command(cli + " reproduce --json 2>/dev/null");
    expect(json_a.exit_code == 0 && json_a.output == json_b.output &&
               !json_a.output.empty(),
           "reference replay JSON is byte-deterministic", json_b);

    const RunResult dist_a = run_command(
        cli + " distance --example chsh-tsirelson --kind kl --json "
              "2>/dev/null");
    const RunResult dist_b = run_command(
        cli + " distance --example chsh-tsirelson --kind kl --json "
              "2>/dev/null");
    expect(dist_a.exit_code == 0 && dist_a.output == dist_b.output &&
               !dist_a.output.empty(),
           "distance JSON is byte-deterministic", dist_b);

    const RunResult bound_json = run_command(
        cli + " bound --method theorem1 --example chsh-tsirelson --json "
              "2>/dev/null");
    expect(bound_json.exit_code == 0, "bound JSON output", bound_json);
    if (bound_json.exit_code == 0) {
        const bb::Json j = bb::Json::parse(bound_json.output);
        expect(j["method"] == "theorem1" && j["inputs"].contains("tv") &&
                   j["inputs"].contains("kl_bits") &&
                   j["inputs"].contains("infidelity"),
               "bound JSON embeds its distance inputs", bound_json);
    }

    std::filesystem::remove_all(tmp);
    if (g_failures == 0) {
        std::cout << "cli driver: all " << g_checks << " checks passed\n";
        return 0;
    }
    std::cout << "cli driver: " << g_failures << " of " << g_checks
              << " checks FAILED\n";
    return 1;
}
