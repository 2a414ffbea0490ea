// Command-line front end. Exit codes are a stable contract:
//   10 = SAT, 20 = UNSAT, 30 = method failure / counterexample persisted,
//   1 = usage or I/O error, 0 = report-only commands.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ci3sat/demo.hpp"
#include "ci3sat/harness.hpp"
#include "ci3sat/oracle.hpp"
#include "ci3sat/version.hpp"

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitMethodFailure = 30;
constexpr int kExitError = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ci3sat::Formula load_formula(const std::string& path, std::size_t* dupes = nullptr) {
    const ci3sat::ParsedCnf parsed = ci3sat::parse_dimacs(read_file(path));
    if (dupes) *dupes = parsed.duplicates_dropped;
    if (parsed.duplicates_dropped > 0)
        std::cerr << "warning: dropped " << parsed.duplicates_dropped
                  << " duplicate clause(s)\n";
    return parsed.formula;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// "LO:HI" or a single value.
template <typename T>
std::pair<T, T> parse_range(const std::string& text) {
    const auto colon = text.find(':');
    std::istringstream lo(text.substr(0, colon));
    T a{};
    if (!(lo >> a)) throw std::runtime_error("bad range '" + text + "'");
    if (colon == std::string::npos) return {a, a};
    std::istringstream hi(text.substr(colon + 1));
    T b{};
    if (!(hi >> b)) throw std::runtime_error("bad range '" + text + "'");
    return {a, b};
}

int cmd_solve(const std::string& path, bool robust, const std::string& json_out,
              bool show_trace) {
    const ci3sat::Formula f = load_formula(path);
    const ci3sat::MethodResult mr = ci3sat::solve_with_method(f, robust);

    if (!json_out.empty()) write_text(json_out, mr.to_json().dump(2) + "\n");

    switch (mr.status) {
        case ci3sat::MethodStatus::SatExtracted:
            if (show_trace)
                for (const auto& rec : mr.trace) {
                    std::cout << "c choice var=" << rec.var << " polarity="
                              << (rec.positive ? '+' : '-') << " basis="
                              << ci3sat::basis_name(rec.basis);
                    if (rec.basis == ci3sat::ChoiceRecord::Basis::Row)
                        std::cout << " row=" << rec.row.i << ',' << rec.row.j << ','
                                  << rec.row.k;
                    if (rec.retried) std::cout << " retried";
                    std::cout << '\n';
                }
            std::cout << ci3sat::dimacs_model_line(*mr.assignment) << '\n';
            return kExitSat;
        case ci3sat::MethodStatus::UnsatEmpty:
            std::cout << "UNSAT\n";
            return kExitUnsat;
        case ci3sat::MethodStatus::ExtractionFailed:
            std::cout << "METHOD FAILURE: "
                      << ci3sat::failure_kind_name(mr.failure->kind) << '\n';
            std::cerr << mr.failure->detail << '\n';
            return kExitMethodFailure;
    }
    return kExitError;
}

int cmd_oracle(const std::string& path, bool enumerate) {
    const ci3sat::Formula f = load_formula(path);
    if (enumerate) {
        const auto sols = ci3sat::enumerate_solutions(f);
        for (const auto& a : sols) std::cout << ci3sat::dimacs_model_line(a) << '\n';
        if (sols.empty()) {
            std::cout << "UNSAT\n";
            return kExitUnsat;
        }
        std::cout << "c models " << sols.size() << '\n';
        return kExitSat;
    }
    const auto model = ci3sat::brute_solve(f);
    if (!model) {
        std::cout << "UNSAT\n";
        return kExitUnsat;
    }
    std::cout << ci3sat::dimacs_model_line(*model) << '\n';
    return kExitSat;
}

int cmd_fuzz(const ci3sat::DiffConfig& cfg, const std::string& json_out) {
    const ci3sat::RunReport rep = ci3sat::differential_run(cfg);
    const std::string json = rep.to_json().dump(2) + "\n";
    if (!cfg.outdir.empty()) {
        std::filesystem::create_directories(cfg.outdir);
        write_text((std::filesystem::path(cfg.outdir) / "report.json").string(), json);
    }
    if (!json_out.empty()) write_text(json_out, json);

    for (const auto& [outcome, count] : rep.tallies)
        std::cout << ci3sat::outcome_name(outcome) << ": " << count << '\n';
    std::cout << "audited: " << rep.audited << " (coincidence " << rep.coincidence_pass
              << ", coverage " << rep.coverage_pass << ", maximality "
              << rep.maximality_pass << ")\n";
    std::cout << "bundles: " << rep.bundled_ids.size() << '\n';
    return rep.bundled_ids.empty() ? 0 : kExitMethodFailure;
}

int cmd_example() {
    const ci3sat::Formula f = ci3sat::demo_formula();
    const ci3sat::Structure s0 = ci3sat::build_ci3sat(f);
    const int before = ci3sat::count_aclausole(s0);
    const ci3sat::SaturateResult sat = ci3sat::saturate(s0);
    const int after = ci3sat::count_aclausole(sat.structure);
    std::cout << "aclausole: " << before << " -> " << after << '\n';

    const ci3sat::Formula largest = ci3sat::largest_equivalent_3sat(sat.structure);
    std::cout << "max3sat clauses: " << largest.clauses.size() << '\n';

    const ci3sat::MethodResult mr = ci3sat::solve_with_method(f);
    std::cout << "model: "
              << (mr.assignment ? mr.assignment->str() : std::string("-")) << '\n';

    const ci3sat::AuditReport audit = ci3sat::audit_structure(f, sat.structure);
    std::cout << "triads: " << audit.coincidence_rhs
              << (audit.coincidence_pass() ? " == " : " != ")
              << "aclausole: " << audit.coincidence_lhs << '\n';
    return 0;
}

int cmd_audit(const std::string& path) {
    const ci3sat::Formula f = load_formula(path);
    const ci3sat::SaturateResult sat = ci3sat::saturate(ci3sat::build_ci3sat(f));
    const ci3sat::AuditReport rep = ci3sat::audit_structure(f, sat.structure);
    std::cout << rep.to_json().dump(2) << '\n';
    return rep.all_pass() ? 0 : kExitMethodFailure;
}

int cmd_scaling(const std::vector<int>& ns, double density, int reps,
                std::uint64_t seed, const std::string& csv_out) {
    const auto rows = ci3sat::scaling_report({ns, density, reps, seed});
    const std::string csv = ci3sat::scaling_csv(rows);
    std::cout << csv;
    if (!csv_out.empty()) write_text(csv_out, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3SAT decision method with a differential verification harness"};
    app.set_version_flag("--version", std::string(ci3sat::kToolVersion));
    app.require_subcommand(1);

    std::string path, json_out, outdir = "fuzz-out", csv_out;
    bool robust = false, show_trace = false, enumerate = false;
    std::uint64_t seed = 0;
    int count = 100;
    std::string vars_range = "4:6", density_range = "4.0";
    std::vector<int> scaling_ns{4, 6, 8, 10, 12};
    double scaling_density = 4.0;
    int scaling_reps = 3;

    auto* solve = app.add_subcommand("solve", "decide a DIMACS CNF file with the method");
    solve->add_option("path", path, "strict 3SAT DIMACS file")->required();
    solve->add_flag("--robust", robust, "validate each extraction choice by imposition");
    solve->add_option("--json", json_out, "write the result as JSON to this path");
    solve->add_flag("--trace", show_trace, "print the extraction choice trace");

    auto* oracle = app.add_subcommand("oracle", "exhaustive brute-force reference");
    oracle->add_option("path", path, "strict 3SAT DIMACS file")->required();
    oracle->add_flag("--enumerate", enumerate, "list every model");

    auto* fuzz = app.add_subcommand("fuzz", "seeded differential run against the oracle");
    fuzz->add_option("--seed", seed, "campaign seed");
    fuzz->add_option("--count", count, "number of instances");
    fuzz->add_option("--vars", vars_range, "variable range LO:HI (LO >= 4)");
    fuzz->add_option("--density", density_range, "clause density m/n range LO:HI");
    fuzz->add_flag("--robust", robust, "use robust extraction");
    fuzz->add_option("--outdir", outdir, "report and counterexample directory");
    fuzz->add_option("--json", json_out, "also write the report JSON here");

    auto* example = app.add_subcommand("example", "run the bundled 4-variable instance");

    auto* audit = app.add_subcommand("audit", "saturate a file and audit the structure");
    audit->add_option("path", path, "strict 3SAT DIMACS file")->required();

    auto* scaling = app.add_subcommand("scaling", "per-n step-count table");
    scaling->add_option("--n", scaling_ns, "variable counts")->delimiter(',');
    scaling->add_option("--density", scaling_density, "clause density m/n");
    scaling->add_option("--reps", scaling_reps, "instances per n");
    scaling->add_option("--seed", seed, "seed");
    scaling->add_option("--csv", csv_out, "also write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (solve->parsed()) return cmd_solve(path, robust, json_out, show_trace);
        if (oracle->parsed()) return cmd_oracle(path, enumerate);
        if (fuzz->parsed()) {
            ci3sat::DiffConfig cfg;
            cfg.seed = seed;
            cfg.count = count;
            std::tie(cfg.n_lo, cfg.n_hi) = parse_range<int>(vars_range);
            std::tie(cfg.density_lo, cfg.density_hi) = parse_range<double>(density_range);
            cfg.robust = robust;
            cfg.outdir = outdir;
            return cmd_fuzz(cfg, json_out);
        }
        if (example->parsed()) return cmd_example();
        if (audit->parsed()) return cmd_audit(path);
        if (scaling->parsed())
            return cmd_scaling(scaling_ns, scaling_density, scaling_reps, seed, csv_out);
    } catch (const ci3sat::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
