// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ci3sat/demo.hpp"
#include "ci3sat/harness.hpp"
#include "test_support.hpp"

using namespace ci3sat;
namespace fs = std::filesystem;

namespace {

struct Check {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& msg) {
        if (!ok) failures.push_back(msg);
    }
};

const fs::path kScratch = "acceptance-scratch";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CI3SAT_CLI_PATH) + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Snapshot of every regular file under a directory, path -> bytes.
std::map<std::string, std::string> snapshot_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            out[fs::relative(entry.path(), dir).string()] = slurp(entry.path());
    return out;
}

// The shared 200-instance corpus: n in [4,7], m uniform over the full clause
// universe.
const std::vector<Formula>& corpus200() {
    static const std::vector<Formula> c = test_support::corpus_full_range(200, 2026, 4, 7);
    return c;
}

DiffConfig campaign_config() {
    DiffConfig cfg;
    cfg.seed = 20260810;
    cfg.count = 10000;
    cfg.n_lo = 4;
    cfg.n_hi = 10;
    cfg.density_lo = 3.5;
    cfg.density_hi = 5.5;
    cfg.robust = false;
    cfg.outdir = (kScratch / "campaign").string();
    return cfg;
}

std::optional<RunReport> g_campaign;

// --- criteria -------------------------------------------------------------

void criterion1(Check& c) {
    const Formula f = demo_formula();
    const Structure s0 = build_ci3sat(f);
    c.require(count_aclausole(s0) == 20, "initial structure must hold 20 patterns");

    const SaturateResult sat = saturate(s0);
    c.require(count_aclausole(sat.structure) == 7, "saturation must keep 7 patterns");
    Structure expected(4, 0);
    expected.set_row_mask(0, 0x0C);
    expected.set_row_mask(1, 0x08);
    expected.set_row_mask(2, 0x0A);
    expected.set_row_mask(3, 0xA0);
    c.require(sat.structure == expected, "saturation fixpoint differs from the pinned rows");

    c.require(largest_equivalent_3sat(sat.structure).clauses.size() == 25,
              "equivalent maximal formula must have 25 clauses");

    const MethodResult mr = solve_with_method(f);
    c.require(mr.status == MethodStatus::SatExtracted, "method must extract a model");
    if (mr.assignment) {
        const std::string model = mr.assignment->str();
        c.require(model == "FTTT" || model == "FTFT",
                  "model must be FTTT or FTFT, got " + model);
        c.require(evaluate(f, *mr.assignment), "model must satisfy the formula");
    }

    const AuditReport audit = audit_structure(f, sat.structure);
    c.require(audit.coincidence_lhs == 7 && audit.coincidence_rhs == 7 && audit.all_pass(),
              "audit must report 7 == 7 and pass");
}

void criterion2(Check& c) {
    for (std::size_t i = 0; i < corpus200().size(); ++i) {
        const Formula& f = corpus200()[i];
        if (solutions_of_structure(build_ci3sat(f)) != enumerate_solutions(f)) {
            c.require(false, "solution sets differ on corpus instance " + std::to_string(i));
            return;
        }
    }
}

void criterion3(Check& c) {
    for (std::size_t i = 0; i < corpus200().size(); ++i) {
        const Formula& f = corpus200()[i];
        const Structure s = build_ci3sat(f);
        const auto base = solutions_of_structure(s);

        for (int v = 1; v <= f.n; ++v)
            for (const bool pol : {true, false}) {
                std::vector<Assignment> expected;
                for (const Assignment& a : base)
                    if (a.value(v) == pol) expected.push_back(a);
                if (solutions_of_structure(impose(s, {v, pol}).structure) != expected) {
                    c.require(false,
                              "imposition filter broken on instance " + std::to_string(i));
                    return;
                }
            }

        if (solutions_of_structure(reduce(s).structure) != base) {
            c.require(false, "reduction changed solutions on instance " + std::to_string(i));
            return;
        }
        if (solutions_of_structure(saturate(s).structure) != base) {
            c.require(false, "saturation changed solutions on instance " + std::to_string(i));
            return;
        }
    }
}

void criterion4(Check& c) {
    for (std::size_t i = 0; i < corpus200().size(); ++i) {
        const ReduceResult r = reduce(build_ci3sat(corpus200()[i]));
        if (!r.emptied && !check_polarity_consistency(r.structure).empty())
            c.require(false, "polarity census violation after reduce on instance " +
                                 std::to_string(i));
        const SaturateResult s = saturate(build_ci3sat(corpus200()[i]));
        if (!is_empty(s.structure).empty &&
            !check_polarity_consistency(s.structure).empty())
            c.require(false, "polarity census violation after saturate on instance " +
                                 std::to_string(i));
    }
}

void criterion5(Check& c) {
    int collected = 0;
    for (int i = 0; collected < 50 && i < 400; ++i) {
        detail::SplitMix64 rng{detail::mix_seed(505, static_cast<std::uint64_t>(i))};
        const int n = 5 + static_cast<int>(rng.below(3));
        const double density = 2.5 + 2.0 * rng.unit();
        const int m = static_cast<int>(std::llround(density * n));
        const Formula f = generate_instance({rng.next(), n, m});
        const Structure sat = saturate(build_ci3sat(f)).structure;
        if (is_empty(sat).empty) continue;
        ++collected;

        std::vector<int> vars;
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                for (int cc = b + 1; cc <= n; ++cc) {
                    vars = {a, b, cc};
                    Structure sub = extract_substructure(sat, vars);
                    if (saturate(sub).structure != sub) {
                        c.require(false, "3-variable substructure not a fixpoint");
                        return;
                    }
                    for (int d = cc + 1; d <= n; ++d) {
                        vars = {a, b, cc, d};
                        sub = extract_substructure(sat, vars);
                        if (saturate(sub).structure != sub) {
                            c.require(false, "4-variable substructure not a fixpoint");
                            return;
                        }
                    }
                }
    }
    c.require(collected == 50,
              "collected only " + std::to_string(collected) + " saturated structures");
}

void criterion6(Check& c) {
    c.require(g_campaign.has_value(), "campaign report missing");
    if (g_campaign)
        c.require(g_campaign->tallies.at(Outcome::SoundnessViolation) == 0,
                  "soundness violations observed in fuzzing");
}

void criterion7(Check& c, double campaign_seconds) {
    c.require(g_campaign.has_value(), "campaign did not run");
    if (!g_campaign) return;
    const RunReport& rep = *g_campaign;

    c.require(campaign_seconds < 1800.0, "campaign exceeded 30 minutes");
    long long sum = 0;
    for (const auto& [outcome, count] : rep.tallies) sum += count;
    c.require(sum == rep.config.count, "not every instance was classified");
    c.require(rep.tallies.at(Outcome::Unverified) == 0,
              "instances within the oracle guard must be verified");

    for (const long long id : rep.bundled_ids) {
        const fs::path dir = fs::path(rep.config.outdir) / detail::instance_dir_name(id);
        for (const char* name :
             {"formula.cnf", "structure.dump", "trace.json", "outcome.json"})
            c.require(fs::exists(dir / name),
                      "bundle " + std::to_string(id) + " misses " + name);
        const auto outcome = nlohmann::json::parse(slurp(dir / "outcome.json"));
        c.require(outcome.at("oracle_confirmed").get<bool>(),
                  "bundle " + std::to_string(id) + " lacks double oracle confirmation");
        c.require(replay_bundle(dir).matches,
                  "bundle " + std::to_string(id) + " does not replay to its outcome");
    }
}

void criterion8(Check& c) {
    c.require(g_campaign.has_value(), "campaign report missing");
    if (g_campaign) {
        const RunReport& rep = *g_campaign;
        const long long agreeing =
            rep.tallies.at(Outcome::AgreeSat) + rep.tallies.at(Outcome::AgreeUnsat);
        c.require(rep.audited == agreeing,
                  "every agreeing verified instance must be audited");
        for (const long long id : rep.audit_fail_ids)
            c.require(std::find(rep.bundled_ids.begin(), rep.bundled_ids.end(), id) !=
                          rep.bundled_ids.end(),
                      "audit failure " + std::to_string(id) + " not bundled");
    }

    const Formula demo = demo_formula();
    const AuditReport demo_audit =
        audit_structure(demo, saturate(build_ci3sat(demo)).structure);
    c.require(demo_audit.coincidence_lhs == 7 && demo_audit.coincidence_rhs == 7 &&
                  demo_audit.all_pass(),
              "demo audit must pass 7 == 7");

    const Formula empty{4, {}};
    const AuditReport empty_audit =
        audit_structure(empty, saturate(build_ci3sat(empty)).structure);
    c.require(empty_audit.coincidence_lhs == 32 && empty_audit.coincidence_rhs == 32 &&
                  empty_audit.all_pass(),
              "empty-formula audit must pass 32 == 32");
}

void criterion9(Check& c) {
    // scaling_report throws when a deletion or pass bound breaks.
    std::vector<ScalingRow> rows;
    try {
        rows = scaling_report({{4, 6, 8, 10, 12, 14, 16}, 4.0, 3, 5});
    } catch (const std::exception& e) {
        c.require(false, std::string("bound violation: ") + e.what());
        return;
    }
    c.require(rows.size() == 7, "scaling table incomplete");

    const std::string csv = scaling_csv(rows);
    std::ofstream(kScratch / "scaling.csv", std::ios::binary) << csv;
    c.require(csv.rfind("n,instances,", 0) == 0, "CSV header missing");
    c.require(std::count(csv.begin(), csv.end(), '\n') == 8, "CSV row count wrong");

    if (g_campaign) {
        const long long universe10 = 8ll * triad_count(10);
        c.require(g_campaign->deletions.max <= universe10,
                  "campaign deletions exceed the universe bound");
        c.require(g_campaign->passes.max <= universe10 + 1,
                  "campaign passes exceed the universe bound");
    }
}

void criterion10(Check& c) {
    // Library level: an identical campaign config reruns byte-identically,
    // bundles included.
    c.require(g_campaign.has_value(), "campaign report missing");
    if (g_campaign) {
        const auto first_bundles = snapshot_tree(g_campaign->config.outdir);
        const RunReport again = differential_run(campaign_config());
        c.require(again.to_json().dump(2) == g_campaign->to_json().dump(2),
                  "campaign report not byte-identical on rerun");
        c.require(snapshot_tree(again.config.outdir) == first_bundles,
                  "campaign bundles not byte-identical on rerun");
    }

    // Command level: solve --json, fuzz report, scaling CSV.
    const fs::path dir = kScratch / "determinism";
    fs::create_directories(dir);
    std::ofstream(dir / "demo.cnf", std::ios::binary) << write_dimacs(demo_formula());

    const std::string solve_args = "solve " + (dir / "demo.cnf").string() + " --json " +
                                   (dir / "solve.json").string();
    c.require(run_cli(solve_args) == 10, "solve exit code");
    const std::string solve_a = slurp(dir / "solve.json");
    run_cli(solve_args);
    c.require(slurp(dir / "solve.json") == solve_a, "solve --json not byte-identical");

    const std::string fuzz_args = "fuzz --seed 31 --count 100 --vars 4:7 --density "
                                  "3.5:5.5 --outdir " +
                                  (dir / "fuzz").string();
    run_cli(fuzz_args);
    const std::string fuzz_a = slurp(dir / "fuzz" / "report.json");
    const auto fuzz_tree_a = snapshot_tree(dir / "fuzz");
    run_cli(fuzz_args);
    c.require(slurp(dir / "fuzz" / "report.json") == fuzz_a,
              "fuzz report not byte-identical");
    c.require(snapshot_tree(dir / "fuzz") == fuzz_tree_a, "fuzz artifacts differ on rerun");

    const std::string scaling_args = "scaling --n 4,6,8 --reps 2 --seed 9 --csv " +
                                     (dir / "scaling.csv").string();
    run_cli(scaling_args);
    const std::string scaling_a = slurp(dir / "scaling.csv");
    run_cli(scaling_args);
    c.require(slurp(dir / "scaling.csv") == scaling_a, "scaling CSV not byte-identical");
}

}  // namespace

int main() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);

    struct Result {
        int id;
        std::string name;
        double seconds = 0.0;
        Check check;
    };
    std::vector<Result> results;

    const auto timed = [&](int id, const std::string& name, std::optional<double> budget,
                           const std::function<void(Check&)>& fn) {
        Result r{id, name, 0.0, {}};
        const auto start = std::chrono::steady_clock::now();
        try {
            fn(r.check);
        } catch (const std::exception& e) {
            r.check.require(false, std::string("exception: ") + e.what());
        }
        r.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (budget && r.seconds >= *budget)
            r.check.require(false, "runtime budget exceeded");
        results.push_back(std::move(r));
    };

    timed(1, "demo-instance exact reproduction", 1.0, criterion1);
    timed(2, "structure/oracle solution-set equivalence", 30.0, criterion2);
    timed(3, "solution preservation under impose/reduce/saturate", 300.0, criterion3);
    timed(4, "polarity census after reduction fixpoints", std::nullopt, criterion4);
    timed(5, "substructures of saturation fixpoints stay fixpoints", std::nullopt,
          criterion5);

    double campaign_seconds = 0.0;
    {
        const auto start = std::chrono::steady_clock::now();
        try {
            g_campaign = differential_run(campaign_config());
        } catch (const std::exception& e) {
            std::fprintf(stderr, "campaign failed: %s\n", e.what());
        }
        campaign_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    timed(6, "zero soundness violations across fuzzing", std::nullopt, criterion6);
    timed(7, "10k-instance differential campaign", std::nullopt,
          [&](Check& c) { criterion7(c, campaign_seconds); });
    results.back().seconds = campaign_seconds;
    timed(8, "coincidence audit coverage and exact cases", std::nullopt, criterion8);
    timed(9, "step-count bounds and scaling table", 600.0, criterion9);
    timed(10, "byte-identical reports and bundles on rerun", std::nullopt, criterion10);

    int failed = 0;
    for (const Result& r : results) {
        const bool ok = r.check.failures.empty();
        if (!ok) ++failed;
        std::printf("criterion %2d (%s): %s (%.2fs)\n", r.id, r.name.c_str(),
                    ok ? "PASS" : "FAIL", r.seconds);
        for (const std::string& f : r.check.failures) std::printf("    - %s\n", f.c_str());
    }
    std::printf("%d/10 criteria passed\n", 10 - failed);
    return failed;
}
