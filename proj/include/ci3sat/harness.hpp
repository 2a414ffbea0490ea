#pragma once

// Differential harness: seeded instance generation, the end-to-end decision
// pipeline, classification against the exhaustive oracle, counterexample
// bundles, and step-count scaling tables. Everything is deterministic given
// the configuration; outcomes that disagree with the oracle are re-verified
// by a second oracle pass and persisted before the run finishes.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ci3sat/cnf.hpp"
#include "ci3sat/extraction.hpp"
#include "ci3sat/oracle.hpp"
#include "ci3sat/saturation.hpp"
#include "ci3sat/structure.hpp"
#include "ci3sat/version.hpp"

namespace ci3sat {

// Generator identity recorded in every report and bundle: uniform selection
// without replacement via partial Fisher-Yates over the clause universe,
// driven by splitmix64.
inline constexpr std::string_view kGeneratorName = "uwr-fy-splitmix64-v1";

namespace detail {

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Bounded draw as the high 64 bits of next() * bound, written as a
    // portable 32-bit-limb multiply; pinned for reproducibility across
    // platforms.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t x = next();
        const std::uint64_t x_lo = x & 0xFFFFFFFFull, x_hi = x >> 32;
        const std::uint64_t b_lo = bound & 0xFFFFFFFFull, b_hi = bound >> 32;
        const std::uint64_t mid = x_hi * b_lo + ((x_lo * b_lo) >> 32);
        const std::uint64_t mid2 = x_lo * b_hi + (mid & 0xFFFFFFFFull);
        return x_hi * b_hi + (mid >> 32) + (mid2 >> 32);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    SplitMix64 rng{seed + 0x9E3779B97F4A7C15ull * (salt + 1)};
    return rng.next();
}

}  // namespace detail

struct InstanceSpec {
    std::uint64_t seed = 0;
    int n = 0;
    int m = 0;

    friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

// m distinct canonical clauses drawn uniformly without replacement from the
// 8*C(n,3) universe. Same spec, same formula, byte for byte.
inline Formula generate_instance(const InstanceSpec& spec) {
    if (spec.n < 4) throw std::invalid_argument("instance generation needs n >= 4");
    const long long universe = 8ll * triad_count(spec.n);
    if (spec.m < 0 || spec.m > universe)
        throw std::invalid_argument("clause count exceeds the clause universe");

    std::vector<std::int32_t> ids(static_cast<std::size_t>(universe));
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int32_t>(i);
    detail::SplitMix64 rng{spec.seed};
    for (int i = 0; i < spec.m; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) +
            static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(universe - i)));
        std::swap(ids[static_cast<std::size_t>(i)], ids[j]);
    }
    ids.resize(static_cast<std::size_t>(spec.m));
    std::sort(ids.begin(), ids.end());

    const auto& idx = detail::TriadIndex::get(spec.n);
    std::vector<Clause3> clauses;
    clauses.reserve(ids.size());
    for (const std::int32_t id : ids) {
        const Triad& t = idx.triads[static_cast<std::size_t>(id / 8)];
        const int bits = 7 - id % 8;  // universe index ascends in canonical clause order
        clauses.emplace_back(Literal{t.i, (bits & 4) != 0}, Literal{t.j, (bits & 2) != 0},
                             Literal{t.k, (bits & 1) != 0});
    }
    return make_formula(spec.n, std::move(clauses));
}

enum class MethodStatus { UnsatEmpty, SatExtracted, ExtractionFailed };

inline std::string_view method_status_name(MethodStatus s) {
    switch (s) {
        case MethodStatus::UnsatEmpty: return "UNSAT_EMPTY";
        case MethodStatus::SatExtracted: return "SAT_EXTRACTED";
        case MethodStatus::ExtractionFailed: return "EXTRACTION_FAILED";
    }
    return "?";
}

struct MethodResult {
    MethodStatus status = MethodStatus::UnsatEmpty;
    std::optional<Assignment> assignment;  // present and verified for SAT_EXTRACTED
    SaturationStats stats;
    int saturated_aclausole = 0;
    bool oracle_delegated = false;  // n < 4 inputs are decided by the oracle
    bool robust = false;
    Structure saturated;
    ChoiceTrace trace;
    FlipVector flips;
    std::optional<ExtractionFailure> failure;

    nlohmann::json to_json() const;
};

namespace detail {

inline nlohmann::json to_json(const SaturationStats& st) {
    return {{"passes", st.passes},
            {"tests_run", st.tests_run},
            {"aclausole_deleted", st.aclausole_deleted},
            {"reduce_calls", st.reduce_calls},
            {"impose_calls", st.impose_calls}};
}

inline nlohmann::json to_json(const ChoiceTrace& trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ChoiceRecord& r : trace) {
        nlohmann::json rec{{"variable", r.var},
                           {"basis", std::string(basis_name(r.basis))},
                           {"positive", r.positive},
                           {"retried", r.retried},
                           {"mode", r.robust ? "robust" : "faithful"}};
        if (r.basis == ChoiceRecord::Basis::Row)
            rec["row"] = {r.row.i, r.row.j, r.row.k};
        arr.push_back(std::move(rec));
    }
    return arr;
}

inline nlohmann::json to_json(const FlipVector& fv) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < fv.flipped.size(); ++i)
        if (fv.flipped[i]) arr.push_back(static_cast<int>(i + 1));
    return arr;
}

inline nlohmann::json to_json(const ExtractionFailure& e) {
    return {{"kind", std::string(failure_kind_name(e.kind))},
            {"claim", std::string(failure_claim(e.kind))},
            {"detail", e.detail},
            {"trace", to_json(e.trace)},
            {"flips", to_json(e.flips)},
            {"snapshot", dump_structure(e.snapshot)}};
}

}  // namespace detail

inline nlohmann::json MethodResult::to_json() const {
    nlohmann::json j{{"status", std::string(method_status_name(status))},
                     {"saturated_aclausole", saturated_aclausole},
                     {"oracle_delegated", oracle_delegated},
                     {"robust", robust},
                     {"stats", detail::to_json(stats)}};
    if (assignment) {
        j["assignment"] = assignment->str();
        j["model"] = dimacs_model_line(*assignment);
    }
    if (!trace.empty() || status == MethodStatus::SatExtracted)
        j["trace"] = detail::to_json(trace);
    if (failure) j["failure"] = detail::to_json(*failure);
    return j;
}

// Full pipeline: complement-invert build, saturation, then either the empty
// verdict or constructive extraction. Inputs with n < 4 are decided by the
// brute-force oracle and tagged, since extraction assumes at least four
// variables.
inline MethodResult solve_with_method(const Formula& f, bool robust = false) {
    MethodResult res;
    res.robust = robust;
    res.flips = FlipVector(f.n);

    if (f.n < 4) {
        res.oracle_delegated = true;
        SaturateResult sat = saturate(build_ci3sat(f));
        res.stats = sat.stats;
        res.saturated = std::move(sat.structure);
        res.saturated_aclausole = count_aclausole(res.saturated);
        auto model = brute_solve(f);
        if (model) {
            res.status = MethodStatus::SatExtracted;
            res.assignment = std::move(*model);
        } else {
            res.status = MethodStatus::UnsatEmpty;
        }
        return res;
    }

    SaturateResult sat = saturate(build_ci3sat(f));
    res.stats = sat.stats;
    res.saturated = std::move(sat.structure);
    res.saturated_aclausole = count_aclausole(res.saturated);

    if (is_empty(res.saturated).empty) {
        res.status = MethodStatus::UnsatEmpty;
        return res;
    }

    ExtractionResult ext = extract_assignment(res.saturated, f, robust, &res.stats);
    if (auto* ok = std::get_if<ExtractionSuccess>(&ext)) {
        res.status = MethodStatus::SatExtracted;
        res.assignment = std::move(ok->assignment);
        res.trace = std::move(ok->trace);
        res.flips = std::move(ok->flips);
    } else {
        res.status = MethodStatus::ExtractionFailed;
        res.failure = std::move(std::get<ExtractionFailure>(ext));
        res.trace = res.failure->trace;
        res.flips = res.failure->flips;
    }
    return res;
}

enum class Outcome {
    AgreeSat,
    AgreeUnsat,
    SoundnessViolation,
    CompletenessCounterexample,
    ExtractionCounterexample,
    Unverified,
};

inline std::string_view outcome_name(Outcome o) {
    switch (o) {
        case Outcome::AgreeSat: return "AGREE_SAT";
        case Outcome::AgreeUnsat: return "AGREE_UNSAT";
        case Outcome::SoundnessViolation: return "SOUNDNESS_VIOLATION";
        case Outcome::CompletenessCounterexample: return "COMPLETENESS_COUNTEREXAMPLE";
        case Outcome::ExtractionCounterexample: return "EXTRACTION_COUNTEREXAMPLE";
        case Outcome::Unverified: return "UNVERIFIED";
    }
    return "?";
}

enum class OracleVerdict { Sat, Unsat, Skipped };

// Pure classification table. An empty-structure verdict against a satisfiable
// oracle is a soundness alarm (a solution-preservation bug, not a discovery);
// extraction failures split by oracle verdict into completeness versus
// extraction counterexamples.
inline Outcome classify(const MethodResult& mr, OracleVerdict oracle) {
    if (oracle == OracleVerdict::Skipped) return Outcome::Unverified;
    switch (mr.status) {
        case MethodStatus::SatExtracted:
            return oracle == OracleVerdict::Sat ? Outcome::AgreeSat
                                                : Outcome::SoundnessViolation;
        case MethodStatus::UnsatEmpty:
            return oracle == OracleVerdict::Unsat ? Outcome::AgreeUnsat
                                                  : Outcome::SoundnessViolation;
        case MethodStatus::ExtractionFailed:
            return oracle == OracleVerdict::Unsat ? Outcome::CompletenessCounterexample
                                                  : Outcome::ExtractionCounterexample;
    }
    return Outcome::Unverified;
}

struct DiffConfig {
    std::uint64_t seed = 0;
    int count = 0;
    int n_lo = 4;
    int n_hi = 6;
    double density_lo = 4.0;
    double density_hi = 4.0;
    bool robust = false;
    std::string outdir;
    int oracle_guard = 20;

    nlohmann::json to_json() const {
        return {{"seed", seed},
                {"count", count},
                {"n_lo", n_lo},
                {"n_hi", n_hi},
                {"density_lo", density_lo},
                {"density_hi", density_hi},
                {"robust", robust},
                {"outdir", outdir},
                {"oracle_guard", oracle_guard}};
    }
};

struct CounterAggregate {
    long long total = 0;
    long long max = 0;

    void add(long long v) {
        total += v;
        if (v > max) max = v;
    }
    nlohmann::json to_json(long long count) const {
        return {{"total", total},
                {"max", max},
                {"mean", count ? static_cast<double>(total) / static_cast<double>(count) : 0.0}};
    }
};

struct RunReport {
    DiffConfig config;
    std::map<Outcome, long long> tallies;
    long long audited = 0;
    long long coincidence_pass = 0;
    long long coverage_pass = 0;
    long long maximality_pass = 0;
    std::vector<long long> audit_fail_ids;
    std::vector<long long> bundled_ids;
    CounterAggregate impose_calls, reduce_calls, deletions, passes, tests_run;

    bool all_agree() const {
        return tallies.at(Outcome::SoundnessViolation) == 0 &&
               tallies.at(Outcome::CompletenessCounterexample) == 0 &&
               tallies.at(Outcome::ExtractionCounterexample) == 0 &&
               audit_fail_ids.empty();
    }

    nlohmann::json to_json() const {
        nlohmann::json t;
        for (const auto& [o, c] : tallies) t[std::string(outcome_name(o))] = c;
        const long long count = config.count;
        return {{"config", config.to_json()},
                {"generator", std::string(kGeneratorName)},
                {"tool_version", std::string(kToolVersion)},
                {"tallies", t},
                {"audit",
                 {{"audited", audited},
                  {"coincidence_pass", coincidence_pass},
                  {"coverage_pass", coverage_pass},
                  {"maximality_pass", maximality_pass},
                  {"fail_ids", audit_fail_ids}}},
                {"counters",
                 {{"impose_calls", impose_calls.to_json(count)},
                  {"reduce_calls", reduce_calls.to_json(count)},
                  {"deletions", deletions.to_json(count)},
                  {"passes", passes.to_json(count)},
                  {"tests_run", tests_run.to_json(count)}}},
                {"bundled_ids", bundled_ids}};
    }
};

namespace detail {

inline std::string instance_dir_name(long long id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06lld", id);
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out.flush())
        throw std::runtime_error("write failed for " + path.string());
}

// Self-sufficient reproduction bundle for one instance.
inline void write_bundle(const std::filesystem::path& dir, long long id,
                         const InstanceSpec& spec, const Formula& f,
                         const MethodResult& mr, Outcome outcome,
                         OracleVerdict oracle, bool oracle_confirmed,
                         const AuditReport* audit) {
    std::filesystem::create_directories(dir);
    write_file(dir / "formula.cnf", write_dimacs(f));
    write_file(dir / "structure.dump", dump_structure(mr.saturated));

    nlohmann::json trace{{"choices", to_json(mr.trace)}, {"flips", to_json(mr.flips)}};
    if (mr.failure) trace["failure"] = to_json(*mr.failure);
    write_file(dir / "trace.json", trace.dump(2) + "\n");

    nlohmann::json out{{"id", id},
                       {"spec", {{"seed", spec.seed}, {"n", spec.n}, {"m", spec.m}}},
                       {"robust", mr.robust},
                       {"outcome", std::string(outcome_name(outcome))},
                       {"oracle", oracle == OracleVerdict::Sat     ? "SAT"
                                  : oracle == OracleVerdict::Unsat ? "UNSAT"
                                                                   : "SKIPPED"},
                       {"oracle_confirmed", oracle_confirmed},
                       {"method", mr.to_json()},
                       {"generator", std::string(kGeneratorName)},
                       {"tool_version", std::string(kToolVersion)}};
    if (audit) out["audit"] = audit->to_json();
    write_file(dir / "outcome.json", out.dump(2) + "\n");
}

}  // namespace detail

// Derives the i-th instance of a differential configuration. Exposed so
// bundles can be replayed from their spec alone.
inline InstanceSpec instance_spec_of(const DiffConfig& cfg, long long index) {
    detail::SplitMix64 rng{detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(index))};
    const int n = cfg.n_lo + static_cast<int>(rng.below(
                                 static_cast<std::uint64_t>(cfg.n_hi - cfg.n_lo + 1)));
    const double density = cfg.density_lo + (cfg.density_hi - cfg.density_lo) * rng.unit();
    const long long universe = 8ll * triad_count(n);
    long long m = std::llround(density * n);
    if (m < 0) m = 0;
    if (m > universe) m = universe;
    return InstanceSpec{rng.next(), n, static_cast<int>(m)};
}

// Runs `count` seeded instances through the method and the oracle,
// classifies each, audits agreeing verified instances, and persists a bundle
// for every disagreement or audit failure after a confirming second oracle
// pass. Deterministic given the config.
inline RunReport differential_run(const DiffConfig& cfg) {
    if (cfg.count < 0) throw std::invalid_argument("count must be >= 0");
    if (cfg.count > 0 && cfg.outdir.empty())
        throw std::invalid_argument("outdir required: disagreements must be persistable");
    if (cfg.n_lo < 4 || cfg.n_hi < cfg.n_lo)
        throw std::invalid_argument("variable range must satisfy 4 <= lo <= hi");
    if (cfg.density_lo < 0 || cfg.density_hi < cfg.density_lo)
        throw std::invalid_argument("density range must satisfy 0 <= lo <= hi");

    RunReport rep;
    rep.config = cfg;
    for (const Outcome o :
         {Outcome::AgreeSat, Outcome::AgreeUnsat, Outcome::SoundnessViolation,
          Outcome::CompletenessCounterexample, Outcome::ExtractionCounterexample,
          Outcome::Unverified})
        rep.tallies[o] = 0;

    for (long long i = 0; i < cfg.count; ++i) {
        const InstanceSpec spec = instance_spec_of(cfg, i);
        const Formula f = generate_instance(spec);

        MethodResult mr = solve_with_method(f, cfg.robust);
        if (mr.status == MethodStatus::SatExtracted && !evaluate(f, *mr.assignment)) {
            // Unreachable (extraction verifies); reclassifies rather than trusts.
            mr.status = MethodStatus::ExtractionFailed;
            mr.failure = ExtractionFailure{FailureKind::VerificationFailed,
                                           "post-hoc verification failed",
                                           mr.trace,
                                           mr.flips,
                                           mr.saturated};
        }

        OracleVerdict verdict = OracleVerdict::Skipped;
        std::vector<Assignment> solutions;
        if (f.n <= cfg.oracle_guard) {
            solutions = enumerate_solutions(f, cfg.oracle_guard);
            verdict = solutions.empty() ? OracleVerdict::Unsat : OracleVerdict::Sat;
        }

        const Outcome outcome = classify(mr, verdict);
        ++rep.tallies[outcome];

        rep.impose_calls.add(mr.stats.impose_calls);
        rep.reduce_calls.add(mr.stats.reduce_calls);
        rep.deletions.add(mr.stats.aclausole_deleted);
        rep.passes.add(mr.stats.passes);
        rep.tests_run.add(mr.stats.tests_run);

        const AuditReport* audit_for_bundle = nullptr;
        AuditReport audit;
        bool audit_failed = false;
        if (outcome == Outcome::AgreeSat || outcome == Outcome::AgreeUnsat) {
            audit = audit_structure(f, mr.saturated, cfg.oracle_guard);
            ++rep.audited;
            if (audit.coincidence_pass()) ++rep.coincidence_pass;
            if (audit.coverage_pass()) ++rep.coverage_pass;
            if (audit.maximality_pass()) ++rep.maximality_pass;
            if (!audit.all_pass()) {
                audit_failed = true;
                audit_for_bundle = &audit;
                rep.audit_fail_ids.push_back(i);
            }
        }

        const bool disagreement = outcome == Outcome::SoundnessViolation ||
                                  outcome == Outcome::CompletenessCounterexample ||
                                  outcome == Outcome::ExtractionCounterexample;
        if (disagreement || audit_failed) {
            bool confirmed = true;
            if (verdict != OracleVerdict::Skipped) {
                const auto second = brute_solve_descending(f, 26);
                confirmed = second.has_value() == (verdict == OracleVerdict::Sat);
            }
            detail::write_bundle(std::filesystem::path(cfg.outdir) /
                                     detail::instance_dir_name(i),
                                 i, spec, f, mr, outcome, verdict, confirmed,
                                 audit_for_bundle);
            rep.bundled_ids.push_back(i);
        }
    }
    return rep;
}

// Re-runs a persisted bundle from its formula file and reports whether the
// recorded outcome reproduces.
struct ReplayResult {
    Outcome recorded = Outcome::Unverified;
    Outcome recomputed = Outcome::Unverified;
    bool matches = false;
};

inline ReplayResult replay_bundle(const std::filesystem::path& dir, int oracle_guard = 20) {
    std::ifstream in(dir / "outcome.json");
    if (!in) throw std::runtime_error("cannot read " + (dir / "outcome.json").string());
    const nlohmann::json recorded = nlohmann::json::parse(in);

    std::ifstream cnf(dir / "formula.cnf");
    if (!cnf) throw std::runtime_error("cannot read " + (dir / "formula.cnf").string());
    std::string text((std::istreambuf_iterator<char>(cnf)),
                     std::istreambuf_iterator<char>());
    const Formula f = parse_dimacs(text).formula;

    const MethodResult mr = solve_with_method(f, recorded.at("robust").get<bool>());
    OracleVerdict verdict = OracleVerdict::Skipped;
    if (f.n <= oracle_guard)
        verdict = enumerate_solutions(f, oracle_guard).empty() ? OracleVerdict::Unsat
                                                               : OracleVerdict::Sat;
    ReplayResult r;
    r.recomputed = classify(mr, verdict);
    const std::string name = recorded.at("outcome").get<std::string>();
    for (const Outcome o :
         {Outcome::AgreeSat, Outcome::AgreeUnsat, Outcome::SoundnessViolation,
          Outcome::CompletenessCounterexample, Outcome::ExtractionCounterexample,
          Outcome::Unverified})
        if (name == outcome_name(o)) r.recorded = o;
    r.matches = r.recorded == r.recomputed;
    return r;
}

struct ScalingConfig {
    std::vector<int> ns;
    double density = 4.0;
    int repetitions = 3;
    std::uint64_t seed = 0;
};

struct ScalingRow {
    int n = 0;
    int instances = 0;
    CounterAggregate impose_calls, reduce_calls, deletions, passes;
};

// Per-n counter table at fixed density. Throws when a hard bound breaks:
// deletions are capped by the pattern universe and passes by universe + 1.
inline std::vector<ScalingRow> scaling_report(const ScalingConfig& cfg) {
    std::vector<ScalingRow> rows;
    for (const int n : cfg.ns) {
        if (n < 4) throw std::invalid_argument("scaling needs n >= 4");
        ScalingRow row;
        row.n = n;
        const long long universe = 8ll * triad_count(n);
        for (int r = 0; r < cfg.repetitions; ++r) {
            const std::uint64_t seed =
                detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(n) * 1000 +
                                               static_cast<std::uint64_t>(r));
            long long m = std::llround(cfg.density * n);
            if (m > universe) m = universe;
            const Formula f = generate_instance({seed, n, static_cast<int>(m)});
            const MethodResult mr = solve_with_method(f);
            if (mr.stats.aclausole_deleted > universe)
                throw std::logic_error("deletion bound violated at n=" + std::to_string(n));
            if (mr.stats.passes > universe + 1)
                throw std::logic_error("pass bound violated at n=" + std::to_string(n));
            row.impose_calls.add(mr.stats.impose_calls);
            row.reduce_calls.add(mr.stats.reduce_calls);
            row.deletions.add(mr.stats.aclausole_deleted);
            row.passes.add(mr.stats.passes);
            ++row.instances;
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string scaling_csv(const std::vector<ScalingRow>& rows) {
    std::string out =
        "n,instances,impose_calls_mean,impose_calls_max,reduce_calls_mean,"
        "reduce_calls_max,deletions_mean,deletions_max,passes_mean,passes_max\n";
    char buf[256];
    for (const ScalingRow& r : rows) {
        const double c = r.instances ? static_cast<double>(r.instances) : 1.0;
        std::snprintf(buf, sizeof buf, "%d,%d,%.2f,%lld,%.2f,%lld,%.2f,%lld,%.2f,%lld\n",
                      r.n, r.instances,
                      static_cast<double>(r.impose_calls.total) / c, r.impose_calls.max,
                      static_cast<double>(r.reduce_calls.total) / c, r.reduce_calls.max,
                      static_cast<double>(r.deletions.total) / c, r.deletions.max,
                      static_cast<double>(r.passes.total) / c, r.passes.max);
        out += buf;
    }
    return out;
}

}  // namespace ci3sat
