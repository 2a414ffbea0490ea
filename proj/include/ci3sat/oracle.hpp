#pragma once

// Exhaustive ground truth for desk-scale instances. Zero-trust scans over
// the full assignment space; no propagation, no sharing with the method
// under test.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "ci3sat/cnf.hpp"
#include "ci3sat/structure.hpp"

namespace ci3sat {

namespace detail {

// Clause compiled against the assignment-index bit layout (variable v lives
// at bit n-v). A clause is falsified exactly when its variables' bits equal
// the pattern that makes every literal false.
struct CompiledFormula {
    int n = 0;
    struct Clause {
        std::uint32_t mask = 0;
        std::uint32_t falsify = 0;
    };
    std::vector<Clause> clauses;

    explicit CompiledFormula(const Formula& f) : n(f.n) {
        clauses.reserve(f.clauses.size());
        for (const Clause3& c : f.clauses) {
            Clause cc;
            for (const Literal& l : c.literals()) {
                const std::uint32_t bit = 1u << (n - l.var);
                cc.mask |= bit;
                if (!l.positive) cc.falsify |= bit;
            }
            clauses.push_back(cc);
        }
    }

    bool satisfied(std::uint32_t idx) const {
        for (const Clause& c : clauses)
            if ((idx & c.mask) == c.falsify) return false;
        return true;
    }
};

}  // namespace detail

// First satisfying assignment in ascending index order (FALSE < TRUE,
// variable 1 most significant), or nothing when unsatisfiable.
inline std::optional<Assignment> brute_solve(const Formula& f, int guard = 26) {
    if (f.n > guard) throw std::invalid_argument("variable count exceeds solve guard");
    const detail::CompiledFormula cf(f);
    const std::uint64_t limit = 1ull << f.n;
    for (std::uint64_t idx = 0; idx < limit; ++idx)
        if (cf.satisfied(static_cast<std::uint32_t>(idx)))
            return Assignment::from_index(idx, f.n);
    return std::nullopt;
}

// Independent second opinion: same scan from the top of the index order.
inline std::optional<Assignment> brute_solve_descending(const Formula& f, int guard = 26) {
    if (f.n > guard) throw std::invalid_argument("variable count exceeds solve guard");
    const detail::CompiledFormula cf(f);
    const std::uint64_t limit = 1ull << f.n;
    for (std::uint64_t idx = limit; idx-- > 0;)
        if (cf.satisfied(static_cast<std::uint32_t>(idx)))
            return Assignment::from_index(idx, f.n);
    return std::nullopt;
}

// All satisfying assignments, ascending.
inline std::vector<Assignment> enumerate_solutions(const Formula& f, int guard = 20) {
    if (f.n > guard)
        throw std::invalid_argument("variable count exceeds enumeration guard");
    const detail::CompiledFormula cf(f);
    std::vector<Assignment> out;
    const std::uint64_t limit = 1ull << f.n;
    for (std::uint64_t idx = 0; idx < limit; ++idx)
        if (cf.satisfied(static_cast<std::uint32_t>(idx)))
            out.push_back(Assignment::from_index(idx, f.n));
    return out;
}

// The assignment's pattern on every triad: the one AClausola per row it
// makes true. Triad order, C(n,3) entries.
inline std::vector<AClausolaId> gcs_of_assignment(const Assignment& a) {
    const int n = a.size();
    const auto& idx = detail::TriadIndex::get(n);
    std::vector<AClausolaId> out;
    out.reserve(idx.triads.size());
    for (const Triad& t : idx.triads) {
        const std::uint8_t bits =
            static_cast<std::uint8_t>((a.value(t.i) ? 4 : 0) | (a.value(t.j) ? 2 : 0) |
                                      (a.value(t.k) ? 1 : 0));
        out.push_back({t, bits});
    }
    return out;
}

inline bool gcs_contained(const Assignment& a, const Structure& s) {
    for (const AClausolaId& id : gcs_of_assignment(a))
        if (!s.has(id)) return false;
    return true;
}

// Union of the given assignments' triad patterns, deduplicated, in canonical
// order.
inline std::vector<AClausolaId> true_value_triads(std::span<const Assignment> solutions,
                                                  int n) {
    const auto& idx = detail::TriadIndex::get(n);
    std::vector<std::uint8_t> seen(idx.triads.size(), 0);
    for (const Assignment& a : solutions) {
        for (std::size_t r = 0; r < idx.triads.size(); ++r) {
            const Triad& t = idx.triads[r];
            const std::uint8_t bits = static_cast<std::uint8_t>(
                (a.value(t.i) ? 4 : 0) | (a.value(t.j) ? 2 : 0) | (a.value(t.k) ? 1 : 0));
            seen[r] |= static_cast<std::uint8_t>(1u << bits);
        }
    }
    std::vector<AClausolaId> out;
    for (std::size_t r = 0; r < seen.size(); ++r)
        for (int b = 7; b >= 0; --b)
            if ((seen[r] >> b) & 1u)
                out.push_back({idx.triads[r], static_cast<std::uint8_t>(b)});
    return out;
}

inline nlohmann::json to_json(const AClausolaId& a) {
    return nlohmann::json{{"triad", {a.triad.i, a.triad.j, a.triad.k}}, {"bits", a.bits}};
}

// Checks on a saturated structure against the enumerated solution set:
//   coincidence - surviving pattern count equals the distinct true-value
//                 triad count (an empty structure counts as zero);
//   coverage    - every surviving pattern occurs in some solution's GCS;
//   maximality  - every solution's GCS is contained in the structure.
// Failures are reported with witnesses, never thrown.
struct AuditReport {
    long long coincidence_lhs = 0;
    long long coincidence_rhs = 0;
    std::vector<AClausolaId> coverage_missing;
    struct MaximalityViolation {
        Assignment assignment;
        AClausolaId missing;
    };
    std::vector<MaximalityViolation> maximality_violations;

    bool coincidence_pass() const { return coincidence_lhs == coincidence_rhs; }
    bool coverage_pass() const { return coverage_missing.empty(); }
    bool maximality_pass() const { return maximality_violations.empty(); }
    bool all_pass() const {
        return coincidence_pass() && coverage_pass() && maximality_pass();
    }

    nlohmann::json to_json() const {
        nlohmann::json missing = nlohmann::json::array();
        for (const auto& m : coverage_missing) missing.push_back(ci3sat::to_json(m));
        nlohmann::json viols = nlohmann::json::array();
        for (const auto& v : maximality_violations)
            viols.push_back({{"assignment", v.assignment.str()},
                             {"missing", ci3sat::to_json(v.missing)}});
        return {{"coincidence",
                 {{"lhs", coincidence_lhs},
                  {"rhs", coincidence_rhs},
                  {"pass", coincidence_pass()}}},
                {"coverage", {{"missing", missing}, {"pass", coverage_pass()}}},
                {"maximality", {{"violations", viols}, {"pass", maximality_pass()}}}};
    }
};

inline AuditReport audit_structure(const Formula& f, const Structure& saturated,
                                     int guard = 20) {
    if (f.n > guard)
        throw std::invalid_argument("variable count exceeds enumeration guard");
    AuditReport rep;
    const std::vector<Assignment> solutions = enumerate_solutions(f, guard);
    const std::vector<AClausolaId> patterns = true_value_triads(solutions, f.n);
    const bool empty = is_empty(saturated).empty;

    // An empty structure denotes "no solutions"; its leftover rows are moot.
    rep.coincidence_lhs = empty ? 0 : count_aclausole(saturated);
    rep.coincidence_rhs = static_cast<long long>(patterns.size());

    if (!empty) {
        const auto& idx = detail::TriadIndex::get(f.n);
        std::vector<std::uint8_t> realized(idx.triads.size(), 0);
        for (const AClausolaId& p : patterns)
            realized[static_cast<std::size_t>(triad_rank(p.triad, f.n))] |=
                static_cast<std::uint8_t>(1u << p.bits);
        for (int r = 0; r < saturated.row_count(); ++r) {
            const std::uint8_t stray = saturated.row_mask(r) &
                                       static_cast<std::uint8_t>(~realized[static_cast<std::size_t>(r)]);
            for (int b = 7; b >= 0; --b)
                if ((stray >> b) & 1u)
                    rep.coverage_missing.push_back(
                        {idx.triads[static_cast<std::size_t>(r)], static_cast<std::uint8_t>(b)});
        }
    }

    for (const Assignment& a : solutions)
        for (const AClausolaId& id : gcs_of_assignment(a))
            if (!saturated.has(id)) {
                rep.maximality_violations.push_back({a, id});
                break;
            }

    return rep;
}

}  // namespace ci3sat
