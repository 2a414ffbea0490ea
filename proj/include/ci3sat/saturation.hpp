#pragma once

// Saturation: speculative triple-imposition wipeout tests with rollback.
// A surviving pattern must tolerate imposing its three literals followed by
// a reduction; patterns that wipe the structure out are deleted for good,
// each deletion followed by a real reduction.

#include <cstdint>
#include <stdexcept>

#include "ci3sat/structure.hpp"

namespace ci3sat {

struct SaturationStats {
    long long passes = 0;
    long long tests_run = 0;
    long long aclausole_deleted = 0;
    long long reduce_calls = 0;
    long long impose_calls = 0;

    SaturationStats& operator+=(const SaturationStats& o) {
        passes += o.passes;
        tests_run += o.tests_run;
        aclausole_deleted += o.aclausole_deleted;
        reduce_calls += o.reduce_calls;
        impose_calls += o.impose_calls;
        return *this;
    }
};

// Scan policy. FullPass finishes the sweep after a deletion and rescans;
// RestartOnDelete rescans from the first row immediately. Both reach the
// same fixpoint; FullPass is the default.
enum class SaturationPolicy { FullPass, RestartOnDelete };

// True when imposing the pattern's three literals and reducing empties the
// structure. Runs on a copy; the input is untouched.
inline bool test_imposition(const Structure& s, const AClausolaId& a,
                            SaturationStats* stats = nullptr) {
    if (!s.has(a)) throw std::invalid_argument("tested AClausola is not present");
    Structure probe = s;
    for (int pos = 0; pos < 3; ++pos)
        detail::impose_into(probe, aclausola_literal(a, pos), nullptr);
    const bool emptied = detail::reduce_into(probe, nullptr);
    if (stats) {
        stats->impose_calls += 3;
        stats->reduce_calls += 1;
    }
    return emptied;
}

struct SaturateResult {
    Structure structure;
    SaturationStats stats;
    DeletionLog log;
};

// Repeats wipeout-test sweeps in canonical order (row order, descending
// pattern) until no deletion happens or the structure empties. Deletions
// take effect immediately within a sweep. Idempotent; an input that is
// already empty is returned unchanged.
inline SaturateResult saturate(const Structure& s,
                               SaturationPolicy policy = SaturationPolicy::FullPass) {
    SaturateResult res{s, {}, {}};
    Structure& cur = res.structure;
    SaturationStats& st = res.stats;

    if (is_empty(cur).empty) return res;

    const auto& idx = detail::TriadIndex::get(cur.var_count());
    bool deleted_in_pass = true;
    while (deleted_in_pass) {
        deleted_in_pass = false;
        bool restart = false;
        for (int r = 0; r < cur.row_count() && !restart; ++r) {
            const Triad& t = idx.triads[static_cast<std::size_t>(r)];
            for (int b = 7; b >= 0; --b) {
                if (!((cur.row_mask(r) >> b) & 1u)) continue;
                const AClausolaId a{t, static_cast<std::uint8_t>(b)};
                ++st.tests_run;
                if (!test_imposition(cur, a, &st)) continue;

                cur.remove(a);
                res.log.push_back({a, Deletion::Why::WipeoutTest, {}, {}});
                ++st.aclausole_deleted;
                deleted_in_pass = true;
                if (cur.row_mask(r) == 0) {
                    ++st.passes;
                    return res;
                }
                ++st.reduce_calls;
                if (detail::reduce_into(cur, &res.log)) {
                    ++st.passes;
                    return res;
                }
                if (policy == SaturationPolicy::RestartOnDelete) {
                    restart = true;
                    break;
                }
            }
        }
        ++st.passes;
    }
    return res;
}

}  // namespace ci3sat
