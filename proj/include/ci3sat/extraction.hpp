#pragma once

// Constructive model extraction from a saturated, non-empty structure.
//
// The procedure renames variables so chosen polarities read positive (the
// flip vector records every renaming), imposes the first surviving pattern,
// reduces, and then settles each remaining variable through the consistent
// choice rule: scan rows pairing it with two already-decided variables and
// take the single surviving polarity, defaulting to positive when every
// scanned row keeps both. The final assignment is all-TRUE under the
// renaming, i.e. TRUE exactly where no flip happened.
//
// Every way the procedure can fail is reported as data, never asserted
// away; failures feed the differential harness as counterexample candidates.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ci3sat/saturation.hpp"
#include "ci3sat/structure.hpp"

namespace ci3sat {

// Per-variable polarity renaming record. Applying a flip twice is the
// identity; the extracted assignment is all-TRUE XOR flips.
struct FlipVector {
    std::vector<std::uint8_t> flipped;

    FlipVector() = default;
    explicit FlipVector(int n) : flipped(static_cast<std::size_t>(n), 0) {}

    bool is_flipped(int var) const { return flipped[static_cast<std::size_t>(var - 1)] != 0; }
    void toggle(int var) { flipped[static_cast<std::size_t>(var - 1)] ^= 1; }

    friend bool operator==(const FlipVector&, const FlipVector&) = default;
};

namespace detail {

// Toggles the variable's polarity bit in every row containing it: each row
// mask is permuted by XOR-ing the variable's pattern bit.
inline void flip_variable_into(Structure& s, int var) {
    const auto& idx = TriadIndex::get(s.var_count());
    if (var < 1 || var > s.var_count())
        throw std::invalid_argument("flipped variable out of range");
    for (const auto& rr : idx.var_rows[static_cast<std::size_t>(var)]) {
        const std::uint8_t mask = s.row_mask(rr.rank);
        const unsigned e = 1u << (2 - rr.pos);
        std::uint8_t out = 0;
        for (int b = 0; b < 8; ++b)
            if ((mask >> b) & 1u) out |= static_cast<std::uint8_t>(1u << (b ^ e));
        s.set_row_mask(rr.rank, out);
    }
}

}  // namespace detail

inline Structure flip_variable(const Structure& s, int var, FlipVector& fv) {
    Structure out = s;
    detail::flip_variable_into(out, var);
    fv.toggle(var);
    return out;
}

struct ChoiceRecord {
    enum class Basis { Row, DefaultPositive, SinglePolarity };

    int var = 0;
    Basis basis = Basis::DefaultPositive;
    Triad row;             // decisive row when basis == Row
    bool positive = true;  // polarity chosen, in the renamed space
    bool retried = false;  // robust mode fell back to the opposite polarity
    bool robust = false;
};

using ChoiceTrace = std::vector<ChoiceRecord>;

inline std::string_view basis_name(ChoiceRecord::Basis b) {
    switch (b) {
        case ChoiceRecord::Basis::Row: return "row";
        case ChoiceRecord::Basis::DefaultPositive: return "default-positive";
        case ChoiceRecord::Basis::SinglePolarity: return "single-polarity";
    }
    return "?";
}

struct Choice {
    bool positive = true;
    bool defaulted = false;  // every scanned row kept both polarities
    Triad row;               // decisive row when !defaulted
};

struct UnsupportedPairInfo {
    int var = 0;
    PairKey pair;  // the decided positive pair with no surviving extension
    Triad row;
};

// The consistent choice rule for variable k against decided variables
// (all < k, ascending, decided polarities reading positive). Scans decided
// pairs (x, y) in ascending lexicographic order; the first row where exactly
// one polarity of k survives next to (x+, y+) decides. Neither polarity
// surviving is an UnsupportedPairInfo; both everywhere defaults to positive.
inline std::variant<Choice, UnsupportedPairInfo> consistent_choice(
    const Structure& s_new, int k, std::span<const int> decided) {
    if (decided.size() < 2)
        throw std::invalid_argument("consistent choice needs at least 2 decided variables");
    for (const int d : decided)
        if (d >= k) throw std::invalid_argument("decided variables must precede k");

    for (std::size_t xi = 0; xi < decided.size(); ++xi)
        for (std::size_t yi = xi + 1; yi < decided.size(); ++yi) {
            const Triad t{decided[xi], decided[yi], k};
            const std::uint8_t mask = s_new.row_mask(t);
            const bool has_pos = (mask >> 0b111) & 1u;
            const bool has_neg = (mask >> 0b110) & 1u;
            if (has_pos && has_neg) continue;
            if (has_pos) return Choice{true, false, t};
            if (has_neg) return Choice{false, false, t};
            return UnsupportedPairInfo{k, {decided[xi], decided[yi], true, true}, t};
        }
    return Choice{true, true, {}};
}

enum class FailureKind {
    ImpositionWipeout,
    PolarityInconsistency,
    UnsupportedPair,
    DeadEnd,
    VerificationFailed,
};

inline std::string_view failure_kind_name(FailureKind k) {
    switch (k) {
        case FailureKind::ImpositionWipeout: return "ImpositionWipeout";
        case FailureKind::PolarityInconsistency: return "PolarityInconsistency";
        case FailureKind::UnsupportedPair: return "UnsupportedPair";
        case FailureKind::DeadEnd: return "DeadEnd";
        case FailureKind::VerificationFailed: return "VerificationFailed";
    }
    return "?";
}

// The guarantee each failure kind contradicts, written out for bundles.
inline std::string_view failure_claim(FailureKind k) {
    switch (k) {
        case FailureKind::ImpositionWipeout:
            return "imposing the literals of a surviving pattern emptied the structure, "
                   "which the saturation fixpoint rules out";
        case FailureKind::PolarityInconsistency:
            return "after imposition and reduction a variable carries different polarity "
                   "sets in different rows, which a reduction fixpoint rules out";
        case FailureKind::UnsupportedPair:
            return "a decided positive pair has no surviving extension to the variable "
                   "under choice, so no polarity can be chosen consistently";
        case FailureKind::DeadEnd:
            return "both polarities of the variable under choice wipe out the structure, "
                   "so no consistent completion exists from this prefix";
        case FailureKind::VerificationFailed:
            return "the extracted assignment does not satisfy the source formula";
    }
    return "?";
}

struct ExtractionFailure {
    FailureKind kind = FailureKind::VerificationFailed;
    std::string detail;
    ChoiceTrace trace;
    FlipVector flips;
    Structure snapshot;  // structure state at the failure point
};

struct ExtractionSuccess {
    Assignment assignment;
    ChoiceTrace trace;
    FlipVector flips;
    Structure flipped_base;  // input structure with all recorded flips applied
    Structure reduced;       // final imposed-and-reduced structure
};

using ExtractionResult = std::variant<ExtractionSuccess, ExtractionFailure>;

namespace detail {

// Polarity census code per variable: bit 0 = positive occurs, bit 1 =
// negation occurs. Uniform across rows once the consistency check passed.
inline int polarity_code(const Structure& s, int var) {
    const auto& idx = TriadIndex::get(s.var_count());
    int code = 0;
    for (const auto& rr : idx.var_rows[static_cast<std::size_t>(var)]) {
        const std::uint8_t mask = s.row_mask(rr.rank);
        if (mask & polarity_keep_mask(rr.pos, true)) code |= 1;
        if (mask & polarity_keep_mask(rr.pos, false)) code |= 2;
        if (code == 3) break;
    }
    return code;
}

}  // namespace detail

// Builds a verified model from a saturated, non-empty structure. `counters`
// accumulates the impose/reduce calls spent here. In robust mode each choice
// is additionally imposed and reduced, retrying the opposite polarity on
// wipeout; the default faithful mode performs no per-choice imposition.
inline ExtractionResult extract_assignment(const Structure& saturated, const Formula& f,
                                           bool robust = false,
                                           SaturationStats* counters = nullptr) {
    const int n = saturated.var_count();
    if (n != f.n) throw std::invalid_argument("structure and formula sizes differ");
    if (n < 4) throw std::invalid_argument("extraction needs at least 4 variables");
    if (is_empty(saturated).empty)
        throw std::invalid_argument("extraction requires a structure with no empty row");

    FlipVector fv(n);
    ChoiceTrace trace;
    Structure base = saturated;

    const auto fail = [&](FailureKind kind, std::string detail, Structure snapshot) {
        return ExtractionResult{
            ExtractionFailure{kind, std::move(detail), trace, fv, std::move(snapshot)}};
    };

    // First pattern in canonical order; row (1,2,3) is non-empty. Rename its
    // negative variables positive.
    const Triad t0{1, 2, 3};
    const std::uint8_t mask0 = base.row_mask(0);
    int first_bits = 7;
    while (!((mask0 >> first_bits) & 1)) --first_bits;
    const int t0_vars[3] = {t0.i, t0.j, t0.k};
    for (int pos = 0; pos < 3; ++pos)
        if (!((first_bits >> (2 - pos)) & 1)) {
            detail::flip_variable_into(base, t0_vars[pos]);
            fv.toggle(t0_vars[pos]);
        }

    // Impose the (now positive) first three variables and reduce.
    Structure s_new = base;
    for (int v : t0_vars) detail::impose_into(s_new, {v, true}, nullptr);
    const bool emptied = detail::reduce_into(s_new, nullptr);
    if (counters) {
        counters->impose_calls += 3;
        counters->reduce_calls += 1;
    }
    if (emptied)
        return fail(FailureKind::ImpositionWipeout,
                    "wipeout after imposing variables 1, 2, 3", std::move(s_new));

    const auto violations = check_polarity_consistency(s_new);
    if (!violations.empty()) {
        const auto& v = violations.front();
        return fail(FailureKind::PolarityInconsistency,
                    "variable " + std::to_string(v.var) + " differs between rows (" +
                        std::to_string(v.row_a.i) + "," + std::to_string(v.row_a.j) + "," +
                        std::to_string(v.row_a.k) + ") and (" + std::to_string(v.row_b.i) +
                        "," + std::to_string(v.row_b.j) + "," + std::to_string(v.row_b.k) +
                        ")",
                    std::move(s_new));
    }

    // Single-polarity variables are decided outright, renamed positive.
    std::vector<int> decided;
    std::vector<int> open;
    for (int v = 1; v <= n; ++v) {
        const int code = detail::polarity_code(s_new, v);
        if (code == 3) {
            open.push_back(v);
            continue;
        }
        if (code == 2) {
            detail::flip_variable_into(base, v);
            detail::flip_variable_into(s_new, v);
            fv.toggle(v);
        }
        decided.push_back(v);
    }

    for (const int k : open) {
        ChoiceRecord rec;
        rec.var = k;
        rec.robust = robust;

        // Robust imposition may have collapsed k to one polarity already.
        int code = 3;
        if (robust) code = detail::polarity_code(s_new, k);
        if (code != 3) {
            rec.basis = ChoiceRecord::Basis::SinglePolarity;
            rec.positive = code == 1;
        } else {
            const auto below_end = std::lower_bound(decided.begin(), decided.end(), k);
            const std::span<const int> below(decided.data(),
                                             static_cast<std::size_t>(below_end - decided.begin()));
            const auto choice = consistent_choice(s_new, k, below);
            if (const auto* up = std::get_if<UnsupportedPairInfo>(&choice))
                return fail(FailureKind::UnsupportedPair,
                            "pair (" + std::to_string(up->pair.u) + "+, " +
                                std::to_string(up->pair.v) + "+) has no extension to variable " +
                                std::to_string(k),
                            s_new);
            const Choice& c = std::get<Choice>(choice);
            rec.basis = c.defaulted ? ChoiceRecord::Basis::DefaultPositive
                                    : ChoiceRecord::Basis::Row;
            rec.row = c.row;
            rec.positive = c.positive;
        }

        if (robust) {
            Structure probe = s_new;
            detail::impose_into(probe, {k, rec.positive}, nullptr);
            bool wiped = detail::reduce_into(probe, nullptr);
            if (counters) {
                counters->impose_calls += 1;
                counters->reduce_calls += 1;
            }
            if (wiped) {
                probe = s_new;
                detail::impose_into(probe, {k, !rec.positive}, nullptr);
                wiped = detail::reduce_into(probe, nullptr);
                if (counters) {
                    counters->impose_calls += 1;
                    counters->reduce_calls += 1;
                }
                if (wiped)
                    return fail(FailureKind::DeadEnd,
                                "both polarities of variable " + std::to_string(k) +
                                    " wipe out the structure",
                                s_new);
                rec.retried = true;
                rec.positive = !rec.positive;
            }
            s_new = std::move(probe);
        }

        if (!rec.positive) {
            detail::flip_variable_into(base, k);
            detail::flip_variable_into(s_new, k);
            fv.toggle(k);
        }
        trace.push_back(rec);
        decided.insert(std::lower_bound(decided.begin(), decided.end(), k), k);
    }

    Assignment a(n);
    for (int v = 1; v <= n; ++v) a.set(v, !fv.is_flipped(v));
    if (!evaluate(f, a))
        return fail(FailureKind::VerificationFailed,
                    "assignment " + a.str() + " does not satisfy the formula",
                    std::move(s_new));

    return ExtractionResult{
        ExtractionSuccess{std::move(a), std::move(trace), std::move(fv), std::move(base),
                          std::move(s_new)}};
}

}  // namespace ci3sat
