#pragma once

// The complement structure: one row per variable triad, each row an 8-bit
// mask of surviving AClausole (allowed local polarity patterns). Pattern bit
// layout matches Clause3::bits(): bit 2 is the triad's lowest variable,
// bit 0 the highest, a set bit meaning the positive literal.
//
// Row masks relate to clauses by complement: the structure built from a
// formula holds pattern b on triad t exactly when the clause on t whose
// pattern is (b XOR 0b111) is absent from the inverted formula. An
// assignment solves the structure when its restriction to every triad is a
// present pattern; this coincides with satisfying the source formula.

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ci3sat/cnf.hpp"

namespace ci3sat {

struct Triad {
    int i = 0, j = 0, k = 0;  // i < j < k

    friend bool operator==(const Triad&, const Triad&) = default;
    friend auto operator<=>(const Triad&, const Triad&) = default;
};

inline int triad_count(int n) {
    return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6;
}

inline bool triad_contains(const Triad& t, int var) {
    return var == t.i || var == t.j || var == t.k;
}

// Position of `var` inside the triad (0 = lowest), -1 when absent.
inline int triad_pos(const Triad& t, int var) {
    if (var == t.i) return 0;
    if (var == t.j) return 1;
    if (var == t.k) return 2;
    return -1;
}

// Rank of a triad in row order (lexicographic over ascending triples).
inline int triad_rank(const Triad& t, int n) {
    if (!(1 <= t.i && t.i < t.j && t.j < t.k && t.k <= n))
        throw std::invalid_argument("triad indices must satisfy 1 <= i < j < k <= n");
    int r = 0;
    for (int a = 1; a < t.i; ++a) r += (n - a) * (n - a - 1) / 2;
    for (int b = t.i + 1; b < t.j; ++b) r += n - b;
    r += t.k - t.j - 1;
    return r;
}

// One allowed pattern of one triad.
struct AClausolaId {
    Triad triad;
    std::uint8_t bits = 0;

    friend bool operator==(const AClausolaId&, const AClausolaId&) = default;
    // Canonical scan order: row order, then descending pattern (positive
    // literals first).
    friend bool operator<(const AClausolaId& a, const AClausolaId& b) {
        if (a.triad != b.triad) return a.triad < b.triad;
        return a.bits > b.bits;
    }
};

inline Literal aclausola_literal(const AClausolaId& a, int pos) {
    const int var = pos == 0 ? a.triad.i : pos == 1 ? a.triad.j : a.triad.k;
    return {var, ((a.bits >> (2 - pos)) & 1) != 0};
}

// Two literals on distinct variables, u < v.
struct PairKey {
    int u = 0, v = 0;
    bool pu = true, pv = true;

    friend bool operator==(const PairKey&, const PairKey&) = default;
};

inline int pair_count(int n) { return 2 * n * (n - 1); }

// Pair order: variable pair lexicographic, then (+,+), (+,-), (-,+), (-,-).
inline int pair_rank(const PairKey& p, int n) {
    if (!(1 <= p.u && p.u < p.v && p.v <= n))
        throw std::invalid_argument("pair indices must satisfy 1 <= u < v <= n");
    int r2 = 0;
    for (int a = 1; a < p.u; ++a) r2 += n - a;
    r2 += p.v - p.u - 1;
    return r2 * 4 + (p.pu ? 0 : 2) + (p.pv ? 0 : 1);
}

inline PairKey pair_at(int rank, int n) {
    const int pid = rank % 4;
    int r2 = rank / 4;
    int u = 1;
    while (r2 >= n - u) {
        r2 -= n - u;
        ++u;
    }
    return {u, u + 1 + r2, pid < 2, pid % 2 == 0};
}

// Mask of the four patterns where the variable at `pos` has the given
// polarity.
inline constexpr std::uint8_t polarity_keep_mask(int pos, bool positive) {
    constexpr std::uint8_t positive_at[3] = {0xF0, 0xCC, 0xAA};
    return positive ? positive_at[pos] : static_cast<std::uint8_t>(~positive_at[pos]);
}

// Mask of the two patterns extending a pair of polarities at two positions.
inline constexpr std::uint8_t pair_presence_mask(int pos_a, bool pa, int pos_b, bool pb) {
    return polarity_keep_mask(pos_a, pa) & polarity_keep_mask(pos_b, pb);
}

namespace detail {

// Per-n lookup tables shared by all structures of that size.
class TriadIndex {
public:
    int n = 0;
    std::vector<Triad> triads;  // rank -> triad
    struct RowRef {
        std::int32_t rank;
        std::int8_t pos;
    };
    std::vector<std::vector<RowRef>> var_rows;  // var -> rows containing it

    int rank(int i, int j, int k) const {
        return rank3_[(static_cast<std::size_t>(i) * (n + 1) + j) * (n + 1) + k];
    }
    int rank_sorted(int a, int b, int c) const {
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        return rank(a, b, c);
    }

    static const TriadIndex& get(int n) {
        static std::mutex mu;
        static std::map<int, std::unique_ptr<TriadIndex>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it == cache.end())
            it = cache.emplace(n, std::unique_ptr<TriadIndex>(new TriadIndex(n))).first;
        return *it->second;
    }

private:
    explicit TriadIndex(int n_in) : n(n_in) {
        if (n < 0 || n > 128)
            throw std::invalid_argument("variable count out of supported range");
        triads.reserve(static_cast<std::size_t>(triad_count(n)));
        rank3_.assign(static_cast<std::size_t>(n + 1) * (n + 1) * (n + 1), -1);
        var_rows.assign(static_cast<std::size_t>(n + 1), {});
        std::int32_t r = 0;
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                for (int k = j + 1; k <= n; ++k, ++r) {
                    triads.push_back({i, j, k});
                    rank3_[(static_cast<std::size_t>(i) * (n + 1) + j) * (n + 1) + k] = r;
                    var_rows[static_cast<std::size_t>(i)].push_back({r, 0});
                    var_rows[static_cast<std::size_t>(j)].push_back({r, 1});
                    var_rows[static_cast<std::size_t>(k)].push_back({r, 2});
                }
    }

    std::vector<std::int32_t> rank3_;
};

}  // namespace detail

// Value-semantic array of row masks, indexed by triad rank.
class Structure {
public:
    Structure() = default;
    Structure(int n, std::uint8_t fill)
        : n_(n), rows_(static_cast<std::size_t>(triad_count(n)), fill) {
        if (n < 0) throw std::invalid_argument("variable count must be >= 0");
    }

    static Structure full(int n) { return Structure(n, 0xFF); }

    int var_count() const { return n_; }
    int row_count() const { return static_cast<int>(rows_.size()); }

    std::uint8_t row_mask(int rank) const { return rows_[static_cast<std::size_t>(rank)]; }
    std::uint8_t row_mask(const Triad& t) const {
        return rows_[static_cast<std::size_t>(triad_rank(t, n_))];
    }
    void set_row_mask(int rank, std::uint8_t mask) {
        rows_[static_cast<std::size_t>(rank)] = mask;
    }
    void set_row_mask(const Triad& t, std::uint8_t mask) {
        rows_[static_cast<std::size_t>(triad_rank(t, n_))] = mask;
    }

    bool has(const AClausolaId& a) const {
        return (row_mask(a.triad) >> a.bits) & 1u;
    }
    void remove(const AClausolaId& a) {
        rows_[static_cast<std::size_t>(triad_rank(a.triad, n_))] &=
            static_cast<std::uint8_t>(~(1u << a.bits));
    }
    void add(const AClausolaId& a) {
        rows_[static_cast<std::size_t>(triad_rank(a.triad, n_))] |=
            static_cast<std::uint8_t>(1u << a.bits);
    }

    std::span<const std::uint8_t> masks() const { return rows_; }

    friend bool operator==(const Structure&, const Structure&) = default;

private:
    int n_ = 0;
    std::vector<std::uint8_t> rows_;
};

inline int count_aclausole(const Structure& s) {
    int total = 0;
    for (std::uint8_t m : s.masks()) total += std::popcount(m);
    return total;
}

struct EmptyInfo {
    bool empty = false;
    Triad triad;  // lowest-rank empty triad when empty
};

inline EmptyInfo is_empty(const Structure& s) {
    const auto& idx = detail::TriadIndex::get(s.var_count());
    const auto masks = s.masks();
    for (std::size_t r = 0; r < masks.size(); ++r)
        if (masks[r] == 0) return {true, idx.triads[r]};
    return {false, {}};
}

// Row contains pattern b exactly when the clause with the same literals is
// absent from the formula.
inline Structure build_complement(const Formula& f) {
    Structure s = Structure::full(f.n);
    for (const Clause3& c : f.clauses) {
        const auto v = c.vars();
        s.remove({{v[0], v[1], v[2]}, c.bits()});
    }
    return s;
}

// Complement of the inverted formula: pattern b is present exactly when the
// clause with pattern (b XOR 0b111) is absent from the source formula. The
// assignments solving this structure are the formula's satisfying set.
inline Structure build_ci3sat(const Formula& f) {
    Structure s = Structure::full(f.n);
    for (const Clause3& c : f.clauses) {
        const auto v = c.vars();
        s.remove({{v[0], v[1], v[2]}, static_cast<std::uint8_t>(c.bits() ^ 0b111)});
    }
    return s;
}

// Deletion audit record. Replaying a log against the input structure
// reproduces the output bit for bit.
struct Deletion {
    enum class Why { Imposed, BannedPair, WipeoutTest };

    AClausolaId id;
    Why why = Why::Imposed;
    Literal lit;   // valid when why == Imposed
    PairKey pair;  // valid when why == BannedPair
};

using DeletionLog = std::vector<Deletion>;

namespace detail {

inline void log_removed_bits(const TriadIndex& idx, int rank, std::uint8_t removed,
                             Deletion proto, DeletionLog* log) {
    if (!log || removed == 0) return;
    for (int b = 7; b >= 0; --b)
        if ((removed >> b) & 1u) {
            proto.id = {idx.triads[static_cast<std::size_t>(rank)],
                        static_cast<std::uint8_t>(b)};
            log->push_back(proto);
        }
}

// Removes every pattern carrying the literal's negation. Single sweep over
// the rows containing the variable; idempotent.
inline void impose_into(Structure& s, Literal lit, DeletionLog* log) {
    const auto& idx = TriadIndex::get(s.var_count());
    if (lit.var < 1 || lit.var > s.var_count())
        throw std::invalid_argument("imposed variable out of range");
    Deletion proto;
    proto.why = Deletion::Why::Imposed;
    proto.lit = lit;
    for (const auto& ref : idx.var_rows[static_cast<std::size_t>(lit.var)]) {
        const std::uint8_t mask = s.row_mask(ref.rank);
        const std::uint8_t keep = polarity_keep_mask(ref.pos, lit.positive);
        const std::uint8_t removed = mask & static_cast<std::uint8_t>(~keep);
        if (removed) {
            log_removed_bits(idx, ref.rank, removed, proto, log);
            s.set_row_mask(ref.rank, mask & keep);
        }
    }
}

// Fixpoint deletion of all patterns carrying a pair that is unsupported in
// some row containing both its variables. Banned pairs are processed in pair
// order; a pair's deletions sweep the rows in row order. Halts as soon as a
// row empties. Returns true when the structure ended empty.
inline bool reduce_into(Structure& s, DeletionLog* log) {
    const int n = s.var_count();
    const auto& idx = TriadIndex::get(n);

    for (std::uint8_t m : s.masks())
        if (m == 0) return true;  // already empty: no deletions

    // state: 0 = unseen, 1 = pending, 2 = processed
    std::vector<std::uint8_t> state(static_cast<std::size_t>(pair_count(n)), 0);
    std::set<int> pending;

    const auto enqueue_unsupported = [&](int rank) {
        const Triad t = idx.triads[static_cast<std::size_t>(rank)];
        const std::uint8_t mask = s.row_mask(rank);
        const int vars[3] = {t.i, t.j, t.k};
        constexpr int pair_pos[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const auto& pp : pair_pos)
            for (int pol = 0; pol < 4; ++pol) {
                const bool pa = pol < 2, pb = pol % 2 == 0;
                if (mask & pair_presence_mask(pp[0], pa, pp[1], pb)) continue;
                const int pr = pair_rank({vars[pp[0]], vars[pp[1]], pa, pb}, n);
                if (state[static_cast<std::size_t>(pr)] == 0) {
                    state[static_cast<std::size_t>(pr)] = 1;
                    pending.insert(pr);
                }
            }
    };

    for (int r = 0; r < s.row_count(); ++r) enqueue_unsupported(r);

    while (!pending.empty()) {
        const int pr = *pending.begin();
        pending.erase(pending.begin());
        state[static_cast<std::size_t>(pr)] = 2;
        const PairKey pk = pair_at(pr, n);

        Deletion proto;
        proto.why = Deletion::Why::BannedPair;
        proto.pair = pk;

        for (int w = 1; w <= n; ++w) {  // ascending w == row order for fixed (u, v)
            if (w == pk.u || w == pk.v) continue;
            int pos_u = 0, pos_v = 1;
            if (w < pk.u) {
                pos_u = 1;
                pos_v = 2;
            } else if (w < pk.v) {
                pos_u = 0;
                pos_v = 2;
            }
            const int rank = idx.rank_sorted(pk.u, pk.v, w);
            const std::uint8_t mask = s.row_mask(rank);
            const std::uint8_t hits =
                mask & pair_presence_mask(pos_u, pk.pu, pos_v, pk.pv);
            if (!hits) continue;
            log_removed_bits(idx, rank, hits, proto, log);
            s.set_row_mask(rank, mask & static_cast<std::uint8_t>(~hits));
            if (mask == hits) return true;  // row emptied: halt immediately
            enqueue_unsupported(rank);
        }
    }
    return false;
}

}  // namespace detail

struct ImposeResult {
    Structure structure;
    DeletionLog log;
};

inline ImposeResult impose(const Structure& s, Literal lit) {
    ImposeResult r{s, {}};
    detail::impose_into(r.structure, lit, &r.log);
    return r;
}

struct ReduceResult {
    Structure structure;
    DeletionLog log;
    bool emptied = false;
};

inline ReduceResult reduce(const Structure& s) {
    ReduceResult r{s, {}, false};
    r.emptied = detail::reduce_into(r.structure, &r.log);
    return r;
}

// True when at least one of the two patterns extending the pair is present.
// The pair's variables must both belong to the triad.
inline bool pair_supported(std::uint8_t row_mask, const Triad& t, const PairKey& pk) {
    const int pos_u = triad_pos(t, pk.u);
    const int pos_v = triad_pos(t, pk.v);
    if (pos_u < 0 || pos_v < 0)
        throw std::invalid_argument("pair variable not in triad");
    return (row_mask & pair_presence_mask(pos_u, pk.pu, pos_v, pk.pv)) != 0;
}

inline bool pair_supported(const Structure& s, const Triad& t, const PairKey& pk) {
    return pair_supported(s.row_mask(t), t, pk);
}

struct PolarityViolation {
    int var = 0;
    Triad row_a;  // reference row
    Triad row_b;  // row whose polarity set differs
};

// After a reduction fixpoint with no empty row, every row containing a
// variable carries the same polarity set for it. This is a mechanical
// census; violations on non-fixpoint inputs are reported just the same.
inline std::vector<PolarityViolation> check_polarity_consistency(const Structure& s) {
    const auto& idx = detail::TriadIndex::get(s.var_count());
    std::vector<PolarityViolation> out;
    for (int v = 1; v <= s.var_count(); ++v) {
        int ref = -1;
        Triad ref_triad;
        for (const auto& rr : idx.var_rows[static_cast<std::size_t>(v)]) {
            const std::uint8_t mask = s.row_mask(rr.rank);
            const int code = ((mask & polarity_keep_mask(rr.pos, true)) ? 1 : 0) |
                             ((mask & polarity_keep_mask(rr.pos, false)) ? 2 : 0);
            if (ref < 0) {
                ref = code;
                ref_triad = idx.triads[static_cast<std::size_t>(rr.rank)];
            } else if (code != ref) {
                out.push_back({v, ref_triad, idx.triads[static_cast<std::size_t>(rr.rank)]});
            }
        }
    }
    return out;
}

// All assignments whose restriction to every triad is a present pattern,
// ascending in index order.
inline std::vector<Assignment> solutions_of_structure(const Structure& s, int guard = 20) {
    const int n = s.var_count();
    if (n > guard)
        throw std::invalid_argument("variable count exceeds enumeration guard");
    const auto& idx = detail::TriadIndex::get(n);
    const auto masks = s.masks();
    std::vector<Assignment> out;
    for (std::uint64_t a = 0; a < (1ull << n); ++a) {
        bool ok = true;
        for (std::size_t r = 0; r < masks.size(); ++r) {
            const Triad& t = idx.triads[r];
            const unsigned pattern = (((a >> (n - t.i)) & 1u) << 2) |
                                     (((a >> (n - t.j)) & 1u) << 1) |
                                     ((a >> (n - t.k)) & 1u);
            if (!((masks[r] >> pattern) & 1u)) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(Assignment::from_index(a, n));
    }
    return out;
}

// Rows whose triads lie inside `vars`, re-indexed order-preservingly.
inline Structure extract_substructure(const Structure& s, std::span<const int> vars) {
    std::vector<int> v(vars.begin(), vars.end());
    std::sort(v.begin(), v.end());
    if (v.size() < 3) throw std::invalid_argument("substructure needs at least 3 variables");
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw std::invalid_argument("substructure variables must be distinct");
    if (v.front() < 1 || v.back() > s.var_count())
        throw std::invalid_argument("substructure variable out of range");

    const int m = static_cast<int>(v.size());
    Structure out(m, 0);
    const auto& sub_idx = detail::TriadIndex::get(m);
    const auto& idx = detail::TriadIndex::get(s.var_count());
    for (int r = 0; r < out.row_count(); ++r) {
        const Triad& t = sub_idx.triads[static_cast<std::size_t>(r)];
        const int orig = idx.rank(v[static_cast<std::size_t>(t.i - 1)],
                                  v[static_cast<std::size_t>(t.j - 1)],
                                  v[static_cast<std::size_t>(t.k - 1)]);
        out.set_row_mask(r, s.row_mask(orig));
    }
    return out;
}

// Complement mapping back to clause space: clause pattern c is present
// exactly when pattern (c XOR 0b111) is absent from the structure.
inline Formula largest_equivalent_3sat(const Structure& s) {
    const auto& idx = detail::TriadIndex::get(s.var_count());
    std::vector<Clause3> clauses;
    for (int r = 0; r < s.row_count(); ++r) {
        const Triad& t = idx.triads[static_cast<std::size_t>(r)];
        const std::uint8_t mask = s.row_mask(r);
        for (int c = 7; c >= 0; --c)
            if (!((mask >> (c ^ 0b111)) & 1u))
                clauses.emplace_back(Literal{t.i, (c & 4) != 0},
                                     Literal{t.j, (c & 2) != 0},
                                     Literal{t.k, (c & 1) != 0});
    }
    return make_formula(s.var_count(), std::move(clauses));
}

// Debug dump: one line per non-full row, "i j k : <b7..b0>".
inline std::string dump_structure(const Structure& s) {
    const auto& idx = detail::TriadIndex::get(s.var_count());
    std::string out;
    for (int r = 0; r < s.row_count(); ++r) {
        const std::uint8_t mask = s.row_mask(r);
        if (mask == 0xFF) continue;
        const Triad& t = idx.triads[static_cast<std::size_t>(r)];
        out += std::to_string(t.i) + ' ' + std::to_string(t.j) + ' ' +
               std::to_string(t.k) + " : ";
        for (int b = 7; b >= 0; --b) out += ((mask >> b) & 1u) ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace ci3sat
