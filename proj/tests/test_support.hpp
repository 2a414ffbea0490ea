#pragma once

// Shared helpers for the test suites: terse literal/clause builders and the
// seeded instance corpora the invariant tests run over.

#include <array>
#include <cstdint>
#include <vector>

#include "ci3sat/cnf.hpp"
#include "ci3sat/harness.hpp"

namespace test_support {

using namespace ci3sat;

// DIMACS-style signed literal.
inline Literal lit(int v) { return Literal{v < 0 ? -v : v, v > 0}; }

inline Clause3 cls(int a, int b, int c) { return Clause3{lit(a), lit(b), lit(c)}; }

inline Formula formula(int n, const std::vector<std::array<int, 3>>& raw) {
    std::vector<Clause3> cs;
    cs.reserve(raw.size());
    for (const auto& c : raw) cs.push_back(cls(c[0], c[1], c[2]));
    return make_formula(n, std::move(cs));
}

// Seeded corpus with m drawn uniformly over the whole clause universe.
inline std::vector<Formula> corpus_full_range(int count, std::uint64_t seed, int n_lo,
                                              int n_hi) {
    std::vector<Formula> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        detail::SplitMix64 rng{detail::mix_seed(seed, static_cast<std::uint64_t>(i))};
        const int n = n_lo + static_cast<int>(rng.below(
                                 static_cast<std::uint64_t>(n_hi - n_lo + 1)));
        const std::uint64_t universe = 8ull * static_cast<std::uint64_t>(triad_count(n));
        const int m = static_cast<int>(rng.below(universe + 1));
        out.push_back(generate_instance({rng.next(), n, m}));
    }
    return out;
}

// Seeded corpus at satisfiability-biased densities.
inline std::vector<Formula> corpus_density(int count, std::uint64_t seed, int n_lo,
                                           int n_hi, double d_lo, double d_hi) {
    std::vector<Formula> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        detail::SplitMix64 rng{detail::mix_seed(seed, static_cast<std::uint64_t>(i))};
        const int n = n_lo + static_cast<int>(rng.below(
                                 static_cast<std::uint64_t>(n_hi - n_lo + 1)));
        const double density = d_lo + (d_hi - d_lo) * rng.unit();
        const long long universe = 8ll * triad_count(n);
        long long m = std::llround(density * n);
        if (m > universe) m = universe;
        out.push_back(generate_instance({rng.next(), n, static_cast<int>(m)}));
    }
    return out;
}

// The satisfying set computed the slow, independent way: full scan with the
// plain clause evaluator.
inline std::vector<Assignment> oracle_solutions(const Formula& f) {
    std::vector<Assignment> out;
    for (std::uint64_t idx = 0; idx < (1ull << f.n); ++idx) {
        Assignment a = Assignment::from_index(idx, f.n);
        if (evaluate(f, a)) out.push_back(std::move(a));
    }
    return out;
}

// Replays a deletion log against the structure it was produced from. Every
// logged pattern must still be present when its deletion is applied.
inline Structure replay_log(Structure s, const DeletionLog& log) {
    for (const Deletion& d : log) {
        if (!s.has(d.id)) throw std::logic_error("log names an absent pattern");
        s.remove(d.id);
    }
    return s;
}

}  // namespace test_support
