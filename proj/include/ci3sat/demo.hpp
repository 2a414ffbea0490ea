#pragma once

// Bundled demonstration instance: 4 variables, 12 clauses, exactly two
// models (FTTT and FTFT). Its complement structure starts with 20 surviving
// patterns and saturates down to 7; the equivalent maximal formula has 25
// clauses. Exercised end to end by `ci3sat example` and by the acceptance
// suite.

#include "ci3sat/cnf.hpp"

namespace ci3sat {

inline Formula demo_formula() {
    const auto lit = [](int v) { return Literal{v < 0 ? -v : v, v > 0}; };
    std::vector<Clause3> cs;
    const int raw[12][3] = {
        {1, 2, 3},   {1, 2, -3},  {-1, 2, 3},  {-1, 2, -3},
        {-1, -2, 3}, {-1, -2, -3}, {1, 2, -4},  {1, -2, 4},
        {-1, 2, 4},  {-1, 2, -4}, {-1, 3, -4}, {2, 3, -4},
    };
    cs.reserve(12);
    for (const auto& c : raw) cs.emplace_back(lit(c[0]), lit(c[1]), lit(c[2]));
    return make_formula(4, std::move(cs));
}

}  // namespace ci3sat
