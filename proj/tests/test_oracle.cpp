#include <catch2/catch_amalgamated.hpp>

#include "ci3sat/demo.hpp"
#include "ci3sat/oracle.hpp"
#include "ci3sat/saturation.hpp"
#include "test_support.hpp"

using namespace ci3sat;
using test_support::formula;

TEST_CASE("brute_solve scans ascending and finds the first model") {
    const auto model = brute_solve(demo_formula());
    REQUIRE(model);
    CHECK(model->str() == "FTFT");

    CHECK(brute_solve(Formula{3, {}})->str() == "FFF");

    std::vector<std::array<int, 3>> raw;
    for (int b = 0; b < 8; ++b)
        raw.push_back({b & 4 ? 1 : -1, b & 2 ? 2 : -2, b & 1 ? 3 : -3});
    CHECK_FALSE(brute_solve(formula(3, raw)));

    CHECK_THROWS_AS(brute_solve(Formula{27, {}}), std::invalid_argument);
}

TEST_CASE("descending scan agrees on satisfiability") {
    CHECK(brute_solve_descending(demo_formula())->str() == "FTTT");
    for (const Formula& f : test_support::corpus_full_range(25, 83, 4, 7))
        CHECK(brute_solve(f).has_value() == brute_solve_descending(f).has_value());
}

TEST_CASE("enumerate_solutions lists every model ascending") {
    const auto sols = enumerate_solutions(demo_formula());
    REQUIRE(sols.size() == 2);
    CHECK(sols[0].str() == "FTFT");
    CHECK(sols[1].str() == "FTTT");

    CHECK(enumerate_solutions(formula(3, {{1, 2, 3}})).size() == 7);

    for (const Formula& f : test_support::corpus_full_range(25, 89, 4, 7)) {
        const auto all = enumerate_solutions(f);
        CHECK(all == test_support::oracle_solutions(f));
        const auto first = brute_solve(f);
        CHECK(first.has_value() == !all.empty());
        if (first) CHECK(*first == all.front());
    }

    CHECK_THROWS_AS(enumerate_solutions(Formula{21, {}}), std::invalid_argument);
}

TEST_CASE("gcs_of_assignment yields one pattern per triad") {
    const auto g = gcs_of_assignment(assignment_from_string("FTTT"));
    REQUIRE(g.size() == 4);
    CHECK(g[0] == AClausolaId{{1, 2, 3}, 0b011});
    CHECK(g[1] == AClausolaId{{1, 2, 4}, 0b011});
    CHECK(g[2] == AClausolaId{{1, 3, 4}, 0b011});
    CHECK(g[3] == AClausolaId{{2, 3, 4}, 0b111});

    const auto g2 = gcs_of_assignment(assignment_from_string("FTFT"));
    REQUIRE(g2.size() == 4);
    CHECK(g2[0] == AClausolaId{{1, 2, 3}, 0b010});
    CHECK(g2[1] == AClausolaId{{1, 2, 4}, 0b011});
    CHECK(g2[2] == AClausolaId{{1, 3, 4}, 0b001});
    CHECK(g2[3] == AClausolaId{{2, 3, 4}, 0b101});

    for (const auto& p : gcs_of_assignment(assignment_from_string("TTTT")))
        CHECK(p.bits == 0b111);

    CHECK(gcs_of_assignment(Assignment(7)).size() ==
          static_cast<std::size_t>(triad_count(7)));
}

TEST_CASE("gcs_contained matches structure membership") {
    const Structure sat = saturate(build_ci3sat(demo_formula())).structure;
    CHECK(gcs_contained(assignment_from_string("FTTT"), sat));
    CHECK(gcs_contained(assignment_from_string("FTFT"), sat));
    CHECK_FALSE(gcs_contained(assignment_from_string("TTTT"), sat));
    CHECK(gcs_contained(assignment_from_string("TFTF"), Structure::full(4)));
}

TEST_CASE("gcs containment in the built structure equals satisfaction") {
    for (const Formula& f : test_support::corpus_full_range(20, 97, 4, 6)) {
        const Structure s = build_ci3sat(f);
        for (std::uint64_t idx = 0; idx < (1ull << f.n); ++idx) {
            const Assignment a = Assignment::from_index(idx, f.n);
            CHECK(gcs_contained(a, s) == evaluate(f, a));
        }
    }
}

TEST_CASE("true_value_triads unions and deduplicates patterns") {
    const std::vector<Assignment> two{assignment_from_string("FTTT"),
                                      assignment_from_string("FTFT")};
    CHECK(true_value_triads(two, 4).size() == 7);

    const std::vector<Assignment> one{assignment_from_string("FTTT")};
    CHECK(true_value_triads(one, 4).size() == 4);

    CHECK(true_value_triads({}, 4).empty());
}

TEST_CASE("audit passes on the demo instance with 7 == 7") {
    const Formula f = demo_formula();
    const Structure sat = saturate(build_ci3sat(f)).structure;
    const AuditReport rep = audit_structure(f, sat);
    CHECK(rep.coincidence_lhs == 7);
    CHECK(rep.coincidence_rhs == 7);
    CHECK(rep.all_pass());

    const auto j = rep.to_json();
    CHECK(j["coincidence"]["lhs"] == 7);
    CHECK(j["coincidence"]["pass"] == true);
    CHECK(j["coverage"]["missing"].empty());
    CHECK(j["maximality"]["violations"].empty());
}

TEST_CASE("audit counts an emptied structure as zero") {
    std::vector<std::array<int, 3>> raw;
    for (int t = 0; t < 4; ++t) {
        const int vars[4][3] = {{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
        for (int b = 0; b < 8; ++b)
            raw.push_back({b & 4 ? vars[t][0] : -vars[t][0],
                           b & 2 ? vars[t][1] : -vars[t][1],
                           b & 1 ? vars[t][2] : -vars[t][2]});
    }
    const Formula f = formula(4, raw);  // full universe: unsatisfiable
    REQUIRE(f.clauses.size() == 32);
    const Structure sat = saturate(build_ci3sat(f)).structure;
    REQUIRE(is_empty(sat).empty);

    const AuditReport rep = audit_structure(f, sat);
    CHECK(rep.coincidence_lhs == 0);
    CHECK(rep.coincidence_rhs == 0);
    CHECK(rep.all_pass());
}

TEST_CASE("audit passes 32 == 32 on the empty formula") {
    const Formula f{4, {}};
    const AuditReport rep = audit_structure(f, saturate(build_ci3sat(f)).structure);
    CHECK(rep.coincidence_lhs == 32);
    CHECK(rep.coincidence_rhs == 32);
    CHECK(rep.all_pass());
}

TEST_CASE("audit reports witnesses instead of throwing") {
    // A structure with one stray extra pattern and one missing pattern.
    const Formula f = demo_formula();
    Structure tampered = saturate(build_ci3sat(f)).structure;
    tampered.add({{1, 2, 3}, 0b111});     // not realized by any model
    tampered.remove({{2, 3, 4}, 0b111});  // breaks FTTT's containment

    const AuditReport rep = audit_structure(f, tampered);
    CHECK_FALSE(rep.all_pass());
    REQUIRE(rep.coverage_missing.size() == 1);
    CHECK(rep.coverage_missing[0] == AClausolaId{{1, 2, 3}, 0b111});
    REQUIRE(rep.maximality_violations.size() == 1);
    CHECK(rep.maximality_violations[0].assignment.str() == "FTTT");
    CHECK(rep.maximality_violations[0].missing == AClausolaId{{2, 3, 4}, 0b111});

    CHECK_THROWS_AS(audit_structure(Formula{21, {}}, Structure::full(21)),
                    std::invalid_argument);
}
