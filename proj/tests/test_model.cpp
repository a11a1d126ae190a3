#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "common.hpp"
#include "intern_match/model.hpp"

TEST_CASE("valid problem passes validation") {
    im::Problem p = four_intern_example();
    CHECK(im::validate_problem(p).empty());
    CHECK(p.num_interns() == 4);
    CHECK(p.num_hospitals() == 4);
    CHECK(p.total_capacity() == 4);
    CHECK(p.min_capacity() == 1);
}

TEST_CASE("rank lookup") {
    im::Problem p = four_intern_example();
    int alice = p.unit_index("Alice");
    CHECK(im::rank_of(p, alice, p.hospital_index("C")) == 3);
    int bob = p.unit_index("Bob");
    CHECK(im::rank_of(p, bob, p.hospital_index("C")) == 4);
    CHECK_THROWS_AS(im::rank_of(p, alice, 99), std::out_of_range);
}

TEST_CASE("capacity/intern mismatch is flagged") {
    im::Problem p = four_intern_example();
    p.hospitals[0].capacity = 2;
    auto v = im::validate_problem(p);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& violation : v) found |= violation.path == "hospitals";
    CHECK(found);
}

TEST_CASE("duplicate ids and partial rankings are flagged") {
    im::Problem p = four_intern_example();
    p.units[1].id = "Alice";
    p.units[1].members = {"Alice"};
    p.units[2].ranking.pop_back();
    p.build_index();
    auto v = im::validate_problem(p);
    bool dup_unit = false, dup_intern = false, bad_ranking = false;
    for (const auto& violation : v) {
        dup_unit |= violation.message == "duplicate unit id";
        dup_intern |= violation.message == "duplicate intern id";
        bad_ranking |= violation.path == "units/Bob/ranking";
    }
    CHECK(dup_unit);
    CHECK(dup_intern);
    CHECK(bad_ranking);
}

TEST_CASE("target matrix validation") {
    im::Instance inst = one_couple_instance();
    CHECK(im::validate_target(inst.problem, inst.target).empty());

    SUBCASE("row sum violation") {
        inst.target.at(0, 0) = 0.9;
        CHECK(!im::validate_target(inst.problem, inst.target).empty());
    }
    SUBCASE("couple rows must be bitwise equal") {
        inst.target.at(7, 0) += 1e-12;
        inst.target.at(7, 1) -= 1e-12;
        auto v = im::validate_target(inst.problem, inst.target);
        bool couple = false;
        for (const auto& violation : v) couple |= violation.path == "matrix/c1";
        CHECK(couple);
    }
    SUBCASE("column sum must match capacity") {
        // Swap mass between two singles' rows in the same column pair keeps
        // rows valid but breaks columns only if asymmetric.
        inst.target.at(0, 0) = 0.5;
        inst.target.at(0, 1) = 0.5;
        auto v = im::validate_target(inst.problem, inst.target);
        bool column = false;
        for (const auto& violation : v)
            column |= violation.message == "column sum does not equal capacity";
        CHECK(column);
    }
}

TEST_CASE("assignment validation and mixtures") {
    im::Problem p = four_intern_example();
    im::Assignment a{{0, 1, 2, 3}};
    CHECK(im::validate_assignment(p, a).empty());
    im::Assignment b{{1, 0, 3, 2}};
    im::ConvexCombination c{{0.5, a}, {0.5, b}};
    CHECK(im::validate_combination(p, c).empty());
    im::Matrix mix = im::mixture_matrix(p, c);
    CHECK(mix.at(0, 0) == doctest::Approx(0.5));
    CHECK(mix.at(0, 1) == doctest::Approx(0.5));
    CHECK(mix.row_sum(2) == doctest::Approx(1.0));

    c[0].weight = 0.6;
    CHECK(!im::validate_combination(p, c).empty());
}

TEST_CASE("couple split is an invalid assignment") {
    im::Instance inst = one_couple_instance();
    im::Assignment a{{0, 0, 0, 1, 1, 1, 0, 1}};  // couple split across h1/h2
    auto v = im::validate_assignment(inst.problem, a);
    bool split = false;
    for (const auto& violation : v) split |= violation.message == "couple split";
    CHECK(split);
}

TEST_CASE("domain membership") {
    im::Instance inst = one_couple_instance();
    CHECK(im::domain_membership(inst.problem, inst.target, 1.0).in_domain);
    // At alpha = 3 the couple demand (2 * 0.5) outweighs the singles (3).
    CHECK(!im::domain_membership(inst.problem, inst.target, 3.1).in_domain);
}

TEST_CASE("capacity reduction for direct pickers") {
    im::Problem p = four_intern_example();
    im::Problem q = im::with_reduced_capacity(p, {{"A", 1}});
    CHECK(q.hospitals[0].capacity == 0);
    CHECK_THROWS_AS(im::with_reduced_capacity(p, {{"A", 2}}), std::invalid_argument);
    CHECK_THROWS_AS(im::with_reduced_capacity(p, {{"Z", 1}}), std::invalid_argument);
}
