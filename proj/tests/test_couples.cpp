#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "common.hpp"
#include "intern_match/couples.hpp"
#include "intern_match/instances.hpp"

namespace {

double couple_marginal_error(const im::Problem& p, const im::Matrix& target,
                             const im::ConvexCombination& c) {
    im::Matrix mix = im::mixture_matrix(p, c);
    double worst = 0.0;
    for (int u = 0; u < p.num_units(); ++u) {
        if (!p.unit_is_couple(u)) continue;
        for (int i : p.unit_interns[u])
            for (int h = 0; h < p.num_hospitals(); ++h)
                worst = std::max(worst, std::abs(mix.at(i, h) - target.at(i, h)));
    }
    return worst;
}

}  // namespace

TEST_CASE("stage 1 on the one-couple instance") {
    im::Instance inst = one_couple_instance();
    im::Stage1Result r = im::stage1(inst.problem, inst.target);
    const im::Stage1Problem& s = r.problem;
    REQUIRE(s.couple_units.size() == 1);
    // One couple row (0.5, 0.5, 0) plus two dummy-agent rows holding the
    // rounded-up residual (0.5 at their hospital, 0.5 at the dummy).
    CHECK(s.m_prime.rows == 3);
    CHECK(s.m_prime.cols == 3);
    CHECK(s.m_prime.at(0, 0) == doctest::Approx(0.5));
    CHECK(s.m_prime.at(0, 1) == doctest::Approx(0.5));
    CHECK(s.m_prime.at(0, 2) == 0.0);
    CHECK(s.m_prime.at(1, 0) == doctest::Approx(0.5));
    CHECK(s.m_prime.at(1, 2) == doctest::Approx(0.5));
    CHECK(s.capacities == std::vector<int>{1, 1, 1});

    // Two realizations, weight 0.5 each, couple at h1 in one, h2 in the
    // other.
    REQUIRE(r.terms.size() == 2);
    double total = 0.0, at_h1 = 0.0;
    for (const auto& term : r.terms) {
        total += term.weight;
        if (term.couple_hospital[0] == 0) at_h1 += term.weight;
    }
    CHECK(total == doctest::Approx(1.0));
    CHECK(at_h1 == doctest::Approx(0.5));
}

TEST_CASE("stage 1 without couples is the trivial term") {
    im::Problem p = four_intern_example();
    im::Matrix m(4, 4);
    for (int i = 0; i < 4; ++i) m.at(i, i) = 1.0;
    im::Stage1Result r = im::stage1(p, m);
    REQUIRE(r.terms.size() == 1);
    CHECK(r.terms[0].weight == doctest::Approx(1.0));
    CHECK(r.terms[0].couple_hospital.empty());
}

TEST_CASE("stage 1 quota: couples occupy floor or ceil of q' in every realization") {
    im::Instance inst = im::gen_lower_bound(16);
    im::Stage1Result r = im::stage1(inst.problem, inst.target);
    int nh = inst.problem.num_hospitals();
    std::vector<double> weighted(nh, 0.0);
    for (const auto& term : r.terms) {
        std::vector<int> counts(nh, 0);
        for (int h : term.couple_hospital) ++counts[h];
        for (int h = 0; h < nh; ++h) {
            CHECK(counts[h] >= static_cast<int>(std::floor(r.problem.quota[h] - 1e-9)));
            CHECK(counts[h] <= static_cast<int>(std::ceil(r.problem.quota[h] + 1e-9)));
            weighted[h] += term.weight * counts[h];
        }
    }
    // The lambda-weighted couple count matches the fractional quota.
    for (int h = 0; h < nh; ++h) CHECK(weighted[h] == doctest::Approx(r.problem.quota[h]));
}

TEST_CASE("stage 2 deduction formula") {
    // Hospital h1 with singles weight 4 and excess 0.5 couple-units: each
    // single at h1 loses entry * (1/4) * 2 * 0.5 = entry / 4.
    im::Problem p;
    p.hospitals = {{"h1", 7}, {"h2", 5}};
    for (int i = 0; i < 8; ++i)
        p.units.push_back(im::DecisionUnit{"s" + std::to_string(i + 1), im::UnitKind::Single,
                                           {"s" + std::to_string(i + 1)}, {0, 1}});
    for (int c = 0; c < 2; ++c)
        p.units.push_back(im::DecisionUnit{"c" + std::to_string(c + 1), im::UnitKind::Couple,
                                           {"c" + std::to_string(c + 1) + ".1",
                                            "c" + std::to_string(c + 1) + ".2"},
                                           {0, 1}});
    p.build_index();
    im::Matrix m(p.num_interns(), 2);
    for (int i = 0; i < 8; ++i) {
        m.at(i, 0) = 0.5;
        m.at(i, 1) = 0.5;
    }
    for (int i = 8; i < 12; ++i) {
        m.at(i, 0) = 0.75;  // couples' quota at h1: 1.5
        m.at(i, 1) = 0.25;
    }
    REQUIRE(im::validate_target(p, m).empty());

    im::Stage1Problem s1 = im::build_stage1(p, m);
    CHECK(s1.quota[0] == doctest::Approx(1.5));
    // Realization with both couples at h1 exceeds the quota by 0.5.
    im::Stage2Problem s2 = im::build_stage2(p, m, s1, {2, 0});
    for (int i = 0; i < 8; ++i) {
        CHECK(s2.m_tilde.at(i, 0) == doctest::Approx(0.5 - 0.5 / 4.0));
        CHECK(s2.m_tilde.at(i, 1) == doctest::Approx(0.5));
        CHECK(s2.m_tilde.at(i, 2) == doctest::Approx(0.125));  // rerouted to the dummy
    }
    CHECK(s2.clamped_mass == 0.0);

    // Realization {1,1}: h1 stays under its 1.5 quota (untouched) while h2
    // exceeds its 0.5 quota by 0.5.
    im::Stage2Problem other = im::build_stage2(p, m, s1, {1, 1});
    for (int i = 0; i < 8; ++i) {
        CHECK(other.m_tilde.at(i, 0) == doctest::Approx(0.5));
        CHECK(other.m_tilde.at(i, 1) == doctest::Approx(0.5 - 0.5 / 4.0));
        CHECK(other.m_tilde.at(i, 2) == doctest::Approx(0.125));
    }
}

TEST_CASE("stitch places displaced singles by rank in id order") {
    im::Instance inst = one_couple_instance();
    const im::Problem& p = inst.problem;
    int couple = p.unit_index("c1");
    std::vector<int> single_units;
    for (int u = 0; u < p.num_units(); ++u)
        if (!p.unit_is_couple(u)) single_units.push_back(u);
    // Couple at h1; s1, s2 at h1; s4, s5, s6 at h2; s3 displaced (column 2
    // is the dummy). The only vacancy is at h2.
    im::Assignment a = im::stitch(p, {couple}, {0}, single_units, {0, 0, 2, 1, 1, 1});
    CHECK(im::validate_assignment(p, a).empty());
    CHECK(a.hospital_of[2] == 1);  // s3 reseated into the h2 vacancy
}

TEST_CASE("full approximation on the one-couple instance") {
    im::Instance inst = one_couple_instance();
    im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
    CHECK(im::validate_combination(inst.problem, c).empty());
    im::DecompositionReport report = im::approximation_error(inst.problem, inst.target, c);
    CHECK(report.max_l1 <= report.bound_upper + 1e-9);
    CHECK(report.bound_upper == doctest::Approx(0.5));
    CHECK(couple_marginal_error(inst.problem, inst.target, c) < 1e-9);
    // The brute-force oracle can never do worse than any decomposition.
    // (On this instance the singles are pinned, so the error is all on
    // layered displacement; the oracle finds 0 here.)
}

TEST_CASE("couple-free matrices decompose exactly") {
    im::Problem p = four_intern_example();
    im::Matrix m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int h = 0; h < 4; ++h) m.at(i, h) = 0.25;
    im::ConvexCombination c = im::approximate_decompose(p, m);
    im::DecompositionReport report = im::approximation_error(p, m, c);
    CHECK(report.max_l1 < 1e-9);
    CHECK(report.avg_l1 <= report.max_l1 + 1e-12);
}

TEST_CASE("error report on a deliberately wrong mixture") {
    im::Problem p = four_intern_example();
    im::Matrix m(4, 4);
    m.at(0, 0) = m.at(0, 1) = 0.5;
    m.at(1, 0) = m.at(1, 1) = 0.5;
    m.at(2, 2) = 1.0;
    m.at(3, 3) = 1.0;
    im::ConvexCombination c{{1.0, im::Assignment{{0, 1, 2, 3}}}};
    im::DecompositionReport report = im::approximation_error(p, m, c);
    CHECK(report.max_l1 == doctest::Approx(1.0));  // |1-0.5| + |0-0.5|
}

TEST_CASE("theoretical bound formulas") {
    im::Instance inst = one_couple_instance();  // min capacity 4
    im::TheoreticalBounds b = im::theoretical_bounds(inst.problem, inst.target, 1.0);
    CHECK(b.upper == doctest::Approx(0.5));
    CHECK(b.lower == doctest::Approx(1.0 / 3.0));
    // alpha -> infinity tends to 1/q and 1/(q+1).
    im::TheoreticalBounds big = im::theoretical_bounds(inst.problem, inst.target, 1e12);
    CHECK(big.upper == doctest::Approx(1.0 / 4.0).epsilon(1e-6));
    CHECK(big.lower == doctest::Approx(1.0 / 5.0).epsilon(1e-6));
    im::Instance lb = im::gen_lower_bound(16);  // q = 8
    im::TheoreticalBounds b8 = im::theoretical_bounds(lb.problem, lb.target, 1.0);
    CHECK(b8.upper == doctest::Approx(0.25));
    CHECK(b8.lower == doctest::Approx(0.2));
    CHECK_THROWS_AS(im::theoretical_bounds(lb.problem, lb.target, 0.0), std::invalid_argument);
}

TEST_CASE("adversarial instance lands inside the theoretical sandwich") {
    im::Instance inst = im::gen_lower_bound(16);  // q = 8
    im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
    CHECK(im::validate_combination(inst.problem, c).empty());
    im::DecompositionReport r = im::approximation_error(inst.problem, inst.target, c);
    CHECK(r.max_l1 >= 0.2 - 1e-9);
    CHECK(r.max_l1 <= 0.25 + 1e-9);
    CHECK(couple_marginal_error(inst.problem, inst.target, c) < 1e-9);
}

TEST_CASE("weights multiply out to 1 and couples stay together") {
    im::Instance inst = im::gen_lower_bound(8);
    im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
    double total = 0.0;
    for (const auto& wa : c) {
        total += wa.weight;
        for (int u = 0; u < inst.problem.num_units(); ++u) {
            if (!inst.problem.unit_is_couple(u)) continue;
            auto& interns = inst.problem.unit_interns[u];
            CHECK(wa.assignment.hospital_of[interns[0]] ==
                  wa.assignment.hospital_of[interns[1]]);
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("outside the singles-dominate domain the report flags clamping") {
    im::Instance inst = im::gen_small_probs(1, 1);
    CHECK(!im::domain_membership(inst.problem, inst.target, 1.0).in_domain);
    im::ApproximateDecomposition full =
        im::approximate_decompose_full(inst.problem, inst.target);
    CHECK(im::validate_combination(inst.problem, full.combination).empty());
    // Degrades gracefully: still a valid lottery, error reported honestly.
    im::DecompositionReport r =
        im::approximation_error(inst.problem, inst.target, full.combination);
    CHECK(r.max_l1 <= 2.0);
}
