#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <tuple>

#include "common.hpp"
#include "intern_match/rating.hpp"

TEST_CASE("first-choice rating on the four-intern example") {
    im::Problem p = four_intern_example();
    im::HospitalRating r = im::rating_first_choice(p);
    CHECK(r.score == std::vector<double>{4.0, 0.0, 0.0, 0.0});
    CHECK(r.rank[0] == 1);
    // Ties among B, C, D broken by hospital index.
    CHECK(r.rank[1] == 2);
    CHECK(r.rank[2] == 3);
    CHECK(r.rank[3] == 4);
}

TEST_CASE("couples count two interns in first-choice scores") {
    im::Instance inst = one_couple_instance();
    im::HospitalRating r = im::rating_first_choice(inst.problem);
    // 3 singles + the couple (2 interns) rank h1 first.
    CHECK(r.score[0] == 5.0);
    CHECK(r.score[1] == 3.0);
}

TEST_CASE("weighted rating on the four-intern example") {
    im::Problem p = four_intern_example();
    im::HospitalRating r = im::rating_weighted(p);
    CHECK(r.score == std::vector<double>{64.0, 36.0, 10.0, 10.0});
    CHECK(r.rank == std::vector<int>{1, 2, 3, 4});
    // Sum over hospitals is |I| * sum of squared weights.
    double total = 0.0;
    for (double s : r.score) total += s;
    CHECK(total == doctest::Approx(4.0 * (16 + 9 + 4 + 1)));
}

TEST_CASE("same-area top-k fractions") {
    im::Problem p = four_intern_example();
    // A and B share an area; C and D each their own.
    std::vector<int> areas{0, 0, 1, 2};
    auto frac = im::same_area_topk(p, areas, 3);
    REQUIRE(frac.size() == 2);  // k = 2 and k = 3
    CHECK(frac[0] == doctest::Approx(1.0));  // everyone's top-2 is {A, B}
    CHECK(frac[1] == doctest::Approx(0.0));  // third choice leaves the area
    CHECK_THROWS_AS(im::same_area_topk(p, {0, 0}, 2), std::invalid_argument);
}

TEST_CASE("top-triplet distribution") {
    im::Problem p = four_intern_example();
    im::TripletDistribution t = im::top_triplet_distribution(p);
    REQUIRE(t.triplets.size() == 2);
    CHECK(t.density[0] == doctest::Approx(0.5));
    CHECK(t.density[1] == doctest::Approx(0.5));
    CHECK(t.cumulative.back() == doctest::Approx(1.0));
    std::set<std::tuple<int, int, int>> seen(t.triplets.begin(), t.triplets.end());
    CHECK(seen.count({0, 1, 2}) == 1);  // (A,B,C)
    CHECK(seen.count({0, 1, 3}) == 1);  // (A,B,D)
}
