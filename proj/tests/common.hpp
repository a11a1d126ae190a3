#pragma once

// Shared fixtures for the test suites.

#include <string>
#include <vector>

#include "intern_match/instances.hpp"
#include "intern_match/model.hpp"

namespace im = intern_match;

// Four singles (Alice, Diane, Bob, Charlie), four unit-capacity hospitals
// A..D. Everyone ranks A then B; Alice and Diane finish C,D; Bob and
// Charlie finish D,C.
inline im::Problem four_intern_example() {
    im::Problem p;
    p.hospitals = {{"A", 1}, {"B", 1}, {"C", 1}, {"D", 1}};
    auto single = [](const std::string& id, std::vector<int> r) {
        return im::DecisionUnit{id, im::UnitKind::Single, {id}, std::move(r)};
    };
    p.units.push_back(single("Alice", {0, 1, 2, 3}));
    p.units.push_back(single("Diane", {0, 1, 2, 3}));
    p.units.push_back(single("Bob", {0, 1, 3, 2}));
    p.units.push_back(single("Charlie", {0, 1, 3, 2}));
    p.build_index();
    return p;
}

// One couple (0.5/0.5 over two capacity-4 hospitals) plus six pinned
// singles; lies in the singles-dominate domain.
inline im::Instance one_couple_instance() {
    im::Instance inst;
    im::Problem& p = inst.problem;
    p.hospitals = {{"h1", 4}, {"h2", 4}};
    auto single = [](const std::string& id, std::vector<int> r) {
        return im::DecisionUnit{id, im::UnitKind::Single, {id}, std::move(r)};
    };
    for (int i = 0; i < 3; ++i)
        p.units.push_back(single("s" + std::to_string(i + 1), {0, 1}));
    for (int i = 3; i < 6; ++i)
        p.units.push_back(single("s" + std::to_string(i + 1), {1, 0}));
    p.units.push_back(im::DecisionUnit{"c1", im::UnitKind::Couple, {"c1.1", "c1.2"}, {0, 1}});
    p.build_index();
    inst.target = im::Matrix(p.num_interns(), 2);
    for (int i = 0; i < 3; ++i) inst.target.at(i, 0) = 1.0;
    for (int i = 3; i < 6; ++i) inst.target.at(i, 1) = 1.0;
    inst.target.at(6, 0) = inst.target.at(6, 1) = 0.5;
    inst.target.at(7, 0) = inst.target.at(7, 1) = 0.5;
    return inst;
}
