#pragma once

// Hospital ratings (first-choice counts and rank-weighted scores) and the
// preference-heterogeneity statistics: same-area top-k fractions and the
// top-triplet frequency distribution.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "intern_match/model.hpp"

namespace intern_match {

struct HospitalRating {
    std::vector<double> score;  // per hospital
    std::vector<int> rank;      // 1 = best; ties broken by hospital index (id order)
};

namespace detail {

inline void fill_ranks(HospitalRating& r) {
    int nh = static_cast<int>(r.score.size());
    std::vector<int> idx(nh);
    for (int h = 0; h < nh; ++h) idx[h] = h;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (r.score[a] != r.score[b]) return r.score[a] > r.score[b];
        return a < b;
    });
    r.rank.assign(nh, 0);
    for (int pos = 0; pos < nh; ++pos) r.rank[idx[pos]] = pos + 1;
}

}  // namespace detail

// Count of interns ranking each hospital first (a couple counts as two
// interns: ratings describe interns, not decision units).
inline HospitalRating rating_first_choice(const Problem& p) {
    HospitalRating r;
    r.score.assign(p.num_hospitals(), 0.0);
    for (const DecisionUnit& u : p.units)
        r.score[u.ranking.front()] += static_cast<double>(u.seats());
    detail::fill_ranks(r);
    return r;
}

// Rank-weighted score: sum over interns of (m - rank + 1)^2.
inline HospitalRating rating_weighted(const Problem& p) {
    HospitalRating r;
    r.score.assign(p.num_hospitals(), 0.0);
    int m = p.num_hospitals();
    for (const DecisionUnit& u : p.units) {
        for (std::size_t pos = 0; pos < u.ranking.size(); ++pos) {
            double v = static_cast<double>(m - static_cast<int>(pos));
            r.score[u.ranking[pos]] += u.seats() * v * v;
        }
    }
    detail::fill_ranks(r);
    return r;
}

// For k = 2..k_max: fraction of interns whose top k choices (after removing
// the excluded hospital, if any) all come from one area. area_map[h] is the
// area index of hospital h.
inline std::vector<double> same_area_topk(const Problem& p, const std::vector<int>& area_map,
                                          int k_max, int excluded_hospital = -1) {
    if (static_cast<int>(area_map.size()) != p.num_hospitals())
        throw std::invalid_argument("same_area_topk: area map must cover all hospitals");
    std::vector<double> fractions;
    double total_interns = 0.0;
    for (const DecisionUnit& u : p.units) total_interns += u.seats();
    for (int k = 2; k <= k_max; ++k) {
        double hits = 0.0;
        for (const DecisionUnit& u : p.units) {
            std::vector<int> top;
            for (int h : u.ranking) {
                if (h == excluded_hospital) continue;
                top.push_back(h);
                if (static_cast<int>(top.size()) == k) break;
            }
            if (static_cast<int>(top.size()) < k) continue;
            bool same = std::all_of(top.begin(), top.end(), [&](int h) {
                return area_map[h] == area_map[top.front()];
            });
            if (same) hits += u.seats();
        }
        fractions.push_back(hits / total_interns);
    }
    return fractions;
}

struct TripletDistribution {
    // Ordered top-3 triplets sorted by descending frequency.
    std::vector<std::tuple<int, int, int>> triplets;
    std::vector<double> density;     // fraction of interns per triplet
    std::vector<double> cumulative;  // nondecreasing, ends at 1
};

inline TripletDistribution top_triplet_distribution(const Problem& p) {
    if (p.num_hospitals() < 3)
        throw std::invalid_argument("top_triplet_distribution: needs at least 3 hospitals");
    std::map<std::tuple<int, int, int>, double> counts;
    double total = 0.0;
    for (const DecisionUnit& u : p.units) {
        counts[{u.ranking[0], u.ranking[1], u.ranking[2]}] += u.seats();
        total += u.seats();
    }
    std::vector<std::pair<std::tuple<int, int, int>, double>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    TripletDistribution d;
    double acc = 0.0;
    for (const auto& [triplet, count] : sorted) {
        d.triplets.push_back(triplet);
        d.density.push_back(count / total);
        acc += count / total;
        d.cumulative.push_back(acc);
    }
    return d;
}

}  // namespace intern_match
