#pragma once

// Two-stage approximate decomposition of stochastic assignment matrices
// with couples. Stage 1 allocates couples exactly their demanded capacity
// through a couple-free auxiliary matrix with one dummy agent per hospital
// and a dummy hospital absorbing the leftovers. Stage 2, per stage-1
// realization, scales singles' demand down wherever couples exceeded their
// fractional quota, decomposes the singles matrix, and stitches both parts
// into valid deterministic assignments. On the singles-dominate domain the
// max row-L1 error is at most 2 / (smallest capacity).

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "intern_match/bvn.hpp"
#include "intern_match/model.hpp"

namespace intern_match {

namespace detail {

// Ceiling with a tolerance so that sums that are integers up to dust are
// not rounded up a full unit.
inline long ceil_tol(double x) { return static_cast<long>(std::ceil(x - kMatrixTol)); }

}  // namespace detail

// The couple-free stage-1 matrix M': rows are couples followed by one dummy
// agent per hospital, columns are the hospitals followed by the dummy
// hospital. Column h sums to ceil(couples' demand at h); the dummy hospital
// column is integral automatically because every row sums to 1.
struct Stage1Problem {
    std::vector<int> couple_units;   // unit indices of the couples, row order of M'
    Matrix m_prime;                  // (couples + |H|) x (|H| + 1)
    std::vector<int> capacities;     // per column of m_prime
    std::vector<double> quota;       // q'_h = couples' probability mass at h
};

// A stage-1 realization: hospital per couple (couples never land in the
// dummy hospital since their rows have no mass there).
struct Stage1Term {
    double weight = 0.0;
    std::vector<int> couple_hospital;  // per entry of couple_units
};

struct Stage1Result {
    Stage1Problem problem;
    std::vector<Stage1Term> terms;
};

inline Stage1Problem build_stage1(const Problem& p, const Matrix& m) {
    Stage1Problem s;
    for (int u = 0; u < p.num_units(); ++u)
        if (p.unit_is_couple(u)) s.couple_units.push_back(u);
    int nc = static_cast<int>(s.couple_units.size());
    int nh = p.num_hospitals();
    s.m_prime = Matrix(nc + nh, nh + 1);
    s.quota.assign(nh, 0.0);
    for (int c = 0; c < nc; ++c) {
        int row = p.unit_interns[s.couple_units[c]][0];
        for (int h = 0; h < nh; ++h) {
            s.m_prime.at(c, h) = m.at(row, h);
            s.quota[h] += m.at(row, h);
        }
    }
    s.capacities.assign(nh + 1, 0);
    for (int h = 0; h < nh; ++h) {
        long cap = detail::ceil_tol(s.quota[h]);
        s.capacities[h] = static_cast<int>(cap);
        double gap = static_cast<double>(cap) - s.quota[h];
        if (gap < 0.0) gap = 0.0;
        s.m_prime.at(nc + h, h) = gap;
        s.m_prime.at(nc + h, nh) = 1.0 - gap;
    }
    // Rows all sum to 1, so the dummy-hospital column sum is an integer.
    long total = nc + nh;
    for (int h = 0; h < nh; ++h) total -= s.capacities[h];
    if (total < 0)
        throw std::runtime_error("build_stage1: negative dummy-hospital capacity");
    s.capacities[nh] = static_cast<int>(total);
    return s;
}

inline Stage1Result stage1(const Problem& p, const Matrix& m) {
    Stage1Result result;
    result.problem = build_stage1(p, m);
    const Stage1Problem& s = result.problem;
    int nc = static_cast<int>(s.couple_units.size());
    if (nc == 0) {
        result.terms.push_back({1.0, {}});
        return result;
    }
    for (TransportTerm& t : decompose_transportation(s.m_prime, s.capacities)) {
        Stage1Term term;
        term.weight = t.weight;
        term.couple_hospital.assign(t.column_of.begin(), t.column_of.begin() + nc);
        result.terms.push_back(std::move(term));
    }
    return result;
}

// The singles matrix for one stage-1 realization, padded with one dummy
// intern per hospital so every column capacity is integral.
struct Stage2Problem {
    std::vector<int> single_units;   // unit indices of the singles
    Matrix m_tilde;                  // (singles + |H|) x (|H| + 1); dummy rows appended
    std::vector<int> capacities;     // per column
    int num_singles = 0;
    double clamped_mass = 0.0;       // mass clamped at 0 outside the S>=C domain
};

inline Stage2Problem build_stage2(const Problem& p, const Matrix& m,
                                  const Stage1Problem& s1,
                                  const std::vector<int>& couples_at_hospital) {
    Stage2Problem s;
    for (int u = 0; u < p.num_units(); ++u)
        if (!p.unit_is_couple(u)) s.single_units.push_back(u);
    int ns = static_cast<int>(s.single_units.size());
    int nh = p.num_hospitals();
    s.num_singles = ns;
    s.m_tilde = Matrix(ns + nh, nh + 1);

    std::vector<double> singles_demand(nh, 0.0);
    for (int i = 0; i < ns; ++i) {
        int row = p.unit_interns[s.single_units[i]][0];
        for (int h = 0; h < nh; ++h) singles_demand[h] += m.at(row, h);
    }
    for (int i = 0; i < ns; ++i) {
        int row = p.unit_interns[s.single_units[i]][0];
        double placed = 0.0;
        for (int h = 0; h < nh; ++h) {
            double entry = m.at(row, h);
            double excess = static_cast<double>(couples_at_hospital[h]) - s1.quota[h];
            if (excess > kMatrixTol && entry > 0.0) {
                entry -= entry / singles_demand[h] * 2.0 * excess;
                if (entry < 0.0) {
                    // Outside the S>=C domain the deduction can overshoot;
                    // clamp and report the lost mass.
                    s.clamped_mass += -entry;
                    entry = 0.0;
                }
            }
            s.m_tilde.at(i, h) = entry;
            placed += entry;
        }
        s.m_tilde.at(i, nh) = std::max(0.0, 1.0 - placed);
    }
    s.capacities.assign(nh + 1, 0);
    for (int h = 0; h < nh; ++h) {
        double col = s.m_tilde.col_sum(h);
        long cap = detail::ceil_tol(col);
        s.capacities[h] = static_cast<int>(cap);
        double gap = static_cast<double>(cap) - col;
        if (gap < 0.0) gap = 0.0;
        s.m_tilde.at(ns + h, h) = gap;
        s.m_tilde.at(ns + h, nh) = 1.0 - gap;
    }
    long total = ns + nh;
    for (int h = 0; h < nh; ++h) total -= s.capacities[h];
    if (total < 0)
        throw std::runtime_error("build_stage2: negative dummy-hospital capacity");
    s.capacities[nh] = static_cast<int>(total);
    return s;
}

// Merges a couples realization and a singles realization into one valid
// assignment. Singles parked at the dummy hospital take the remaining
// vacancies deterministically: in ascending intern-row order, each picks
// the vacant hospital it ranks highest.
inline Assignment stitch(const Problem& p, const std::vector<int>& couple_units,
                         const std::vector<int>& couple_hospital,
                         const std::vector<int>& single_units,
                         const std::vector<int>& single_hospital) {
    int nh = p.num_hospitals();
    Assignment a;
    a.hospital_of.assign(p.num_interns(), -1);
    std::vector<int> vacancies(nh);
    for (int h = 0; h < nh; ++h) vacancies[h] = p.hospitals[h].capacity;

    for (std::size_t c = 0; c < couple_units.size(); ++c) {
        int h = couple_hospital[c];
        for (int i : p.unit_interns[couple_units[c]]) a.hospital_of[i] = h;
        vacancies[h] -= 2;
    }
    // Outside the S>=C domain an odd-capacity hospital can end up a seat
    // short when couples land their rounded-up quota. Fix it before the
    // singles claim seats: relocate couples (largest unit index first) to
    // the lowest-index hospital with two vacancies. If none exists the
    // realization has no valid repair.
    for (int h = 0; h < nh; ++h) {
        while (vacancies[h] < 0) {
            int move_unit = -1;
            for (std::size_t c = couple_units.size(); c-- > 0;) {
                if (a.hospital_of[p.unit_interns[couple_units[c]][0]] == h) {
                    move_unit = static_cast<int>(c);
                    break;
                }
            }
            int target = -1;
            for (int h2 = 0; h2 < nh && target < 0; ++h2)
                if (h2 != h && vacancies[h2] >= 2) target = h2;
            if (move_unit < 0 || target < 0)
                throw std::runtime_error("stitch: seat accounting mismatch (overfull hospital)");
            for (int i : p.unit_interns[couple_units[move_unit]]) a.hospital_of[i] = target;
            vacancies[h] += 2;
            vacancies[target] -= 2;
        }
    }
    // Singles land where stage 2 put them when a seat remains; anyone at
    // the dummy hospital, or squeezed out by a relocated couple, is
    // reseated below.
    std::vector<int> displaced;
    for (std::size_t sidx = 0; sidx < single_units.size(); ++sidx) {
        int u = single_units[sidx];
        int row = p.unit_interns[u][0];
        int h = single_hospital[sidx];
        if (h >= nh || vacancies[h] <= 0) {
            displaced.push_back(row);
        } else {
            a.hospital_of[row] = h;
            --vacancies[h];
        }
    }

    std::sort(displaced.begin(), displaced.end());
    for (int row : displaced) {
        int u = p.intern_unit[row];
        int chosen = -1;
        for (int h : p.units[u].ranking) {
            if (vacancies[h] > 0) {
                chosen = h;
                break;
            }
        }
        if (chosen < 0)
            throw std::runtime_error("stitch: seat accounting mismatch (no vacancy left)");
        a.hospital_of[row] = chosen;
        --vacancies[chosen];
    }
    return a;
}

struct DecompositionReport {
    std::vector<double> row_l1;       // per intern
    double max_l1 = 0.0;              // the epsilon metric
    double avg_l1 = 0.0;
    double bound_upper = 0.0;         // 2/q at alpha=1, 1/((a/(1+a)) q) generally
    double bound_lower = 0.0;         // 2/(q+2) at alpha=1
    double bound_upper_tight = 0.0;   // 1 / (min singles demand across hospitals)
    double clamped_mass = 0.0;        // stage-2 mass clamped outside S>=C
    bool clamped = false;
};

struct TheoreticalBounds {
    double upper = 0.0;
    double lower = 0.0;
    double upper_tight = 0.0;
};

inline TheoreticalBounds theoretical_bounds(const Problem& p, const Matrix& m, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("theoretical_bounds: alpha must be > 0");
    TheoreticalBounds b;
    double q = static_cast<double>(p.min_capacity());
    double factor = alpha / (1.0 + alpha);
    b.upper = 1.0 / (factor * q);
    b.lower = 1.0 / (factor * q + 1.0);
    double min_singles = -1.0;
    for (int h = 0; h < p.num_hospitals(); ++h) {
        double d = 0.0;
        for (int u = 0; u < p.num_units(); ++u)
            if (!p.unit_is_couple(u)) d += m.at(p.unit_interns[u][0], h);
        if (min_singles < 0.0 || d < min_singles) min_singles = d;
    }
    b.upper_tight = min_singles > 0.0 ? 1.0 / min_singles : b.upper;
    return b;
}

inline DecompositionReport approximation_error(const Problem& p, const Matrix& target,
                                               const ConvexCombination& combination,
                                               double alpha = 1.0) {
    Matrix mix = mixture_matrix(p, combination);
    DecompositionReport r;
    r.row_l1.resize(p.num_interns());
    double sum = 0.0;
    for (int i = 0; i < p.num_interns(); ++i) {
        double l1 = 0.0;
        for (int h = 0; h < p.num_hospitals(); ++h)
            l1 += std::abs(target.at(i, h) - mix.at(i, h));
        r.row_l1[i] = l1;
        r.max_l1 = std::max(r.max_l1, l1);
        sum += l1;
    }
    r.avg_l1 = p.num_interns() > 0 ? sum / p.num_interns() : 0.0;
    TheoreticalBounds b = theoretical_bounds(p, target, alpha);
    r.bound_upper = b.upper;
    r.bound_lower = b.lower;
    r.bound_upper_tight = b.upper_tight;
    return r;
}

struct ApproximateDecomposition {
    ConvexCombination combination;
    double clamped_mass = 0.0;
};

inline ApproximateDecomposition approximate_decompose_full(const Problem& p, const Matrix& m) {
    auto violations = validate_target(p, m);
    if (!violations.empty())
        throw std::invalid_argument("approximate_decompose: invalid target matrix: " +
                                    violations.front().path + ": " +
                                    violations.front().message);

    ApproximateDecomposition out;
    Stage1Result s1 = stage1(p, m);
    const std::vector<int>& couple_units = s1.problem.couple_units;
    std::vector<int> single_units;
    for (int u = 0; u < p.num_units(); ++u)
        if (!p.unit_is_couple(u)) single_units.push_back(u);
    int nh = p.num_hospitals();

    // Stage 2 depends on the realization only through the per-hospital
    // couple counts; group realizations accordingly to avoid redundant
    // decompositions.
    std::map<std::vector<int>, std::vector<std::pair<double, std::vector<int>>>> by_counts;
    for (const Stage1Term& term : s1.terms) {
        std::vector<int> counts(nh, 0);
        for (int h : term.couple_hospital) ++counts[h];
        by_counts[counts].push_back({term.weight, term.couple_hospital});
    }

    // Deterministic merge: assignments keyed for weight aggregation.
    std::map<std::vector<int>, double> merged;
    for (const auto& [counts, realizations] : by_counts) {
        Stage2Problem s2 = build_stage2(p, m, s1.problem, counts);
        out.clamped_mass += s2.clamped_mass;
        auto singles_terms = decompose_transportation(s2.m_tilde, s2.capacities);
        for (const auto& [k_weight, couple_hospital] : realizations) {
            for (const TransportTerm& st : singles_terms) {
                std::vector<int> single_hospital(st.column_of.begin(),
                                                 st.column_of.begin() + s2.num_singles);
                Assignment a = stitch(p, couple_units, couple_hospital,
                                      single_units, single_hospital);
                merged[a.hospital_of] += k_weight * st.weight;
            }
        }
    }
    for (auto& [hospital_of, weight] : merged)
        out.combination.push_back({weight, Assignment{hospital_of}});
    return out;
}

inline ConvexCombination approximate_decompose(const Problem& p, const Matrix& m) {
    return approximate_decompose_full(p, m).combination;
}

}  // namespace intern_match
