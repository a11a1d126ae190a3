#pragma once

// Generators for adversarial and random instances (the two-hospital lower
// bound, the small-probabilities instance, the edge-coloring reduction,
// iterative-scaling random matrices, capacity-driven couples, subsampled
// markets) and a brute-force decomposition oracle for tiny instances.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "intern_match/couples.hpp"
#include "intern_match/model.hpp"
#include "intern_match/rng.hpp"
#include "intern_match/simplex.hpp"

namespace intern_match {

struct Instance {
    Problem problem;
    Matrix target;
};

namespace detail {

inline std::vector<int> straight_ranking(int m, int first) {
    std::vector<int> r;
    r.push_back(first);
    for (int h = 0; h < m; ++h)
        if (h != first) r.push_back(h);
    return r;
}

inline DecisionUnit make_single(const std::string& id, std::vector<int> ranking) {
    return DecisionUnit{id, UnitKind::Single, {id}, std::move(ranking)};
}

inline DecisionUnit make_couple(const std::string& id, std::vector<int> ranking) {
    return DecisionUnit{id, UnitKind::Couple, {id + ".1", id + ".2"}, std::move(ranking)};
}

}  // namespace detail

// The two-hospital adversarial instance: q = 4*ceil(n/8); q/2+1 singles
// pinned at each hospital, q/4-1 couples pinned at each, and one couple
// split 0.5/0.5. Lies in the S>=C domain; no algorithm beats 2/(q+2) on it.
inline Instance gen_lower_bound(int n) {
    if (n < 8) throw std::invalid_argument("gen_lower_bound: n must be >= 8");
    int q = 4 * ((n + 7) / 8);
    Instance inst;
    Problem& p = inst.problem;
    p.hospitals = {{"h", q}, {"h2", q}};
    int singles_per_side = q / 2 + 1;
    int couples_per_side = q / 4 - 1;
    for (int side = 0; side < 2; ++side) {
        std::string tag = side == 0 ? "s" : "s'";
        for (int i = 0; i < singles_per_side; ++i)
            p.units.push_back(detail::make_single(tag + std::to_string(i + 1),
                                                  detail::straight_ranking(2, side)));
    }
    p.units.push_back(detail::make_couple("c*", detail::straight_ranking(2, 0)));
    for (int side = 0; side < 2; ++side) {
        std::string tag = side == 0 ? "c" : "c'";
        for (int i = 0; i < couples_per_side; ++i)
            p.units.push_back(detail::make_couple(tag + std::to_string(i + 1),
                                                  detail::straight_ranking(2, side)));
    }
    p.build_index();

    Matrix& m = inst.target;
    m = Matrix(p.num_interns(), 2);
    for (int u = 0; u < p.num_units(); ++u) {
        const std::string& id = p.units[u].id;
        for (int i : p.unit_interns[u]) {
            if (id == "c*") {
                m.at(i, 0) = 0.5;
                m.at(i, 1) = 0.5;
            } else {
                int side = id.find('\'') != std::string::npos ? 1 : 0;
                m.at(i, side) = 1.0;
            }
        }
    }
    return inst;
}

// The small-probabilities instance: 4m hospitals of capacity 2k+1;
// 2m(2k+1) singles uniform over the primed half, (2k+1)m couples uniform
// over the unprimed half. Not in the S>=C domain.
inline Instance gen_small_probs(int m_param, int k_param) {
    if (m_param < 1 || k_param < 1)
        throw std::invalid_argument("gen_small_probs: m and k must be >= 1");
    Instance inst;
    Problem& p = inst.problem;
    int cap = 2 * k_param + 1;
    int half = 2 * m_param;
    for (int h = 0; h < half; ++h) p.hospitals.push_back({"h" + std::to_string(h + 1), cap});
    for (int h = 0; h < half; ++h) p.hospitals.push_back({"h'" + std::to_string(h + 1), cap});

    // Singles rank the primed hospitals (their support) first.
    std::vector<int> singles_ranking, couples_ranking;
    for (int h = 0; h < half; ++h) singles_ranking.push_back(half + h);
    for (int h = 0; h < half; ++h) singles_ranking.push_back(h);
    for (int h = 0; h < half; ++h) couples_ranking.push_back(h);
    for (int h = 0; h < half; ++h) couples_ranking.push_back(half + h);

    int num_singles = half * cap;
    int num_couples = cap * m_param;
    for (int i = 0; i < num_singles; ++i)
        p.units.push_back(detail::make_single("s" + std::to_string(i + 1), singles_ranking));
    for (int i = 0; i < num_couples; ++i)
        p.units.push_back(detail::make_couple("c" + std::to_string(i + 1), couples_ranking));
    p.build_index();

    Matrix& m = inst.target;
    m = Matrix(p.num_interns(), p.num_hospitals());
    double prob = 1.0 / half;
    for (int u = 0; u < p.num_units(); ++u)
        for (int i : p.unit_interns[u])
            for (int h = 0; h < half; ++h)
                m.at(i, p.unit_is_couple(u) ? h : half + h) = prob;
    return inst;
}

struct CubicGraph {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;

    bool is_cubic() const {
        std::vector<int> degree(num_vertices, 0);
        for (auto [u, v] : edges) {
            if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices || u == v) return false;
            ++degree[u];
            ++degree[v];
        }
        return std::all_of(degree.begin(), degree.end(), [](int d) { return d == 3; });
    }
};

inline CubicGraph k4_graph() {
    return CubicGraph{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
}

using EdgeColoring = std::vector<int>;  // per edge: 0, 1, or 2

inline bool coloring_is_proper(const CubicGraph& g, const EdgeColoring& coloring) {
    if (coloring.size() != g.edges.size()) return false;
    for (std::size_t a = 0; a < g.edges.size(); ++a) {
        if (coloring[a] < 0 || coloring[a] > 2) return false;
        for (std::size_t b = a + 1; b < g.edges.size(); ++b) {
            bool incident = g.edges[a].first == g.edges[b].first ||
                            g.edges[a].first == g.edges[b].second ||
                            g.edges[a].second == g.edges[b].first ||
                            g.edges[a].second == g.edges[b].second;
            if (incident && coloring[a] == coloring[b]) return false;
        }
    }
    return true;
}

inline EdgeColoring k4_coloring() { return {0, 1, 2, 2, 1, 0}; }

namespace detail {

// Hospital layout of the reduction: per edge e, three capacity-2 hospitals
// A(e), B(e), C(e) at indices 3e..3e+2; then per (vertex, color) one
// capacity-1 hospital at 3|E| + 3v + color.
inline int edge_hospital(int edge, int slot) { return 3 * edge + slot; }
inline int vertex_hospital(const CubicGraph& g, int vertex, int color) {
    return 3 * static_cast<int>(g.edges.size()) + 3 * vertex + color;
}

}  // namespace detail

// The NP-hardness reduction instance from a cubic graph: the target matrix
// is decomposable iff the graph is 3-edge colorable.
inline Instance gen_coloring_reduction(const CubicGraph& g) {
    if (!g.is_cubic())
        throw std::invalid_argument("gen_coloring_reduction: graph is not cubic");
    Instance inst;
    Problem& p = inst.problem;
    int me = static_cast<int>(g.edges.size());
    for (int e = 0; e < me; ++e)
        for (int slot = 0; slot < 3; ++slot) {
            std::string name = std::string(1, static_cast<char>('A' + slot));
            p.hospitals.push_back({name + "(" + std::to_string(e) + ")", 2});
        }
    for (int v = 0; v < g.num_vertices; ++v)
        for (int color = 0; color < 3; ++color)
            p.hospitals.push_back({"(" + std::to_string(v) + "," + std::to_string(color + 1) + ")", 1});
    int nh = static_cast<int>(p.hospitals.size());

    auto ranking_with = [&](std::vector<int> head) {
        std::vector<char> taken(nh, 0);
        for (int h : head) taken[h] = 1;
        for (int h = 0; h < nh; ++h)
            if (!taken[h]) head.push_back(h);
        return head;
    };

    for (int e = 0; e < me; ++e) {
        auto [u, v] = g.edges[e];
        std::string tag = "e" + std::to_string(e);
        p.units.push_back(detail::make_couple(
            tag + ".c", ranking_with({detail::edge_hospital(e, 0), detail::edge_hospital(e, 1),
                                      detail::edge_hospital(e, 2)})));
        for (int sidx = 0; sidx < 6; ++sidx) {
            int slot = sidx / 2;
            int vertex = sidx % 2 == 0 ? u : v;
            p.units.push_back(detail::make_single(
                tag + ".s" + std::to_string(sidx + 1),
                ranking_with({detail::edge_hospital(e, slot),
                              detail::vertex_hospital(g, vertex, slot)})));
        }
    }
    p.build_index();

    Matrix& m = inst.target;
    m = Matrix(p.num_interns(), nh);
    for (int u2 = 0; u2 < p.num_units(); ++u2) {
        const DecisionUnit& unit = p.units[u2];
        for (int i : p.unit_interns[u2]) {
            if (unit.kind == UnitKind::Couple) {
                for (int slot = 0; slot < 3; ++slot) m.at(i, unit.ranking[slot]) = 1.0 / 3.0;
            } else {
                m.at(i, unit.ranking[0]) = 2.0 / 3.0;
                m.at(i, unit.ranking[1]) = 1.0 / 3.0;
            }
        }
    }
    return inst;
}

// The constructive direction of the reduction: a proper 3-edge coloring and
// its two cyclic color shifts, each with weight 1/3, reconstruct the
// reduction matrix exactly.
inline ConvexCombination decomposition_from_coloring(const CubicGraph& g,
                                                     const EdgeColoring& coloring) {
    if (!coloring_is_proper(g, coloring))
        throw std::invalid_argument("decomposition_from_coloring: coloring is not proper");
    Instance inst = gen_coloring_reduction(g);
    const Problem& p = inst.problem;
    ConvexCombination out;
    for (int shift = 0; shift < 3; ++shift) {
        Assignment a;
        a.hospital_of.assign(p.num_interns(), -1);
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            auto [u, v] = g.edges[e];
            int color = (coloring[e] + shift) % 3;
            int unit0 = static_cast<int>(e) * 7;  // couple, then six singles
            // Couple takes the hospital matching the effective color.
            for (int i : p.unit_interns[unit0])
                a.hospital_of[i] = detail::edge_hospital(static_cast<int>(e), color);
            for (int sidx = 0; sidx < 6; ++sidx) {
                int slot = sidx / 2;
                int vertex = sidx % 2 == 0 ? u : v;
                int intern = p.unit_interns[unit0 + 1 + sidx][0];
                a.hospital_of[intern] =
                    slot == color ? detail::vertex_hospital(g, vertex, slot)
                                  : detail::edge_hospital(static_cast<int>(e), slot);
            }
        }
        out.push_back({1.0 / 3.0, std::move(a)});
    }
    return out;
}

// Random stochastic assignment matrix via alternating row/column scaling
// on decision units (couples are a single row with weight 2 in the column
// sums, so couple-row equality is exact by construction). Rejection-samples
// until the result lies in the S>=C domain.
inline Matrix gen_random_matrix(const Problem& p, std::uint64_t seed,
                                int max_sweeps = 10000, int max_attempts = 1000) {
    int units = p.num_units();
    int nh = p.num_hospitals();
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        Matrix unit_m(units, nh);
        for (double& v : unit_m.data) v = 0.05 + rng.next_double();

        bool converged = false;
        for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
            for (int u = 0; u < units; ++u) {
                double s = unit_m.row_sum(u);
                for (int h = 0; h < nh; ++h) unit_m.at(u, h) /= s;
            }
            double max_dev = 0.0;
            for (int h = 0; h < nh; ++h) {
                double s = 0.0;
                for (int u = 0; u < units; ++u) s += p.units[u].seats() * unit_m.at(u, h);
                double scale = p.hospitals[h].capacity / s;
                for (int u = 0; u < units; ++u) unit_m.at(u, h) *= scale;
            }
            for (int u = 0; u < units; ++u)
                max_dev = std::max(max_dev, std::abs(unit_m.row_sum(u) - 1.0));
            converged = max_dev < 1e-10;
        }
        if (!converged)
            throw std::runtime_error("gen_random_matrix: iterative scaling did not converge");

        Matrix m(p.num_interns(), nh);
        for (int u = 0; u < units; ++u)
            for (int h = 0; h < nh; ++h)
                for (int i : p.unit_interns[u]) m.at(i, h) = unit_m.at(u, h);
        if (domain_membership(p, m, 1.0).in_domain) return m;
    }
    throw std::runtime_error("gen_random_matrix: no sample in the S>=C domain after " +
                             std::to_string(max_attempts) + " attempts");
}

// Random problem (uniform random strict rankings) plus an iterative-scaling
// random target matrix in the S>=C domain.
inline Instance gen_random_instance(int num_singles, int num_couples,
                                    const std::vector<int>& capacities, std::uint64_t seed) {
    int total = std::accumulate(capacities.begin(), capacities.end(), 0);
    if (total != num_singles + 2 * num_couples)
        throw std::invalid_argument("gen_random_instance: capacities must sum to the "
                                    "number of interns");
    Instance inst;
    Problem& p = inst.problem;
    for (std::size_t h = 0; h < capacities.size(); ++h)
        p.hospitals.push_back({"h" + std::to_string(h + 1), capacities[h]});
    Rng rng(derive_seed(seed, 0x5eedu));
    auto random_ranking = [&] {
        std::vector<int> r(capacities.size());
        std::iota(r.begin(), r.end(), 0);
        rng.shuffle(r);
        return r;
    };
    for (int i = 0; i < num_singles; ++i)
        p.units.push_back(detail::make_single("s" + std::to_string(i + 1), random_ranking()));
    for (int c = 0; c < num_couples; ++c)
        p.units.push_back(detail::make_couple("c" + std::to_string(c + 1), random_ranking()));
    p.build_index();
    inst.target = gen_random_matrix(p, seed);
    return inst;
}

// Couple ranking drawn hospital by hospital, each draw weighted by capacity
// among the hospitals not drawn yet.
inline std::vector<int> gen_capacity_driven_couples(const std::vector<int>& capacities,
                                                    Rng& rng) {
    int nh = static_cast<int>(capacities.size());
    std::vector<int> remaining(nh);
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<int> ranking;
    while (!remaining.empty()) {
        std::vector<double> weights;
        for (int h : remaining) weights.push_back(static_cast<double>(capacities[h]));
        int pick = rng.next_weighted(weights);
        ranking.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + pick);
    }
    return ranking;
}

// Capacity template shaped like the 2014 market: 23 hospitals, smallest
// capacity 4, larger hospitals up to roughly 10x that.
inline std::vector<int> default_capacity_shape() {
    return {4, 5, 6, 8, 9, 10, 12, 14, 15, 16, 18, 20, 22, 24, 25, 26, 28, 30, 32, 34, 36, 38, 40};
}

// Scales a capacity template so the total equals num_interns, never going
// below a per-hospital floor. Largest-remainder apportionment.
inline std::vector<int> scale_capacities(const std::vector<int>& shape, int num_interns,
                                         int min_capacity = 4) {
    int nh = static_cast<int>(shape.size());
    if (num_interns < nh * min_capacity)
        throw std::invalid_argument("scale_capacities: not enough interns for the template");
    double total = std::accumulate(shape.begin(), shape.end(), 0.0);
    std::vector<int> caps(nh);
    std::vector<std::pair<double, int>> remainders;
    int assigned = 0;
    for (int h = 0; h < nh; ++h) {
        double exact = shape[h] / total * num_interns;
        caps[h] = std::max(min_capacity, static_cast<int>(std::floor(exact)));
        assigned += caps[h];
        remainders.push_back({exact - std::floor(exact), h});
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    int idx = 0;
    while (assigned < num_interns) {
        ++caps[remainders[idx % nh].second];
        ++assigned;
        ++idx;
    }
    while (assigned > num_interns) {
        int h = static_cast<int>(std::max_element(caps.begin(), caps.end()) - caps.begin());
        if (caps[h] <= min_capacity)
            throw std::runtime_error("scale_capacities: cannot shrink below floor");
        --caps[h];
        --assigned;
    }
    return caps;
}

// Draws a market of n_interns (n_couples of them paired) by sampling
// preference profiles with replacement from the supplied pools.
inline Problem subsample_market(const std::vector<std::vector<int>>& singles_pool,
                                const std::vector<std::vector<int>>& couples_pool,
                                int n_interns, int n_couples,
                                const std::vector<int>& capacity_shape,
                                std::uint64_t seed) {
    if (singles_pool.empty() || (n_couples > 0 && couples_pool.empty()))
        throw std::invalid_argument("subsample_market: empty preference pool");
    int n_singles = n_interns - 2 * n_couples;
    if (n_singles < 0)
        throw std::invalid_argument("subsample_market: more couple members than interns");
    Problem p;
    std::vector<int> caps = scale_capacities(capacity_shape, n_interns);
    for (std::size_t h = 0; h < caps.size(); ++h)
        p.hospitals.push_back({"h" + std::to_string(h + 1), caps[h]});
    Rng rng(derive_seed(seed, 0));
    for (int i = 0; i < n_singles; ++i) {
        const auto& profile = singles_pool[rng.next_below(singles_pool.size())];
        p.units.push_back(detail::make_single("s" + std::to_string(i + 1), profile));
    }
    for (int c = 0; c < n_couples; ++c) {
        const auto& profile = couples_pool[rng.next_below(couples_pool.size())];
        p.units.push_back(detail::make_couple("c" + std::to_string(c + 1), profile));
    }
    p.build_index();
    return p;
}

/// Synthetic geographically-clustered preference pool: each profile has a
// home area whose hospitals get a large sampling boost, so top choices
// cluster by area the way the real market's do.
inline std::vector<std::vector<int>> gen_synthetic_pool(int num_profiles, int num_hospitals,
                                                        int num_areas, std::uint64_t seed,
                                                        double home_boost = 14.0) {
    std::vector<std::vector<int>> pool;
    Rng rng(derive_seed(seed, 1));
    for (int prof = 0; prof < num_profiles; ++prof) {
        int home = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(num_areas)));
        std::vector<int> remaining(num_hospitals);
        std::iota(remaining.begin(), remaining.end(), 0);
        std::vector<int> ranking;
        while (!remaining.empty()) {
            std::vector<double> weights;
            for (int h : remaining) {
                double w = 1.0 + 0.15 * (num_hospitals - h);  // mild shared popularity
                if (h % num_areas == home) w *= home_boost;
                weights.push_back(w);
            }
            int pick = rng.next_weighted(weights);
            ranking.push_back(remaining[pick]);
            remaining.erase(remaining.begin() + pick);
        }
        pool.push_back(std::move(ranking));
    }
    return pool;
}

struct BruteForceResult {
    double epsilon = 0.0;
    ConvexCombination witness;
    long num_assignments = 0;
};

namespace detail {

inline void enumerate_assignments(const Problem& p, int unit, std::vector<int>& vacancies,
                                  std::vector<int>& choice,
                                  std::vector<std::vector<int>>& out, long limit) {
    if (static_cast<long>(out.size()) > limit)
        throw std::runtime_error("brute_force_best_decomposition: instance too large");
    if (unit == p.num_units()) {
        out.push_back(choice);
        return;
    }
    int seats = p.units[unit].seats();
    for (int h = 0; h < p.num_hospitals(); ++h) {
        if (vacancies[h] < seats) continue;
        vacancies[h] -= seats;
        choice[unit] = h;
        enumerate_assignments(p, unit + 1, vacancies, choice, out, limit);
        vacancies[h] += seats;
    }
}

}  // namespace detail

// Enumerates every deterministic assignment and solves the minimize-max-
// row-L1 mixture problem as a linear program. Exact (up to LP tolerance)
// oracle for tiny instances.
inline BruteForceResult brute_force_best_decomposition(const Problem& p, const Matrix& target,
                                                       long limit = 200000) {
    if (p.num_interns() > 12 || p.num_hospitals() > 4)
        throw std::invalid_argument("brute_force_best_decomposition: instance too large "
                                    "(limits: 12 interns, 4 hospitals)");
    std::vector<std::vector<int>> assignments;
    std::vector<int> vacancies(p.num_hospitals());
    for (int h = 0; h < p.num_hospitals(); ++h) vacancies[h] = p.hospitals[h].capacity;
    std::vector<int> choice(p.num_units());
    detail::enumerate_assignments(p, 0, vacancies, choice, assignments, limit);
    if (assignments.empty())
        throw std::runtime_error("brute_force_best_decomposition: no valid assignment exists");

    // Variables: one weight per assignment, one slack e_{i,h} per cell for
    // the absolute values, and the max-row-L1 bound t (minimized).
    LinearProgram lp;
    int na = static_cast<int>(assignments.size());
    int ni = p.num_interns(), nh = p.num_hospitals();
    std::vector<int> lambda(na), evar(static_cast<std::size_t>(ni) * nh);
    for (int a = 0; a < na; ++a) lambda[a] = lp.add_var(0.0);
    for (auto& e : evar) e = lp.add_var(0.0);
    int tvar = lp.add_var(-1.0);

    {
        std::vector<std::pair<int, double>> terms;
        for (int a = 0; a < na; ++a) terms.push_back({lambda[a], 1.0});
        lp.add_constraint(LinearProgram::RowType::Eq, std::move(terms), 1.0);
    }
    for (int i = 0; i < ni; ++i) {
        int unit = p.intern_unit[i];
        for (int h = 0; h < nh; ++h) {
            int e = evar[static_cast<std::size_t>(i) * nh + h];
            std::vector<std::pair<int, double>> plus{{e, 1.0}}, minus{{e, 1.0}};
            for (int a = 0; a < na; ++a) {
                if (assignments[a][unit] == h) {
                    plus.push_back({lambda[a], 1.0});
                    minus.push_back({lambda[a], -1.0});
                }
            }
            lp.add_constraint(LinearProgram::RowType::Ge, std::move(plus), target.at(i, h));
            lp.add_constraint(LinearProgram::RowType::Ge, std::move(minus), -target.at(i, h));
        }
        std::vector<std::pair<int, double>> row{{tvar, -1.0}};
        for (int h = 0; h < nh; ++h)
            row.push_back({evar[static_cast<std::size_t>(i) * nh + h], 1.0});
        lp.add_constraint(LinearProgram::RowType::Le, std::move(row), 0.0);
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("brute_force_best_decomposition: oracle LP failed");

    BruteForceResult result;
    result.epsilon = sol.x[tvar];
    result.num_assignments = na;
    for (int a = 0; a < na; ++a) {
        if (sol.x[lambda[a]] <= kZeroTol) continue;
        Assignment assignment;
        assignment.hospital_of.assign(ni, -1);
        for (int u = 0; u < p.num_units(); ++u)
            for (int i : p.unit_interns[u]) assignment.hospital_of[i] = assignments[a][u];
        result.witness.push_back({sol.x[lambda[a]], std::move(assignment)});
    }
    return result;
}

}  // namespace intern_match
