#pragma once

// Probability trading: happiness scoring, the trade LP with capacity and
// do-no-harm constraints, and its solution into an optimized target matrix.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intern_match/model.hpp"
#include "intern_match/simplex.hpp"

namespace intern_match {

// Rank weights w_k = (m - k + 1)^2, k = 1..m.
inline std::vector<double> happiness_weights(int m) {
    std::vector<double> w(m);
    for (int k = 1; k <= m; ++k) {
        double v = static_cast<double>(m - k + 1);
        w[k - 1] = v * v;
    }
    return w;
}

// Score of a rank-probability vector: sum_k p_k (m - k + 1)^2.
inline double happiness(const std::vector<double>& rank_probs, int m) {
    if (static_cast<int>(rank_probs.size()) != m)
        throw std::invalid_argument("happiness: vector length must equal number of hospitals");
    double s = 0.0;
    for (int k = 1; k <= m; ++k) {
        double v = static_cast<double>(m - k + 1);
        s += rank_probs[k - 1] * v * v;
    }
    return s;
}

// Row of probabilities permuted into the unit's rank order (index 0 = top
// choice).
inline std::vector<double> rank_probabilities(const Problem& p, const Matrix& m, int intern_row) {
    int unit = p.intern_unit[intern_row];
    std::vector<double> probs(p.num_hospitals());
    for (int pos = 0; pos < p.num_hospitals(); ++pos)
        probs[pos] = m.at(intern_row, p.units[unit].ranking[pos]);
    return probs;
}

// Per-intern happiness of a target matrix.
inline std::vector<double> happiness_per_intern(const Problem& p, const Matrix& m) {
    std::vector<double> h(p.num_interns());
    for (int i = 0; i < p.num_interns(); ++i)
        h[i] = happiness(rank_probabilities(p, m, i), p.num_hospitals());
    return h;
}

inline double total_happiness(const Problem& p, const Matrix& m) {
    double t = 0.0;
    for (double h : happiness_per_intern(p, m)) t += h;
    return t;
}

// One decision variable per (unit, hospital); a couple's two rows share a
// variable, which keeps them equal by construction and makes the couple
// consume two seats per unit of probability in the capacity rows.
struct TradeLp {
    LinearProgram lp;
    std::vector<std::vector<int>> var_of;   // unit x hospital -> variable
    std::vector<double> baseline_happiness; // per unit (per member; members coincide)
    int num_row_constraints = 0;
    int num_capacity_constraints = 0;
    int num_dnh_constraints = 0;
};

inline TradeLp build_trade_lp(const Problem& p, const Matrix& baseline) {
    TradeLp t;
    int units = p.num_units();
    int m = p.num_hospitals();
    t.var_of.assign(units, std::vector<int>(m, -1));

    for (int u = 0; u < units; ++u) {
        double members = static_cast<double>(p.units[u].seats());
        for (int h = 0; h < m; ++h) {
            int rank = p.rank_table[u][h];
            double v = static_cast<double>(m - rank + 1);
            // Objective counts happiness once per member.
            t.var_of[u][h] = t.lp.add_var(members * v * v);
        }
    }
    for (int u = 0; u < units; ++u) {
        std::vector<std::pair<int, double>> terms;
        for (int h = 0; h < m; ++h) terms.push_back({t.var_of[u][h], 1.0});
        t.lp.add_constraint(LinearProgram::RowType::Eq, std::move(terms), 1.0);
        ++t.num_row_constraints;
    }
    for (int h = 0; h < m; ++h) {
        std::vector<std::pair<int, double>> terms;
        for (int u = 0; u < units; ++u)
            terms.push_back({t.var_of[u][h], static_cast<double>(p.units[u].seats())});
        t.lp.add_constraint(LinearProgram::RowType::Eq, std::move(terms),
                            static_cast<double>(p.hospitals[h].capacity));
        ++t.num_capacity_constraints;
    }
    t.baseline_happiness.resize(units);
    for (int u = 0; u < units; ++u) {
        int row = p.unit_interns[u][0];
        t.baseline_happiness[u] = happiness(rank_probabilities(p, baseline, row), m);
        std::vector<std::pair<int, double>> terms;
        for (int h = 0; h < m; ++h) {
            int rank = p.rank_table[u][h];
            double v = static_cast<double>(m - rank + 1);
            terms.push_back({t.var_of[u][h], v * v});
        }
        t.lp.add_constraint(LinearProgram::RowType::Ge, std::move(terms),
                            t.baseline_happiness[u]);
        ++t.num_dnh_constraints;
    }
    return t;
}

inline Matrix solve_trade_lp(const Problem& p, const TradeLp& t) {
    LpSolution sol = solve_lp(t.lp);
    if (sol.status != LpStatus::Optimal)
        throw std::runtime_error("solve_trade_lp: solver reported non-optimal status "
                                 "(baseline is feasible; this indicates an internal "
                                 "tolerance fault)");
    Matrix out(p.num_interns(), p.num_hospitals());
    for (int u = 0; u < p.num_units(); ++u)
        for (int h = 0; h < p.num_hospitals(); ++h) {
            double v = std::max(0.0, sol.x[t.var_of[u][h]]);
            for (int i : p.unit_interns[u]) out.at(i, h) = v;
        }
    // Shed solver round-off so downstream validators see clean rows.
    for (int u = 0; u < p.num_units(); ++u) {
        int first = p.unit_interns[u][0];
        double s = out.row_sum(first);
        if (s > 0.0 && std::abs(s - 1.0) <= 1e-7)
            for (int h = 0; h < p.num_hospitals(); ++h)
                for (int i : p.unit_interns[u]) out.at(i, h) /= s;
    }
    return out;
}

inline Matrix trade_probabilities(const Problem& p, const Matrix& baseline) {
    return solve_trade_lp(p, build_trade_lp(p, baseline));
}

// Per-intern happiness deltas; every delta is >= -1e-9 when `after` came
// from the trade LP.
inline std::vector<double> trade_surplus(const Problem& p, const Matrix& before,
                                         const Matrix& after) {
    std::vector<double> b = happiness_per_intern(p, before);
    std::vector<double> a = happiness_per_intern(p, after);
    std::vector<double> delta(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) delta[i] = a[i] - b[i];
    return delta;
}

}  // namespace intern_match
