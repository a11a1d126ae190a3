#pragma once

// Deterministic two-phase revised simplex with an explicit basis inverse.
// Pricing is Dantzig with smallest-index tie-breaking; under a degenerate
// stall it falls back to Bland's rule, which guarantees termination. The
// pivot sequence is a pure function of the input, so solutions are
// reproducible run to run.
//
// Constraint columns are stored sparse; the basis inverse is dense. That
// fits the LPs built here (a few thousand rows, 2-4 nonzeros per column).

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace intern_match {

struct LinearProgram {
    enum class RowType { Eq, Ge, Le };
    struct Constraint {
        RowType type = RowType::Eq;
        double rhs = 0.0;
        std::vector<std::pair<int, double>> terms;
    };

    int num_vars = 0;
    std::vector<double> objective;  // maximized
    std::vector<Constraint> constraints;

    int add_var(double obj_coeff = 0.0) {
        objective.push_back(obj_coeff);
        return num_vars++;
    }
    void add_constraint(RowType type, std::vector<std::pair<int, double>> terms, double rhs) {
        constraints.push_back({type, rhs, std::move(terms)});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    long iterations = 0;
};

class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& lp) : lp_(lp) { build(); }

    LpSolution solve() {
        LpSolution result;
        if (!phase(/*phase1=*/true)) {
            result.status = LpStatus::Unbounded;  // cannot happen in phase 1
            return result;
        }
        double infeasibility = 0.0;
        for (int r = 0; r < m_; ++r)
            if (basis_[r] >= artificial_start_) infeasibility += xb_[r];
        result.iterations = iterations_;
        if (infeasibility > kFeasTol) {
            result.status = LpStatus::Infeasible;
            return result;
        }
        drive_out_artificials();
        if (!phase(/*phase1=*/false)) {
            result.status = LpStatus::Unbounded;
            result.iterations = iterations_;
            return result;
        }
        result.status = LpStatus::Optimal;
        result.iterations = iterations_;
        result.x.assign(lp_.num_vars, 0.0);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] < lp_.num_vars) result.x[basis_[r]] = std::max(0.0, xb_[r]);
        result.objective = 0.0;
        for (int j = 0; j < lp_.num_vars; ++j)
            result.objective += lp_.objective[j] * result.x[j];
        return result;
    }

private:
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kFeasTol = 1e-7;
    static constexpr long kRefactorPeriod = 600;

    const LinearProgram& lp_;
    int m_ = 0;                // rows
    int total_vars_ = 0;       // structural + slack/surplus + artificial
    int artificial_start_ = 0;
    std::vector<std::vector<std::pair<int, double>>> columns_;  // per var: (row, coeff)
    std::vector<double> rhs_;
    std::vector<double> cost_;      // phase-2 objective per column
    std::vector<int> basis_;        // per row: basic variable
    std::vector<char> in_basis_;
    std::vector<double> binv_;      // dense m x m, row-major
    std::vector<double> xb_;        // basic variable values
    long iterations_ = 0;

    double& binv(int r, int c) { return binv_[static_cast<std::size_t>(r) * m_ + c]; }

    void build() {
        m_ = static_cast<int>(lp_.constraints.size());
        total_vars_ = lp_.num_vars;
        columns_.assign(lp_.num_vars, {});
        cost_.assign(lp_.num_vars, 0.0);
        for (int j = 0; j < lp_.num_vars; ++j) cost_[j] = lp_.objective[j];
        rhs_.assign(m_, 0.0);

        std::vector<LinearProgram::RowType> types(m_);
        for (int r = 0; r < m_; ++r) {
            const auto& con = lp_.constraints[r];
            double sign = con.rhs < 0.0 ? -1.0 : 1.0;
            rhs_[r] = sign * con.rhs;
            types[r] = con.type;
            if (sign < 0.0) {
                if (con.type == LinearProgram::RowType::Ge)
                    types[r] = LinearProgram::RowType::Le;
                else if (con.type == LinearProgram::RowType::Le)
                    types[r] = LinearProgram::RowType::Ge;
            }
            for (auto [var, coeff] : con.terms) {
                if (var < 0 || var >= lp_.num_vars)
                    throw std::invalid_argument("simplex: variable index out of range");
                if (coeff != 0.0) columns_[var].push_back({r, sign * coeff});
            }
        }

        basis_.assign(m_, -1);
        // Slack/surplus columns; Le slacks double as the initial basis.
        for (int r = 0; r < m_; ++r) {
            if (types[r] == LinearProgram::RowType::Le) {
                int j = new_column(0.0);
                columns_[j].push_back({r, 1.0});
                basis_[r] = j;
            } else if (types[r] == LinearProgram::RowType::Ge) {
                int j = new_column(0.0);
                columns_[j].push_back({r, -1.0});
            }
        }
        artificial_start_ = total_vars_;
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] >= 0) continue;
            int j = new_column(0.0);
            columns_[j].push_back({r, 1.0});
            basis_[r] = j;
        }

        in_basis_.assign(total_vars_, 0);
        for (int r = 0; r < m_; ++r) in_basis_[basis_[r]] = 1;
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) binv(r, r) = 1.0;
        xb_ = rhs_;
    }

    int new_column(double cost) {
        columns_.push_back({});
        cost_.push_back(cost);
        return total_vars_++;
    }

    double column_cost(int j, bool phase1) const {
        if (phase1) return j >= artificial_start_ ? -1.0 : 0.0;
        return j < static_cast<int>(cost_.size()) ? cost_[j] : 0.0;
    }

    // Runs simplex iterations for one phase. Returns false on unboundedness.
    bool phase(bool phase1) {
        std::vector<double> y(m_), w(m_);
        int degenerate_streak = 0;
        long since_refactor = 0;
        for (;;) {
            // y = c_B^T B^-1
            for (int c = 0; c < m_; ++c) {
                double s = 0.0;
                for (int r = 0; r < m_; ++r) {
                    double cb = column_cost(basis_[r], phase1);
                    if (cb != 0.0) s += cb * binv(r, c);
                }
                y[c] = s;
            }
            bool bland = degenerate_streak > 2 * m_ + 20;
            int entering = -1;
            double best = kPivotTol;
            for (int j = 0; j < total_vars_; ++j) {
                if (in_basis_[j]) continue;
                if (!phase1 && j >= artificial_start_) continue;
                double d = column_cost(j, phase1);
                for (auto [r, a] : columns_[j]) d -= y[r] * a;
                if (d > best + 0.0) {
                    entering = j;
                    if (bland) break;
                    best = d;
                } else if (bland && d > kPivotTol) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return true;  // optimal for this phase

            // w = B^-1 a_entering
            std::fill(w.begin(), w.end(), 0.0);
            for (auto [r, a] : columns_[entering])
                for (int i = 0; i < m_; ++i) w[i] += binv(i, r) * a;

            int leaving = -1;
            double theta = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m_; ++i) {
                if (w[i] <= kPivotTol) continue;
                double ratio = std::max(0.0, xb_[i]) / w[i];
                if (ratio < theta - kPivotTol ||
                    (ratio < theta + kPivotTol &&
                     (leaving < 0 || prefer_leaving(i, leaving)))) {
                    theta = ratio;
                    leaving = i;
                }
            }
            // Basic artificials stuck at zero may be pivoted out on a
            // negative element without changing the solution.
            if (!phase1) {
                for (int i = 0; i < m_; ++i) {
                    if (basis_[i] >= artificial_start_ && xb_[i] <= kFeasTol &&
                        std::abs(w[i]) > 1e-7) {
                        leaving = i;
                        theta = 0.0;
                        break;
                    }
                }
            }
            if (leaving < 0) return false;  // unbounded

            degenerate_streak = theta <= kPivotTol ? degenerate_streak + 1 : 0;
            pivot(entering, leaving, w, theta);
            ++iterations_;
            if (++since_refactor >= kRefactorPeriod) {
                refactor();
                since_refactor = 0;
            }
        }
    }

    // Smallest-index preference among ratio-test ties (Bland-compatible).
    bool prefer_leaving(int candidate, int incumbent) const {
        bool cand_art = basis_[candidate] >= artificial_start_;
        bool inc_art = basis_[incumbent] >= artificial_start_;
        if (cand_art != inc_art) return cand_art;
        return basis_[candidate] < basis_[incumbent];
    }

    void pivot(int entering, int leaving, const std::vector<double>& w, double theta) {
        double piv = w[leaving];
        double* lead = &binv_[static_cast<std::size_t>(leaving) * m_];
        for (int c = 0; c < m_; ++c) lead[c] /= piv;
        for (int r = 0; r < m_; ++r) {
            if (r == leaving) continue;
            double f = w[r];
            if (f == 0.0) continue;
            double* row = &binv_[static_cast<std::size_t>(r) * m_];
            for (int c = 0; c < m_; ++c) row[c] -= f * lead[c];
            xb_[r] -= theta * f;
            if (xb_[r] < 0.0 && xb_[r] > -kFeasTol) xb_[r] = 0.0;
        }
        in_basis_[basis_[leaving]] = 0;
        in_basis_[entering] = 1;
        basis_[leaving] = entering;
        xb_[leaving] = theta;
    }

    // Replace zero-level basic artificials by structural columns where a
    // nonzero pivot exists; rows with no such pivot are redundant and keep
    // their artificial pinned at zero.
    void drive_out_artificials() {
        std::vector<double> w(m_);
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < artificial_start_) continue;
            int found = -1;
            for (int j = 0; j < artificial_start_ && found < 0; ++j) {
                if (in_basis_[j]) continue;
                double wr = 0.0;
                for (auto [row, a] : columns_[j]) wr += binv(r, row) * a;
                if (std::abs(wr) > 1e-7) found = j;
            }
            if (found < 0) continue;
            std::fill(w.begin(), w.end(), 0.0);
            for (auto [row, a] : columns_[found])
                for (int i = 0; i < m_; ++i) w[i] += binv(i, row) * a;
            pivot(found, r, w, 0.0);
        }
    }

    // Rebuilds the inverse from the basis columns (Gauss-Jordan with
    // partial pivoting) and recomputes xb, shedding accumulated drift.
    void refactor() {
        std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r)
            for (auto [row, a] : columns_[basis_[r]]) b[static_cast<std::size_t>(row) * m_ + r] = a;
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) inv[static_cast<std::size_t>(r) * m_ + r] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = col;
            double best = std::abs(b[static_cast<std::size_t>(col) * m_ + col]);
            for (int r = col + 1; r < m_; ++r) {
                double v = std::abs(b[static_cast<std::size_t>(r) * m_ + col]);
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (best < 1e-12) return;  // singular basis snapshot; keep updated inverse
            if (piv != col) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(b[static_cast<std::size_t>(piv) * m_ + c],
                              b[static_cast<std::size_t>(col) * m_ + c]);
                    std::swap(inv[static_cast<std::size_t>(piv) * m_ + c],
                              inv[static_cast<std::size_t>(col) * m_ + c]);
                }
            }
            double d = b[static_cast<std::size_t>(col) * m_ + col];
            for (int c = 0; c < m_; ++c) {
                b[static_cast<std::size_t>(col) * m_ + c] /= d;
                inv[static_cast<std::size_t>(col) * m_ + c] /= d;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = b[static_cast<std::size_t>(r) * m_ + col];
                if (f == 0.0) continue;
                for (int c = 0; c < m_; ++c) {
                    b[static_cast<std::size_t>(r) * m_ + c] -= f * b[static_cast<std::size_t>(col) * m_ + c];
                    inv[static_cast<std::size_t>(r) * m_ + c] -= f * inv[static_cast<std::size_t>(col) * m_ + c];
                }
            }
        }
        binv_ = inv;
        for (int r = 0; r < m_; ++r) {
            double s = 0.0;
            for (int c = 0; c < m_; ++c) s += binv(r, c) * rhs_[c];
            xb_[r] = s < 0.0 && s > -kFeasTol ? 0.0 : s;
        }
    }
};

inline LpSolution solve_lp(const LinearProgram& lp) {
    SimplexSolver solver(lp);
    return solver.solve();
}

}  // namespace intern_match
