#pragma once

// Constructive Birkhoff-von Neumann decomposition over the transportation
// polytope: rows are agents demanding one seat, columns carry integer
// capacities. Each extraction finds an integral assignment inside the
// support, peels off the minimum selected entry, and repairs the matching
// incrementally around the cells that hit zero.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "intern_match/model.hpp"

namespace intern_match {

namespace detail {

// Augmenting-path search (Kuhn's algorithm with column capacities) for one
// unmatched row. Edges are the strictly positive residual entries, scanned
// in fixed column order for reproducibility.
class TransportMatcher {
public:
    TransportMatcher(const Matrix& residual, const std::vector<int>& caps)
        : residual_(residual), caps_(caps), match_(residual.rows, -1),
          used_(caps.size(), 0) {}

    bool augment_from(int row) {
        visited_.assign(residual_.cols, 0);
        return try_row(row);
    }

    void unassign(int row) {
        if (match_[row] >= 0) {
            --used_[match_[row]];
            match_[row] = -1;
        }
    }

    void assign(int row, int col) {
        match_[row] = col;
        ++used_[col];
    }

    const std::vector<int>& match() const { return match_; }

private:
    const Matrix& residual_;
    const std::vector<int>& caps_;
    std::vector<int> match_;
    std::vector<int> used_;
    std::vector<char> visited_;

    bool try_row(int row) {
        for (int c = 0; c < residual_.cols; ++c) {
            if (visited_[c] || residual_.at(row, c) <= kZeroTol) continue;
            visited_[c] = 1;
            if (used_[c] < caps_[c]) {
                assign_move(row, c);
                return true;
            }
            // Column full: try to reroute one of its occupants.
            for (int r2 = 0; r2 < residual_.rows; ++r2) {
                if (match_[r2] != c) continue;
                if (try_row_evicting(r2, row, c)) return true;
            }
        }
        return false;
    }

    bool try_row_evicting(int occupant, int row, int col) {
        match_[occupant] = -1;
        --used_[col];
        if (try_row(occupant)) {
            assign_move(row, col);
            return true;
        }
        match_[occupant] = col;
        ++used_[col];
        return false;
    }

    void assign_move(int row, int col) {
        if (match_[row] >= 0) --used_[match_[row]];
        match_[row] = col;
        ++used_[col];
    }
};

}  // namespace detail

// One integral capacity-respecting assignment using only support edges of
// the residual matrix. Throws if none exists (which signals a broken
// residual invariant upstream).
inline std::vector<int> extract_assignment(const Matrix& residual, const std::vector<int>& caps) {
    detail::TransportMatcher matcher(residual, caps);
    for (int r = 0; r < residual.rows; ++r)
        if (!matcher.augment_from(r))
            throw std::runtime_error("extract_assignment: support admits no full assignment");
    return matcher.match();
}

struct TransportTerm {
    double weight = 0.0;
    std::vector<int> column_of;  // per row
};

// Decomposes a matrix with unit row sums and integer column sums (equal to
// caps) into a convex combination of integral assignments. The number of
// terms is at most the number of strictly positive input entries.
inline std::vector<TransportTerm> decompose_transportation(Matrix m, const std::vector<int>& caps) {
    if (static_cast<int>(caps.size()) != m.cols)
        throw std::invalid_argument("decompose_transportation: capacity vector size mismatch");
    // Clear floating-point dust before building the support.
    for (double& v : m.data)
        if (v < kZeroTol) v = 0.0;

    std::vector<TransportTerm> terms;
    if (m.rows == 0) return terms;

    detail::TransportMatcher matcher(m, caps);
    for (int r = 0; r < m.rows; ++r)
        if (!matcher.augment_from(r))
            throw std::runtime_error("decompose_transportation: input is not a valid "
                                     "stochastic assignment matrix");

    double remaining = 1.0;
    while (remaining > kMatrixTol) {
        const std::vector<int>& match = matcher.match();
        double lambda = remaining;
        for (int r = 0; r < m.rows; ++r)
            lambda = std::min(lambda, m.at(r, match[r]));

        terms.push_back({lambda, match});
        remaining -= lambda;
        if (remaining <= kMatrixTol) break;

        // Peel off the extracted assignment and repair the matching around
        // cells that reached zero.
        std::vector<int> broken;
        for (int r = 0; r < m.rows; ++r) {
            double& cell = m.at(r, match[r]);
            cell -= lambda;
            if (cell <= kZeroTol) {
                cell = 0.0;
                broken.push_back(r);
            }
        }
        for (int r : broken) matcher.unassign(r);
        for (int r : broken)
            if (!matcher.augment_from(r))
                throw std::runtime_error("decompose_transportation: residual support lost "
                                         "feasibility (internal bug)");
    }
    // Absorb leftover weight (floating-point dust) into the last term so
    // the weights sum to 1 exactly up to machine arithmetic.
    if (!terms.empty() && remaining > 0.0) terms.back().weight += remaining;
    return terms;
}

// Spec-facing wrapper for couple-free problems.
inline ConvexCombination bvn_decompose(const Problem& p, const Matrix& m) {
    for (int u = 0; u < p.num_units(); ++u)
        if (p.unit_is_couple(u))
            throw std::invalid_argument("bvn_decompose: problem has couples; use the "
                                        "couples approximation instead");
    auto violations = validate_target(p, m);
    if (!violations.empty())
        throw std::invalid_argument("bvn_decompose: invalid target matrix: " +
                                    violations.front().path + ": " +
                                    violations.front().message);
    std::vector<int> caps(p.num_hospitals());
    for (int h = 0; h < p.num_hospitals(); ++h) caps[h] = p.hospitals[h].capacity;
    ConvexCombination out;
    for (TransportTerm& t : decompose_transportation(m, caps))
        out.push_back({t.weight, Assignment{std::move(t.column_of)}});
    return out;
}

}  // namespace intern_match
