#pragma once

// Random Serial Dictatorship with the couple house rules: a couple holds a
// single slot in the draw order and needs two vacancies at once. Exact
// enumeration for small instances (integer counts, so the probabilities
// are exact rationals) and seeded Monte Carlo estimation.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "intern_match/model.hpp"
#include "intern_match/rng.hpp"

namespace intern_match {

// Permutation over decision units; a couple occupies one slot.
using DrawOrder = std::vector<int>;

class CoupleStrandedError : public std::runtime_error {
public:
    explicit CoupleStrandedError(const std::string& unit_id)
        : std::runtime_error("couple stranded: no hospital has two vacancies for unit " +
                             unit_id) {}
};

// Units pick in order; each takes its highest-ranked hospital with enough
// vacancies. Throws CoupleStrandedError if a couple finds no hospital with
// two seats left (the house rules never split a couple).
inline Assignment rsd_draw(const Problem& p, const DrawOrder& order) {
    std::vector<int> vacancies(p.num_hospitals());
    for (int h = 0; h < p.num_hospitals(); ++h) vacancies[h] = p.hospitals[h].capacity;
    Assignment a;
    a.hospital_of.assign(p.num_interns(), -1);
    for (int u : order) {
        int seats = p.units[u].seats();
        int chosen = -1;
        for (int h : p.units[u].ranking) {
            if (vacancies[h] >= seats) {
                chosen = h;
                break;
            }
        }
        if (chosen < 0) throw CoupleStrandedError(p.units[u].id);
        vacancies[chosen] -= seats;
        for (int i : p.unit_interns[u]) a.hospital_of[i] = chosen;
    }
    return a;
}

// Exact RSD probabilities as integer counts over all unit permutations.
// counts[i][h] / total is the exact probability that intern i lands at h.
struct ExactRsdCounts {
    std::vector<std::vector<long long>> counts;  // intern x hospital
    long long total = 0;

    Matrix to_matrix() const {
        Matrix m(static_cast<int>(counts.size()),
                 counts.empty() ? 0 : static_cast<int>(counts.front().size()));
        for (int i = 0; i < m.rows; ++i)
            for (int h = 0; h < m.cols; ++h)
                m.at(i, h) = static_cast<double>(counts[i][h]) / static_cast<double>(total);
        return m;
    }
};

inline constexpr int kExactEnumerationLimit = 9;  // 9! = 362880 draws

inline ExactRsdCounts rsd_exact_counts(const Problem& p) {
    if (p.num_units() > kExactEnumerationLimit)
        throw std::invalid_argument("rsd_exact: too many decision units for enumeration");
    ExactRsdCounts result;
    result.counts.assign(p.num_interns(), std::vector<long long>(p.num_hospitals(), 0));
    DrawOrder order(p.num_units());
    std::iota(order.begin(), order.end(), 0);
    do {
        // Orders that strand a couple are excluded from the lottery, so the
        // probabilities are conditioned on the draw being feasible.
        try {
            Assignment a = rsd_draw(p, order);
            for (int i = 0; i < p.num_interns(); ++i) ++result.counts[i][a.hospital_of[i]];
            ++result.total;
        } catch (const CoupleStrandedError&) {
        }
    } while (std::next_permutation(order.begin(), order.end()));
    if (result.total == 0)
        throw CoupleStrandedError("every draw order (no feasible lottery)");
    return result;
}

inline Matrix rsd_exact(const Problem& p) { return rsd_exact_counts(p).to_matrix(); }

// Empirical frequency matrix over `trials` seeded draws. Each trial's
// permutation comes from a seed derived from (seed, trial index), so the
// result is independent of any execution order or worker count; the
// accumulator is integer counts, summed before division.
inline Matrix rsd_monte_carlo(const Problem& p, long trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("rsd_monte_carlo: trials must be >= 1");
    std::vector<std::vector<long long>> counts(
        p.num_interns(), std::vector<long long>(p.num_hospitals(), 0));
    DrawOrder base(p.num_units());
    std::iota(base.begin(), base.end(), 0);
    for (long t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        // Stranded orders are redrawn from the trial's own stream (same
        // feasibility conditioning as the exact enumeration; stays
        // deterministic and order-independent across trials).
        for (int attempt = 0;; ++attempt) {
            DrawOrder order = base;
            rng.shuffle(order);
            try {
                Assignment a = rsd_draw(p, order);
                for (int i = 0; i < p.num_interns(); ++i) ++counts[i][a.hospital_of[i]];
                break;
            } catch (const CoupleStrandedError&) {
                if (attempt >= 10000) throw;
            }
        }
    }
    Matrix m(p.num_interns(), p.num_hospitals());
    for (int i = 0; i < p.num_interns(); ++i)
        for (int h = 0; h < p.num_hospitals(); ++h)
            m.at(i, h) = static_cast<double>(counts[i][h]) / static_cast<double>(trials);
    return m;
}

}  // namespace intern_match
