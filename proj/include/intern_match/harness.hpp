#pragma once

// End-to-end pipeline (RSD baseline -> probability trading -> approximate
// decomposition -> lottery draw) and the market-simulation harness behind
// the bench command.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "intern_match/couples.hpp"
#include "intern_match/instances.hpp"
#include "intern_match/lp.hpp"
#include "intern_match/model.hpp"
#include "intern_match/rng.hpp"
#include "intern_match/rsd.hpp"

namespace intern_match {

// Expected number of interns receiving their first choice under M.
inline double expected_first_choice(const Problem& p, const Matrix& m) {
    double total = 0.0;
    for (int u = 0; u < p.num_units(); ++u)
        for (int i : p.unit_interns[u]) total += m.at(i, p.units[u].ranking.front());
    return total;
}

inline const Assignment& sample_assignment(const ConvexCombination& c, Rng& rng) {
    double r = rng.next_double();
    double acc = 0.0;
    for (const WeightedAssignment& wa : c) {
        acc += wa.weight;
        if (r < acc) return wa.assignment;
    }
    return c.back().assignment;
}

struct PipelineResult {
    Matrix baseline;           // RSD probabilities
    Matrix traded;             // after the trade LP
    ConvexCombination lottery; // the transparency artifact
    DecompositionReport report;
    Assignment outcome;        // one assignment drawn by weight
};

inline PipelineResult run_pipeline(const Problem& p, long trials, std::uint64_t seed,
                                   double alpha = 1.0) {
    PipelineResult r;
    r.baseline = p.num_units() <= kExactEnumerationLimit ? rsd_exact(p)
                                                         : rsd_monte_carlo(p, trials, seed);
    r.traded = trade_probabilities(p, r.baseline);
    r.lottery = approximate_decompose(p, r.traded);
    r.report = approximation_error(p, r.traded, r.lottery, alpha);
    Rng rng(derive_seed(seed, 0xd4a3u));
    r.outcome = sample_assignment(r.lottery, rng);
    return r;
}

enum class BenchMode { Subsample, RandomMatrix, CapacityCouples };

inline BenchMode bench_mode_from_string(const std::string& s) {
    if (s == "subsample") return BenchMode::Subsample;
    if (s == "random") return BenchMode::RandomMatrix;
    if (s == "capacity-couples") return BenchMode::CapacityCouples;
    throw std::invalid_argument("unknown bench mode '" + s + "'");
}

struct BenchConfig {
    BenchMode mode = BenchMode::RandomMatrix;
    int markets = 100;
    long trials = 2000;       // RSD Monte Carlo trials per market
    std::uint64_t seed = 1;
    double alpha = 1.0;
    int n_interns = 60;
    int n_couples = 3;
    std::vector<int> capacity_shape = default_capacity_shape();
};

struct BenchDraw {
    double max_l1 = 0.0;
    double avg_l1 = 0.0;
};

struct BenchResult {
    std::vector<BenchDraw> draws;
    double bound_upper = 0.0;  // 2 / smallest capacity
    double mean_max_l1 = 0.0;
    double mean_avg_l1 = 0.0;
};

namespace detail {

inline Problem bench_market(const BenchConfig& cfg, std::uint64_t draw_seed,
                            const std::vector<std::vector<int>>& singles_pool,
                            const std::vector<std::vector<int>>& couples_pool) {
    Problem market = subsample_market(singles_pool, couples_pool, cfg.n_interns,
                                      cfg.n_couples, cfg.capacity_shape, draw_seed);
    if (cfg.mode == BenchMode::CapacityCouples) {
        std::vector<int> caps;
        for (const Hospital& h : market.hospitals) caps.push_back(h.capacity);
        Rng rng(derive_seed(draw_seed, 0xcc17u));
        for (DecisionUnit& u : market.units)
            if (u.kind == UnitKind::Couple) u.ranking = gen_capacity_driven_couples(caps, rng);
        market.build_index();
    }
    return market;
}

}  // namespace detail

// Runs `markets` independent market draws and records the max/avg row-L1
// of the approximate decomposition for each. Pools are only used by the
// subsample and capacity-couples modes.
inline BenchResult run_bench(const BenchConfig& cfg,
                             const std::vector<std::vector<int>>& singles_pool = {},
                             const std::vector<std::vector<int>>& couples_pool = {}) {
    BenchResult result;
    for (int draw = 0; draw < cfg.markets; ++draw) {
        std::uint64_t draw_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(draw));
        Problem market;
        Matrix target;
        if (cfg.mode == BenchMode::RandomMatrix) {
            std::vector<int> caps = scale_capacities(cfg.capacity_shape, cfg.n_interns);
            Instance inst = gen_random_instance(cfg.n_interns - 2 * cfg.n_couples,
                                                cfg.n_couples, caps, draw_seed);
            market = std::move(inst.problem);
            target = std::move(inst.target);
        } else {
            market = detail::bench_market(cfg, draw_seed, singles_pool, couples_pool);
            Matrix baseline = rsd_monte_carlo(market, cfg.trials, draw_seed);
            target = trade_probabilities(market, baseline);
        }
        ConvexCombination combination = approximate_decompose(market, target);
        DecompositionReport report = approximation_error(market, target, combination, cfg.alpha);
        result.draws.push_back({report.max_l1, report.avg_l1});
        if (draw == 0) result.bound_upper = report.bound_upper;
    }
    for (const BenchDraw& d : result.draws) {
        result.mean_max_l1 += d.max_l1;
        result.mean_avg_l1 += d.avg_l1;
    }
    if (!result.draws.empty()) {
        result.mean_max_l1 /= result.draws.size();
        result.mean_avg_l1 /= result.draws.size();
    }
    return result;
}

}  // namespace intern_match
