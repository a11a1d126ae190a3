// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Runs everything with pinned seeds so results are
// reproducible run to run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "common.hpp"
#include "intern_match/bvn.hpp"
#include "intern_match/couples.hpp"
#include "intern_match/harness.hpp"
#include "intern_match/instances.hpp"
#include "intern_match/lp.hpp"
#include "intern_match/model.hpp"
#include "intern_match/rsd.hpp"

namespace {

int failures = 0;

void report(int number, bool pass, const std::string& what) {
    std::cout << "criterion " << number << ": " << (pass ? "PASS" : "FAIL") << " - " << what
              << std::endl;
    if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Max abs deviation of the mixture from the target on couple rows only.
double couple_marginal_error(const im::Problem& p, const im::Matrix& target,
                             const im::ConvexCombination& c) {
    im::Matrix mix = im::mixture_matrix(p, c);
    double worst = 0.0;
    for (int u = 0; u < p.num_units(); ++u) {
        if (!p.unit_is_couple(u)) continue;
        for (int i : p.unit_interns[u])
            for (int h = 0; h < p.num_hospitals(); ++h)
                worst = std::max(worst, std::abs(mix.at(i, h) - target.at(i, h)));
    }
    return worst;
}

im::Problem couple_free_problem(const std::vector<int>& caps) {
    im::Problem p;
    int total = 0;
    for (std::size_t h = 0; h < caps.size(); ++h) {
        p.hospitals.push_back({"h" + std::to_string(h + 1), caps[h]});
        total += caps[h];
    }
    std::vector<int> ranking(caps.size());
    std::iota(ranking.begin(), ranking.end(), 0);
    for (int i = 0; i < total; ++i)
        p.units.push_back(im::DecisionUnit{"s" + std::to_string(i + 1), im::UnitKind::Single,
                                           {"s" + std::to_string(i + 1)}, ranking});
    p.build_index();
    return p;
}

void criterion_1() {
    auto start = std::chrono::steady_clock::now();
    im::Problem p = four_intern_example();
    im::ExactRsdCounts counts = im::rsd_exact_counts(p);
    int alice = p.unit_interns[p.unit_index("Alice")][0];
    int bob = p.unit_interns[p.unit_index("Bob")][0];
    bool ok = counts.total == 24;
    ok = ok && counts.counts[alice] == std::vector<long long>{6, 6, 10, 2};
    ok = ok && counts.counts[bob] == std::vector<long long>{6, 6, 2, 10};
    ok = ok && elapsed_s(start) < 1.0;
    report(1, ok, "exact serial-dictatorship probabilities (1/4, 1/4, 5/12, 1/12) in integer "
                  "arithmetic");
}

void criterion_2() {
    auto start = std::chrono::steady_clock::now();
    im::Problem p = four_intern_example();
    im::Matrix exact = im::rsd_exact(p);
    const long n = 100000;
    int breaches = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        im::Matrix mc = im::rsd_monte_carlo(p, n, seed);
        for (int i = 0; i < p.num_interns(); ++i)
            for (int h = 0; h < p.num_hospitals(); ++h) {
                double prob = exact.at(i, h);
                double sigma = std::sqrt(prob * (1.0 - prob) / n);
                if (std::abs(mc.at(i, h) - prob) > 3.0 * sigma) ++breaches;
            }
    }
    // 160 three-sigma checks: ~0.43 breaches expected; 3 is far out in the
    // tail and seeds are pinned, so this is a stable gate.
    bool ok = breaches <= 3 && elapsed_s(start) < 10.0;
    report(2, ok, "Monte Carlo matches exact probabilities within 3 sigma (" +
                      std::to_string(breaches) + " breaches over 160 checks)");
}

void criterion_3() {
    im::Problem p = four_intern_example();
    im::Matrix baseline = im::rsd_exact(p);
    im::Matrix traded = im::trade_probabilities(p, baseline);
    // The hand profile (1/4, 1/4, 1/2 on each intern's top three) scores
    // 8.25 per intern, 33 total.
    bool ok = im::total_happiness(p, traded) >= 33.0 - 1e-9;
    auto before = im::happiness_per_intern(p, baseline);
    auto after = im::happiness_per_intern(p, traded);
    for (int i = 0; i < p.num_interns(); ++i) ok = ok && after[i] >= before[i] - 1e-9;
    report(3, ok, "trade LP beats the hand-constructed swap profile and harms nobody");
}

void criterion_4() {
    auto start = std::chrono::steady_clock::now();
    im::Rng rng(2024);
    bool ok = true;
    int done = 0;
    for (int t = 0; t < 1000 && ok; ++t) {
        int nh = 2 + static_cast<int>(rng.next_below(9));  // 2..10 hospitals
        std::vector<int> caps(nh);
        int rows = 0;
        for (int h = 0; h < nh; ++h) {
            caps[h] = 1 + static_cast<int>(rng.next_below(5));
            rows += caps[h];
        }
        while (rows > 50) {  // keep within the 50x10 size budget
            int h = static_cast<int>(rng.next_below(nh));
            if (caps[h] > 1) {
                --caps[h];
                --rows;
            }
        }
        im::Problem p = couple_free_problem(caps);
        im::Matrix m = im::gen_random_matrix(p, rng.next_u64());
        im::ConvexCombination c = im::bvn_decompose(p, m);
        im::Matrix mix = im::mixture_matrix(p, c);
        for (std::size_t k = 0; k < m.data.size(); ++k)
            ok = ok && std::abs(m.data[k] - mix.data[k]) < 1e-9;
        ok = ok && static_cast<int>(c.size()) <= m.nonzeros();
        ++done;
    }
    double secs = elapsed_s(start);
    ok = ok && secs < 60.0;
    report(4, ok, "1000 random couple-free matrices reconstruct within 1e-9 with K <= nnz (" +
                      std::to_string(secs).substr(0, 5) + " s)");
}

// Shared state between criteria 5/6 and 9.
double worst_couple_marginal = 0.0;

void criterion_5() {
    im::Rng rng(777);
    bool ok = true;
    for (int t = 0; t < 1000 && ok; ++t) {
        int nh = 3 + static_cast<int>(rng.next_below(5));  // 3..7 hospitals
        std::vector<int> caps(nh);
        int interns = 0;
        for (int h = 0; h < nh; ++h) {
            caps[h] = 4 + static_cast<int>(rng.next_below(10));
            interns += caps[h];
        }
        while (interns > 100) {
            int h = static_cast<int>(rng.next_below(nh));
            if (caps[h] > 4) {
                --caps[h];
                --interns;
            }
        }
        int max_couples = std::min(4, interns / 8);
        int couples = static_cast<int>(rng.next_below(max_couples + 1));
        im::Instance inst =
            im::gen_random_instance(interns - 2 * couples, couples, caps, rng.next_u64());
        im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
        im::DecompositionReport r = im::approximation_error(inst.problem, inst.target, c);
        ok = ok && r.max_l1 <= r.bound_upper + 1e-9;
        ok = ok && im::validate_combination(inst.problem, c).empty();
        worst_couple_marginal =
            std::max(worst_couple_marginal, couple_marginal_error(inst.problem, inst.target, c));
    }
    for (int n : {8, 16, 32}) {
        im::Instance inst = im::gen_lower_bound(n);
        im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
        im::DecompositionReport r = im::approximation_error(inst.problem, inst.target, c);
        ok = ok && r.max_l1 <= r.bound_upper + 1e-9;
        worst_couple_marginal =
            std::max(worst_couple_marginal, couple_marginal_error(inst.problem, inst.target, c));
    }
    report(5, ok, "max row-L1 error <= 2/min-capacity on 1000 random singles-dominate "
                  "instances and the adversarial family");
}

void criterion_6() {
    im::Instance inst = im::gen_lower_bound(16);  // q = 8
    im::ConvexCombination c = im::approximate_decompose(inst.problem, inst.target);
    im::DecompositionReport r = im::approximation_error(inst.problem, inst.target, c);
    worst_couple_marginal =
        std::max(worst_couple_marginal, couple_marginal_error(inst.problem, inst.target, c));
    bool ok = r.max_l1 >= 0.2 - 1e-9 && r.max_l1 <= 0.25 + 1e-9;
    report(6, ok, "adversarial q=8 instance error lands in [0.2, 0.25] (got " +
                      std::to_string(r.max_l1).substr(0, 8) + ")");
}

void criterion_7() {
    auto start = std::chrono::steady_clock::now();
    im::Instance inst = im::gen_small_probs(1, 1);
    im::BruteForceResult r = im::brute_force_best_decomposition(inst.problem, inst.target);
    double secs = elapsed_s(start);
    bool ok = r.epsilon >= 2.0 / 3.0 - 1e-9 && secs < 300.0;
    report(7, ok, "brute-force oracle confirms no decomposition beats 2/3 on the "
                  "small-probabilities instance (optimal " +
                      std::to_string(r.epsilon).substr(0, 8) + ", " +
                      std::to_string(secs).substr(0, 5) + " s)");
}

void criterion_8() {
    im::CubicGraph g = im::k4_graph();
    im::Instance inst = im::gen_coloring_reduction(g);
    im::ConvexCombination c = im::decomposition_from_coloring(g, im::k4_coloring());
    im::Matrix mix = im::mixture_matrix(inst.problem, c);
    bool ok = c.size() == 3;
    double worst = 0.0;
    for (std::size_t k = 0; k < mix.data.size(); ++k)
        worst = std::max(worst, std::abs(mix.data[k] - inst.target.data[k]));
    ok = ok && worst < 1e-15;  // entries are exact multiples of 1/3
    for (const auto& wa : c)
        ok = ok && im::validate_assignment(inst.problem, wa.assignment).empty();
    report(8, ok, "edge-coloring reconstruction of the reduction matrix is exact and "
                  "saturates every hospital");
}

void criterion_9() {
    bool ok = worst_couple_marginal < 1e-9;
    report(9, ok, "couple marginals exact across all decomposition runs (worst deviation " +
                      std::to_string(worst_couple_marginal) + ")");
}

void criterion_10() {
    im::BenchConfig cfg;
    cfg.mode = im::BenchMode::RandomMatrix;
    cfg.markets = 100;
    cfg.seed = 11;
    cfg.n_interns = 120;
    cfg.n_couples = 5;
    im::BenchResult random_run = im::run_bench(cfg);
    bool ok = random_run.mean_max_l1 < 0.5;

    auto singles = im::gen_synthetic_pool(400, 23, 4, 303);
    auto couples = im::gen_synthetic_pool(40, 23, 4, 404);
    im::BenchConfig paired;
    paired.markets = 30;
    paired.trials = 2000;
    paired.seed = 12;
    paired.n_interns = 120;
    paired.n_couples = 8;
    paired.mode = im::BenchMode::Subsample;
    im::BenchResult sub = im::run_bench(paired, singles, couples);
    paired.mode = im::BenchMode::CapacityCouples;
    im::BenchResult cc = im::run_bench(paired, singles, couples);
    ok = ok && cc.mean_max_l1 <= sub.mean_max_l1 + 1e-12;
    report(10, ok, "bench: random-market mean max-L1 " +
                       std::to_string(random_run.mean_max_l1).substr(0, 6) +
                       " < 0.5; capacity-driven couples (" +
                       std::to_string(cc.mean_max_l1).substr(0, 6) +
                       ") no worse than subsampled couples (" +
                       std::to_string(sub.mean_max_l1).substr(0, 6) + ")");
}

void criterion_11() {
    auto singles = im::gen_synthetic_pool(800, 23, 4, 1001);
    auto couples = im::gen_synthetic_pool(80, 23, 4, 1002);
    int improved = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        std::uint64_t seed = im::derive_seed(9000, static_cast<std::uint64_t>(run));
        im::Problem market = im::subsample_market(singles, couples, 496, 24,
                                                  im::default_capacity_shape(), seed);
        im::Matrix baseline = im::rsd_monte_carlo(market, 2000, seed);
        im::Matrix traded = im::trade_probabilities(market, baseline);
        if (im::expected_first_choice(market, traded) >=
            im::expected_first_choice(market, baseline) - 1e-9)
            ++improved;
    }
    bool ok = improved >= 95;
    report(11, ok, "trade stage keeps or raises the expected first-choice count in " +
                       std::to_string(improved) + "/100 full-size synthetic markets");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) +
                                                              " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
