// intern-match: probabilistic assignment pipeline for the medical
// internship lottery. See README.md for usage examples.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "intern_match/bvn.hpp"
#include "intern_match/couples.hpp"
#include "intern_match/harness.hpp"
#include "intern_match/instances.hpp"
#include "intern_match/io.hpp"
#include "intern_match/lp.hpp"
#include "intern_match/model.hpp"
#include "intern_match/rating.hpp"
#include "intern_match/rsd.hpp"

namespace im = intern_match;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::uint64_t seed = 1;
    long trials = 100000;
    int markets = 100;
    double alpha = 1.0;
    std::string mode = "subsample";
    std::string out_dir = ".";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--seed", o.seed, "Master RNG seed");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials for the RSD stage");
    cmd->add_option("--markets", o.markets, "Number of simulated markets (bench)");
    cmd->add_option("--alpha", o.alpha, "Singles/couples demand ratio for the error bound");
    cmd->add_option("--mode", o.mode, "Bench mode: subsample, random, or capacity-couples")
        ->check(CLI::IsMember({"subsample", "random", "capacity-couples"}));
    cmd->add_option("--out-dir", o.out_dir, "Directory for output artifacts");
    cmd->add_option("--format", o.format, "Output format for tabular artifacts")
        ->check(CLI::IsMember({"csv", "json"}));
}

fs::path out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / name;
}

im::Problem load_problem(const std::string& hospitals, const std::string& preferences) {
    im::Problem p = im::read_problem_csv(hospitals, preferences);
    std::vector<im::Violation> violations = im::validate_problem(p);
    if (!violations.empty()) {
        for (const im::Violation& v : violations)
            std::cerr << "validation: " << v.path << ": " << v.message << "\n";
        std::exit(kExitValidation);
    }
    return p;
}

void write_table(const CommonOpts& o, const std::string& stem,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows,
                 const std::vector<std::string>& row_labels = {}) {
    if (o.format == "json") {
        json j = json::array();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            json obj;
            if (!row_labels.empty()) obj["id"] = row_labels[r];
            for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = rows[r][c];
            j.push_back(obj);
        }
        std::ofstream out(out_path(o, stem + ".json"));
        if (!out) throw im::IoError(stem + ".json", 0, "cannot open file for writing");
        out << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path(o, stem + ".csv"));
    if (!out) throw im::IoError(stem + ".csv", 0, "cannot open file for writing");
    out.precision(12);
    if (!row_labels.empty()) out << "id,";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!row_labels.empty()) out << row_labels[r] << ",";
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            out << rows[r][c] << (c + 1 < rows[r].size() ? "," : "\n");
    }
}

// ---------------------------------------------------------------- commands

int cmd_rsd(const CommonOpts& o, const std::string& hospitals, const std::string& prefs,
            bool exact) {
    im::Problem p = load_problem(hospitals, prefs);
    im::Matrix m = exact || p.num_units() <= im::kExactEnumerationLimit
                       ? im::rsd_exact(p)
                       : im::rsd_monte_carlo(p, o.trials, o.seed);
    im::write_matrix_csv(out_path(o, "rsd.csv").string(), p, m);
    std::cout << "wrote " << out_path(o, "rsd.csv").string() << "\n";
    return 0;
}

int cmd_lp(const CommonOpts& o, const std::string& hospitals, const std::string& prefs,
           const std::string& matrix_path) {
    im::Problem p = load_problem(hospitals, prefs);
    im::Matrix baseline = matrix_path.empty()
                              ? (p.num_units() <= im::kExactEnumerationLimit
                                     ? im::rsd_exact(p)
                                     : im::rsd_monte_carlo(p, o.trials, o.seed))
                              : im::read_matrix_csv(matrix_path, p);
    im::Matrix traded = im::trade_probabilities(p, baseline);
    im::write_matrix_csv(out_path(o, "traded.csv").string(), p, traded);
    std::cout << "total happiness " << im::total_happiness(p, baseline) << " -> "
              << im::total_happiness(p, traded) << "\n";
    std::cout << "wrote " << out_path(o, "traded.csv").string() << "\n";
    return 0;
}

int cmd_decompose(const CommonOpts& o, const std::string& hospitals, const std::string& prefs,
                  const std::string& matrix_path) {
    im::Problem p = load_problem(hospitals, prefs);
    im::Matrix m = im::read_matrix_csv(matrix_path, p);
    std::vector<im::Violation> violations = im::validate_target(p, m);
    if (!violations.empty()) {
        for (const im::Violation& v : violations)
            std::cerr << "validation: " << v.path << ": " << v.message << "\n";
        return kExitValidation;
    }
    bool has_couples = false;
    for (int u = 0; u < p.num_units(); ++u) has_couples |= p.unit_is_couple(u);
    im::ConvexCombination c =
        has_couples ? im::approximate_decompose(p, m) : im::bvn_decompose(p, m);
    im::write_combination_json(out_path(o, "lottery.json").string(), p, c, o.seed);
    im::DecompositionReport report = im::approximation_error(p, m, c, o.alpha);
    std::cout << "terms " << c.size() << " max row error " << report.max_l1
              << " avg " << report.avg_l1 << " bound " << report.bound_upper << "\n";
    std::cout << "wrote " << out_path(o, "lottery.json").string() << "\n";
    return 0;
}

int cmd_pipeline(const CommonOpts& o, const std::string& hospitals, const std::string& prefs) {
    im::Problem p = load_problem(hospitals, prefs);
    im::PipelineResult r = im::run_pipeline(p, o.trials, o.seed, o.alpha);
    im::write_matrix_csv(out_path(o, "rsd.csv").string(), p, r.baseline);
    im::write_matrix_csv(out_path(o, "traded.csv").string(), p, r.traded);
    im::write_combination_json(out_path(o, "lottery.json").string(), p, r.lottery, o.seed);
    {
        std::ofstream out(out_path(o, "outcome.csv"));
        out << "intern_id,hospital_id\n";
        for (int i = 0; i < p.num_interns(); ++i)
            out << p.intern_ids[i] << "," << p.hospitals[r.outcome.hospital_of[i]].id << "\n";
    }
    std::cout << "interns " << p.num_interns() << " hospitals " << p.num_hospitals()
              << " lottery terms " << r.lottery.size() << "\n";
    std::cout << "total happiness " << im::total_happiness(p, r.baseline) << " -> "
              << im::total_happiness(p, r.traded) << "\n";
    std::cout << "expected first choices " << im::expected_first_choice(p, r.baseline)
              << " -> " << im::expected_first_choice(p, r.traded) << "\n";
    std::cout << "max row error " << r.report.max_l1 << " (bound " << r.report.bound_upper
              << ")\n";
    std::cout << "artifacts in " << o.out_dir << ": rsd.csv traded.csv lottery.json outcome.csv\n";
    return 0;
}

int cmd_bench(const CommonOpts& o, int n_interns, int n_couples) {
    im::BenchConfig cfg;
    cfg.mode = im::bench_mode_from_string(o.mode);
    cfg.markets = o.markets;
    cfg.trials = std::min<long>(o.trials, 5000);
    cfg.seed = o.seed;
    cfg.alpha = o.alpha;
    cfg.n_interns = n_interns;
    cfg.n_couples = n_couples;
    // Small markets cannot fill the full 23-hospital template at the
    // minimum capacity of 4; keep the smallest hospitals and drop the rest.
    while (static_cast<int>(cfg.capacity_shape.size()) * 4 > n_interns &&
           cfg.capacity_shape.size() > 2)
        cfg.capacity_shape.pop_back();
    std::vector<std::vector<int>> singles_pool, couples_pool;
    if (cfg.mode != im::BenchMode::RandomMatrix) {
        int nh = static_cast<int>(cfg.capacity_shape.size());
        singles_pool = im::gen_synthetic_pool(600, nh, 4, im::derive_seed(o.seed, 101));
        couples_pool = im::gen_synthetic_pool(60, nh, 4, im::derive_seed(o.seed, 202));
    }
    im::BenchResult result = im::run_bench(cfg, singles_pool, couples_pool);

    std::vector<std::vector<double>> rows;
    for (std::size_t d = 0; d < result.draws.size(); ++d)
        rows.push_back({static_cast<double>(d), result.draws[d].max_l1, result.draws[d].avg_l1});
    write_table(o, "bench_draws", {"draw", "max_l1", "avg_l1"}, rows);

    // Histogram of per-draw max errors in 0.01-wide bins, with the
    // worst-case bound alongside for scale.
    std::vector<int> bins(101, 0);
    for (const im::BenchDraw& d : result.draws) {
        int b = std::min(100, static_cast<int>(d.max_l1 / 0.01));
        bins[b]++;
    }
    std::vector<std::vector<double>> hist;
    for (int b = 0; b <= 100; ++b)
        if (bins[b] > 0)
            hist.push_back({b * 0.01, (b + 1) * 0.01, static_cast<double>(bins[b])});
    write_table(o, "bench_histogram", {"bin_lo", "bin_hi", "count"}, hist);

    std::cout << "markets " << result.draws.size() << " mean max L1 " << result.mean_max_l1
              << " mean avg L1 " << result.mean_avg_l1 << " bound " << result.bound_upper << "\n";
    std::cout << "artifacts in " << o.out_dir << ": bench_draws, bench_histogram\n";
    return 0;
}

int cmd_rate(const CommonOpts& o, const std::string& hospitals, const std::string& prefs,
             const std::string& area_path) {
    im::Problem p = load_problem(hospitals, prefs);
    im::HospitalRating fc = im::rating_first_choice(p);
    im::HospitalRating wt = im::rating_weighted(p);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int h = 0; h < p.num_hospitals(); ++h) {
        labels.push_back(p.hospitals[h].id);
        rows.push_back({fc.score[h], static_cast<double>(fc.rank[h]), wt.score[h],
                        static_cast<double>(wt.rank[h])});
    }
    write_table(o, "ratings",
                {"first_choice_score", "first_choice_rank", "weighted_score", "weighted_rank"},
                rows, labels);
    if (!area_path.empty()) {
        std::vector<int> areas = im::read_area_map_csv(area_path, p);
        std::vector<double> frac = im::same_area_topk(p, areas, 5);
        std::vector<std::vector<double>> arows;
        for (std::size_t k = 0; k < frac.size(); ++k)
            arows.push_back({static_cast<double>(k + 2), frac[k]});
        write_table(o, "same_area", {"k", "fraction_all_same_area"}, arows);
    }
    if (p.num_hospitals() >= 3) {
        im::TripletDistribution t = im::top_triplet_distribution(p);
        std::vector<std::vector<double>> trows;
        std::vector<std::string> tlabels;
        for (std::size_t i = 0; i < t.triplets.size(); ++i) {
            auto [a, b, c] = t.triplets[i];
            tlabels.push_back(p.hospitals[a].id + ">" + p.hospitals[b].id + ">" +
                              p.hospitals[c].id);
            trows.push_back({t.density[i], t.cumulative[i]});
        }
        write_table(o, "triplets", {"density", "cumulative"}, trows, tlabels);
    }
    std::cout << "artifacts in " << o.out_dir << ": ratings";
    if (!area_path.empty()) std::cout << ", same_area";
    if (p.num_hospitals() >= 3) std::cout << ", triplets";
    std::cout << "\n";
    return 0;
}

int cmd_generate(const CommonOpts& o, const std::string& family, int n, int m_param, int k_param,
                 const std::string& graph_path, int n_interns, int n_couples) {
    im::Instance inst;
    if (family == "lower-bound") {
        inst = im::gen_lower_bound(n);
    } else if (family == "small-probs") {
        inst = im::gen_small_probs(m_param, k_param);
    } else if (family == "coloring") {
        im::CubicGraph g = graph_path.empty() ? im::k4_graph() : im::read_graph_edge_list(graph_path);
        inst = im::gen_coloring_reduction(g);
    } else if (family == "random") {
        std::vector<int> caps = im::scale_capacities(im::default_capacity_shape(), n_interns);
        inst = im::gen_random_instance(n_interns - 2 * n_couples, n_couples, caps, o.seed);
    } else {
        std::cerr << "unknown family '" << family << "'\n";
        return kExitValidation;
    }
    im::write_hospitals_csv(out_path(o, "hospitals.csv").string(), inst.problem.hospitals);
    im::write_preferences_csv(out_path(o, "preferences.csv").string(), inst.problem);
    if (inst.target.rows > 0)
        im::write_matrix_csv(out_path(o, "target.csv").string(), inst.problem, inst.target);
    std::cout << "interns " << inst.problem.num_interns() << " hospitals "
              << inst.problem.num_hospitals() << "\n";
    std::cout << "artifacts in " << o.out_dir << ": hospitals.csv preferences.csv"
              << (inst.target.rows > 0 ? " target.csv" : "") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic assignment pipeline for the internship lottery"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string hospitals, prefs, matrix_path, area_path, family = "random", graph_path;
    int n = 16, m_param = 1, k_param = 1, n_interns = 60, n_couples = 3;
    bool exact = false;

    auto* pipeline = app.add_subcommand("pipeline", "RSD -> trade LP -> lottery, end to end");
    add_common(pipeline, o);
    pipeline->add_option("--hospitals", hospitals, "Hospitals CSV")->required();
    pipeline->add_option("--preferences", prefs, "Preferences CSV")->required();

    auto* bench = app.add_subcommand("bench", "Simulate many markets and report lottery error");
    add_common(bench, o);
    bench->add_option("--interns", n_interns, "Interns per market");
    bench->add_option("--couples", n_couples, "Couples per market");

    auto* rate = app.add_subcommand("rate", "Hospital ratings and preference statistics");
    add_common(rate, o);
    rate->add_option("--hospitals", hospitals, "Hospitals CSV")->required();
    rate->add_option("--preferences", prefs, "Preferences CSV")->required();
    rate->add_option("--areas", area_path, "Hospital-to-area map CSV");

    auto* generate = app.add_subcommand("generate", "Write a benchmark instance family");
    add_common(generate, o);
    generate->add_option("--family", family, "lower-bound, small-probs, coloring, or random")
        ->check(CLI::IsMember({"lower-bound", "small-probs", "coloring", "random"}));
    generate->add_option("--n", n, "Size parameter for lower-bound");
    generate->add_option("--m", m_param, "m parameter for small-probs");
    generate->add_option("--k", k_param, "k parameter for small-probs");
    generate->add_option("--graph", graph_path, "Cubic graph edge list for coloring");
    generate->add_option("--interns", n_interns, "Interns for random family");
    generate->add_option("--couples", n_couples, "Couples for random family");

    auto* decompose = app.add_subcommand("decompose", "Decompose a probability matrix");
    add_common(decompose, o);
    decompose->add_option("--hospitals", hospitals, "Hospitals CSV")->required();
    decompose->add_option("--preferences", prefs, "Preferences CSV")->required();
    decompose->add_option("--matrix", matrix_path, "Target probability matrix CSV")->required();

    auto* rsd = app.add_subcommand("rsd", "Serial-dictatorship probability matrix");
    add_common(rsd, o);
    rsd->add_option("--hospitals", hospitals, "Hospitals CSV")->required();
    rsd->add_option("--preferences", prefs, "Preferences CSV")->required();
    rsd->add_flag("--exact", exact, "Force exact enumeration");

    auto* lp = app.add_subcommand("lp", "Happiness-maximizing probability trade");
    add_common(lp, o);
    lp->add_option("--hospitals", hospitals, "Hospitals CSV")->required();
    lp->add_option("--preferences", prefs, "Preferences CSV")->required();
    lp->add_option("--matrix", matrix_path, "Baseline matrix CSV (default: run RSD)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pipeline->parsed()) return cmd_pipeline(o, hospitals, prefs);
        if (bench->parsed()) return cmd_bench(o, n_interns, n_couples);
        if (rate->parsed()) return cmd_rate(o, hospitals, prefs, area_path);
        if (generate->parsed())
            return cmd_generate(o, family, n, m_param, k_param, graph_path, n_interns, n_couples);
        if (decompose->parsed()) return cmd_decompose(o, hospitals, prefs, matrix_path);
        if (rsd->parsed()) return cmd_rsd(o, hospitals, prefs, exact);
        if (lp->parsed()) return cmd_lp(o, hospitals, prefs, matrix_path);
    } catch (const im::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const im::CoupleStrandedError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return 0;
}
