// Command-line front-end: dataset generation, single attacks, full
// benchmark grids, and statistics over stored results.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pufatk/harness.hpp"
#include "pufatk/io.hpp"

namespace fs = std::filesystem;
using namespace pufatk;

namespace {

int cmd_generate(const std::string& size_tok, std::uint64_t crps, std::uint64_t test_count,
                 std::uint64_t seed, const std::string& out_dir) {
    const PufSize size = parse_size(size_tok);
    fs::create_directories(out_dir);
    const auto inst = sample_puf_instance(size.n, size.k, seed);
    const auto learning =
        generate_crp_set(inst, crps, SetRole::learning, derive_seed(seed, hash_str("learn"), crps));
    const auto forbidden = challenge_keys(learning);
    const auto test = generate_crp_set(inst, test_count, SetRole::test,
                                       derive_seed(seed, hash_str("test")), &forbidden);

    const std::string stem = size.token() + "-" + std::to_string(seed);
    const fs::path base(out_dir);
    save_instance(inst, (base / (stem + ".puf")).string());
    save_crpset(learning, (base / (stem + "-learn.crp")).string());
    save_crpset(test, (base / (stem + "-test.crp")).string());

    std::uint64_t digest = derive_seed(seed, size.k, size.n);
    for (const auto& w : inst.chains)
        for (double x : w) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof bits);
            digest = derive_seed(digest, bits);
        }
    std::cout << "instance " << size.token() << " seed=" << seed << " digest=" << std::hex
              << digest << std::dec << '\n'
              << "wrote " << (base / (stem + ".puf")).string() << ", " << crps
              << "-CRP learning set, " << test_count << "-CRP test set"
              << (test.overlap_allowed ? " (overlap allowed)" : "") << '\n';
    return 0;
}

int cmd_attack(const std::string& alg, const std::string& learn_path,
               const std::string& test_path, std::uint64_t budget, std::uint64_t seed,
               const std::string& record_out) {
    const auto cfg = default_config(alg);
    const auto learning = load_crpset(learn_path);
    const auto test = load_crpset(test_path);
    if (test.role != SetRole::test)
        throw std::runtime_error(test_path + " is not a test-role CRP set");

    auto outcome = run_attack(learning, test, cfg, Budget{budget}, seed);
    const auto model = CandidateModel::from_genes(outcome.rec.best_genes, learning.k);
    const auto report = evaluate_test(model, test);

    std::cout << "algorithm:    " << describe(cfg) << '\n'
              << "seed:         " << seed << '\n'
              << "evaluations:  " << outcome.rec.evaluations << '\n'
              << "train errors: " << outcome.train_errors << " / " << learning.size() << '\n'
              << "test errors:  " << report.errors << " / " << report.total << '\n'
              << "accuracy:     " << report.accuracy << '\n'
              << "success:      " << (report.success ? "yes" : "no") << '\n';
    if (!record_out.empty()) save_record(outcome, record_out);
    return 0;
}

int cmd_bench(const std::string& plan_path, std::string out_dir, std::uint32_t jobs_override,
              std::uint64_t seed_override, bool have_seed) {
    ExperimentPlan plan = load_plan(plan_path);
    if (jobs_override > 0) plan.jobs = jobs_override;
    if (have_seed) plan.master_seed = seed_override;
    if (out_dir.empty()) {
        const char* env = std::getenv("PUFATK_RESULTS");
        out_dir = env ? env : "results";
    }
    std::cerr << "# resolved plan\n" << format_plan(plan);
    fs::create_directories(out_dir);

    const auto cells =
        run_experiment(plan, out_dir, [](const std::string& line) { std::cerr << line << '\n'; });

    std::ofstream csv(fs::path(out_dir) / "summary.csv");
    std::cout << summarize_min_errors(plan, cells, &csv);
    return 0;
}

int cmd_stats(const std::string& plan_path, std::string in_dir, const std::string& table,
              const std::string& cell_filter) {
    ExperimentPlan plan = load_plan(plan_path);
    if (in_dir.empty()) {
        const char* env = std::getenv("PUFATK_RESULTS");
        in_dir = env ? env : "results";
    }
    if (!cell_filter.empty()) {
        const PufSize s = parse_size(cell_filter);
        std::erase_if(plan.sizes, [&](const PufSize& x) { return !(x == s); });
        if (plan.sizes.empty()) throw std::runtime_error("cell not in plan: " + cell_filter);
    }
    const auto cells = collect_results(plan, in_dir);

    if (table == "min") {
        std::ofstream csv(fs::path(in_dir) / "summary.csv");
        std::cout << summarize_min_errors(plan, cells, &csv);
    } else {  // spearman
        std::cout << "puf      crps    algorithm  rho\n";
        for (const auto& cell : cells) {
            if (cell.runs.empty()) continue;
            std::ostringstream rho;
            if (cell.stats.spearman_rho)
                rho << *cell.stats.spearman_rho;
            else
                rho << "undefined";
            std::cout << cell.size.token() << "\t" << cell.crps << "\t" << cell.algorithm
                      << "\t" << rho.str() << '\n';
        }
    }
    // plot-ready exports for every populated cell of the (filtered) plan
    for (const auto& cell : cells) {
        if (cell.runs.empty()) continue;
        const std::string tag =
            cell.size.token() + "-" + std::to_string(cell.crps) + "-" + cell.algorithm;
        export_violin(cell, fs::path(in_dir) / ("violin-" + tag + ".csv"));
        export_scatter(cell, fs::path(in_dir) / ("scatter-" + tag + ".csv"));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arbiter PUF simulation and CRP modeling-attack benchmark"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a PUF instance and CRP datasets");
    std::string g_size = "1x16", g_out = ".";
    std::uint64_t g_crps = 2000, g_test = 1000, g_seed = 1;
    gen->add_option("--size", g_size, "PUF size KxN, e.g. 1x16 or 4x64")->required();
    gen->add_option("--crps", g_crps, "learning set size");
    gen->add_option("--test", g_test, "test set size");
    gen->add_option("--seed", g_seed, "instance seed");
    gen->add_option("--out", g_out, "output directory");

    // attack
    auto* atk = app.add_subcommand("attack", "Run one modeling attack on stored datasets");
    std::string a_alg, a_learn, a_test, a_out;
    std::uint64_t a_budget = 100000, a_seed = 1;
    atk->add_option("--alg", a_alg, "algorithm: ais, clonalg, cmaes, de, rw, sst")->required();
    atk->add_option("--learn", a_learn, "learning .crp file")->required();
    atk->add_option("--test", a_test, "test .crp file")->required();
    atk->add_option("--budget", a_budget, "fitness evaluation budget");
    atk->add_option("--seed", a_seed, "run seed");
    atk->add_option("--record", a_out, "write the run record to this file");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a full benchmark grid from a plan file");
    std::string b_plan, b_out;
    std::uint32_t b_jobs = 0;
    std::uint64_t b_seed = 0;
    bool b_have_seed = false;
    bench->add_option("--plan", b_plan, "plan file")->required();
    bench->add_option("--out", b_out, "results directory (default $PUFATK_RESULTS or ./results)");
    bench->add_option("--jobs", b_jobs, "worker thread limit (overrides plan)");
    bench->add_option("--seed", b_seed, "master seed (overrides plan)")
        ->each([&](const std::string&) { b_have_seed = true; });

    // stats
    auto* stats = app.add_subcommand("stats", "Summarize stored results and export plot data");
    std::string s_plan, s_in, s_table = "min", s_cell;
    stats->add_option("--plan", s_plan, "plan file describing the grid")->required();
    stats->add_option("--in", s_in, "results directory (default $PUFATK_RESULTS or ./results)");
    stats->add_option("--table", s_table, "min | spearman")
        ->check(CLI::IsMember({"min", "spearman"}));
    stats->add_option("--cell", s_cell, "restrict to one PUF size, e.g. 4x16");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (gen->parsed()) return cmd_generate(g_size, g_crps, g_test, g_seed, g_out);
        if (atk->parsed()) return cmd_attack(a_alg, a_learn, a_test, a_budget, a_seed, a_out);
        if (bench->parsed()) return cmd_bench(b_plan, b_out, b_jobs, b_seed, b_have_seed);
        if (stats->parsed()) return cmd_stats(s_plan, s_in, s_table, s_cell);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
