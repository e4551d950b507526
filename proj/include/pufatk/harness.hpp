#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pufatk/crp.hpp"
#include "pufatk/io.hpp"
#include "pufatk/model.hpp"
#include "pufatk/optim/optimize.hpp"
#include "pufatk/puf.hpp"
#include "pufatk/stats.hpp"

namespace pufatk {

namespace fs = std::filesystem;

struct PufSize {
    std::uint32_t k = 1;
    std::uint32_t n = 16;

    std::string token() const { return std::to_string(k) + "x" + std::to_string(n); }
    bool operator==(const PufSize&) const = default;
};

// "KxN", e.g. "1x16" or "4x64"
inline PufSize parse_size(std::string_view s) {
    const auto x = s.find('x');
    PufSize size;
    try {
        if (x == std::string_view::npos) throw std::invalid_argument("");
        std::size_t ka = 0, na = 0;
        const std::string ks(s.substr(0, x)), ns(s.substr(x + 1));
        const long k = std::stol(ks, &ka);
        const long n = std::stol(ns, &na);
        if (ka != ks.size() || na != ns.size() || k < 1 || n < 1) throw std::invalid_argument("");
        size.k = std::uint32_t(k);
        size.n = std::uint32_t(n);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed PUF size '" + std::string(s) +
                                    "', expected KxN such as 1x16 or 4x64");
    }
    return size;
}

struct ExperimentPlan {
    std::vector<PufSize> sizes = {{1, 16}, {1, 32}, {1, 64}, {1, 128}, {4, 16}, {4, 32}, {4, 64}};
    std::vector<std::uint64_t> crp_sizes = {2000, 10000, 50000, 250000};
    std::vector<std::string> algorithms = {"ais", "clonalg", "cmaes", "de", "rw", "sst"};
    std::uint32_t instances = 10;
    std::uint32_t runs = 5;
    std::uint64_t budget = 100000;
    std::uint64_t test_size = 1000;
    std::uint64_t master_seed = 1;
    std::uint32_t jobs = 1;
};

inline std::string format_plan(const ExperimentPlan& p) {
    std::ostringstream os;
    auto join = [&os](const char* key, const auto& items, auto fmt) {
        os << key << " = ";
        for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : "") << fmt(items[i]);
        os << '\n';
    };
    join("sizes", p.sizes, [](const PufSize& s) { return s.token(); });
    join("crps", p.crp_sizes, [](std::uint64_t c) { return std::to_string(c); });
    join("algorithms", p.algorithms, [](const std::string& a) { return a; });
    os << "instances = " << p.instances << '\n';
    os << "runs = " << p.runs << '\n';
    os << "budget = " << p.budget << '\n';
    os << "test_size = " << p.test_size << '\n';
    os << "master_seed = " << p.master_seed << '\n';
    os << "jobs = " << p.jobs << '\n';
    return os.str();
}

// Line-oriented "key = value" text; '#' starts a comment, lists are
// comma-separated. Unknown keys are an error so typos do not pass silently.
inline ExperimentPlan parse_plan(std::istream& in) {
    ExperimentPlan p;
    std::string line;
    int lineno = 0;
    auto split_list = [](const std::string& v) {
        std::vector<std::string> items;
        std::string cur;
        for (char c : v) {
            if (c == ',') {
                items.push_back(cur);
                cur.clear();
            } else if (!std::isspace(static_cast<unsigned char>(c))) {
                cur += c;
            }
        }
        if (!cur.empty()) items.push_back(cur);
        return items;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("plan line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "sizes") {
                p.sizes.clear();
                for (const auto& t : split_list(val)) p.sizes.push_back(parse_size(t));
            } else if (key == "crps") {
                p.crp_sizes.clear();
                for (const auto& t : split_list(val)) p.crp_sizes.push_back(std::stoull(t));
            } else if (key == "algorithms") {
                p.algorithms.clear();
                for (const auto& t : split_list(val)) {
                    default_config(t);  // validates the tag
                    p.algorithms.push_back(t);
                }
            } else if (key == "instances") {
                p.instances = std::uint32_t(std::stoul(val));
            } else if (key == "runs") {
                p.runs = std::uint32_t(std::stoul(val));
            } else if (key == "budget") {
                p.budget = std::stoull(val);
            } else if (key == "test_size") {
                p.test_size = std::stoull(val);
            } else if (key == "master_seed") {
                p.master_seed = std::stoull(val);
            } else if (key == "jobs") {
                p.jobs = std::uint32_t(std::stoul(val));
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("plan line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (p.sizes.empty() || p.crp_sizes.empty() || p.algorithms.empty() || p.instances < 1 ||
        p.runs < 1 || p.budget < 1 || p.test_size < 1)
        throw std::invalid_argument("plan is incomplete");
    return p;
}

inline ExperimentPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file: " + path);
    return parse_plan(in);
}

// Seed discipline: every artifact seed is a pure function of the master
// seed and its coordinates, so any single artifact regenerates alone.
inline std::uint64_t instance_seed(std::uint64_t master, PufSize s, std::uint32_t i) {
    return derive_seed(master, hash_str("inst"), s.k, s.n, i);
}
inline std::uint64_t learning_seed(std::uint64_t master, PufSize s, std::uint32_t i,
                                   std::uint64_t crps) {
    return derive_seed(master, hash_str("learn"), s.k, s.n, i, crps);
}
inline std::uint64_t test_seed(std::uint64_t master, PufSize s, std::uint32_t i) {
    return derive_seed(master, hash_str("test"), s.k, s.n, i);
}
inline std::uint64_t run_seed(std::uint64_t master, PufSize s, std::uint32_t i,
                              const std::string& alg, std::uint64_t crps, std::uint32_t j) {
    return derive_seed(master, hash_str("run"), s.k, s.n, i, hash_str(alg), crps, j);
}

struct AttackOutcome {
    std::uint32_t instance = 0;
    std::uint32_t run = 0;
    RunRecord rec;
    std::uint64_t train_errors = 0;
    std::uint64_t test_errors = 0;
};

inline AttackOutcome run_attack(const CrpSet& learning, const CrpSet& test,
                                const AlgorithmConfig& cfg, Budget budget,
                                std::uint64_t seed) {
    if (learning.n != test.n || learning.k != test.k)
        throw std::invalid_argument("learning/test sets have mismatched shapes");
    const std::size_t dim = std::size_t(learning.k) * learning.stride();
    Objective objective = [&learning](std::span<const double> genes) {
        return double(fitness_flat(genes, learning, 0, learning.size()));
    };
    AttackOutcome out;
    out.rec = optimize(objective, dim, cfg, budget, seed);
    out.train_errors = std::uint64_t(out.rec.best_fitness);
    const auto model = CandidateModel::from_genes(out.rec.best_genes, learning.k);
    out.test_errors = evaluate_test(model, test).errors;
    return out;
}

// --- run record files -------------------------------------------------------

inline constexpr int kRecVersion = 1;

inline nlohmann::json record_to_json(const AttackOutcome& out) {
    nlohmann::json j;
    j["version"] = kRecVersion;
    j["algorithm"] = out.rec.algorithm;
    j["seed"] = out.rec.seed;
    j["instance"] = out.instance;
    j["run"] = out.run;
    j["evaluations"] = out.rec.evaluations;
    j["train_errors"] = out.train_errors;
    j["test_errors"] = out.test_errors;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : out.rec.trace)
        trace.push_back({t.evaluation, t.value});
    j["trace"] = std::move(trace);
    j["genes"] = out.rec.best_genes;
    return j;
}

inline AttackOutcome record_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kRecVersion)
        throw std::runtime_error("unsupported run record version");
    AttackOutcome out;
    out.rec.algorithm = j.at("algorithm").get<std::string>();
    out.rec.seed = j.at("seed").get<std::uint64_t>();
    out.instance = j.at("instance").get<std::uint32_t>();
    out.run = j.at("run").get<std::uint32_t>();
    out.rec.evaluations = j.at("evaluations").get<std::uint64_t>();
    out.train_errors = j.at("train_errors").get<std::uint64_t>();
    out.test_errors = j.at("test_errors").get<std::uint64_t>();
    for (const auto& t : j.at("trace"))
        out.rec.trace.push_back({t.at(0).get<std::uint64_t>(), t.at(1).get<double>()});
    out.rec.best_genes = j.at("genes").get<std::vector<double>>();
    out.rec.best_fitness = double(out.train_errors);
    return out;
}

inline void save_record(const AttackOutcome& out, const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write record: " + path.string());
    f << record_to_json(out).dump() << '\n';
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::optional<AttackOutcome> try_load_record(const fs::path& path) {
    std::ifstream f(path);
    if (!f) return std::nullopt;
    try {
        nlohmann::json j;
        f >> j;
        return record_from_json(j);
    } catch (const std::exception&) {
        return std::nullopt;  // damaged record: redo the run
    }
}

// --- cell aggregation -------------------------------------------------------

struct CellStats {
    std::uint64_t min_train = 0, med_train = 0, max_train = 0;
    std::uint64_t min_test = 0, med_test = 0, max_test = 0;
    std::optional<double> spearman_rho;  // train vs test errors
};

struct CellResult {
    PufSize size;
    std::uint64_t crps = 0;
    std::string algorithm;
    std::vector<AttackOutcome> runs;
    CellStats stats;
    bool complete(const ExperimentPlan& p) const {
        return runs.size() == std::size_t(p.instances) * p.runs;
    }
};

inline CellStats compute_cell_stats(const std::vector<AttackOutcome>& runs) {
    CellStats s;
    if (runs.empty()) return s;
    std::vector<double> train, test;
    for (const auto& r : runs) {
        train.push_back(double(r.train_errors));
        test.push_back(double(r.test_errors));
    }
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return std::uint64_t(v[v.size() / 2]);
    };
    s.min_train = std::uint64_t(*std::min_element(train.begin(), train.end()));
    s.max_train = std::uint64_t(*std::max_element(train.begin(), train.end()));
    s.med_train = med(train);
    s.min_test = std::uint64_t(*std::min_element(test.begin(), test.end()));
    s.max_test = std::uint64_t(*std::max_element(test.begin(), test.end()));
    s.med_test = med(test);
    if (runs.size() >= 2) s.spearman_rho = spearman(train, test);
    return s;
}

inline fs::path cell_dir(const fs::path& out, PufSize s, std::uint64_t crps,
                         const std::string& alg) {
    return out / s.token() / std::to_string(crps) / alg;
}

inline fs::path record_path(const fs::path& out, PufSize s, std::uint64_t crps,
                            const std::string& alg, std::uint32_t i, std::uint32_t j) {
    return cell_dir(out, s, crps, alg) /
           ("run-" + std::to_string(i) + "-" + std::to_string(j) + ".rec");
}

using ProgressFn = std::function<void(const std::string&)>;

inline std::vector<CellResult> collect_results(const ExperimentPlan& plan, const fs::path& out);

// Runs the full grid. Each completed run persists immediately as one .rec
// file, so an interrupted grid resumes by skipping the records already on
// disk. With jobs > 1, (size, crps, instance) groups run on worker threads;
// every run's outcome depends only on derived seeds, so the result files
// are identical at any parallelism level.
inline std::vector<CellResult> run_experiment(const ExperimentPlan& plan, const fs::path& out,
                                              ProgressFn progress = nullptr) {
    struct Task {
        PufSize size;
        std::uint64_t crps;
        std::uint32_t instance;
    };
    std::vector<Task> tasks;
    for (const auto& size : plan.sizes)
        for (const auto crps : plan.crp_sizes)
            for (std::uint32_t i = 0; i < plan.instances; ++i)
                tasks.push_back({size, crps, i});

    for (const auto& size : plan.sizes)
        for (const auto crps : plan.crp_sizes)
            for (const auto& alg : plan.algorithms)
                fs::create_directories(cell_dir(out, size, crps, alg));

    std::mutex progress_mu;
    auto report = [&](const std::string& line) {
        if (!progress) return;
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(line);
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const auto inst = sample_puf_instance(
                task.size.n, task.size.k, instance_seed(plan.master_seed, task.size, task.instance));
            const auto learning = generate_crp_set(
                inst, task.crps, SetRole::learning,
                learning_seed(plan.master_seed, task.size, task.instance, task.crps));
            const auto test = generate_crp_set(inst, plan.test_size, SetRole::test,
                                               test_seed(plan.master_seed, task.size, task.instance));
            for (const auto& alg : plan.algorithms) {
                const auto cfg = default_config(alg);
                for (std::uint32_t j = 0; j < plan.runs; ++j) {
                    const auto path = record_path(out, task.size, task.crps, alg, task.instance, j);
                    if (try_load_record(path)) continue;
                    AttackOutcome o = run_attack(
                        learning, test, cfg, Budget{plan.budget},
                        run_seed(plan.master_seed, task.size, task.instance, alg, task.crps, j));
                    o.instance = task.instance;
                    o.run = j;
                    save_record(o, path);
                    std::ostringstream os;
                    os << task.size.token() << '/' << task.crps << '/' << alg << " run "
                       << task.instance << '-' << j << ": train=" << o.train_errors
                       << " test=" << o.test_errors << " (" << int(o.rec.wall_time_s) << "s)";
                    report(os.str());
                }
            }
        }
    };

    const std::uint32_t jobs = std::max<std::uint32_t>(1, plan.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    return collect_results(plan, out);
}

// Reads every persisted record of the plan's grid; aggregates are a pure
// function of the record files.
inline std::vector<CellResult> collect_results(const ExperimentPlan& plan, const fs::path& out) {
    std::vector<CellResult> cells;
    for (const auto& size : plan.sizes) {
        for (const auto crps : plan.crp_sizes) {
            for (const auto& alg : plan.algorithms) {
                CellResult cell;
                cell.size = size;
                cell.crps = crps;
                cell.algorithm = alg;
                for (std::uint32_t i = 0; i < plan.instances; ++i)
                    for (std::uint32_t j = 0; j < plan.runs; ++j)
                        if (auto rec = try_load_record(record_path(out, size, crps, alg, i, j)))
                            cell.runs.push_back(std::move(*rec));
                cell.stats = compute_cell_stats(cell.runs);
                // manifest: one line per landed record, sorted, rewritten atomically
                if (!cell.runs.empty()) {
                    std::ofstream mf(cell_dir(out, size, crps, alg) / "manifest.txt");
                    for (const auto& r : cell.runs)
                        mf << "run-" << r.instance << "-" << r.run << ".rec " << r.train_errors
                           << " " << r.test_errors << '\n';
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

// --- tables and plot data ---------------------------------------------------

// Minimum test error per cell, rows (size, crps), columns algorithms.
inline std::string summarize_min_errors(const ExperimentPlan& plan,
                                        const std::vector<CellResult>& cells,
                                        std::ostream* csv = nullptr) {
    auto find_cell = [&](PufSize s, std::uint64_t c, const std::string& a) -> const CellResult* {
        for (const auto& cell : cells)
            if (cell.size == s && cell.crps == c && cell.algorithm == a) return &cell;
        return nullptr;
    };
    std::ostringstream os;
    os << "puf      crps    ";
    if (csv) *csv << "puf,crps";
    for (const auto& alg : plan.algorithms) {
        os << ' ' << alg;
        for (std::size_t pad = alg.size(); pad < 8; ++pad) os << ' ';
        if (csv) *csv << ',' << alg;
    }
    os << '\n';
    if (csv) *csv << '\n';
    for (const auto& size : plan.sizes) {
        for (const auto crps : plan.crp_sizes) {
            os << size.token();
            for (std::size_t pad = size.token().size(); pad < 8; ++pad) os << ' ';
            os << ' ' << crps;
            for (std::size_t pad = std::to_string(crps).size(); pad < 7; ++pad) os << ' ';
            if (csv) *csv << size.token() << ',' << crps;
            for (const auto& alg : plan.algorithms) {
                const CellResult* cell = find_cell(size, crps, alg);
                std::string v = "-";
                if (cell && cell->complete(plan)) v = std::to_string(cell->stats.min_test);
                os << ' ' << v;
                for (std::size_t pad = v.size(); pad < 8; ++pad) os << ' ';
                if (csv) *csv << ',' << (v == "-" ? "" : v);
            }
            os << '\n';
            if (csv) *csv << '\n';
        }
    }
    return os.str();
}

// Violin export: per run one row of (normalized train error per 1000,
// test error), labeled l-<crps> / t-<crps>.
inline void export_violin(const CellResult& cell, const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write: " + path.string());
    f << "l-" << cell.crps << ",t-" << cell.crps << '\n';
    for (const auto& r : cell.runs)
        f << (double(r.train_errors) * 1000.0 / double(cell.crps)) << ',' << r.test_errors
          << '\n';
}

// Scatter export: raw (train error, test error) pairs, one row per run.
inline void export_scatter(const CellResult& cell, const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write: " + path.string());
    f << "train_errors,test_errors\n";
    for (const auto& r : cell.runs) f << r.train_errors << ',' << r.test_errors << '\n';
}

}  // namespace pufatk
