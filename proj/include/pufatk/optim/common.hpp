#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pufatk/rng.hpp"

namespace pufatk {

using Objective = std::function<double(std::span<const double>)>;

struct Budget {
    std::uint64_t max_evaluations = 100000;
};

struct TracePoint {
    std::uint64_t evaluation;  // 1-based index of the fitness call
    double value;              // best-so-far after that call
};

struct RunRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::vector<double> best_genes;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::uint64_t evaluations = 0;
    std::vector<TracePoint> trace;  // improvements only; non-increasing values
    double wall_time_s = 0.0;       // informational; not serialized
};

// Counts every fitness call against the budget and keeps the best-ever
// candidate plus its improvement trace. Optimizers must check remaining()
// before evaluating; exceeding the budget is a programming error.
class Evaluator {
public:
    Evaluator(Objective f, std::uint64_t max_evaluations)
        : f_(std::move(f)), budget_(max_evaluations) {}

    double operator()(std::span<const double> x) {
        if (used_ >= budget_)
            throw std::logic_error("fitness evaluation budget exceeded");
        ++used_;
        const double v = f_(x);
        if (v < best_.best_fitness) {
            best_.best_fitness = v;
            best_.best_genes.assign(x.begin(), x.end());
            best_.trace.push_back({used_, v});
        }
        return v;
    }

    std::uint64_t used() const { return used_; }
    std::uint64_t remaining() const { return budget_ - used_; }
    bool exhausted() const { return used_ >= budget_; }

    RunRecord finish() && {
        best_.evaluations = used_;
        return std::move(best_);
    }

private:
    Objective f_;
    std::uint64_t budget_;
    std::uint64_t used_ = 0;
    RunRecord best_;
};

// Shared variation operators. Gene scale follows the N(0,1) delay prior.

inline std::vector<double> random_init(std::size_t length, Rng& rng) {
    std::vector<double> g(length);
    for (auto& x : g) x = rng.normal();
    return g;
}

inline void gaussian_mutation(std::vector<double>& genes, double per_gene_rate,
                              double sigma, Rng& rng) {
    for (auto& x : genes)
        if (rng.bernoulli(per_gene_rate)) x += sigma * rng.normal();
}

// Mutation scale drawn log-uniformly from [lo, hi]: coarse moves early
// in a run and fine refinement late, without any schedule or feedback.
inline double log_uniform_sigma(Rng& rng, double lo = 1e-3, double hi = 1.0) {
    return hi * std::pow(lo / hi, rng.uniform());
}

// Whole-arithmetic crossover with one uniform mix weight per call.
inline std::vector<double> arithmetic_crossover(std::span<const double> a,
                                                std::span<const double> b, double u) {
    std::vector<double> child(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) child[i] = u * a[i] + (1.0 - u) * b[i];
    return child;
}

inline std::vector<double> arithmetic_crossover(std::span<const double> a,
                                                std::span<const double> b, Rng& rng) {
    return arithmetic_crossover(a, b, rng.uniform());
}

}  // namespace pufatk
