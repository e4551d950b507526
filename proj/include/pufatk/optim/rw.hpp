#pragma once

#include <algorithm>
#include <vector>

#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

// Linear scaling of raw (minimized) fitness into selection weights so the
// best:worst expected sampling ratio equals the pressure parameter:
//   weight_i = (f_worst - f_i) + (f_worst - f_best) / (pressure - 1)
// All-equal fitness degenerates to uniform weights.
inline std::vector<double> roulette_weights(const std::vector<double>& fit, double pressure) {
    const auto [lo, hi] = std::minmax_element(fit.begin(), fit.end());
    const double spread = *hi - *lo;
    std::vector<double> w(fit.size());
    if (spread == 0.0 || pressure <= 1.0) {
        std::fill(w.begin(), w.end(), 1.0);
        return w;
    }
    const double base = spread / (pressure - 1.0);
    for (std::size_t i = 0; i < fit.size(); ++i) w[i] = (*hi - fit[i]) + base;
    return w;
}

inline std::size_t spin_roulette(const std::vector<double>& w, double total, Rng& rng) {
    double r = rng.uniform() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
        r -= w[i];
        if (r < 0.0) return i;
    }
    return w.size() - 1;
}

// Generational GA with roulette-wheel selection and 1-elitism. Arithmetic
// crossover with probability p_cx, otherwise a parent copy; Gaussian gene
// mutation gated per individual with probability p_mut.
inline RunRecord rw_ga_run(const Objective& objective, std::size_t dim, const RwCfg& cfg,
                           Budget budget, std::uint64_t seed) {
    const std::size_t np = cfg.pop;
    Rng rng(derive_seed(seed, hash_str("rw")));
    Evaluator eval(objective, budget.max_evaluations);

    std::vector<std::vector<double>> pop(np);
    std::vector<double> fit(np);
    std::size_t filled = 0;
    for (; filled < np && !eval.exhausted(); ++filled) {
        pop[filled] = random_init(dim, rng);
        fit[filled] = eval(pop[filled]);
    }

    const double per_gene = 1.0 / double(dim);
    while (!eval.exhausted()) {
        const auto weights = roulette_weights(fit, cfg.pressure);
        double total = 0.0;
        for (double w : weights) total += w;
        const std::size_t best =
            std::size_t(std::min_element(fit.begin(), fit.end()) - fit.begin());

        std::vector<std::vector<double>> next;
        std::vector<double> next_fit;
        next.reserve(np);
        next_fit.reserve(np);
        next.push_back(pop[best]);  // elite carried over, not re-evaluated
        next_fit.push_back(fit[best]);

        while (next.size() < np && !eval.exhausted()) {
            const std::size_t a = spin_roulette(weights, total, rng);
            std::vector<double> child;
            if (rng.bernoulli(cfg.p_cx)) {
                const std::size_t b = spin_roulette(weights, total, rng);
                child = arithmetic_crossover(pop[a], pop[b], rng);
            } else {
                child = pop[a];
            }
            if (rng.bernoulli(cfg.p_mut))
                gaussian_mutation(child, per_gene, log_uniform_sigma(rng), rng);
            next_fit.push_back(eval(child));
            next.push_back(std::move(child));
        }
        if (next.size() < np) break;  // budget ran out mid-generation
        pop = std::move(next);
        fit = std::move(next_fit);
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
