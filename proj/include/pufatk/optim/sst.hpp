#pragma once

#include <algorithm>
#include <vector>

#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

// Steady-state GA with tournament replacement. Each step draws a
// tournament without replacement; the worst member is replaced by the
// recombination of the two others, mutated with probability p_mut. The
// population best is never the replacement victim.
inline RunRecord sst_ga_run(const Objective& objective, std::size_t dim, const SstCfg& cfg,
                            Budget budget, std::uint64_t seed) {
    const std::size_t np = cfg.pop;
    Rng rng(derive_seed(seed, hash_str("sst")));
    Evaluator eval(objective, budget.max_evaluations);

    std::vector<std::vector<double>> pop(np);
    std::vector<double> fit(np);
    std::size_t filled = 0;
    for (; filled < np && !eval.exhausted(); ++filled) {
        pop[filled] = random_init(dim, rng);
        fit[filled] = eval(pop[filled]);
    }
    if (filled < np) return std::move(eval).finish();

    const double per_gene = 1.0 / double(dim);
    std::vector<std::size_t> tour(cfg.tournament);
    while (!eval.exhausted()) {
        // tournament without replacement
        for (std::size_t t = 0; t < cfg.tournament; ++t) {
            bool fresh;
            do {
                tour[t] = rng.uniform_int(np);
                fresh = true;
                for (std::size_t s = 0; s < t; ++s) fresh &= tour[s] != tour[t];
            } while (!fresh);
        }
        std::sort(tour.begin(), tour.end(),
                  [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

        const std::size_t best =
            std::size_t(std::min_element(fit.begin(), fit.end()) - fit.begin());
        std::size_t victim = tour.back();
        if (victim == best) victim = tour[tour.size() - 2];  // elitism guard

        std::size_t p1 = tour[0], p2 = tour[1];
        if (p1 == victim) p1 = tour[2];
        if (p2 == victim) p2 = tour[2];

        std::vector<double> child = arithmetic_crossover(pop[p1], pop[p2], rng);
        if (rng.bernoulli(cfg.p_mut))
            gaussian_mutation(child, per_gene, log_uniform_sigma(rng), rng);
        const double cf = eval(child);
        pop[victim] = std::move(child);
        fit[victim] = cf;
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
