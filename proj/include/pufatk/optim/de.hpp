#pragma once

#include <vector>

#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

// Differential evolution, rand/1/bin. Donor x_r1 + F*(x_r2 - x_r3) with
// r1, r2, r3 distinct and different from the target; binomial crossover
// with one forced gene; greedy one-to-one replacement, ties favor the
// trial (keeps drift alive on the integer-fitness plateaus).
inline RunRecord de_run(const Objective& objective, std::size_t dim, const DeCfg& cfg,
                        Budget budget, std::uint64_t seed) {
    const std::size_t np = cfg.pop;
    Rng rng(derive_seed(seed, hash_str("de")));
    Evaluator eval(objective, budget.max_evaluations);

    std::vector<std::vector<double>> pop(np);
    std::vector<double> fit(np);
    for (std::size_t i = 0; i < np && !eval.exhausted(); ++i) {
        pop[i] = random_init(dim, rng);
        fit[i] = eval(pop[i]);
    }

    std::vector<double> trial(dim);
    while (!eval.exhausted()) {
        for (std::size_t i = 0; i < np && !eval.exhausted(); ++i) {
            std::size_t r1, r2, r3;
            do { r1 = rng.uniform_int(np); } while (r1 == i);
            do { r2 = rng.uniform_int(np); } while (r2 == i || r2 == r1);
            do { r3 = rng.uniform_int(np); } while (r3 == i || r3 == r1 || r3 == r2);

            const std::size_t forced = rng.uniform_int(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                if (j == forced || rng.bernoulli(cfg.cr))
                    trial[j] = pop[r1][j] + cfg.f * (pop[r2][j] - pop[r3][j]);
                else
                    trial[j] = pop[i][j];
            }
            const double tf = eval(trial);
            if (tf <= fit[i]) {
                pop[i] = trial;
                fit[i] = tf;
            }
        }
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
