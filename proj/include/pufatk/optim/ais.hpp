#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "pufatk/optim/clonalg.hpp"
#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

// Immune algorithm with static aging. Every individual spawns a fixed
// number of hypermutated clones per generation; clones inherit the parent
// age plus one. Individuals older than max_age are removed (the incumbent
// best is exempt), survivors are the best pop of parents and clones, and
// empty slots left by aging are refilled with fresh random individuals.
inline RunRecord ais_run(const Objective& objective, std::size_t dim, const AisCfg& cfg,
                         Budget budget, std::uint64_t seed) {
    const std::size_t np = cfg.pop;
    Rng rng(derive_seed(seed, hash_str("ais")));
    Evaluator eval(objective, budget.max_evaluations);

    struct Cell {
        std::vector<double> genes;
        double fit;
        std::uint64_t age;
    };

    std::vector<Cell> pop;
    pop.reserve(np);
    while (pop.size() < np && !eval.exhausted()) {
        Cell c{random_init(dim, rng), 0.0, 0};
        c.fit = eval(c.genes);
        pop.push_back(std::move(c));
    }
    if (pop.size() < np) return std::move(eval).finish();

    while (!eval.exhausted()) {
        double best = pop.front().fit, worst = pop.front().fit;
        for (const auto& c : pop) {
            best = std::min(best, c.fit);
            worst = std::max(worst, c.fit);
        }

        std::vector<Cell> offspring;
        offspring.reserve(pop.size() * cfg.clones);
        for (const auto& parent : pop) {
            const double affinity = detail::affinity_of(parent.fit, best, worst);
            for (std::size_t c = 0; c < cfg.clones && !eval.exhausted(); ++c) {
                Cell clone{parent.genes, 0.0, parent.age + 1};
                detail::hypermutate(clone.genes, cfg.mut_rate, affinity, rng);
                clone.fit = eval(clone.genes);
                offspring.push_back(std::move(clone));
            }
            if (eval.exhausted()) break;
        }

        for (auto& c : pop) ++c.age;
        for (auto& c : offspring) pop.push_back(std::move(c));

        // aging: drop the over-age, keep the current best unconditionally
        std::size_t best_idx = 0;
        for (std::size_t i = 1; i < pop.size(); ++i)
            if (pop[i].fit < pop[best_idx].fit) best_idx = i;
        std::vector<Cell> alive;
        alive.reserve(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i)
            if (i == best_idx || pop[i].age <= cfg.max_age) alive.push_back(std::move(pop[i]));

        std::stable_sort(alive.begin(), alive.end(),
                         [](const Cell& a, const Cell& b) { return a.fit < b.fit; });
        if (alive.size() > np) alive.resize(np);
        while (alive.size() < np && !eval.exhausted()) {
            Cell c{random_init(dim, rng), 0.0, 0};
            c.fit = eval(c.genes);
            alive.push_back(std::move(c));
        }
        pop = std::move(alive);
        if (pop.empty()) break;
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
