#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

namespace detail {

// Inverse-affinity hypermutation: per-gene Gaussian noise whose standard
// deviation shrinks exponentially with normalized affinity (1 = current
// best, 0 = current worst). The exponent is jittered per clone, so a
// high-affinity parent's clones spread log-uniformly between the fine
// scale exp(-decay) and full scale 1.
inline constexpr double kHypermutationDecay = 5.0;

inline void hypermutate(std::vector<double>& genes, double per_gene_rate,
                        double affinity, Rng& rng) {
    const double sigma = std::exp(-kHypermutationDecay * affinity * rng.uniform());
    gaussian_mutation(genes, per_gene_rate, sigma, rng);
}

// normalized affinity of fitness f within [best, worst]; 1 when degenerate
inline double affinity_of(double f, double best, double worst) {
    const double spread = worst - best;
    return spread > 0.0 ? (worst - f) / spread : 1.0;
}

}  // namespace detail

// Clonal selection. Each generation the n_select best antibodies are
// cloned in rank proportion, round(beta * pop / rank), the clones are
// hypermutated with intensity inverse to the parent's affinity, and the
// best clone replaces its parent when it improves on it. With regen = 0
// no antibody is ever replaced by a fresh random one.
inline RunRecord clonalg_run(const Objective& objective, std::size_t dim,
                             const ClonalgCfg& cfg, Budget budget, std::uint64_t seed) {
    const std::size_t np = cfg.pop;
    Rng rng(derive_seed(seed, hash_str("clonalg")));
    Evaluator eval(objective, budget.max_evaluations);

    std::vector<std::vector<double>> pop(np);
    std::vector<double> fit(np);
    std::size_t filled = 0;
    for (; filled < np && !eval.exhausted(); ++filled) {
        pop[filled] = random_init(dim, rng);
        fit[filled] = eval(pop[filled]);
    }
    if (filled < np) return std::move(eval).finish();

    std::vector<std::size_t> order(np);
    while (!eval.exhausted()) {
        std::iota(order.begin(), order.end(), std::size_t(0));
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

        for (std::size_t rank = 1; rank <= cfg.n_select && !eval.exhausted(); ++rank) {
            const std::size_t parent = order[rank - 1];
            const auto n_clones =
                std::max<std::size_t>(1, std::size_t(std::llround(cfg.beta * double(np) / double(rank))));
            // rank-based affinity over the selected set: the top antibody
            // fine-tunes, the last selected one explores at full scale
            const double affinity =
                cfg.n_select > 1 ? 1.0 - double(rank - 1) / double(cfg.n_select - 1) : 1.0;

            for (std::size_t c = 0; c < n_clones && !eval.exhausted(); ++c) {
                std::vector<double> clone = pop[parent];
                detail::hypermutate(clone, cfg.mut_rate, affinity, rng);
                const double cf = eval(clone);
                if (cf < fit[parent]) {
                    pop[parent] = std::move(clone);
                    fit[parent] = cf;
                }
            }
        }

        if (cfg.regen > 0.0) {
            // replace the worst fraction with fresh antibodies
            const auto n_regen = std::size_t(cfg.regen * double(np));
            for (std::size_t i = 0; i < n_regen && !eval.exhausted(); ++i) {
                const std::size_t slot = order[np - 1 - i];
                pop[slot] = random_init(dim, rng);
                fit[slot] = eval(pop[slot]);
            }
        }
    }
    return std::move(eval).finish();
}

}  // namespace pufatk
