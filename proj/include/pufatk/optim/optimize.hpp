#pragma once

#include <chrono>

#include "pufatk/optim/ais.hpp"
#include "pufatk/optim/clonalg.hpp"
#include "pufatk/optim/cmaes.hpp"
#include "pufatk/optim/common.hpp"
#include "pufatk/optim/config.hpp"
#include "pufatk/optim/de.hpp"
#include "pufatk/optim/rw.hpp"
#include "pufatk/optim/sst.hpp"

namespace pufatk {

// Single entry point: validates the config up front (before any fitness
// evaluation), dispatches, and stamps the record. Deterministic given
// (config, seed, objective).
inline RunRecord optimize(const Objective& objective, std::size_t dim,
                          const AlgorithmConfig& config, Budget budget,
                          std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("optimize: genotype length must be >= 1");
    validate(config);

    const auto t0 = std::chrono::steady_clock::now();
    RunRecord rec = std::visit(
        [&](const auto& cfg) {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, AisCfg>)
                return ais_run(objective, dim, cfg, budget, seed);
            else if constexpr (std::is_same_v<T, ClonalgCfg>)
                return clonalg_run(objective, dim, cfg, budget, seed);
            else if constexpr (std::is_same_v<T, CmaesCfg>)
                return cmaes_run(objective, dim, cfg, budget, seed);
            else if constexpr (std::is_same_v<T, DeCfg>)
                return de_run(objective, dim, cfg, budget, seed);
            else if constexpr (std::is_same_v<T, RwCfg>)
                return rw_ga_run(objective, dim, cfg, budget, seed);
            else
                return sst_ga_run(objective, dim, cfg, budget, seed);
        },
        config);
    rec.algorithm = algorithm_name(config);
    rec.seed = seed;
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace pufatk
