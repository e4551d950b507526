#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace pufatk {

// Parameter defaults are the tuned values the benchmark fixes per algorithm.

struct AisCfg {
    std::size_t pop = 50;
    double mut_rate = 0.1;       // per-gene hypermutation rate
    std::size_t clones = 5;      // clones per individual per generation
    std::uint64_t max_age = 68;  // generations an individual may survive
};

struct ClonalgCfg {
    std::size_t pop = 100;
    double mut_rate = 0.2;       // hypermutation rate
    std::size_t n_select = 10;   // antibodies cloned each generation
    double beta = 0.9;           // clone-count factor: round(beta*pop/rank)
    double regen = 0.0;          // fraction replaced by fresh randoms
};

struct CmaesCfg {
    std::size_t lambda = 20;
    std::size_t mu = 3;
};

struct DeCfg {
    std::size_t pop = 500;
    double f = 0.4;   // scaling constant
    double cr = 0.9;  // crossover rate
};

struct RwCfg {
    std::size_t pop = 500;
    double p_mut = 0.5;      // per-individual mutation probability
    double p_cx = 0.9;       // crossover probability
    double pressure = 20.0;  // best:worst expected sampling ratio
};

struct SstCfg {
    std::size_t pop = 20;
    double p_mut = 0.9;          // per-offspring mutation probability
    std::size_t tournament = 3;  // drawn without replacement
};

using AlgorithmConfig = std::variant<AisCfg, ClonalgCfg, CmaesCfg, DeCfg, RwCfg, SstCfg>;

inline const char* const kAlgorithmNames[] = {"ais", "clonalg", "cmaes", "de", "rw", "sst"};

inline std::string algorithm_name(const AlgorithmConfig& cfg) {
    return kAlgorithmNames[cfg.index()];
}

inline AlgorithmConfig default_config(std::string_view name) {
    if (name == "ais") return AisCfg{};
    if (name == "clonalg") return ClonalgCfg{};
    if (name == "cmaes") return CmaesCfg{};
    if (name == "de") return DeCfg{};
    if (name == "rw") return RwCfg{};
    if (name == "sst") return SstCfg{};
    throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                "' (valid: ais, clonalg, cmaes, de, rw, sst)");
}

inline void validate(const AlgorithmConfig& cfg) {
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, CmaesCfg>) {
                if (c.lambda < 2) throw std::invalid_argument("population size must be >= 2");
            } else if (c.pop < 2) {
                throw std::invalid_argument("population size must be >= 2");
            }
            if constexpr (std::is_same_v<T, AisCfg>) {
                if (!rate_ok(c.mut_rate)) throw std::invalid_argument("mutation rate not in [0,1]");
                if (c.clones < 1) throw std::invalid_argument("clone count must be >= 1");
            } else if constexpr (std::is_same_v<T, ClonalgCfg>) {
                if (!rate_ok(c.mut_rate)) throw std::invalid_argument("mutation rate not in [0,1]");
                if (!rate_ok(c.regen)) throw std::invalid_argument("regen fraction not in [0,1]");
                if (c.n_select < 1 || c.n_select > c.pop)
                    throw std::invalid_argument("selected antibodies must be in [1, pop]");
                if (c.beta <= 0.0) throw std::invalid_argument("clone factor must be positive");
            } else if constexpr (std::is_same_v<T, CmaesCfg>) {
                if (c.mu < 1 || c.mu > c.lambda)
                    throw std::invalid_argument("mu must be in [1, lambda]");
            } else if constexpr (std::is_same_v<T, DeCfg>) {
                if (c.pop < 4) throw std::invalid_argument("DE needs population >= 4");
                if (!rate_ok(c.cr)) throw std::invalid_argument("crossover rate not in [0,1]");
                if (c.f < 0.0) throw std::invalid_argument("scaling constant must be >= 0");
            } else if constexpr (std::is_same_v<T, RwCfg>) {
                if (!rate_ok(c.p_mut) || !rate_ok(c.p_cx))
                    throw std::invalid_argument("operator probability not in [0,1]");
                if (c.pressure < 1.0) throw std::invalid_argument("selection pressure must be >= 1");
            } else if constexpr (std::is_same_v<T, SstCfg>) {
                if (!rate_ok(c.p_mut)) throw std::invalid_argument("mutation probability not in [0,1]");
                if (c.tournament < 2) throw std::invalid_argument("tournament size must be >= 2");
                if (c.tournament > c.pop)
                    throw std::invalid_argument("tournament size exceeds population");
            }
        },
        cfg);
}

inline std::string describe(const AlgorithmConfig& cfg) {
    std::ostringstream os;
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, AisCfg>) {
                os << "ais: pop=" << c.pop << " mut_rate=" << c.mut_rate
                   << " clones=" << c.clones << " max_age=" << c.max_age;
            } else if constexpr (std::is_same_v<T, ClonalgCfg>) {
                os << "clonalg: pop=" << c.pop << " mut_rate=" << c.mut_rate
                   << " n_select=" << c.n_select << " beta=" << c.beta << " regen=" << c.regen;
            } else if constexpr (std::is_same_v<T, CmaesCfg>) {
                os << "cmaes: lambda=" << c.lambda << " mu=" << c.mu;
            } else if constexpr (std::is_same_v<T, DeCfg>) {
                os << "de: pop=" << c.pop << " F=" << c.f << " CR=" << c.cr;
            } else if constexpr (std::is_same_v<T, RwCfg>) {
                os << "rw: pop=" << c.pop << " p_mut=" << c.p_mut << " p_cx=" << c.p_cx
                   << " pressure=" << c.pressure;
            } else if constexpr (std::is_same_v<T, SstCfg>) {
                os << "sst: pop=" << c.pop << " p_mut=" << c.p_mut
                   << " tournament=" << c.tournament;
            }
        },
        cfg);
    return os.str();
}

}  // namespace pufatk
