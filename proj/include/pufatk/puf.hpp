#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pufatk/rng.hpp"

namespace pufatk {

// A challenge is the n-bit stage control word, one entry per stage, each 0 or 1.
using Challenge = std::vector<std::uint8_t>;

// Feature transform: phi_i = prod_{l=i..n} (-1)^{c_l}, phi_{n+1} = +1.
// Computed right-to-left as a running product, O(n).
inline std::vector<double> transform_challenge(const Challenge& c) {
    const std::size_t n = c.size();
    std::vector<double> phi(n + 1);
    phi[n] = 1.0;
    double prod = 1.0;
    for (std::size_t i = n; i-- > 0;) {
        if (c[i]) prod = -prod;
        phi[i] = prod;
    }
    return phi;
}

// Ground-truth device: k delay chains of n+1 normalized delay differences.
struct PufInstance {
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> chains;

    bool operator==(const PufInstance&) const = default;
};

// Sign test of the linear additive model: response 1 iff w.phi < 0.
// A zero dot product maps to 0 so the function is total.
inline int apuf_response(std::span<const double> w, std::span<const double> phi) {
    if (w.size() != phi.size())
        throw std::invalid_argument("apuf_response: delay/feature length mismatch");
    double dot = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) dot += w[i] * phi[i];
    return dot < 0.0 ? 1 : 0;
}

inline int xor_apuf_response(const PufInstance& inst, std::span<const double> phi) {
    if (phi.size() != inst.n + 1u)
        throw std::invalid_argument("xor_apuf_response: feature length mismatch");
    int r = 0;
    for (const auto& w : inst.chains) r ^= apuf_response(w, phi);
    return r;
}

// Delay components are i.i.d. N(0,1) from a generator keyed by seed;
// the same (n, k, seed) always reproduces the identical instance.
inline PufInstance sample_puf_instance(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
    if (n < 1 || k < 1)
        throw std::invalid_argument("sample_puf_instance: n and k must be >= 1");
    PufInstance inst;
    inst.n = n;
    inst.k = k;
    inst.seed = seed;
    Rng rng(derive_seed(seed, hash_str("puf-instance"), n, k));
    inst.chains.resize(k);
    for (auto& w : inst.chains) {
        w.resize(n + 1);
        for (auto& x : w) x = rng.normal();
    }
    return inst;
}

}  // namespace pufatk
