#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pufatk/crp.hpp"
#include "pufatk/puf.hpp"

namespace pufatk {

// Attacker hypothesis: k chains of n+1 reals, stored flat.
struct CandidateModel {
    std::uint32_t k = 1;
    std::uint32_t stride = 0;  // n + 1
    std::vector<double> genes;

    static CandidateModel from_genes(std::span<const double> g, std::uint32_t k) {
        if (k < 1 || g.size() % k != 0)
            throw std::invalid_argument("CandidateModel: gene count not divisible by k");
        CandidateModel m;
        m.k = k;
        m.stride = std::uint32_t(g.size() / k);
        m.genes.assign(g.begin(), g.end());
        return m;
    }

    static CandidateModel from_instance(const PufInstance& inst) {
        CandidateModel m;
        m.k = inst.k;
        m.stride = inst.n + 1;
        m.genes.reserve(std::size_t(m.k) * m.stride);
        for (const auto& w : inst.chains) m.genes.insert(m.genes.end(), w.begin(), w.end());
        return m;
    }

    std::span<const double> chain(std::uint32_t j) const {
        return {genes.data() + std::size_t(j) * stride, stride};
    }
};

namespace detail {

// Per-candidate block-sum tables over the packed phi sign bits: for every
// 8-feature block p and byte value v, table[p*256+v] is the signed sum of
// that block's weights with the v-masked components negated. Building and
// applying the table uses only additions (2*w is exact), so the per-CRP
// dot product is a fixed-order double sum, identical on every platform.
inline void build_block_table(const double* w, std::size_t stride_bits,
                              std::size_t blocks, double* table) {
    for (std::size_t p = 0; p < blocks; ++p) {
        double* t = table + p * 256;
        const std::size_t base = p * 8;
        const std::size_t nbits = std::min<std::size_t>(8, stride_bits - base);
        double all_plus = 0.0;
        for (std::size_t l = 0; l < nbits; ++l) all_plus += w[base + l];
        t[0] = all_plus;
        for (unsigned v = 1; v < 256; ++v) {
            const unsigned low = v & (0u - v);
            const unsigned lb = unsigned(std::countr_zero(v));
            t[v] = lb < nbits ? t[v ^ low] - 2.0 * w[base + lb] : t[v ^ low];
        }
    }
}

inline double dot_from_table(const double* table, const std::uint8_t* row,
                             std::size_t blocks) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t p = 0;
    for (; p + 2 <= blocks; p += 2) {
        s0 += table[p * 256 + row[p]];
        s1 += table[(p + 1) * 256 + row[p + 1]];
    }
    if (p < blocks) s0 += table[p * 256 + row[p]];
    return s0 + s1;
}

inline void check_shape(const CandidateModel& m, const CrpSet& set) {
    if (m.k != set.k || m.stride != set.n + 1u)
        throw std::invalid_argument("candidate shape does not match dataset (k, n+1)");
}

}  // namespace detail

inline int predict_response(const CandidateModel& m, std::span<const double> phi) {
    if (phi.size() != m.stride)
        throw std::invalid_argument("predict_response: feature length mismatch");
    int r = 0;
    for (std::uint32_t j = 0; j < m.k; ++j) r ^= apuf_response(m.chain(j), phi);
    return r;
}

// Exact error count of a flat k*(n+1) gene vector over [begin, end);
// integer additive over disjoint chunks.
inline std::uint64_t fitness_flat(std::span<const double> genes, const CrpSet& set,
                                  std::size_t begin, std::size_t end) {
    if (genes.size() != std::size_t(set.k) * set.stride())
        throw std::invalid_argument("candidate shape does not match dataset (k, n+1)");
    const std::size_t stride = set.stride();
    const std::size_t blocks = set.phi_row_bytes();
    const std::uint8_t* phi = set.phi_block().data();
    const std::uint8_t* resp = set.packed_responses().data();

    thread_local std::vector<double> table;
    table.resize(std::size_t(set.k) * blocks * 256);
    for (std::uint32_t j = 0; j < set.k; ++j)
        detail::build_block_table(genes.data() + std::size_t(j) * stride, stride, blocks,
                                  table.data() + std::size_t(j) * blocks * 256);

    std::uint64_t errors = 0;
    for (std::size_t i = begin; i < end; ++i) {
        const std::uint8_t* row = phi + i * blocks;
        int r = 0;
        for (std::uint32_t j = 0; j < set.k; ++j)
            r ^= detail::dot_from_table(table.data() + std::size_t(j) * blocks * 256, row,
                                        blocks) < 0.0;
        errors += std::uint64_t(r != ((resp[i >> 3] >> (i & 7)) & 1));
    }
    return errors;
}

inline std::uint64_t fitness_range(const CandidateModel& m, const CrpSet& set,
                                   std::size_t begin, std::size_t end) {
    detail::check_shape(m, set);
    return fitness_flat(m.genes, set, begin, end);
}

// Number of wrong predictions on the learning set; lower is better.
inline std::uint64_t fitness(const CandidateModel& m, const CrpSet& set) {
    return fitness_range(m, set, 0, set.size());
}

// One-sided binomial vs a fair coin on 1,000 trials: accuracy >= 0.55
// has p < 1e-3, so that is the success bar.
inline constexpr double kSuccessAccuracy = 0.55;

struct EvaluationReport {
    std::uint64_t errors = 0;
    std::uint64_t total = 0;
    double accuracy = 0.0;
    bool success = false;
};

inline EvaluationReport evaluate_test(const CandidateModel& m, const CrpSet& test) {
    if (test.role != SetRole::test)
        throw std::invalid_argument("evaluate_test: dataset role is not 'test'");
    EvaluationReport rep;
    rep.errors = fitness(m, test);
    rep.total = test.size();
    rep.accuracy = 1.0 - double(rep.errors) / double(rep.total);
    rep.success = rep.accuracy >= kSuccessAccuracy;
    return rep;
}

}  // namespace pufatk
