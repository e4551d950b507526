#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "pufatk/puf.hpp"
#include "pufatk/rng.hpp"

namespace pufatk {

enum class SetRole : std::uint8_t { learning = 0, test = 1 };

inline const char* role_name(SetRole r) {
    return r == SetRole::learning ? "learning" : "test";
}

// A challenge-response dataset for one PUF instance. Challenges are kept
// bit-packed; feature vectors are precomputed at generation time and stored
// as packed sign bits (bit set = phi component is -1) so fitness
// evaluation never re-derives phi and the largest sets stay cache-sized.
class CrpSet {
public:
    std::uint32_t n = 0;
    std::uint32_t k = 0;
    std::uint64_t instance_seed = 0;
    std::uint64_t sampling_seed = 0;
    SetRole role = SetRole::learning;
    bool overlap_allowed = false;

    std::size_t size() const { return count_; }
    std::size_t stride() const { return n + 1u; }        // phi row length
    std::size_t phi_row_bytes() const { return (n + 8u) / 8u; }  // ceil((n+1)/8)

    int response(std::size_t i) const {
        return (responses_[i >> 3] >> (i & 7)) & 1;
    }

    // packed phi signs of entry i: bit l of byte p set means phi_{8p+l} == -1
    const std::uint8_t* phi_bits_row(std::size_t i) const {
        return phi_bits_.data() + i * phi_row_bytes();
    }

    std::vector<double> phi(std::size_t i) const {
        std::vector<double> row(stride());
        const std::uint8_t* bits = phi_bits_row(i);
        for (std::size_t b = 0; b < row.size(); ++b)
            row[b] = (bits[b >> 3] >> (b & 7)) & 1 ? -1.0 : 1.0;
        return row;
    }

    Challenge challenge(std::size_t i) const {
        Challenge c(n);
        const std::uint8_t* bytes = challenge_bytes(i);
        for (std::uint32_t b = 0; b < n; ++b)
            c[b] = (bytes[b >> 3] >> (b & 7)) & 1;
        return c;
    }

    void reserve(std::size_t count) {
        challenges_.reserve(count * challenge_stride());
        responses_.reserve((count + 7) / 8);
        phi_bits_.reserve(count * phi_row_bytes());
    }

    void append(const Challenge& c, int resp) {
        if (c.size() != n) throw std::invalid_argument("CrpSet::append: challenge width mismatch");
        const std::size_t cs = challenge_stride();
        challenges_.resize(challenges_.size() + cs, 0);
        std::uint8_t* bytes = challenges_.data() + count_ * cs;
        for (std::uint32_t b = 0; b < n; ++b)
            if (c[b]) bytes[b >> 3] |= std::uint8_t(1u << (b & 7));
        if (count_ % 8 == 0) responses_.push_back(0);
        if (resp) responses_.back() |= std::uint8_t(1u << (count_ & 7));
        const auto phi = transform_challenge(c);
        phi_bits_.resize(phi_bits_.size() + phi_row_bytes(), 0);
        std::uint8_t* pb = phi_bits_.data() + count_ * phi_row_bytes();
        for (std::size_t b = 0; b < phi.size(); ++b)
            if (phi[b] < 0.0) pb[b >> 3] |= std::uint8_t(1u << (b & 7));
        ++count_;
    }

    const std::vector<std::uint8_t>& packed_challenges() const { return challenges_; }
    const std::vector<std::uint8_t>& packed_responses() const { return responses_; }
    const std::vector<std::uint8_t>& phi_block() const { return phi_bits_; }
    std::size_t challenge_stride() const { return (n + 7) / 8; }

    // packed challenge bytes of entry i, used as a set key
    std::string challenge_key(std::size_t i) const {
        const std::uint8_t* bytes = challenge_bytes(i);
        return std::string(reinterpret_cast<const char*>(bytes), challenge_stride());
    }

    bool operator==(const CrpSet& o) const {
        return n == o.n && k == o.k && instance_seed == o.instance_seed &&
               sampling_seed == o.sampling_seed && role == o.role &&
               overlap_allowed == o.overlap_allowed && count_ == o.count_ &&
               challenges_ == o.challenges_ && responses_ == o.responses_ &&
               phi_bits_ == o.phi_bits_;
    }

private:
    const std::uint8_t* challenge_bytes(std::size_t i) const {
        return challenges_.data() + i * challenge_stride();
    }

    std::size_t count_ = 0;
    std::vector<std::uint8_t> challenges_;  // count x ceil(n/8), LSB-first per byte
    std::vector<std::uint8_t> responses_;   // bit-packed, LSB-first
    std::vector<std::uint8_t> phi_bits_;    // count x ceil((n+1)/8) sign bits
};

inline Challenge random_challenge(std::uint32_t n, Rng& rng) {
    Challenge c(n);
    for (auto& b : c) b = std::uint8_t(rng.next_u64() & 1u);
    return c;
}

// Challenges are drawn uniformly i.i.d. with replacement. For test sets a
// forbidden set (typically the learning challenges) is rejected as long as
// the challenge space is at least twice |forbidden| + count; otherwise
// overlap is permitted and flagged. require_disjoint turns that fallback
// into an error.
inline CrpSet generate_crp_set(const PufInstance& inst, std::size_t count, SetRole role,
                               std::uint64_t sampling_seed,
                               const std::unordered_set<std::string>* forbidden = nullptr,
                               bool require_disjoint = false) {
    if (count < 1) throw std::invalid_argument("generate_crp_set: count must be >= 1");

    CrpSet set;
    set.n = inst.n;
    set.k = inst.k;
    set.instance_seed = inst.seed;
    set.sampling_seed = sampling_seed;
    set.role = role;

    bool reject = false;
    if (role == SetRole::test && forbidden != nullptr && !forbidden->empty()) {
        const std::size_t needed = forbidden->size() + count;
        // 2^n >= 2*needed, guarding the shift for large n
        const bool roomy = inst.n >= 63 || (std::uint64_t(1) << inst.n) >= 2 * std::uint64_t(needed);
        if (roomy) {
            reject = true;
        } else if (require_disjoint) {
            throw std::invalid_argument(
                "generate_crp_set: disjoint test set impossible, challenge space too small");
        } else {
            set.overlap_allowed = true;
        }
    }

    Rng rng(derive_seed(sampling_seed, hash_str("crp-set"), inst.n, inst.k,
                        std::uint64_t(role)));
    set.reserve(count);
    const std::size_t cs = set.challenge_stride();
    std::string key(cs, '\0');
    while (set.size() < count) {
        Challenge c = random_challenge(inst.n, rng);
        if (reject) {
            std::fill(key.begin(), key.end(), '\0');
            for (std::uint32_t b = 0; b < inst.n; ++b)
                if (c[b]) key[b >> 3] |= char(1u << (b & 7));
            if (forbidden->count(key)) continue;
        }
        const auto phi = transform_challenge(c);
        set.append(c, xor_apuf_response(inst, phi));
    }
    return set;
}

inline std::unordered_set<std::string> challenge_keys(const CrpSet& set) {
    std::unordered_set<std::string> keys;
    keys.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) keys.insert(set.challenge_key(i));
    return keys;
}

// Re-derives every response from the instance; returns the mismatch count.
inline std::size_t verify_crp_set(const CrpSet& set, const PufInstance& inst) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto phi = transform_challenge(set.challenge(i));
        if (xor_apuf_response(inst, phi) != set.response(i)) ++bad;
    }
    return bad;
}

}  // namespace pufatk
