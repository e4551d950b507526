#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pufatk/crp.hpp"
#include "pufatk/puf.hpp"

namespace pufatk {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open file: " + path);
    }

    void read(void* dst, std::size_t bytes, const char* what) {
        in_.read(reinterpret_cast<char*>(dst), std::streamsize(bytes));
        if (std::size_t(in_.gcount()) != bytes)
            throw ParseError(std::string("truncated file reading ") + what,
                             offset_ + std::size_t(in_.gcount()));
        offset_ += bytes;
    }

    template <typename T>
    T get(const char* what) {
        T v;
        read(&v, sizeof v, what);
        return v;
    }

    std::size_t offset() const { return offset_; }

private:
    std::ifstream in_;
    std::size_t offset_ = 0;
};

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open file for writing: " + path);
    }

    void write(const void* src, std::size_t bytes) {
        out_.write(reinterpret_cast<const char*>(src), std::streamsize(bytes));
    }

    template <typename T>
    void put(T v) {
        write(&v, sizeof v);
    }

    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed");
    }

private:
    std::ofstream out_;
};

}  // namespace detail

inline constexpr std::uint16_t kPufFileVersion = 1;
inline constexpr std::uint16_t kCrpFileVersion = 1;

// .puf layout: "PUFF", u16 version, u32 n, u32 k, u64 seed, k*(n+1) f64 delays.
inline void save_instance(const PufInstance& inst, const std::string& path) {
    detail::Writer w(path);
    w.write("PUFF", 4);
    w.put(kPufFileVersion);
    w.put(inst.n);
    w.put(inst.k);
    w.put(inst.seed);
    for (const auto& chain : inst.chains)
        w.write(chain.data(), chain.size() * sizeof(double));
    w.close();
}

inline PufInstance load_instance(const std::string& path) {
    detail::Reader r(path);
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, "PUFF", 4) != 0)
        throw ParseError("bad magic, not a .puf file", 0);
    const auto version = r.get<std::uint16_t>("version");
    if (version != kPufFileVersion)
        throw ParseError("unsupported .puf version " + std::to_string(version), 4);
    PufInstance inst;
    inst.n = r.get<std::uint32_t>("n");
    inst.k = r.get<std::uint32_t>("k");
    inst.seed = r.get<std::uint64_t>("seed");
    if (inst.n < 1 || inst.k < 1 || inst.n > (1u << 20) || inst.k > (1u << 20))
        throw ParseError("implausible instance header", r.offset());
    inst.chains.resize(inst.k);
    for (auto& chain : inst.chains) {
        chain.resize(inst.n + 1);
        r.read(chain.data(), chain.size() * sizeof(double), "delay payload");
    }
    return inst;
}

// .crp layout: "CRPS", u16 version, u32 n, u32 k, u64 instance_seed,
// u64 sampling_seed, u8 role, u8 overlap_allowed, u8 has_phi, u64 count,
// packed challenge bits, packed response bits, optional f32 phi block.
// phi is omitted by default: it regenerates exactly from the challenges.
inline void save_crpset(const CrpSet& set, const std::string& path, bool include_phi = false) {
    detail::Writer w(path);
    w.write("CRPS", 4);
    w.put(kCrpFileVersion);
    w.put(set.n);
    w.put(set.k);
    w.put(set.instance_seed);
    w.put(set.sampling_seed);
    w.put(std::uint8_t(set.role));
    w.put(std::uint8_t(set.overlap_allowed ? 1 : 0));
    w.put(std::uint8_t(include_phi ? 1 : 0));
    w.put(std::uint64_t(set.size()));
    w.write(set.packed_challenges().data(), set.packed_challenges().size());
    w.write(set.packed_responses().data(), set.packed_responses().size());
    if (include_phi) w.write(set.phi_block().data(), set.phi_block().size());
    w.close();
}

inline CrpSet load_crpset(const std::string& path) {
    detail::Reader r(path);
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, "CRPS", 4) != 0)
        throw ParseError("bad magic, not a .crp file", 0);
    const auto version = r.get<std::uint16_t>("version");
    if (version != kCrpFileVersion)
        throw ParseError("unsupported .crp version " + std::to_string(version), 4);

    CrpSet set;
    set.n = r.get<std::uint32_t>("n");
    set.k = r.get<std::uint32_t>("k");
    set.instance_seed = r.get<std::uint64_t>("instance_seed");
    set.sampling_seed = r.get<std::uint64_t>("sampling_seed");
    const auto role = r.get<std::uint8_t>("role");
    if (role > 1) throw ParseError("invalid role byte", r.offset() - 1);
    set.role = SetRole(role);
    set.overlap_allowed = r.get<std::uint8_t>("overlap_allowed") != 0;
    const bool has_phi = r.get<std::uint8_t>("has_phi") != 0;
    const auto count = r.get<std::uint64_t>("count");
    if (set.n < 1 || set.n > (1u << 20))
        throw ParseError("implausible set header", r.offset());

    const std::size_t cs = (set.n + 7) / 8;
    std::vector<std::uint8_t> challenges(count * cs);
    r.read(challenges.data(), challenges.size(), "challenge payload");
    std::vector<std::uint8_t> responses((count + 7) / 8);
    r.read(responses.data(), responses.size(), "response payload");

    set.reserve(count);
    Challenge c(set.n);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint8_t* bytes = challenges.data() + i * cs;
        for (std::uint32_t b = 0; b < set.n; ++b)
            c[b] = (bytes[b >> 3] >> (b & 7)) & 1;
        set.append(c, (responses[i >> 3] >> (i & 7)) & 1);
    }
    if (has_phi) {
        // stored phi must agree with the recomputed block
        std::vector<std::uint8_t> phi(count * set.phi_row_bytes());
        r.read(phi.data(), phi.size(), "phi payload");
        if (phi != set.phi_block())
            throw ParseError("stored phi block disagrees with challenges", r.offset());
    }
    return set;
}

// Text export: one CRP per line, challenge as a 0/1 string, then the response.
inline void export_crpset_text(const CrpSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    std::string line(set.n + 2, ' ');
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Challenge c = set.challenge(i);
        for (std::uint32_t b = 0; b < set.n; ++b) line[b] = c[b] ? '1' : '0';
        line[set.n] = ' ';
        line[set.n + 1] = set.response(i) ? '1' : '0';
        out << line << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pufatk
