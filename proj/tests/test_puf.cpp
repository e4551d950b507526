#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "pufatk/crp.hpp"
#include "pufatk/io.hpp"
#include "pufatk/puf.hpp"

using namespace pufatk;
namespace fs = std::filesystem;

namespace {

// literal feature transform: phi_i = prod_{l=i..n} (-1)^{c_l}
std::vector<double> phi_literal(const Challenge& c) {
    const std::size_t n = c.size();
    std::vector<double> phi(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = i; l < n; ++l)
            if (c[l]) phi[i] = -phi[i];
    return phi;
}

Challenge nth_challenge(std::uint32_t n, std::uint64_t v) {
    Challenge c(n);
    for (std::uint32_t b = 0; b < n; ++b) c[b] = (v >> b) & 1;
    return c;
}

fs::path temp_dir() {
    const auto d = fs::temp_directory_path() / "pufatk-test-puf";
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("feature transform on hand-worked examples") {
    // c = (1, 0): phi_1 = (-1)^1 * (-1)^0 = -1, phi_2 = (-1)^0 = +1, phi_3 = +1
    CHECK(transform_challenge({1, 0}) == std::vector<double>{-1.0, 1.0, 1.0});
    // c = (1, 1, 1): alternating suffix products
    CHECK(transform_challenge({1, 1, 1}) == std::vector<double>{-1.0, 1.0, -1.0, 1.0});
    // all-zero challenge maps to the all-plus-one feature vector
    CHECK(transform_challenge({0, 0, 0, 0}) == std::vector<double>(5, 1.0));
    CHECK(transform_challenge({}) == std::vector<double>{1.0});
}

TEST_CASE("feature transform equals the literal suffix product exhaustively") {
    for (std::uint32_t n = 1; n <= 12; ++n) {
        for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v) {
            const Challenge c = nth_challenge(n, v);
            REQUIRE(transform_challenge(c) == phi_literal(c));
        }
    }
}

TEST_CASE("sign test response") {
    // dot = 0.2*1 + 0.3*(-1) + 0.45*1 = 0.35 > 0 -> response 0
    CHECK(apuf_response(std::vector<double>{0.2, 0.3, 0.45},
                        std::vector<double>{1.0, -1.0, 1.0}) == 0);
    // dot = -1 -> response 1
    CHECK(apuf_response(std::vector<double>{-1.0}, std::vector<double>{1.0}) == 1);
    // exact tie maps to 0
    CHECK(apuf_response(std::vector<double>{1.0, -1.0}, std::vector<double>{1.0, 1.0}) == 0);
    CHECK_THROWS_AS(apuf_response(std::vector<double>{1.0}, std::vector<double>{1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("negating the delay vector flips every non-tie response") {
    Rng rng(7);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> w(17), phi = transform_challenge(random_challenge(16, rng));
        for (auto& x : w) x = rng.normal();
        std::vector<double> neg(w);
        for (auto& x : neg) x = -x;
        CHECK(apuf_response(w, phi) + apuf_response(neg, phi) == 1);
    }
}

TEST_CASE("xor of two identical chains is constantly zero") {
    auto inst = sample_puf_instance(16, 2, 3);
    inst.chains[1] = inst.chains[0];
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        const auto phi = transform_challenge(random_challenge(16, rng));
        CHECK(xor_apuf_response(inst, phi) == 0);
    }
    CHECK_THROWS_AS(xor_apuf_response(inst, std::vector<double>(5, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("instance sampling is deterministic and well-shaped") {
    const auto a = sample_puf_instance(65, 4, 42);
    const auto b = sample_puf_instance(65, 4, 42);
    CHECK(a == b);
    CHECK(a.chains.size() == 4);
    for (const auto& w : a.chains) CHECK(w.size() == 66);
    CHECK_FALSE(a == sample_puf_instance(65, 4, 43));
    CHECK_THROWS_AS(sample_puf_instance(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_puf_instance(8, 0, 1), std::invalid_argument);
}

TEST_CASE("sampled delays match the standard normal prior") {
    const std::size_t count = 1000000;
    Rng rng(123);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / double(count);
    const double var = sum2 / double(count) - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(double(count)));
    CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("challenges are uniform over the full space") {
    const std::uint32_t n = 8;
    const std::size_t draws = 1000000;
    Rng rng(5);
    std::vector<std::size_t> hist(256, 0);
    for (std::size_t i = 0; i < draws; ++i) {
        const Challenge c = random_challenge(n, rng);
        std::size_t v = 0;
        for (std::uint32_t b = 0; b < n; ++b) v |= std::size_t(c[b]) << b;
        ++hist[v];
    }
    const double expect = double(draws) / 256.0;
    const double sigma = std::sqrt(expect * (1.0 - 1.0 / 256.0));
    for (std::size_t v = 0; v < 256; ++v)
        CHECK(std::abs(double(hist[v]) - expect) < 5.0 * sigma);
}

TEST_CASE("crp generation is deterministic and responses verify") {
    const auto inst = sample_puf_instance(32, 1, 11);
    const auto a = generate_crp_set(inst, 500, SetRole::learning, 77);
    const auto b = generate_crp_set(inst, 500, SetRole::learning, 77);
    CHECK(a == b);
    CHECK(a.size() == 500);
    CHECK(a.n == 32);
    CHECK(a.instance_seed == 11);
    CHECK(verify_crp_set(a, inst) == 0);
    CHECK_FALSE(a == generate_crp_set(inst, 500, SetRole::learning, 78));
    // stored phi agrees with the transform of the stored challenge
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(a.phi(i) == transform_challenge(a.challenge(i)));
}

TEST_CASE("sampling with replacement covers sets larger than the space") {
    const auto inst = sample_puf_instance(4, 1, 2);
    const auto set = generate_crp_set(inst, 250000, SetRole::learning, 5);
    CHECK(set.size() == 250000);
    CHECK(verify_crp_set(set, inst) == 0);
}

TEST_CASE("test sets avoid forbidden challenges when the space is roomy") {
    const auto inst = sample_puf_instance(16, 1, 3);
    const auto learn = generate_crp_set(inst, 2000, SetRole::learning, 21);
    const auto forbidden = challenge_keys(learn);
    const auto test = generate_crp_set(inst, 1000, SetRole::test, 22, &forbidden);
    CHECK_FALSE(test.overlap_allowed);
    for (std::size_t i = 0; i < test.size(); ++i)
        CHECK(forbidden.count(test.challenge_key(i)) == 0);
}

TEST_CASE("cramped test sets fall back to overlap or refuse") {
    const auto inst = sample_puf_instance(8, 1, 4);
    const auto learn = generate_crp_set(inst, 200, SetRole::learning, 31);
    const auto forbidden = challenge_keys(learn);
    const auto test = generate_crp_set(inst, 100, SetRole::test, 32, &forbidden);
    CHECK(test.overlap_allowed);
    CHECK(test.size() == 100);
    CHECK_THROWS_AS(generate_crp_set(inst, 100, SetRole::test, 32, &forbidden, true),
                    std::invalid_argument);
    CHECK_THROWS_AS(generate_crp_set(inst, 0, SetRole::learning, 1), std::invalid_argument);
}

TEST_CASE("puf file round trip") {
    const auto dir = temp_dir();
    const auto inst = sample_puf_instance(64, 4, 99);
    const auto path = (dir / "a.puf").string();
    save_instance(inst, path);
    CHECK(load_instance(path) == inst);

    SUBCASE("truncation reports the byte offset") {
        fs::resize_file(path, 20);
        CHECK_THROWS_AS(load_instance(path), ParseError);
    }
    SUBCASE("bad magic is rejected") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("NOPE", 4);
        f.close();
        CHECK_THROWS_AS(load_instance(path), ParseError);
    }
    SUBCASE("unknown version is rejected") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(4);
        const std::uint16_t v = 9;
        f.write(reinterpret_cast<const char*>(&v), 2);
        f.close();
        CHECK_THROWS_AS(load_instance(path), ParseError);
    }
}

TEST_CASE("crp file round trip") {
    const auto dir = temp_dir();
    const auto inst = sample_puf_instance(32, 2, 8);
    const auto set = generate_crp_set(inst, 1000, SetRole::learning, 12);
    const auto path = (dir / "a.crp").string();

    save_crpset(set, path);
    CHECK(load_crpset(path) == set);
    save_crpset(set, path, /*include_phi=*/true);
    CHECK(load_crpset(path) == set);

    SUBCASE("truncation reports the byte offset") {
        fs::resize_file(path, fs::file_size(path) / 2);
        CHECK_THROWS_AS(load_crpset(path), ParseError);
    }
    SUBCASE("bad magic is rejected") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
        f.close();
        CHECK_THROWS_AS(load_crpset(path), ParseError);
    }
}

TEST_CASE("large crp file round trip") {
    const auto dir = temp_dir();
    const auto inst = sample_puf_instance(64, 1, 6);
    const auto set = generate_crp_set(inst, 250000, SetRole::learning, 13);
    const auto path = (dir / "big.crp").string();
    save_crpset(set, path);
    CHECK(load_crpset(path) == set);
    fs::remove(path);
}

TEST_CASE("text export writes one challenge/response line per crp") {
    const auto dir = temp_dir();
    const auto inst = sample_puf_instance(8, 1, 15);
    const auto set = generate_crp_set(inst, 20, SetRole::learning, 16);
    const auto path = (dir / "a.txt").string();
    export_crpset_text(set, path);
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        REQUIRE(line.size() == 10);  // 8 bits, space, response
        const Challenge c = set.challenge(rows);
        for (std::uint32_t b = 0; b < 8; ++b) CHECK(line[b] == (c[b] ? '1' : '0'));
        CHECK(line[9] == (set.response(rows) ? '1' : '0'));
        ++rows;
    }
    CHECK(rows == 20);
}
