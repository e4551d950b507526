#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "pufatk/crp.hpp"
#include "pufatk/model.hpp"
#include "pufatk/puf.hpp"

using namespace pufatk;

namespace {

Challenge nth_challenge(std::uint32_t n, std::uint64_t v) {
    Challenge c(n);
    for (std::uint32_t b = 0; b < n; ++b) c[b] = (v >> b) & 1;
    return c;
}

CrpSet shuffled_copy(const CrpSet& set, std::uint64_t seed) {
    std::vector<std::size_t> order(set.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
    CrpSet out;
    out.n = set.n;
    out.k = set.k;
    out.instance_seed = set.instance_seed;
    out.sampling_seed = set.sampling_seed;
    out.role = set.role;
    for (std::size_t i : order) out.append(set.challenge(i), set.response(i));
    return out;
}

// a test-role set on which `model` errs on exactly `wrong` of `total` entries
CrpSet planted_test_set(const CandidateModel& model, std::size_t total, std::size_t wrong,
                        std::uint64_t seed) {
    const std::uint32_t n = model.stride - 1;
    CrpSet set;
    set.n = n;
    set.k = model.k;
    set.role = SetRole::test;
    Rng rng(seed);
    for (std::size_t i = 0; i < total; ++i) {
        const Challenge c = random_challenge(n, rng);
        const int pred = predict_response(model, transform_challenge(c));
        set.append(c, i < wrong ? 1 - pred : pred);
    }
    return set;
}

}  // namespace

TEST_CASE("the true instance flattens into an error-free candidate") {
    const auto inst = sample_puf_instance(48, 3, 5);
    const auto model = CandidateModel::from_instance(inst);
    CHECK(model.k == 3);
    CHECK(model.stride == 49);
    const auto set = generate_crp_set(inst, 3000, SetRole::learning, 17);
    CHECK(fitness(model, set) == 0);

    // negating one chain flips that chain everywhere (ties aside): every
    // prediction inverts, so the error count becomes the set size
    auto flipped = model;
    for (std::uint32_t i = 0; i < flipped.stride; ++i) flipped.genes[i] = -flipped.genes[i];
    CHECK(fitness(flipped, set) == set.size());
}

TEST_CASE("a candidate with two identical chains answers constantly zero") {
    const auto inst = sample_puf_instance(16, 2, 6);
    auto model = CandidateModel::from_instance(inst);
    std::copy(model.genes.begin(), model.genes.begin() + model.stride,
              model.genes.begin() + model.stride);
    Rng rng(3);
    for (int t = 0; t < 100; ++t)
        CHECK(predict_response(model, transform_challenge(random_challenge(16, rng))) == 0);
}

TEST_CASE("predict_response agrees with the reference response exhaustively") {
    for (std::uint32_t n = 1; n <= 8; ++n) {
        for (std::uint32_t k = 1; k <= 2; ++k) {
            const auto inst = sample_puf_instance(n, k, 1000 + n * 10 + k);
            const auto model = CandidateModel::from_instance(inst);
            for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v) {
                const auto phi = transform_challenge(nth_challenge(n, v));
                REQUIRE(predict_response(model, phi) == xor_apuf_response(inst, phi));
            }
        }
    }
}

TEST_CASE("fitness counts disagreements exactly") {
    const auto inst = sample_puf_instance(24, 1, 7);
    const auto model = CandidateModel::from_instance(inst);
    auto set = generate_crp_set(inst, 400, SetRole::learning, 9);
    CHECK(fitness(model, set) == 0);

    // rebuild with 25 responses flipped
    CrpSet tampered;
    tampered.n = set.n;
    tampered.k = set.k;
    for (std::size_t i = 0; i < set.size(); ++i)
        tampered.append(set.challenge(i), i < 25 ? 1 - set.response(i) : set.response(i));
    CHECK(fitness(model, tampered) == 25);
}

TEST_CASE("fitness is invariant under reordering of the set") {
    const auto inst = sample_puf_instance(32, 2, 8);
    const auto set = generate_crp_set(inst, 500, SetRole::learning, 10);
    const auto shuf = shuffled_copy(set, 77);
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> genes(std::size_t(set.k) * set.stride());
        for (auto& x : genes) x = rng.normal();
        CHECK(fitness_flat(genes, set, 0, set.size()) ==
              fitness_flat(genes, shuf, 0, shuf.size()));
    }
}

TEST_CASE("fitness is additive over disjoint chunks") {
    const auto inst = sample_puf_instance(64, 1, 9);
    const auto set = generate_crp_set(inst, 777, SetRole::learning, 12);
    Rng rng(13);
    std::vector<double> genes(set.stride());
    for (auto& x : genes) x = rng.normal();
    const auto whole = fitness_flat(genes, set, 0, set.size());
    std::uint64_t sum = 0;
    for (std::size_t begin = 0; begin < set.size(); begin += 100)
        sum += fitness_flat(genes, set, begin, std::min(begin + 100, set.size()));
    CHECK(sum == whole);
}

TEST_CASE("fitness is invariant under positive scaling of the genome") {
    const auto inst = sample_puf_instance(40, 2, 14);
    const auto set = generate_crp_set(inst, 300, SetRole::learning, 15);
    Rng rng(16);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> genes(std::size_t(set.k) * set.stride());
        for (auto& x : genes) x = rng.normal();
        std::vector<double> scaled(genes);
        for (auto& x : scaled) x *= 3.75;
        CHECK(fitness_flat(genes, set, 0, set.size()) ==
              fitness_flat(scaled, set, 0, set.size()));
    }
}

TEST_CASE("shape mismatches are rejected") {
    const auto inst = sample_puf_instance(16, 1, 17);
    const auto set = generate_crp_set(inst, 10, SetRole::learning, 18);
    std::vector<double> wrong(11, 0.5);
    CHECK_THROWS_AS(fitness_flat(wrong, set, 0, set.size()), std::invalid_argument);
    CHECK_THROWS_AS(CandidateModel::from_genes(std::vector<double>(10, 0.0), 3),
                    std::invalid_argument);
    const auto model = CandidateModel::from_instance(inst);
    CHECK_THROWS_AS(predict_response(model, std::vector<double>(5, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("random candidates score near the coin-flip floor") {
    const auto inst = sample_puf_instance(64, 1, 19);
    auto test = generate_crp_set(inst, 1000, SetRole::test, 20);
    Rng rng(21);
    int inside = 0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> genes(test.stride());
        for (auto& x : genes) x = rng.normal();
        const auto rep = evaluate_test(CandidateModel::from_genes(genes, 1), test);
        if (rep.accuracy >= 0.4 && rep.accuracy <= 0.6) ++inside;
    }
    CHECK(inside >= 90);
}

TEST_CASE("evaluate_test applies the 55 percent success bar") {
    const auto inst = sample_puf_instance(16, 1, 22);
    const auto model = CandidateModel::from_instance(inst);

    auto at_bar = planted_test_set(model, 1000, 450, 23);
    auto rep = evaluate_test(model, at_bar);
    CHECK(rep.errors == 450);
    CHECK(rep.accuracy == doctest::Approx(0.55));
    CHECK(rep.success);

    auto below = planted_test_set(model, 1000, 451, 24);
    rep = evaluate_test(model, below);
    CHECK(rep.errors == 451);
    CHECK_FALSE(rep.success);

    auto strong = planted_test_set(model, 1000, 35, 25);
    rep = evaluate_test(model, strong);
    CHECK(rep.accuracy == doctest::Approx(0.965));
    CHECK(rep.success);

    auto learning = generate_crp_set(inst, 100, SetRole::learning, 26);
    CHECK_THROWS_AS(evaluate_test(model, learning), std::invalid_argument);
}
