#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "vinfo/error.hpp"
#include "vinfo/families.hpp"
#include "vinfo/slices.hpp"
#include "vinfo/synthetic.hpp"
#include "vinfo/text.hpp"

using namespace vinfo;
using vinfo::testing::binary_entropy;

namespace {

// I(X;Y) from the joint distribution of (trigger class, label), built by brute force.
double brute_force_information(std::size_t k, double eps) {
    double info = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
        for (std::size_t y = 0; y < k; ++y) {
            const double p_y_given_t = t == y ? 1.0 - eps : eps / static_cast<double>(k - 1);
            const double joint = p_y_given_t / static_cast<double>(k);
            const double marginal = 1.0 / static_cast<double>(k);  // both p(t) and p(y)
            if (joint > 0.0) info += joint * std::log2(joint / (marginal * marginal));
        }
    }
    return info;
}

std::size_t count_triggers(const Instance& inst, const PlantedData& d, std::size_t* cls) {
    std::size_t found = 0;
    for (const auto& [name, text] : inst.fields)
        for (const auto& tok : tokenize(text, {.lowercase = false}))
            for (std::size_t c = 0; c < d.triggers.size(); ++c)
                for (const auto& t : d.triggers[c])
                    if (tok == t) {
                        ++found;
                        *cls = c;
                    }
    return found;
}

}  // namespace

TEST_CASE("closed-form planted information") {
    CHECK(planted_information_bits(2, 0.0) == doctest::Approx(1.0));
    CHECK(std::abs(planted_information_bits(2, 0.1) - (1.0 - binary_entropy(0.1))) < 1e-12);
    CHECK(std::abs(planted_information_bits(2, 0.1) - 0.531) < 1e-3);
    CHECK(planted_information_bits(2, 0.5) == doctest::Approx(0.0));
    CHECK(planted_information_bits(3, 2.0 / 3.0) == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t k : {2u, 3u, 5u})
        for (double eps : {0.0, 0.05, 0.2, 0.4})
            CHECK(planted_information_bits(k, eps) == doctest::Approx(brute_force_information(k, eps)).epsilon(1e-12));
    double prev = 2.0;
    for (double eps = 0.0; eps < 0.5; eps += 0.05) {
        const double v = planted_information_bits(2, eps);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("planted construction invariants") {
    PlantedSpec s;
    s.n = 2000;
    s.seed = 3;
    const auto d = generate_planted(s);
    CHECK(d.train.size() == 2000);
    CHECK(d.dev.size() == 1000);
    CHECK(d.test.size() == 1000);
    CHECK(d.true_info_bits == planted_information_bits(2, 0.1));
    CHECK_NOTHROW(d.train.validate());
    CHECK(d.test.split == Split::test);

    for (const Dataset* split : {&d.train, &d.dev, &d.test}) {
        std::vector<std::size_t> per_class(2, 0), flipped(2, 0), by_label(2, 0);
        for (const auto& inst : split->instances) {
            std::size_t cls = 99;
            CHECK(count_triggers(inst, d, &cls) == 1);
            ++per_class[cls];
            ++by_label[static_cast<std::size_t>(inst.gold)];
            if (static_cast<std::size_t>(inst.gold) != cls) ++flipped[cls];
        }
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(flipped[c] == static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(per_class[c]))));
            const double share = static_cast<double>(by_label[c]) / static_cast<double>(split->size());
            CHECK(std::abs(share - 0.5) <= 0.02);
        }
    }
}

TEST_CASE("planted generation is seed-deterministic") {
    PlantedSpec s;
    s.n = 300;
    s.seed = 9;
    CHECK(generate_planted(s).train == generate_planted(s).train);
    auto t = s;
    t.seed = 10;
    CHECK_FALSE(generate_planted(t).train == generate_planted(s).train);
}

TEST_CASE("planted spec validation") {
    PlantedSpec s;
    s.vocab_size = 2;
    CHECK_THROWS_AS(generate_planted(s), ConfigError);
    s = PlantedSpec{};
    s.flip_rate = 0.5;
    CHECK_THROWS_AS(generate_planted(s), ConfigError);
    s = PlantedSpec{};
    s.layout = PlantedLayout::nli;
    s.vocab_size = 20;
    CHECK_THROWS_AS(generate_planted(s), ConfigError);
}

TEST_CASE("nli layout places overlap only in class-0 hypotheses") {
    PlantedSpec s;
    s.n = 600;
    s.n_classes = 3;
    s.layout = PlantedLayout::nli;
    s.seed = 5;
    const auto d = generate_planted(s);
    CHECK(d.train.schema == std::vector<std::string>{"premise", "hypothesis"});
    CHECK(d.train.label_space.labels() == std::vector<std::string>{"entailment", "neutral", "contradiction"});
    for (const auto& inst : d.train.instances) {
        std::size_t cls = 99;
        REQUIRE(count_triggers(inst, d, &cls) == 1);
        CHECK(inst.fields.at("hypothesis").find(d.triggers[cls][0]) != std::string::npos);
        const auto overlap = overlap_length(inst, "premise", "hypothesis");
        if (cls == 0) {
            CHECK(overlap >= 1);
            CHECK(overlap <= 3);
        } else {
            CHECK(overlap == 0);
        }
    }
}

TEST_CASE("independent data") {
    CHECK_THROWS_AS(generate_independent(0, 2, 1), EmptyInputError);
    const auto a = generate_independent(500, 2, 1);
    const auto b = generate_independent(500, 2, 2);
    CHECK_FALSE(a == b);
    CHECK(a == generate_independent(500, 2, 1));
    CHECK_NOTHROW(a.validate());
}

TEST_CASE("fraction sweep") {
    PlantedSpec s;
    s.n = 2000;
    s.vocab_size = 500;
    s.seed = 31;
    const auto d = generate_planted(s);
    auto family = FamilySpec::defaults(FamilyKind::bow_linear);
    family.seed = 77;

    SUBCASE("full fraction with one repeat equals the direct pipeline") {
        const auto rows = fraction_sweep(family, d.train, d.dev, d.test, {1.0}, 1, 5);
        const auto direct = compute_all(train_pair(family, d.train, d.dev), d.test).summary.v_information_bits;
        CHECK(rows[0].mean_bits == direct);
        CHECK(rows[0].std_bits == 0.0);
        CHECK(rows[0].sample_size == d.train.size());
    }
    SUBCASE("tiny fractions degrade and tiny samples are flagged") {
        const auto rows = fraction_sweep(family, d.train, d.dev, d.test, {0.01, 1.0}, 4, 5);
        CHECK(rows[0].mean_bits < rows[1].mean_bits);
        CHECK(rows[0].std_bits > rows[1].std_bits);
        const auto tiny = fraction_sweep(family, d.train, d.dev, d.test, {0.001}, 1, 5);
        CHECK(tiny[0].flagged);
    }
    SUBCASE("sweeps are deterministic") {
        const auto a = fraction_sweep(family, d.train, d.dev, d.test, {0.3}, 2, 5);
        const auto b = fraction_sweep(family, d.train, d.dev, d.test, {0.3}, 2, 5);
        CHECK(a[0].mean_bits == b[0].mean_bits);
        CHECK(a[0].std_bits == b[0].std_bits);
    }
    SUBCASE("invalid fractions") {
        CHECK_THROWS_AS(fraction_sweep(family, d.train, d.dev, d.test, {0.0}, 1, 5), ConfigError);
        CHECK_THROWS_AS(fraction_sweep(family, d.train, d.dev, d.test, {1.5}, 1, 5), ConfigError);
        CHECK_THROWS_AS(fraction_sweep(family, d.train, d.dev, d.test, {0.5}, 0, 5), ConfigError);
    }
}
