#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "vinfo/error.hpp"
#include "vinfo/estimation.hpp"
#include "vinfo/random.hpp"
#include "vinfo/stats.hpp"
#include "vinfo/text.hpp"

using namespace vinfo;
using vinfo::testing::TablePredictor;
using vinfo::testing::text_dataset;

TEST_CASE("label space lookups") {
    LabelSpace ls({"a", "b", "c"});
    CHECK(ls.size() == 3);
    CHECK(ls.index_of("b") == 1);
    CHECK_FALSE(ls.find("z").has_value());
    CHECK_THROWS_AS(ls.index_of("z"), ValidationError);
    CHECK_THROWS_AS(LabelSpace({"a", "a"}), ValidationError);
}

TEST_CASE("dataset validation") {
    auto d = text_dataset({"no", "yes"}, {{"x", 0}, {"y", 1}});
    CHECK_NOTHROW(d.validate());
    d.instances[1].id = d.instances[0].id;
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d = text_dataset({"no", "yes"}, {{"x", 0}, {"y", 2}});
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d = text_dataset({"no", "yes"}, {{"x", 0}});
    d.instances[0].fields = {{"other", "x"}};
    CHECK_THROWS_AS(d.validate(), ValidationError);
}

TEST_CASE("tokenize and serialize") {
    CHECK(tokenize("  Two\tgirls\n KISS. ") == std::vector<std::string>{"two", "girls", "kiss."});
    CHECK(tokenize("Two girls kiss.", {.lowercase = false, .split_punctuation = true}) ==
          std::vector<std::string>{"Two", "girls", "kiss", "."});
    CHECK(tokenize("a b").size() == 2);

    Instance inst{"1", {{"premise", "A man."}, {"hypothesis", ""}}, 0};
    const std::vector<std::string> both{"premise", "hypothesis"};
    CHECK(serialize(inst, both) == "PREMISE: A man. HYPOTHESIS:");
    CHECK(serialize(inst, std::vector<std::string>{}) == kNullInput);
}

TEST_CASE("categorical floor rule") {
    auto d = CategoricalDistribution::from_probs({2.0, 2.0});
    CHECK(d.prob(0) == doctest::Approx(0.5));
    auto f = CategoricalDistribution::from_probs({1.0, 0.0});
    CHECK(f.prob(1) == doctest::Approx(kProbabilityFloor));
    CHECK(f.prob(0) + f.prob(1) == doctest::Approx(1.0));
    auto l = CategoricalDistribution::from_logits(std::vector<double>{1000.0, 0.0, 1000.0});
    CHECK(l.argmax() == 0);
    CHECK(l.prob(1) >= kProbabilityFloor);
    CHECK(std::isfinite(l.log2_prob(1)));
}

TEST_CASE("label entropy of fixed marginals") {
    auto d2 = text_dataset({"a", "b"}, {{"x", 0}, {"y", 1}, {"z", 1}});
    TablePredictor uniform2(d2.label_space, {}, {0.5, 0.5});
    CHECK(label_entropy(uniform2, d2).bits == doctest::Approx(1.0).epsilon(1e-12));

    auto d3 = text_dataset({"a", "b", "c"}, {{"x", 0}, {"y", 2}});
    TablePredictor uniform3(d3.label_space, {}, {1.0, 1.0, 1.0});
    CHECK(std::abs(label_entropy(uniform3, d3).bits - std::log2(3.0)) < 1e-6);

    auto d1 = text_dataset({"only"}, {{"x", 0}, {"y", 0}});
    TablePredictor degenerate(d1.label_space, {}, {1.0});
    CHECK(label_entropy(degenerate, d1).bits < 1e-9);
}

TEST_CASE("conditional entropy of fixed predictors") {
    auto d = text_dataset({"a", "b"}, {{"x", 0}, {"y", 1}});
    TablePredictor uniform(d.label_space, {}, {0.5, 0.5});
    CHECK(conditional_entropy(uniform, d).bits == doctest::Approx(1.0));

    TablePredictor p75(d.label_space, {{"TEXT: x", {0.75, 0.25}}, {"TEXT: y", {0.25, 0.75}}}, {0.5, 0.5});
    CHECK(std::abs(conditional_entropy(p75, d).bits - (-std::log2(0.75))) < 1e-6);

    TablePredictor perfect(d.label_space, {{"TEXT: x", {1.0, 0.0}}, {"TEXT: y", {0.0, 1.0}}}, {0.5, 0.5});
    CHECK(conditional_entropy(perfect, d).bits < 1e-9);
}

TEST_CASE("pvi examples and the mean identity") {
    auto d = text_dataset({"a", "b"}, {{"same", 0}, {"up", 0}, {"down", 0}});
    TablePredictor g(d.label_space, {}, {0.5, 0.5});
    TablePredictor gp(d.label_space, {{"TEXT: up", {0.9, 0.1}}, {"TEXT: down", {0.25, 0.75}}}, {0.5, 0.5});

    const std::vector<std::string> fields{"text"};
    CHECK(pvi(g, gp, d.instances[0], fields).pvi_bits == 0.0);
    CHECK(std::abs(pvi(g, gp, d.instances[1], fields).pvi_bits - std::log2(0.9 / 0.5)) < 1e-6);
    CHECK(pvi(g, gp, d.instances[2], fields).pvi_bits == doctest::Approx(-1.0).epsilon(1e-12));

    const auto a = compute_all(g, gp, d);
    const double oracle = (0.0 + std::log2(1.8) + std::log2(0.5)) / 3.0;
    CHECK(a.summary.v_information_bits == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(a.summary.v_information_bits == doctest::Approx(-0.0506).epsilon(1e-3));
    double sum = 0.0;
    for (const auto& r : a.records) sum += r.pvi_bits;
    CHECK(a.summary.v_information_bits == sum / 3.0);
    CHECK(a.records[1].predicted == 0);
    CHECK(a.records[2].correct == false);

    const double diff = a.summary.label_entropy.bits - a.summary.conditional_entropy.bits;
    CHECK(a.summary.v_information_bits == doctest::Approx(diff).epsilon(1e-12));
}

TEST_CASE("identical predictors carry zero information") {
    auto d = text_dataset({"a", "b"}, {{"x", 0}, {"y", 1}, {"z", 1}});
    ConstantPredictor g(d.label_space, {0.3, 0.7});
    CHECK(v_information(g, g, d) == 0.0);
    for (const auto& r : compute_all(g, g, d).records) CHECK(r.pvi_bits == 0.0);
}

TEST_CASE("single instance summary equals its pvi") {
    auto d = text_dataset({"a", "b"}, {{"x", 1}});
    TablePredictor g(d.label_space, {}, {0.5, 0.5});
    TablePredictor gp(d.label_space, {}, {0.2, 0.8});
    const auto a = compute_all(g, gp, d);
    CHECK(a.summary.v_information_bits == a.records[0].pvi_bits);
    CHECK(a.summary.std_err == 0.0);
}

TEST_CASE("estimation rejects mismatched label spaces and empty data") {
    auto d = text_dataset({"a", "b"}, {{"x", 0}});
    TablePredictor other(LabelSpace({"a", "c"}), {}, {0.5, 0.5});
    TablePredictor g(d.label_space, {}, {0.5, 0.5});
    CHECK_THROWS_AS(compute_all(g, other, d), ConfigError);
    auto empty = text_dataset({"a", "b"}, {});
    CHECK_THROWS_AS(compute_all(g, g, empty), EmptyInputError);
}

TEST_CASE("rng is reproducible") {
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
    Rng c(1);
    for (int i = 0; i < 1000; ++i) {
        CHECK(c.below(7) < 7);
        const double u = c.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
    CHECK(mix_seed(1, "a") != mix_seed(1, "b"));
    CHECK(hash_string("abc") == hash_string("abc"));
}

TEST_CASE("welch t-test against reference values") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10, 12};
    const auto r = welch_t_test(a, b);
    CHECK(r.t == doctest::Approx(-2.3763541031440183).epsilon(1e-10));
    CHECK(r.df == doctest::Approx(6.972255729794934).epsilon(1e-10));
    CHECK(r.p_value == doctest::Approx(0.04928433820673049).epsilon(1e-8));
}

TEST_CASE("pearson correlation") {
    const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 1, 4, 3, 5};
    CHECK(pearson(a, b) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(pearson(a, a) == 1.0);
    std::vector<double> neg(a.size());
    std::transform(a.begin(), a.end(), neg.begin(), [](double v) { return -v; });
    CHECK(pearson(a, neg) == -1.0);
    const std::vector<double> flat{3, 3, 3, 3, 3};
    CHECK_THROWS_AS(pearson(a, flat), UndefinedError);
}
