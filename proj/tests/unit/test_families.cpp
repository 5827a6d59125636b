#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "vinfo/config.hpp"
#include "vinfo/error.hpp"
#include "vinfo/families.hpp"
#include "vinfo/features.hpp"
#include "vinfo/synthetic.hpp"
#include "vinfo/text.hpp"

using namespace vinfo;
using vinfo::testing::text_dataset;

namespace {

std::vector<std::pair<std::string, LabelIndex>> marginal_rows(std::size_t n, std::size_t n_first) {
    std::vector<std::pair<std::string, LabelIndex>> rows;
    for (std::size_t i = 0; i < n; ++i) rows.emplace_back("tok" + std::to_string(i % 17), i < n_first ? 0 : 1);
    return rows;
}

PlantedSpec small_planted(double flip, std::uint64_t seed) {
    PlantedSpec s;
    s.n = 2000;
    s.vocab_size = 500;
    s.flip_rate = flip;
    s.seed = seed;
    return s;
}

}  // namespace

TEST_CASE("featurize produces canonical vectors") {
    FeatureSpec uni;
    uni.ngram_orders = {1};
    const auto a = featurize("b a c a", uni);
    const auto b = featurize("a a b c", uni);
    CHECK(a == b);
    CHECK(std::is_sorted(a.index.begin(), a.index.end()));
    CHECK(std::adjacent_find(a.index.begin(), a.index.end()) == a.index.end());
    for (auto i : a.index) CHECK(i < uni.hash_dim);

    FeatureSpec bi;
    CHECK(featurize("A B", bi) == featurize("a b", bi));
    CHECK_FALSE(featurize("a b", bi) == featurize("b a", bi));
    CHECK(featurize(kNullInput, bi).empty());

    FeatureSpec unsigned_uni = uni;
    unsigned_uni.signed_hashing = false;
    const auto counts = featurize("x x x x y", unsigned_uni);
    REQUIRE(counts.size() == 2);
    std::vector<double> values = counts.value;
    std::sort(values.begin(), values.end());
    CHECK(values[0] == 1.0);
    CHECK(values[1] == doctest::Approx(1.0 + std::log(4.0)));
    unsigned_uni.sublinear_tf = false;
    values = featurize("x x x x y", unsigned_uni).value;
    std::sort(values.begin(), values.end());
    CHECK(values[1] == 4.0);

    FeatureSpec bad;
    bad.hash_dim = 1000;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.hash_dim = 1024;
    bad.ngram_orders = {2, 1};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad.ngram_orders = {};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("network forward matches a hand computation") {
    Network net(8, {}, 2);
    auto& p = net.params();
    p[net.weight_offset(0) + 3 * 2 + 0] = 0.5;
    p[net.weight_offset(0) + 3 * 2 + 1] = -1.0;
    p[net.bias_offset(0) + 1] = 0.25;
    SparseFeatures x{{3}, {2.0}};
    const auto logits = net.forward(x);
    CHECK(logits[0] == doctest::Approx(1.0));
    CHECK(logits[1] == doctest::Approx(-1.75));

    Network mlp(4, {2}, 2);
    auto& q = mlp.params();
    q[mlp.weight_offset(0) + 1 * 2 + 0] = 1.0;
    q[mlp.weight_offset(0) + 1 * 2 + 1] = -1.0;
    q[mlp.weight_offset(1) + 0 * 2 + 1] = 3.0;
    q[mlp.weight_offset(1) + 1 * 2 + 1] = 7.0;
    const auto out = mlp.forward(SparseFeatures{{1}, {2.0}});
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[1] == doctest::Approx(6.0));  // second hidden unit is clipped by the ReLU
}

TEST_CASE("null_only family fits the marginal and ignores input") {
    const auto train = text_dataset({"a", "b"}, marginal_rows(1000, 700));
    const auto dev = text_dataset({"a", "b"}, marginal_rows(200, 140), Split::dev);
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::null_only), train, dev);
    const auto p = pair.g->predict(kNullInput);
    CHECK(std::abs(p.prob(0) - 0.7) <= 0.02);
    CHECK(pair.g_prime->predict("TEXT: tok1") == pair.g_prime->predict(kNullInput));
    CHECK(pair.g_prime->predict("anything at all") == pair.g_prime->predict(kNullInput));
}

TEST_CASE("label entropy of a balanced split is about one bit") {
    const auto train = text_dataset({"a", "b"}, marginal_rows(1000, 500));
    const auto dev = text_dataset({"a", "b"}, marginal_rows(400, 200), Split::dev);
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::null_only), train, dev);
    const auto a = compute_all(pair, dev);
    CHECK(std::abs(a.summary.label_entropy.bits - 1.0) <= 0.02);
}

TEST_CASE("lowercasing makes inputs equivalent") {
    const auto data = generate_planted(small_planted(0.1, 3));
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::bow_linear), data.train, data.dev);
    const std::string text = serialize(data.test.instances[0], data.test);
    CHECK(pair.g_prime->predict(text) == pair.g_prime->predict(to_upper_ascii(text)));
}

TEST_CASE("bow_linear separates noiseless planted data") {
    const auto data = generate_planted(small_planted(0.0, 5));
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::bow_linear), data.train, data.dev);
    CHECK(compute_all(pair, data.dev).summary.conditional_entropy.bits <= 0.05);
}

TEST_CASE("one-class training data carries no information") {
    const auto train = text_dataset({"a", "b"}, marginal_rows(4000, 4000));
    const auto dev = text_dataset({"a", "b"}, marginal_rows(200, 200), Split::dev);
    for (auto kind : {FamilyKind::bow_linear, FamilyKind::mlp}) {
        const auto pair = train_pair(FamilySpec::defaults(kind), train, dev);
        CHECK(std::abs(compute_all(pair, dev).summary.v_information_bits) < 0.02);
        CHECK(compute_all(pair, dev).summary.label_entropy.bits < 0.05);
    }
}

TEST_CASE("training is deterministic and keeps the dev-selected epoch") {
    const auto data = generate_planted(small_planted(0.1, 9));
    auto spec = FamilySpec::defaults(FamilyKind::bow_linear);
    spec.seed = 11;
    const auto a = train_pair(spec, data.train, data.dev);
    const auto b = train_pair(spec, data.train, data.dev);
    CHECK(a.g_prime->network() == b.g_prime->network());
    CHECK(a.g->network() == b.g->network());
    const auto& curve = a.metadata.dev_entropy_g_prime;
    REQUIRE(a.metadata.selected_epoch_g_prime >= 1);
    const double selected = curve[static_cast<std::size_t>(a.metadata.selected_epoch_g_prime - 1)];
    for (double ce : curve) CHECK(selected <= ce);
    CHECK(a.g_prime->descriptor().epoch == a.metadata.selected_epoch_g_prime);
    CHECK(a.g_prime->descriptor().family == "bow_linear:g_prime");
}

TEST_CASE("mlp family trains on planted data") {
    const auto data = generate_planted(small_planted(0.1, 4));
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::mlp), data.train, data.dev);
    const double v = compute_all(pair, data.test).summary.v_information_bits;
    CHECK(v > 0.3);
    CHECK(v < data.true_info_bits + 0.05);
}

TEST_CASE("adam optimizer remains available") {
    const auto data = generate_planted(small_planted(0.0, 6));
    auto spec = FamilySpec::defaults(FamilyKind::bow_linear);
    spec.optimizer.algorithm = OptimizerKind::adam;
    spec.optimizer.learning_rate = 0.01;
    const auto pair = train_pair(spec, data.train, data.dev);
    const auto s = compute_all(pair, data.dev).summary;
    CHECK(s.conditional_entropy.bits < s.label_entropy.bits - 0.5);
}

TEST_CASE("dev labels outside the training label space are rejected") {
    const auto train = text_dataset({"a", "b"}, {{"x", 0}, {"y", 1}});
    const auto dev = text_dataset({"a", "b", "c"}, {{"x", 2}}, Split::dev);
    CHECK_THROWS_WITH_AS(train_pair(FamilySpec::defaults(FamilyKind::bow_linear), train, dev),
                         doctest::Contains("c"), ValidationError);
}

TEST_CASE("family specs validate and round-trip through json") {
    auto spec = FamilySpec::defaults(FamilyKind::mlp);
    spec.seed = 99;
    CHECK(family_spec_from_json(to_json(spec)) == spec);
    CHECK(family_spec_from_json(nlohmann::json("bow_linear")) == FamilySpec::defaults(FamilyKind::bow_linear));
    CHECK_THROWS_AS(family_spec_from_json(nlohmann::json{{"kind", "bow_linear"}, {"lr", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_family_kind("transformer"), ConfigError);
    spec.hidden_sizes.clear();
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    CHECK(family_digest(FamilySpec::defaults(FamilyKind::mlp)) == family_digest(FamilySpec::defaults(FamilyKind::mlp)));
    CHECK(family_digest(FamilySpec::defaults(FamilyKind::mlp)) !=
          family_digest(FamilySpec::defaults(FamilyKind::bow_linear)));
}

TEST_CASE("saved pairs reload with identical predictions") {
    const auto data = generate_planted(small_planted(0.1, 2));
    const auto pair = train_pair(FamilySpec::defaults(FamilyKind::mlp), data.train, data.dev);
    const auto path = std::filesystem::temp_directory_path() / "vinfo_test_pair.bin";
    save_pair(pair, path.string());
    const auto loaded = load_pair(path.string());
    std::filesystem::remove(path);
    CHECK(loaded.spec == pair.spec);
    CHECK(loaded.fields == pair.fields);
    CHECK(loaded.metadata.selected_epoch_g == pair.metadata.selected_epoch_g);
    const auto a = compute_all(pair, data.test), b = compute_all(loaded, data.test);
    CHECK(a.records == b.records);
}
