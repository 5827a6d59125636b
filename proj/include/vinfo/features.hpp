#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "vinfo/text.hpp"

namespace vinfo {

struct FeatureSpec {
    std::uint32_t hash_dim = 1u << 18;
    std::vector<int> ngram_orders{1, 2};
    bool lowercase = true;
    bool signed_hashing = true;
    bool split_punctuation = false;
    bool sublinear_tf = true;  // |count| c becomes 1 + ln c, sign kept

    void validate() const;
    TokenizeOptions tokenize_options() const { return {lowercase, split_punctuation}; }

    bool operator==(const FeatureSpec&) const = default;
};

// Hashed bag of n-gram counts, sorted by index with duplicates merged and zeros dropped.
// Equal token multisets always give identical vectors when only unigrams are used.
struct SparseFeatures {
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    std::size_t size() const { return index.size(); }
    bool empty() const { return index.empty(); }
    bool operator==(const SparseFeatures&) const = default;
};

SparseFeatures featurize(std::string_view text, const FeatureSpec& spec);

}  // namespace vinfo
