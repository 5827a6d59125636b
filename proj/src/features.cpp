#include "vinfo/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vinfo/error.hpp"
#include "vinfo/random.hpp"

namespace vinfo {

void FeatureSpec::validate() const {
    if (hash_dim < 2 || (hash_dim & (hash_dim - 1)) != 0)
        throw ConfigError("hash_dim must be a power of two >= 2");
    if (ngram_orders.empty()) throw ConfigError("ngram_orders must not be empty");
    for (std::size_t i = 0; i < ngram_orders.size(); ++i) {
        if (ngram_orders[i] < 1) throw ConfigError("ngram orders must be >= 1");
        if (i && ngram_orders[i] <= ngram_orders[i - 1]) throw ConfigError("ngram_orders must be strictly ascending");
    }
}

SparseFeatures featurize(std::string_view text, const FeatureSpec& spec) {
    const auto tokens = tokenize(text, spec.tokenize_options());
    std::vector<std::pair<std::uint32_t, double>> raw;
    const std::uint32_t mask = spec.hash_dim - 1;
    std::string key;
    for (int order : spec.ngram_orders) {
        const auto n = static_cast<std::size_t>(order);
        if (tokens.size() < n) continue;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            key.clear();
            for (std::size_t k = 0; k < n; ++k) {
                if (k) key.push_back('\x1f');
                key += tokens[i + k];
            }
            const std::uint64_t h = hash_string(key, static_cast<std::uint64_t>(order));
            const double sign = spec.signed_hashing && (h >> 63) ? -1.0 : 1.0;
            raw.emplace_back(static_cast<std::uint32_t>(h & mask), sign);
        }
    }
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    SparseFeatures out;
    for (std::size_t i = 0; i < raw.size();) {
        double v = 0.0;
        std::size_t j = i;
        for (; j < raw.size() && raw[j].first == raw[i].first; ++j) v += raw[j].second;
        if (v != 0.0) {
            if (spec.sublinear_tf) v = std::copysign(1.0 + std::log(std::abs(v)), v);
            out.index.push_back(raw[i].first);
            out.value.push_back(v);
        }
        i = j;
    }
    return out;
}

}  // namespace vinfo
