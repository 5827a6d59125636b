#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/dataset.hpp"

namespace vinfo {

// The null input. Feeding it to a featurized predictor yields the bias-only path.
inline constexpr std::string_view kNullInput{};

struct TokenizeOptions {
    bool lowercase = true;
    bool split_punctuation = false;
};

// Splits on Unicode whitespace. With split_punctuation, every ASCII punctuation
// character becomes its own token. Lowercasing folds ASCII only.
std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts = {});

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

// Serialized model input: "NAME: value" segments in the given field order, NAME
// upper-cased, separated by one space. An empty value serializes as "NAME:".
// An empty field list gives the null input.
std::string serialize(const Instance& inst, std::span<const std::string> fields);
inline std::string serialize(const Instance& inst, const Dataset& data) {
    return serialize(inst, data.schema);
}

}  // namespace vinfo
