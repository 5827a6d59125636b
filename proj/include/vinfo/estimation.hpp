#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/predictor.hpp"

namespace vinfo {

// Empirical entropy in bits with the standard error of the per-instance terms.
struct EntropyEstimate {
    double bits = 0.0;
    std::size_t n = 0;
    double std_err = 0.0;
};

struct PviRecord {
    std::string id;
    LabelIndex gold = 0;
    double pvi_bits = 0.0;        // logp_x_bits - logp_null_bits
    double logp_x_bits = 0.0;     // log2 g'[x](gold)
    double logp_null_bits = 0.0;  // log2 g[null](gold)
    LabelIndex predicted = 0;     // -1 when unknown (imported scores without a distribution)
    bool correct = false;

    bool operator==(const PviRecord&) const = default;
};

struct PviSummary {
    std::size_t n = 0;
    double v_information_bits = 0.0;  // arithmetic mean of pvi_bits
    double std_err = 0.0;             // standard error of that mean
    EntropyEstimate label_entropy;
    EntropyEstimate conditional_entropy;
};

struct PviAnalysis {
    std::vector<PviRecord> records;
    PviSummary summary;
};

// Mean and standard error of a sample; std_err is 0 for n == 1.
EntropyEstimate mean_with_std_err(std::span<const double> terms);

// Mean over instances of -log2 g[null](gold).
EntropyEstimate label_entropy(const Predictor& g, const Dataset& data);

// Mean over instances of -log2 g'[x](gold), x serialized from `fields`
// (all schema fields when omitted).
EntropyEstimate conditional_entropy(const Predictor& g_prime, const Dataset& data,
                                    std::optional<std::span<const std::string>> fields = std::nullopt);

// Mean PVI over `data`; equals label_entropy - conditional_entropy up to rounding.
double v_information(const Predictor& g, const Predictor& g_prime, const Dataset& data);

PviRecord pvi(const Predictor& g, const Predictor& g_prime, const Instance& inst, std::span<const std::string> fields);

// One record per instance, in input order. summary.v_information_bits is the plain
// left-to-right mean of the records' pvi_bits.
PviAnalysis compute_all(const Predictor& g, const Predictor& g_prime, const Dataset& data,
                        std::optional<std::span<const std::string>> fields = std::nullopt);

// Summary for records produced elsewhere (imported scores).
PviSummary summarize(std::span<const PviRecord> records);

// Throws ConfigError unless both predictors and the dataset share a label space.
void require_same_labels(const Predictor& g, const Predictor& g_prime, const Dataset& data);

}  // namespace vinfo
