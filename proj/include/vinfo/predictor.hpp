#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/dataset.hpp"

namespace vinfo {

// Smallest probability any predictor output or imported score may carry.
inline constexpr double kProbabilityFloor = 1e-10;

class CategoricalDistribution {
public:
    CategoricalDistribution() = default;

    // Normalizes `probs`. If any entry falls below `floor`, the distribution is
    // mixed with the uniform one so that every entry is at least `floor`.
    static CategoricalDistribution from_probs(std::vector<double> probs, double floor = kProbabilityFloor);
    // Numerically stable softmax followed by the same floor rule.
    static CategoricalDistribution from_logits(std::span<const double> logits, double floor = kProbabilityFloor);

    std::size_t size() const { return probs_.size(); }
    double prob(LabelIndex i) const { return probs_.at(static_cast<std::size_t>(i)); }
    double log2_prob(LabelIndex i) const;
    const std::vector<double>& probs() const { return probs_; }

    // Lowest index among the maxima.
    LabelIndex argmax() const;

    bool operator==(const CategoricalDistribution&) const = default;

private:
    std::vector<double> probs_;
};

struct PredictorDescriptor {
    std::string family;
    std::uint64_t seed = 0;
    int epoch = 0;
};

// A conditional distribution over labels given serialized text or the null input.
// Implementations must be deterministic and safe to call concurrently.
class Predictor {
public:
    Predictor(LabelSpace labels, PredictorDescriptor descriptor)
        : labels_(std::move(labels)), descriptor_(std::move(descriptor)) {}
    virtual ~Predictor() = default;

    virtual CategoricalDistribution predict(std::string_view input) const = 0;

    const LabelSpace& label_space() const { return labels_; }
    const PredictorDescriptor& descriptor() const { return descriptor_; }

private:
    LabelSpace labels_;
    PredictorDescriptor descriptor_;
};

// Returns the same distribution for every input. Useful as a reference point and in tests.
class ConstantPredictor final : public Predictor {
public:
    ConstantPredictor(LabelSpace labels, std::vector<double> probs, std::string name = "constant");
    CategoricalDistribution predict(std::string_view) const override { return dist_; }

private:
    CategoricalDistribution dist_;
};

}  // namespace vinfo
