#include "vinfo/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vinfo/error.hpp"

namespace vinfo {

CategoricalDistribution CategoricalDistribution::from_probs(std::vector<double> probs, double floor) {
    if (probs.empty()) throw ValidationError("distribution over an empty label set");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("probabilities must be finite and non-negative");
        sum += p;
    }
    if (!(sum > 0.0)) throw ValidationError("probabilities sum to zero");
    bool below = false;
    for (double& p : probs) {
        p /= sum;
        below = below || p < floor;
    }
    if (below) {
        const double k = static_cast<double>(probs.size());
        if (floor * k >= 1.0) throw ValidationError("probability floor too large for label count");
        for (double& p : probs) p = floor + (1.0 - k * floor) * p;
    }
    CategoricalDistribution d;
    d.probs_ = std::move(probs);
    return d;
}

CategoricalDistribution CategoricalDistribution::from_logits(std::span<const double> logits, double floor) {
    if (logits.empty()) throw ValidationError("distribution over an empty label set");
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> probs(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) probs[i] = std::exp(logits[i] - mx);
    return from_probs(std::move(probs), floor);
}

double CategoricalDistribution::log2_prob(LabelIndex i) const { return std::log2(prob(i)); }

LabelIndex CategoricalDistribution::argmax() const {
    LabelIndex best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i)
        if (probs_[i] > probs_[static_cast<std::size_t>(best)]) best = static_cast<LabelIndex>(i);
    return best;
}

ConstantPredictor::ConstantPredictor(LabelSpace labels, std::vector<double> probs, std::string name)
    : Predictor(labels, PredictorDescriptor{std::move(name), 0, 0}),
      dist_(CategoricalDistribution::from_probs(std::move(probs))) {
    if (dist_.size() != labels.size()) throw ConfigError("constant distribution size does not match label space");
}

}  // namespace vinfo
