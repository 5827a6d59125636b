#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/estimation.hpp"
#include "vinfo/features.hpp"
#include "vinfo/predictor.hpp"

namespace vinfo {

enum class FamilyKind { null_only, bow_linear, mlp };

std::string_view family_kind_name(FamilyKind k);
FamilyKind parse_family_kind(std::string_view s);

enum class OptimizerKind { sgd, adam };

std::string_view optimizer_kind_name(OptimizerKind k);
OptimizerKind parse_optimizer_kind(std::string_view s);

struct OptimizerSpec {
    OptimizerKind algorithm = OptimizerKind::sgd;
    double learning_rate = 0.2;
    std::size_t batch_size = 256;
    int max_epochs = 20;
    int early_stop_patience = 3;

    bool operator==(const OptimizerSpec&) const = default;
};

struct FamilySpec {
    FamilyKind kind = FamilyKind::bow_linear;
    FeatureSpec features;
    std::vector<std::size_t> hidden_sizes;  // mlp only
    OptimizerSpec optimizer;
    std::uint64_t seed = 0;

    // Defaults per kind: minibatch SGD at lr 0.2 for linear/null_only; lr 0.3 with
    // one hidden layer of 64 over 2^14 hashed features for mlp.
    static FamilySpec defaults(FamilyKind kind);

    void validate() const;
    bool operator==(const FamilySpec&) const = default;
};

// Dense feed-forward network over hashed sparse features. With no hidden layers it
// is a log-linear (multinomial logistic) model.
class Network {
public:
    Network() = default;
    Network(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t num_labels);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t num_labels() const { return num_labels_; }
    const std::vector<std::size_t>& hidden() const { return hidden_; }
    std::size_t num_layers() const { return hidden_.size() + 1; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    // Offsets of layer l's weight matrix (in_dim x out_dim, input-major) and bias.
    std::size_t weight_offset(std::size_t l) const { return weight_off_[l]; }
    std::size_t bias_offset(std::size_t l) const { return bias_off_[l]; }
    std::size_t layer_in(std::size_t l) const { return l == 0 ? input_dim_ : hidden_[l - 1]; }
    std::size_t layer_out(std::size_t l) const { return l < hidden_.size() ? hidden_[l] : num_labels_; }

    // Returns logits; `activations` receives post-ReLU outputs of each hidden layer.
    std::vector<double> forward(const SparseFeatures& x, std::vector<std::vector<double>>* activations = nullptr) const;

    bool operator==(const Network&) const = default;

private:
    std::size_t input_dim_ = 0;
    std::vector<std::size_t> hidden_;
    std::size_t num_labels_ = 0;
    std::vector<std::size_t> weight_off_, bias_off_;
    std::vector<double> params_;
};

// Predictor backed by a trained Network. null_only predictors ignore their input.
class FeaturePredictor final : public Predictor {
public:
    FeaturePredictor(LabelSpace labels, PredictorDescriptor descriptor, FamilySpec spec, Network net);

    CategoricalDistribution predict(std::string_view input) const override;
    SparseFeatures features(std::string_view input) const;

    const FamilySpec& spec() const { return spec_; }
    const Network& network() const { return net_; }

private:
    FamilySpec spec_;
    Network net_;
};

struct TrainingMetadata {
    int selected_epoch_g_prime = 0;
    int selected_epoch_g = 0;
    std::vector<double> dev_entropy_g_prime;  // bits, one per completed epoch
    std::vector<double> dev_entropy_g;
    std::uint64_t seed = 0;
};

struct TrainedPair {
    std::shared_ptr<const FeaturePredictor> g_prime;  // trained on (x, y)
    std::shared_ptr<const FeaturePredictor> g;        // trained on (null, y)
    FamilySpec spec;
    std::vector<std::string> fields;  // fields serialized into x
    TrainingMetadata metadata;
};

// Result of fitting one predictor with dev-entropy checkpoint selection.
struct FitResult {
    std::shared_ptr<const FeaturePredictor> predictor;
    int selected_epoch = 0;
    std::vector<double> dev_entropy;
};

// Fits one predictor on serialized inputs. Inputs equal to the null input train
// the bias-only path.
FitResult fit_predictor(const FamilySpec& spec, const LabelSpace& labels, std::span<const std::string> train_inputs,
                        std::span<const LabelIndex> train_gold, std::span<const std::string> dev_inputs,
                        std::span<const LabelIndex> dev_gold, std::uint64_t seed, std::string name);

// Trains g' on serialized `fields` (schema when omitted) and g on the null input.
// For each, returns the parameters of the epoch with the lowest dev conditional entropy.
TrainedPair train_pair(const FamilySpec& spec, const Dataset& train, const Dataset& dev,
                       std::optional<std::span<const std::string>> fields = std::nullopt);

inline CategoricalDistribution predict(const Predictor& p, std::string_view input) { return p.predict(input); }

PviAnalysis compute_all(const TrainedPair& pair, const Dataset& data);

// Short hex digest of the canonical JSON form of a family spec.
std::string family_digest(const FamilySpec& spec);

void save_pair(const TrainedPair& pair, const std::string& path);
TrainedPair load_pair(const std::string& path);

}  // namespace vinfo
