#include "vinfo/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vinfo/error.hpp"
#include "vinfo/random.hpp"
#include "vinfo/text.hpp"

namespace vinfo {

std::string_view family_kind_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::null_only: return "null_only";
        case FamilyKind::bow_linear: return "bow_linear";
        case FamilyKind::mlp: return "mlp";
    }
    return "bow_linear";
}

FamilyKind parse_family_kind(std::string_view s) {
    if (s == "null_only") return FamilyKind::null_only;
    if (s == "bow_linear") return FamilyKind::bow_linear;
    if (s == "mlp") return FamilyKind::mlp;
    throw ConfigError("unknown family kind '" + std::string(s) + "'");
}

std::string_view optimizer_kind_name(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer_kind(std::string_view s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "adam") return OptimizerKind::adam;
    throw ConfigError("unknown optimizer '" + std::string(s) + "' (expected sgd or adam)");
}

FamilySpec FamilySpec::defaults(FamilyKind kind) {
    FamilySpec s;
    s.kind = kind;
    if (kind == FamilyKind::mlp) {
        s.features.hash_dim = 1u << 14;
        s.hidden_sizes = {64};
        s.optimizer.learning_rate = 0.3;
    }
    return s;
}

void FamilySpec::validate() const {
    if (kind != FamilyKind::null_only) features.validate();
    if (kind == FamilyKind::mlp && hidden_sizes.empty()) throw ConfigError("mlp family requires hidden_sizes");
    for (auto h : hidden_sizes)
        if (h == 0) throw ConfigError("hidden layer sizes must be positive");
    if (optimizer.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (optimizer.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (optimizer.early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
    if (!(optimizer.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

// ---------------------------------------------------------------------------
// Network

Network::Network(std::size_t input_dim, std::vector<std::size_t> hidden, std::size_t num_labels)
    : input_dim_(input_dim), hidden_(std::move(hidden)), num_labels_(num_labels) {
    std::size_t off = 0;
    for (std::size_t l = 0; l < num_layers(); ++l) {
        weight_off_.push_back(off);
        off += layer_in(l) * layer_out(l);
        bias_off_.push_back(off);
        off += layer_out(l);
    }
    params_.assign(off, 0.0);
}

std::vector<double> Network::forward(const SparseFeatures& x, std::vector<std::vector<double>>* activations) const {
    if (activations) activations->clear();
    std::vector<double> out(params_.begin() + static_cast<std::ptrdiff_t>(bias_off_[0]),
                            params_.begin() + static_cast<std::ptrdiff_t>(bias_off_[0] + layer_out(0)));
    const std::size_t out0 = layer_out(0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double* row = params_.data() + weight_off_[0] + static_cast<std::size_t>(x.index[k]) * out0;
        const double v = x.value[k];
        for (std::size_t o = 0; o < out0; ++o) out[o] += v * row[o];
    }
    for (std::size_t l = 1; l < num_layers(); ++l) {
        for (double& a : out) a = std::max(a, 0.0);
        const std::size_t in = layer_in(l), n_out = layer_out(l);
        std::vector<double> next(params_.begin() + static_cast<std::ptrdiff_t>(bias_off_[l]),
                                 params_.begin() + static_cast<std::ptrdiff_t>(bias_off_[l] + n_out));
        for (std::size_t i = 0; i < in; ++i) {
            if (out[i] == 0.0) continue;
            const double* row = params_.data() + weight_off_[l] + i * n_out;
            for (std::size_t o = 0; o < n_out; ++o) next[o] += out[i] * row[o];
        }
        if (activations) activations->push_back(std::move(out));
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// FeaturePredictor

FeaturePredictor::FeaturePredictor(LabelSpace labels, PredictorDescriptor descriptor, FamilySpec spec, Network net)
    : Predictor(std::move(labels), std::move(descriptor)), spec_(std::move(spec)), net_(std::move(net)) {
    if (net_.num_labels() != label_space().size()) throw ConfigError("network output size does not match label space");
}

SparseFeatures FeaturePredictor::features(std::string_view input) const {
    if (spec_.kind == FamilyKind::null_only) return {};
    return featurize(input, spec_.features);
}

CategoricalDistribution FeaturePredictor::predict(std::string_view input) const {
    const auto logits = net_.forward(features(input));
    return CategoricalDistribution::from_logits(logits);
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Minibatch SGD or Adam. Only the touched rows of the sparse input layer are
// updated; Adam moments of untouched rows stay frozen until they reappear.
class Optimizer {
public:
    Optimizer(const Network& net, const OptimizerSpec& spec)
        : adam_(spec.algorithm == OptimizerKind::adam), lr_(spec.learning_rate) {
        if (adam_) {
            m_.assign(net.params().size(), 0.0);
            v_.assign(net.params().size(), 0.0);
        }
    }

    void update(std::vector<double>& p, const std::vector<double>& g, std::span<const std::uint32_t> rows,
                std::size_t row_width, std::size_t dense_begin) {
        ++t_;
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
        auto step = [&](std::size_t i) {
            if (!adam_) {
                p[i] -= lr_ * g[i];
                return;
            }
            m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g[i];
            v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g[i] * g[i];
            p[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
        };
        for (auto r : rows)
            for (std::size_t o = 0; o < row_width; ++o) step(static_cast<std::size_t>(r) * row_width + o);
        for (std::size_t i = dense_begin; i < p.size(); ++i) step(i);
    }

private:
    static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
    bool adam_;
    double lr_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

void init_network(Network& net, FamilyKind kind, Rng& rng) {
    auto& p = net.params();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        const std::size_t in = net.layer_in(l), out = net.layer_out(l);
        if (kind != FamilyKind::mlp) continue;  // log-linear models start at zero
        const double scale =
            l == 0 ? 1.0 / std::sqrt(static_cast<double>(out)) : std::sqrt(2.0 / static_cast<double>(in + out));
        for (std::size_t i = 0; i < in * out; ++i) p[net.weight_offset(l) + i] = scale * rng.normal();
    }
}

double mean_entropy_bits(const FeaturePredictor& pred, std::span<const SparseFeatures> xs,
                         std::span<const LabelIndex> gold) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto d = CategoricalDistribution::from_logits(pred.network().forward(xs[i]));
        sum -= d.log2_prob(gold[i]);
    }
    return sum / static_cast<double>(xs.size());
}

}  // namespace

FitResult fit_predictor(const FamilySpec& spec, const LabelSpace& labels, std::span<const std::string> train_inputs,
                        std::span<const LabelIndex> train_gold, std::span<const std::string> dev_inputs,
                        std::span<const LabelIndex> dev_gold, std::uint64_t seed, std::string name) {
    spec.validate();
    if (train_inputs.size() != train_gold.size() || dev_inputs.size() != dev_gold.size())
        throw ValidationError("inputs and labels differ in length");
    if (train_inputs.empty()) throw EmptyInputError("training set is empty");
    if (dev_inputs.empty()) throw EmptyInputError("dev set is empty");

    const std::size_t K = labels.size();
    const bool ignores_input = spec.kind == FamilyKind::null_only;
    const std::vector<std::size_t> hidden = spec.kind == FamilyKind::mlp ? spec.hidden_sizes : std::vector<std::size_t>{};
    Network net(ignores_input ? 0 : spec.features.hash_dim, hidden, K);
    Rng rng(seed);
    init_network(net, spec.kind, rng);

    auto make = [&](Network n, int epoch) {
        return std::make_shared<const FeaturePredictor>(labels, PredictorDescriptor{name, seed, epoch}, spec,
                                                        std::move(n));
    };
    const auto probe = make(Network(net.input_dim(), hidden, K), 0);
    std::vector<SparseFeatures> train_x, dev_x;
    train_x.reserve(train_inputs.size());
    for (const auto& s : train_inputs) train_x.push_back(probe->features(s));
    dev_x.reserve(dev_inputs.size());
    for (const auto& s : dev_inputs) dev_x.push_back(probe->features(s));

    const std::size_t out0 = net.layer_out(0);
    const std::size_t dense_begin = net.bias_offset(0);  // everything after the sparse input weights
    Optimizer opt(net, spec.optimizer);
    std::vector<double> grad(net.params().size(), 0.0);
    std::vector<char> row_touched(net.input_dim(), 0);
    std::vector<std::uint32_t> rows;
    std::vector<std::vector<double>> acts;

    std::vector<std::size_t> order(train_x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    FitResult result;
    double best = std::numeric_limits<double>::infinity();
    Network best_net = net;
    int best_epoch = 0;
    const std::size_t bs = spec.optimizer.batch_size;

    for (int epoch = 1; epoch <= spec.optimizer.max_epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t end = std::min(order.size(), start + bs);
            const double inv = 1.0 / static_cast<double>(end - start);
            rows.clear();
            for (std::size_t b = start; b < end; ++b) {
                const auto& x = train_x[order[b]];
                const LabelIndex y = train_gold[order[b]];
                const auto logits = net.forward(x, &acts);
                const auto probs = CategoricalDistribution::from_logits(logits, 0.0).probs();
                std::vector<double> delta(K);
                for (std::size_t k = 0; k < K; ++k)
                    delta[k] = (probs[k] - (static_cast<LabelIndex>(k) == y ? 1.0 : 0.0)) * inv;

                for (std::size_t l = net.num_layers(); l-- > 0;) {
                    const std::size_t n_out = net.layer_out(l);
                    double* gb = grad.data() + net.bias_offset(l);
                    for (std::size_t o = 0; o < n_out; ++o) gb[o] += delta[o];
                    if (l == 0) {
                        for (std::size_t k = 0; k < x.size(); ++k) {
                            const auto r = x.index[k];
                            if (!row_touched[r]) {
                                row_touched[r] = 1;
                                rows.push_back(r);
                            }
                            double* gw = grad.data() + net.weight_offset(0) + static_cast<std::size_t>(r) * out0;
                            for (std::size_t o = 0; o < n_out; ++o) gw[o] += x.value[k] * delta[o];
                        }
                        break;
                    }
                    const auto& a = acts[l - 1];
                    const std::size_t in = net.layer_in(l);
                    std::vector<double> prev(in, 0.0);
                    const double* w = net.params().data() + net.weight_offset(l);
                    double* gw = grad.data() + net.weight_offset(l);
                    for (std::size_t i = 0; i < in; ++i) {
                        if (a[i] <= 0.0) continue;
                        double acc = 0.0;
                        for (std::size_t o = 0; o < n_out; ++o) {
                            gw[i * n_out + o] += a[i] * delta[o];
                            acc += w[i * n_out + o] * delta[o];
                        }
                        prev[i] = acc;
                    }
                    delta = std::move(prev);
                }
            }
            std::sort(rows.begin(), rows.end());
            opt.update(net.params(), grad, rows, out0, dense_begin);
            for (auto r : rows) {
                row_touched[r] = 0;
                std::fill_n(grad.begin() + static_cast<std::ptrdiff_t>(net.weight_offset(0) + r * out0), out0, 0.0);
            }
            std::fill(grad.begin() + static_cast<std::ptrdiff_t>(dense_begin), grad.end(), 0.0);
        }

        const auto current = make(net, epoch);
        const double ce = mean_entropy_bits(*current, dev_x, dev_gold);
        result.dev_entropy.push_back(ce);
        if (ce < best) {
            best = ce;
            best_net = net;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= spec.optimizer.early_stop_patience) {
            break;
        }
    }
    result.selected_epoch = best_epoch;
    result.predictor = make(std::move(best_net), best_epoch);
    return result;
}

TrainedPair train_pair(const FamilySpec& spec, const Dataset& train, const Dataset& dev,
                       std::optional<std::span<const std::string>> fields) {
    if (dev.empty()) throw EmptyInputError("dev set is empty");
    if (train.empty()) throw EmptyInputError("training set is empty");
    for (const auto& l : dev.label_space.labels()) {
        if (!train.label_space.find(l))
            throw ValidationError("dev label '" + l + "' is absent from the training label space");
    }
    if (dev.label_space != train.label_space) throw ValidationError("train and dev label spaces differ in order");
    if (dev.schema != train.schema) throw ValidationError("train and dev schemas differ");

    TrainedPair pair;
    pair.spec = spec;
    pair.fields = fields ? std::vector<std::string>(fields->begin(), fields->end()) : train.schema;
    for (const auto& f : pair.fields)
        if (std::find(train.schema.begin(), train.schema.end(), f) == train.schema.end())
            throw ConfigError("field '" + f + "' is not in the schema");

    std::vector<std::string> train_x, dev_x, train_null(train.size()), dev_null(dev.size());
    std::vector<LabelIndex> train_y, dev_y;
    for (const auto& inst : train.instances) {
        train_x.push_back(serialize(inst, pair.fields));
        train_y.push_back(inst.gold);
    }
    for (const auto& inst : dev.instances) {
        dev_x.push_back(serialize(inst, pair.fields));
        dev_y.push_back(inst.gold);
    }

    auto with_input = fit_predictor(spec, train.label_space, train_x, train_y, dev_x, dev_y,
                                    mix_seed(spec.seed, "g_prime"), std::string(family_kind_name(spec.kind)) + ":g_prime");
    auto null_input = fit_predictor(spec, train.label_space, train_null, train_y, dev_null, dev_y,
                                    mix_seed(spec.seed, "g"), std::string(family_kind_name(spec.kind)) + ":g");
    pair.g_prime = std::move(with_input.predictor);
    pair.g = std::move(null_input.predictor);
    pair.metadata.selected_epoch_g_prime = with_input.selected_epoch;
    pair.metadata.selected_epoch_g = null_input.selected_epoch;
    pair.metadata.dev_entropy_g_prime = std::move(with_input.dev_entropy);
    pair.metadata.dev_entropy_g = std::move(null_input.dev_entropy);
    pair.metadata.seed = spec.seed;
    return pair;
}

PviAnalysis compute_all(const TrainedPair& pair, const Dataset& data) {
    return compute_all(*pair.g, *pair.g_prime, data, std::span<const std::string>(pair.fields));
}

}  // namespace vinfo
