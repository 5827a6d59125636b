#include "vinfo/estimation.hpp"

#include <cmath>

#include "vinfo/error.hpp"
#include "vinfo/text.hpp"

namespace vinfo {
namespace {

void require_non_empty(const Dataset& data) {
    if (data.empty()) throw EmptyInputError("dataset is empty");
}

void require_labels(const Predictor& p, const Dataset& data) {
    if (p.label_space() != data.label_space)
        throw ConfigError("predictor '" + p.descriptor().family + "' label space does not match the dataset");
}

}  // namespace

EntropyEstimate mean_with_std_err(std::span<const double> terms) {
    if (terms.empty()) throw EmptyInputError("no terms to average");
    EntropyEstimate e;
    e.n = terms.size();
    double sum = 0.0;
    for (double t : terms) sum += t;
    e.bits = sum / static_cast<double>(e.n);
    if (e.n > 1) {
        double ss = 0.0;
        for (double t : terms) ss += (t - e.bits) * (t - e.bits);
        e.std_err = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
    }
    return e;
}

EntropyEstimate label_entropy(const Predictor& g, const Dataset& data) {
    require_non_empty(data);
    require_labels(g, data);
    const auto null_dist = g.predict(kNullInput);
    std::vector<double> terms;
    terms.reserve(data.size());
    for (const auto& inst : data.instances) terms.push_back(-null_dist.log2_prob(inst.gold));
    return mean_with_std_err(terms);
}

EntropyEstimate conditional_entropy(const Predictor& g_prime, const Dataset& data,
                                    std::optional<std::span<const std::string>> fields) {
    require_non_empty(data);
    require_labels(g_prime, data);
    const std::span<const std::string> used = fields ? *fields : std::span<const std::string>(data.schema);
    std::vector<double> terms;
    terms.reserve(data.size());
    for (const auto& inst : data.instances)
        terms.push_back(-g_prime.predict(serialize(inst, used)).log2_prob(inst.gold));
    return mean_with_std_err(terms);
}

void require_same_labels(const Predictor& g, const Predictor& g_prime, const Dataset& data) {
    if (g.label_space() != g_prime.label_space())
        throw ConfigError("predictors have mismatched label spaces");
    require_labels(g, data);
}

PviRecord pvi(const Predictor& g, const Predictor& g_prime, const Instance& inst, std::span<const std::string> fields) {
    const auto with_input = g_prime.predict(serialize(inst, fields));
    const auto without = g.predict(kNullInput);
    PviRecord r;
    r.id = inst.id;
    r.gold = inst.gold;
    r.logp_x_bits = with_input.log2_prob(inst.gold);
    r.logp_null_bits = without.log2_prob(inst.gold);
    r.pvi_bits = r.logp_x_bits - r.logp_null_bits;
    r.predicted = with_input.argmax();
    r.correct = r.predicted == r.gold;
    return r;
}

double v_information(const Predictor& g, const Predictor& g_prime, const Dataset& data) {
    return compute_all(g, g_prime, data).summary.v_information_bits;
}

PviSummary summarize(std::span<const PviRecord> records) {
    if (records.empty()) throw EmptyInputError("no PVI records");
    std::vector<double> pvis, null_terms, x_terms;
    pvis.reserve(records.size());
    null_terms.reserve(records.size());
    x_terms.reserve(records.size());
    for (const auto& r : records) {
        pvis.push_back(r.pvi_bits);
        null_terms.push_back(-r.logp_null_bits);
        x_terms.push_back(-r.logp_x_bits);
    }
    PviSummary s;
    const auto pv = mean_with_std_err(pvis);
    s.n = pv.n;
    s.v_information_bits = pv.bits;
    s.std_err = pv.std_err;
    s.label_entropy = mean_with_std_err(null_terms);
    s.conditional_entropy = mean_with_std_err(x_terms);
    return s;
}

PviAnalysis compute_all(const Predictor& g, const Predictor& g_prime, const Dataset& data,
                        std::optional<std::span<const std::string>> fields) {
    require_non_empty(data);
    require_same_labels(g, g_prime, data);
    const std::span<const std::string> used = fields ? *fields : std::span<const std::string>(data.schema);
    const auto null_dist = g.predict(kNullInput);

    PviAnalysis out;
    out.records.reserve(data.size());
    for (const auto& inst : data.instances) {
        const auto with_input = g_prime.predict(serialize(inst, used));
        PviRecord r;
        r.id = inst.id;
        r.gold = inst.gold;
        r.logp_x_bits = with_input.log2_prob(inst.gold);
        r.logp_null_bits = null_dist.log2_prob(inst.gold);
        r.pvi_bits = r.logp_x_bits - r.logp_null_bits;
        r.predicted = with_input.argmax();
        r.correct = r.predicted == r.gold;
        out.records.push_back(std::move(r));
    }
    out.summary = summarize(out.records);
    return out;
}

}  // namespace vinfo
