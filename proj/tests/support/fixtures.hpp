#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/predictor.hpp"

namespace vinfo::testing {

// Looks up a fixed distribution per serialized input, falling back to `other`.
class TablePredictor final : public Predictor {
public:
    TablePredictor(LabelSpace labels, std::map<std::string, std::vector<double>> table, std::vector<double> other)
        : Predictor(std::move(labels), {"table", 0, 0}), table_(std::move(table)), other_(std::move(other)) {}

    CategoricalDistribution predict(std::string_view input) const override {
        auto it = table_.find(std::string(input));
        return CategoricalDistribution::from_probs(it == table_.end() ? other_ : it->second);
    }

private:
    std::map<std::string, std::vector<double>> table_;
    std::vector<double> other_;
};

inline Instance make_instance(std::string id, std::string text, LabelIndex gold) {
    return Instance{std::move(id), {{"text", std::move(text)}}, gold};
}

inline Dataset text_dataset(std::vector<std::string> labels, std::vector<std::pair<std::string, LabelIndex>> rows,
                            Split split = Split::train) {
    Dataset d;
    d.schema = {"text"};
    d.label_space = LabelSpace(std::move(labels));
    d.split = split;
    for (std::size_t i = 0; i < rows.size(); ++i)
        d.instances.push_back(make_instance("i" + std::to_string(i), rows[i].first, rows[i].second));
    return d;
}

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace vinfo::testing
