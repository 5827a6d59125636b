#include "vinfo/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "vinfo/error.hpp"

namespace vinfo {

LabelSpace::LabelSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("label space must not be empty");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw ValidationError("duplicate label '" + l + "' in label space");
    }
}

const std::string& LabelSpace::name(LabelIndex i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= labels_.size())
        throw ValidationError("label index " + std::to_string(i) + " out of range");
    return labels_[static_cast<std::size_t>(i)];
}

std::optional<LabelIndex> LabelSpace::find(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<LabelIndex>(it - labels_.begin());
}

LabelIndex LabelSpace::index_of(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw ValidationError("unknown label '" + std::string(label) + "'");
}

std::string_view split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::dev: return "dev";
        case Split::test: return "test";
    }
    return "train";
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::train;
    if (s == "dev") return Split::dev;
    if (s == "test") return Split::test;
    throw ValidationError("unknown split '" + std::string(s) + "'");
}

void Dataset::validate() const {
    if (label_space.empty()) throw ValidationError("dataset has an empty label space");
    std::unordered_set<std::string> names(schema.begin(), schema.end());
    if (names.size() != schema.size()) throw ValidationError("duplicate field name in schema");
    std::unordered_set<std::string> ids;
    for (const auto& inst : instances) {
        if (!ids.insert(inst.id).second) throw ValidationError("duplicate instance id '" + inst.id + "'");
        if (inst.gold < 0 || static_cast<std::size_t>(inst.gold) >= label_space.size())
            throw ValidationError("instance '" + inst.id + "' has gold label outside the label space");
        for (const auto& f : schema) {
            if (!inst.fields.contains(f))
                throw ValidationError("instance '" + inst.id + "' is missing field '" + f + "'");
        }
        for (const auto& [k, v] : inst.fields) {
            if (!names.contains(k))
                throw ValidationError("instance '" + inst.id + "' has field '" + k + "' not in schema");
        }
    }
}

void require_compatible(const Dataset& a, const Dataset& b) {
    if (a.schema != b.schema) throw ValidationError("datasets have different schemas");
    if (a.label_space != b.label_space) throw ValidationError("datasets have different label spaces");
}

}  // namespace vinfo
