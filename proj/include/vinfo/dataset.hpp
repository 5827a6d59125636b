#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vinfo {

using LabelIndex = int;

// Ordered set of label identifiers. Index order is fixed once constructed.
class LabelSpace {
public:
    LabelSpace() = default;
    explicit LabelSpace(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::string& name(LabelIndex i) const;
    std::optional<LabelIndex> find(std::string_view label) const;
    LabelIndex index_of(std::string_view label) const;  // throws ValidationError
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const LabelSpace&) const = default;

private:
    std::vector<std::string> labels_;
};

struct Instance {
    std::string id;
    std::map<std::string, std::string> fields;
    LabelIndex gold = 0;

    bool operator==(const Instance&) const = default;
};

enum class Split { train, dev, test };

std::string_view split_name(Split s);
Split parse_split(std::string_view s);

struct Dataset {
    std::vector<std::string> schema;
    LabelSpace label_space;
    std::vector<Instance> instances;
    Split split = Split::train;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }

    // Checks schema conformance, id uniqueness and gold ranges.
    void validate() const;

    bool operator==(const Dataset&) const = default;
};

// Throws ValidationError unless both datasets share schema and label space.
void require_compatible(const Dataset& a, const Dataset& b);

}  // namespace vinfo
