#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinfo/families.hpp"
#include "vinfo/slices.hpp"
#include "vinfo/synthetic.hpp"
#include "vinfo/transforms.hpp"

namespace vinfo {

nlohmann::json to_json(const FeatureSpec& f);
nlohmann::json to_json(const FamilySpec& f);
nlohmann::json to_json(const TransformSpec& t);
nlohmann::json to_json(const PlantedSpec& p);

// Unknown keys are rejected so typos surface as ConfigError.
FeatureSpec feature_spec_from_json(const nlohmann::json& j);
// Missing keys take the defaults of the family kind.
FamilySpec family_spec_from_json(const nlohmann::json& j);
TransformSpec transform_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PlantedSpec planted_spec_from_json(const nlohmann::json& j);

// Declarative slice definition; resolved against a dataset's label space at run time.
struct SliceConfig {
    std::string kind;  // all | class | overlap | ids | scalar
    std::string name;
    std::string label;                        // class
    std::string premise_field = "premise";    // overlap
    std::string hypothesis_field = "hypothesis";
    std::size_t lo = 0, hi = 0;               // overlap (inclusive; hi absent means unbounded)
    std::filesystem::path path;               // ids: one id per line; scalar: id,value CSV
    double min = 0.0, max = 0.0;              // scalar

    SliceSpec resolve(const Dataset& data) const;
};

struct RunConfig {
    std::filesystem::path base_dir;  // relative paths resolve against this
    std::optional<std::filesystem::path> train, dev, test;
    std::uint64_t seed = 0;
    FamilySpec family;
    std::vector<TransformSpec> transforms;
    std::vector<SliceConfig> slices;
    std::size_t min_slice_n = kDefaultMinSliceN;
    std::optional<std::string> artefact_class;
    std::size_t min_count = kDefaultMinCount;
    std::size_t top_k = kDefaultTopK;
    std::vector<double> fractions{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::size_t repeats = 3;
    std::vector<std::string> b_fields, x_fields;  // conditional V-information, optional
    std::optional<PlantedSpec> synth;
    bool synth_independent = false;
    std::filesystem::path output_dir = "out";

    // Re-derives every seed (family, stochastic transforms, synth) from `seed`.
    void apply_seed(std::uint64_t new_seed);
};

// Seed is required. Paths are resolved against the config file's directory and
// checked for existence.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace vinfo
