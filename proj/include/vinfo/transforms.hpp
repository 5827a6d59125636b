#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/families.hpp"

namespace vinfo {

enum class TransformKind { identity, shuffle, select_fields, overlap_mask, token_filter, token_remap, sentence_encrypt };

std::string_view transform_kind_name(TransformKind k);
TransformKind parse_transform_kind(std::string_view s);

struct TransformSpec {
    TransformKind kind = TransformKind::identity;
    std::optional<std::uint64_t> seed;   // shuffle, token_remap, sentence_encrypt
    std::vector<std::string> fields;     // select_fields: kept; overlap_mask: the pair; token_filter: filtered (all if empty)
    std::string mask_token = "[MASK]";   // overlap_mask
    std::vector<std::string> allowlist;  // token_filter; entries may span several tokens

    // Human-readable row label, e.g. "select_fields(hypothesis)".
    std::string name() const;
    // Checks kind-specific parameters against a schema. Throws ConfigError.
    void validate(const std::vector<std::string>& schema) const;
};

// Returns a dataset with identical ids, labels and label space; only field text
// (and, for select_fields, the schema) changes. Stochastic kinds derive their
// randomness from (seed, instance id), so instance order never matters.
Dataset apply(const TransformSpec& t, const Dataset& data);

// Reads one allowlist entry per line; blank lines and '#' comments are skipped.
std::vector<std::string> load_allowlist(const std::string& path);

struct AttributeRow {
    std::string transform;
    double v_information_bits = 0.0;
    double std_err = 0.0;
    std::size_t n = 0;
    std::optional<std::string> error;  // set when this row failed; other rows are unaffected
};

inline constexpr std::string_view kAttributeReportNote =
    "transformed inputs are re-trained from scratch; a transformation can make information more usable, "
    "so a row may exceed the identity row";

// One row per transform, with an identity row first if the list lacks one. Each
// transform is applied to train, dev and eval alike and a fresh pair is trained.
std::vector<AttributeRow> attribute_report(const std::vector<TransformSpec>& specs, const FamilySpec& family,
                                           const Dataset& train, const Dataset& dev, const Dataset& eval);

}  // namespace vinfo
