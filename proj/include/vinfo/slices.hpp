#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/estimation.hpp"
#include "vinfo/predictor.hpp"

namespace vinfo {

struct SliceSpec {
    std::string name;
    std::function<bool(const Instance&, const PviRecord&)> contains;

    static SliceSpec whole();
    static SliceSpec by_class(const LabelSpace& labels, const std::string& label);
    // Instances whose overlap_length(premise_field, hypothesis_field) lies in [lo, hi].
    static SliceSpec overlap_bin(std::string premise_field, std::string hypothesis_field, std::size_t lo,
                                 std::size_t hi);
    static SliceSpec id_list(std::string name, std::unordered_set<std::string> ids);
    // Instances whose external scalar (e.g. annotator agreement) lies in [lo, hi].
    static SliceSpec scalar_range(std::string name, std::map<std::string, double> values, double lo, double hi);
};

// Number of tokens of `hypothesis_field` (punctuation split, case-folded) that also
// occur in `premise_field`.
std::size_t overlap_length(const Instance& inst, const std::string& premise_field, const std::string& hypothesis_field);

struct SliceRow {
    std::string slice;
    std::size_t n = 0;
    double mean_pvi_bits = 0.0;  // NaN for an empty slice
    bool flagged = false;        // n < min_slice_n
};

inline constexpr std::string_view kSliceNote =
    "mean PVI of a slice measures its difficulty relative to the full training distribution; "
    "it is not the V-information of the slice";

inline constexpr std::size_t kDefaultMinSliceN = 30;

std::vector<SliceRow> slice_mean_pvi(std::span<const PviRecord> records, const Dataset& data,
                                     const std::vector<SliceSpec>& slices, std::size_t min_slice_n = kDefaultMinSliceN);

struct GapReport {
    double gap_bits = 0.0;  // mean_correct - mean_incorrect
    double mean_correct = 0.0;
    double mean_incorrect = 0.0;
    std::size_t n_correct = 0;
    std::size_t n_incorrect = 0;
    double t_statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    // Upper edge of the highest 0.25-bit PVI bin whose accuracy is below 50%.
    std::optional<double> crossover_bits;
};

inline constexpr double kCrossoverBinWidth = 0.25;

GapReport correct_incorrect_gap(std::span<const PviRecord> records);

struct TokenArtefact {
    std::string token;
    LabelIndex label = 0;
    double delta_bits = 0.0;  // mean increase in conditional entropy when the token is removed
    std::size_t count = 0;    // slice instances containing the token

    bool operator==(const TokenArtefact&) const = default;
};

inline constexpr std::size_t kDefaultMinCount = 20;
inline constexpr std::size_t kDefaultTopK = 10;

// Removes every whitespace token equal to `token` from each field.
Instance remove_token(const Instance& inst, const std::string& token);

// -log2 g'[x without token](y) + log2 g'[x](y) for one instance.
double loo_delta(const Predictor& g_prime, const Instance& inst, const std::string& token,
                 std::span<const std::string> fields);

// Leave-one-out token artefacts for class `label`, using g' unchanged. Candidates are
// the whitespace tokens of the class's instances; all occurrences are removed.
// Sorted by delta (descending), then token.
std::vector<TokenArtefact> loo_artefacts(const Predictor& g_prime, const Dataset& data, LabelIndex label,
                                         std::size_t min_count = kDefaultMinCount, std::size_t top_k = kDefaultTopK,
                                         std::optional<std::span<const std::string>> fields = std::nullopt);

// Pearson r over id-aligned pvi_bits. Pairs are ordered by id, so the result is
// exactly symmetric in its arguments.
double pvi_correlation(std::span<const PviRecord> a, std::span<const PviRecord> b);
// Same, against an external per-id scalar such as annotator agreement.
double pvi_correlation(std::span<const PviRecord> a, const std::map<std::string, double>& scalar);

}  // namespace vinfo
