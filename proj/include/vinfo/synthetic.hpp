#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/families.hpp"

namespace vinfo {

enum class PlantedLayout {
    single,  // one "text" field
    nli,     // "premise" + "hypothesis"; the trigger sits in the hypothesis
};

// Datasets whose label depends only on one planted trigger token per instance.
//
// Each instance carries exactly one trigger; trigger classes are assigned
// round-robin so classes are exactly balanced. Within every trigger class exactly
// round(flip_rate * count) instances get a label drawn round-robin from the other
// classes. Fillers are uniform over a vocabulary disjoint from the triggers and
// carry no label information.
//
// In the nli layout, premises are fillers only. Hypotheses for class-0 triggers
// additionally copy 1-3 premise tokens; all other hypotheses share no token with
// their premise, so overlap length is informative about class 0 only.
struct PlantedSpec {
    std::size_t n = 10000;   // training instances
    std::size_t dev_n = 0;   // 0: n / 2
    std::size_t test_n = 0;  // 0: n / 2
    std::size_t vocab_size = 2000;
    double flip_rate = 0.1;
    std::size_t n_classes = 2;
    std::size_t triggers_per_class = 1;
    std::size_t min_filler = 4;
    std::size_t max_filler = 12;
    PlantedLayout layout = PlantedLayout::single;
    std::uint64_t seed = 0;

    void validate() const;
};

struct PlantedData {
    Dataset train, dev, test;
    double true_info_bits = 0.0;
    std::vector<std::vector<std::string>> triggers;  // per class
};

// Closed-form I(X;Y) in bits for the planted construction:
// log2 K - H(1 - flip, flip / (K-1) spread over the other classes).
double planted_information_bits(std::size_t n_classes, double flip_rate);

PlantedData generate_planted(const PlantedSpec& spec);

// Random filler text with labels drawn uniformly and independently of it.
Dataset generate_independent(std::size_t n, std::size_t n_classes, std::uint64_t seed,
                             Split split = Split::train, std::size_t vocab_size = 2000);

struct SweepRow {
    double fraction = 0.0;
    std::size_t sample_size = 0;
    std::size_t repeats = 0;
    double mean_bits = 0.0;
    double std_bits = 0.0;
    bool flagged = false;  // sample smaller than 2 * n_classes
    std::string error;     // empty unless every repeat failed
};

// Learning curve: per fraction, `repeats` training sets drawn with
// replacement, each trained and evaluated on the fixed `eval`. Fraction 1.0 uses
// the training set as given; its repeats vary only the training seed, and repeat 0
// uses the family seed unchanged.
std::vector<SweepRow> fraction_sweep(const FamilySpec& family, const Dataset& train, const Dataset& dev,
                                     const Dataset& eval, const std::vector<double>& fractions, std::size_t repeats,
                                     std::uint64_t seed);

}  // namespace vinfo
