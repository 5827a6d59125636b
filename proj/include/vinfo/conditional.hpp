#pragma once

#include <string>
#include <vector>

#include "vinfo/dataset.hpp"
#include "vinfo/families.hpp"

namespace vinfo {

struct ConditionalVInfo {
    double bits = 0.0;              // H(Y|B) - H(Y|B u {X}) on eval
    EntropyEstimate given_b;        // H(Y|B)
    EntropyEstimate given_b_and_x;  // H(Y|B u {X})
    int selected_epoch_b = 0;
    int selected_epoch_bx = 0;
};

// Usable information in `x_fields` beyond what `b_fields` already carry. Trains one
// predictor on the serialized B fields and one on B u X (schema order), both
// selected on dev, and evaluates on eval. Empty `b_fields` conditions on the null input.
ConditionalVInfo conditional_v_information(const FamilySpec& family, const Dataset& train, const Dataset& dev,
                                           const Dataset& eval, const std::vector<std::string>& b_fields,
                                           const std::vector<std::string>& x_fields);

}  // namespace vinfo
