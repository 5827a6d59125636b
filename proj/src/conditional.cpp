#include "vinfo/conditional.hpp"

#include <algorithm>

#include "vinfo/error.hpp"
#include "vinfo/random.hpp"
#include "vinfo/text.hpp"

namespace vinfo {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

FitResult fit_on_fields(const FamilySpec& family, const Dataset& train, const Dataset& dev,
                        const std::vector<std::string>& fields, std::string_view tag) {
    std::vector<std::string> tx, dx;
    std::vector<LabelIndex> ty, dy;
    for (const auto& inst : train.instances) {
        tx.push_back(serialize(inst, fields));
        ty.push_back(inst.gold);
    }
    for (const auto& inst : dev.instances) {
        dx.push_back(serialize(inst, fields));
        dy.push_back(inst.gold);
    }
    return fit_predictor(family, train.label_space, tx, ty, dx, dy, mix_seed(family.seed, tag),
                         std::string(family_kind_name(family.kind)) + ":" + std::string(tag));
}

}  // namespace

ConditionalVInfo conditional_v_information(const FamilySpec& family, const Dataset& train, const Dataset& dev,
                                           const Dataset& eval, const std::vector<std::string>& b_fields,
                                           const std::vector<std::string>& x_fields) {
    require_compatible(train, dev);
    require_compatible(train, eval);
    if (x_fields.empty()) throw ConfigError("x_fields must not be empty");
    for (const auto& f : b_fields) {
        if (!contains(train.schema, f)) throw ConfigError("conditioning field '" + f + "' is not in the schema");
        if (contains(x_fields, f)) throw ConfigError("field '" + f + "' appears in both b_fields and x_fields");
    }
    for (const auto& f : x_fields)
        if (!contains(train.schema, f)) throw ConfigError("input field '" + f + "' is not in the schema");

    std::vector<std::string> b_ordered, bx_ordered;
    for (const auto& f : train.schema) {
        if (contains(b_fields, f)) b_ordered.push_back(f);
        if (contains(b_fields, f) || contains(x_fields, f)) bx_ordered.push_back(f);
    }

    const auto given_b = fit_on_fields(family, train, dev, b_ordered, "given_b");
    const auto given_bx = fit_on_fields(family, train, dev, bx_ordered, "given_bx");

    ConditionalVInfo out;
    out.given_b = conditional_entropy(*given_b.predictor, eval, std::span<const std::string>(b_ordered));
    out.given_b_and_x = conditional_entropy(*given_bx.predictor, eval, std::span<const std::string>(bx_ordered));
    out.bits = out.given_b.bits - out.given_b_and_x.bits;
    out.selected_epoch_b = given_b.selected_epoch;
    out.selected_epoch_bx = given_bx.selected_epoch;
    return out;
}

}  // namespace vinfo
