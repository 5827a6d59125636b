#include "vinfo/slices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "vinfo/error.hpp"
#include "vinfo/stats.hpp"
#include "vinfo/text.hpp"

namespace vinfo {

// ---------------------------------------------------------------------------
// Slices

SliceSpec SliceSpec::whole() {
    return {"all", [](const Instance&, const PviRecord&) { return true; }};
}

SliceSpec SliceSpec::by_class(const LabelSpace& labels, const std::string& label) {
    const LabelIndex idx = labels.index_of(label);
    return {"class=" + label, [idx](const Instance& inst, const PviRecord&) { return inst.gold == idx; }};
}

SliceSpec SliceSpec::overlap_bin(std::string premise_field, std::string hypothesis_field, std::size_t lo,
                                 std::size_t hi) {
    std::string name = "overlap=" + std::to_string(lo);
    if (hi != lo) name += hi == std::numeric_limits<std::size_t>::max() ? "+" : "-" + std::to_string(hi);
    return {std::move(name), [p = std::move(premise_field), h = std::move(hypothesis_field), lo, hi](
                                 const Instance& inst, const PviRecord&) {
                const auto len = overlap_length(inst, p, h);
                return len >= lo && len <= hi;
            }};
}

SliceSpec SliceSpec::id_list(std::string name, std::unordered_set<std::string> ids) {
    return {std::move(name),
            [ids = std::move(ids)](const Instance& inst, const PviRecord&) { return ids.contains(inst.id); }};
}

SliceSpec SliceSpec::scalar_range(std::string name, std::map<std::string, double> values, double lo, double hi) {
    return {std::move(name), [values = std::move(values), lo, hi](const Instance& inst, const PviRecord&) {
                auto it = values.find(inst.id);
                return it != values.end() && it->second >= lo && it->second <= hi;
            }};
}

std::size_t overlap_length(const Instance& inst, const std::string& premise_field,
                           const std::string& hypothesis_field) {
    const TokenizeOptions opts{.lowercase = true, .split_punctuation = true};
    auto pf = inst.fields.find(premise_field);
    auto hf = inst.fields.find(hypothesis_field);
    if (pf == inst.fields.end() || hf == inst.fields.end())
        throw ValidationError("instance '" + inst.id + "' lacks an overlap field");
    const auto premise = tokenize(pf->second, opts);
    const std::unordered_set<std::string> in_premise(premise.begin(), premise.end());
    std::size_t n = 0;
    for (const auto& t : tokenize(hf->second, opts)) n += in_premise.contains(t) ? 1 : 0;
    return n;
}

std::vector<SliceRow> slice_mean_pvi(std::span<const PviRecord> records, const Dataset& data,
                                     const std::vector<SliceSpec>& slices, std::size_t min_slice_n) {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < data.size(); ++i) by_id.emplace(data.instances[i].id, i);
    if (records.size() != data.size()) throw ValidationError("records and dataset differ in size");
    for (const auto& r : records)
        if (!by_id.contains(r.id)) throw ValidationError("record id '" + r.id + "' not found in dataset");

    std::vector<SliceRow> rows;
    for (const auto& slice : slices) {
        SliceRow row;
        row.slice = slice.name;
        double sum = 0.0;
        for (const auto& r : records) {
            if (!slice.contains(data.instances[by_id.at(r.id)], r)) continue;
            sum += r.pvi_bits;
            ++row.n;
        }
        row.mean_pvi_bits = row.n ? sum / static_cast<double>(row.n) : std::numeric_limits<double>::quiet_NaN();
        row.flagged = row.n < min_slice_n;
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Correct / incorrect gap

GapReport correct_incorrect_gap(std::span<const PviRecord> records) {
    std::vector<double> correct, incorrect;
    for (const auto& r : records) {
        if (r.predicted < 0) throw ValidationError("record '" + r.id + "' has no predicted label");
        (r.correct ? correct : incorrect).push_back(r.pvi_bits);
    }
    if (correct.empty()) throw UndefinedError("gap undefined: the correctly predicted group is empty");
    if (incorrect.empty()) throw UndefinedError("gap undefined: the incorrectly predicted group is empty");

    GapReport g;
    g.n_correct = correct.size();
    g.n_incorrect = incorrect.size();
    g.mean_correct = mean_with_std_err(correct).bits;
    g.mean_incorrect = mean_with_std_err(incorrect).bits;
    g.gap_bits = g.mean_correct - g.mean_incorrect;
    const auto w = welch_t_test(correct, incorrect);
    g.t_statistic = w.t;
    g.df = w.df;
    g.p_value = w.p_value;

    std::map<long long, std::pair<std::size_t, std::size_t>> bins;  // bin -> (correct, total)
    for (const auto& r : records) {
        const auto b = static_cast<long long>(std::floor(r.pvi_bits / kCrossoverBinWidth));
        auto& [c, t] = bins[b];
        c += r.correct ? 1 : 0;
        ++t;
    }
    for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
        const auto [c, t] = it->second;
        if (2 * c < t) {
            g.crossover_bits = static_cast<double>(it->first + 1) * kCrossoverBinWidth;
            break;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Leave-one-out artefacts

Instance remove_token(const Instance& inst, const std::string& token) {
    Instance out = inst;
    for (auto& [name, text] : out.fields) {
        auto toks = tokenize(text, {.lowercase = false});
        std::erase(toks, token);
        text = join(toks);
    }
    return out;
}

double loo_delta(const Predictor& g_prime, const Instance& inst, const std::string& token,
                 std::span<const std::string> fields) {
    const double base = g_prime.predict(serialize(inst, fields)).log2_prob(inst.gold);
    const double removed = g_prime.predict(serialize(remove_token(inst, token), fields)).log2_prob(inst.gold);
    return -removed + base;
}

std::vector<TokenArtefact> loo_artefacts(const Predictor& g_prime, const Dataset& data, LabelIndex label,
                                         std::size_t min_count, std::size_t top_k,
                                         std::optional<std::span<const std::string>> fields) {
    if (label < 0 || static_cast<std::size_t>(label) >= data.label_space.size())
        throw ValidationError("class index out of range");
    if (g_prime.label_space() != data.label_space) throw ConfigError("predictor label space does not match dataset");
    const std::span<const std::string> used = fields ? *fields : std::span<const std::string>(data.schema);

    std::vector<const Instance*> slice;
    for (const auto& inst : data.instances)
        if (inst.gold == label) slice.push_back(&inst);
    if (slice.empty())
        throw EmptyInputError("class '" + data.label_space.name(label) + "' has no instances");

    // token -> positions (into `slice`) of instances containing it
    std::map<std::string, std::vector<std::size_t>> occurrences;
    for (std::size_t i = 0; i < slice.size(); ++i) {
        std::unordered_set<std::string> seen;
        for (const auto& f : used)
            for (auto& t : tokenize(slice[i]->fields.at(f), {.lowercase = false})) seen.insert(std::move(t));
        for (const auto& t : seen) occurrences[t].push_back(i);
    }

    std::vector<double> base(slice.size());
    for (std::size_t i = 0; i < slice.size(); ++i)
        base[i] = g_prime.predict(serialize(*slice[i], used)).log2_prob(slice[i]->gold);

    std::vector<TokenArtefact> out;
    for (const auto& [token, members] : occurrences) {
        if (members.size() < min_count) continue;
        double sum = 0.0;
        for (auto i : members) {
            const auto reduced = remove_token(*slice[i], token);
            sum += -g_prime.predict(serialize(reduced, used)).log2_prob(slice[i]->gold) + base[i];
        }
        out.push_back({token, label, sum / static_cast<double>(members.size()), members.size()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.delta_bits != b.delta_bits) return a.delta_bits > b.delta_bits;
        return a.token < b.token;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
}

// ---------------------------------------------------------------------------
// Correlation

namespace {

double correlate_sorted(std::vector<std::pair<std::string, std::pair<double, double>>> pairs) {
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> x, y;
    for (const auto& [id, v] : pairs) {
        x.push_back(v.first);
        y.push_back(v.second);
    }
    return pearson(x, y);
}

[[noreturn]] void throw_missing(const std::vector<std::string>& missing, std::string_view where) {
    std::string msg = "id mismatch: " + std::to_string(missing.size()) + " id(s) missing from " + std::string(where) + ":";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw ValidationError(msg);
}

}  // namespace

double pvi_correlation(std::span<const PviRecord> a, std::span<const PviRecord> b) {
    std::unordered_map<std::string, double> bm;
    for (const auto& r : b) bm.emplace(r.id, r.pvi_bits);
    std::unordered_set<std::string> aids;
    std::vector<std::string> missing_b, missing_a;
    std::vector<std::pair<std::string, std::pair<double, double>>> pairs;
    for (const auto& r : a) {
        aids.insert(r.id);
        auto it = bm.find(r.id);
        if (it == bm.end()) missing_b.push_back(r.id);
        else pairs.push_back({r.id, {r.pvi_bits, it->second}});
    }
    for (const auto& r : b)
        if (!aids.contains(r.id)) missing_a.push_back(r.id);
    if (!missing_b.empty()) throw_missing(missing_b, "second input");
    if (!missing_a.empty()) throw_missing(missing_a, "first input");
    return correlate_sorted(std::move(pairs));
}

double pvi_correlation(std::span<const PviRecord> a, const std::map<std::string, double>& scalar) {
    std::vector<std::string> missing;
    std::vector<std::pair<std::string, std::pair<double, double>>> pairs;
    for (const auto& r : a) {
        auto it = scalar.find(r.id);
        if (it == scalar.end()) missing.push_back(r.id);
        else pairs.push_back({r.id, {r.pvi_bits, it->second}});
    }
    if (!missing.empty()) throw_missing(missing, "scalar input");
    if (scalar.size() != pairs.size()) {
        std::unordered_set<std::string> aids;
        for (const auto& r : a) aids.insert(r.id);
        std::vector<std::string> extra;
        for (const auto& [id, v] : scalar)
            if (!aids.contains(id)) extra.push_back(id);
        throw_missing(extra, "PVI records");
    }
    return correlate_sorted(std::move(pairs));
}

}  // namespace vinfo
