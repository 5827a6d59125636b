#include "vinfo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "vinfo/error.hpp"
#include "vinfo/estimation.hpp"
#include "vinfo/random.hpp"

namespace vinfo {
namespace {

std::string vocab_token(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "w%05zu", i);
    return buf;
}

std::string instance_id(Split split, std::size_t i) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s-%06zu", std::string(split_name(split)).c_str(), i);
    return buf;
}

LabelSpace planted_labels(std::size_t k, PlantedLayout layout) {
    if (layout == PlantedLayout::nli && k == 3) return LabelSpace({"entailment", "neutral", "contradiction"});
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    return LabelSpace(std::move(names));
}

std::size_t filler_count(const PlantedSpec& s) { return s.vocab_size - s.n_classes * s.triggers_per_class; }

class FillerSampler {
public:
    FillerSampler(const PlantedSpec& s) : first_(s.n_classes * s.triggers_per_class), count_(filler_count(s)) {}
    std::string draw(Rng& rng) const { return vocab_token(first_ + rng.below(count_)); }

private:
    std::size_t first_, count_;
};

std::vector<std::string> fillers(Rng& rng, const FillerSampler& f, std::size_t len,
                                 const std::unordered_set<std::string>* exclude = nullptr) {
    std::vector<std::string> out;
    out.reserve(len);
    while (out.size() < len) {
        auto t = f.draw(rng);
        if (exclude && exclude->contains(t)) continue;
        out.push_back(std::move(t));
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& toks) {
    std::string s;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i) s.push_back(' ');
        s += toks[i];
    }
    return s;
}

Dataset planted_split(const PlantedSpec& s, const std::vector<std::vector<std::string>>& triggers, Split split,
                      std::size_t n) {
    Rng rng(mix_seed(s.seed, split_name(split)));
    const FillerSampler sampler(s);
    const std::size_t k = s.n_classes;

    // Trigger classes round-robin, then shuffled.
    std::vector<std::size_t> trigger_class(n);
    for (std::size_t i = 0; i < n; ++i) trigger_class[i] = i % k;
    rng.shuffle(trigger_class);

    // Exactly round(flip * count) flips per trigger class.
    std::vector<LabelIndex> gold(n);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (trigger_class[i] == c) members.push_back(i);
        rng.shuffle(members);
        const auto flips = static_cast<std::size_t>(std::llround(s.flip_rate * static_cast<double>(members.size())));
        for (std::size_t j = 0; j < members.size(); ++j) {
            std::size_t label = c;
            if (j < flips) label = (c + 1 + j % (k - 1)) % k;
            gold[members[j]] = static_cast<LabelIndex>(label);
        }
    }

    Dataset d;
    d.label_space = planted_labels(k, s.layout);
    d.split = split;
    d.schema = s.layout == PlantedLayout::single ? std::vector<std::string>{"text"}
                                                  : std::vector<std::string>{"premise", "hypothesis"};
    d.instances.reserve(n);
    const std::size_t span = s.max_filler - s.min_filler + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = trigger_class[i];
        const auto& trig = triggers[c][rng.below(triggers[c].size())];
        Instance inst;
        inst.id = instance_id(split, i);
        inst.gold = gold[i];
        if (s.layout == PlantedLayout::single) {
            auto toks = fillers(rng, sampler, s.min_filler + rng.below(span));
            toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(rng.below(toks.size() + 1)), trig);
            inst.fields["text"] = join_tokens(toks);
        } else {
            auto premise = fillers(rng, sampler, s.min_filler + rng.below(span));
            std::unordered_set<std::string> in_premise(premise.begin(), premise.end());
            const std::size_t hyp_len = 1 + rng.below(std::max<std::size_t>(1, s.max_filler / 2));
            auto hyp = fillers(rng, sampler, hyp_len, &in_premise);
            if (c == 0) {
                const std::size_t copies = 1 + rng.below(3);
                for (std::size_t j = 0; j < copies; ++j) {
                    const auto& src = premise[rng.below(premise.size())];
                    hyp.insert(hyp.begin() + static_cast<std::ptrdiff_t>(rng.below(hyp.size() + 1)), src);
                }
            }
            hyp.insert(hyp.begin() + static_cast<std::ptrdiff_t>(rng.below(hyp.size() + 1)), trig);
            inst.fields["premise"] = join_tokens(premise);
            inst.fields["hypothesis"] = join_tokens(hyp);
        }
        d.instances.push_back(std::move(inst));
    }
    return d;
}

}  // namespace

void PlantedSpec::validate() const {
    if (n == 0) throw EmptyInputError("planted dataset needs n >= 1");
    if (n_classes < 2) throw ConfigError("planted dataset needs at least two classes");
    if (triggers_per_class < 1) throw ConfigError("triggers_per_class must be >= 1");
    if (!(flip_rate >= 0.0 && flip_rate < 0.5)) throw ConfigError("flip_rate must lie in [0, 0.5)");
    if (min_filler < 1 || max_filler < min_filler) throw ConfigError("filler length range is invalid");
    const std::size_t triggers = n_classes * triggers_per_class;
    const std::size_t needed = layout == PlantedLayout::single ? 1 : 2 * max_filler + 1;
    if (vocab_size < triggers + needed)
        throw ConfigError("vocab_size " + std::to_string(vocab_size) + " cannot host " + std::to_string(triggers) +
                          " triggers plus " + std::to_string(needed) + " filler tokens");
}

double planted_information_bits(std::size_t n_classes, double flip_rate) {
    if (n_classes < 2) throw ConfigError("need at least two classes");
    const double k = static_cast<double>(n_classes);
    if (!(flip_rate >= 0.0 && flip_rate <= (k - 1.0) / k)) throw ConfigError("flip_rate out of range");
    auto xlogx = [](double p) { return p > 0.0 ? p * std::log2(p) : 0.0; };
    const double h_cond = -xlogx(1.0 - flip_rate) - (k - 1.0) * xlogx(flip_rate / (k - 1.0));
    return std::max(0.0, std::log2(k) - h_cond);
}

PlantedData generate_planted(const PlantedSpec& spec) {
    spec.validate();
    PlantedData out;
    for (std::size_t c = 0; c < spec.n_classes; ++c) {
        std::vector<std::string> t;
        for (std::size_t j = 0; j < spec.triggers_per_class; ++j) t.push_back(vocab_token(c * spec.triggers_per_class + j));
        out.triggers.push_back(std::move(t));
    }
    out.train = planted_split(spec, out.triggers, Split::train, spec.n);
    out.dev = planted_split(spec, out.triggers, Split::dev, spec.dev_n ? spec.dev_n : std::max<std::size_t>(1, spec.n / 2));
    out.test = planted_split(spec, out.triggers, Split::test, spec.test_n ? spec.test_n : std::max<std::size_t>(1, spec.n / 2));
    out.true_info_bits = planted_information_bits(spec.n_classes, spec.flip_rate);
    return out;
}

Dataset generate_independent(std::size_t n, std::size_t n_classes, std::uint64_t seed, Split split,
                             std::size_t vocab_size) {
    if (n == 0) throw EmptyInputError("independent dataset needs n >= 1");
    if (n_classes < 2) throw ConfigError("independent dataset needs at least two classes");
    if (vocab_size < 1) throw ConfigError("vocab_size must be >= 1");
    Rng rng(mix_seed(seed, "independent"));
    Dataset d;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < n_classes; ++c) names.push_back("c" + std::to_string(c));
    d.label_space = LabelSpace(std::move(names));
    d.schema = {"text"};
    d.split = split;
    for (std::size_t i = 0; i < n; ++i) {
        Instance inst;
        inst.id = instance_id(split, i);
        const std::size_t len = 4 + rng.below(9);
        std::vector<std::string> toks;
        for (std::size_t j = 0; j < len; ++j) toks.push_back(vocab_token(rng.below(vocab_size)));
        inst.fields["text"] = join_tokens(toks);
        inst.gold = static_cast<LabelIndex>(rng.below(n_classes));
        d.instances.push_back(std::move(inst));
    }
    return d;
}

std::vector<SweepRow> fraction_sweep(const FamilySpec& family, const Dataset& train, const Dataset& dev,
                                     const Dataset& eval, const std::vector<double>& fractions, std::size_t repeats,
                                     std::uint64_t seed) {
    if (repeats < 1) throw ConfigError("repeats must be >= 1");
    if (train.empty()) throw EmptyInputError("training set is empty");
    std::vector<SweepRow> rows;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1]");
        SweepRow row;
        row.fraction = f;
        row.repeats = repeats;
        row.sample_size = f == 1.0 ? train.size()
                                   : static_cast<std::size_t>(std::llround(f * static_cast<double>(train.size())));
        row.sample_size = std::max<std::size_t>(row.sample_size, 1);
        row.flagged = row.sample_size < 2 * train.label_space.size();

        std::vector<double> estimates;
        for (std::size_t r = 0; r < repeats; ++r) {
            FamilySpec fam = family;
            if (r > 0) fam.seed = mix_seed(family.seed, "repeat-" + std::to_string(r));
            Dataset sample;
            const Dataset* used = &train;
            if (f != 1.0) {
                Rng rng(mix_seed(seed, "fraction-" + std::to_string(f) + "-" + std::to_string(r)));
                sample.schema = train.schema;
                sample.label_space = train.label_space;
                sample.split = train.split;
                sample.instances.reserve(row.sample_size);
                for (std::size_t k = 0; k < row.sample_size; ++k) {
                    Instance inst = train.instances[rng.below(train.size())];
                    inst.id += "#" + std::to_string(k);
                    sample.instances.push_back(std::move(inst));
                }
                used = &sample;
            }
            try {
                const auto pair = train_pair(fam, *used, dev);
                estimates.push_back(compute_all(pair, eval).summary.v_information_bits);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
        if (!estimates.empty()) {
            row.error.clear();
            const auto est = mean_with_std_err(estimates);
            row.mean_bits = est.bits;
            row.std_bits = est.std_err * std::sqrt(static_cast<double>(est.n));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace vinfo
